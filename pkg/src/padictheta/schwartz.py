"""Schwartz-Bruhat weights as signed sums of lattice indicators with local refinements at p."""

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import QuadExt, as_fraction, valuation
from .lattice import LocalLatticeAtP, geodesic_lattice
from .padic import embed

__all__ = [
    "MembershipIn",
    "PairingUnit",
    "SchwartzTerm",
    "SchwartzWeight",
    "build_phi_j",
    "check_special",
    "SpecialReport",
    "telescope_holds",
]


@dataclass(frozen=True)
class MembershipIn:
    lattice: LocalLatticeAtP

    def holds(self, v):
        return self.lattice.member(v)


@dataclass(frozen=True)
class PairingUnit:
    """<v, w> is a p-adic unit under ``embedding``."""

    w: tuple
    embedding: object

    def holds(self, v, algebra):
        z = algebra.pairing(v, self.w)
        if z == 0:
            return False
        if isinstance(z, QuadExt) and not z.is_rational():
            return embed(z, self.embedding).valuation == 0
        zf = z.a if isinstance(z, QuadExt) else as_fraction(z)
        return valuation(zf, self.embedding.p) == 0


@dataclass(frozen=True)
class SchwartzTerm:
    coeff: int
    globals_: tuple
    locals_: tuple = ()

    def indicator(self, v, algebra):
        for G in self.globals_:
            if not G.contains(v):
                return 0
        for cond in self.locals_:
            ok = cond.holds(v) if isinstance(cond, MembershipIn) else cond.holds(v, algebra)
            if not ok:
                return 0
        return 1


@dataclass(frozen=True)
class SchwartzWeight:
    algebra: object
    terms: tuple = field(default=())

    @classmethod
    def from_lattices(cls, algebra, signed):
        """Build sum of coeff * 1_L from (coeff, TernaryLattice) pairs."""
        return cls(algebra, tuple(SchwartzTerm(int(c), (L,)) for c, L in signed))

    def evaluate(self, v):
        v = tuple(as_fraction(x) for x in v)
        if all(x == 0 for x in v):
            # every lattice contains 0; local unit conditions fail there
            return sum(t.coeff for t in self.terms if not any(isinstance(c, PairingUnit) for c in t.locals_))
        return sum(t.coeff * t.indicator(v, self.algebra) for t in self.terms)

    __call__ = evaluate

    def __add__(self, other):
        if self.algebra != other.algebra:
            raise ValueError("weights over different algebras")
        return SchwartzWeight(self.algebra, self.terms + other.terms)

    def scale(self, c):
        return SchwartzWeight(self.algebra, tuple(SchwartzTerm(c * t.coeff, t.globals_, t.locals_) for t in self.terms))

    def with_locals(self, conds):
        return SchwartzWeight(
            self.algebra,
            tuple(SchwartzTerm(t.coeff, t.globals_, t.locals_ + tuple(conds)) for t in self.terms),
        )


def _signed_w(eig, j, sign):
    p = eig.embedding.p
    s = Fraction(p) ** j
    if sign > 0:
        return tuple(x * s for x in eig.w_plus)
    return tuple(x / s for x in eig.w_minus)


def build_phi_j(Phi, eig, j, sign):
    """Phi restricted to v in L_j with <v, p^(+-j) w^(+-)> a unit."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    Lj = geodesic_lattice(eig, j)
    return Phi.with_locals([MembershipIn(Lj), PairingUnit(_signed_w(eig, j, sign), eig.embedding)])


def telescope_holds(eig, j, sign, v):
    """Check 1_{L_j, unit pairing}(v) = 1_{L_j}(v) - 1_{L_j and L_(j -+ 1)}(v)."""
    A = eig.algebra
    Lj = geodesic_lattice(eig, j)
    Lnext = geodesic_lattice(eig, j - 1 if sign > 0 else j + 1)
    lhs = int(Lj.member(v) and PairingUnit(_signed_w(eig, j, sign), eig.embedding).holds(v, A))
    rhs = int(Lj.member(v)) - int(Lj.member(v) and Lnext.member(v))
    return lhs == rhs


@dataclass
class SpecialReport:
    results: list

    @property
    def passed(self):
        return all(ok for _, ok in self.results)

    def failures(self):
        return [v for v, ok in self.results if not ok]


def check_special(Phi, samples, p):
    """Test Phi(p v) = Phi(v) on every sample."""
    out = []
    for v in samples:
        v = tuple(as_fraction(x) for x in v)
        pv = tuple(p * x for x in v)
        out.append((v, Phi.evaluate(pv) == Phi.evaluate(v)))
    return SpecialReport(out)
