"""Truncated q-expansions and the theta series attached to a Schwartz-Bruhat weight.

A :class:`QSeries` knows every coefficient with index ``1 <= n <= bound`` and,
in addition, the coefficients at a finite set of sparse indices ``extra``
above the bound.  Asking for anything else raises :class:`BoundError`.
"""

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import QuadExt
from .lattice import (
    VectorBlock,
    block_in_lattice,
    enumerate_norms,
    enumerate_range,
    geodesic_lattice,
    intersect_local,
    pairing_residues,
)
from .padic import log_unit_residue, unit_power_residue

__all__ = [
    "BoundError",
    "QSeries",
    "series_combine",
    "IntegerPower",
    "PadicPower",
    "LogDerivative",
    "ThetaBuilder",
    "ThetaCheck",
]

RINGS = ("ZZ", "K", "ZpN")


class BoundError(IndexError):
    """A coefficient outside the trustworthy range was requested."""


class QSeries:
    def __init__(self, coeffs=None, bound=0, ring="ZZ", modulus=None, extra=(), a0=0):
        if ring not in RINGS:
            raise ValueError(f"unknown ring {ring!r}")
        if (ring == "ZpN") != (modulus is not None):
            raise ValueError("a modulus is required exactly for the ZpN ring")
        self.bound = int(bound)
        self.ring = ring
        self.modulus = modulus
        self.extra = frozenset(int(n) for n in extra if n > self.bound)
        self.a0 = self._norm(a0)
        self.coeffs = {}
        for n, a in (coeffs or {}).items():
            n = int(n)
            if not self.known(n) or n == 0:
                continue
            a = self._norm(a)
            if a != 0:
                self.coeffs[n] = a

    def _norm(self, a):
        if self.ring == "ZpN":
            return int(a) % self.modulus
        if self.ring == "ZZ":
            if isinstance(a, Fraction):
                if a.denominator != 1:
                    raise ValueError("non-integral coefficient in a ZZ series")
                return int(a)
            return int(a)
        return a

    def known(self, n):
        return n == 0 or 1 <= n <= self.bound or n in self.extra

    def indices(self):
        return list(range(1, self.bound + 1)) + sorted(self.extra)

    def __getitem__(self, n):
        if not self.known(n):
            raise BoundError(f"coefficient {n} is beyond the known range")
        if n == 0:
            return self.a0
        return self.coeffs.get(n, 0)

    def _like(self, coeffs, bound=None, extra=None, a0=None):
        return QSeries(
            coeffs,
            self.bound if bound is None else bound,
            self.ring,
            self.modulus,
            self.extra if extra is None else extra,
            self.a0 if a0 is None else a0,
        )

    def _check(self, other):
        if self.ring != other.ring or self.modulus != other.modulus:
            raise ValueError("series over different coefficient rings")

    def _common(self, other):
        b = min(self.bound, other.bound)
        extra = {n for n in self.indices() if n > b and other.known(n)}
        return b, extra

    def __add__(self, other):
        return series_combine([(1, self), (1, other)])

    def __sub__(self, other):
        return series_combine([(1, self), (-1, other)])

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        return self._like({n: c * a for n, a in self.coeffs.items()}, a0=c * self.a0)

    def is_zero(self):
        return not self.coeffs and self.a0 == 0

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.modulus == other.modulus
            and self.bound == other.bound
            and self.extra == other.extra
            and self.a0 == other.a0
            and self.coeffs == other.coeffs
        )

    def restrict(self, bound, extra=()):
        keep = {n for n in self.extra | set(extra) if self.known(n)}
        return self._like(dict(self.coeffs), bound=min(bound, self.bound), extra=keep)

    def reduce(self, modulus):
        """Image in Z/modulus (from ZZ, or from a ZpN series with a multiple modulus)."""
        if self.ring == "ZpN" and self.modulus % modulus:
            raise ValueError("new modulus must divide the old one")
        if self.ring == "K":
            raise ValueError("reduce a K-valued series through an embedding first")
        return QSeries(self.coeffs, self.bound, "ZpN", modulus, self.extra, self.a0)

    def divide_by(self, p):
        """Divide every coefficient by p (all must be divisible)."""
        if self.ring == "ZpN":
            if self.modulus % p:
                raise ValueError("modulus not divisible by p")
            new = self.modulus // p
        else:
            new = None
        out = {}
        for n, a in list(self.coeffs.items()) + [(0, self.a0)]:
            if self.ring == "K":
                out[n] = a / p
                continue
            if a % p:
                raise ValueError(f"coefficient {n} is not divisible by {p}")
            out[n] = a // p
        a0 = out.pop(0)
        return QSeries(out, self.bound, self.ring, new, self.extra, a0)

    def map_values(self, f, ring, modulus=None):
        return QSeries(
            {n: f(a) for n, a in self.coeffs.items()}, self.bound, ring, modulus, self.extra, f(self.a0)
        )

    # serialisation -----------------------------------------------------------

    def rows(self):
        return [(n, self[n]) for n in self.indices()]

    def _cell(self, a):
        if isinstance(a, QuadExt):
            return f"{a.a}+{a.b}*x"
        return int(a)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "a_n"])
        for n, a in self.rows():
            w.writerow([n, self._cell(a)])
        return buf.getvalue()

    def to_json(self):
        if self.ring == "K":
            raise ValueError("JSON export supports integer and residue rings only")
        return {
            "ring": self.ring,
            "modulus": self.modulus,
            "bound": self.bound,
            "extra": sorted(self.extra),
            "a0": int(self.a0),
            "coefficients": [[n, int(a)] for n, a in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            {n: a for n, a in obj["coefficients"]},
            obj["bound"],
            obj["ring"],
            obj["modulus"],
            obj["extra"],
            obj["a0"],
        )

    def __repr__(self):
        terms = " + ".join(f"{a}*q^{n}" for n, a in sorted(self.coeffs.items())[:8])
        return f"QSeries[{self.ring}{'' if self.modulus is None else f' mod {self.modulus}'}, bound {self.bound}]({terms or '0'})"


def series_combine(items):
    """Linear combination sum c_i f_i on the common known range."""
    items = [(c, f) for c, f in items]
    if not items:
        raise ValueError("nothing to combine")
    first = items[0][1]
    bound = first.bound
    for _, f in items[1:]:
        first._check(f)
        bound = min(bound, f.bound)
    extra = {n for n in first.indices() if n > bound and all(f.known(n) for _, f in items)}
    out = {}
    a0 = 0
    for c, f in items:
        a0 = a0 + c * f.a0
        for n, a in f.coeffs.items():
            if n <= bound or n in extra:
                out[n] = out.get(n, 0) + c * a
    return QSeries(out, bound, first.ring, first.modulus, extra, a0)


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class IntegerPower:
    k: int


@dataclass(frozen=True)
class PadicPower:
    k: object  # int, or a pair (k0 mod p-1, k1)


@dataclass(frozen=True)
class LogDerivative:
    pass


@dataclass
class ThetaCheck:
    """Outcome of the telescope assertions made while building a theta series."""

    name: str
    checked: int = 0
    failures: int = 0

    @property
    def passed(self):
        return self.failures == 0


class ThetaBuilder:
    """Theta series sum_j sum_v Phi_j^(+-)(v) W(<p^(+-j) w^(+-), v>) q^Q(v).

    ``Phi`` must be a signed sum of single Z[1/p]-lattice indicators; the
    local refinements at p are added here.  Enumeration happens on the exact
    Z-lattices Phi-term ∩ L_j, so no vector is examined twice.
    """

    def __init__(self, Phi, eig, precision=12, threads=1):
        for t in Phi.terms:
            if len(t.globals_) != 1 or t.locals_:
                raise ValueError("theta needs Phi as a signed sum of single lattice indicators")
        if eig.embedding is None:
            raise ValueError("eigen-data must be oriented")
        self.Phi = Phi
        self.eig = eig
        self.p = eig.embedding.p
        self.N = precision
        self.threads = threads
        self.E = eig.embedding.at_precision(precision + 8)
        self._lam = {}
        self._blocks = {}
        self.checks = {}

    @property
    def two_t(self):
        return 2 * self.eig.t

    def lattice(self, term, j):
        key = (term, j)
        if key not in self._lam:
            G = self.Phi.terms[term].globals_[0]
            self._lam[key] = intersect_local(G, geodesic_lattice(self.eig, j))
        return self._lam[key]

    def vectors(self, term, j, bound, extra=()):
        key = (term, j, bound, tuple(sorted(extra)))
        if key not in self._blocks:
            L = self.lattice(term, j)
            dense = enumerate_range(L, 0, bound, self.threads)
            sparse = [n for n in extra if n > bound]
            if sparse:
                dense = VectorBlock.concat(L, dense.K, [dense, enumerate_norms(L, sparse, self.threads)])
            self._blocks[key] = dense
        return self._blocks[key]

    def _w(self, j, sign):
        s = Fraction(self.p) ** j
        if sign > 0:
            return tuple(x * s for x in self.eig.w_plus)
        return tuple(x / s for x in self.eig.w_minus)

    def _unit_residues(self, block, w, N):
        """Mask of vectors with <v, w> a unit, and its unit residues mod p^N."""
        p = self.p
        s, R = pairing_residues(block, w, self.E, N)
        if s < 0:
            s, R = pairing_residues(block, w, self.E, N - s)
        if s > 0:
            return np.zeros(len(R), dtype=bool), R
        shift = p ** (-s)
        mask = (R % shift == 0) & ((R // shift) % p != 0) if shift > 1 else (R % p != 0)
        if shift > 1:
            R = R // shift
        return mask, R % (p ** N)

    def _telescope(self, term, j, sign, block, mask):
        name = f"telescope term{term} j{j} {'+' if sign > 0 else '-'}"
        chk = self.checks.setdefault(name, ThetaCheck(name))
        nb = j - 1 if sign > 0 else j + 1
        inner = intersect_local(self.lattice(term, j), geodesic_lattice(self.eig, nb))
        in_next = block_in_lattice(block, inner)
        bad = int(np.count_nonzero(mask == in_next))
        chk.checked += len(block)
        chk.failures += bad

    def piece(self, term, j, sign, kind, bound, extra=(), check=True):
        """Unsigned contribution of one Phi term, one j and one sign."""
        block = self.vectors(term, j, bound, extra)
        w = self._w(j, sign)
        p, N = self.p, self.N
        if isinstance(kind, IntegerPower) and kind.k == 0:
            mask, _ = self._unit_residues(block, w, 1)
            if check:
                self._telescope(term, j, sign, block, mask)
            norms = block.norms()[mask]
            u, c = np.unique(norms, return_counts=True)
            return QSeries(dict(zip(u.tolist(), c.tolist())), bound, "ZZ", None, extra)
        if isinstance(kind, IntegerPower):
            mask, _ = self._unit_residues(block, w, 1)
            if check:
                self._telescope(term, j, sign, block, mask)
            A = self.eig.algebra
            z = [A.pairing(b, w) for b in block.lattice.basis]
            out = {}
            for n, D in zip(block.coords[mask], block.norms()[mask]):
                val = sum((int(a) * zi for a, zi in zip(n, z)), QuadExt(0, 0, self.eig.c))
                out[int(D)] = out.get(int(D), 0) + val ** kind.k
            return QSeries(out, bound, "K", None, extra)
        mask, R = self._unit_residues(block, w, N)
        if check:
            self._telescope(term, j, sign, block, mask)
        norms = block.norms()[mask]
        units = np.asarray(R)[mask]
        if isinstance(kind, LogDerivative):
            f = lambda u: log_unit_residue(u, p, N)  # noqa: E731
        elif isinstance(kind, PadicPower):
            f = lambda u: unit_power_residue(u, kind.k, p, N)  # noqa: E731
        else:
            raise TypeError(f"unknown weight {kind!r}")
        out = {}
        cache = {}
        pairs = np.stack([norms, units.astype(np.int64)], axis=1) if len(norms) else np.zeros((0, 2), np.int64)
        if len(pairs):
            uniq, cnt = np.unique(pairs, axis=0, return_counts=True)
            for (D, u), c in zip(uniq.tolist(), cnt.tolist()):
                if u not in cache:
                    cache[u] = f(u)
                out[D] = out.get(D, 0) + c * cache[u]
        return QSeries(out, bound, "ZpN", p ** N, extra)

    def theta(self, kind, bound, extra=(), check=True, terms=None, js=None, signs=(1, -1)):
        """The signed sum of all pieces (optionally restricted)."""
        terms = range(len(self.Phi.terms)) if terms is None else terms
        js = range(self.two_t) if js is None else js
        items = []
        for t in terms:
            c = self.Phi.terms[t].coeff
            for j in js:
                for sign in signs:
                    items.append((c * sign, self.piece(t, j, sign, kind, bound, extra, check)))
        return series_combine(items)

    def check_report(self):
        return {k: {"checked": v.checked, "failures": v.failures} for k, v in sorted(self.checks.items())}
