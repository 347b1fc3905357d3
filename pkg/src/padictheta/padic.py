"""Fixed-precision p-adic numbers, Hensel roots, the Iwasawa logarithm and unit powers.

A :class:`PadicNumber` is ``p^valuation * unit`` with ``unit`` known modulo
``p^prec``.  Everything here is exact integer arithmetic.
"""

from dataclasses import dataclass
from fractions import Fraction

from .algebra import QuadExt, as_fraction, valuation

__all__ = [
    "PrecisionError",
    "PadicNumber",
    "Embedding",
    "legendre",
    "hensel_root",
    "embed",
    "iwasawa_log",
    "log_unit_residue",
    "teichmuller",
    "unit_power",
    "unit_power_residue",
    "weight",
]


class PrecisionError(ArithmeticError):
    """Raised when a result cannot be decided at the working precision."""


def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@dataclass(frozen=True)
class PadicNumber:
    """``p^valuation * unit`` with ``unit`` a residue mod ``p^prec`` prime to p.

    Zero is represented with ``unit == 0`` and ``valuation`` equal to the
    absolute precision at which it is known to vanish.
    """

    p: int
    valuation: int
    unit: int
    prec: int

    @classmethod
    def from_rational(cls, r, p, prec):
        r = as_fraction(r)
        if r == 0:
            return cls(p, prec, 0, 0)
        v = valuation(r, p)
        num = r.numerator // p ** max(v, 0)
        den = r.denominator // p ** max(-v, 0)
        mod = p ** prec
        return cls(p, v, num * pow(den, -1, mod) % mod, prec)

    @property
    def is_zero(self):
        return self.unit == 0

    @property
    def modulus(self):
        return self.p ** self.prec

    @property
    def absolute_precision(self):
        return self.valuation + self.prec

    def __mul__(self, other):
        if isinstance(other, int):
            other = PadicNumber.from_rational(other, self.p, self.prec)
        if self.is_zero or other.is_zero:
            return PadicNumber(self.p, self.valuation + other.valuation, 0, 0)
        prec = min(self.prec, other.prec)
        mod = self.p ** prec
        return PadicNumber(self.p, self.valuation + other.valuation, self.unit * other.unit % mod, prec)

    def __add__(self, other):
        p = self.p
        absprec = min(self.absolute_precision, other.absolute_precision)
        lo = min(self.valuation, other.valuation)
        if absprec <= lo:
            raise PrecisionError("sum has no significant digits")
        mod = p ** (absprec - lo)
        total = 0
        for x in (self, other):
            if not x.is_zero:
                total += x.unit * p ** (x.valuation - lo)
        total %= mod
        if total == 0:
            return PadicNumber(p, absprec, 0, 0)
        v = 0
        while total % p == 0:
            total //= p
            v += 1
        return PadicNumber(p, lo + v, total % p ** (absprec - lo - v), absprec - lo - v)

    def __neg__(self):
        return PadicNumber(self.p, self.valuation, (-self.unit) % self.modulus if self.prec else 0, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def residue(self, N):
        """The value mod p^N (requires valuation >= 0 and enough precision)."""
        if self.is_zero:
            if self.valuation < N:
                raise PrecisionError(f"zero known only mod p^{self.valuation}")
            return 0
        if self.valuation < 0:
            raise ValueError("value is not p-integral")
        if self.valuation >= N:
            return 0
        if self.absolute_precision < N:
            raise PrecisionError(f"value known mod p^{self.absolute_precision}, asked mod p^{N}")
        return self.unit * self.p ** self.valuation % self.p ** N

    def __repr__(self):
        if self.is_zero:
            return f"O({self.p}^{self.valuation})"
        return f"{self.p}^{self.valuation} * {self.unit} (mod {self.p}^{self.prec})"


@dataclass(frozen=True)
class Embedding:
    """A root of x^2 + c in Z_p, pinned by its residue ``seed`` mod p."""

    c: Fraction
    p: int
    seed: int
    root: int
    prec: int

    def at_precision(self, N):
        if N <= self.prec:
            return Embedding(self.c, self.p, self.seed, self.root % self.p ** N, N)
        return hensel_root(self.c, self.p, self.seed, N)

    def root_mod(self, N):
        return self.at_precision(N).root


def hensel_root(c, p, seed, N):
    """Newton-lift a root of x^2 + c from ``seed`` mod p to mod p^N."""
    if p == 2:
        raise ValueError("p = 2 is not supported")
    c = as_fraction(c)
    if c.numerator % p == 0 or c.denominator % p == 0:
        raise ValueError(f"p = {p} ramifies in Q[x]/(x^2 + {c})")
    seed %= p
    cmod = lambda m: c.numerator * pow(c.denominator, -1, m) % m  # noqa: E731
    if (seed * seed + cmod(p)) % p != 0:
        raise ValueError(f"{seed} is not a root of x^2 + {c} mod {p}")
    if 2 * seed % p == 0:
        raise ValueError("derivative vanishes mod p")
    x, k = seed, 1
    while k < N:
        k = min(2 * k, N)
        m = p ** k
        x = (x - (x * x + cmod(m)) * pow(2 * x, -1, m)) % m
    root = x % p ** N
    assert (root * root + cmod(p ** N)) % p ** N == 0
    return Embedding(c, p, seed, root, N)


def _qe_parts(z):
    """Write z = (A + B x) / d with integers A, B, d."""
    if isinstance(z, QuadExt):
        a, b = z.a, z.b
    else:
        a, b = as_fraction(z), Fraction(0)
    d = a.denominator * b.denominator
    return int(a * d), int(b * d), d


def embed(z, E, prec=None):
    """Image of ``z`` in Q_p with exact valuation and ``prec`` unit digits."""
    p = E.p
    prec = E.prec if prec is None else prec
    if isinstance(z, QuadExt) and z.c != E.c:
        raise ValueError("element and embedding live in different fields")
    A, B, d = _qe_parts(z)
    if A == 0 and B == 0:
        return PadicNumber(p, prec, 0, 0)
    vd = valuation(d, p)
    dunit = d // p ** vd
    # The valuation of A + B*root is at most v_p of the norm A^2 + c B^2.
    c = E.c
    normnum = A * A * c.denominator + c.numerator * B * B
    vmax = valuation(normnum, p) - valuation(c.denominator, p) if normnum else 0
    M = max(vmax, 0) + prec + 1
    root = E.root_mod(M)
    mod = p ** M
    val = (A + B * root) % mod
    if val == 0:
        raise PrecisionError("embedded value vanished below its norm bound")
    v = 0
    while val % p == 0:
        val //= p
        v += 1
    pm = p ** prec
    unit = val * pow(dunit, -1, pm) % pm
    return PadicNumber(p, v - vd, unit, prec)


def teichmuller(u, p, N):
    """Teichmuller representative of a unit residue u, mod p^N."""
    return pow(u, p ** (N - 1), p ** N)


def log_unit_residue(u, p, N):
    """Iwasawa log of a unit given mod p^N, returned mod p^N."""
    if u % p == 0:
        raise ValueError("log_unit_residue needs a p-adic unit")
    # log(u) = log(u^(p-1)) / (p-1); u^(p-1) lies in 1 + pZ_p.
    # Terms t^n / n with v_p(n) = e are computed mod p^(N + e).
    emax = 0
    n = 1
    while n - valuation(n, p) < N:
        emax = max(emax, valuation(n, p))
        n += 1
    nterms = n
    work = p ** (N + emax)
    t = (pow(u, p - 1, work) - 1) % work
    mod = p ** N
    total = 0
    tn = 1
    for n in range(1, nterms + 1):
        tn = tn * t % work
        e = valuation(n, p)
        term = (tn // p ** e) * pow(n // p ** e, -1, mod)
        total += term if n % 2 else -term
    return total * pow(p - 1, -1, mod) % mod


def iwasawa_log(u):
    """Iwasawa branch (log_p(p) = 0) of the p-adic log of a nonzero PadicNumber."""
    if u.is_zero:
        raise ValueError("log of zero")
    if u.prec == 0:
        raise PrecisionError("no unit digits")
    r = log_unit_residue(u.unit, u.p, u.prec)
    if r == 0:
        return PadicNumber(u.p, u.prec, 0, 0)
    v = 0
    while r % u.p == 0:
        r //= u.p
        v += 1
    return PadicNumber(u.p, v, r % u.p ** (u.prec - v), u.prec - v)


def weight(k, p):
    """Normalise a weight to the pair (k0 mod p-1, k1 in Z_p)."""
    if isinstance(k, tuple):
        k0, k1 = k
        return (k0 % (p - 1), k1)
    return (k % (p - 1), k)


def unit_power_residue(u, k, p, N):
    """omega(u)^k0 * <u>^k1 mod p^N for a unit residue u."""
    k0, k1 = weight(k, p)
    mod = p ** N
    w = teichmuller(u % mod, p, N)
    one_unit = u * pow(w, -1, mod) % mod  # <u> = u / omega(u), in 1 + pZ_p
    # <u>^k1 mod p^N depends only on k1 mod p^(N-1)
    e = k1 % p ** (N - 1) if N > 1 else 0
    return pow(w, k0, mod) * pow(one_unit, e, mod) % mod


def unit_power(u, k):
    if u.is_zero or u.valuation != 0:
        raise ValueError("unit_power needs a p-adic unit")
    return PadicNumber(u.p, 0, unit_power_residue(u.unit, k, u.p, u.prec), u.prec)
