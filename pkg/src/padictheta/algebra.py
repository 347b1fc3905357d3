"""Exact arithmetic: rationals, imaginary quadratic fields and integer normal forms.

Rationals are plain :class:`fractions.Fraction` values.  Elements of
``K = Q[x]/(x^2 + c)`` are :class:`QuadExt` instances.  Matrices are lists of
rows; nothing in this module touches floating point.
"""

from fractions import Fraction
from math import gcd

__all__ = [
    "QuadExt",
    "as_fraction",
    "parse_rational",
    "valuation",
    "hermite_form",
    "smith_p_part",
    "kernel_mod",
    "row_span_basis",
    "intersect_spans",
    "solve_rational",
    "det",
    "lcm_denominator",
]


def as_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return parse_rational(v)
    raise TypeError(f"cannot interpret {v!r} as a rational number")


def parse_rational(text):
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    return Fraction(text)


def valuation(n, p):
    """p-adic valuation of a nonzero integer or rational."""
    if isinstance(n, Fraction):
        if n == 0:
            raise ValueError("valuation of zero")
        return valuation(n.numerator, p) - valuation(n.denominator, p)
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class QuadExt:
    """The element ``a + b*x`` of ``Q[x]/(x^2 + c)`` with ``c > 0``."""

    __slots__ = ("a", "b", "c")

    def __init__(self, a, b=0, c=None):
        if c is None:
            raise ValueError("QuadExt needs the defining constant c")
        c = as_fraction(c)
        if c <= 0:
            raise ValueError("only imaginary quadratic fields x^2 + c, c > 0, are supported")
        self.a = as_fraction(a)
        self.b = as_fraction(b)
        self.c = c

    @classmethod
    def gen(cls, c):
        return cls(0, 1, c)

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.c != self.c:
                raise ValueError(f"mismatched fields: x^2 + {self.c} vs x^2 + {other.c}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other, 0, self.c)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.a + o.a, self.b + o.b, self.c)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.c)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.a - o.a, self.b - o.b, self.c)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a * other, self.b * other, self.c)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        # x^2 = -c
        return QuadExt(
            self.a * o.a - self.c * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.c,
        )

    __rmul__ = __mul__

    def conj(self):
        return QuadExt(self.a, -self.b, self.c)

    def norm(self):
        return self.a * self.a + self.c * self.b * self.b

    def trace(self):
        return 2 * self.a

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in quadratic field")
        return QuadExt(self.a / n, -self.b / n, self.c)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a / other, self.b / other, self.c)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadExt(1, 0, self.c)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_rational(self):
        return self.b == 0

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return self.c == other.c and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.c))

    def __repr__(self):
        if self.b == 0:
            return f"{self.a}"
        if self.a == 0:
            return f"{self.b}*x"
        sign = "-" if self.a < 0 else "+"
        return f"{self.b}*x {sign} {abs(self.a)}"


def lcm_denominator(values):
    d = 1
    for v in values:
        if isinstance(v, QuadExt):
            for part in (v.a, v.b):
                d = d * part.denominator // gcd(d, part.denominator)
        else:
            v = as_fraction(v)
            d = d * v.denominator // gcd(d, v.denominator)
    return d


def det(M):
    """Determinant by cofactor expansion; exact for any ring-like entries."""
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = 0
    for j in range(n):
        if M[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def solve_rational(M, rhs):
    """Solve ``x M = rhs`` for a row vector x (M square, rows are basis vectors).

    Works over any field-like entries (Fraction or QuadExt) via Cramer's rule.
    """
    n = len(M)
    d = det(M)
    if d == 0:
        raise ValueError("singular basis")
    # x M = rhs  <=>  M^T x^T = rhs^T
    Mt = [[M[r][c] for r in range(n)] for c in range(n)]
    out = []
    for i in range(n):
        Mi = [row[:] for row in Mt]
        for r in range(n):
            Mi[r][i] = rhs[r]
        out.append(det(Mi) / d)
    return out


def _xgcd(a, b):
    # returns (g, s, t) with s*a + t*b = g >= 0
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def hermite_form(A):
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U A = H``.  Nonzero rows of
    ``H`` come first, pivots are positive and the entries above each pivot lie
    in ``[0, pivot)``.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    H = [[int(x) for x in row] for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for col in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if H[i][col] == 0:
                continue
            a, b = H[r][col], H[i][col]
            g, s, t = _xgcd(a, b)
            u, v = a // g, b // g
            Hr, Hi = H[r], H[i]
            H[r] = [s * x + t * y for x, y in zip(Hr, Hi)]
            H[i] = [-v * x + u * y for x, y in zip(Hr, Hi)]
            Ur, Ui = U[r], U[i]
            U[r] = [s * x + t * y for x, y in zip(Ur, Ui)]
            U[i] = [-v * x + u * y for x, y in zip(Ur, Ui)]
        if H[r][col] == 0:
            continue
        if H[r][col] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        piv = H[r][col]
        for i in range(r):
            q = H[i][col] // piv
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
        r += 1
    return H, U


def row_span_basis(rows):
    """A basis (HNF rows) of the Z-span of integer row vectors."""
    H, _ = hermite_form(rows)
    return [row for row in H if any(row)]


def kernel_mod(C, moduli):
    """Basis of ``{n in Z^k : sum_j C[r][j] n_j = 0 mod moduli[r] for all r}``.

    ``C`` is an r x k integer matrix.  The solution lattice always has full
    rank k; the returned rows are a Z-basis in Hermite form.
    """
    r = len(C)
    k = len(C[0])
    # (n, t) with C n - diag(m) t = 0; left kernel of the (k + r) x r transpose.
    At = [[C[row][j] for row in range(r)] for j in range(k)]
    for i in range(r):
        At.append([-moduli[i] if c == i else 0 for c in range(r)])
    H, U = hermite_form(At)
    kernel = [U[i][:k] for i in range(len(H)) if not any(H[i])]
    return row_span_basis(kernel)


def intersect_spans(B1, B2):
    """Z-basis of the intersection of the Z-spans of two full-rank rational row bases."""
    d = lcm_denominator([x for row in B1 + B2 for x in row])
    I1 = [[int(x * d) for x in row] for row in B1]
    I2 = [[int(x * d) for x in row] for row in B2]
    S = I1 + [[-x for x in row] for row in I2]
    H, U = hermite_form(S)
    k = len(B1)
    gens = []
    for i in range(len(H)):
        if any(H[i]):
            continue
        a = U[i][:k]
        gens.append([sum(a[t] * I1[t][c] for t in range(k)) for c in range(len(I1[0]))])
    basis = row_span_basis(gens)
    return [[Fraction(x, d) for x in row] for row in basis]


def smith_p_part(A, p, val=None):
    """Sorted p-adic valuations of the Smith elementary divisors of A.

    ``A`` is a nonsingular square matrix.  With the default ``val`` the
    entries are integers or rationals; pass ``val`` (a valuation function) to
    work with entries of another field, e.g. QuadExt under a p-adic embedding.
    Elimination runs over the local ring at p, so rational input may produce
    negative valuations.
    """
    if val is None:
        M = [[as_fraction(x) for x in row] for row in A]
        val = lambda x: valuation(x, p)  # noqa: E731
    else:
        M = [list(row) for row in A]
    n = len(M)
    if det(M) == 0:
        raise ValueError("smith_p_part needs a nonsingular matrix")
    out = []
    rows = list(range(n))
    cols = list(range(n))
    while rows:
        best = None
        for r in rows:
            for c in cols:
                if M[r][c] != 0:
                    v = val(M[r][c])
                    if best is None or v < best[0]:
                        best = (v, r, c)
        v, pr, pc = best
        out.append(v)
        piv = M[pr][pc]
        for r in rows:
            if r != pr and M[r][pc] != 0:
                f = M[r][pc] / piv
                M[r] = [x - f * y for x, y in zip(M[r], M[pr])]
        rows.remove(pr)
        cols.remove(pc)
    return sorted(out)
