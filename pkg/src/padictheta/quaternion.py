"""Definite rational quaternion algebras, orders, and the trace-zero space.

``B = (a, b | Q)`` has basis ``1, i, j, k`` with ``i^2 = a``, ``j^2 = b`` and
``ij = -ji = k``.  Trace-zero elements are identified with coordinate triples
``(x, y, z)`` in the basis ``(i, j, k)``; on them the reduced norm restricts
to ``Q(v) = -a x^2 - b y^2 + a b z^2``.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    QuadExt,
    as_fraction,
    det,
    intersect_spans,
    lcm_denominator,
    row_span_basis,
    solve_rational,
)


class NotHyperbolicError(ValueError):
    pass


@dataclass(frozen=True)
class QuaternionAlgebra:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))
        if self.a == 0 or self.b == 0:
            raise ValueError("quaternion algebra needs a, b != 0")

    def element(self, *coords):
        if len(coords) == 1 and isinstance(coords[0], str):
            coords = tuple(parse_coords(coords[0]))
        return QuaternionElement(self, tuple(coords))

    def one(self):
        return self.element(1, 0, 0, 0)

    def i(self):
        return self.element(0, 1, 0, 0)

    def j(self):
        return self.element(0, 0, 1, 0)

    def k(self):
        return self.element(0, 0, 0, 1)

    # quadratic form on trace-zero coordinates
    def form_diagonal(self):
        return (-self.a, -self.b, self.a * self.b)

    def Q(self, v):
        d = self.form_diagonal()
        return d[0] * v[0] * v[0] + d[1] * v[1] * v[1] + d[2] * v[2] * v[2]

    def pairing(self, v, w):
        """The bilinear form Q(v + w) - Q(v) - Q(w)."""
        d = self.form_diagonal()
        return 2 * (d[0] * v[0] * w[0] + d[1] * v[1] * w[1] + d[2] * v[2] * w[2])


def parse_coords(text):
    parts = [p for p in text.replace(" ", "").split(",")]
    if len(parts) != 4:
        raise ValueError(f"quaternion literal needs 4 comma-separated rationals, got {text!r}")
    return [Fraction(p) for p in parts]


def _coerce_coord(x):
    return x if isinstance(x, QuadExt) else as_fraction(x)


@dataclass(frozen=True)
class QuaternionElement:
    algebra: QuaternionAlgebra
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != 4:
            raise ValueError("quaternion element needs 4 coordinates")
        object.__setattr__(self, "coords", tuple(_coerce_coord(c) for c in self.coords))

    def _check(self, other):
        if other.algebra != self.algebra:
            raise ValueError("elements of different quaternion algebras")

    def __add__(self, other):
        self._check(other)
        return QuaternionElement(self.algebra, tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return QuaternionElement(self.algebra, tuple(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self):
        return QuaternionElement(self.algebra, tuple(-x for x in self.coords))

    def scale(self, s):
        return QuaternionElement(self.algebra, tuple(x * s for x in self.coords))

    def __mul__(self, other):
        if not isinstance(other, QuaternionElement):
            return self.scale(other)
        return qmul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def conj(self):
        t, x, y, z = self.coords
        return QuaternionElement(self.algebra, (t, -x, -y, -z))

    def trd(self):
        return 2 * self.coords[0]

    def nrd(self):
        a, b = self.algebra.a, self.algebra.b
        t, x, y, z = self.coords
        return t * t - a * x * x - b * y * y + a * b * z * z

    def inverse(self):
        n = self.nrd()
        if n == 0:
            raise ZeroDivisionError("element of reduced norm zero")
        return self.conj().scale(1 / n if not isinstance(n, QuadExt) else n.inverse())

    def vector(self):
        """Coordinates (x, y, z) of a trace-zero element."""
        if self.coords[0] != 0:
            raise ValueError("element is not of trace zero")
        return self.coords[1:]

    def __eq__(self, other):
        if not isinstance(other, QuaternionElement):
            return NotImplemented
        return self.algebra == other.algebra and all(x == y for x, y in zip(self.coords, other.coords))

    def __hash__(self):
        return hash((self.algebra, self.coords))

    def __repr__(self):
        names = ("", "i", "j", "k")
        terms = [f"({c}){n}" if n else f"({c})" for c, n in zip(self.coords, names) if c != 0]
        return " + ".join(terms) if terms else "0"


def qmul(q1, q2):
    if q1.algebra != q2.algebra:
        raise ValueError("elements of different quaternion algebras")
    a, b = q1.algebra.a, q1.algebra.b
    t1, x1, y1, z1 = q1.coords
    t2, x2, y2, z2 = q2.coords
    return QuaternionElement(
        q1.algebra,
        (
            t1 * t2 + a * x1 * x2 + b * y1 * y2 - a * b * z1 * z2,
            t1 * x2 + x1 * t2 - b * y1 * z2 + b * z1 * y2,
            t1 * y2 + y1 * t2 + a * x1 * z2 - a * z1 * x2,
            t1 * z2 + z1 * t2 + x1 * y2 - y1 * x2,
        ),
    )


def vector_element(algebra, v):
    return QuaternionElement(algebra, (0,) + tuple(v))


@dataclass(frozen=True)
class Order:
    """A Z-order, or a Z[1/p]-order when ``p`` is set.

    A Z[1/p]-order is stored through one Z-lattice representative; membership
    only asks for coordinates in Z[1/p].
    """

    algebra: QuaternionAlgebra
    basis: tuple
    p: int = None

    def __post_init__(self):
        basis = tuple(self.basis)
        if len(basis) != 4:
            raise ValueError("an order needs 4 basis elements")
        object.__setattr__(self, "basis", basis)
        M = [list(b.coords) for b in basis]
        if det(M) == 0:
            raise ValueError("order basis is singular")

    def coordinates(self, q):
        return solve_rational([list(b.coords) for b in self.basis], list(q.coords))

    def scalar_ok(self, c):
        c = as_fraction(c)
        d = c.denominator
        if self.p is not None:
            while d % self.p == 0:
                d //= self.p
        return d == 1

    def contains(self, q):
        return all(self.scalar_ok(c) for c in self.coordinates(q))

    def is_closed(self):
        """Exact closure test: all 16 pairwise basis products, plus 1 in the span."""
        if not self.contains(self.algebra.one()):
            return False
        return all(self.contains(x * y) for x in self.basis for y in self.basis)

    def trace_zero_part(self):
        """Z-basis (as trace-zero coordinate triples) of R_0 = R ∩ V."""
        rows = [list(b.coords) for b in self.basis]
        d = lcm_denominator([x for row in rows for x in row])
        ints = [[int(x * d) for x in row] for row in rows]
        # kernel of the trace functional (first coordinate) on the Z-span
        from .algebra import hermite_form

        H, U = hermite_form([[row[0]] for row in ints])
        gens = []
        for i in range(4):
            if H[i][0] == 0:
                c = U[i]
                gens.append([sum(c[t] * ints[t][col] for t in range(4)) for col in range(4)])
        basis = row_span_basis(gens)
        return [tuple(Fraction(x, d) for x in row[1:]) for row in basis]


def conjugate_order(alpha, R):
    inv = alpha.inverse()
    basis = tuple(alpha * b * inv for b in R.basis)
    out = Order(R.algebra, basis, R.p)
    if not out.is_closed():
        raise ValueError("conjugated lattice is not closed under multiplication")
    return out


def intersect_orders(R1, R2):
    if R1.algebra != R2.algebra or R1.p != R2.p:
        raise ValueError("orders over different algebras or scalar rings")
    rows = intersect_spans([list(b.coords) for b in R1.basis], [list(b.coords) for b in R2.basis])
    out = Order(R1.algebra, tuple(QuaternionElement(R1.algebra, tuple(r)) for r in rows), R1.p)
    if not out.is_closed():
        raise ValueError("intersection is not closed under multiplication")
    return out


def nrd_gamma_check(gamma, R):
    return gamma.nrd() == 1 and R.contains(gamma)


def conj_action_matrix(gamma):
    """Matrix M with M @ coords(v) = coords(gamma v gamma^-1) on (i, j, k) coordinates."""
    if gamma.nrd() == 0:
        raise ZeroDivisionError("conjugation by an element of norm zero")
    A = gamma.algebra
    inv = gamma.inverse()
    cols = []
    for e in (A.i(), A.j(), A.k()):
        img = gamma * e * inv
        cols.append(img.coords[1:])
    return [[cols[c][r] for c in range(3)] for r in range(3)]


def apply_matrix(M, v):
    return tuple(sum((M[r][c] * v[c] for c in range(3)), 0 * v[0]) for r in range(3))


def _matmul(A, B):
    n = len(A)
    return [[sum(A[r][t] * B[t][c] for t in range(n)) for c in range(n)] for r in range(n)]


def _squarefree_split(n):
    """Write a positive integer n = c * r^2 with c squarefree."""
    c, r = 1, 1
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        c *= d ** (e % 2)
        r *= d ** (e // 2)
        d += 1
    return c * n, r


def _cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _kernel_vector(M):
    """Nonzero kernel vector of a rank-2 3x3 matrix, first nonzero entry 1."""
    rows = [tuple(r) for r in M]
    for r1 in range(3):
        for r2 in range(r1 + 1, 3):
            v = _cross(rows[r1], rows[r2])
            if any(x != 0 for x in v):
                lead = next(x for x in v if x != 0)
                return tuple(x / lead for x in v)
    raise NotHyperbolicError("eigenspace is not one-dimensional")


@dataclass
class GammaEigenData:
    """Eigen-decomposition of the conjugation action of a hyperbolic unit.

    ``varpi`` is the eigenvalue of ``w_plus``; ``w_minus`` has eigenvalue
    ``1/varpi`` and ``e`` is fixed.  Until :meth:`orient` is called with a
    p-adic embedding, which root is labelled ``varpi`` is arbitrary.
    """

    gamma: QuaternionElement
    c: Fraction
    varpi: QuadExt
    w_plus: tuple
    e: tuple
    w_minus: tuple
    t: int = None
    embedding: object = field(default=None, repr=False)

    @property
    def algebra(self):
        return self.gamma.algebra

    def swapped(self):
        return GammaEigenData(self.gamma, self.c, self.varpi.inverse(), self.w_minus, self.e, self.w_plus)

    def orient(self, embedding):
        """Relabel so that ord_p(varpi) > 0 under ``embedding`` and record t."""
        from .padic import embed

        v = embed(self.varpi, embedding).valuation
        if v == 0:
            raise NotHyperbolicError("varpi is a p-adic unit: gamma is not hyperbolic at p")
        data = self if v > 0 else self.swapped()
        v = abs(v)
        if v % 2:
            raise NotHyperbolicError(f"ord_p(varpi) = {v} is odd")
        return GammaEigenData(data.gamma, data.c, data.varpi, data.w_plus, data.e, data.w_minus, v // 2, embedding)

    def pairing(self, v, w):
        return self.algebra.pairing(v, w)


def eigendecompose(gamma, p=None):
    M = conj_action_matrix(gamma)
    s = M[0][0] + M[1][1] + M[2][2] - 1
    disc = s * s - 4
    if disc >= 0:
        raise NotHyperbolicError("T^2 - sT + 1 does not define an imaginary quadratic field")
    n = -disc
    cfree, r = _squarefree_split(n.numerator * n.denominator)
    c = Fraction(cfree)
    r = Fraction(r, n.denominator)  # -disc = c * r^2
    if p is not None:
        from .padic import legendre

        if legendre(-cfree, p) != 1:
            raise NotHyperbolicError(f"x^2 + {cfree} does not split at p = {p}")
    varpi = QuadExt(s / 2, r / 2, c)
    eig = []
    for lam in (varpi, varpi.inverse(), QuadExt(1, 0, c)):
        shifted = [[QuadExt(M[i][j], 0, c) - (lam if i == j else 0) for j in range(3)] for i in range(3)]
        eig.append(_kernel_vector(shifted))
    w_plus, w_minus, e = eig
    e = tuple(x.a for x in e)
    data = GammaEigenData(gamma, c, varpi, w_plus, e, w_minus)
    _check_eigendata(data, M)
    return data


def _check_eigendata(data, M):
    A = data.algebra
    Mq = [[QuadExt(x, 0, data.c) for x in row] for row in M]
    if apply_matrix(Mq, data.w_plus) != tuple(data.varpi * x for x in data.w_plus):
        raise AssertionError("w_plus is not a varpi-eigenvector")
    if apply_matrix(Mq, data.w_minus) != tuple(data.varpi.inverse() * x for x in data.w_minus):
        raise AssertionError("w_minus is not a varpi^-1-eigenvector")
    if apply_matrix(M, data.e) != data.e:
        raise AssertionError("e is not fixed")
    if A.Q(data.w_plus) != 0 or A.Q(data.w_minus) != 0:
        raise AssertionError("eigenvectors for varpi^{+-1} must be isotropic")
    if A.pairing(data.w_plus, data.e) != 0 or A.pairing(data.w_minus, data.e) != 0:
        raise AssertionError("isotropic eigenvectors must be orthogonal to e")
    if A.pairing(data.w_plus, data.w_minus) == 0:
        raise AssertionError("<w+, w-> vanishes")
