"""Hecke operators at p^2 on q-expansions, the ordinary projector and the Shimura lift."""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .qseries import BoundError, QSeries, series_combine

__all__ = [
    "kronecker",
    "apply_U_p2",
    "apply_V_p2",
    "apply_T_p2",
    "OperatorBudget",
    "EordReport",
    "e_ord",
    "project_U_eigen",
    "shimura_lift",
    "sturm",
    "gamma0_index",
]


def kronecker(a, n):
    """Kronecker symbol (a / n) for n != 0."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a / n), n odd
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass
class OperatorBudget:
    """Bookkeeping of U_{p^2} applications and the shrinking trustworthy bound."""

    original_bound: int
    p: int
    applications: int = 0
    log: list = field(default_factory=list)

    @property
    def remaining_bound(self):
        return self.original_bound // self.p ** (2 * self.applications)

    def record(self, op, before, after):
        if op == "U":
            self.applications += 1
        self.log.append({"op": op, "bound_before": before, "bound_after": after})


def _shrink(f, p):
    q = p * p
    bound = f.bound // q
    extra = {n // q for n in f.extra if n % q == 0 and n // q > bound}
    return bound, extra


def apply_U_p2(f, p, budget=None):
    """a_n -> a_{p^2 n}."""
    bound, extra = _shrink(f, p)
    q = p * p
    coeffs = {n: f[q * n] for n in list(range(1, bound + 1)) + sorted(extra)}
    out = QSeries(coeffs, bound, f.ring, f.modulus, extra, f.a0)
    if budget is not None:
        budget.record("U", f.bound, bound)
    return out


def apply_V_p2(f, p, budget=None):
    """a_n -> (-n/p) a_n + p a_{n/p^2}."""
    q = p * p
    coeffs = {}
    keep = set()
    for n in f.indices():
        if n % q == 0 and not f.known(n // q):
            continue
        keep.add(n)
        a = kronecker(-n, p) * f[n]
        if n % q == 0:
            a = a + p * f[n // q]
        coeffs[n] = a
    extra = {n for n in f.extra if n in keep}
    out = QSeries(coeffs, f.bound, f.ring, f.modulus, extra, p * f.a0)
    if budget is not None:
        budget.record("V", f.bound, f.bound)
    return out


def apply_T_p2(f, p, budget=None):
    """a_n -> a_{p^2 n} + (-n/p) a_n + p a_{n/p^2}."""
    out = series_combine([(1, apply_U_p2(f, p)), (1, apply_V_p2(f, p))])
    if budget is not None:
        budget.record("T", f.bound, out.bound)
    return out


@dataclass
class EordReport:
    series: QSeries
    applications: int
    converged: bool
    window: list

    def to_json(self):
        return {
            "applications": self.applications,
            "converged": self.converged,
            "window": self.window,
        }


def _window_equal(f, g):
    idx = [n for n in f.indices() if g.known(n)]
    return idx, all(f[n] == g[n] for n in idx)


def _ppower(modulus, p):
    N = 0
    m = modulus
    while m % p == 0:
        m //= p
        N += 1
    if m != 1:
        raise ValueError("modulus is not a power of p")
    return N


def e_ord(f, p, max_applications):
    """Iterate U in steps of (p-1) p^(N-1) until one more step fixes the common window."""
    if f.ring != "ZpN":
        raise ValueError("e_ord works on series mod p^N")
    N = _ppower(f.modulus, p)
    step = (p - 1) * p ** (N - 1)
    used = 0
    cur = f
    while used + step <= max_applications:
        nxt = cur
        try:
            for _ in range(step):
                nxt = apply_U_p2(nxt, p)
        except BoundError:
            break
        used += step
        idx, same = _window_equal(cur, nxt)
        if not idx:
            break
        if same:
            return EordReport(cur, used, True, idx)
        cur = nxt
    return EordReport(cur, used, False, [])


def _solve_mod(M, rhs, mod, p):
    n = len(M)
    A = [list(row) + [r] for row, r in zip(M, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] % p), None)
        if piv is None:
            raise ZeroDivisionError("singular system mod p")
        A[c], A[piv] = A[piv], A[c]
        inv = pow(A[c][c], -1, mod)
        A[c] = [x * inv % mod for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [(x - f * y) % mod for x, y in zip(A[r], A[c])]
    return [A[r][n] for r in range(n)]


def project_U_eigen(f, eigenvalues, target, p):
    """Component of f on which U_{p^2} acts by ``target`` (Vandermonde on a_{D p^{2s}})."""
    if f.ring != "ZpN":
        raise ValueError("eigen-projection works on series mod p^N")
    mod = f.modulus
    ev = [e % mod for e in eigenvalues]
    if target % mod not in ev:
        raise ValueError("target is not among the eigenvalues")
    for a in range(len(ev)):
        for b in range(a + 1, len(ev)):
            if (ev[a] - ev[b]) % p == 0:
                raise ZeroDivisionError(f"eigenvalues {eigenvalues[a]} and {eigenvalues[b]} collide mod {p}")
    r = len(ev)
    t = ev.index(target % mod)
    V = [[pow(e, k, mod) for e in ev] for k in range(r)]
    q = p * p
    coeffs = {}
    keep = []
    for D in f.indices():
        if all(f.known(D * q ** k) for k in range(r)):
            keep.append(D)
            sol = _solve_mod(V, [f[D * q ** k] for k in range(r)], mod, p)
            coeffs[D] = sol[t]
    bound = 0
    while bound + 1 in keep:
        bound += 1
    extra = [D for D in keep if D > bound]
    return QSeries(coeffs, bound, f.ring, f.modulus, extra, f.a0 if target % mod == 1 else 0)


def _squarefree(n):
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return n > 0


def shimura_lift(f, D, k, level, nmax=None):
    """n-th coefficient: sum over d | n, (d, level) = 1 of (D/d) d^k a_{|D| n^2 / d^2}."""
    if not _squarefree(D):
        raise ValueError("D must be squarefree")
    if (-1) ** (k + 1) * D <= 0:
        raise ValueError("need (-1)^(k+1) D > 0")
    absD = abs(D)

    def needed(n):
        return [absD * (n // d) ** 2 for d in range(1, n + 1) if n % d == 0 and gcd(d, level) == 1]

    if nmax is None:
        nmax = 0
        while all(f.known(m) for m in needed(nmax + 1)):
            nmax += 1
    out = {}
    for n in range(1, nmax + 1):
        idx = needed(n)
        if not all(f.known(m) for m in idx):
            raise BoundError(f"coefficient {n} of the lift needs unknown input coefficients")
        total = 0
        for d in range(1, n + 1):
            if n % d or gcd(d, level) != 1:
                continue
            total = total + kronecker(D, d) * d ** k * f[absD * (n // d) ** 2]
        out[n] = total
    return QSeries(out, nmax, f.ring, f.modulus)


def gamma0_index(M):
    """[SL_2(Z) : Gamma_0(M)] = M prod_{l | M} (1 + 1/l)."""
    if M < 1:
        raise ValueError("level must be positive")
    idx = Fraction(M)
    n, l = M, 2
    while l * l <= n:
        if n % l == 0:
            idx *= Fraction(l + 1, l)
            while n % l == 0:
                n //= l
        l += 1
    if n > 1:
        idx *= Fraction(n + 1, n)
    return int(idx)


def sturm(weight, M):
    """(bound, index) with bound = weight * index / 12."""
    index = gamma0_index(M)
    bound = Fraction(weight) * index / 12
    return (int(bound) if bound.denominator == 1 else bound), index
