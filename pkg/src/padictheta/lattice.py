"""Rank-3 lattices in the trace-zero space.

Global lattices (:class:`TernaryLattice`) carry a rational basis in (i, j, k)
coordinates.  Local lattices at p (:class:`LocalLatticeAtP`) may have basis
vectors over the quadratic field, interpreted through a p-adic embedding.

Enumeration works on an integer-scaled Gram matrix.  Candidate ranges are
produced with floating point plus a safety margin; every emitted vector is
confirmed by an exact int64 evaluation of the quadratic form, so the
floating point only ever widens the search.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, isqrt, sqrt

import numpy as np

from .algebra import (
    QuadExt,
    as_fraction,
    det,
    hermite_form,
    kernel_mod,
    lcm_denominator,
    smith_p_part,
    solve_rational,
    valuation,
)
from .padic import embed

__all__ = [
    "TernaryLattice",
    "LocalLatticeAtP",
    "VectorBlock",
    "DepthProfile",
    "enumerate_norm",
    "enumerate_norms",
    "enumerate_up_to",
    "enumerate_range",
    "member",
    "intersect_local",
    "localized_cover",
    "geodesic_lattice",
    "rationalize",
    "p_neighbors",
    "depth_and_parent",
    "lattice_depth",
    "pairing_residues",
    "block_in_lattice",
]


def _frac_vec(v):
    return tuple(as_fraction(x) for x in v)


def _lin(coeffs, basis):
    """sum_i coeffs[i] * basis[i] for coordinate triples."""
    out = [0, 0, 0]
    for c, b in zip(coeffs, basis):
        if c == 0:
            continue
        for t in range(3):
            out[t] = out[t] + c * b[t]
    return tuple(out)


class TernaryLattice:
    """Z-lattice (or Z[1/p]-lattice when ``p`` is set) spanned by three vectors of V."""

    def __init__(self, algebra, basis, p=None):
        self.algebra = algebra
        self.basis = tuple(_frac_vec(b) for b in basis)
        if len(self.basis) != 3:
            raise ValueError("a ternary lattice needs 3 basis vectors")
        if det([list(b) for b in self.basis]) == 0:
            raise ValueError("lattice basis is singular")
        self.p = p

    def __repr__(self):
        ring = "Z" if self.p is None else f"Z[1/{self.p}]"
        return f"TernaryLattice({ring}, {[tuple(str(x) for x in b) for b in self.basis]})"

    @property
    def gram(self):
        A = self.algebra
        return [[A.pairing(bi, bj) for bj in self.basis] for bi in self.basis]

    def Q(self, v):
        return self.algebra.Q(v)

    def vector(self, n):
        return _lin(n, self.basis)

    def coordinates(self, v):
        return solve_rational([list(b) for b in self.basis], list(v))

    def _scalar_ok(self, c):
        d = as_fraction(c).denominator
        if self.p is not None:
            while d % self.p == 0:
                d //= self.p
        return d == 1

    def contains(self, v):
        return all(self._scalar_ok(c) for c in self.coordinates(v))

    def scaled(self, s):
        return TernaryLattice(self.algebra, [tuple(x * s for x in b) for b in self.basis], self.p)

    def over_Z(self):
        return TernaryLattice(self.algebra, self.basis, None)

    def determinant(self):
        return det(self.gram)

    def canonical_basis(self):
        """Hermite-normal-form basis; equal lattices give equal output."""
        d = lcm_denominator([x for b in self.basis for x in b])
        H, _ = hermite_form([[int(x * d) for x in b] for b in self.basis])
        return tuple(tuple(Fraction(x, d) for x in row) for row in H)

    def __eq__(self, other):
        if not isinstance(other, TernaryLattice):
            return NotImplemented
        if self.algebra != other.algebra or self.p != other.p:
            return False
        if self.p is None:
            return self.canonical_basis() == other.canonical_basis()
        return all(self.contains(b) for b in other.basis) and all(other.contains(b) for b in self.basis)

    def __hash__(self):
        return hash((self.algebra, self.p, self.canonical_basis() if self.p is None else None))

    def integer_form(self):
        """``(S, K)`` with S an integer matrix and Q(sum n_i b_i) = n^T S n / K."""
        G = self.gram
        L = lcm_denominator([x for row in G for x in row])
        S = [[int(x * L) for x in row] for row in G]
        return S, 2 * L

    def reduced(self):
        """An equal Z-lattice with a pairwise size-reduced basis, and the change of basis.

        Returns ``(lattice, U)`` where the new basis rows are ``U`` times the old ones.
        """
        S, _ = self.integer_form()
        U = [[int(i == j) for j in range(3)] for i in range(3)]

        def ip(a, b):
            return sum(a[r] * S[r][c] * b[c] for r in range(3) for c in range(3))

        changed = True
        while changed:
            changed = False
            order = sorted(range(3), key=lambda r: ip(U[r], U[r]))
            U = [U[r] for r in order]
            for a in range(3):
                for b in range(3):
                    if a == b:
                        continue
                    na = ip(U[a], U[a])
                    q = Fraction(ip(U[a], U[b]), na)
                    r = floor(q + Fraction(1, 2))
                    if not r:
                        continue
                    cand = [x - r * y for x, y in zip(U[b], U[a])]
                    if ip(cand, cand) < ip(U[b], U[b]):
                        U[b] = cand
                        changed = True
        basis = [_lin(row, self.basis) for row in U]
        return TernaryLattice(self.algebra, basis, self.p), U


def member(v, L):
    """Membership of ``v`` in a global or local lattice."""
    if isinstance(L, LocalLatticeAtP):
        return L.member(v)
    return L.contains(v)


# ---------------------------------------------------------------------------
# enumeration


@dataclass
class VectorBlock:
    """Lattice vectors as integer coordinates in the basis of ``lattice``.

    ``qnum`` holds n^T S n, so Q(v) = qnum / K.
    """

    lattice: TernaryLattice
    coords: np.ndarray
    qnum: np.ndarray
    K: int

    def __len__(self):
        return len(self.coords)

    def norms(self):
        """Integer norms; raises if some Q(v) is not an integer."""
        if len(self.qnum) and np.any(self.qnum % self.K):
            raise ValueError("lattice has vectors of non-integral norm")
        return self.qnum // self.K

    def vectors(self):
        return [self.lattice.vector([int(x) for x in n]) for n in self.coords]

    def select(self, mask):
        return VectorBlock(self.lattice, self.coords[mask], self.qnum[mask], self.K)

    @staticmethod
    def concat(lattice, K, blocks):
        blocks = [b for b in blocks if len(b)]
        if not blocks:
            return VectorBlock(lattice, np.zeros((0, 3), dtype=np.int64), np.zeros(0, dtype=np.int64), K)
        return VectorBlock(
            lattice,
            np.concatenate([b.coords for b in blocks]),
            np.concatenate([b.qnum for b in blocks]),
            K,
        )


class _Engine:
    """Enumeration over an integer Gram matrix S (positive definite)."""

    def __init__(self, S):
        self.S = [[int(x) for x in row] for row in S]
        s = [[Fraction(x) for x in row] for row in self.S]
        if s[0][0] <= 0:
            raise ValueError("Gram matrix is not positive definite")
        q1 = s[0][0]
        m12, m13 = s[0][1] / q1, s[0][2] / q1
        s22 = s[1][1] - s[0][1] ** 2 / q1
        s23 = s[1][2] - s[0][1] * s[0][2] / q1
        s33 = s[2][2] - s[0][2] ** 2 / q1
        if s22 <= 0:
            raise ValueError("Gram matrix is not positive definite")
        q2 = s22
        m23 = s23 / s22
        q3 = s33 - s23 ** 2 / s22
        if q3 <= 0:
            raise ValueError("Gram matrix is not positive definite")
        self.q = (q1, q2, q3)
        self.m = (m12, m13, m23)
        self.fq = tuple(float(x) for x in self.q)
        self.fm = tuple(float(x) for x in self.m)

    def n3_values(self, hi):
        b = isqrt(floor(Fraction(hi) / self.q[2]))
        return list(range(-b, b + 1))

    def _n2_range(self, n3, hi):
        q1, q2, q3 = self.q
        m12, m13, m23 = self.m
        R = Fraction(hi) - q3 * n3 * n3
        if R < 0:
            return None
        c = -m23 * n3
        w = sqrt(float(R / q2))
        lo = floor(float(c) - w) - 1
        top = ceil(float(c) + w) + 1
        return lo, top, R

    def _quadratic(self, n1, n2, n3):
        S = self.S
        return (
            S[0][0] * n1 * n1
            + S[1][1] * n2 * n2
            + S[2][2] * n3 * n3
            + 2 * (S[0][1] * n1 * n2 + S[0][2] * n1 * n3 + S[1][2] * n2 * n3)
        )

    def shell(self, lo, hi, n3_list):
        """All n with lo < n^T S n <= hi and n[2] in ``n3_list``."""
        if hi * max(abs(x) for row in self.S for x in row) > 2 ** 60:
            raise OverflowError("norm bound too large for int64 enumeration")
        fq1 = self.fq[0]
        fm12, fm13, _ = self.fm
        out_c, out_q = [], []
        for n3 in n3_list:
            r = self._n2_range(n3, hi)
            if r is None:
                continue
            a, b, R = r
            n2 = np.arange(a, b + 1, dtype=np.int64)
            u = n2 + float(self.m[2]) * n3
            rem = (float(R) - self.fq[1] * u * u) / fq1
            keep = rem >= -1e-9
            n2, rem = n2[keep], np.maximum(rem[keep], 0.0)
            if not len(n2):
                continue
            c1 = -(fm12 * n2 + fm13 * n3)
            w = np.sqrt(rem)
            lo1 = np.floor(c1 - w).astype(np.int64) - 1
            hi1 = np.ceil(c1 + w).astype(np.int64) + 1
            cnt = hi1 - lo1 + 1
            total = int(cnt.sum())
            start = np.repeat(np.cumsum(cnt) - cnt, cnt)
            n1 = np.repeat(lo1, cnt) + (np.arange(total, dtype=np.int64) - start)
            n2r = np.repeat(n2, cnt)
            val = self._quadratic(n1, n2r, np.int64(n3))
            sel = (val > lo) & (val <= hi)
            if np.any(sel):
                m = int(sel.sum())
                out_c.append(np.stack([n1[sel], n2r[sel], np.full(m, n3, dtype=np.int64)], axis=1))
                out_q.append(val[sel])
        return out_c, out_q

    def exact(self, T, n3_list):
        """All n with n^T S n = T and n[2] in ``n3_list``."""
        if T * max(abs(x) for row in self.S for x in row) > 2 ** 60:
            raise OverflowError("norm too large for int64 enumeration")
        S = self.S
        s11 = S[0][0]
        out_c = []
        for n3 in n3_list:
            r = self._n2_range(n3, T)
            if r is None:
                continue
            a, b, _ = r
            n2 = np.arange(a, b + 1, dtype=np.int64)
            bb = S[0][1] * n2 + S[0][2] * n3
            c0 = S[1][1] * n2 * n2 + 2 * S[1][2] * n2 * n3 + S[2][2] * n3 * n3 - T
            disc = bb * bb - s11 * c0
            ok = disc >= 0
            if not np.any(ok):
                continue
            n2, bb, disc = n2[ok], bb[ok], disc[ok]
            s = np.floor(np.sqrt(disc.astype(np.float64))).astype(np.int64)
            s = np.where((s + 1) * (s + 1) <= disc, s + 1, s)
            s = np.where(s * s > disc, s - 1, s)
            sq = s * s == disc
            n2, bb, s = n2[sq], bb[sq], s[sq]
            for sign in (1, -1):
                num = -bb + sign * s
                div = num % s11 == 0
                if sign == -1:
                    div &= s != 0
                if np.any(div):
                    m = int(div.sum())
                    out_c.append(
                        np.stack([num[div] // s11, n2[div], np.full(m, n3, dtype=np.int64)], axis=1)
                    )
        return out_c


def _prepared(L):
    if L.p is not None:
        raise ValueError("enumeration needs a Z-lattice; intersect with local data first")
    R, U = L.reduced()
    S, K = R.integer_form()
    return R, np.array(U, dtype=np.int64), S, K


def _split(values, threads):
    if threads <= 1 or len(values) < 2 * threads:
        return [values]
    return [values[i::threads] for i in range(threads)]


def _canonical(L, coords, qnum):
    """Sort by (norm, i-, j-, k-coordinate)."""
    if not len(coords):
        return coords, qnum
    d = lcm_denominator([x for b in L.basis for x in b])
    B = np.array([[int(x * d) for x in b] for b in L.basis], dtype=np.int64)
    ijk = coords @ B
    order = np.lexsort((ijk[:, 2], ijk[:, 1], ijk[:, 0], qnum))
    return coords[order], qnum[order]


def _run(L, job, threads):
    R, U, S, K = _prepared(L)
    eng = _Engine(S)
    chunks = job(eng, K)
    coords, qnum = [], []
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda f: f(), chunks))
    else:
        results = [f() for f in chunks]
    for c, q in results:
        coords.extend(c)
        qnum.extend(q)
    if coords:
        C = np.concatenate(coords) @ U
        Qn = np.concatenate(qnum)
    else:
        C = np.zeros((0, 3), dtype=np.int64)
        Qn = np.zeros(0, dtype=np.int64)
    C, Qn = _canonical(L, C, Qn)
    return VectorBlock(L, C, Qn, K)


def enumerate_range(L, lo, hi, threads=1):
    """All v in L with lo < Q(v) <= hi, canonically ordered."""
    lo, hi = as_fraction(lo), as_fraction(hi)

    def job(eng, K):
        a, b = floor(lo * K), floor(hi * K)
        n3 = eng.n3_values(b)
        return [(lambda part=part: eng.shell(a, b, part)) for part in _split(n3, threads)]

    return _run(L, job, threads)


def enumerate_up_to(L, X, block=None, threads=1):
    """Stream (D, VectorBlock) pairs for 0 < Q(v) <= X, by increasing norm blocks."""
    X = as_fraction(X)
    if X <= 0:
        return
    step = X if block is None else as_fraction(block)
    lo = Fraction(0)
    while lo < X:
        hi = min(lo + step, X)
        vb = enumerate_range(L, lo, hi, threads)
        norms = vb.qnum
        if len(norms):
            cuts = np.flatnonzero(np.diff(norms)) + 1
            starts = np.concatenate([[0], cuts])
            ends = np.concatenate([cuts, [len(norms)]])
            for s, e in zip(starts, ends):
                yield Fraction(int(norms[s]), vb.K), vb.select(slice(s, e))
        lo = hi


def enumerate_norm(L, D, threads=1):
    """All v in L with Q(v) = D, canonically ordered."""
    D = as_fraction(D)
    if D <= 0:
        raise ValueError("enumerate_norm needs D > 0")

    def job(eng, K):
        T = D * K
        if T.denominator != 1:
            return []
        T = int(T)
        n3 = eng.n3_values(T)
        return [(lambda part=part: (eng.exact(T, part), [])) for part in _split(n3, threads)]

    R, U, S, K = _prepared(L)
    eng = _Engine(S)
    parts = job(eng, K)
    coords = []
    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            for c, _ in ex.map(lambda f: f(), parts):
                coords.extend(c)
    else:
        for f in parts:
            coords.extend(f()[0])
    if coords:
        C = np.concatenate(coords) @ U
    else:
        C = np.zeros((0, 3), dtype=np.int64)
    Qn = np.full(len(C), int(D * K) if (D * K).denominator == 1 else 0, dtype=np.int64)
    C, Qn = _canonical(L, C, Qn)
    return VectorBlock(L, C, Qn, K)


def enumerate_norms(L, norms, threads=1):
    """Concatenation of :func:`enumerate_norm` over several norms."""
    _, K = L.integer_form()
    return VectorBlock.concat(L, K, [enumerate_norm(L, D, threads) for D in sorted(set(norms))])


# ---------------------------------------------------------------------------
# local lattices


def _padic_val(z, p, E):
    """Valuation of a rational or quadratic-field element; None for zero."""
    if z == 0:
        return None
    if isinstance(z, QuadExt) and not z.is_rational():
        if E is None:
            raise ValueError("an embedding is needed for quadratic-field coordinates")
        return embed(z, E).valuation
    z = z.a if isinstance(z, QuadExt) else z
    return valuation(as_fraction(z), p)


def _min_val(values, p, E):
    vals = [_padic_val(z, p, E) for z in values]
    vals = [v for v in vals if v is not None]
    return min(vals) if vals else None


class LocalLatticeAtP:
    """Z_p-lattice spanned by three vectors with rational or quadratic-field coordinates."""

    def __init__(self, algebra, basis, p, embedding=None):
        self.algebra = algebra
        self.basis = tuple(tuple(x if isinstance(x, QuadExt) else as_fraction(x) for x in b) for b in basis)
        self.p = p
        self.embedding = embedding
        if any(isinstance(x, QuadExt) and not x.is_rational() for b in self.basis for x in b) and embedding is None:
            raise ValueError("quadratic-field basis needs an embedding")
        if det([list(b) for b in self.basis]) == 0:
            raise ValueError("local lattice basis is singular")

    def __repr__(self):
        return f"LocalLatticeAtP(p={self.p}, {[tuple(str(x) for x in b) for b in self.basis]})"

    def val(self, z):
        return _padic_val(z, self.p, self.embedding)

    def coordinates(self, v):
        return solve_rational([list(b) for b in self.basis], list(v))

    def member(self, v):
        return all(self.val(c) is None or self.val(c) >= 0 for c in self.coordinates(v))

    def contains(self, other):
        return all(self.member(b) for b in other.basis)

    def same(self, other):
        return self.contains(other) and other.contains(self)

    def is_rational(self):
        return all(not isinstance(x, QuadExt) or x.is_rational() for b in self.basis for x in b)

    def gram(self):
        A = self.algebra
        return [[A.pairing(a, b) for b in self.basis] for a in self.basis]

    def is_unimodular(self):
        d = det(self.gram())
        return self.val(d) == 0

    def relative_valuations(self, other):
        """Smith valuations of ``other`` inside ``self`` (negative entries: other sticks out)."""
        M = [self.coordinates(b) for b in other.basis]
        return smith_p_part(M, self.p, val=self.val)


def geodesic_lattice(eig, j):
    """L_j = p^j Z_p w+ + Z_p e + p^-j Z_p w- for oriented eigen-data."""
    if eig.embedding is None:
        raise ValueError("eigen-data must be oriented by an embedding first")
    p = eig.embedding.p
    s = Fraction(p) ** j
    c = eig.c
    e = tuple(QuadExt(x, 0, c) for x in eig.e)
    return LocalLatticeAtP(
        eig.algebra,
        (tuple(x * s for x in eig.w_plus), e, tuple(x / s for x in eig.w_minus)),
        p,
        eig.embedding,
    )


def _shift_exponent(G, L):
    """Least m >= 0 with L inside p^-m times the Z_p-span of G's basis."""
    worst = 0
    for b in L.basis:
        for z in solve_rational([list(g) for g in G.basis], list(b)):
            v = L.val(z)
            if v is not None:
                worst = min(worst, v)
    return -worst


def intersect_local(G, L):
    """The Z-lattice of v in G (localised away from p when G is a Z[1/p]-lattice) with v in L.

    When ``G`` is a plain Z-lattice the result is ``G`` cut down at p by ``L``.
    """
    p = L.p
    if G.p is not None and G.p != p:
        raise ValueError("global lattice is localised at a different prime")
    m = _shift_exponent(G, L) if G.p is not None else 0
    scale = Fraction(p) ** m
    H = [tuple(x / scale for x in g) for g in G.basis]
    # coordinates of each h_i in L's basis
    C = [L.coordinates(h) for h in H]
    vals = [L.val(z) for row in C for z in row]
    low = min([v for v in vals if v is not None] + [0])
    e = -low
    if e == 0:
        return TernaryLattice(G.algebra, H)
    mod = p ** e
    shift = Fraction(p) ** e
    cond = []
    for col in range(3):
        row = []
        for i in range(3):
            z = C[i][col] * shift
            if z == 0:
                row.append(0)
            elif isinstance(z, QuadExt) and not z.is_rational():
                row.append(embed(z, L.embedding, e + 2).residue(e))
            else:
                zf = z.a if isinstance(z, QuadExt) else as_fraction(z)
                row.append(zf.numerator * pow(zf.denominator, -1, mod) % mod)
        cond.append(row)
    K = kernel_mod(cond, [mod] * 3)
    basis = [_lin(row, H) for row in K]
    return TernaryLattice(G.algebra, basis)


def localized_cover(G, local_list):
    """p^-m times the Z-span of G's basis, m least so that every local lattice fits inside."""
    m = max([_shift_exponent(G, L) for L in local_list] + [0])
    p = local_list[0].p if local_list else G.p
    if m and p is None:
        raise ValueError("cannot localise without a prime")
    s = Fraction(p) ** m if m else Fraction(1)
    return TernaryLattice(G.algebra, [tuple(x / s for x in g) for g in G.basis]), m


def rationalize(L):
    """The same Z_p-lattice, with a rational basis."""
    A = L.algebra
    std = TernaryLattice(A, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], p=L.p)
    return LocalLatticeAtP(A, intersect_local(std, L).basis, L.p, L.embedding)


# ---------------------------------------------------------------------------
# p-neighbours


def _res(x, mod):
    x = as_fraction(x.a if isinstance(x, QuadExt) else x)
    return x.numerator * pow(x.denominator, -1, mod) % mod


def _projective_points(p):
    for a in range(p):
        for b in range(p):
            yield (1, a, b)
    for a in range(p):
        yield (0, 1, a)
    yield (0, 0, 1)


def p_neighbors(L):
    """The p + 1 neighbours of a unimodular Z_p-lattice with rational basis."""
    p = L.p
    if not L.is_rational():
        L = rationalize(L)
    if not L.is_unimodular():
        raise ValueError("p-neighbours need a unimodular lattice")
    G = L.gram()
    mod2 = p * p
    Gm = [[_res(x, mod2) for x in row] for row in G]

    def Qmod(x):
        # Q(x) = x^T G x / 2
        s = sum(x[r] * Gm[r][c] * x[c] for r in range(3) for c in range(3))
        return s * pow(2, -1, mod2) % mod2

    out = []
    for x in _projective_points(p):
        if Qmod(x) % p:
            continue
        Gx = [sum(Gm[r][c] * x[c] for c in range(3)) % mod2 for r in range(3)]
        t = next(r for r in range(3) if Gx[r] % p)
        # adjust x by p*y*e_t so that Q(x) = 0 mod p^2
        y = (-(Qmod(x) // p) * pow(Gx[t], -1, p)) % p
        x2 = list(x)
        x2[t] += p * y
        assert Qmod(x2) == 0
        Gx2 = [sum(Gm[r][c] * x2[c] for c in range(3)) % p for r in range(3)]
        K = kernel_mod([Gx2], [p])
        gens = [[p * v for v in row] for row in K] + [x2]
        H, _ = hermite_form(gens)
        rows = [row for row in H if any(row)]
        basis = [_lin([Fraction(c, p) for c in row], L.basis) for row in rows]
        out.append(LocalLatticeAtP(L.algebra, basis, p, L.embedding))
    if len(out) != p + 1:
        raise AssertionError(f"found {len(out)} isotropic lines, expected {p + 1}")
    return out


# ---------------------------------------------------------------------------
# depth


@dataclass(frozen=True)
class DepthProfile:
    """Depth of a vector w.r.t. gamma, and the geodesic indices realising it.

    ``parents`` lists every j with p^depth * v in L_j (None when unbounded);
    ``parent_mod`` reduces them modulo 2t.
    """

    depth: int
    parents: tuple
    parent_mod: tuple


def _pair_val(eig, v, w):
    z = eig.algebra.pairing(v, w)
    return _padic_val(z, eig.embedding.p, eig.embedding)


def depth_and_parent(v, eig):
    v = _frac_vec(v)
    if all(x == 0 for x in v):
        raise ValueError("depth of the zero vector")
    ap = _pair_val(eig, v, eig.w_plus)
    am = _pair_val(eig, v, eig.w_minus)
    ae = _pair_val(eig, v, tuple(QuadExt(x, 0, eig.c) for x in eig.e))
    ae_term = -ae if ae is not None else 0
    if ap is None or am is None:
        # v lies on the fixed line
        n = max(0, ae_term)
        return DepthProfile(n, None, None)
    n = max(0, ae_term, -((ap + am) // 2))
    parents = tuple(range(-ap - n, am + n + 1))
    two_t = 2 * eig.t
    return DepthProfile(n, parents, tuple(sorted({j % two_t for j in parents})))


def lattice_depth(L, eig):
    """Tree distance n from L to the geodesic of gamma.

    The eigen-sublattice L[w+] + L[e] + L[w-] is p^n times the nearest
    geodesic lattice, so its index in L is p^(3n).
    """
    c = eig.c
    e = tuple(QuadExt(x, 0, c) for x in eig.e)
    sub = []
    for w in (eig.w_plus, e, eig.w_minus):
        m = _min_val(L.coordinates(w), L.p, L.embedding)
        s = Fraction(L.p) ** m
        sub.append(tuple(x / s for x in w))
    M = [L.coordinates(b) for b in sub]
    idx = sum(smith_p_part(M, L.p, val=L.val))
    if idx % 3:
        raise AssertionError(f"eigen-sublattice index exponent {idx} is not a multiple of 3")
    return idx // 3


# ---------------------------------------------------------------------------
# pairings on enumerated blocks


def pairing_residues(block, w, E, M):
    """Valuation shift and residues of <v, w> for every vector of a block.

    Returns ``(s, R)`` with p^-s <v, w> congruent to R mod p^M, where
    ``s`` is the least valuation of <b_i, w> over the lattice basis.  So
    ord_p <v, w> = s + ord_p(R) whenever R is nonzero mod p^M.
    """
    p = E.p
    A = block.lattice.algebra
    pairs = [A.pairing(b, w) for b in block.lattice.basis]
    vals = [_padic_val(z, p, E) for z in pairs]
    s = min(v for v in vals if v is not None)
    mod = p ** M
    r = []
    for z in pairs:
        if z == 0:
            r.append(0)
            continue
        zz = z * Fraction(1, p ** s) if s >= 0 else z * (p ** (-s))
        if isinstance(zz, QuadExt) and not zz.is_rational():
            r.append(embed(zz, E, M + 1).residue(M))
        else:
            r.append(_res(zz, mod))
    n = block.coords % mod
    if mod < 1_700_000_000:
        R = (n @ np.array(r, dtype=np.int64)) % mod
    else:
        R = (n.astype(object) @ np.array(r, dtype=object)) % mod
    return s, R


def block_in_lattice(block, M):
    """Boolean mask: which vectors of ``block`` lie in the Z-lattice ``M``."""
    if M.p is not None:
        raise ValueError("block_in_lattice needs a Z-lattice")
    T = [M.coordinates(b) for b in block.lattice.basis]
    d = lcm_denominator([x for row in T for x in row])
    Ti = np.array([[int(x * d) for x in row] for row in T], dtype=object if d > 2 ** 20 else np.int64)
    if Ti.dtype == object:
        img = block.coords.astype(object) @ Ti
    else:
        img = block.coords @ Ti
    return np.all(img % d == 0, axis=1)
