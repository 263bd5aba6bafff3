"""Determinant machinery for the tridiagonal matrix family H_p(alpha).

H_p(alpha) is the p-by-p matrix with unit diagonal and alpha on the first
sub- and super-diagonal.  Its determinant u_p(alpha) obeys the second-order
recursion

    u_{p+2} = u_{p+1} - alpha^2 * u_p,     u_0 = u_1 = 1,

so u_p is a polynomial with integer coefficients in beta = alpha^2.  That
makes exact zero tests and exact root isolation possible, which matters
because the multiplexing-gain case split is discontinuous in alpha.

Also provided: the normalized sequence v_p = u_p / (-alpha)^p with its own
recursion and row identity, and the upper-banded matrices M_p(alpha)
(alpha / 1 / alpha on the diagonal and first two super-diagonals) whose
inverse rows supply noise-combination coefficients for the converse
constructions.

Roots of u_p are isolated with Sturm sequences over exact rationals on the
beta-polynomial.  The classical eigenvalue factorization
det H_p(alpha) = prod_k (1 + 2 alpha cos(k pi/(p+1))) is deliberately NOT
used here; it serves as an independent oracle in the test suite.  The exact
squarefree test run during root isolation has confirmed simple roots for
every order exercised so far (the code still computes multiplicities rather
than assuming 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

Rational = Union[int, Fraction]
AlphaLike = Union[int, float, Fraction, "RootAlpha"]

__all__ = [
    "det_h",
    "h_matrix",
    "u_beta_coeffs",
    "u_is_zero",
    "alpha_float",
    "rank_h",
    "neighbor_nonzero_check",
    "critical_roots",
    "RootAlpha",
    "RootSet",
    "VSequence",
    "v_sequence",
    "v_row_identity_check",
    "BandedM",
    "build_m_and_inverse",
]


# ---------------------------------------------------------------------------
# determinants
# ---------------------------------------------------------------------------

def det_h(p: int, alpha: AlphaLike):
    """Determinant u_p(alpha) of H_p(alpha) via the second-order recursion.

    u_0 = u_1 = 1 by convention.  Exact when alpha is an int, a Fraction, or
    a RootAlpha (for which u_p at a known critical value is exactly 0);
    float arithmetic otherwise.
    """
    if p < 0:
        raise ValueError("order p must be nonnegative")
    if isinstance(alpha, RootAlpha):
        if p >= 2 and alpha.is_root_of(p):
            return 0.0
        return _u_recursion(p, float(alpha))
    if isinstance(alpha, (int, Fraction)) and not isinstance(alpha, bool):
        return _u_recursion(p, Fraction(alpha))
    return _u_recursion(p, float(alpha))


def _u_recursion(p, alpha):
    beta = alpha * alpha
    one = beta * 0 + 1  # coerce to the input's arithmetic type
    prev, cur = one, one  # u_0, u_1
    for _ in range(p - 1):
        prev, cur = cur, cur - beta * prev
    return one if p == 0 else cur


def h_matrix(p: int, alpha: AlphaLike) -> np.ndarray:
    """Dense H_p(alpha) as float64 (unit diagonal, alpha off-diagonals)."""
    if p < 0:
        raise ValueError("order p must be nonnegative")
    a = alpha_float(alpha)
    h = np.eye(p)
    idx = np.arange(p - 1)
    h[idx, idx + 1] = a
    h[idx + 1, idx] = a
    return h


def alpha_float(alpha: AlphaLike) -> float:
    """Plain float value of any accepted cross-gain representation."""
    if isinstance(alpha, RootAlpha):
        return alpha.value
    return float(alpha)


@lru_cache(maxsize=None)
def u_beta_coeffs(p: int) -> tuple:
    """Integer coefficients (ascending) of u_p as a polynomial in beta = alpha^2."""
    if p < 0:
        raise ValueError("order p must be nonnegative")
    if p == 0:
        return (1,)
    prev, cur = (1,), (1,)  # u_0, u_1
    for _ in range(p - 1):
        shifted = (0,) + prev
        n = max(len(cur), len(shifted))
        nxt = tuple(
            (cur[i] if i < len(cur) else 0) - (shifted[i] if i < len(shifted) else 0)
            for i in range(n)
        )
        prev, cur = cur, nxt
    return cur


def u_is_zero(p: int, alpha: AlphaLike, tol: float = 1e-9) -> bool:
    """Whether u_p(alpha) = 0; exact for RootAlpha/rational alpha, else |u_p| <= tol."""
    if p <= 1:
        return False
    if isinstance(alpha, RootAlpha):
        return alpha.is_root_of(p)
    if isinstance(alpha, (int, Fraction)) and not isinstance(alpha, bool):
        return _u_recursion(p, Fraction(alpha)) == 0
    return abs(_u_recursion(p, float(alpha))) <= tol


def rank_h(p: int, alpha: AlphaLike, tol: float = 1e-9) -> int:
    """rank H_p(alpha): p when u_p(alpha) != 0, else p-1 (the only two cases)."""
    if p < 1:
        raise ValueError("order p must be positive")
    return p - 1 if u_is_zero(p, alpha, tol) else p


def neighbor_nonzero_check(p: int, alpha: AlphaLike, tol: float = 1e-9) -> dict:
    """Given u_p(alpha) = 0, return the neighboring determinants.

    Returns {order: value} for orders p-2 (when p > 2), p-1, p+1, p+2, all of
    which are necessarily nonzero at a root of u_p.  Calling this when
    u_p(alpha) != 0 is a misuse and raises ValueError.
    """
    if not u_is_zero(p, alpha, tol):
        raise ValueError(f"u_{p}(alpha) != 0; neighbor check applies at roots only")
    orders = ([p - 2] if p > 2 else []) + [p - 1, p + 1, p + 2]
    return {q: det_h(q, alpha) for q in orders}


# ---------------------------------------------------------------------------
# exact polynomial helpers (Fraction coefficients, ascending order)
# ---------------------------------------------------------------------------

def _trim(c):
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _peval(c, x):
    acc = Fraction(0)
    for coef in reversed(c):
        acc = acc * x + coef
    return acc


def _pderiv(c):
    return _trim(tuple(c[i] * i for i in range(1, len(c))))


def _pdivmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv = Fraction(1) / b[-1]
    for i in range(len(a) - len(b), -1, -1):
        f = a[i + len(b) - 1] * inv
        q[i] = f
        for j, bc in enumerate(b):
            a[i + j] -= f * bc
    return _trim(q), _trim(a)


def _pgcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = tuple(coef / lead for coef in a)
    return a


def _sturm_chain(c):
    chain = [_trim(c), _pderiv(c)]
    while chain[-1]:
        _, r = _pdivmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append(tuple(-x for x in r))
    return [q for q in chain if q]


def _sign_variations(chain, x):
    signs = []
    for c in chain:
        v = _peval(c, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_roots(chain, lo, hi):
    """Number of distinct real roots in (lo, hi]."""
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def _isolate_positive_roots(coeffs):
    """Isolating intervals (lo, hi] for every distinct positive root, ascending."""
    chain = _sturm_chain(coeffs)
    bound = Fraction(1) + max(abs(Fraction(c)) for c in coeffs[:-1]) / abs(Fraction(coeffs[-1]))
    stack = [(Fraction(0), bound)]
    found = []
    while stack:
        lo, hi = stack.pop()
        n = _count_roots(chain, lo, hi)
        if n == 0:
            continue
        if n == 1:
            found.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        while _peval(coeffs, mid) == 0:
            # never split on a root; nudge the split point
            mid = lo + (hi - lo) * Fraction(3, 7)
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted(found)


def _refine(coeffs, lo, hi, width):
    """Shrink an isolating interval of `coeffs` to the requested width."""
    flo = _peval(coeffs, lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        fmid = _peval(coeffs, mid)
        if fmid == 0:
            eps = (hi - lo) / 1024
            return mid - eps, mid + eps
        if (flo > 0) != (fmid > 0):
            hi = mid
        else:
            lo, flo = mid, fmid
    return lo, hi


@lru_cache(maxsize=None)
def _beta_poly(p: int):
    return _trim(tuple(Fraction(c) for c in u_beta_coeffs(p)))


@lru_cache(maxsize=None)
def _beta_roots(p: int):
    """Isolated beta-roots of u_p with multiplicities: ((lo, hi, mult), ...)."""
    coeffs = _beta_poly(p)
    intervals = _isolate_positive_roots(coeffs)
    out = []
    for lo, hi in intervals:
        lo, hi = _refine(coeffs, lo, hi, Fraction(1, 10**40))
        mult = 1
        g = _pgcd(coeffs, _pderiv(coeffs))
        while len(g) > 1 and _count_roots(_sturm_chain(g), lo, hi) >= 1:
            mult += 1
            g = _pgcd(g, _pderiv(g))
        out.append((lo, hi, mult))
    return tuple(out)


@lru_cache(maxsize=None)
def _shares_root(p: int, k: int, q: int) -> bool:
    """Exact test: is the k-th positive beta-root of u_p also a root of u_q?"""
    if q <= 1:
        return False
    g = _pgcd(_beta_poly(p), _beta_poly(q))
    if len(g) <= 1:
        return False
    lo, hi, _ = _beta_roots(p)[k - 1]
    return _count_roots(_sturm_chain(g), lo, hi) >= 1


@dataclass(frozen=True)
class RootAlpha:
    """Exact algebraic cross-gain: the k-th positive root of u_p (times sign).

    Carries an isolating rational interval for beta = alpha^2, so zero tests
    of any u_q at this value are exact (via polynomial gcds and Sturm counts)
    even though the value itself is irrational.
    """

    p: int
    k: int
    sign: int = 1

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("u_p has roots only for p >= 2")
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        roots = _beta_roots(self.p)
        if not 1 <= self.k <= len(roots):
            raise ValueError(f"u_{self.p} has {len(roots)} positive roots; got k={self.k}")

    @property
    def _interval(self):
        lo, hi, _ = _beta_roots(self.p)[self.k - 1]
        return lo, hi

    @property
    def multiplicity(self) -> int:
        return _beta_roots(self.p)[self.k - 1][2]

    @property
    def value(self) -> float:
        lo, hi = self._interval
        return self.sign * math.sqrt(float((lo + hi) / 2))

    def __float__(self) -> float:
        return self.value

    def is_root_of(self, q: int) -> bool:
        """Exactly decide u_q(self) = 0."""
        if q == self.p:
            return True
        return _shares_root(self.p, self.k, q)

    def token(self) -> str:
        return f"root:{self.p}:{self.k}" if self.sign > 0 else f"-root:{self.p}:{self.k}"

    def __repr__(self):
        return f"RootAlpha({self.token()}={self.value:.12g})"


@dataclass(frozen=True)
class RootSet:
    """All real roots of u_p, with multiplicities, sorted ascending."""

    p: int
    roots: tuple  # of (alpha: float, multiplicity: int)
    root_alphas: tuple = field(default=(), compare=False)

    def alphas(self):
        return [a for a, _ in self.roots]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "roots": [{"alpha": a, "multiplicity": m} for a, m in self.roots],
        }


def critical_roots(p: int) -> RootSet:
    """Every real alpha with u_p(alpha) = 0, found by exact isolation.

    Roots come in +/- pairs since u_p depends on alpha only through alpha^2,
    and alpha = 0 is never a root (u_p(0) = 1).  Requires p >= 2.
    """
    if p < 2:
        raise ValueError("u_p has no real roots for p < 2")
    entries = []
    positives = []
    for k, (lo, hi, mult) in enumerate(_beta_roots(p), start=1):
        ra = RootAlpha(p, k)
        positives.append((ra, mult))
    for ra, mult in positives:
        entries.append((-ra.value, mult, RootAlpha(ra.p, ra.k, -1)))
    for ra, mult in positives:
        entries.append((ra.value, mult, ra))
    entries.sort(key=lambda t: t[0])
    return RootSet(
        p=p,
        roots=tuple((a, m) for a, m, _ in entries),
        root_alphas=tuple(ra for _, _, ra in entries),
    )


# ---------------------------------------------------------------------------
# normalized sequence v_p
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VSequence:
    """v_p(alpha) = u_p(alpha) / (-alpha)^p for p = -1 .. pmax.

    Satisfies v_{p+2} = -(1/alpha) v_{p+1} - v_p with v_{-1} = 0, v_0 = 1.
    """

    alpha: float
    pmax: int
    values: tuple  # index i holds v_{i-1}

    def __getitem__(self, p: int) -> float:
        if not -1 <= p <= self.pmax:
            raise IndexError(f"v_{p} outside computed range [-1, {self.pmax}]")
        return self.values[p + 1]

    def definitional_residual(self) -> float:
        """max_p |v_p * (-alpha)^p - u_p| over the computed range."""
        worst = 0.0
        for p in range(0, self.pmax + 1):
            worst = max(worst, abs(self[p] * (-self.alpha) ** p - _u_recursion(p, self.alpha)))
        return worst


def v_sequence(pmax: int, alpha: AlphaLike) -> VSequence:
    a = alpha_float(alpha)
    if a == 0:
        raise ValueError("v_p requires a nonzero cross-gain")
    if pmax < 0:
        raise ValueError("pmax must be >= 0")
    vals = [0.0, 1.0]
    for _ in range(pmax):
        vals.append(-vals[-1] / a - vals[-2])
    return VSequence(alpha=a, pmax=pmax, values=tuple(vals))


def v_row_identity_check(p: int, l: int, alpha: AlphaLike) -> float:
    """Residual of (v_l .. v_{l+p-1}) H_p(alpha) = (-a v_{l-1}, 0, .., 0, -a v_{l+p}).

    Evaluated in exact rational arithmetic (every float gain is a rational),
    since the normalized sequence grows like |1/alpha|^p and a floating
    residual would be meaningless for small gains.  Restricted to p >= 2:
    at p = 1 the two boundary entries of the right-hand side collapse into
    one slot and the display is ambiguous.
    """
    if p < 2:
        raise ValueError("row identity is stated for p >= 2")
    if l < 0:
        raise ValueError("l must be >= 0")
    a = Fraction(alpha_float(alpha))
    if a == 0:
        raise ValueError("requires a nonzero cross-gain")
    vs = [Fraction(0), Fraction(1)]  # v_{-1}, v_0
    for _ in range(l + p + 1):
        vs.append(-vs[-1] / a - vs[-2])
    v = lambda i: vs[i + 1]
    row = [v(l + i) for i in range(p)]
    worst = Fraction(0)
    for j in range(p):
        acc = row[j]  # unit diagonal
        if j >= 1:
            acc += a * row[j - 1]
        if j + 1 < p:
            acc += a * row[j + 1]
        want = -a * v(l - 1) if j == 0 else (-a * v(l + p) if j == p - 1 else Fraction(0))
        worst = max(worst, abs(acc - want))
    return float(worst)


# ---------------------------------------------------------------------------
# upper-banded M_p(alpha) and its inverse
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BandedM:
    """M_p(alpha): alpha on the diagonal, 1 and alpha on the first and second
    super-diagonals.  det M_p = alpha^p, so the inverse exists iff alpha != 0."""

    p: int
    alpha: float
    matrix: np.ndarray
    inverse: np.ndarray

    def det(self) -> float:
        return self.alpha ** self.p


def m_matrix(p: int, alpha: AlphaLike) -> np.ndarray:
    a = alpha_float(alpha)
    m = np.zeros((p, p))
    idx = np.arange(p)
    m[idx, idx] = a
    if p >= 2:
        m[idx[:-1], idx[:-1] + 1] = 1.0
    if p >= 3:
        m[idx[:-2], idx[:-2] + 2] = a
    return m


def build_m_and_inverse(p: int, alpha: AlphaLike) -> BandedM:
    """M_p(alpha) together with its explicit inverse (back substitution).

    Orders p >= 1 are accepted; p = 1 degenerates to the scalar [alpha].
    """
    a = alpha_float(alpha)
    if a == 0:
        raise ValueError("inverse requires a nonzero cross-gain")
    if p < 1:
        raise ValueError("order p must be positive")
    m = m_matrix(p, a)
    inv = np.zeros((p, p))
    for col in range(p):
        # back substitution on the upper-triangular band
        z = np.zeros(p)
        for i in range(p, 0, -1):
            r = i - 1
            acc = 1.0 if r == col else 0.0
            if r + 1 < p:
                acc -= 1.0 * z[r + 1]
            if r + 2 < p:
                acc -= a * z[r + 2]
            z[r] = acc / a
        inv[:, col] = z
    return BandedM(p=p, alpha=a, matrix=m, inverse=inv)
