"""Network instances and channel matrices for the two Wyner-type topologies.

Asymmetric: receiver k hears its own transmitter plus the one to its left,
so the K-by-K channel matrix is lower bidiagonal with unit diagonal.
Symmetric: both neighbors interfere and the matrix is tridiagonal.

Transmitter k is cognizant of messages k-t_left .. k+t_right; receiver k
observes antennas k-r_left .. k+r_right (clipped to 1..K everywhere).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .tridiag import AlphaLike, RootAlpha, alpha_float

ASYMMETRIC = "asymmetric"
SYMMETRIC = "symmetric"
TOPOLOGIES = (ASYMMETRIC, SYMMETRIC)

__all__ = [
    "ASYMMETRIC",
    "SYMMETRIC",
    "NetworkParams",
    "CrossGainAssignment",
    "ChannelModel",
    "build_channel",
    "submatrix",
    "sample_generic_gains",
    "instance_to_json",
    "instance_from_json",
]


@dataclass(frozen=True)
class NetworkParams:
    """Problem instance descriptor: K pairs, side-information reach, power."""

    K: int
    t_left: int = 0
    t_right: int = 0
    r_left: int = 0
    r_right: int = 0
    power: float = 1.0

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        for name in ("t_left", "t_right", "r_left", "r_right"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.power <= 0:
            raise ValueError("power must be positive")

    @property
    def side_sum(self) -> int:
        return self.t_left + self.t_right + self.r_left + self.r_right

    def tx_window(self, k: int) -> range:
        """Message indices transmitter k may use, clipped to 1..K."""
        return range(max(1, k - self.t_left), min(self.K, k + self.t_right) + 1)

    def rx_window(self, k: int) -> range:
        """Antenna indices receiver k observes, clipped to 1..K."""
        return range(max(1, k - self.r_left), min(self.K, k + self.r_right) + 1)

    def mirrored(self) -> "NetworkParams":
        """Left/right exchanged parameters (relabeling k -> K+1-k)."""
        return NetworkParams(self.K, self.t_right, self.t_left,
                             self.r_right, self.r_left, self.power)


@dataclass(frozen=True)
class CrossGainAssignment:
    """How the nonzero cross-gains are chosen.

    kind "equal": one alpha everywhere (alpha may be an exact RootAlpha).
    kind "explicit": per-link gains; `sub` feeds Y_{k+1} from X_k and `sup`
    feeds Y_k from X_{k+1} (sup unused for the asymmetric topology).
    kind "random": reproducible draws from the continuous distribution
    uniform on [-2,-0.1] U [0.1,2] (nonzero with margin).
    """

    kind: str
    alpha: Optional[AlphaLike] = None
    sub: Optional[tuple] = None
    sup: Optional[tuple] = None
    seed: Optional[int] = None

    @staticmethod
    def equal(alpha: AlphaLike) -> "CrossGainAssignment":
        if alpha_float(alpha) == 0:
            raise ValueError("nonzero cross-gain required")
        return CrossGainAssignment(kind="equal", alpha=alpha)

    @staticmethod
    def explicit(sub: Sequence[float], sup: Optional[Sequence[float]] = None) -> "CrossGainAssignment":
        sub = tuple(float(g) for g in sub)
        if any(g == 0 for g in sub):
            raise ValueError("nonzero cross-gain required")
        if sup is not None:
            sup = tuple(float(g) for g in sup)
            if any(g == 0 for g in sup):
                raise ValueError("nonzero cross-gain required")
        return CrossGainAssignment(kind="explicit", sub=sub, sup=sup)

    @staticmethod
    def random(seed: int) -> "CrossGainAssignment":
        return CrossGainAssignment(kind="random", seed=int(seed))

    def to_json(self) -> dict:
        if self.kind == "equal":
            a = self.alpha
            if isinstance(a, RootAlpha):
                return {"kind": "equal", "alpha": a.token()}
            return {"kind": "equal", "alpha": float(a)}
        if self.kind == "explicit":
            out = {"kind": "explicit", "sub": list(self.sub)}
            if self.sup is not None:
                out["sup"] = list(self.sup)
            return out
        return {"kind": "random", "seed": self.seed}


def _draw_nonzero(rng: np.random.Generator, n: int) -> np.ndarray:
    mags = rng.uniform(0.1, 2.0, size=n)
    signs = rng.choice((-1.0, 1.0), size=n)
    return mags * signs


def sample_generic_gains(K: int, topology: str, seed: int) -> CrossGainAssignment:
    """Reproducible continuous-draw gains; support [-2,-0.1] U [0.1,2]."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}")
    rng = np.random.default_rng(seed)
    sub = tuple(_draw_nonzero(rng, K - 1))
    sup = tuple(_draw_nonzero(rng, K - 1)) if topology == SYMMETRIC else None
    return CrossGainAssignment(kind="explicit", sub=sub, sup=sup, seed=int(seed))


@dataclass(frozen=True)
class ChannelModel:
    """Immutable network instance: parameters, topology, gains, K x K matrix."""

    params: NetworkParams
    topology: str
    gains: CrossGainAssignment
    matrix: np.ndarray = field(compare=False)

    @property
    def K(self) -> int:
        return self.params.K

    @property
    def equal_alpha(self) -> Optional[AlphaLike]:
        return self.gains.alpha if self.gains.kind == "equal" else None

    def submatrix(self, rx_indices: Iterable[int], tx_indices: Iterable[int]) -> np.ndarray:
        return submatrix(self, rx_indices, tx_indices)


def _resolve_gains(K: int, topology: str, gains: CrossGainAssignment):
    """Per-link (sub, sup) gain arrays of length K-1 each."""
    if gains.kind == "equal":
        a = alpha_float(gains.alpha)
        if a == 0:
            raise ValueError("nonzero cross-gain required")
        sub = np.full(K - 1, a)
        sup = np.full(K - 1, a)
        return sub, sup
    if gains.kind == "random":
        resolved = sample_generic_gains(K, topology, gains.seed)
        return _resolve_gains(K, topology, resolved)
    if gains.kind == "explicit":
        sub = np.asarray(gains.sub, dtype=float)
        if sub.shape != (K - 1,):
            raise ValueError(f"expected {K - 1} sub-diagonal gains, got {sub.shape[0]}")
        if np.any(sub == 0):
            raise ValueError("nonzero cross-gain required")
        if topology == SYMMETRIC:
            if gains.sup is None:
                raise ValueError("symmetric topology needs super-diagonal gains")
            sup = np.asarray(gains.sup, dtype=float)
            if sup.shape != (K - 1,):
                raise ValueError(f"expected {K - 1} super-diagonal gains, got {sup.shape[0]}")
            if np.any(sup == 0):
                raise ValueError("nonzero cross-gain required")
        else:
            sup = np.zeros(K - 1)
        return sub, sup
    raise ValueError(f"unknown gain kind {gains.kind!r}")


def build_channel(params: NetworkParams, topology: str, gains: CrossGainAssignment) -> ChannelModel:
    """Assemble the K x K channel matrix for the requested topology.

    Row j, column i is 1 on the diagonal, the left-neighbor gain when
    j - i = 1, and (symmetric only) the right-neighbor gain when j - i = -1.
    Boundary inputs X_0 and X_{K+1} do not exist, so there is no wraparound.
    """
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}")
    K = params.K
    sub, sup = _resolve_gains(K, topology, gains)
    h = np.eye(K)
    idx = np.arange(K - 1)
    h[idx + 1, idx] = sub
    if topology == SYMMETRIC:
        h[idx, idx + 1] = sup
    h.setflags(write=False)
    return ChannelModel(params=params, topology=topology, gains=gains, matrix=h)


def submatrix(model: ChannelModel, rx_indices: Iterable[int], tx_indices: Iterable[int]) -> np.ndarray:
    """Entries H[j][i] for the given 1-based antenna/transmitter index lists."""
    rx = list(rx_indices)
    tx = list(tx_indices)
    K = model.K
    for j in rx + tx:
        if not 1 <= j <= K:
            raise ValueError(f"index {j} outside 1..{K}")
    if not rx or not tx:
        return np.zeros((len(rx), len(tx)))
    r = np.asarray(rx, dtype=int) - 1
    t = np.asarray(tx, dtype=int) - 1
    return model.matrix[np.ix_(r, t)]


# ---------------------------------------------------------------------------
# JSON instance format
# ---------------------------------------------------------------------------

def parse_alpha_token(text) -> AlphaLike:
    """Decimal literal or 'root:p:k' (k-th positive root of u_p, '-' prefix ok)."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip()
    sign = 1
    if s.startswith("-root:"):
        sign, s = -1, s[1:]
    if s.startswith("root:"):
        try:
            _, p, k = s.split(":")
            return RootAlpha(int(p), int(k), sign)
        except ValueError as exc:
            raise ValueError(f"bad root token {text!r}: {exc}") from None
    return float(s)


def instance_to_json(model: ChannelModel) -> dict:
    p = model.params
    return {
        "K": p.K,
        "t_left": p.t_left,
        "t_right": p.t_right,
        "r_left": p.r_left,
        "r_right": p.r_right,
        "power": p.power,
        "topology": model.topology,
        "gains": model.gains.to_json(),
    }


def instance_from_json(obj) -> ChannelModel:
    if isinstance(obj, str):
        obj = json.loads(obj)
    params = NetworkParams(
        K=int(obj["K"]),
        t_left=int(obj.get("t_left", 0)),
        t_right=int(obj.get("t_right", 0)),
        r_left=int(obj.get("r_left", 0)),
        r_right=int(obj.get("r_right", 0)),
        power=float(obj.get("power", 1.0)),
    )
    g = obj["gains"]
    kind = g["kind"]
    if kind == "equal":
        gains = CrossGainAssignment.equal(parse_alpha_token(g["alpha"]))
    elif kind == "explicit":
        gains = CrossGainAssignment.explicit(g["sub"], g.get("sup"))
    elif kind == "random":
        gains = CrossGainAssignment.random(g["seed"])
    else:
        raise ValueError(f"unknown gain kind {kind!r}")
    return build_channel(params, obj["topology"], gains)
