"""Constructive transmission plans and their linear-algebraic certification.

A plan silences transmitters (or transmitter/receiver pairs), which splits
the chain into non-interfering subnets, and assigns every surviving message
a concrete strategy: a successive-cancellation or known-interference
(dirty-paper style) scalar step, or membership in a joint MIMO block.

Certification never simulates codebooks.  It checks exactly the linear
facts the degrees-of-freedom claims rest on:

* subnets do not couple through the channel matrix;
* every encoder uses only messages inside its cognition window and every
  decoder only antennas inside its cluster;
* scalar chains are triangular with nonzero pivots once interference is
  removed either by earlier decoding or by sender-side precancellation;
* MIMO blocks have submatrix rank at least the degrees of freedom claimed
  through them.

Dirty-paper steps are modeled as removable known interference: the sender
must be able to compute the interfering signal from messages it knows,
which is tracked through a per-transmitter dependency map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from .netmodel import ASYMMETRIC, SYMMETRIC, ChannelModel, NetworkParams
from .tridiag import AlphaLike, RootAlpha, alpha_float, u_is_zero

__all__ = [
    "StrategyTag",
    "ScalarStep",
    "MimoBlock",
    "Subnet",
    "TransmissionPlan",
    "Certification",
    "asym_plan",
    "sym_symmetric_si_plan",
    "sym_general_plan",
    "fair_time_sharing_plan",
    "certify_plan",
    "plan_to_json",
    "synthesize_plan",
    "NotApplicableError",
]


class StrategyTag(str, Enum):
    SINGLE_USER_SIC_LEFT = "SingleUserSICLeft"
    DPC_LEFT = "DPCLeft"
    DPC_RIGHT_SCALED = "DPCRightScaled"
    SINGLE_USER_SIC_RIGHT = "SingleUserSICRight"
    MIMO_P2P = "MimoP2P"
    MIMO_BC = "MimoBC"
    MIMO_MAC = "MimoMAC"
    DOUBLE_PAIR_SIC_LEFT = "DoublePairSICLeft"
    DOUBLE_PAIR_DPC = "DoublePairDPC"
    MIRRORED_DOUBLE_PAIR = "MirroredDoublePair"
    CENTRAL_MIMO_DECODE = "CentralMimoDecode"
    SKIPPED = "Skipped"
    SILENCED = "Silenced"


class NotApplicableError(ValueError):
    """Raised when a requested scheme label does not apply to the instance."""


@dataclass(frozen=True)
class ScalarStep:
    """One message decoded from one antenna (successive cancellation / DPC)."""

    message: int
    tx: int
    antenna: int
    decoder: int
    tag: StrategyTag


@dataclass(frozen=True)
class MimoBlock:
    """Jointly decoded group: claimed prelogs ride on the block's rank.

    `coupled` lists messages whose prelog is claimed by scalar steps but
    which the block's joint decoder must also carry (the central-decoder
    scheme); they are included in the rank requirement.
    """

    tag: StrategyTag
    tx: Tuple[int, ...]
    antennas: Tuple[int, ...]
    prelog: Tuple[Tuple[int, int], ...]           # (message, prelog)
    tx_of: Tuple[Tuple[int, Tuple[int, ...]], ...]  # (message, encoders)
    decoders: Tuple[Tuple[int, Tuple[int, ...]], ...]  # (receiver, antennas used)
    coupled: Tuple[int, ...] = ()


@dataclass(frozen=True)
class Subnet:
    active_tx: Tuple[int, ...]
    rx_antennas: Tuple[int, ...]
    kind: str  # "generic" | "reduced"
    reduced_params: Optional[Tuple[int, int, int, int]]
    scalar_steps: Tuple[ScalarStep, ...]
    mimo_blocks: Tuple[MimoBlock, ...]
    claimed: int


@dataclass(frozen=True)
class TransmissionPlan:
    params: NetworkParams
    topology: str
    family: str
    silenced_tx: Tuple[int, ...]
    silenced_rx: Tuple[int, ...]
    subnets: Tuple[Subnet, ...]
    signal_deps: Tuple[Tuple[int, Tuple[int, ...]], ...]  # tx -> message deps
    message_prelog: Tuple[Tuple[int, int], ...]
    claimed_dof: int
    alpha_token: Optional[str] = None

    @property
    def silenced(self) -> Tuple[int, ...]:
        return self.silenced_tx

    def prelog_map(self) -> Dict[int, int]:
        return dict(self.message_prelog)

    def deps_map(self) -> Dict[int, FrozenSet[int]]:
        return {t: frozenset(d) for t, d in self.signal_deps}

    def strategy_map(self) -> Dict[int, str]:
        tags: Dict[int, str] = {}
        for sn in self.subnets:
            for st in sn.scalar_steps:
                tags[st.message] = st.tag.value
            for blk in sn.mimo_blocks:
                for msg, _ in blk.prelog:
                    tags[msg] = blk.tag.value
        for k in self.silenced_tx:
            tags[k] = StrategyTag.SILENCED.value
        for k in range(1, self.params.K + 1):
            tags.setdefault(k, StrategyTag.SKIPPED.value)
        return tags


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------

def _alpha_token(alpha: Optional[AlphaLike]) -> Optional[str]:
    if alpha is None:
        return None
    if isinstance(alpha, RootAlpha):
        return alpha.token()
    return repr(float(alpha))


def _reduce_asym(params: NetworkParams, n_active: int) -> Tuple[int, int, int, int]:
    """Clip side-information so that r_l'+t_l'+t_r'+r_r'+1 == n_active.

    Clipping order: keep r_left first, then t_left, t_right, r_right.
    """
    budget = n_active - 1
    rl = min(params.r_left, budget)
    budget -= rl
    tl = min(params.t_left, budget)
    budget -= tl
    tr = min(params.t_right, budget)
    budget -= tr
    rr = min(params.r_right, budget)
    budget -= rr
    if budget != 0:
        raise ValueError("block larger than the side-information allows")
    return (tl, tr, rl, rr)


def _finalize(params, topology, family, silenced_tx, silenced_rx, subnets, deps,
              alpha=None) -> TransmissionPlan:
    prelog: Dict[int, int] = {}
    for sn in subnets:
        for st in sn.scalar_steps:
            prelog[st.message] = prelog.get(st.message, 0) + 1
        for blk in sn.mimo_blocks:
            for msg, w in blk.prelog:
                prelog[msg] = prelog.get(msg, 0) + w
    claimed = sum(prelog.values())
    for sn in subnets:
        if sum(1 for st in sn.scalar_steps) + sum(w for blk in sn.mimo_blocks
                                                  for _, w in blk.prelog) != sn.claimed:
            raise AssertionError("subnet claim does not match its steps")
    return TransmissionPlan(
        params=params,
        topology=topology,
        family=family,
        silenced_tx=tuple(sorted(silenced_tx)),
        silenced_rx=tuple(sorted(silenced_rx)),
        subnets=tuple(subnets),
        signal_deps=tuple(sorted((t, tuple(sorted(d))) for t, d in deps.items())),
        message_prelog=tuple(sorted(prelog.items())),
        claimed_dof=claimed,
        alpha_token=_alpha_token(alpha),
    )


# ---------------------------------------------------------------------------
# asymmetric plan
# ---------------------------------------------------------------------------

def _asym_block(offset: int, red: Tuple[int, int, int, int]):
    """Steps and deps for one asymmetric subnet, local indices shifted by offset.

    red = (t_l', t_r', r_l', r_r').  Active transmitters are offset+1 ..
    offset+S with S = sum(red)+1; antennas offset+1 .. offset+S(+1).
    """
    tl, tr, rl, rr = red
    S = tl + tr + rl + rr + 1
    steps: List[ScalarStep] = []
    deps: Dict[int, set] = {}
    g1_end = rl + 1
    g2_end = rl + tl + 1
    g3_end = rl + tl + tr + 1

    for k in range(1, g1_end + 1):  # single-user, cancel from the left
        deps[k] = {k}
        steps.append(ScalarStep(k, k, k, k, StrategyTag.SINGLE_USER_SIC_LEFT))
    for k in range(g1_end + 1, g2_end + 1):  # precancel the left neighbor
        deps[k] = {k} | deps.get(k - 1, set())
        steps.append(ScalarStep(k, k, k, k, StrategyTag.DPC_LEFT))

    if rr > 0:
        for k in range(g3_end + 1, S + 1):  # single-user, cancel from the right
            deps[k] = {k}
        for k in range(g3_end, g2_end, -1):  # precancel the right neighbor
            deps[k] = {k} | deps.get(k + 1, set())
        for k in range(S, g3_end, -1):
            steps.append(ScalarStep(k, k, k + 1, k, StrategyTag.SINGLE_USER_SIC_RIGHT))
        for k in range(g2_end + 1, g3_end + 1):
            steps.append(ScalarStep(k, k, k + 1, k, StrategyTag.DPC_RIGHT_SCALED))
    elif tr >= 1:
        # no right clustering: transmitter k carries its right neighbor's message
        for k in range(g3_end, g2_end, -1):
            deps[k] = {k + 1} | deps.get(k + 1, set())
        for k in range(g2_end + 1, g3_end + 1):
            steps.append(ScalarStep(k + 1, k, k + 1, k + 1, StrategyTag.DPC_RIGHT_SCALED))

    steps_g = tuple(replace(s, message=s.message + offset, tx=s.tx + offset,
                            antenna=s.antenna + offset, decoder=s.decoder + offset)
                    for s in steps)
    deps_g = {t + offset: {m + offset for m in d} for t, d in deps.items()}
    return steps_g, deps_g


def asym_plan(params: NetworkParams) -> TransmissionPlan:
    """Periodic-silencing plan for the asymmetric network.

    Silences every beta-th transmitter (beta = t_l+t_r+r_l+r_r+2), plus the
    last one when the leftover segment is too long to keep all its pairs.
    """
    K = params.K
    beta = params.side_sum + 2
    n_full = K // beta
    kappa = K % beta
    silenced = {j * beta for j in range(1, n_full + 1)}
    if kappa > params.t_left + params.r_left + 1:
        silenced.add(K)

    subnets: List[Subnet] = []
    deps: Dict[int, set] = {}
    for j in range(1, n_full + 1):
        offset = (j - 1) * beta
        red = (params.t_left, params.t_right, params.r_left, params.r_right)
        steps, d = _asym_block(offset, red)
        deps.update(d)
        subnets.append(Subnet(
            active_tx=tuple(range(offset + 1, offset + beta)),
            rx_antennas=tuple(range(offset + 1, offset + beta + 1)),
            kind="generic",
            reduced_params=None,
            scalar_steps=steps,
            mimo_blocks=(),
            claimed=beta - 1,
        ))
    if kappa > 0:
        offset = n_full * beta
        n_active = kappa - 1 if K in silenced else kappa
        if n_active > 0:
            red = _reduce_asym(params, n_active)
            steps, d = _asym_block(offset, red)
            deps.update(d)
            subnets.append(Subnet(
                active_tx=tuple(range(offset + 1, offset + n_active + 1)),
                rx_antennas=tuple(range(offset + 1, K + 1)),
                kind="reduced",
                reduced_params=red,
                scalar_steps=steps,
                mimo_blocks=(),
                claimed=n_active,
            ))
    return _finalize(params, ASYMMETRIC, "asym-silencing", silenced, (), subnets, deps)


def fair_time_sharing_plan(params: NetworkParams) -> List[TransmissionPlan]:
    """beta rotated silencing plans; every message is served in most of them.

    Plan i silences {i, i+beta, i+2*beta, ...} and, when the trailing
    segment is too long, transmitter K as well.  Averaged over the beta
    plans the multiplexing gain is at least K - gamma - 1.
    """
    K = params.K
    beta = params.side_sum + 2
    tl_rl = params.t_left + params.r_left
    plans = []
    for i in range(1, beta + 1):
        silenced = {i + j * beta for j in range(0, (K - i) // beta + 1) if i + j * beta <= K}
        last_regular = max(silenced) if silenced else 0
        if K not in silenced and K - last_regular > tl_rl + 1:
            silenced.add(K)
        cuts = sorted(silenced)
        subnets: List[Subnet] = []
        deps: Dict[int, set] = {}
        prev = 0
        segments = []
        for s in cuts:
            segments.append((prev, s, True))  # antennas prev+1..s, tx s silenced
            prev = s
        if prev < K:
            segments.append((prev, K, False))
        for lo, hi, last_silenced in segments:
            n_rx = hi - lo
            n_active = n_rx - 1 if last_silenced else n_rx
            if n_active <= 0:
                continue
            red = _reduce_asym(params, n_active)
            steps, d = _asym_block(lo, red)
            deps.update(d)
            full = (params.t_left, params.t_right, params.r_left, params.r_right)
            subnets.append(Subnet(
                active_tx=tuple(range(lo + 1, lo + n_active + 1)),
                rx_antennas=tuple(range(lo + 1, hi + 1)),
                kind="generic" if (n_rx == beta and red == full) else "reduced",
                reduced_params=None if (n_rx == beta and red == full) else red,
                scalar_steps=steps,
                mimo_blocks=(),
                claimed=n_active,
            ))
        plans.append(_finalize(params, ASYMMETRIC, f"asym-rotation-{i}",
                               silenced, (), subnets, deps))
    return plans


# ---------------------------------------------------------------------------
# symmetric side-information plan (pair silencing + MIMO subnets)
# ---------------------------------------------------------------------------

def _mimo_subnet(params: NetworkParams, offset: int, size: int,
                 alpha: AlphaLike, tol: float,
                 assume_full: bool = False) -> Tuple[Subnet, Dict[int, set]]:
    """One pair-silencing subnet handled as a joint MIMO block."""
    kappa = size
    tl_ = max(0, kappa - 1 - params.r_left)
    rl_ = kappa - 1 - tl_
    tr_ = max(0, kappa - 1 - params.r_right)
    rr_ = kappa - 1 - tr_
    full_rank = assume_full or not u_is_zero(kappa, alpha, tol)
    claimed = kappa if full_rank else kappa - 1

    txs = tuple(range(offset + 1, offset + kappa + 1))
    ants = txs
    bal = (rl_ + rr_) - (tl_ + tr_)
    deps: Dict[int, set] = {}
    if bal == 0:
        tag = StrategyTag.MIMO_P2P
        msg = offset + tr_ + 1
        prelog = [(msg, claimed)]
        tx_of = [(msg, txs)]
        decoders = [(msg, ants)]
        for t in txs:
            deps[t] = {msg}
    elif bal < 0:
        tag = StrategyTag.MIMO_BC
        msgs = list(range(offset + rl_ + 1, offset + tr_ + 2))
        weights = {m: 1 for m in msgs}
        weights[msgs[0]] = rl_ + 1
        weights[msgs[-1]] += rr_  # last gets r_r'+1 in total
        if not full_rank:
            big = max(msgs, key=lambda m: weights[m])
            weights[big] -= 1
        prelog = [(m, w) for m, w in weights.items() if w > 0]
        tx_of = [(m, txs) for m, _ in prelog]
        decoders = [(msgs[0], tuple(range(offset + 1, offset + rl_ + 2)))]
        for m in msgs[1:-1]:
            decoders.append((m, (m,)))
        decoders.append((msgs[-1], tuple(range(offset + tr_ + 1, offset + kappa + 1))))
        all_msgs = set(msgs)
        for t in txs:
            deps[t] = set(all_msgs)
    else:
        tag = StrategyTag.MIMO_MAC
        msgs = list(range(offset + tr_ + 1, offset + rl_ + 2))
        weights = {m: 1 for m in msgs}
        weights[msgs[0]] = tr_ + 1
        weights[msgs[-1]] += tl_
        if not full_rank:
            big = max(msgs, key=lambda m: weights[m])
            weights[big] -= 1
        prelog = [(m, w) for m, w in weights.items() if w > 0]
        tx_of = []
        for m in msgs:
            if m == msgs[0]:
                group = tuple(range(offset + 1, offset + tr_ + 2))
            elif m == msgs[-1]:
                group = tuple(range(offset + rl_ + 1, offset + kappa + 1))
            else:
                group = (m,)
            tx_of.append((m, group))
            for t in group:
                deps.setdefault(t, set()).add(m)
        decoders = [(r, tuple(a for a in params.rx_window(r) if offset + 1 <= a <= offset + kappa))
                    for r in msgs]

    block = MimoBlock(tag=tag, tx=txs, antennas=ants,
                      prelog=tuple(prelog), tx_of=tuple(tx_of), decoders=tuple(decoders))
    red = None if kappa == params.t_left + params.r_left + 1 else (tl_, tr_, rl_, rr_)
    sn = Subnet(active_tx=txs, rx_antennas=ants,
                kind="generic" if red is None else "reduced",
                reduced_params=red, scalar_steps=(), mimo_blocks=(block,), claimed=claimed)
    return sn, deps


def _pair_silencing_subnets(params, silenced_pairs, alpha, tol, assume_full=False):
    K = params.K
    subnets = []
    deps: Dict[int, set] = {}
    cut = sorted(silenced_pairs)
    prev = 0
    for s in cut + [K + 1]:
        if s - prev > 1:
            offset, size = prev, s - prev - 1
            sn, d = _mimo_subnet(params, offset, size, alpha, tol, assume_full)
            subnets.append(sn)
            deps.update(d)
        prev = s
    return subnets, deps


def sym_symmetric_si_plan(params: NetworkParams, alpha: AlphaLike,
                          tol: float = 1e-9, force_case: Optional[int] = None) -> TransmissionPlan:
    """Pair-silencing plan for equal gains and symmetric side-information.

    The silencing period tracks the determinant pattern of alpha: period
    L+2 while the (L+1)-size blocks stay full rank, period L+1 at the
    critical gains, with the last cut shifted by one whenever the leftover
    block would itself be singular.  `force_case` overrides the dispatch
    (used to demonstrate certification failures of the wrong pattern).
    """
    L = params.t_left + params.r_left
    if L != params.t_right + params.r_right:
        raise NotApplicableError("requires symmetric side-information")
    if alpha_float(alpha) == 0:
        raise ValueError("nonzero cross-gain required")
    K = params.K

    if force_case is None:
        if K <= L + 1:
            case = 1
        elif u_is_zero(L + 1, alpha, tol):
            case = 4
        elif u_is_zero(L, alpha, tol):
            case = 2
        else:
            case = 3
    else:
        case = force_case

    adapt = force_case is None
    if case == 1:
        silenced: List[int] = []
    elif case in (2, 3):
        period = L + 2
        g = K // period
        silenced = [m * period for m in range(1, g + 1)]
        kappa = K % period
        if adapt and case == 3 and kappa >= 2 and u_is_zero(kappa, alpha, tol):
            # shift the last cut so every block stays full rank
            silenced = [m * period for m in range(1, g)] + [g * period - 1]
    else:
        period = L + 1
        g = K // period
        silenced = [m * period for m in range(1, g + 1)]
        kappa = K % period
        if adapt and kappa >= 2 and u_is_zero(kappa, alpha, tol):
            silenced = [m * period for m in range(1, g)] + [g * period - 1]

    subnets, deps = _pair_silencing_subnets(params, silenced, alpha, tol,
                                            assume_full=not adapt)
    return _finalize(params, SYMMETRIC, f"sym-si-case{case}", silenced, silenced,
                     subnets, deps, alpha=alpha)


# ---------------------------------------------------------------------------
# general-parameter chain plans (pair-of-transmitters silencing)
# ---------------------------------------------------------------------------

def _f_block(rl_: int, tl_: int, t_end: int):
    """Double-interference chain over local transmitters 2..t_end.

    Antennas 1..t_end-1 are used; messages 2..t_end (own message, when the
    decoder can reach to its left) or 1..t_end-1 (shifted onto the right
    neighbor when r_l' = 0).  Claims t_end-1 degrees of freedom.
    """
    steps: List[ScalarStep] = []
    deps: Dict[int, set] = {}
    if t_end < 2:
        return tuple(steps), deps
    if rl_ >= 1:
        f1_end = min(rl_ + 1, t_end)
        for k in range(2, f1_end + 1):
            deps[k] = {k}
            steps.append(ScalarStep(k, k, k - 1, k, StrategyTag.DOUBLE_PAIR_SIC_LEFT))
        for k in range(f1_end + 1, t_end + 1):
            deps[k] = {k} | deps.get(k - 1, set()) | deps.get(k - 2, set())
            steps.append(ScalarStep(k, k, k - 1, k, StrategyTag.DOUBLE_PAIR_DPC))
    else:
        for k in range(2, t_end + 1):
            deps[k] = {k - 1} | deps.get(k - 1, set()) | deps.get(k - 2, set())
            steps.append(ScalarStep(k - 1, k, k - 1, k - 1, StrategyTag.DOUBLE_PAIR_DPC))
    return tuple(steps), deps


def _mirror_local(steps, deps, size):
    """Reflect local indices i -> size+1-i (left/right exchange)."""
    ref = lambda i: size + 1 - i
    msteps = tuple(ScalarStep(ref(s.message), ref(s.tx), ref(s.antenna), ref(s.decoder),
                              StrategyTag.MIRRORED_DOUBLE_PAIR) for s in steps)
    mdeps = {ref(t): {ref(m) for m in d} for t, d in deps.items()}
    return msteps, mdeps


def _shift(steps, deps, offset):
    s = tuple(replace(st, message=st.message + offset, tx=st.tx + offset,
                      antenna=st.antenna + offset, decoder=st.decoder + offset)
              for st in steps)
    d = {t + offset: {m + offset for m in dd} for t, dd in deps.items()}
    return s, d


def _pair_tx_silencing(K: int, beta: int):
    """Silenced transmitters {m*beta+1} and {m*beta}, plus the tail rule."""
    gamma = K // beta
    kappa = K % beta
    theta = 0 if kappa == 0 else (1 if kappa == 1 else 2)
    silenced = {m * beta + 1 for m in range(0, gamma)} | {m * beta for m in range(1, gamma + 1)}
    if theta >= 1:
        silenced.add(gamma * beta + 1)
    if theta == 2:
        silenced.add(K)
    return silenced, gamma, kappa, theta


def _lb_chain_blocks(params, beta, block_builder, family):
    """Shared skeleton for the transmitter-pair silencing chain schemes.

    block_builder(size) returns (scalar_steps, mimo_blocks, deps) in local
    coordinates 1..size (antennas; active transmitters are 2..size-1).
    """
    K = params.K
    silenced, gamma, kappa, theta = _pair_tx_silencing(K, beta)
    subnets: List[Subnet] = []
    deps: Dict[int, set] = {}
    segments = [(m * beta, beta, "generic") for m in range(gamma)]
    if theta >= 1 and kappa >= 1:
        segments.append((gamma * beta, kappa, "reduced"))
    for offset, size, kind in segments:
        steps, blocks, d = block_builder(size)
        steps, d = _shift(steps, d, offset)
        blocks = tuple(_shift_block(b, offset) for b in blocks)
        deps.update(d)
        subnets.append(Subnet(
            active_tx=tuple(range(offset + 2, offset + size)),
            rx_antennas=tuple(range(offset + 1, offset + size + 1)),
            kind=kind, reduced_params=None,
            scalar_steps=steps,
            mimo_blocks=blocks,
            claimed=max(size - 2, 0),
        ))
    return _finalize(params, SYMMETRIC, family, silenced, (), subnets, deps)


def _shift_block(b: MimoBlock, offset: int) -> MimoBlock:
    return MimoBlock(
        tag=b.tag,
        tx=tuple(t + offset for t in b.tx),
        antennas=tuple(a + offset for a in b.antennas),
        prelog=tuple((m + offset, w) for m, w in b.prelog),
        tx_of=tuple((m + offset, tuple(t + offset for t in g)) for m, g in b.tx_of),
        decoders=tuple((r + offset, tuple(a + offset for a in ants)) for r, ants in b.decoders),
        coupled=tuple(m + offset for m in b.coupled),
    )


def _split_reach(total: int, r_side: int, t_side: int):
    """Split a chain budget total = r' + t' with r' <= r_side, t' <= t_side."""
    r_e = min(r_side, total)
    t_e = total - r_e
    if t_e > t_side:
        raise ValueError("chain budget exceeds the side information")
    return r_e, t_e


def sym_general_plan(params: NetworkParams, bound_label: str) -> TransmissionPlan:
    """Constructive plan matching one of the four general lower bounds.

    bound_label in {"lb-combined", "lb-left-chain", "lb-right-chain",
    "lb-central-mimo"}.  Raises NotApplicableError for labels whose scheme
    does not cover the instance (with the delegation reason).
    """
    K = params.K
    tl, tr, rl, rr = params.t_left, params.t_right, params.r_left, params.r_right

    if bound_label == "lb-left-chain":
        if tl + rl <= 1:
            raise NotApplicableError("t_left+r_left <= 1: nothing to prove (bound <= 0)")
        if tl == 0:
            raise NotApplicableError("t_left = 0: delegates to lb-central-mimo")
        beta = tl + rl + 1

        def build(size):
            t_end = size - 1
            rl_e = min(rl, max(0, t_end - 1))
            tl_e = min(tl, max(0, t_end - 1 - rl_e))
            steps, d = _f_block(rl_e, tl_e, t_end)
            return steps, (), d

        return _lb_chain_blocks(params, beta, build, "sym-lb-left-chain")

    if bound_label == "lb-right-chain":
        mirrored = sym_general_plan(params.mirrored(), "lb-left-chain")
        return _mirror_plan(mirrored, params, "sym-lb-right-chain")

    if bound_label == "lb-combined":
        if tl + rl == 0:
            raise NotApplicableError("t_left+r_left = 0: delegates to lb-right-chain")
        if tr + rr == 0:
            raise NotApplicableError("t_right+r_right = 0: delegates to lb-left-chain")
        if params.side_sum <= 2:
            raise NotApplicableError("side-information sum <= 2: nothing to prove")
        beta = params.side_sum

        def build(size):
            # left and right chains back to back; two central antennas unused
            ltot = min(tl + rl, size - 1)
            rtot = size - ltot
            rl_e, tl_e = _split_reach(ltot - 1, rl, tl) if ltot >= 1 else (0, 0)
            rr_e, tr_e = _split_reach(rtot - 1, rr, tr) if rtot >= 1 else (0, 0)
            lsteps, ldeps = _f_block(rl_e, tl_e, ltot)
            rsteps, rdeps = _f_block(rr_e, tr_e, rtot)
            rsteps, rdeps = _mirror_local(rsteps, rdeps, size)
            deps = dict(ldeps)
            deps.update(rdeps)
            return lsteps + rsteps, (), deps

        return _lb_chain_blocks(params, beta, build, "sym-lb-combined")

    if bound_label == "lb-central-mimo":
        beta = rl + rr + 3

        def build(size):
            if size < 3:
                return (), (), {}
            rl_e = min(rl, size - 3)
            rr_e = size - 3 - rl_e
            center = rl_e + 2
            steps: List[ScalarStep] = []
            deps: Dict[int, set] = {center: {center}}
            left_msgs = tuple(range(2, rl_e + 2))
            right_msgs = tuple(range(center + 1, center + 1 + rr_e))
            for k in left_msgs:
                deps[k] = {k}
                steps.append(ScalarStep(k, k, k - 1, k, StrategyTag.SINGLE_USER_SIC_LEFT))
            for k in reversed(right_msgs):
                deps[k] = {k}
                steps.append(ScalarStep(k, k, k + 1, k, StrategyTag.SINGLE_USER_SIC_RIGHT))
            block = MimoBlock(
                tag=StrategyTag.CENTRAL_MIMO_DECODE,
                tx=tuple(range(2, size)),
                antennas=tuple(range(2, size)),
                prelog=((center, 1),),
                tx_of=((center, (center,)),),
                decoders=((center, tuple(range(2, size))),),
                coupled=left_msgs + right_msgs,
            )
            return tuple(steps), (block,), deps

        return _lb_chain_blocks(params, beta, build, "sym-lb-central-mimo")

    raise NotApplicableError(f"unknown bound label {bound_label!r}")


def _mirror_plan(plan: TransmissionPlan, params: NetworkParams, family: str) -> TransmissionPlan:
    K = params.K
    ref = lambda i: K + 1 - i
    subnets = []
    for sn in reversed(plan.subnets):
        steps = tuple(ScalarStep(ref(s.message), ref(s.tx), ref(s.antenna), ref(s.decoder),
                                 StrategyTag.MIRRORED_DOUBLE_PAIR)
                      for s in sn.scalar_steps)
        blocks = tuple(MimoBlock(
            tag=b.tag,
            tx=tuple(sorted(ref(t) for t in b.tx)),
            antennas=tuple(sorted(ref(a) for a in b.antennas)),
            prelog=tuple((ref(m), w) for m, w in b.prelog),
            tx_of=tuple((ref(m), tuple(sorted(ref(t) for t in g))) for m, g in b.tx_of),
            decoders=tuple((ref(r), tuple(sorted(ref(a) for a in ants))) for r, ants in b.decoders),
            coupled=tuple(sorted(ref(m) for m in b.coupled)),
        ) for b in sn.mimo_blocks)
        subnets.append(Subnet(
            active_tx=tuple(sorted(ref(t) for t in sn.active_tx)),
            rx_antennas=tuple(sorted(ref(a) for a in sn.rx_antennas)),
            kind=sn.kind,
            reduced_params=None if sn.reduced_params is None else (
                sn.reduced_params[1], sn.reduced_params[0],
                sn.reduced_params[3], sn.reduced_params[2]),
            scalar_steps=steps,
            mimo_blocks=blocks,
            claimed=sn.claimed,
        ))
    deps = {ref(t): {ref(m) for m in d} for t, d in plan.deps_map().items()}
    return _finalize(params, SYMMETRIC, family,
                     [ref(s) for s in plan.silenced_tx],
                     [ref(s) for s in plan.silenced_rx],
                     subnets, deps)


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

@dataclass
class Certification:
    ok: bool
    certified_dof: int
    claimed_dof: int
    failure: Optional[str] = None
    checks: Tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"ok": self.ok, "certified_dof": self.certified_dof,
                "claimed_dof": self.claimed_dof, "failure": self.failure,
                "checks": list(self.checks)}


def _numeric_rank(a: np.ndarray, rel_tol: float = 1e-8) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def certify_plan(plan: TransmissionPlan, model: ChannelModel) -> Certification:
    """Verify a plan against a concrete channel: non-interference,
    side-information feasibility, chain pivots/removability, block ranks,
    and the claimed total.  Stops at the first violated check."""
    params = plan.params
    if params != model.params or plan.topology != model.topology:
        raise ValueError("plan and model describe different instances")
    H = model.matrix
    K = params.K
    deps = plan.deps_map()
    prelog = plan.prelog_map()
    checks: List[str] = []

    def fail(msg):
        return Certification(ok=False, certified_dof=0, claimed_dof=plan.claimed_dof,
                             failure=msg, checks=tuple(checks))

    silenced = set(plan.silenced_tx)
    silenced_rx = set(plan.silenced_rx)
    active_all = set()
    for sn in plan.subnets:
        active_all.update(sn.active_tx)
    if active_all & silenced:
        return fail("silenced transmitter listed as active")

    # (a) subnets do not interfere
    for i, sa in enumerate(plan.subnets):
        for j, sb in enumerate(plan.subnets):
            if i == j:
                continue
            sub = model.submatrix(sa.rx_antennas, sb.active_tx)
            if sub.size and np.any(sub != 0):
                return fail(f"subnets {i} and {j} couple through the channel")
    checks.append("non-interference")

    # (b) encoder-side feasibility
    for t, dset in deps.items():
        win = set(params.tx_window(t))
        if not dset <= win:
            return fail(f"transmitter {t} uses messages {sorted(dset - win)} outside its window")
    checks.append("encoder-feasibility")

    certified = 0
    for si, sn in enumerate(plan.subnets):
        decoded: set = set()
        needed_antennas: Dict[int, set] = {}
        for st in sn.scalar_steps:
            if st.antenna in silenced_rx:
                return fail(f"step for message {st.message} uses a silenced antenna")
            pivot = H[st.antenna - 1, st.tx - 1]
            if pivot == 0:
                return fail(f"zero pivot: message {st.message} at antenna {st.antenna}")
            need = {st.antenna}
            own_deps = deps.get(st.tx, frozenset())
            for tx2 in sn.active_tx:
                if tx2 == st.tx or H[st.antenna - 1, tx2 - 1] == 0:
                    continue
                d2 = deps.get(tx2, frozenset())
                if d2 and d2 <= own_deps - {st.message}:
                    pass  # the sender's signal already absorbs this interferer
                elif d2 <= decoded:
                    for m in d2:
                        need |= needed_antennas.get(m, set())
                else:
                    return fail(f"message {st.message}: interference from transmitter "
                                f"{tx2} is not removable")
            reach = set(params.rx_window(st.decoder))
            if not need <= reach:
                return fail(f"decoder {st.decoder} needs antennas {sorted(need - reach)} "
                            f"outside its cluster")
            needed_antennas[st.message] = need
            decoded.add(st.message)
            certified += 1
        for blk in sn.mimo_blocks:
            covered = set()
            for r, ants in blk.decoders:
                reach = set(params.rx_window(r))
                aset = set(ants)
                if not aset <= reach:
                    return fail(f"receiver {r} assigned antennas outside its cluster")
                if aset & silenced_rx:
                    return fail(f"receiver {r} assigned a silenced antenna")
                covered |= aset
            if not set(blk.antennas) <= covered:
                return fail("joint decoder does not cover the block antennas")
            for m, group in blk.tx_of:
                for t in group:
                    if m not in set(params.tx_window(t)):
                        return fail(f"transmitter {t} does not know message {m}")
            want = sum(w for _, w in blk.prelog) + sum(prelog.get(m, 0) for m in blk.coupled)
            r = _numeric_rank(model.submatrix(blk.antennas, blk.tx))
            if r < want:
                return fail(f"rank {r} < required {want} in subnet {si}")
            certified += sum(w for _, w in blk.prelog)
    checks.append("chains-and-ranks")

    if certified != plan.claimed_dof:
        return fail(f"claimed {plan.claimed_dof} but steps certify {certified}")
    checks.append("claimed-total")
    return Certification(ok=True, certified_dof=certified, claimed_dof=plan.claimed_dof,
                         checks=tuple(checks))


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------

def plan_to_json(plan: TransmissionPlan) -> dict:
    return {
        "family": plan.family,
        "topology": plan.topology,
        "K": plan.params.K,
        "t_left": plan.params.t_left,
        "t_right": plan.params.t_right,
        "r_left": plan.params.r_left,
        "r_right": plan.params.r_right,
        "alpha": plan.alpha_token,
        "silenced": list(plan.silenced_tx),
        "silenced_pairs": list(plan.silenced_rx),
        "subnets": [{"tx": list(s.active_tx), "rx": list(s.rx_antennas), "kind": s.kind}
                    for s in plan.subnets],
        "strategies": {str(k): v for k, v in sorted(plan.strategy_map().items())},
        "prelog": {str(k): v for k, v in plan.message_prelog},
        "claimed_dof": plan.claimed_dof,
    }


def synthesize_plan(params: NetworkParams, topology: str, family: str,
                    alpha: Optional[AlphaLike] = None,
                    bound_label: Optional[str] = None) -> TransmissionPlan:
    """Re-create a plan from its descriptor (families are deterministic)."""
    if family.startswith("asym-rotation"):
        idx = int(family.rsplit("-", 1)[1])
        return fair_time_sharing_plan(params)[idx - 1]
    if family == "asym-silencing":
        return asym_plan(params)
    if family.startswith("sym-si"):
        if alpha is None:
            raise ValueError("symmetric plans need the cross-gain")
        return sym_symmetric_si_plan(params, alpha)
    if family.startswith("sym-lb"):
        label = bound_label or family.replace("sym-", "", 1)
        return sym_general_plan(params, label)
    raise ValueError(f"unknown plan family {family!r}")


def plan_from_json(obj) -> TransmissionPlan:
    if isinstance(obj, str):
        obj = json.loads(obj)
    params = NetworkParams(K=int(obj["K"]), t_left=int(obj["t_left"]),
                           t_right=int(obj["t_right"]), r_left=int(obj["r_left"]),
                           r_right=int(obj["r_right"]))
    alpha = None
    if obj.get("alpha") is not None:
        from .netmodel import parse_alpha_token
        alpha = parse_alpha_token(obj["alpha"])
    plan = synthesize_plan(params, obj["topology"], obj["family"], alpha=alpha)
    if list(plan.silenced_tx) != list(obj["silenced"]) or plan.claimed_dof != obj["claimed_dof"]:
        raise ValueError("plan JSON does not match its re-synthesized form")
    return plan
