"""Monte Carlo oracle for the chain race.

The samplers use the renewal decomposition of the arrival process: every
embedded-chain event is either a bare adversarial arrival, or a jumper
together with the Poisson-distributed count of blocks mined inside its
delay window (adversarial-only in the private-attack mode, everything in
the rigged mode).  A separate raw-timeline sampler generates explicit
exponential arrival times and applies the jumper and window rules directly;
tests use it to validate the decomposition itself.

Trials run in fixed-size batches, each batch drawing from its own
counter-based Philox stream keyed by (seed, phase, batch index).  Results
are integer tallies merged additively, so identical configs produce
identical reports no matter how many workers chew on the batches.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import HorizonTooSmall
from .params import DerivedParams, ProtocolParams, derive
from .postconf import TwoStepWalk, WalkParams

PRIVATE_DELTA = "private-delta"
RIGGED = "rigged"
MODES = (PRIVATE_DELTA, RIGGED)

_BATCH = 1 << 20
# A race is abandoned once the chance of still catching up drops below this.
_RESOLVE_TOL = 1e-15

_PHASE_LEAD, _PHASE_CONF, _PHASE_RACE, _PHASE_E2E = 1, 2, 3, 4


@dataclass(frozen=True)
class SimConfig:
    params: ProtocolParams
    trials: int
    warmup_blocks: int = 10_000
    seed: int = 0
    mode: str = PRIVATE_DELTA
    horizon: int = 1_000_000

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.warmup_blocks < 1:
            raise ValueError(f"warmup_blocks must be >= 1, got {self.warmup_blocks}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(eq=False, frozen=True)
class EmpiricalPmf:
    """Histogram of a simulated count, kept as raw tallies."""

    counts: np.ndarray
    trials: int

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        if int(counts.sum()) != self.trials:
            raise ValueError("histogram does not sum to the trial count")

    @property
    def pmf(self) -> np.ndarray:
        return self.counts / self.trials

    def p(self, i: int) -> float:
        if 0 <= i < len(self.counts):
            return float(self.counts[i]) / self.trials
        return 0.0

    def stderr(self, i: int) -> float:
        p = self.p(i)
        return math.sqrt(p * (1.0 - p) / self.trials)


@dataclass(frozen=True)
class CatchEstimate:
    """Estimated probability that a race closes a fixed deficit."""

    probability: float
    stderr: float
    trials: int
    truncated_trials: int


@dataclass(eq=False, frozen=True)
class SimReport:
    """End-to-end attack outcome plus the per-phase histograms it produced."""

    mode: str
    trials: int
    discard_freq: float
    stderr: float
    truncated_trials: int
    lead_hist: EmpiricalPmf
    conf_count_hist: EmpiricalPmf


def _stream(seed: int, phase: int, batch: int) -> np.random.Generator:
    mask = (1 << 64) - 1
    key = [seed & mask, ((phase << 48) ^ batch) & mask]
    return np.random.Generator(np.random.Philox(key=key))


def _batches(trials: int) -> list[tuple[int, int]]:
    out = []
    start = 0
    index = 0
    while start < trials:
        size = min(_BATCH, trials - start)
        out.append((index, size))
        start += size
        index += 1
    return out


def _map_batches(trials: int, fn: Callable[[int, int], tuple], workers: int) -> list[tuple]:
    plan = _batches(trials)
    if workers <= 1:
        return [fn(i, n) for i, n in plan]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: fn(*t), plan))


def _merge_counts(parts: Iterable[np.ndarray]) -> np.ndarray:
    parts = list(parts)
    out = np.zeros(max(len(c) for c in parts), dtype=np.int64)
    for c in parts:
        out[: len(c)] += c
    return out


def _window_mu(cfg: SimConfig) -> float:
    p = cfg.params
    return p.beta * p.lam_delta if cfg.mode == PRIVATE_DELTA else p.lam_delta


_GAP_CAP = 1 << 20  # effectively "no barrier"; the step horizon rules instead


def _loss_gap(ratio: float) -> int:
    """Deficit beyond which a race is scored lost (catch-up odds < _RESOLVE_TOL)."""
    if ratio <= 0.0:
        return 8
    if ratio >= 1.0:
        return _GAP_CAP
    g = math.ceil(math.log(_RESOLVE_TOL) / math.log(ratio))
    return int(min(max(g, 8), _GAP_CAP))


def _check_horizon(wins: int, truncated: int, trials: int) -> None:
    if truncated == 0:
        return
    share = truncated / trials
    if share > 1e-3 * (wins / trials):
        raise HorizonTooSmall(
            f"{truncated} of {trials} races hit the step horizon; raise horizon"
        )


def _lead_chain(rng: np.random.Generator, n: int, steps: int, beta: float, mu: float) -> np.ndarray:
    """Run the embedded lead chain for a batch: adversarial arrival w.p. beta,
    otherwise a jumper whose window contributes a Poisson(mu) count."""
    state = np.zeros(n, dtype=np.int64)
    for _ in range(steps):
        adv = rng.random(n) < beta
        m = rng.poisson(mu, n)
        state = np.where(adv, state + 1, np.maximum(state - 1, 0) + m)
    return state


def simulate_lead(cfg: SimConfig, workers: int = 1) -> EmpiricalPmf:
    """Empirical steady-state lead after ``warmup_blocks`` chain events per trial."""
    p = cfg.params
    mu = _window_mu(cfg)

    def one(batch: int, n: int) -> tuple:
        rng = _stream(cfg.seed, _PHASE_LEAD, batch)
        state = _lead_chain(rng, n, cfg.warmup_blocks, p.beta, mu)
        return (np.bincount(state),)

    parts = _map_batches(cfg.trials, one, workers)
    return EmpiricalPmf(counts=_merge_counts(c for (c,) in parts), trials=cfg.trials)


def simulate_confirmation(cfg: SimConfig, k: int, workers: int = 1) -> EmpiricalPmf:
    """Empirical confirmation-interval count over k consecutive jumper renewals."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    p = cfg.params
    mu = _window_mu(cfg)

    def one(batch: int, n: int) -> tuple:
        rng = _stream(cfg.seed, _PHASE_CONF, batch)
        total = np.zeros(n, dtype=np.int64)
        for _ in range(k):
            total += rng.geometric(p.alpha, n) - 1   # arrivals before the jumper
            total += rng.poisson(mu, n)              # arrivals inside its window
        return (np.bincount(total),)

    parts = _map_batches(cfg.trials, one, workers)
    return EmpiricalPmf(counts=_merge_counts(c for (c,) in parts), trials=cfg.trials)


def _race_three_way(
    rng: np.random.Generator, n: int, deficit: int, w: WalkParams, horizon: int
) -> tuple[int, int]:
    """Truncated three-way race: win when the tie-adjusted maximum reaches the deficit."""
    if deficit <= 0:
        return n, 0
    gap = _loss_gap(w.p_right / w.p_left if w.p_left > 0 else 1.0)
    pos = np.zeros(n, dtype=np.int64)
    wins = 0
    steps = 0
    while pos.size:
        if steps >= horizon:
            return wins, pos.size
        u = rng.random(pos.size)
        step = np.where(u < w.p_right, 1, np.where(u < w.p_right + w.p_stay, 0, -1))
        pos += step
        won = (pos + (step == 0)) >= deficit
        lost = (deficit - pos) > gap
        wins += int(won.sum())
        pos = pos[~(won | lost)]
        steps += 1
    return wins, 0


def _race_two_arrival(
    rng: np.random.Generator,
    n: int,
    deficit: int,
    walk: TwoStepWalk,
    p: ProtocolParams,
    horizon: int,
) -> tuple[int, int]:
    """Two-arrival rigged race built from exponential gaps and honesty coins.

    Odd deficits first take a single toss (honest only if the arrival falls
    outside the delay window) to make the remaining distance even; then each
    group of two arrivals moves the race by -2, 0 or +2 according to the
    jumper pattern inside the group.
    """
    if deficit <= 0:
        return n, 0
    scale = 1.0 / p.lam
    rem = np.full(n, deficit, dtype=np.int64)
    if deficit % 2 == 1:
        honest = (rng.random(n) < p.alpha) & (rng.exponential(scale, n) > p.delta)
        rem = np.where(honest, rem + 1, rem - 1)
    wins = int((rem <= 0).sum())
    rem = rem[rem > 0]
    gap = _loss_gap(walk.ratio)
    groups = 0
    while rem.size:
        if groups >= horizon:
            return wins, rem.size
        m = rem.size
        e1 = rng.exponential(scale, m)
        e2 = rng.exponential(scale, m)
        c1 = rng.random(m) < p.alpha
        c2 = rng.random(m) < p.alpha
        first_jumper = c1 & (e1 > p.delta)
        second_jumper = c2 & (e2 > p.delta)
        both = first_jumper & second_jumper
        one_each = (
            (first_jumper & ~second_jumper)
            | (~c1 & (e1 > p.delta) & c2)
            | ((e1 < p.delta) & c2 & (e1 + e2 > p.delta))
        )
        rem = rem + np.where(both, 2, np.where(one_each, 0, -2))
        won = rem <= 0
        lost = rem > gap
        wins += int(won.sum())
        rem = rem[~(won | lost)]
        groups += 1
    return wins, 0


def simulate_postconf(cfg: SimConfig, deficit: int, workers: int = 1) -> CatchEstimate:
    """Estimate the probability that the post-confirmation race closes ``deficit``.

    Private-attack mode runs the truncated three-way walk with the tie rule;
    rigged mode runs the two-arrival race from timing primitives.
    """
    if deficit < 1:
        raise ValueError(f"deficit must be >= 1, got {deficit}")
    d = derive(cfg.params)

    if cfg.mode == PRIVATE_DELTA:
        w = WalkParams.from_derived(d)

        def one(batch: int, n: int) -> tuple:
            rng = _stream(cfg.seed, _PHASE_RACE, batch)
            return _race_three_way(rng, n, deficit, w, cfg.horizon)

    else:
        walk = TwoStepWalk.from_derived(d)

        def one(batch: int, n: int) -> tuple:
            rng = _stream(cfg.seed, _PHASE_RACE, batch)
            return _race_two_arrival(rng, n, deficit, walk, cfg.params, cfg.horizon)

    parts = _map_batches(cfg.trials, one, workers)
    wins = sum(w for w, _ in parts)
    truncated = sum(t for _, t in parts)
    _check_horizon(wins, truncated, cfg.trials)
    p_hat = wins / cfg.trials
    return CatchEstimate(
        probability=p_hat,
        stderr=math.sqrt(p_hat * (1.0 - p_hat) / cfg.trials),
        trials=cfg.trials,
        truncated_trials=truncated,
    )


def _race_renewal(
    rng: np.random.Generator,
    deficits: np.ndarray,
    beta: float,
    mu: float,
    gap: int,
    horizon: int,
) -> tuple[int, int]:
    """Post-confirmation race at full renewal granularity (untruncated windows).

    A window block is publishable ahead of its jumper, so a window count that
    momentarily meets the current deficit wins even though the jumper then
    claws one height back.
    """
    rem = deficits[deficits > 0].astype(np.int64)
    wins = 0
    steps = 0
    while rem.size:
        if steps >= horizon:
            return wins, rem.size
        n = rem.size
        adv = rng.random(n) < beta
        m = rng.poisson(mu, n)
        new_rem = np.where(adv, rem - 1, rem + 1 - m)
        won = (new_rem <= 0) | (~adv & (m >= rem))
        lost = new_rem > gap
        wins += int(won.sum())
        rem = new_rem[~(won | lost)]
        steps += 1
    return wins, 0


def simulate_end_to_end(cfg: SimConfig, k: int, workers: int = 1) -> SimReport:
    """Chain the three phases per trial and report the discard frequency.

    A trial wins outright when lead + confirmation count reaches k, and
    otherwise enters the renewal-granularity race for the leftover deficit.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    p = cfg.params
    d = derive(p)
    mu = _window_mu(cfg)
    # The two-arrival walk's ratio bounds the catch-up odds of both modes,
    # so it sets the abandonment barrier for the renewal race.
    ratio = d.bbar / d.abar if d.abar > 0 else 1.0
    gap = _loss_gap(ratio)

    def one(batch: int, n: int) -> tuple:
        rng = _stream(cfg.seed, _PHASE_E2E, batch)
        lead = _lead_chain(rng, n, cfg.warmup_blocks, p.beta, mu)
        conf = np.zeros(n, dtype=np.int64)
        for _ in range(k):
            conf += rng.geometric(p.alpha, n) - 1
            conf += rng.poisson(mu, n)
        deficit = k - lead - conf
        instant = int((deficit <= 0).sum())
        race_wins, truncated = _race_renewal(rng, deficit, p.beta, mu, gap, cfg.horizon)
        return instant + race_wins, truncated, np.bincount(lead), np.bincount(conf)

    parts = _map_batches(cfg.trials, one, workers)
    wins = sum(part[0] for part in parts)
    truncated = sum(part[1] for part in parts)
    _check_horizon(wins, truncated, cfg.trials)
    freq = wins / cfg.trials
    return SimReport(
        mode=cfg.mode,
        trials=cfg.trials,
        discard_freq=freq,
        stderr=math.sqrt(freq * (1.0 - freq) / cfg.trials),
        truncated_trials=truncated,
        lead_hist=EmpiricalPmf(counts=_merge_counts(part[2] for part in parts), trials=cfg.trials),
        conf_count_hist=EmpiricalPmf(counts=_merge_counts(part[3] for part in parts), trials=cfg.trials),
    )


# ---------------------------------------------------------------------------
# Raw-timeline reference implementation (tests only; slow but assumption-free)
# ---------------------------------------------------------------------------

def _trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random((seed * 1_000_003 + trial) & ((1 << 63) - 1))


def raw_timeline_lead_samples(
    params: ProtocolParams, mode: str, trials: int, renewals: int, seed: int = 0
) -> np.ndarray:
    """Sample the lead by walking an explicit arrival timeline.

    Starts at a renewal boundary (the previous jumper published exactly now),
    generates exponential arrival gaps, classifies jumpers by the
    at-least-delta-since-last-jumper rule, consumes each jumper's delay
    window arrival by arrival, and rebases the adversary whenever it falls
    behind the published chain.  One lead sample per trial, taken after
    ``renewals`` embedded-chain events.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    rigged = mode == RIGGED
    lam, delta, alpha = params.lam, params.delta, params.alpha
    out = np.empty(trials, dtype=np.int64)
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        last_jumper = -delta
        t_next = rng.expovariate(lam)
        honest_height = 0
        adv_height = 0
        renew = 0
        while renew < renewals:
            t = t_next
            honest = rng.random() < alpha
            t_next = t + rng.expovariate(lam)
            if honest:
                assert t >= last_jumper + delta, "non-jumper honest arrival escaped a window"
                last_jumper = t
                window_end = t + delta
                while t_next < window_end:
                    if rigged or rng.random() >= alpha:
                        # Credited to the adversary; mounts the fresh jumper
                        # if the private chain is not already past it.
                        adv_height = max(adv_height, honest_height + 1) + 1
                    elif not rigged:
                        pass  # honest fork inside the window, never extends the chain
                    t_next += rng.expovariate(lam)
                honest_height += 1
                adv_height = max(adv_height, honest_height)
            else:
                adv_height = max(adv_height, honest_height) + 1
            renew += 1
        out[trial] = adv_height - honest_height
    return out


def raw_timeline_jumper_counts(
    params: ProtocolParams, mode: str, n_jumpers: int, seed: int = 0
) -> np.ndarray:
    """Per-jumper adversary-credited arrival counts from one long timeline.

    Each entry covers the span between consecutive jumper publications, so
    the sequence should be i.i.d.; tests check both its marginal law and its
    lag-1 correlation.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    rigged = mode == RIGGED
    lam, delta, alpha = params.lam, params.delta, params.alpha
    rng = _trial_rng(seed, 0)
    counts = np.empty(n_jumpers, dtype=np.int64)
    filled = 0
    acc = 0
    last_jumper = -delta
    t_next = rng.expovariate(lam)
    while filled < n_jumpers:
        t = t_next
        honest = rng.random() < alpha
        t_next = t + rng.expovariate(lam)
        if honest:
            assert t >= last_jumper + delta
            last_jumper = t
            window_end = t + delta
            while t_next < window_end:
                if rigged or rng.random() >= alpha:
                    acc += 1
                t_next += rng.expovariate(lam)
            counts[filled] = acc
            filled += 1
            acc = 0
        else:
            acc += 1
    return counts
