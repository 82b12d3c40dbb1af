"""Monte Carlo trial engine.

A trial samples one relay field, applies every requested policy and records
the chosen relay's worst-hop distance.  Rates are derived from those scores,
so one set of trials can be re-rated for any channel via
:meth:`TrialSet.with_channel`.

Trials are grouped into contiguous index chunks and may run in a process
pool; each trial owns its RNG stream, so output does not depend on the
number of workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .geometry import ALL_POLICIES, NetworkLayout, PolicyKind
from .metrics import ChannelSpec, Fading, _instantaneous, conditional_rate
from .spatialprocess import PppSpec, SeedSpec, make_rng, sample_disc_points

WORKERS_ENV = "RELAYSEL_WORKERS"


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    scores: dict
    rates: dict
    certificate: bool | None
    n_relays: int


@dataclass(frozen=True)
class EstimateWithError:
    mean: float
    std_error: float
    n: int

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("estimate needs n > 0")


@dataclass
class TrialSet:
    """Column-oriented trial results; indexing yields :class:`TrialRecord`.

    ``hops`` maps each policy to the (source-relay, relay-destination)
    distance arrays of its chosen relay.  ``fades`` is set only for the
    instantaneous-rate route.
    """

    layout: NetworkLayout
    channel: ChannelSpec
    policies: tuple
    n_relays: np.ndarray
    scores: dict
    hops: dict
    certificate: np.ndarray
    fades: np.ndarray | None = None
    rates: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.rates = {p: self._rate(p) for p in self.policies}

    def _rate(self, policy):
        if self.fades is None:
            return np.asarray(conditional_rate(self.channel, self.scores[policy]))
        fades = self.fades if self.channel.fading is Fading.RAYLEIGH else np.ones_like(self.fades)
        sr, rd = self.hops[policy]
        return np.asarray(_instantaneous(self.channel, sr, rd, fades[:, 0], fades[:, 1]))

    def with_channel(self, channel: ChannelSpec) -> "TrialSet":
        return TrialSet(self.layout, channel, self.policies, self.n_relays, self.scores,
                        self.hops, self.certificate, self.fades)

    def __len__(self) -> int:
        return len(self.n_relays)

    def __getitem__(self, k: int) -> TrialRecord:
        cert = bool(self.certificate[k]) if self.n_relays[k] >= 2 else None
        return TrialRecord(trial_id=int(k),
                           scores={p: float(self.scores[p][k]) for p in self.policies},
                           rates={p: float(self.rates[p][k]) for p in self.policies},
                           certificate=cert, n_relays=int(self.n_relays[k]))

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    @property
    def certified(self) -> np.ndarray:
        """Mask of trials with at least two relays and a true certificate."""
        return self.certificate & (self.n_relays >= 2)


def _simulate_chunk(layout: NetworkLayout, ppp: PppSpec, master_seed: int,
                    start: int, stop: int, draw_fades: bool):
    n = stop - start
    d = layout.d
    n_relays = np.zeros(n, dtype=np.int64)
    scores = np.full((len(ALL_POLICIES), n), np.inf)
    hops = np.full((len(ALL_POLICIES), 2, n), np.inf)
    cert = np.zeros(n, dtype=bool)
    fades = np.ones((n, 2)) if draw_fades else None
    mean = ppp.mean_count
    for i, k in enumerate(range(start, stop)):
        rng = make_rng(SeedSpec(master_seed, k))
        m = int(rng.poisson(mean))
        pts = sample_disc_points(rng, m, ppp.window_radius, ppp.region)
        if draw_fades:
            fades[i] = rng.exponential(1.0, 2)
        n_relays[i] = m
        if m == 0:
            continue  # empty window: infinite score, zero rate
        x, y = pts[:, 0], pts[:, 1]
        y2 = y * y
        ds2 = (x + d) ** 2 + y2
        dd2 = (x - d) ** 2 + y2
        s2 = np.maximum(ds2, dd2)
        r2 = x * x + y2
        for j, key in enumerate((s2, r2, ds2, dd2)):
            idx = int(np.argmin(key))
            hops[j, 0, i] = math.sqrt(ds2[idx])
            hops[j, 1, i] = math.sqrt(dd2[idx])
            scores[j, i] = math.sqrt(s2[idx])
        if m >= 2:
            first, second = np.argpartition(r2, 1)[:2]
            if r2[second] < r2[first] or (r2[second] == r2[first] and second < first):
                first, second = second, first
            cert[i] = s2[first] <= d * d + r2[second]
    return n_relays, scores, hops, cert, fades


def _chunks(n: int, parts: int):
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    return max(1, int(raw)) if raw else 1


def run_trials(layout: NetworkLayout, ppp: PppSpec, channel: ChannelSpec,
               policies=ALL_POLICIES, n_trials: int = 100_000, master_seed: int = 0,
               workers: int | None = None, instantaneous: bool = False) -> TrialSet:
    """Run ``n_trials`` independent topologies; trial ``k`` uses stream ``k``.

    With ``instantaneous=True`` each trial also draws one fading state per
    hop (unit-mean exponential for Rayleigh, unit gains otherwise) and rates
    are the instantaneous min-of-hops rates instead of fading averages.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    policies = tuple(PolicyKind(p) for p in policies)
    workers = default_workers() if workers is None else max(1, int(workers))
    draw_fades = bool(instantaneous)
    jobs = _chunks(n_trials, min(workers * 4, n_trials) if workers > 1 else 1)
    args = [(layout, ppp, master_seed, a, b, draw_fades) for a, b in jobs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_chunk, *zip(*args)))
    else:
        parts = [_simulate_chunk(*a) for a in args]

    n_relays = np.concatenate([p[0] for p in parts])
    all_scores = np.concatenate([p[1] for p in parts], axis=1)
    all_hops = np.concatenate([p[2] for p in parts], axis=2)
    cert = np.concatenate([p[3] for p in parts])
    fades = np.concatenate([p[4] for p in parts]) if draw_fades else None
    pos = {p: j for j, p in enumerate(ALL_POLICIES)}
    return TrialSet(
        layout=layout, channel=channel, policies=policies, n_relays=n_relays,
        scores={p: all_scores[pos[p]] for p in policies},
        hops={p: (all_hops[pos[p], 0], all_hops[pos[p], 1]) for p in policies},
        certificate=cert, fades=fades)


def estimate_average_rate(records: TrialSet, policy: PolicyKind) -> EstimateWithError:
    r = np.asarray(records.rates[PolicyKind(policy)])
    n = len(r)
    if n == 0:
        raise ValueError("no records")
    if n == 1 or np.ptp(r) == 0:
        se = 0.0
    else:
        se = float(np.std(r, ddof=1) / math.sqrt(n))
    return EstimateWithError(float(np.mean(r)), se, n)


def estimate_outage(records: TrialSet, policy: PolicyKind, rho: float) -> EstimateWithError:
    r = np.asarray(records.rates[PolicyKind(policy)])
    n = len(r)
    if n == 0:
        raise ValueError("no records")
    p = float(np.mean(r <= rho))
    return EstimateWithError(p, math.sqrt(p * (1.0 - p) / n), n)


def ks_distance(samples, cdf) -> float:
    """Kolmogorov distance between the ECDF of ``samples`` and a vectorized ``cdf``."""
    x = np.asarray(samples, dtype=float)
    return float(stats.kstest(x, cdf).statistic)


def snr_at_outage(snr_db, outage, target: float = 0.01) -> float:
    """First SNR where ``outage`` falls to ``target``, interpolated linearly in log-outage.

    Returns NaN when the curve never reaches the target.
    """
    snr_db = np.asarray(snr_db, dtype=float)
    lo = np.log(np.maximum(np.asarray(outage, dtype=float), 1e-300))
    goal = math.log(target)
    hits = np.nonzero(lo <= goal)[0]
    if len(hits) == 0:
        return float("nan")
    i = int(hits[0])
    if i == 0:
        return float(snr_db[0])
    x0, x1, y0, y1 = snr_db[i - 1], snr_db[i], lo[i - 1], lo[i]
    return float(x0 + (goal - y0) * (x1 - x0) / (y1 - y0))
