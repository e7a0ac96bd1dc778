"""Stochastic side of the library: path sampling and branching trees.

Everything is driven by explicitly derived random streams so that runs
are reproducible and replicas are independent work units:

* replica ``r`` of a run with seed ``s`` uses the generator
  ``PCG64(splitmix64(s + (r + 1) * 0x9E3779B97F4A7C15))`` (all mod
  2**64, splitmix64 being the standard 64-bit finalizer below);
* per-replica results are collected in replica order and reduced with
  numpy's pairwise summation, so the reported estimates do not depend
  on how the replicas were scheduled.

The branching simulator is event driven: every particle carries an
exponential lifetime, diffuses by exact Gaussian increments between
events, and is replaced at death by k children (drawn from the
offspring law) at its death position.  There is no time discretization
anywhere, so branching statistics carry Monte Carlo error only.

Within one replica the draw order is fixed and documented by the
implementations: the tree simulator draws, per event in time order,
the parent displacement, then the offspring count, then the children's
lifetimes, and finally one endpoint displacement per survivor in id
order; the mass-only simulator draws uniforms and exponentials in
fixed-size blocks (64, 256, 1024, 4096, 16384, then 65536 repeating).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .dyson import FertilityDistribution
from .kernels import SampledFunction

__all__ = [
    "PopulationExplosionError",
    "BranchingConfig",
    "Event",
    "PopulationSnapshot",
    "EventLog",
    "splitmix64",
    "derive_stream",
    "sample_brownian_path",
    "feynman_kac_estimate",
    "simulate_branching",
    "sample_extinction_times",
    "estimate_extinction",
    "estimate_generating_function",
    "estimate_mckean_product",
    "lifetime_ks",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class PopulationExplosionError(RuntimeError):
    """Live particle count exceeded the configured cap."""


def splitmix64(state: int) -> int:
    """Standard splitmix64 finalizer; bijective on 64-bit integers."""
    z = (state + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_stream(seed: int, replica: int = 0) -> np.random.Generator:
    """Independent generator for one replica of a seeded run.

    The PCG64 state is seeded with
    splitmix64(seed + (replica + 1) * 0x9E3779B97F4A7C15), so streams
    for different replicas never collide and a run is reproducible from
    (seed, replica) alone.
    """
    mixed = splitmix64((int(seed) + (int(replica) + 1) * _GOLDEN) & _MASK64)
    return np.random.Generator(np.random.PCG64(mixed))


def _mean_stderr(values: np.ndarray):
    values = np.asarray(values, dtype=float)
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, float("nan")
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def sample_brownian_path(x0, t: float, n_steps: int, seed: int, replica: int = 0) -> np.ndarray:
    """Brownian path from x0 over [0, t] at n_steps uniform increments.

    Returns an array of shape (n_steps + 1, d) whose first row is x0;
    increments are i.i.d. Gaussian with variance t/n_steps per
    coordinate.
    """
    if not t > 0:
        raise ValueError(f"duration must be > 0, got {t}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    start = np.atleast_1d(np.asarray(x0, dtype=float))
    rng = derive_stream(seed, replica)
    steps = rng.standard_normal((int(n_steps), start.size)) * math.sqrt(t / n_steps)
    path = np.empty((n_steps + 1, start.size))
    path[0] = start
    path[1:] = start + np.cumsum(steps, axis=0)
    return path


def feynman_kac_estimate(
    u: SampledFunction,
    v,
    t: float,
    x: float,
    replicas: int,
    n_steps: int,
    seed: int,
):
    """Monte Carlo value of E[ u(B_t) * exp(-int_0^t v(B_s) ds) ].

    ``v`` must accept a 1-d position array and return the potential at
    each point (bounded below); the exponent integral is a
    left-endpoint Riemann sum over the n_steps path increments, and
    ``u`` is evaluated by linear interpolation on its grid.  Returns
    (estimate, stderr).  One spatial dimension.
    """
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas}")
    x0 = float(np.asarray(x, dtype=float).reshape(()))
    dt = t / n_steps
    values = np.empty(replicas)
    for r in range(replicas):
        rng = derive_stream(seed, r)
        steps = rng.standard_normal(n_steps) * math.sqrt(dt)
        positions = x0 + np.cumsum(steps)
        visited = np.concatenate(([x0], positions[:-1]))
        exponent = dt * float(np.sum(np.asarray(v(visited), dtype=float)))
        values[r] = float(u(positions[-1])) * math.exp(-exponent)
    return _mean_stderr(values)


@dataclass(frozen=True)
class BranchingConfig:
    """Full specification of a branching run.

    gamma is the clock rate, fertility the offspring law, d the spatial
    dimension (1..3), x0 the common start point, and max_particles the
    live-population cap beyond which a tree counts as exploded.
    """

    gamma: float
    fertility: FertilityDistribution
    d: int = 1
    x0: tuple = (0.0,)
    max_particles: int = 1_000_000

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"clock rate must be > 0, got {self.gamma}")
        if not 1 <= self.d <= 3:
            raise ValueError(f"spatial dimension must be 1..3, got {self.d}")
        start = tuple(float(c) for c in np.atleast_1d(np.asarray(self.x0, dtype=float)))
        if len(start) != self.d:
            raise ValueError(f"x0 has dimension {len(start)}, expected {self.d}")
        if not all(math.isfinite(c) for c in start):
            raise ValueError("x0 must be finite")
        if self.max_particles < 1:
            raise ValueError(f"max_particles must be >= 1, got {self.max_particles}")
        object.__setattr__(self, "x0", start)

    @property
    def offspring_cdf(self) -> np.ndarray:
        cdf = np.cumsum(self.fertility.p)
        cdf[-1] = 1.0  # guard the top bin against rounding in the sum
        return cdf


@dataclass(frozen=True)
class Event:
    """One clock firing: the parent dies, children (possibly none) appear."""

    time: float
    kind: str  # "death" (no children) or "branch"
    parent: int
    children: tuple
    position: np.ndarray


@dataclass(frozen=True)
class PopulationSnapshot:
    time: float
    ids: tuple
    positions: np.ndarray  # shape (len(ids), d)


@dataclass(frozen=True)
class EventLog:
    """Chronological event list plus derived summaries of one tree."""

    events: list
    final: PopulationSnapshot
    sample_times: np.ndarray
    counts: np.ndarray  # live population at each sample time
    extinction_time: float = field(default=float("inf"))


def simulate_branching(
    config: BranchingConfig,
    horizon: float,
    sample_times=(),
    seed: int = 0,
    replica: int = 0,
) -> EventLog:
    """Exact event-driven branching tree up to ``horizon``.

    Each particle lives an independent Exp(gamma) lifetime and diffuses
    as a Brownian motion; at death it is replaced, at its death
    position, by k children drawn from the offspring law.  Positions
    are advanced by single Gaussian increments between birth and death
    (or horizon), which is exact in law.  Raises
    PopulationExplosionError when the live count passes
    config.max_particles.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    sample_times = np.asarray(sample_times, dtype=float)
    if sample_times.size and (sample_times.min() < 0 or sample_times.max() > horizon):
        raise ValueError("sample times must lie within [0, horizon]")
    rng = derive_stream(seed, replica)
    gamma = config.gamma
    cdf = config.offspring_cdf
    x0 = np.asarray(config.x0, dtype=float)

    births = {0: (0.0, x0)}
    spans = {}  # id -> (birth time, death time); survivors get inf
    heap = [(rng.standard_exponential() / gamma, 0)]
    next_id = 1
    live = 1
    events = []
    extinction_time = float("inf")

    while heap and heap[0][0] <= horizon:
        death_time, pid = heapq.heappop(heap)
        birth_time, birth_pos = births.pop(pid)
        displacement = rng.standard_normal(config.d) * math.sqrt(death_time - birth_time)
        pos = birth_pos + displacement
        k = int(np.searchsorted(cdf, rng.random(), side="right"))
        spans[pid] = (birth_time, death_time)
        children = tuple(range(next_id, next_id + k))
        for cid in children:
            births[cid] = (death_time, pos)
            heapq.heappush(heap, (death_time + rng.standard_exponential() / gamma, cid))
        next_id += k
        live += k - 1
        events.append(
            Event(death_time, "branch" if k else "death", pid, children, pos)
        )
        if live > config.max_particles:
            raise PopulationExplosionError(
                f"live population exceeded max_particles={config.max_particles} "
                f"at t={death_time:g}"
            )
        if live == 0:
            extinction_time = death_time
            break

    survivor_ids = tuple(sorted(births))
    positions = np.empty((len(survivor_ids), config.d))
    for row, sid in enumerate(survivor_ids):
        birth_time, birth_pos = births[sid]
        positions[row] = birth_pos + rng.standard_normal(config.d) * math.sqrt(
            horizon - birth_time
        )
        spans[sid] = (birth_time, float("inf"))

    if sample_times.size:
        starts = np.array([spans[i][0] for i in sorted(spans)])
        ends = np.array([spans[i][1] for i in sorted(spans)])
        counts = np.array(
            [int(np.sum((starts <= tau) & (ends > tau))) for tau in sample_times]
        )
    else:
        counts = np.zeros(0, dtype=int)

    return EventLog(
        events=events,
        final=PopulationSnapshot(float(horizon), survivor_ids, positions),
        sample_times=sample_times,
        counts=counts,
        extinction_time=extinction_time,
    )


# Fixed block schedule for the mass-only simulator; part of the
# reproducibility contract (changing it changes the draw sequence).
_BLOCK_SCHEDULE = (64, 256, 1024, 4096, 16384, 65536)


def _iter_blocks():
    yield from _BLOCK_SCHEDULE
    while True:
        yield _BLOCK_SCHEDULE[-1]


def _total_mass_run(gamma, cdf, horizon, cap, rng):
    """Jump chain of the live count only (no positions).

    The total population is a continuous-time branching walk: with n
    particles alive the next clock fires after Exp(n*gamma) and changes
    n by k - 1.  Returns (extinction_time, n_final, exploded) where
    extinction_time is inf unless the walk hit 0 within the horizon,
    n_final is the population at the horizon (or at the cap crossing),
    and exploded flags a cap crossing.  Draws per block: uniforms for
    the offspring counts first, then exponential spacings.
    """
    n = 1
    t = 0.0
    top = len(cdf) - 1
    for block in _iter_blocks():
        ks = np.searchsorted(cdf, rng.random(block), side="right")
        np.minimum(ks, top, out=ks)
        spacings = rng.standard_exponential(block)
        n_after = n + np.cumsum(ks - 1)
        n_before = np.concatenate(([n], n_after[:-1])).astype(float)
        with np.errstate(divide="ignore", invalid="ignore"):
            event_times = t + np.cumsum(spacings / (gamma * n_before))

        crossed = event_times > horizon
        died = n_after == 0
        burst = n_after > cap
        j_h = int(np.argmax(crossed)) if crossed.any() else block
        j_e = int(np.argmax(died)) if died.any() else block
        j_x = int(np.argmax(burst)) if burst.any() else block

        if j_h <= j_e and j_h <= j_x and j_h < block:
            # The next event would fire past the horizon.
            return float("inf"), int(n_before[j_h]), False
        if j_e <= j_x and j_e < block:
            return float(event_times[j_e]), 0, False
        if j_x < block:
            return float("inf"), int(n_after[j_x]), True
        n = int(n_after[-1])
        t = float(event_times[-1])


def sample_extinction_times(
    config: BranchingConfig, horizon: float, replicas: int, seed: int
) -> np.ndarray:
    """Extinction time of each replica (inf if alive at the horizon).

    Runs the mass-only jump chain per replica; a replica whose live
    count crosses config.max_particles is classified as never extinct,
    which biases the extinction estimate downward by at most the
    probability that a tree of cap size dies out (astronomically small
    for any generous cap in the subcritical-survival regime).
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas}")
    cdf = config.offspring_cdf
    times = np.empty(replicas)
    for r in range(replicas):
        rng = derive_stream(seed, r)
        t_ext, _, _ = _total_mass_run(config.gamma, cdf, horizon, config.max_particles, rng)
        times[r] = t_ext
    return times


def estimate_extinction(config: BranchingConfig, horizon: float, replicas: int, seed: int):
    """Fraction of replicas extinct by the horizon, with binomial stderr."""
    times = sample_extinction_times(config, horizon, replicas, seed)
    p_hat = float(np.mean(np.isfinite(times)))
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / replicas)
    return p_hat, stderr


def estimate_generating_function(
    config: BranchingConfig, theta: float, t: float, replicas: int, seed: int
):
    """Monte Carlo mean of theta**N_t over the total population N_t.

    0**0 counts as 1, so theta = 0 reproduces the finite-horizon
    extinction estimate.  Raises PopulationExplosionError if any
    replica crosses the population cap before t.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    cdf = config.offspring_cdf
    values = np.empty(replicas)
    for r in range(replicas):
        rng = derive_stream(seed, r)
        t_ext, n_final, exploded = _total_mass_run(
            config.gamma, cdf, t, config.max_particles, rng
        )
        if exploded:
            raise PopulationExplosionError(
                f"replica {r} exceeded max_particles={config.max_particles} before t={t:g}"
            )
        n = 0 if math.isfinite(t_ext) else n_final
        values[r] = float(theta) ** n  # 0.0**0 == 1.0
    return _mean_stderr(values)


def estimate_mckean_product(
    config: BranchingConfig, phi: SampledFunction, t: float, replicas: int, seed: int
):
    """Monte Carlo mean of prod_i phi(Y_i(t)) over surviving particles.

    ``phi`` must take values in [0, 1] on its grid; it is evaluated by
    linear interpolation, clamped to the edge values outside.  The
    empty product (extinct replica) counts as 1.  One spatial
    dimension.
    """
    if config.d != 1:
        raise ValueError("product functionals are supported in one spatial dimension only")
    if np.any(phi.values < 0.0) or np.any(phi.values > 1.0):
        raise ValueError("phi must take values in [0, 1]")
    values = np.empty(replicas)
    for r in range(replicas):
        log = simulate_branching(config, t, (), seed, replica=r)
        values[r] = float(np.prod(phi(log.final.positions[:, 0])))
    return _mean_stderr(values)


def lifetime_ks(times, rate: float):
    """Kolmogorov-Smirnov test of samples against Exp(rate).

    Returns (statistic, p_value) with the usual asymptotic Kolmogorov
    tail (Stephens' small-sample correction on the argument).
    """
    x = np.sort(np.asarray(times, dtype=float))
    n = x.size
    if n < 1:
        raise ValueError("need at least one sample")
    cdf = -np.expm1(-rate * x)
    d_plus = float(np.max(np.arange(1, n + 1) / n - cdf))
    d_minus = float(np.max(cdf - np.arange(0, n) / n))
    stat = max(d_plus, d_minus)
    lam = (math.sqrt(n) + 0.12 + 0.11 / math.sqrt(n)) * stat
    ks = np.arange(1, 101)
    p = 2.0 * float(np.sum((-1.0) ** (ks - 1) * np.exp(-2.0 * ks**2 * lam**2)))
    return stat, min(max(p, 0.0), 1.0)
