"""Exactly solvable ladder equations for binary branching Brownian motion.

The one-point function here is the finite-horizon extinction
probability of a branching/dying particle system with exponential
clock rate gamma and offspring law (p_k).  For the binary law
p = (alpha, 0, beta) it satisfies the Riccati equation

    dA/dtau = gamma * (alpha - A + beta * A**2),    A(0) = 0,

whose solution this module provides three independent ways: in closed
form, by fixed-step RK4 integration of the general offspring ODE, and
by Picard iteration of the equivalent Volterra integral equation

    A(tau) = gamma*alpha * int_0^tau exp(-gamma*w) dw
           + gamma*beta  * int_0^tau exp(-gamma*w) * A(tau-w)**2 dw,

which sums the event-tree expansion order by order.  The same
convolution structure gives the dressed two-point function and its
spatially integrated mass curve, both solved by Picard iteration to a
fixed point.

Closed form: with s = |1 - 2*alpha| and beta = 1 - alpha,

    A(tau) = (1 - s * coth(s*gamma*tau/2 + artanh(s))) / (2*beta),

which degenerates to 1 - 2/(gamma*tau + 2) at alpha = 1/2 and to
1 - exp(-gamma*tau) at beta = 0.  (The textbook tanh form hides the
constant behind artanh of a number >= 1; the coth form above is the
real-valued rewrite and is what gets evaluated.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import GridTooNarrowError, retarded_propagator_heat

__all__ = [
    "FertilityDistribution",
    "SampledCurve",
    "SpaceTimeField",
    "StabilityViolationError",
    "NoConvergenceError",
    "one_point_closed_form",
    "one_point_ode",
    "one_point_picard",
    "extinction_probability",
    "mass_curve",
    "two_point_picard",
    "two_point_residual",
]


class StabilityViolationError(RuntimeError):
    """An ODE trajectory left the admissible band [0, 1]."""


class NoConvergenceError(RuntimeError):
    """Picard iteration failed to reach the requested tolerance."""


@dataclass(frozen=True)
class FertilityDistribution:
    """Offspring law (p_0, ..., p_K) of a dying particle."""

    p: tuple

    def __post_init__(self):
        probs = tuple(float(v) for v in self.p)
        if len(probs) == 0:
            raise ValueError("offspring law needs at least p_0")
        if any(v < 0 for v in probs):
            raise ValueError(f"offspring probabilities must be >= 0, got {probs}")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError(f"offspring probabilities must sum to 1, got sum {sum(probs)!r}")
        object.__setattr__(self, "p", probs)

    @classmethod
    def binary(cls, alpha: float) -> "FertilityDistribution":
        """Law (alpha, 0, 1 - alpha): a dying particle leaves 0 or 2 children."""
        alpha = float(alpha)
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        return cls((alpha, 0.0, 1.0 - alpha))

    def pgf(self, phi):
        """Probability generating function sum_k p_k * phi**k (Horner form)."""
        acc = 0.0 * phi  # preserves scalar/array shape
        for pk in reversed(self.p):
            acc = acc * phi + pk
        return acc


@dataclass(frozen=True)
class SampledCurve:
    """Values on the uniform time grid t0, t0 + step, ..."""

    t0: float
    step: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("values must be a non-empty 1-d array")
        if not np.all(np.isfinite(vals)):
            raise ValueError("curve values must be finite")
        if not self.step > 0:
            raise ValueError(f"step must be > 0, got {self.step}")
        vals.flags.writeable = False
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "values", vals)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.step * np.arange(self.values.size)

    def value_at(self, t):
        return np.interp(t, self.times, self.values)


def _validate_alpha_gamma(alpha, gamma):
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if not gamma > 0:
        raise ValueError(f"clock rate must be > 0, got {gamma}")


def one_point_closed_form(alpha: float, gamma: float, tau):
    """Extinction probability by time-to-horizon tau, binary offspring law.

    Accepts a scalar or array ``tau`` (all entries >= 0) and evaluates
    the coth form documented in the module docstring, with the
    alpha = 1/2 and beta = 0 limits on dedicated branches.
    """
    _validate_alpha_gamma(alpha, gamma)
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise ValueError("tau must be >= 0")
    alpha = float(alpha)
    beta = 1.0 - alpha
    if alpha == 0.0:
        out = np.zeros_like(tau_arr)
    elif beta == 0.0:
        out = -np.expm1(-gamma * tau_arr)
    elif alpha == 0.5:
        out = 1.0 - 2.0 / (gamma * tau_arr + 2.0)
    else:
        s = abs(1.0 - 2.0 * alpha)
        arg = 0.5 * s * gamma * tau_arr + math.atanh(s)
        out = (1.0 - s / np.tanh(arg)) / (2.0 * beta)
        out = np.where(tau_arr == 0.0, 0.0, out)
    if np.isscalar(tau) or np.ndim(tau) == 0:
        return float(out)
    return out


def extinction_probability(alpha: float) -> float:
    """Eventual extinction probability: alpha/(1-alpha) below 1/2, else 1."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if alpha < 0.5:
        return alpha / (1.0 - alpha)
    return 1.0


def _grid_count(t_max: float, step: float) -> int:
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step}")
    if not t_max > 0:
        raise ValueError(f"t_max must be > 0, got {t_max}")
    n = int(round(t_max / step))
    if n < 1:
        raise ValueError(f"grid needs at least one step ({t_max=}, {step=})")
    return n


def one_point_ode(
    fertility: FertilityDistribution,
    gamma: float,
    theta0: float,
    tau_max: float,
    step: float | None = None,
) -> SampledCurve:
    """RK4 solution of dphi/dt = gamma * (pgf(phi) - phi), phi(0) = theta0.

    theta0 is the weight counted per surviving particle, so theta0 = 0
    integrates the extinction probability and theta0 = 1 stays at 1.
    The default step 1e-3/gamma keeps the local error orders below the
    1e-8 agreement target with the closed form.  Trajectories must stay
    inside [-1e-9, 1 + 1e-9]; anything else raises
    StabilityViolationError.
    """
    if not gamma > 0:
        raise ValueError(f"clock rate must be > 0, got {gamma}")
    if not 0.0 <= theta0 <= 1.0:
        raise ValueError(f"theta0 must lie in [0, 1], got {theta0}")
    if step is None:
        step = 1e-3 / gamma
    n = _grid_count(tau_max, step)
    h = float(step)
    y = float(theta0)
    values = np.empty(n + 1)
    values[0] = y
    pgf = fertility.pgf
    for i in range(n):
        k1 = gamma * (pgf(y) - y)
        y2 = y + 0.5 * h * k1
        k2 = gamma * (pgf(y2) - y2)
        y3 = y + 0.5 * h * k2
        k3 = gamma * (pgf(y3) - y3)
        y4 = y + h * k3
        k4 = gamma * (pgf(y4) - y4)
        y = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        values[i + 1] = y
    if np.any(values < -1e-9) or np.any(values > 1.0 + 1e-9):
        raise StabilityViolationError(
            f"trajectory left [0, 1] (range [{values.min():g}, {values.max():g}]); "
            "reduce the step"
        )
    return SampledCurve(0.0, h, values)


def _volterra_conv(f: np.ndarray, q: np.ndarray, h: float) -> np.ndarray:
    # Trapezoid rule for int_0^{tau_i} f(w) q(tau_i - w) dw on a shared
    # uniform grid: full discrete convolution minus the half-weight end
    # corrections.
    n = f.size
    conv = np.convolve(f, q)[:n]
    return h * (conv - 0.5 * (f[0] * q + f * q[0]))


def one_point_picard(
    alpha: float,
    gamma: float,
    tau_max: float,
    order: int,
    step: float | None = None,
) -> SampledCurve:
    """Picard iterate of the one-point Volterra equation, binary law.

    Starting from the zero function, each iteration adds one more layer
    of event-tree topologies, so the iterates increase pointwise toward
    the closed form.  ``order`` counts applications of the map (order 1
    is the bare death integral alpha*(1 - exp(-gamma*tau))).  Integrals
    use the composite trapezoid rule; step <= 1e-3/gamma keeps the
    quadrature error around 1e-6.
    """
    _validate_alpha_gamma(alpha, gamma)
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if step is None:
        step = 1e-3 / gamma
    n = _grid_count(tau_max, step)
    h = float(step)
    taus = h * np.arange(n + 1)
    decay = np.exp(-gamma * taus)
    # cumulative trapezoid of gamma*alpha*exp(-gamma*w)
    base = np.concatenate(([0.0], np.cumsum(0.5 * h * (decay[1:] + decay[:-1]))))
    base *= gamma * alpha
    f = gamma * (1.0 - alpha) * decay
    a = np.zeros(n + 1)
    for _ in range(order):
        a = base + _volterra_conv(f, a * a, h)
    return SampledCurve(0.0, h, a)


def mass_curve(
    alpha: float,
    gamma: float,
    t_max: float,
    step: float | None = None,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> SampledCurve:
    """Fixed point of M(t) = exp(-gamma*t) + gamma*beta * (conv of
    exp(-gamma*w) with A*M), the spatial integral of the dressed
    two-point function.

    Iterates from M = exp(-gamma*t) until the sup-norm update drops
    below ``tol``; raises NoConvergenceError after ``max_iter`` rounds.
    """
    _validate_alpha_gamma(alpha, gamma)
    if step is None:
        step = 1e-3 / gamma
    n = _grid_count(t_max, step)
    h = float(step)
    times = h * np.arange(n + 1)
    base = np.exp(-gamma * times)
    a_curve = one_point_closed_form(alpha, gamma, times)
    f = gamma * (1.0 - alpha) * base
    m = base.copy()
    for _ in range(max_iter):
        m_next = base + _volterra_conv(f, a_curve * m, h)
        delta = float(np.max(np.abs(m_next - m)))
        m = m_next
        if delta < tol:
            return SampledCurve(0.0, h, m)
    raise NoConvergenceError(f"mass curve not converged after {max_iter} iterations (last update {delta:g})")


@dataclass(frozen=True)
class SpaceTimeField:
    """Real field on a uniform (t, x) grid, one spatial dimension.

    Time slices sit at t_step, 2*t_step, ... (the zero-time slice is a
    point mass and is not representable on a grid); the spatial grid is
    symmetric about 0 with an odd number of nodes.
    """

    t_step: float
    x_step: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2:
            raise ValueError("values must be 2-d (time, space)")
        if vals.shape[1] % 2 != 1:
            raise ValueError("spatial grid must be symmetric about 0 (odd node count)")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "t_step", float(self.t_step))
        object.__setattr__(self, "x_step", float(self.x_step))
        object.__setattr__(self, "values", vals)

    @property
    def times(self) -> np.ndarray:
        return self.t_step * np.arange(1, self.values.shape[0] + 1)

    @property
    def xs(self) -> np.ndarray:
        half = (self.values.shape[1] - 1) // 2
        return self.x_step * np.arange(-half, half + 1)

    def spatial_mass(self) -> np.ndarray:
        """Trapezoid integral over x of every time slice."""
        v = self.values
        return self.x_step * (v.sum(axis=1) - 0.5 * (v[:, 0] + v[:, -1]))


class _TwoPointOperator:
    """Discrete ladder map whose fixed point is the dressed two-point field."""

    def __init__(self, alpha, gamma, t_max, t_step, x_half_width, x_step):
        _validate_alpha_gamma(alpha, gamma)
        self.nt = _grid_count(t_max, t_step)
        self.k = float(t_step)
        half = int(round(x_half_width / x_step))
        if half < 1:
            raise ValueError("spatial grid needs at least one node on each side of 0")
        self.h = float(x_step)
        self.xs = self.h * np.arange(-half, half + 1)
        t_top = self.nt * self.k
        if half * self.h < 6.0 * math.sqrt(t_top):
            raise GridTooNarrowError(
                f"spatial half-width {half * self.h:g} must be >= 6*sqrt(t_max) = "
                f"{6.0 * math.sqrt(t_top):g}"
            )
        self.gamma = float(gamma)
        self.beta = 1.0 - float(alpha)
        times = self.k * np.arange(1, self.nt + 1)
        # Clock-dressed free propagator from the origin, sampled pointwise.
        self.base = np.array(
            [
                [retarded_propagator_heat((0.0, 0.0), (t, x), gamma) for x in self.xs]
                for t in times
            ]
        )
        self.a = one_point_closed_form(alpha, gamma, times)  # a[m-1] = A(m*k)
        self.decay = np.exp(-gamma * times)  # decay[w-1] = exp(-gamma*w*k)
        self.kern = [
            (2.0 * math.pi * w) ** -0.5 * np.exp(-(self.xs**2) / (2.0 * w)) for w in times
        ]

    def apply(self, field: np.ndarray) -> np.ndarray:
        out = self.base.copy()
        coeff = self.gamma * self.beta * self.k
        for j in range(1, self.nt + 1):
            # Trapezoid over the intermediate event time w in [0, j*k].
            # The w = 0 endpoint collapses the spatial kernel to the
            # identity; the w = j*k endpoint carries weight A(0) = 0.
            acc = 0.5 * self.a[j - 1] * field[j - 1]
            for m in range(1, j):
                w = j - m
                acc = acc + (
                    self.decay[w - 1]
                    * self.a[m - 1]
                    * self.h
                    * np.convolve(field[m - 1], self.kern[w - 1], mode="same")
                )
            out[j - 1] += coeff * acc
        return out


def two_point_picard(
    alpha: float,
    gamma: float,
    t_max: float,
    t_step: float,
    x_half_width: float,
    x_step: float,
    tol: float = 1e-8,
    max_iter: int = 10_000,
) -> SpaceTimeField:
    """Dressed two-point function of the binary model, d = 1.

    Solves D(t, x) = exp(-gamma*t) p_t(x) + gamma*beta * (ladder term)
    by Picard iteration from the free term until the sup-norm update is
    below ``tol``.  The spatial half-width must be at least
    6*sqrt(t_max) so that truncated Gaussian mass stays below 1e-8.
    Raises NoConvergenceError after ``max_iter`` sweeps.
    """
    op = _TwoPointOperator(alpha, gamma, t_max, t_step, x_half_width, x_step)
    field = op.base.copy()
    for _ in range(max_iter):
        nxt = op.apply(field)
        delta = float(np.max(np.abs(nxt - field)))
        field = nxt
        if delta < tol:
            return SpaceTimeField(op.k, op.h, field)
    raise NoConvergenceError(
        f"two-point field not converged after {max_iter} iterations (last update {delta:g})"
    )


def two_point_residual(field: SpaceTimeField, alpha: float, gamma: float) -> float:
    """Sup-norm defect |T(D) - D| of a candidate two-point field."""
    half = (field.values.shape[1] - 1) // 2
    op = _TwoPointOperator(
        alpha,
        gamma,
        t_max=field.t_step * field.values.shape[0],
        t_step=field.t_step,
        x_half_width=half * field.x_step,
        x_step=field.x_step,
    )
    return float(np.max(np.abs(op.apply(field.values) - field.values)))
