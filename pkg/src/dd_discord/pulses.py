"""Bang-bang pulse schedules and the pulse-controlled decoherence exponent.

A train of instantaneous pi pulses applied during pure dephasing flips
the sign of the system-bath coupling at each pulse. The controlled
exponent then follows from signed combinations of the free exponent
gamma0 evaluated at pulse instants, pairwise pulse gaps, and the
intervals elapsed since each pulse. Equivalently, the pulses act in
frequency space through a filter |y_n(omega t)|^2 on the bath spectrum.
Both routes are implemented: the signed sum is the production path, the
filter-function quadrature the independent oracle.
"""

import math
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral import DEFAULT_QUADRATURE, _tail_cutoff, gamma0, oscillatory_quad


@dataclass(frozen=True)
class PulseSchedule:
    """Strictly increasing pulse instants inside (0, horizon]."""

    instants: tuple
    horizon: float

    def __post_init__(self):
        if not self.horizon > 0.0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        inst = tuple(float(t) for t in self.instants)
        object.__setattr__(self, "instants", inst)
        if any(t <= 0.0 for t in inst):
            raise ValueError("pulse instants must be positive")
        if any(b <= a for a, b in zip(inst, inst[1:])):
            raise ValueError("pulse instants must be strictly increasing")
        if inst and inst[-1] > self.horizon:
            raise ValueError("pulse instants must not exceed the horizon")

    def __len__(self):
        return len(self.instants)

    def pulses_before(self, tau):
        """Number of pulses strictly earlier than tau.

        A query exactly at a pulse instant therefore belongs to the
        preceding branch; continuity makes the choice observationally
        irrelevant.
        """
        return bisect_left(self.instants, tau)


def periodic_schedule(delta_tau, horizon):
    """Equally spaced pulses t_n = n * delta_tau, as many as fit the horizon.

    delta_tau > horizon yields an empty schedule (free evolution over
    the same window).
    """
    if not delta_tau > 0.0:
        raise ValueError(f"delta_tau must be > 0, got {delta_tau}")
    if not horizon > 0.0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    count = int(math.floor(horizon / delta_tau))
    if (count + 1) * delta_tau <= horizon:  # floor landed one short
        count += 1
    while count > 0 and count * delta_tau > horizon:  # float overshoot
        count -= 1
    return PulseSchedule(tuple(n * delta_tau for n in range(1, count + 1)), horizon)


class PulsedDecoherence:
    """Controlled decoherence exponent for one bath and schedule.

    The schedule-only part of the signed expansion (single-instant and
    pairwise-gap terms) is accumulated once per pulse count at
    construction, so a query after n pulses costs n evaluations of
    gamma0 at the elapsed intervals. Instances are immutable after
    construction and safe to share across threads.
    """

    def __init__(self, spec, schedule):
        self.spec = spec
        self.schedule = schedule
        t = np.asarray(schedule.instants, dtype=float)
        count = t.size
        static = np.zeros(count + 1)
        if count:
            singles = np.atleast_1d(gamma0(spec, t))
            acc = 0.0
            for n in range(1, count + 1):
                inc = 2.0 * (-1.0) ** (n + 1) * singles[n - 1]
                if n > 1:
                    j = np.arange(1, n)
                    gaps = gamma0(spec, t[n - 1] - t[: n - 1])
                    inc += 4.0 * np.dot((-1.0) ** (n - 1 + j), gaps)
                acc += inc
                static[n] = acc
        self._instants = t
        self._static = static

    def _check(self, tau_min, tau_max):
        if tau_min < 0.0 or tau_max > self.schedule.horizon:
            raise ValueError(
                f"tau must lie in [0, {self.schedule.horizon}]")

    def gamma(self, tau):
        """Exponent at a single time (pulse instants use the earlier branch)."""
        tau = float(tau)
        self._check(tau, tau)
        n = bisect_left(self._instants, tau)
        value = self._static[n] + (-1.0) ** n * gamma0(self.spec, tau)
        if n:
            m = np.arange(1, n + 1)
            elapsed = np.atleast_1d(gamma0(self.spec, tau - self._instants[:n]))
            value += 2.0 * np.dot((-1.0) ** (m + n), elapsed)
        return max(float(value), 0.0)

    def gamma_grid(self, taus):
        """Vectorized exponent over an ascending time grid."""
        taus = np.asarray(taus, dtype=float)
        if taus.size == 0:
            return np.empty(0)
        if np.any(np.diff(taus) < 0.0):
            raise ValueError("grid must be ascending")
        self._check(float(taus[0]), float(taus[-1]))
        counts = np.searchsorted(self._instants, taus, side="left")
        out = np.empty_like(taus)
        for n in np.unique(counts):
            pick = counts == n
            pts = taus[pick]
            value = self._static[n] + (-1.0) ** n * gamma0(self.spec, pts)
            if n:
                m = np.arange(1, n + 1)
                elapsed = gamma0(self.spec, pts[:, None] - self._instants[:n])
                value = value + 2.0 * (elapsed @ ((-1.0) ** (m + n)))
            out[pick] = value
        return np.maximum(out, 0.0)


@lru_cache(maxsize=256)
def _cached_evaluator(spec, schedule):
    return PulsedDecoherence(spec, schedule)


def controlled_gamma(spec, sched, tau):
    """Pulse-controlled decoherence exponent at time tau.

    Piecewise in the number of elapsed pulses; reduces to gamma0 for an
    empty schedule and stays continuous across pulse instants.
    """
    return _cached_evaluator(spec, sched).gamma(tau)


def filter_function_sq(instants, tau, z):
    """Squared filter amplitude |y_n(z)|^2 for the pulses before tau.

    y_n(z) = 1 + (-1)^(n+1) e^(iz) + 2 sum_m (-1)^m e^(iz t_m / tau);
    with no pulses this reduces to 2 (1 - cos z), and y_n(0) = 0 for
    every n. The pulse fractions t_m / tau must lie inside (0, 1).
    z may be a scalar or an array of nonnegative phases.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0.0):
        raise ValueError("z must be nonnegative")
    inst = np.asarray(instants, dtype=float)
    n = inst.size
    if n:
        if not tau > 0.0:
            raise ValueError("tau must be positive when pulses are present")
        deltas = inst / tau
        if np.any((deltas <= 0.0) | (deltas >= 1.0)):
            raise ValueError("pulse fractions t_m/tau must lie in (0, 1)")
        signs = (-1.0) ** np.arange(1, n + 1)
        y = (1.0
             + (-1.0) ** (n + 1) * np.exp(1j * z)
             + 2.0 * np.exp(1j * np.multiply.outer(z, deltas)) @ signs)
    else:
        y = 1.0 - np.exp(1j * z)
    out = np.abs(y) ** 2
    return float(out) if out.ndim == 0 else out


def controlled_gamma_oracle(spec, sched, tau, cfg=DEFAULT_QUADRATURE):
    """Controlled exponent by quadrature of the filter-weighted spectrum.

    Integrates x^(s-2) e^-x |y_n(x tau)|^2 / 2 over frequency with the
    pulses that precede tau. Independent of the signed-sum path; used to
    cross-check it.
    """
    tau = float(tau)
    if tau < 0.0 or tau > sched.horizon:
        raise ValueError(f"tau must lie in [0, {sched.horizon}], got {tau}")
    if tau == 0.0:
        return 0.0
    s = spec.s
    prefix = np.asarray(sched.instants[: sched.pulses_before(tau)], dtype=float)
    n = prefix.size
    upper = _tail_cutoff(s - 2.0, cfg.abs_tol, 0.5 * (2.0 * n + 2.0) ** 2)
    deltas = prefix / tau
    end_sign = (-1.0) ** (n + 1)
    signs = (-1.0) ** np.arange(1, n + 1)

    def integrand(x):
        if x <= 0.0:
            return 0.0
        z = tau * x
        y = 1.0 + end_sign * complex(math.cos(z), math.sin(z))
        if n:
            y = y + 2.0 * np.dot(signs, np.exp(1j * z * deltas))
        return x ** (s - 2.0) * math.exp(-x) * 0.5 * abs(y) ** 2

    return oscillatory_quad(integrand, upper, tau, cfg, s=s, tau=tau)


def default_time_grid(schedule, step=None):
    """Sampling grid: uniform step plus both sides of every pulse instant.

    The default step is min(gap/20, 0.05) with gap the smallest pulse
    spacing, so the kinks at pulse instants are always bracketed; each
    instant appears once exactly and once nudged just past it, which
    makes branch continuity visible in sampled output.
    """
    horizon = schedule.horizon
    inst = np.asarray(schedule.instants, dtype=float)
    if step is None:
        step = 0.05
        if inst.size:
            gaps = np.diff(np.concatenate(([0.0], inst)))
            step = min(step, float(gaps.min()) / 20.0)
    if not step > 0.0:
        raise ValueError(f"step must be > 0, got {step}")
    count = max(1, int(round(horizon / step)))
    base = np.linspace(0.0, horizon, count + 1)
    if inst.size:
        base = np.concatenate([base, inst, np.nextafter(inst, np.inf)])
    grid = np.unique(base)
    return grid[(grid >= 0.0) & (grid <= horizon)]
