"""Correlation measures for one-parameter Bell-diagonal states under dephasing.

The state family mixes two Bell projectors with weights (1 +/- c)/2.
Local pure dephasing leaves the populations alone and multiplies the two
coherences by a decoherence factor, e^-gamma when one qubit sees the
bath or e^-2*gamma when both do. Every correlation measure then reduces
to closed functions of c and the factor, built from the single map

    correlation_bits(x) = (1+x)/2 log2(1+x) + (1-x)/2 log2(1-x),

and classical correlations freeze at correlation_bits(c) exactly while
the factor stays at or above |c|. That is the regime of time-invariant
discord; once the factor dips below |c| the roles swap suddenly.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.special import xlogy

from .pulses import PulsedDecoherence, default_time_grid

_LN2 = math.log(2.0)


class NoiseSide(Enum):
    """Which qubits see the bath; the value is the exponent multiplier."""

    ONE_SIDED = 1
    TWO_SIDED = 2


@dataclass(frozen=True)
class BellDiagonalState:
    """Bell-projector mixture with weights (1 +/- c)/2; needs |c| < 1."""

    c: float

    def __post_init__(self):
        if not abs(self.c) < 1.0:
            raise ValueError(f"c must satisfy |c| < 1, got {self.c}")


def correlation_bits(x):
    """(1+x)/2 log2(1+x) + (1-x)/2 log2(1-x), with 0 log 0 = 0.

    Equals 1 - H2((1+x)/2) in bits: the information carried by a
    correlation amplitude x. Even in x; 0 at x = 0; 1 as |x| -> 1.
    """
    x = np.asarray(x, dtype=float)
    out = (xlogy(1.0 + x, 1.0 + x) + xlogy(1.0 - x, 1.0 - x)) / (2.0 * _LN2)
    return float(out) if out.ndim == 0 else out


def _check_factor(factor):
    f = float(factor)
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"factor must lie in [0, 1], got {factor}")
    return f


def decoherence_factor(gamma_value, side):
    """Coherence attenuation e^-gamma (one-sided) or e^-2*gamma (two-sided)."""
    g = float(gamma_value)
    if g < 0.0:
        raise ValueError(f"gamma_value must be nonnegative, got {gamma_value}")
    return math.exp(-side.value * g)


def mutual_information(state, factor):
    """Total correlations in bits at the given decoherence factor."""
    f = _check_factor(factor)
    return correlation_bits(state.c) + correlation_bits(f)


def classical_correlations(state, factor):
    """Classical correlations in bits, correlation_bits(max(factor, |c|))."""
    f = _check_factor(factor)
    return correlation_bits(max(f, abs(state.c)))


def discord(state, factor):
    """Quantum discord in bits: mutual information minus the classical part.

    Equals correlation_bits(c) exactly while factor >= |c| and
    correlation_bits(factor) once factor <= |c|.
    """
    return mutual_information(state, factor) - classical_correlations(state, factor)


def concurrence(state, gamma_value):
    """Entanglement under one-sided dephasing, directly off the exponent.

    (1/2) max{0, |f(1-c)| - 1 - c, |f(1+c)| - 1 + c} with f = e^-gamma;
    clips to zero (sudden death) once f < (1-c)/(1+c).
    """
    g = float(gamma_value)
    if g < 0.0:
        raise ValueError(f"gamma_value must be nonnegative, got {gamma_value}")
    c = state.c
    if not 0.0 <= c < 1.0:
        raise ValueError(f"c must lie in [0, 1) for concurrence, got {c}")
    f = math.exp(-g)
    return 0.5 * max(0.0,
                     abs(f * (1.0 - c)) - 1.0 - c,
                     abs(f * (1.0 + c)) - 1.0 + c)


@dataclass(frozen=True)
class CorrelationTrajectory:
    """Aligned time series of the exponent, factor, and correlation measures.

    concurrence is None under two-sided noise, where this state family
    admits no closed concurrence expression here.
    """

    times: np.ndarray
    gamma: np.ndarray
    factor: np.ndarray
    mutual_info: np.ndarray
    classical: np.ndarray
    discord: np.ndarray
    concurrence: Optional[np.ndarray]


def trajectory(spec, sched, state, side, grid=None):
    """Evaluate all correlation measures along a time grid.

    grid defaults to the schedule's sampling grid (uniform step plus
    both sides of each pulse instant) and must be ascending inside
    [0, horizon].
    """
    if grid is None:
        grid = default_time_grid(sched)
    times = np.asarray(grid, dtype=float)
    if times.size == 0:
        raise ValueError("grid must be nonempty")
    c = state.c
    if side is NoiseSide.ONE_SIDED and not 0.0 <= c < 1.0:
        raise ValueError(f"c must lie in [0, 1) for one-sided concurrence, got {c}")
    evaluator = PulsedDecoherence(spec, sched)
    gam = evaluator.gamma_grid(times)
    fac = np.exp(-side.value * gam)
    mutual = correlation_bits(c) + correlation_bits(fac)
    classical = correlation_bits(np.maximum(fac, abs(c)))
    disc = mutual - classical
    conc = None
    if side is NoiseSide.ONE_SIDED:
        one = np.exp(-gam)
        conc = 0.5 * np.maximum(0.0, np.maximum(
            np.abs(one * (1.0 - c)) - 1.0 - c,
            np.abs(one * (1.0 + c)) - 1.0 + c))
    return CorrelationTrajectory(times, gam, fac, mutual, classical, disc, conc)
