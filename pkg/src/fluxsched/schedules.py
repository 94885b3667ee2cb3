"""Customized Pauli-schedule families.

Four schedule generators, each returning a PauliSchedule sampled on a
caller-supplied grid of the normalized anneal parameter s in [0, 1]:

* gaussian_progression: fixed-gap single-qubit schedule whose mixing
  angle follows a pair of error-function ramps, producing two diabatic
  transitions and ground-state interference fringes versus anneal time.
* polynomial_rf: single-qubit reverse-forward polynomial, smoother in
  flux space than the Gaussian family; also a two-qubit variant whose
  dynamics reduces exactly to the single-qubit case on a Bell pair.
* lz_gadget: an n-qubit avoided-crossing gadget with a linear or a
  Grover-like (slow-near-the-gap) sweep.
* dqa_schedule: a two-qubit, two-segment schedule engineered to have
  two small, well-separated gap minima for diabatic annealing.

All coefficients are plain frequencies (GHz, energy over the Planck
constant); timescale estimates are in ns.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf

from .pauli import PauliSchedule


class ScheduleParameterError(ValueError):
    """Raised when schedule parameters violate their domain."""


@dataclass(frozen=True)
class GaussianProgressionParams:
    """Fixed-gap erf-ramp schedule.

    Fields:
        omega: half the (constant) qubit gap, GHz.
        steepness: ramp steepness (dimensionless, typically >> 1).
        mu: ramp positions at 1/2 -/+ mu; must lie in (0, 1/2).
    """

    omega: float
    steepness: float
    mu: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ScheduleParameterError(f"omega must be positive, got {self.omega}")
        if self.steepness <= 0:
            raise ScheduleParameterError(
                f"steepness must be positive, got {self.steepness}"
            )
        if not 0 < self.mu < 0.5:
            raise ScheduleParameterError(f"mu must lie in (0, 1/2), got {self.mu}")

    def theta(self, s):
        a, m = self.steepness, self.mu
        s = np.asarray(s, dtype=float)
        return (math.pi / 8.0) * (
            2.0 + erf(a * (s + m - 0.5)) + erf(a * (s - m - 0.5))
        )

    @property
    def t_osc(self):
        """Expected interference-fringe period in ns, 1/(4 omega mu)."""
        return 1.0 / (4.0 * self.omega * self.mu)

    @property
    def t_ad(self):
        """Adiabatic timescale in ns, steepness/(2 pi omega)."""
        return self.steepness / (2.0 * math.pi * self.omega)


def gaussian_progression(params, s_grid):
    """Single-qubit schedule h_x = omega cos(theta), h_z = omega sin(theta)."""
    s = np.asarray(s_grid, dtype=float)
    theta = params.theta(s)
    return PauliSchedule(
        s=s,
        h_x=params.omega * np.cos(theta)[None, :],
        h_z=params.omega * np.sin(theta)[None, :],
        j={},
    )


@dataclass(frozen=True)
class PolynomialRfParams:
    """Reverse-forward polynomial schedule.

    Fields:
        h: field strength, GHz (maximum qubit gap is 2h).
        p: polynomial power, integer >= 1.
    """

    h: float
    p: int

    def __post_init__(self):
        if self.h <= 0:
            raise ScheduleParameterError(f"h must be positive, got {self.h}")
        if not isinstance(self.p, int) or self.p < 1:
            raise ScheduleParameterError(f"p must be an integer >= 1, got {self.p}")

    @property
    def t_osc(self):
        """Empirical fringe period in ns, approximately 1/(2h)."""
        return 1.0 / (2.0 * self.h)

    @property
    def t_ad(self):
        """Adiabatic timescale in ns, p/(4h)."""
        return self.p / (4.0 * self.h)


def polynomial_rf(params, s_grid, bell=False):
    """Polynomial reverse-forward schedule.

    h_x(s) = h[1 - (2s-1)^p], h_z(s) = h(1-2s)^p.

    With bell=True, returns the two-qubit variant
    (h_x/2)(sigma^x_1 + sigma^x_2) + h_z sigma^z_1 sigma^z_2,
    whose dynamics on the Bell pair span{(|00>+|11>)/sqrt2,
    (|01>+|10>)/sqrt2} reproduces the single-qubit schedule exactly.
    """
    s = np.asarray(s_grid, dtype=float)
    u = 2.0 * s - 1.0
    h_x = params.h * (1.0 - u**params.p)
    h_z = params.h * (-u) ** params.p
    if not bell:
        return PauliSchedule(s=s, h_x=h_x[None, :], h_z=h_z[None, :], j={})
    half = 0.5 * h_x
    zeros = np.zeros_like(s)
    return PauliSchedule(
        s=s,
        h_x=np.vstack([half, half]),
        h_z=np.vstack([zeros, zeros]),
        j={(0, 1): h_z},
    )


@dataclass(frozen=True)
class LzGadgetParams:
    """Avoided-crossing gadget: h_x sum(sigma^x) + h_z(gamma sigma^z_1
    - sum sigma^z sigma^z), with gamma swept from -1 to +1.

    Fields:
        h_z: longitudinal scale, GHz.
        lam: ratio h_x/h_z, in (0, 1).
        sweep: "linear" (gamma = 2s-1) or "grover" (slows near gamma=0).
        n: chain length (default 2).
    """

    h_z: float
    lam: float
    sweep: str = "linear"
    n: int = 2

    def __post_init__(self):
        if self.h_z <= 0:
            raise ScheduleParameterError(f"h_z must be positive, got {self.h_z}")
        if not 0 < self.lam < 1:
            raise ScheduleParameterError(f"lam must lie in (0, 1), got {self.lam}")
        if self.sweep not in ("linear", "grover"):
            raise ScheduleParameterError(
                f"sweep must be 'linear' or 'grover', got {self.sweep!r}"
            )
        if self.n < 2:
            raise ScheduleParameterError(f"n must be >= 2, got {self.n}")

    @property
    def h_x(self):
        return self.lam * self.h_z

    def gamma(self, s):
        s = np.asarray(s, dtype=float)
        if self.sweep == "linear":
            return 2.0 * s - 1.0
        root = math.sqrt(self.lam**-4 - 1.0)
        return np.tan((2.0 * s - 1.0) * math.atan(root)) / root


def lz_gadget(params, s_grid):
    """Build the gadget schedule and its analytic gap report.

    Returns:
        (PauliSchedule, report) where report carries the exact 2-qubit
        crossing eigenvalues, the exact minimum gap, and its small-lam
        approximation 2 h_z lam^2; for n > 2 the report notes the
        lam^n gap scaling instead of a closed form.
    """
    s = np.asarray(s_grid, dtype=float)
    gamma = params.gamma(s)
    n = params.n
    h_x = np.tile(np.full_like(s, params.h_x), (n, 1))
    h_z = np.zeros((n, len(s)))
    h_z[0] = params.h_z * gamma
    j = {(l, l + 1): np.full_like(s, -params.h_z) for l in range(n - 1)}
    schedule = PauliSchedule(s=s, h_x=h_x, h_z=h_z, j=j)

    report = {
        "gap_approx": 2.0 * params.h_z * params.lam**2,
        "gap_scaling": f"lam^{n}",
    }
    if n == 2:
        hz, hx = params.h_z, params.h_x
        exact = math.sqrt(hz**2 + 4.0 * hx**2)
        report["crossing_eigenvalues"] = (-exact, -hz, hz, exact)
        report["gap_exact"] = exact - hz
    return schedule, report


@dataclass(frozen=True)
class DqaParams:
    """Two-qubit diabatic-annealing schedule parameters.

    Fields:
        s_1: breakpoint between the two schedule segments, in (0, 1).
        delta_1: engineered first minimum gap at s_1, GHz.
        h_x1, h_x2: transverse field scales, 0 < h_x1 < h_x2.
        h_z1, h_z2, j: problem coefficients with h_z1 < j < h_z2.
    """

    s_1: float
    delta_1: float
    h_x1: float
    h_x2: float
    h_z1: float
    h_z2: float
    j: float

    def __post_init__(self):
        if not 0 < self.s_1 < 1:
            raise ScheduleParameterError(f"s_1 must lie in (0, 1), got {self.s_1}")
        if not 0 < self.h_x1 < self.h_x2:
            raise ScheduleParameterError(
                f"need 0 < h_x1 < h_x2, got h_x1={self.h_x1}, h_x2={self.h_x2}"
            )
        if not self.h_z1 < self.j < self.h_z2:
            raise ScheduleParameterError(
                f"need h_z1 < j < h_z2, got h_z1={self.h_z1}, j={self.j}, "
                f"h_z2={self.h_z2}"
            )
        if not 0 < self.delta_1 < 2.0 * self.h_x1:
            raise ScheduleParameterError(
                f"need 0 < delta_1 < 2 h_x1, got delta_1={self.delta_1}"
            )

    def sweeps(self, s):
        """gamma_d1, gamma_d2, gamma_p on a grid (piecewise linear)."""
        s = np.asarray(s, dtype=float)
        ratio = self.delta_1 / (2.0 * self.h_x1)
        first = s <= self.s_1
        g_d1 = np.where(
            first,
            (ratio - 1.0) * s / self.s_1 + 1.0,
            ratio * (s - 1.0) / (self.s_1 - 1.0),
        )
        g_d2 = np.where(first, 1.0, (s - 1.0) / (self.s_1 - 1.0))
        g_p = np.where(first, 0.0, (s - self.s_1) / (1.0 - self.s_1))
        return g_d1, g_d2, g_p

    def delta_tilde(self, s):
        """Approximate gap with the first qubit's field switched off."""
        _, g_d2, g_p = self.sweeps(s)
        a = np.sqrt((g_p * (self.h_z2 + self.j)) ** 2 + (g_d2 * self.h_x2) ** 2)
        b = np.sqrt((g_p * (self.h_z2 - self.j)) ** 2 + (g_d2 * self.h_x2) ** 2)
        return a - b - 2.0 * g_p * self.h_z1


def dqa_schedule(params, s_grid):
    """Build the two-segment DQA schedule and its gap report.

    Returns:
        (PauliSchedule, report); the report locates the second-gap
        position s_star (root of the reduced gap on (s_1, 1]), the
        predicted second minimum gap 2 gamma_d1(s_star) h_x1, and the
        first-qubit sweep value at the breakpoint.
    """
    s = np.asarray(s_grid, dtype=float)
    g_d1, g_d2, g_p = params.sweeps(s)
    h_x = np.vstack([g_d1 * params.h_x1, g_d2 * params.h_x2])
    h_z = np.vstack([g_p * params.h_z1, g_p * params.h_z2])
    schedule = PauliSchedule(s=s, h_x=h_x, h_z=h_z, j={(0, 1): g_p * params.j})

    def f(x):
        return float(params.delta_tilde(x))

    lo = np.nextafter(params.s_1, 1.0)
    s_star = brentq(f, lo + 1e-9, 1.0, xtol=1e-12)
    g_d1_star = float(params.sweeps(s_star)[0])
    report = {
        "s_star": s_star,
        "gap_2_approx": 2.0 * g_d1_star * params.h_x1,
        "gamma_d1_at_s1": params.delta_1 / (2.0 * params.h_x1),
    }
    return schedule, report
