"""Flux inversion: from target Pauli coefficients to bias phases.

The forward map (composite assembly plus Schrieffer-Wolff) is smooth in
the biases but not convex, so inversion runs bound-constrained least
squares inside an annealing cell (one periodicity cell of the flux
landscape), with multi-starts and warm starts along a schedule.  The
pairwise variant splits the problem: each qubit is fit on its own
two-dimensional bias, then each coupler's x-bias is swept and bisected
until the pairwise coupling matches the target.  Junction-asymmetry
correction maps the symmetric-circuit solution onto asymmetric-junction
hardware in closed form.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq, least_squares

from .composite import (
    Topology,
    assemble_from_parts,
    element_parts,
    loaded_inductances,
    resolve_basis,
    resolve_truncations,
)
from .constants import mphi0_to_rad
from .elements import (
    KIND_COUPLER,
    KIND_QUBIT,
    FluxBias,
    build_element,
    persistent_current,
)
from .linalg import lowest_eigs
from .operators import BasisSpec, OperatorMatrix
from .pauli import (
    GaugeUndefinedError,
    PauliPoint,
    PauliSchedule,
    SwUndefinedError,
    full_sw,
    single_qubit_pauli,
)

TWO_PI = 2.0 * math.pi


class UnreachableCouplingError(RuntimeError):
    """Raised when a target coupling exceeds what the coupler cell can
    produce; carries the achievable maximum."""

    def __init__(self, message, achievable=None):
        super().__init__(message)
        self.achievable = achievable


class BranchError(ValueError):
    """Raised when the asymmetry correction has no solution on the
    current barrier branch (|cos(phi_x/2)| below the asymmetry floor)."""


# ---------------------------------------------------------------------------
# validity bound, degeneracy location, annealing cell


def validity_bound(params, phi_x, basis=None, resolution=1e-4, phi_z_cap=1.0):
    """Largest |phi_z| keeping opposite-sign persistent currents.

    Scans outward from the degeneracy point and bisects the first sign
    collapse of the projected PC eigenvalue pair.

    Arguments:
        params: qubit parameters.
        phi_x: barrier bias at which to evaluate, radians.
        basis: BasisSpec (qubit default if None).
        resolution: bisection width in radians.
        phi_z_cap: upper limit of the scan, radians.

    Returns:
        Bound in radians (phi_z_cap if validity never breaks below it).
    """
    basis = basis or BasisSpec()

    def valid(phi_z):
        h = build_element(params, FluxBias(phi_x, phi_z), basis)
        ip = persistent_current(params, FluxBias(phi_x, phi_z), basis)
        return single_qubit_pauli(h, ip).valid

    lo = 0.0
    hi = 0.01
    while hi <= phi_z_cap:
        if not valid(hi):
            break
        lo, hi = hi, hi * 2.0
    else:
        return phi_z_cap
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if valid(mid):
            lo = mid
        else:
            hi = mid
    return lo


_degeneracy_cache = {}


def coupler_degeneracy(params, basis=None, phi_x=1.5 * math.pi):
    """phi_z at which the coupler ground-state persistent current vanishes.

    Located by root finding on <ground|I_p|ground>(phi_z); zero for
    symmetric junctions. Cached per (params, basis, phi_x).

    Returns:
        Degeneracy phi_z in radians.
    """
    basis = basis or BasisSpec()
    key = (params, basis, round(phi_x, 12))
    if key in _degeneracy_cache:
        return _degeneracy_cache[key]

    def ground_pc(phi_z):
        h = build_element(params, FluxBias(phi_x, phi_z), basis)
        ip = persistent_current(params, FluxBias(phi_x, phi_z), basis)
        _, vecs = lowest_eigs(h.data, 1)
        g = vecs[:, 0]
        return float(np.real(g.conj() @ (ip.data @ g)))

    if abs(ground_pc(0.0)) < 1e-9:
        root = 0.0
    else:
        root = brentq(ground_pc, -0.5, 0.5, xtol=1e-12)
    _degeneracy_cache[key] = root
    return root


@dataclass(frozen=True)
class AnnealingCell:
    """Bias box for inversion: one periodicity cell of the flux landscape.

    Fields:
        qubit_phi_x: (lo, hi) bounds on qubit barrier bias, radians.
        coupler_phi_x: (lo, hi) bounds on coupler barrier bias, radians.
        qubit_phi_z_halfwidth: half-width of the qubit tilt box around
            its degeneracy; None computes the validity bound at the
            strongest barrier in the box (the tightest point of a
            standard anneal).
        coupler_phi_z: pinned coupler tilt; None locates the coupler
            degeneracy numerically.
    """

    qubit_phi_x: tuple = (0.0, TWO_PI)
    coupler_phi_x: tuple = (0.0, TWO_PI)
    qubit_phi_z_halfwidth: float = None
    coupler_phi_z: float = None

    def resolve(self, topology, basis=None):
        """Concrete per-element boxes and pins for a topology.

        Returns:
            dict with "phi_x_bounds" / "phi_z_bounds" (per element) and
            "coupler_phi_z" pins (per element, None for qubits).
        """
        phi_x_bounds = []
        phi_z_bounds = []
        pins = []
        zw_cache = {}
        for e in topology.elements:
            if e.kind == KIND_QUBIT:
                phi_x_bounds.append(self.qubit_phi_x)
                if self.qubit_phi_z_halfwidth is not None:
                    w = self.qubit_phi_z_halfwidth
                else:
                    kq = (e, resolve_basis(basis, KIND_QUBIT))
                    if kq not in zw_cache:
                        zw_cache[kq] = validity_bound(
                            e, self.qubit_phi_x[1], resolve_basis(basis, KIND_QUBIT)
                        )
                    w = zw_cache[kq]
                phi_z_bounds.append((-w, w))
                pins.append(None)
            else:
                phi_x_bounds.append(self.coupler_phi_x)
                if self.coupler_phi_z is not None:
                    pin = self.coupler_phi_z
                else:
                    pin = coupler_degeneracy(e, resolve_basis(basis, KIND_COUPLER))
                phi_z_bounds.append((pin, pin))
                pins.append(pin)
        return {
            "phi_x_bounds": tuple(phi_x_bounds),
            "phi_z_bounds": tuple(phi_z_bounds),
            "coupler_phi_z": tuple(pins),
        }


# ---------------------------------------------------------------------------
# cached forward evaluation


class CachedForward:
    """Forward map with per-element eigendata caching.

    A finite-difference Jacobian column perturbs one element's bias, so
    only that element is re-diagonalized; the other parts come from the
    cache.  The cache is unbounded but cleared per inversion point.
    """

    def __init__(self, topology, truncations=None, basis=None):
        self.topology = topology
        self.truncations = resolve_truncations(topology, truncations)
        self.basis = basis
        self.loads = loaded_inductances(topology)
        self.loaded_elements = tuple(
            replace(e, l=self.loads.loaded[i]) for i, e in enumerate(topology.elements)
        )
        self.bases = tuple(resolve_basis(basis, e.kind) for e in topology.elements)
        self._parts = {}
        self.n_evals = 0

    def clear(self):
        self._parts.clear()

    def parts(self, k, bias):
        key = (k, bias.phi_x, bias.phi_z)
        if key not in self._parts:
            self._parts[key] = element_parts(
                self.loaded_elements[k], bias, self.truncations[k], self.bases[k]
            )
            self.n_evals += 1
        return self._parts[key]

    def composite(self, biases):
        parts = [self.parts(k, b) for k, b in enumerate(biases)]
        return assemble_from_parts(self.topology, tuple(biases), self.loads, parts)

    def full_point(self, biases):
        return full_sw(self.composite(biases))

    def isolated_qubit(self, k, bias):
        """Single-qubit coefficients of element k in isolation (loaded)."""
        sub, _, pc = self.parts(k, bias)
        tag = f"iso#{k}"
        return single_qubit_pauli(
            OperatorMatrix(np.diag(sub.energies), tag), OperatorMatrix(pc, tag)
        )


# ---------------------------------------------------------------------------
# bias vector packing

_FD_STEP = 1e-4  # rad, absolute finite-difference step
_PENALTY = 1e3  # residual filler for SW-undefined trial points


class _BiasPacking:
    """Maps between optimizer vectors and per-element FluxBias tuples."""

    def __init__(self, topology, resolved_cell, pairwise_qubit=None):
        self.topology = topology
        self.cell = resolved_cell
        self.names = []
        self.lower = []
        self.upper = []
        self.slots = []  # (element, component) per variable
        for k, e in enumerate(topology.elements):
            if pairwise_qubit is not None and k != pairwise_qubit:
                continue
            lo_x, hi_x = resolved_cell["phi_x_bounds"][k]
            self.slots.append((k, "x"))
            self.names.append(f"element {k} phi_x")
            self.lower.append(lo_x)
            self.upper.append(hi_x)
            if e.kind == KIND_QUBIT:
                lo_z, hi_z = resolved_cell["phi_z_bounds"][k]
                self.slots.append((k, "z"))
                self.names.append(f"element {k} phi_z")
                self.lower.append(lo_z)
                self.upper.append(hi_z)

    @property
    def n_vars(self):
        return len(self.slots)

    def to_biases(self, x, base=None):
        """Expand a vector into per-element biases (pins filled in)."""
        phi_x = {}
        phi_z = {}
        for value, (k, comp) in zip(x, self.slots):
            if comp == "x":
                phi_x[k] = float(value)
            else:
                phi_z[k] = float(value)
        biases = []
        for k, e in enumerate(self.topology.elements):
            if k in phi_x:
                px = phi_x[k]
            elif base is not None:
                px = base[k].phi_x
            else:
                px = 0.5 * sum(self.cell["phi_x_bounds"][k])
            if e.kind == KIND_COUPLER:
                pz = self.cell["coupler_phi_z"][k]
            elif k in phi_z:
                pz = phi_z[k]
            elif base is not None:
                pz = base[k].phi_z
            else:
                pz = 0.0
            biases.append(FluxBias(phi_x=px, phi_z=pz))
        return tuple(biases)

    def from_biases(self, biases):
        out = []
        for k, comp in self.slots:
            out.append(biases[k].phi_x if comp == "x" else biases[k].phi_z)
        return np.array(out)

    def center(self):
        return 0.5 * (np.array(self.lower) + np.array(self.upper))

    def clip(self, x):
        return np.clip(x, self.lower, self.upper)

    def active_bounds(self, x, atol=1e-9):
        out = []
        for i, v in enumerate(x):
            if abs(v - self.lower[i]) < atol:
                out.append(f"{self.names[i]} at lower bound {self.lower[i]:.6g}")
            elif abs(v - self.upper[i]) < atol:
                out.append(f"{self.names[i]} at upper bound {self.upper[i]:.6g}")
        return out


@dataclass
class InversionResult:
    """Outcome of one inversion point.

    Fields:
        biases: per-element FluxBias (couplers carry their pinned tilt).
        cost: final sum of squared coefficient residuals, GHz^2.
        converged: cost below tolerance.
        active_bounds: human-readable list of box constraints the
            solution sits on (named when not converged).
        n_evals: forward-map evaluations spent.
        message: optimizer summary.
        extras: method-specific data (per-coupler sweep traces, ...).
    """

    biases: tuple
    cost: float
    converged: bool
    active_bounds: list
    n_evals: int
    message: str
    extras: dict = field(default_factory=dict)


def _residual_runner(fun, m):
    """Wrap a residual function so SW-undefined trials repel the optimizer."""

    def run(x):
        try:
            return fun(x)
        except (SwUndefinedError, GaugeUndefinedError):
            return np.full(m, _PENALTY)

    return run


def _fd_jacobian(run, lower, upper):
    cache = {}

    def jac(x):
        key = x.tobytes()
        if key in cache:
            r0 = cache[key]
        else:
            r0 = run(x)
            cache[key] = r0
        cols = []
        for i in range(len(x)):
            step = _FD_STEP
            if x[i] + step > upper[i]:
                step = -_FD_STEP
            x2 = x.copy()
            x2[i] += step
            cols.append((run(x2) - r0) / step)
        return np.column_stack(cols)

    return jac


def _run_starts(run, packing, starts, tol, max_nfev):
    best = None
    jac = _fd_jacobian(run, packing.lower, packing.upper)
    for x0 in starts:
        x0 = packing.clip(np.asarray(x0, dtype=float))
        res = least_squares(
            run,
            x0,
            jac=jac,
            bounds=(packing.lower, packing.upper),
            method="trf",
            xtol=1e-14,
            ftol=1e-14,
            gtol=None,
            max_nfev=max_nfev,
        )
        cost = float(2.0 * res.cost)  # plain sum of squares
        if best is None or cost < best[0]:
            best = (cost, res)
        if cost < tol:
            break
    return best


def _default_starts(packing, init, rng):
    starts = []
    if init is not None:
        starts.append(packing.from_biases(init))
    center = packing.center()
    starts.append(center)
    if rng is None:
        rng = np.random.default_rng(0)
    width = np.array(packing.upper) - np.array(packing.lower)
    starts.append(center + rng.uniform(-0.1, 0.1, size=packing.n_vars) * width)
    return starts[:3]


def invert_full(
    target,
    topology,
    cell=None,
    init=None,
    truncations=None,
    basis=None,
    rng=None,
    tol=1e-8,
    max_nfev=200,
    forward=None,
):
    """Solve for fluxes reproducing a target PauliPoint via the exact map.

    Bound-constrained least squares on the stacked coefficient residuals
    (h_x, h_z per qubit and J per targeted pair), with an absolute-step
    finite-difference Jacobian and up to three starts: the supplied
    init (warm start), the cell center, and a perturbed center.

    Arguments:
        target: PauliPoint with the desired coefficients (GHz).
        topology: circuit layout.
        cell: AnnealingCell (default cell if None).
        init: optional per-element FluxBias tuple used as first start.
        truncations/basis: forwarded to assembly.
        rng: numpy Generator for the perturbed start (seeded default).
        tol: convergence threshold on the summed squared residual, GHz^2.
        max_nfev: optimizer budget per start.
        forward: optional CachedForward to reuse across points.

    Returns:
        InversionResult; not-converged results name the active bounds
        (an infeasible tilt shows up as the qubit phi_z box).
    """
    cell = cell or AnnealingCell()
    resolved = cell.resolve(topology, basis)
    packing = _BiasPacking(topology, resolved)
    fwd = forward or CachedForward(topology, truncations, basis)
    pairs = sorted(target.j)

    def residuals(x):
        point = fwd.full_point(packing.to_biases(x))
        res = np.concatenate(
            [
                point.h_x - target.h_x,
                point.h_z - target.h_z,
                [point.j[p] - target.j[p] for p in pairs],
            ]
        )
        return res

    m = 2 * len(target.h_x) + len(pairs)
    run = _residual_runner(residuals, m)
    fwd.clear()
    cost, res = _run_starts(run, packing, _default_starts(packing, init, rng), tol, max_nfev)
    biases = packing.to_biases(res.x)
    converged = cost < tol
    active = packing.active_bounds(res.x)
    message = res.message if converged or not active else (
        res.message + "; active constraints: " + "; ".join(active)
    )
    return InversionResult(
        biases=biases,
        cost=cost,
        converged=converged,
        active_bounds=active,
        n_evals=fwd.n_evals,
        message=message,
    )


def _coupler_j(fwd, topology, c, qubit_biases_by_element, phi_xc, pin):
    """Pairwise coupling of coupler c at a trial x-bias (triple SW)."""
    biases = []
    for k, e in enumerate(topology.elements):
        if k == c:
            biases.append(FluxBias(phi_x=phi_xc, phi_z=pin))
        elif k in qubit_biases_by_element:
            biases.append(qubit_biases_by_element[k])
        else:
            biases.append(FluxBias(phi_x=0.0, phi_z=0.0))  # other couplers, unused
    point = full_sw(fwd.composite(tuple(biases)))
    return point.j[(0, 1)]


def invert_pairwise(
    target,
    topology,
    cell=None,
    init=None,
    truncations=None,
    basis=None,
    rng=None,
    tol=1e-8,
    max_nfev=100,
    j_tol=1e-3,
    sweep_step_mphi0=100.0,
):
    """Linear-scaling inversion: per-qubit fits plus coupler bias sweeps.

    Each qubit's (phi_x, phi_z) is fit against its isolated loaded
    single-qubit coefficients; then each coupler's phi_x is swept across
    its box in coarse flux steps and bisected until the triple-SW
    coupling matches the target to j_tol.  Coupler tilts stay pinned at
    degeneracy.

    Arguments:
        target: PauliPoint; J keys must match qubit pairs joined by
            couplers.
        sweep_step_mphi0: coarse sweep step in milli flux quanta.
        j_tol: coupling match tolerance, GHz.
        (others as invert_full)

    Returns:
        InversionResult; extras["coupler_sweep"] carries the sweep grid,
        couplings, and chosen bias per coupler.

    Raises:
        UnreachableCouplingError: target J outside the swept range; the
        error carries the achievable extreme.
    """
    cell = cell or AnnealingCell()
    resolved = cell.resolve(topology, basis)
    fwd = CachedForward(topology, truncations, basis)
    qubit_positions = topology.qubit_indices
    index_of = {k: i for i, k in enumerate(qubit_positions)}

    # per-qubit 2-variable fits
    qubit_biases = {}
    total_cost = 0.0
    active = []
    messages = []
    for k in qubit_positions:
        i = index_of[k]
        packing = _BiasPacking(topology, resolved, pairwise_qubit=k)

        def residuals(x, k=k, i=i):
            bias = packing.to_biases(x)[k]
            sq = fwd.isolated_qubit(k, bias)
            return np.array([sq.h_x - target.h_x[i], sq.h_z - target.h_z[i]])

        run = _residual_runner(residuals, 2)
        starts = _default_starts(
            packing, None if init is None else (init,), rng
        ) if init is None else _default_starts(packing, init, rng)
        cost, res = _run_starts(run, packing, starts, tol, max_nfev)
        total_cost += cost
        qubit_biases[k] = packing.to_biases(res.x)[k]
        active.extend(packing.active_bounds(res.x))
        messages.append(f"qubit {k}: {res.message}")

    # per-coupler sweep + bisection
    sweeps = {}
    step = mphi0_to_rad(sweep_step_mphi0)
    for c in topology.coupler_indices:
        neighbors = topology.coupler_neighbors(c)
        if len(neighbors) != 2:
            raise SwUndefinedError(
                f"pairwise inversion needs couplers with 2 qubit neighbors; "
                f"element {c} has {len(neighbors)}"
            )
        pair = (index_of[neighbors[0]], index_of[neighbors[1]])
        j_target = target.j.get(pair, 0.0)
        lo, hi = resolved["phi_x_bounds"][c]
        pin = resolved["coupler_phi_z"][c]

        mutual_of = {}
        for a, b, m in topology.mutuals:
            mutual_of[(a, b)] = m
            mutual_of[(b, a)] = m
        triple = Topology(
            elements=(
                topology.elements[neighbors[0]],
                topology.elements[c],
                topology.elements[neighbors[1]],
            ),
            mutuals=(
                (0, 1, mutual_of[(neighbors[0], c)]),
                (1, 2, mutual_of[(c, neighbors[1])]),
            ),
        )
        tr = None
        if truncations is not None:
            tr = resolve_truncations(topology, truncations)
            tr = (tr[neighbors[0]], tr[c], tr[neighbors[1]])
        tfwd = CachedForward(triple, tr, basis)
        tbias = {0: qubit_biases[neighbors[0]], 2: qubit_biases[neighbors[1]]}

        def j_of(phi_xc):
            return _coupler_j(tfwd, triple, 1, tbias, phi_xc, pin)

        grid = np.arange(lo, hi + 0.5 * step, step)
        grid[-1] = min(grid[-1], hi)
        j_grid = np.array([j_of(p) for p in grid])

        # park at the zero-coupling bias when no coupling is requested
        offset = j_grid - j_target
        bracket = None
        for a, b in zip(range(len(grid) - 1), range(1, len(grid))):
            if offset[a] == 0.0:
                bracket = (grid[a], grid[a])
                break
            if offset[a] * offset[b] <= 0.0:
                bracket = (grid[a], grid[b])
                break
        if bracket is None:
            idx = int(np.argmin(np.abs(offset)))
            if abs(offset[idx]) <= j_tol:
                bracket = (grid[idx], grid[idx])
            else:
                sign_ok = j_grid[np.sign(j_grid) == np.sign(j_target)]
                achievable = (
                    float(sign_ok[np.argmax(np.abs(sign_ok))]) if len(sign_ok) else 0.0
                )
                raise UnreachableCouplingError(
                    f"coupler {c}: target J={j_target:.6g} GHz outside the achievable "
                    f"range (extreme with matching sign: {achievable:.6g} GHz)",
                    achievable=achievable,
                )
        if bracket[0] == bracket[1]:
            phi_sol = float(bracket[0])
        else:
            phi_sol = brentq(
                lambda p: j_of(p) - j_target, bracket[0], bracket[1], xtol=1e-6
            )
        j_sol = j_of(phi_sol)
        if abs(j_sol - j_target) > j_tol:
            raise UnreachableCouplingError(
                f"coupler {c}: bisection stalled at J={j_sol:.6g} vs target "
                f"{j_target:.6g} GHz",
                achievable=j_sol,
            )
        sweeps[c] = {
            "grid": grid,
            "j": j_grid,
            "phi_x": phi_sol,
            "j_reached": float(j_sol),
        }
        total_cost += float((j_sol - j_target) ** 2)

    biases = []
    for k, e in enumerate(topology.elements):
        if e.kind == KIND_QUBIT:
            biases.append(qubit_biases[k])
        else:
            biases.append(FluxBias(phi_x=sweeps[k]["phi_x"], phi_z=resolved["coupler_phi_z"][k]))
    converged = total_cost < max(tol, len(sweeps) * j_tol**2 + tol)
    return InversionResult(
        biases=tuple(biases),
        cost=total_cost,
        converged=converged,
        active_bounds=active,
        n_evals=fwd.n_evals,
        message="; ".join(messages),
        extras={"coupler_sweep": sweeps},
    )


# ---------------------------------------------------------------------------
# schedules of bias points


@dataclass
class FluxScheduleTable:
    """Per-element bias phases along an anneal parameter grid.

    Fields:
        s: grid on [0, 1], shape (S,).
        phi_x, phi_z: (n_elements, S) arrays in radians.
    """

    s: np.ndarray
    phi_x: np.ndarray
    phi_z: np.ndarray

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        self.phi_x = np.atleast_2d(np.asarray(self.phi_x, dtype=float))
        self.phi_z = np.atleast_2d(np.asarray(self.phi_z, dtype=float))

    @property
    def n_elements(self):
        return self.phi_x.shape[0]

    @property
    def n_points(self):
        return len(self.s)

    def biases(self, idx):
        return tuple(
            FluxBias(phi_x=float(self.phi_x[k, idx]), phi_z=float(self.phi_z[k, idx]))
            for k in range(self.n_elements)
        )

    @classmethod
    def from_bias_points(cls, s, bias_points):
        n = len(bias_points[0])
        phi_x = np.array([[bp[k].phi_x for bp in bias_points] for k in range(n)])
        phi_z = np.array([[bp[k].phi_z for bp in bias_points] for k in range(n)])
        return cls(s=np.asarray(s, dtype=float), phi_x=phi_x, phi_z=phi_z)


def forward_schedule(topology, table, method="full", truncations=None, basis=None):
    """Map a flux schedule to a PauliSchedule point-by-point.

    Arguments:
        method: "full" or "pairwise".

    Returns:
        (PauliSchedule, diagnostics dict with per-point failures).
    """
    points = []
    failures = []
    fwd = CachedForward(topology, truncations, basis) if method == "full" else None
    for idx in range(table.n_points):
        biases = table.biases(idx)
        try:
            if method == "full":
                points.append(full_sw(fwd.composite(biases)))
            elif method == "pairwise":
                from .pauli import pairwise_sw

                points.append(pairwise_sw(topology, biases, truncations, basis))
            else:
                raise ValueError(f"unknown method {method!r}")
        except (SwUndefinedError, GaugeUndefinedError) as err:
            failures.append((idx, float(table.s[idx]), str(err)))
    if failures:
        return None, {"failures": failures}
    return PauliSchedule.from_points(table.s, points), {"failures": []}


def invert_schedule(
    target,
    topology,
    method="full",
    cell=None,
    truncations=None,
    basis=None,
    rng=None,
    tol=1e-8,
):
    """Invert a whole PauliSchedule, warm-starting along the grid.

    Returns:
        (FluxScheduleTable, list of per-point InversionResult).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    results = []
    bias_points = []
    prev = None
    fwd = CachedForward(topology, truncations, basis) if method == "full" else None
    for idx in range(target.n_points):
        point = target.point(idx)
        if method == "full":
            res = invert_full(
                point, topology, cell=cell, init=prev, truncations=truncations,
                basis=basis, rng=rng, tol=tol, forward=fwd,
            )
        elif method == "pairwise":
            res = invert_pairwise(
                point, topology, cell=cell, init=prev, truncations=truncations,
                basis=basis, rng=rng, tol=tol,
            )
        else:
            raise ValueError(f"unknown method {method!r}")
        results.append(res)
        bias_points.append(res.biases)
        prev = res.biases
    table = FluxScheduleTable.from_bias_points(target.s, bias_points)
    return table, results


# ---------------------------------------------------------------------------
# junction asymmetry


def asymmetry_residual(phi_x_sym, phi_x_asym, d):
    """Barrier-matching residual of the asymmetry correction.

    Zero when cos(phi_sym/2) equals the effective junction prefactor
    sign(cos)*sqrt(cos^2(phi_asym/2) + d^2 sin^2(phi_asym/2)) of the
    asymmetric pair.
    """
    c = math.cos(phi_x_asym / 2.0)
    s = math.sin(phi_x_asym / 2.0)
    return math.cos(phi_x_sym / 2.0) - math.copysign(
        math.sqrt(c * c + d * d * s * s), c
    )


def asymmetry_correct(phi_sym, d):
    """Map symmetric-junction biases onto an asymmetric-junction element.

    The x-bias is solved in closed form from
    sin^2(phi_asym/2) = sin^2(phi_sym/2) / (1 - d^2) on the matching
    barrier branch, then polished by bisection if floating-point
    residual exceeds 1e-13; the tilt is shifted by the junction phase
    arctan(d tan(phi_asym/2)).

    Arguments:
        phi_sym: FluxBias of the symmetric circuit, phi_x in [0, 2 pi].
        d: junction asymmetry, |d| < 1.

    Returns:
        FluxBias for the asymmetric circuit.

    Raises:
        BranchError: |cos(phi_sym/2)| < |d|; no solution on the branch.
    """
    if not -1.0 < d < 1.0:
        raise BranchError(f"asymmetry d must lie in (-1, 1), got {d}")
    if d == 0.0:
        return phi_sym
    v = math.cos(phi_sym.phi_x / 2.0)
    if v * v < d * d:
        raise BranchError(
            f"barrier bias unreachable with asymmetry d={d}: |cos(phi_x/2)|="
            f"{abs(v):.6g} is below the floor |d|={abs(d):.6g}"
        )
    s2 = (1.0 - v * v) / (1.0 - d * d)
    half = math.asin(min(1.0, math.sqrt(s2)))
    if v >= 0.0:
        phi_x_asym = 2.0 * half
    else:
        phi_x_asym = TWO_PI - 2.0 * half

    if abs(asymmetry_residual(phi_sym.phi_x, phi_x_asym, d)) > 1e-13:
        width = 1e-6

        def f(p):
            return asymmetry_residual(phi_sym.phi_x, p, d)

        lo, hi = phi_x_asym - width, phi_x_asym + width
        tries = 0
        while f(lo) * f(hi) > 0.0 and tries < 20:
            width *= 4.0
            lo, hi = phi_x_asym - width, phi_x_asym + width
            tries += 1
        if f(lo) * f(hi) > 0.0:
            raise BranchError(
                f"asymmetry root polish found no bracket near phi_x={phi_x_asym:.6g}"
            )
        phi_x_asym = brentq(f, lo, hi, xtol=1e-15)

    shift = math.atan(d * math.tan(phi_x_asym / 2.0))
    return FluxBias(phi_x=phi_x_asym, phi_z=phi_sym.phi_z - shift)


def correct_table(table, d):
    """Apply asymmetry_correct to every entry of a FluxScheduleTable."""
    phi_x = np.empty_like(table.phi_x)
    phi_z = np.empty_like(table.phi_z)
    for k in range(table.n_elements):
        for i in range(table.n_points):
            fb = asymmetry_correct(
                FluxBias(phi_x=float(table.phi_x[k, i]), phi_z=float(table.phi_z[k, i])), d
            )
            phi_x[k, i] = fb.phi_x
            phi_z[k, i] = fb.phi_z
    return FluxScheduleTable(s=table.s.copy(), phi_x=phi_x, phi_z=phi_z)
