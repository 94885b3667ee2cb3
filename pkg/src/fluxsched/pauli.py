"""Effective Pauli coefficients of circuit Hamiltonians.

The computational states of each qubit are the eigenstates of its
persistent-current operator projected onto the two lowest energy
eigenstates, with the gauge fixed so the off-diagonal Hamiltonian
element is real and non-negative.  Multi-qubit coefficients come from a
Schrieffer-Wolff rotation of the joint low-energy subspace onto the
product of single-qubit computational bases (couplers pinned to their
ground states); an exact linear-algebra shortcut expresses the rotated
block through the SVD of the basis-overlap matrix.
"""

import itertools
from dataclasses import dataclass, field, replace
from functools import reduce

import numpy as np
import scipy.linalg as sla

from .composite import (
    DEFAULT_TRUNCATION,
    LoadedInductances,
    Topology,
    assemble_from_parts,
    element_parts,
    loaded_inductances,
    resolve_basis,
)
from .elements import KIND_QUBIT, build_element, persistent_current
from .linalg import lowest_eigs
from .operators import OperatorMatrix


class SwUndefinedError(RuntimeError):
    """Raised when the low-energy subspace cannot be rotated onto the
    computational product basis (principal angle at or past 90 degrees,
    or a qubit without an opposite-sign persistent-current pair)."""


class GaugeUndefinedError(RuntimeError):
    """Raised when energy and persistent current are both degenerate, so
    no computational basis can be singled out."""


SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def pauli_string_matrix(string):
    """Dense matrix of a Pauli string like "XZI" (leftmost = qubit 0)."""
    try:
        mats = [SIGMA[ch] for ch in string]
    except KeyError as bad:
        raise ValueError(f"unknown Pauli label {bad} in {string!r}") from None
    return reduce(np.kron, mats)


@dataclass
class SingleQubitPauli:
    """Effective two-level description of one qubit at one bias point.

    Fields:
        h_x: transverse coefficient, GHz, >= 0 by gauge.
        h_z: longitudinal coefficient, GHz.
        valid: whether the two computational states carry opposite-sign
            persistent currents (the two-level picture is meaningful).
        energies: the two lowest circuit eigenvalues, GHz.
        pc_values: persistent-current eigenvalues in the qubit subspace,
            ascending, nA; the computational |0> is the first.
        basis: (dim, 2) gauge-fixed computational-state columns in the
            basis of the input operators.
        epsilon: identity coefficient (mean of the two energies), GHz.
    """

    h_x: float
    h_z: float
    valid: bool
    energies: np.ndarray
    pc_values: np.ndarray
    basis: np.ndarray
    epsilon: float


def single_qubit_pauli(h, ip):
    """Extract h_x and h_z of one qubit from its Hamiltonian and PC operator.

    Diagonalizes within the two lowest eigenstates of h, takes the
    persistent-current eigenstates there as computational states
    (ascending PC eigenvalue), and fixes the relative phase so that
    <0|H|1> is real and non-negative, which zeroes the sigma-y
    coefficient and keeps h_x continuous across a bias sweep.

    Arguments:
        h: element Hamiltonian (OperatorMatrix), GHz.
        ip: matching persistent-current operator, nA; must carry the
            same basis tag.

    Returns:
        SingleQubitPauli.

    Raises:
        BasisMismatchError: h and ip built in different bases.
        GaugeUndefinedError: doubly degenerate input (no energy
            splitting and no PC splitting).
    """
    h.require_same_basis(ip)
    vals, vecs = lowest_eigs(h.data, 2)
    ip_data = ip.data
    if not isinstance(ip_data, np.ndarray):
        ip_low = vecs.conj().T @ (ip_data @ vecs)
    else:
        ip_low = vecs.conj().T @ ip_data @ vecs
    ip_low = 0.5 * (ip_low + ip_low.conj().T)
    pc_vals, u = np.linalg.eigh(ip_low)

    if abs(vals[1] - vals[0]) < 1e-12 and abs(pc_vals[1] - pc_vals[0]) < 1e-9:
        raise GaugeUndefinedError(
            "energy and persistent current both degenerate; computational basis undefined"
        )

    u = u.astype(complex)
    h_eff = u.conj().T @ np.diag(vals) @ u
    off = h_eff[0, 1]
    if abs(off) > 0.0:
        u[:, 1] *= np.exp(-1j * np.angle(off))
        h_eff = u.conj().T @ np.diag(vals) @ u
    h_x = float(abs(h_eff[0, 1]))
    h_z = float(np.real(h_eff[0, 0] - h_eff[1, 1]) / 2.0)
    epsilon = float(np.real(h_eff[0, 0] + h_eff[1, 1]) / 2.0)
    valid = bool(pc_vals[0] < 0.0 < pc_vals[1])
    return SingleQubitPauli(
        h_x=h_x,
        h_z=h_z,
        valid=valid,
        energies=vals,
        pc_values=pc_vals,
        basis=vecs @ u,
        epsilon=epsilon,
    )


@dataclass
class PauliPoint:
    """All effective Pauli coefficients at one bias point.

    Fields:
        h_x, h_z: per-qubit arrays, GHz, qubit order = element order
            restricted to qubits.
        j: {(i, j): coefficient} for qubit pairs i < j, GHz.
        epsilon: identity coefficient, GHz.
        diagnostics: method-specific extras (overlap singular values,
            single-qubit validity flags, ...).
    """

    h_x: np.ndarray
    h_z: np.ndarray
    j: dict
    epsilon: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_qubits(self):
        return len(self.h_x)

    def coefficients(self):
        """Flat (name, value) list in a fixed order, for residuals/IO."""
        out = []
        for i in range(self.n_qubits):
            out.append((f"h_x_{i}", float(self.h_x[i])))
        for i in range(self.n_qubits):
            out.append((f"h_z_{i}", float(self.h_z[i])))
        for (i, k) in sorted(self.j):
            out.append((f"J_{i}_{k}", float(self.j[(i, k)])))
        return out


@dataclass
class PauliSchedule:
    """Pauli coefficients along a normalized anneal parameter grid.

    Fields:
        s: grid on [0, 1], shape (S,).
        h_x, h_z: (N, S) arrays, GHz.
        j: {(i, k): (S,) array} for qubit pairs i < k, GHz.
    """

    s: np.ndarray
    h_x: np.ndarray
    h_z: np.ndarray
    j: dict = field(default_factory=dict)

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        self.h_x = np.atleast_2d(np.asarray(self.h_x, dtype=float))
        self.h_z = np.atleast_2d(np.asarray(self.h_z, dtype=float))
        self.j = {pair: np.asarray(v, dtype=float) for pair, v in self.j.items()}

    @property
    def n_qubits(self):
        return self.h_x.shape[0]

    @property
    def n_points(self):
        return len(self.s)

    @property
    def pairs(self):
        return sorted(self.j)

    def point(self, idx):
        return PauliPoint(
            h_x=self.h_x[:, idx].copy(),
            h_z=self.h_z[:, idx].copy(),
            j={pair: float(v[idx]) for pair, v in self.j.items()},
        )

    @classmethod
    def from_points(cls, s, points):
        s = np.asarray(s, dtype=float)
        n = points[0].n_qubits
        h_x = np.stack([p.h_x for p in points], axis=1)
        h_z = np.stack([p.h_z for p in points], axis=1)
        pairs = sorted(points[0].j)
        j = {pair: np.array([p.j[pair] for p in points]) for pair in pairs}
        if h_x.shape[0] != n:
            raise ValueError("inconsistent qubit counts across points")
        return cls(s=s, h_x=h_x, h_z=h_z, j=j)


class SwContext:
    """Rotation data for one Schrieffer-Wolff extraction.

    Holds the computational product-basis isometry (b0), the low-energy
    eigenbasis isometry (b) with its energies, and the direct rotation
    c = b0^dag U_sw b obtained from the SVD of the overlap b0^dag b.
    """

    def __init__(self, composite, qubit_data, b0, b, energies, c, singular_values):
        self.composite = composite
        self.qubit_data = qubit_data
        self.b0 = b0
        self.b = b
        self.energies = energies
        self.c = c
        self.singular_values = singular_values

    @classmethod
    def from_composite(cls, composite, svd_tol=1e-8):
        """Build the rotation context from an assembled circuit.

        Raises:
            SwUndefinedError: a qubit lacks an opposite-sign PC pair at
                its bias, or the overlap between the low-energy subspace
                and the computational product basis is (numerically)
                rank-deficient, i.e. a principal angle reaches 90
                degrees.
        """
        topo = composite.topology
        qubit_positions = topo.qubit_indices
        n_q = len(qubit_positions)
        if n_q == 0:
            raise SwUndefinedError("topology contains no qubits")

        qubit_data = {}
        columns = []
        for k, sub in enumerate(composite.subsystems):
            if topo.elements[k].kind == KIND_QUBIT:
                sq = single_qubit_pauli(
                    OperatorMatrix(np.diag(sub.energies), composite.basis_tag + f"#{k}"),
                    OperatorMatrix(composite.pc_ops[k], composite.basis_tag + f"#{k}"),
                )
                if not sq.valid:
                    raise SwUndefinedError(
                        f"qubit at element {k} has no opposite-sign persistent-current "
                        f"pair at its bias (pc eigenvalues {sq.pc_values})"
                    )
                qubit_data[k] = sq
                columns.append(sq.basis)
            else:
                ground = np.zeros((sub.t, 1), dtype=complex)
                ground[0, 0] = 1.0
                columns.append(ground)

        b0 = reduce(np.kron, columns)
        n_low = 2**n_q
        energies, b = lowest_eigs(composite.h_total, n_low)
        overlap = b0.conj().T @ b
        w, sing, vh = np.linalg.svd(overlap)
        if sing.min() < svd_tol:
            raise SwUndefinedError(
                f"low-energy subspace nearly orthogonal to the computational "
                f"basis (min overlap singular value {sing.min():.2e})"
            )
        c = w @ vh
        return cls(composite, qubit_data, b0, b, energies, c, sing)

    @property
    def n_qubits(self):
        return len(self.qubit_data)

    def effective_hamiltonian(self):
        """The SW-rotated block in the computational product basis."""
        hq = self.c @ np.diag(self.energies.astype(complex)) @ self.c.conj().T
        return 0.5 * (hq + hq.conj().T)

    def coefficient(self, string):
        """Pauli coefficient Tr(H_q S)/2^N for an arbitrary string.

        Arguments:
            string: one letter of IXYZ per qubit, qubit order = element
                order restricted to qubits.
        """
        if len(string) != self.n_qubits:
            raise ValueError(f"string {string!r} does not match {self.n_qubits} qubits")
        hq = self.effective_hamiltonian()
        val = np.trace(hq @ pauli_string_matrix(string)) / 2**self.n_qubits
        return float(np.real(val))

    # The two methods below materialize full-dimension objects; they are
    # diagnostics for verifying the SVD shortcut, not production paths.

    def string_operator(self, string):
        """Full-dimension operator: Pauli string on the qubits' gauge
        bases tensored with coupler ground projectors."""
        topo = self.composite.topology
        mats = []
        pos = 0
        for k, sub in enumerate(self.composite.subsystems):
            if topo.elements[k].kind == KIND_QUBIT:
                g = self.qubit_data[k].basis
                mats.append(g @ SIGMA[string[pos]] @ g.conj().T)
                pos += 1
            else:
                p = np.zeros((sub.t, sub.t), dtype=complex)
                p[0, 0] = 1.0
                mats.append(p)
        return reduce(np.kron, mats)

    def u_sw_literal(self):
        """The full square-root-form SW unitary sqrtm((2P0-I)(2P-I))."""
        dim = self.composite.dim
        p0 = self.b0 @ self.b0.conj().T
        p = self.b @ self.b.conj().T
        r = (2.0 * p0 - np.eye(dim)) @ (2.0 * p - np.eye(dim))
        return sla.sqrtm(r)


def _pairs(n):
    return list(itertools.combinations(range(n), 2))


def full_sw(composite, ctx=None):
    """Exact effective Pauli coefficients of an assembled circuit.

    Rotates the 2^N lowest eigenstates onto the computational product
    basis and reads off single-qubit and sigma-z/sigma-z coefficients.
    Coefficients of other strings are available via SwContext.coefficient.

    Arguments:
        composite: CompositeHamiltonian from assemble_total.
        ctx: optional prebuilt SwContext (reuse when extracting several
            strings at one bias point).

    Returns:
        PauliPoint; diagnostics carry the minimum overlap singular value.
    """
    if ctx is None:
        ctx = SwContext.from_composite(composite)
    n = ctx.n_qubits
    hq = ctx.effective_hamiltonian()

    def coeff(string):
        val = np.trace(hq @ pauli_string_matrix(string)) / 2**n
        return float(np.real(val))

    def one_site(label, i):
        s = ["I"] * n
        s[i] = label
        return "".join(s)

    h_x = np.array([coeff(one_site("X", i)) for i in range(n)])
    h_z = np.array([coeff(one_site("Z", i)) for i in range(n)])
    j = {}
    for (i, k) in _pairs(n):
        s = ["I"] * n
        s[i] = "Z"
        s[k] = "Z"
        j[(i, k)] = coeff("".join(s))
    epsilon = coeff("I" * n)
    return PauliPoint(
        h_x=h_x,
        h_z=h_z,
        j=j,
        epsilon=epsilon,
        diagnostics={"sigma_min": float(ctx.singular_values.min())},
    )


def pairwise_sw(topology, biases, truncations=None, basis=None):
    """Linear-scaling approximate Pauli coefficients for larger circuits.

    Single-qubit coefficients come from each qubit in isolation but with
    its globally loaded inductance; every coupling coefficient comes
    from an exact SW on the qubit-coupler-qubit triple attached to that
    coupler.  The triple keeps the full circuit's loading and its
    interaction entries (so a shared qubit stays loaded by couplers
    outside the triple) and drops only the couplings to elements
    outside it.

    Arguments:
        topology: bipartite layout (couplers attach to exactly 2 qubits).
        biases: per-element FluxBias, element order.
        truncations/basis: forwarded to the triple assemblies.

    Returns:
        PauliPoint; diagnostics carry per-qubit validity flags.
    """
    biases = tuple(biases)
    loads = loaded_inductances(topology)
    lp = tuple(
        replace(e, l=loads.loaded[i]) for i, e in enumerate(topology.elements)
    )
    qubit_positions = topology.qubit_indices
    index_of = {k: i for i, k in enumerate(qubit_positions)}

    h_x = np.zeros(len(qubit_positions))
    h_z = np.zeros(len(qubit_positions))
    valid = []
    for i, k in enumerate(qubit_positions):
        b = resolve_basis(basis, KIND_QUBIT)
        h = build_element(lp[k], biases[k], b)
        ip = persistent_current(lp[k], biases[k], b)
        sq = single_qubit_pauli(h, ip)
        if not sq.valid:
            raise SwUndefinedError(
                f"qubit at element {k} has no opposite-sign persistent-current pair"
            )
        h_x[i], h_z[i] = sq.h_x, sq.h_z
        valid.append(sq.valid)

    mutual_of = {}
    for a, bb, m in topology.mutuals:
        mutual_of[(a, bb)] = m
        mutual_of[(bb, a)] = m

    def trunc_for(idx):
        if truncations is None:
            return DEFAULT_TRUNCATION[topology.elements[idx].kind]
        if isinstance(truncations, int):
            return truncations
        return truncations[idx]

    part_cache = {}

    def parts_for(idx):
        if idx not in part_cache:
            b = resolve_basis(basis, lp[idx].kind)
            part_cache[idx] = element_parts(lp[idx], biases[idx], trunc_for(idx), b)
        return part_cache[idx]

    j = {}
    for c in topology.coupler_indices:
        neighbors = topology.coupler_neighbors(c)
        if len(neighbors) != 2:
            raise SwUndefinedError(
                f"pairwise method needs couplers with exactly 2 qubit neighbors; "
                f"element {c} has {len(neighbors)}"
            )
        k, l = neighbors
        triple = Topology(
            elements=(topology.elements[k], topology.elements[c], topology.elements[l]),
            mutuals=((0, 1, mutual_of[(k, c)]), (1, 2, mutual_of[(c, l)])),
        )
        idx = (k, c, l)
        sel = np.ix_(idx, idx)
        sub_loads = LoadedInductances(
            l_b=loads.l_b[sel],
            l_b_inv=loads.l_b_inv[sel],
            loaded=tuple(loads.loaded[i] for i in idx),
            w_ghz=loads.w_ghz[sel],
        )
        comp = assemble_from_parts(
            triple,
            (biases[k], biases[c], biases[l]),
            sub_loads,
            [parts_for(i) for i in idx],
        )
        point = full_sw(comp)
        pair = (index_of[k], index_of[l])
        j[pair] = j.get(pair, 0.0) + point.j[(0, 1)]
    return PauliPoint(h_x=h_x, h_z=h_z, j=j, diagnostics={"qubit_valid": valid})
