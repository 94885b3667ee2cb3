"""Assembly of multi-element circuits in truncated eigenbases.

Elements couple only through mutual inductances between their node-1
branches.  The branch inductance matrix determines both the loading of
each element (its self-inductance is renormalized by the neighbors) and
the pairwise interaction coefficients; each loaded element is
diagonalized on its own, truncated to a handful of eigenstates, and the
interaction is rotated into the product of those eigenbases.
"""

from dataclasses import dataclass, replace
from functools import reduce

import numpy as np

from .constants import H_PLANCK, PHI_0_BAR
from .elements import (
    KIND_COUPLER,
    KIND_QUBIT,
    CircuitElementParams,
    FluxBias,
    build_element,
    element_dim,
    node_phase,
    persistent_current,
)
from .linalg import lowest_eigs
from .operators import BasisSpec, OperatorMatrix, hermitize


class TopologyError(ValueError):
    """Raised for ill-formed element/coupling layouts."""


DEFAULT_TRUNCATION = {KIND_QUBIT: 5, KIND_COUPLER: 4}


def default_basis(kind):
    """Stock basis cutoffs: 12 oscillator levels and charge cutoff 10
    for qubits, 15 oscillator levels for couplers."""
    if kind == KIND_QUBIT:
        return BasisSpec(n_max=12, q_max=10)
    return BasisSpec(n_max=15, q_max=0)


def resolve_basis(basis, kind):
    if basis is None:
        return default_basis(kind)
    if isinstance(basis, BasisSpec):
        return basis
    return basis[kind]


@dataclass(frozen=True)
class Topology:
    """Circuit layout: an ordered element list plus mutual inductances.

    Arguments:
        elements: tuple of CircuitElementParams in a fixed order; the
            order defines every other per-element sequence in the
            package.
        mutuals: tuple of (k, l, M_pH) triples, one per inductively
            coupled element pair, k < l.  The sign of M is physical:
            same-sign mutuals on a qubit-coupler-qubit path give a
            ferromagnetic effective interaction.
    """

    elements: tuple
    mutuals: tuple

    def __post_init__(self):
        n = len(self.elements)
        if n == 0:
            raise TopologyError("topology needs at least one element")
        seen = set()
        for k, l, m in self.mutuals:
            if not (0 <= k < n and 0 <= l < n):
                raise TopologyError(f"mutual ({k},{l}) outside 0..{n - 1}")
            if k == l:
                raise TopologyError(f"self-mutual on element {k}")
            pair = (min(k, l), max(k, l))
            if pair in seen:
                raise TopologyError(f"duplicate mutual for pair {pair}")
            seen.add(pair)
            del m

    @property
    def n_elements(self):
        return len(self.elements)

    @property
    def qubit_indices(self):
        return tuple(i for i, e in enumerate(self.elements) if e.kind == KIND_QUBIT)

    @property
    def coupler_indices(self):
        return tuple(i for i, e in enumerate(self.elements) if e.kind == KIND_COUPLER)

    def coupler_neighbors(self, c):
        """Qubit indices inductively attached to coupler c."""
        out = []
        for k, l, _ in self.mutuals:
            if k == c and self.elements[l].kind == KIND_QUBIT:
                out.append(l)
            elif l == c and self.elements[k].kind == KIND_QUBIT:
                out.append(k)
        return tuple(sorted(out))


def single_qubit_topology(params):
    return Topology(elements=(params,), mutuals=())


def pair_topology(qubit0, coupler, qubit1, m0=65.0, m1=65.0):
    """Qubit-coupler-qubit cell with the given mutuals in pH."""
    return Topology(elements=(qubit0, coupler, qubit1), mutuals=((0, 1, m0), (1, 2, m1)))


def chain_topology(qubits, couplers, mutual=65.0):
    """Linear chain q0-c0-q1-c1-... with one mutual value throughout."""
    if len(couplers) != len(qubits) - 1:
        raise TopologyError("a chain of n qubits needs n-1 couplers")
    elements = []
    for i, q in enumerate(qubits):
        elements.append(q)
        if i < len(couplers):
            elements.append(couplers[i])
    mutuals = tuple((i, i + 1, mutual) for i in range(len(elements) - 1))
    return Topology(elements=tuple(elements), mutuals=mutuals)


@dataclass
class LoadedInductances:
    """Branch inductance data of a topology.

    Fields:
        l_b: branch inductance matrix in pH (diagonal: bare element
            inductances; off-diagonal: minus the mutuals).
        l_b_inv: its inverse in 1/pH.
        loaded: per-element loaded inductance 1/(L_b^-1)_kk in pH.
        w_ghz: symmetric interaction coefficient table in GHz; entry
            (k, l) multiplies phi1_k * phi1_l in the assembled
            Hamiltonian.  Diagonal entries are zero.
    """

    l_b: np.ndarray
    l_b_inv: np.ndarray
    loaded: tuple
    w_ghz: np.ndarray


def loaded_inductances(topology):
    """Loading and interaction coefficients from the branch inductances.

    Raises:
        TopologyError: if the branch matrix is not positive definite.
    """
    n = topology.n_elements
    l_b = np.zeros((n, n))
    for i, e in enumerate(topology.elements):
        l_b[i, i] = e.l
    for k, l, m in topology.mutuals:
        l_b[k, l] = -m
        l_b[l, k] = -m
    try:
        np.linalg.cholesky(l_b)
    except np.linalg.LinAlgError:
        raise TopologyError("branch inductance matrix is not positive definite") from None
    l_b_inv = np.linalg.inv(l_b)
    loaded = tuple(1.0 / l_b_inv[i, i] for i in range(n))
    # (Phi_0/2pi)^2 * (L_b^-1)_kl with L in pH, expressed in GHz
    scale = PHI_0_BAR**2 * 1e12 / H_PLANCK / 1e9
    w_ghz = scale * l_b_inv
    np.fill_diagonal(w_ghz, 0.0)
    return LoadedInductances(l_b=l_b, l_b_inv=l_b_inv, loaded=loaded, w_ghz=w_ghz)


def loaded_params(topology):
    """Element parameters with self-inductances replaced by loaded values."""
    loads = loaded_inductances(topology)
    return tuple(
        replace(e, l=loads.loaded[i]) for i, e in enumerate(topology.elements)
    )


@dataclass
class TruncatedSubsystem:
    """Low-energy eigendata of one diagonalized element.

    Fields:
        energies: first t eigenvalues, ascending, GHz.
        isometry: (parent_dim, t) matrix of eigenvectors as columns.
        basis: tag of the parent basis the columns are expressed in.
    """

    energies: np.ndarray
    isometry: np.ndarray
    basis: str

    @property
    def t(self):
        return len(self.energies)

    def rotate(self, op):
        """Project a parent-basis operator onto the kept eigenstates."""
        return self.isometry.conj().T @ (op @ self.isometry)


def truncate_subsystem(h, t):
    """Diagonalize an element Hamiltonian and keep its first t states.

    Arguments:
        h: OperatorMatrix from build_csfq/build_coupler.
        t: number of eigenstates to keep, 1 <= t <= dim.

    Returns:
        TruncatedSubsystem tagged with h's basis.
    """
    if not 1 <= t <= h.dim:
        raise TopologyError(f"truncation {t} outside 1..{h.dim}")
    vals, vecs = lowest_eigs(h.data, t)
    return TruncatedSubsystem(energies=vals, isometry=vecs, basis=h.basis)


@dataclass
class CompositeHamiltonian:
    """Joint Hamiltonian of a topology in the truncated product basis.

    Fields:
        h_total: dense Hermitian matrix of dimension prod(t_k), GHz.
        subsystems: per-element TruncatedSubsystem (loaded, at bias).
        phi_ops: per-element rotated node-1 phase operators (t_k, t_k).
        pc_ops: per-element rotated persistent-current operators, nA.
        loads: LoadedInductances of the topology.
    """

    topology: Topology
    biases: tuple
    h_total: np.ndarray
    subsystems: tuple
    phi_ops: tuple
    pc_ops: tuple
    loads: LoadedInductances
    basis_tag: str

    @property
    def dims(self):
        return tuple(s.t for s in self.subsystems)

    @property
    def dim(self):
        return int(np.prod(self.dims))

    def lift(self, op, k):
        """Embed a subsystem-k operator into the full product space."""
        mats = [
            op if i == k else np.eye(s.t)
            for i, s in enumerate(self.subsystems)
        ]
        return reduce(np.kron, mats)


_W_NEGLIGIBLE = 1e-12  # GHz; drop interaction entries below this


def resolve_truncations(topology, truncations):
    n = topology.n_elements
    if truncations is None:
        return tuple(DEFAULT_TRUNCATION[e.kind] for e in topology.elements)
    if isinstance(truncations, int):
        return (truncations,) * n
    truncations = tuple(truncations)
    if len(truncations) != n:
        raise TopologyError(f"{n} elements but {len(truncations)} truncations")
    return truncations


def element_parts(params, bias, t, basis_spec):
    """Diagonalize one loaded element and rotate its coupling operators.

    Returns:
        (TruncatedSubsystem, rotated phi1, rotated persistent current).
    """
    if t > element_dim(params, basis_spec):
        raise TopologyError(
            f"truncation {t} exceeds element dimension {element_dim(params, basis_spec)}"
        )
    h = build_element(params, bias, basis_spec)
    sub = truncate_subsystem(h, t)
    phi = sub.rotate(node_phase(params, basis_spec).data)
    pc = sub.rotate(persistent_current(params, bias, basis_spec).data)
    return sub, phi, pc


def assemble_total(topology, biases, truncations=None, basis=None):
    """Build the joint truncated Hamiltonian of a biased topology.

    Each element is loaded (self-inductance from the branch-matrix
    inverse), built at its own bias, diagonalized, and truncated; the
    pairwise interactions w_kl * phi1_k * phi1_l are then rotated into
    the kept eigenstates.  Every pair with a non-negligible inverse
    branch entry interacts, including qubit pairs with no direct mutual.

    Arguments:
        topology: circuit layout.
        biases: per-element FluxBias sequence, same order as elements.
        truncations: per-element kept-state counts; a single int applies
            to every element; None uses 5 per qubit and 4 per coupler.
        basis: BasisSpec, or mapping from element kind to BasisSpec;
            None uses the stock per-kind defaults.

    Returns:
        CompositeHamiltonian.
    """
    n = topology.n_elements
    biases = tuple(biases)
    if len(biases) != n:
        raise TopologyError(f"{n} elements but {len(biases)} biases")
    truncations = resolve_truncations(topology, truncations)
    loads = loaded_inductances(topology)
    parts = []
    for i, bare in enumerate(topology.elements):
        params = replace(bare, l=loads.loaded[i])
        b = resolve_basis(basis, params.kind)
        parts.append(element_parts(params, biases[i], truncations[i], b))
    return assemble_from_parts(topology, biases, loads, parts)


def assemble_from_parts(topology, biases, loads, parts):
    """Assemble the joint Hamiltonian from precomputed element parts.

    Split out of assemble_total so callers that cache per-element
    eigendata (optimizer Jacobians re-diagonalize one element at a time)
    can reuse the kron-sum step.
    """
    n = topology.n_elements
    subsystems = [p[0] for p in parts]
    phi_ops = [p[1] for p in parts]
    pc_ops = [p[2] for p in parts]
    dims = [s.t for s in subsystems]
    dim = int(np.prod(dims))
    h_total = np.zeros((dim, dim), dtype=complex)

    def lift_one(op, k):
        mats = [op if i == k else np.eye(dims[i]) for i in range(n)]
        return reduce(np.kron, mats)

    def lift_two(op_k, k, op_l, l):
        mats = []
        for i in range(n):
            if i == k:
                mats.append(op_k)
            elif i == l:
                mats.append(op_l)
            else:
                mats.append(np.eye(dims[i]))
        return reduce(np.kron, mats)

    for k, sub in enumerate(subsystems):
        h_total += lift_one(np.diag(sub.energies.astype(complex)), k)
    w_max = np.max(np.abs(loads.w_ghz)) if n > 1 else 0.0
    for k in range(n):
        for l in range(k + 1, n):
            w = loads.w_ghz[k, l]
            if abs(w) <= _W_NEGLIGIBLE * max(1.0, w_max):
                continue
            h_total += w * lift_two(phi_ops[k], k, phi_ops[l], l)

    tag = "x".join(s.basis for s in subsystems) + f"|trunc{tuple(dims)}"
    return CompositeHamiltonian(
        topology=topology,
        biases=biases,
        h_total=hermitize(h_total),
        subsystems=tuple(subsystems),
        phi_ops=tuple(phi_ops),
        pc_ops=tuple(pc_ops),
        loads=loads,
        basis_tag=tag,
    )


def check_truncation_convergence(topology, biases, truncations=None, basis=None, k=4, tol=1e-4, max_steps=2):
    """Raise per-element truncations until the joint low spectrum is stable.

    Compares the first k eigenvalues of the assembled Hamiltonian before
    and after adding two kept states per element.

    Returns:
        dict like check_element_convergence's ("converged", "truncations",
        "history").
    """
    n = topology.n_elements
    if truncations is None:
        truncations = tuple(DEFAULT_TRUNCATION[e.kind] for e in topology.elements)
    elif isinstance(truncations, int):
        truncations = (truncations,) * n
    else:
        truncations = tuple(truncations)

    def levels(tr):
        comp = assemble_total(topology, biases, truncations=tr, basis=basis)
        vals, _ = lowest_eigs(comp.h_total, k)
        return vals

    history = []
    current = levels(truncations)
    for _ in range(max_steps):
        bumped = tuple(t + 2 for t in truncations)
        upper = levels(bumped)
        change = float(np.max(np.abs(upper - current)))
        history.append((truncations, change))
        if change < tol:
            return {"converged": True, "truncations": truncations, "history": history}
        truncations, current = bumped, upper
    return {"converged": False, "truncations": truncations, "history": history}
