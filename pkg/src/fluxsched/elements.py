"""Hamiltonians and persistent-current operators for the two circuit elements.

The flux qubit has three nodes: node 1 (the x-loop mode, shunted by the
loop inductance) lives in a harmonic-oscillator basis, nodes 2 and 3 are
junction islands in the charge basis.  The tunable coupler is a single
rf-SQUID-like node in a harmonic-oscillator basis.  Both elements carry
an x-loop bias phi_x (barrier control) and a z-loop bias phi_z (tilt),
with the x-flux split symmetrically across the loop junctions.

Bias enters every Hamiltonian term only through scalar prefactors, so
the bias-independent operator content of each element is cached per
(parameters, basis) pair and a Hamiltonian at a given bias is a cheap
linear combination.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .constants import charging_energy, inductive_energy, josephson_energy
from .linalg import lowest_eigs
from .operators import (
    BasisSpec,
    OperatorMatrix,
    charge_displacement,
    charge_number,
    hermitize,
    ho_ladder,
)

KIND_QUBIT = "csfq"
KIND_COUPLER = "coupler"

_SQRT2 = math.sqrt(2.0)


class DomainParameterError(ValueError):
    """Raised for circuit parameters outside the physical domain."""


@dataclass(frozen=True)
class CircuitElementParams:
    """Physical parameters of one circuit element.

    Arguments:
        kind: "csfq" or "coupler".
        i_c: junction critical current in nA.  For the qubit this is the
            z-loop junction current I_z (each x junction carries
            alpha * I_z); for the coupler it is the summed x-junction
            current.
        l: bare loop inductance in pH.
        c_sh: shunt capacitance in fF (qubit only).
        c_z: z-junction capacitance in fF (qubit only).
        alpha: x-junction to z-junction size ratio (qubit only).
        c: total shunting capacitance in fF (coupler only).
        d: junction asymmetry (I1 - I2)/(I1 + I2) of the x-loop pair.
    """

    kind: str
    i_c: float
    l: float
    c_sh: float = 0.0
    c_z: float = 0.0
    alpha: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        if self.kind not in (KIND_QUBIT, KIND_COUPLER):
            raise DomainParameterError(f"unknown element kind {self.kind!r}")
        if self.i_c <= 0.0:
            raise DomainParameterError(f"i_c must be positive, got {self.i_c} nA")
        if self.l <= 0.0:
            raise DomainParameterError(f"l must be positive, got {self.l} pH")
        if not -1.0 < self.d < 1.0:
            raise DomainParameterError(f"asymmetry d must lie in (-1, 1), got {self.d}")
        if self.kind == KIND_QUBIT:
            if self.c_sh <= 0.0 or self.c_z <= 0.0:
                raise DomainParameterError("csfq needs positive c_sh and c_z")
            if self.alpha <= 0.0:
                raise DomainParameterError(f"csfq alpha must be positive, got {self.alpha}")
        else:
            if self.c <= 0.0:
                raise DomainParameterError("coupler needs positive total capacitance c")


@dataclass(frozen=True)
class FluxBias:
    """External loop phases of one element, in radians."""

    phi_x: float
    phi_z: float = 0.0


def table_csfq(d=0.0):
    """Stock flux-qubit parameters used by the shipped presets."""
    return CircuitElementParams(
        kind=KIND_QUBIT, i_c=230.0, l=480.0, c_sh=50.0, c_z=4.4, alpha=0.4, d=d
    )


def table_coupler(d=0.0):
    """Stock coupler parameters used by the shipped presets."""
    return CircuitElementParams(kind=KIND_COUPLER, i_c=565.0, l=580.0, c=11.0, d=d)


def _basis_tag(params, basis):
    if params.kind == KIND_QUBIT:
        e_c1 = charging_energy(2.0 * params.alpha * params.c_z)
        zpf = (e_c1 / inductive_energy(params.l)) ** 0.25 / _SQRT2
        return f"csfq(n{basis.n_max},q{basis.q_max},zpf={zpf:.12g})"
    zpf = (charging_energy(params.c) / inductive_energy(params.l)) ** 0.25 / _SQRT2
    return f"coupler(n{basis.n_max},zpf={zpf:.12g})"


@lru_cache(maxsize=64)
def _csfq_pieces(params, basis):
    """Bias-independent sparse operator content of the flux qubit.

    Returns a dict with the static Hamiltonian part h0 (charging terms
    plus the node-1 oscillator), the z-loop junction combinations
    c_sum = cos(phi3) + cos(phi3 - phi2) and s_dif = sin(phi3) -
    sin(phi3 - phi2), the x-loop combinations c_delta/s_delta of
    cos/sin(phi2 - phi1), and the node-1 phase operator.
    """
    n_max, q_max = basis.n_max, basis.q_max
    if q_max < 1:
        raise DomainParameterError("csfq needs a charge basis, q_max >= 1")
    e_c1 = charging_energy(2.0 * params.alpha * params.c_z)
    e_cs = charging_energy(2.0 * params.c_sh + params.c_z)
    e_c3 = charging_energy(params.c_z * (2.0 * params.c_sh + params.c_z) / params.c_sh)
    e_l = inductive_energy(params.l)
    omega = 2.0 * math.sqrt(e_c1 * e_l)

    a = ho_ladder(n_max)
    phi1_local = (e_c1 / e_l) ** 0.25 * (a + a.T) / _SQRT2
    n1_local = (e_l / e_c1) ** 0.25 * (a - a.T) / (_SQRT2 * 1j)
    exp_phi1 = expm(1j * phi1_local)

    i_n = sp.identity(n_max, format="csr")
    i_q = sp.identity(2 * q_max + 1, format="csr")

    def lift(op1, op2, op3):
        return sp.kron(sp.kron(sp.csr_matrix(op1), sp.csr_matrix(op2)), sp.csr_matrix(op3), format="csr")

    n1 = lift(n1_local, i_q, i_q)
    n2 = lift(i_n, charge_number(q_max), i_q)
    n3 = lift(i_n, i_q, charge_number(q_max))
    n12 = n1 + n2
    n123 = n12 + n3

    ho = lift(np.diag(np.arange(n_max) + 0.5), i_q, i_q)
    h0 = omega * ho + e_cs * (n12 @ n12 + n123 @ n123) + e_c3 * (n3 @ n3)

    d_up = charge_displacement(q_max, 1)
    e2 = lift(i_n, d_up, i_q)
    e3 = lift(i_n, i_q, d_up)
    e1 = lift(exp_phi1, i_q, i_q)
    e_theta = e3 @ e2.conj().T
    e_delta = e2 @ e1.conj().T

    def cos_of(e):
        return (e + e.conj().T) * 0.5

    def sin_of(e):
        return (e - e.conj().T) * (-0.5j)

    return {
        "h0": hermitize(h0),
        "c_sum": cos_of(e3) + cos_of(e_theta),
        "s_dif": sin_of(e3) - sin_of(e_theta),
        "c_delta": cos_of(e_delta),
        "s_delta": sin_of(e_delta),
        "phi1": lift(phi1_local, i_q, i_q),
        "tag": _basis_tag(params, basis),
    }


@lru_cache(maxsize=64)
def _coupler_pieces(params, basis):
    """Bias-independent dense operator content of the coupler."""
    n_max = basis.n_max
    e_c = charging_energy(params.c)
    e_l = inductive_energy(params.l)
    omega = 2.0 * math.sqrt(e_c * e_l)

    a = ho_ladder(n_max)
    phi1 = (e_c / e_l) ** 0.25 * (a + a.T) / _SQRT2
    e1 = expm(1j * phi1)

    return {
        "h0": omega * np.diag(np.arange(n_max) + 0.5),
        "c1": 0.5 * (e1 + e1.conj().T),
        "s1": -0.5j * (e1 - e1.conj().T),
        "phi1": phi1,
        "tag": _basis_tag(params, basis),
    }


def build_csfq(params, bias, basis=None):
    """Flux-qubit Hamiltonian at a bias point, in GHz.

    The two z-loop junctions carry the tilt phase phi_z split
    symmetrically; the x-loop junction pair enters with prefactor
    2*alpha and, for nonzero asymmetry d, an extra sin(phi_x/2)
    quadrature that realizes the equivalent current rescale
    sqrt(1 + d^2 tan^2(phi_x/2)) and tilt shift arctan(d tan(phi_x/2)).

    Arguments:
        params: CircuitElementParams of kind "csfq".
        bias: FluxBias in radians.
        basis: BasisSpec; defaults to n_max=12, q_max=10.

    Returns:
        OperatorMatrix holding a sparse Hermitian matrix of dimension
        n_max * (2 q_max + 1)^2.
    """
    if params.kind != KIND_QUBIT:
        raise DomainParameterError(f"build_csfq got element kind {params.kind!r}")
    basis = basis or BasisSpec()
    p = _csfq_pieces(params, basis)
    e_j = josephson_energy(params.i_c)
    cz, sz = math.cos(bias.phi_z / 2.0), math.sin(bias.phi_z / 2.0)
    cx, sx = math.cos(bias.phi_x / 2.0), math.sin(bias.phi_x / 2.0)
    h = p["h0"] - e_j * (
        cz * p["c_sum"]
        - sz * p["s_dif"]
        + 2.0 * params.alpha * (cx * p["c_delta"] + params.d * sx * p["s_delta"])
    )
    return OperatorMatrix(hermitize(h), p["tag"])


def build_coupler(params, bias, basis=None):
    """Coupler Hamiltonian at a bias point, in GHz.

    Arguments:
        params: CircuitElementParams of kind "coupler".
        bias: FluxBias in radians.
        basis: BasisSpec; only n_max is used, default 12.

    Returns:
        OperatorMatrix holding a dense Hermitian (n_max, n_max) array.
    """
    if params.kind != KIND_COUPLER:
        raise DomainParameterError(f"build_coupler got element kind {params.kind!r}")
    basis = basis or BasisSpec()
    p = _coupler_pieces(params, basis)
    e_j = josephson_energy(params.i_c)
    cz, sz = math.cos(bias.phi_z), math.sin(bias.phi_z)
    cx, sx = math.cos(bias.phi_x / 2.0), math.sin(bias.phi_x / 2.0)
    cos_shift = cz * p["c1"] + sz * p["s1"]
    sin_shift = cz * p["s1"] - sz * p["c1"]
    h = p["h0"] - e_j * (cx * cos_shift + params.d * sx * sin_shift)
    return OperatorMatrix(hermitize(h), p["tag"])


def build_element(params, bias, basis=None):
    """Dispatch to build_csfq or build_coupler by params.kind."""
    if params.kind == KIND_QUBIT:
        return build_csfq(params, bias, basis)
    return build_coupler(params, bias, basis)


def persistent_current(params, bias, basis=None):
    """Persistent-current operator of an element at a bias point, in nA.

    Defined as minus the derivative of the element Hamiltonian with
    respect to the z-loop flux, so it is always built in the same basis
    and gauge as the matching Hamiltonian.

    Returns:
        OperatorMatrix with the same basis tag as build_element's output
        at the same (params, basis).
    """
    basis = basis or BasisSpec()
    if params.kind == KIND_QUBIT:
        p = _csfq_pieces(params, basis)
        cz, sz = math.cos(bias.phi_z / 2.0), math.sin(bias.phi_z / 2.0)
        ip = -(params.i_c / 2.0) * (cz * p["s_dif"] + sz * p["c_sum"])
        return OperatorMatrix(hermitize(ip), p["tag"])
    p = _coupler_pieces(params, basis)
    cz, sz = math.cos(bias.phi_z), math.sin(bias.phi_z)
    cx, sx = math.cos(bias.phi_x / 2.0), math.sin(bias.phi_x / 2.0)
    sin_shift = cz * p["s1"] - sz * p["c1"]
    cos_shift = cz * p["c1"] + sz * p["s1"]
    ip = params.i_c * (cx * sin_shift - params.d * sx * cos_shift)
    return OperatorMatrix(hermitize(ip), p["tag"])


def node_phase(params, basis=None):
    """Node-1 phase operator of an element (the inductively coupled node)."""
    basis = basis or BasisSpec()
    if params.kind == KIND_QUBIT:
        p = _csfq_pieces(params, basis)
    else:
        p = _coupler_pieces(params, basis)
    return OperatorMatrix(p["phi1"], p["tag"])


def element_dim(params, basis):
    if params.kind == KIND_QUBIT:
        return basis.n_max * (2 * basis.q_max + 1) ** 2
    return basis.n_max


def _double(basis, kind):
    if kind == KIND_QUBIT:
        return BasisSpec(n_max=2 * basis.n_max, q_max=2 * basis.q_max)
    return BasisSpec(n_max=2 * basis.n_max, q_max=basis.q_max)


def check_element_convergence(params, biases, basis=None, k=4, tol=1e-6, max_doublings=2):
    """Check basis-cutoff convergence of an element's low spectrum.

    Doubles the relevant cutoffs and compares the first k eigenvalues at
    every supplied bias; repeats until the worst change drops below tol
    or the doubling budget runs out.

    Arguments:
        params: element parameters.
        biases: iterable of FluxBias points to test at.
        basis: starting BasisSpec.
        k: number of eigenvalues compared.
        tol: tolerance in GHz.
        max_doublings: how many doublings to attempt.

    Returns:
        dict with keys "converged" (bool), "basis" (the first BasisSpec
        meeting the criterion, or the largest tried), and "history", a
        list of (BasisSpec, max_change) pairs.
    """
    basis = basis or BasisSpec()
    biases = tuple(biases)
    history = []

    def levels(b):
        return np.array([lowest_eigs(build_element(params, fb, b).data, k)[0] for fb in biases])

    current = levels(basis)
    for _ in range(max_doublings):
        bigger = _double(basis, params.kind)
        upper = levels(bigger)
        change = float(np.max(np.abs(upper - current)))
        history.append((basis, change))
        if change < tol:
            return {"converged": True, "basis": basis, "history": history}
        basis, current = bigger, upper
    return {"converged": False, "basis": basis, "history": history}
