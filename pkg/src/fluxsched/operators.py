"""Single-node operators and basis bookkeeping.

Two node bases appear in the circuit models: a truncated
harmonic-oscillator (Fock) basis for nodes shunted by both a capacitance
and an inductance, and a discrete charge basis for island nodes whose
conjugate phase is compact.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


class InvalidBasisError(ValueError):
    """Raised for non-positive or otherwise unusable basis sizes."""


class BasisMismatchError(ValueError):
    """Raised when operators from different bases are combined."""


@dataclass(frozen=True)
class BasisSpec:
    """Node basis sizes for one circuit element.

    Arguments:
        n_max: number of harmonic-oscillator levels kept per oscillator
            node.
        q_max: charge cutoff for island nodes; the charge basis spans
            -q_max..q_max.  Ignored by elements without island nodes.
    """

    n_max: int = 12
    q_max: int = 10

    def __post_init__(self):
        if self.n_max < 2:
            raise InvalidBasisError(f"n_max must be at least 2, got {self.n_max}")
        if self.q_max < 0:
            raise InvalidBasisError(f"q_max must be non-negative, got {self.q_max}")

    @property
    def charge_dim(self):
        return 2 * self.q_max + 1


@dataclass
class OperatorMatrix:
    """A matrix together with the tag of the basis it lives in.

    The payload is either a dense ndarray or a scipy sparse matrix;
    ``toarray`` gives a dense view either way.
    """

    data: object
    basis: str

    @property
    def dim(self):
        return self.data.shape[0]

    def toarray(self):
        if sp.issparse(self.data):
            return self.data.toarray()
        return np.asarray(self.data)

    def require_same_basis(self, other):
        if self.basis != other.basis:
            raise BasisMismatchError(
                f"operators live in different bases: {self.basis!r} vs {other.basis!r}"
            )


def ho_ladder(n_max):
    """Lowering operator on a truncated harmonic-oscillator basis.

    Arguments:
        n_max: number of Fock levels kept.

    Returns:
        Dense (n_max, n_max) array with sqrt(n) on the first upper
        off-diagonal.
    """
    if n_max < 2:
        raise InvalidBasisError(f"n_max must be at least 2, got {n_max}")
    return np.diag(np.sqrt(np.arange(1.0, n_max)), k=1)


def charge_number(q_max):
    """Charge number operator diag(-q_max..q_max)."""
    if q_max < 0:
        raise InvalidBasisError(f"q_max must be non-negative, got {q_max}")
    return np.diag(np.arange(-q_max, q_max + 1.0))


def charge_displacement(q_max, m=1):
    """Charge-raising operator exp(i m phi) on the charge basis.

    Shifts |q> to |q+m>; components pushed past the cutoff are dropped
    (hard truncation).

    Arguments:
        q_max: charge cutoff, basis spans -q_max..q_max.
        m: number of charge quanta raised; may be negative.

    Returns:
        Dense (2 q_max + 1,) square array with ones on the m-th lower
        off-diagonal.
    """
    if q_max < 0:
        raise InvalidBasisError(f"q_max must be non-negative, got {q_max}")
    dim = 2 * q_max + 1
    if abs(m) >= dim:
        return np.zeros((dim, dim))
    return np.eye(dim, k=-m)


def ho_phase(n_max, phi_zpf):
    """Phase operator phi_zpf * (a + a^dag) on the Fock basis."""
    a = ho_ladder(n_max)
    return phi_zpf * (a + a.T)


def hermitize(m):
    """Symmetrize away floating-point drift, preserving sparsity."""
    if sp.issparse(m):
        return (m + m.conj().T).multiply(0.5).tocsr()
    return 0.5 * (m + np.conj(m.T))
