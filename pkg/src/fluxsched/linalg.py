"""Deterministic lowest-eigenpair extraction for dense and sparse matrices."""

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

_DENSE_CUTOFF = 1500


def gershgorin_lower_bound(h):
    """A cheap lower bound on the spectrum of a Hermitian sparse matrix."""
    diag = h.diagonal().real
    absrow = np.asarray(abs(h).sum(axis=1)).ravel()
    return float(np.min(diag - (absrow - np.abs(diag))))


def lowest_eigs(h, k):
    """First k eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    Dense matrices, and sparse ones below a size threshold, go through
    LAPACK; larger sparse matrices use shift-invert Lanczos with a
    Gershgorin shift placed strictly below the spectrum.  The Lanczos
    start vector is fixed, so repeated calls give identical output.

    Arguments:
        h: Hermitian matrix, dense or scipy sparse.
        k: number of eigenpairs, 1 <= k <= dim.

    Returns:
        (values, vectors): shapes (k,) and (dim, k).
    """
    dim = h.shape[0]
    if not 1 <= k <= dim:
        raise ValueError(f"need 1 <= k <= {dim}, got k={k}")
    if sp.issparse(h):
        if dim <= _DENSE_CUTOFF or k > dim // 4:
            vals, vecs = sla.eigh(h.toarray(), subset_by_index=(0, k - 1))
            return vals, vecs
        sigma = gershgorin_lower_bound(h) - 1.0
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
        vals, vecs = spla.eigsh(h.tocsc(), k=k, sigma=sigma, which="LM", v0=v0)
        order = np.argsort(vals)
        return vals[order], vecs[:, order]
    vals, vecs = sla.eigh(np.asarray(h), subset_by_index=(0, k - 1))
    return vals, vecs
