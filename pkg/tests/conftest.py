import numpy as np
import pytest

from fluxsched.composite import pair_topology, single_qubit_topology
from fluxsched.elements import FluxBias, table_coupler, table_csfq
from fluxsched.operators import BasisSpec

# Shrunk node bases keep the unit tests fast.  Convergence against the
# stock cutoffs is covered explicitly in the element and composite tests
# and in the acceptance suite, which runs at the preset cutoffs.
SMALL_BASIS = {
    "csfq": BasisSpec(n_max=6, q_max=5),
    "coupler": BasisSpec(n_max=10, q_max=0),
}
FAST_BASIS = {
    "csfq": BasisSpec(n_max=8, q_max=7),
    "coupler": BasisSpec(n_max=15, q_max=0),
}


@pytest.fixture(scope="session")
def qubit_params():
    return table_csfq()


@pytest.fixture(scope="session")
def coupler_params():
    return table_coupler()


@pytest.fixture(scope="session")
def single_qubit(qubit_params):
    return single_qubit_topology(qubit_params)


@pytest.fixture(scope="session")
def pair(qubit_params, coupler_params):
    return pair_topology(qubit_params, coupler_params, qubit_params)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
