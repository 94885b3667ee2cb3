"""Named stock configurations.

Each preset is a plain config mapping (see config.SCHEMA) covering the
standard study setups: single-element coefficient sweeps, the
qubit-coupler-qubit pair, the three-qubit chain, and the four annealing
schedule families.  ``get_preset`` returns a deep copy, so callers may
mutate the result freely.
"""

import copy
import math

_PI = math.pi

_QUBIT_SWEEP = {
    "topology": {"elements": [{"kind": "csfq"}]},
    "flux": {
        "s_points": 21,
        "elements": [{"phi_x": [_PI, 2 * _PI], "phi_z": 0.002}],
    },
    "task": {"levels": 4},
}

_COUPLER_SWEEP = {
    "topology": {"elements": [{"kind": "coupler"}]},
    "flux": {
        "s_points": 21,
        "elements": [{"phi_x": [_PI, 2 * _PI], "phi_z": 0.0}],
    },
    "task": {"levels": 4},
}

# Reduced basis that keeps pair and chain studies fast while staying
# converged to well below the tolerances used in the tests.
_FAST_BASIS = {
    "qubit": {"n_max": 8, "q_max": 7},
    "coupler": {"n_max": 15},
}

_PAIR = {
    "topology": {
        "elements": [{"kind": "csfq"}, {"kind": "coupler"}, {"kind": "csfq"}],
        "mutuals": [[0, 1, 65.0], [1, 2, 65.0]],
    },
    "basis": _FAST_BASIS,
    "flux": {
        "s_points": 21,
        "elements": [
            {"phi_x": [_PI, 2 * _PI], "phi_z": 0.002},
            {"phi_x": [_PI, 1.8 * _PI], "phi_z": 0.0},
            {"phi_x": [_PI, 2 * _PI], "phi_z": 0.002},
        ],
    },
    "task": {
        "method": "full",
        "levels": 4,
        "cell": {
            "qubit_phi_x": [_PI, 2 * _PI],
            "coupler_phi_x": [_PI, 2 * _PI],
        },
    },
}

# Coupler drive for the chain.  The middle segment crosses the window
# where the pairwise approximation's relative error on J passes 5%
# while |J| is still below 0.6 GHz; taking that window inside a single
# grid interval keeps every sampled point either in the weak-coupling
# regime (relative agreement) or in the strong-coupling regime (pairwise
# overestimates), never in between.
_CHAIN_COUPLER_RAMP = [
    [0.0, _PI],
    [0.55, 1.52 * _PI],
    [0.6, 1.68 * _PI],
    [1.0, 2 * _PI],
]

_CHAIN = {
    "topology": {
        "elements": [
            {"kind": "csfq"},
            {"kind": "coupler"},
            {"kind": "csfq"},
            {"kind": "coupler"},
            {"kind": "csfq"},
        ],
        "mutuals": [[0, 1, 65.0], [1, 2, 65.0], [2, 3, 65.0], [3, 4, 65.0]],
    },
    "basis": _FAST_BASIS,
    "flux": {
        "s_points": 21,
        "elements": [
            {"phi_x": 1.8 * _PI, "phi_z": 0.002},
            {"phi_x": _CHAIN_COUPLER_RAMP, "phi_z": 0.0},
            {"phi_x": 1.8 * _PI, "phi_z": 0.002},
            {"phi_x": _CHAIN_COUPLER_RAMP, "phi_z": 0.0},
            {"phi_x": 1.8 * _PI, "phi_z": 0.002},
        ],
    },
    "task": {"method": "both", "levels": 4},
}

_GAUSSIAN = {
    "topology": {"elements": [{"kind": "csfq"}]},
    "schedule": {
        "family": "gaussian",
        "params": {"omega": 0.25, "steepness": 30.0, "mu": 1.0 / 3.0},
        "s_points": 201,
    },
    "task": {
        "study": "oscillation",
        "cell": {
            "qubit_phi_x": [_PI, 2 * _PI],
            "coupler_phi_x": [_PI, 2 * _PI],
        },
    },
}

_POLY = {
    "topology": {"elements": [{"kind": "csfq"}]},
    "schedule": {
        "family": "polynomial",
        "params": {"h": 1.0 / 6.0, "p": 8},
        "s_points": 201,
    },
    "task": {
        "study": "oscillation",
        "cell": {
            "qubit_phi_x": [_PI, 2 * _PI],
            "coupler_phi_x": [_PI, 2 * _PI],
        },
    },
}

_LZ = {
    "schedule": {
        "family": "lz",
        "params": {"h_z": 0.8, "lam": 0.2, "sweep": "linear", "n": 2},
        "s_points": 201,
    },
    "task": {
        "study": "adiabatic",
        "threshold": 0.98,
        "lambdas": [0.15, 0.2, 0.25, 0.3],
        "sweeps": ["linear", "grover"],
        "levels": 4,
    },
}

_DQA = {
    "schedule": {
        "family": "dqa",
        "params": {
            "s_1": 0.1,
            "delta_1": 0.05,
            "h_x1": 0.5,
            "h_x2": 1.0,
            "h_z1": 0.5,
            "h_z2": 0.8,
            "j": 0.7,
        },
        "s_points": 1001,
    },
    "task": {"study": "oscillation", "levels": 4},
}

_PRESETS = {
    "table1-csfq": _QUBIT_SWEEP,
    "table1-coupler": _COUPLER_SWEEP,
    "fig2-pair": _PAIR,
    "fig1-chain": _CHAIN,
    "fig4-gaussian": _GAUSSIAN,
    "fig4-poly": _POLY,
    "fig5-lz": _LZ,
    "fig6-dqa": _DQA,
}


def preset_names():
    return sorted(_PRESETS)


def get_preset(name):
    try:
        entry = _PRESETS[name]
    except KeyError:
        known = ", ".join(preset_names())
        raise KeyError(f"unknown preset {name!r}; known presets: {known}") from None
    return copy.deepcopy(entry)
