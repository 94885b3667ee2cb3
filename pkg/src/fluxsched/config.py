"""Structured run configuration.

A RunConfig is a nested mapping with four sections (topology, basis,
schedule, flux, task; all optional at the schema level, commands check
for what they need) validated against a JSON schema before any
computation.  Unknown keys are rejected everywhere.  YAML is the
primary surface; JSON files parse through the same loader.

Element entries only need the fields that differ from the stock values
(the standard CSFQ and coupler parameter sets); fluxes in config files
may be given in radians or milli flux quanta.
"""

import copy
import dataclasses

import jsonschema
import numpy as np
import yaml

from .composite import Topology
from .constants import mphi0_to_rad
from .elements import (
    KIND_COUPLER,
    KIND_QUBIT,
    DomainParameterError,
    table_coupler,
    table_csfq,
)
from .inversion import AnnealingCell, FluxScheduleTable
from .operators import BasisSpec
from .schedules import (
    DqaParams,
    GaussianProgressionParams,
    LzGadgetParams,
    PolynomialRfParams,
    ScheduleParameterError,
    dqa_schedule,
    gaussian_progression,
    lz_gadget,
    polynomial_rf,
)


class ConfigError(ValueError):
    """Any problem that makes a config unusable before numerics start."""


_NUM = {"type": "number"}
_POS_INT = {"type": "integer", "minimum": 1}
_RANGE = {
    "type": "array",
    "items": _NUM,
    "minItems": 2,
    "maxItems": 2,
}
# Piecewise-linear ramp given as [s, value] knots.
_KNOTS = {
    "type": "array",
    "minItems": 2,
    "items": {
        "type": "array",
        "items": _NUM,
        "minItems": 2,
        "maxItems": 2,
    },
}
_NUM_OR_RAMP = {"oneOf": [_NUM, _RANGE, _KNOTS]}

_ELEMENT = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": [KIND_QUBIT, KIND_COUPLER]},
        "i_c": _NUM,
        "l": _NUM,
        "c_sh": _NUM,
        "c_z": _NUM,
        "alpha": _NUM,
        "c": _NUM,
        "d": _NUM,
    },
    "required": ["kind"],
}

_BASIS_SPEC = {
    "type": "object",
    "additionalProperties": False,
    "properties": {"n_max": _POS_INT, "q_max": {"type": "integer", "minimum": 0}},
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "topology": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "elements": {"type": "array", "minItems": 1, "items": _ELEMENT},
                "mutuals": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": _NUM,
                        "minItems": 3,
                        "maxItems": 3,
                    },
                },
            },
            "required": ["elements"],
        },
        "basis": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "qubit": _BASIS_SPEC,
                "coupler": _BASIS_SPEC,
                "truncations": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        KIND_QUBIT: _POS_INT,
                        KIND_COUPLER: _POS_INT,
                    },
                },
            },
        },
        "schedule": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "family": {"enum": ["gaussian", "polynomial", "lz", "dqa"]},
                "params": {"type": "object"},
                "s_points": {"type": "integer", "minimum": 2},
                "bell": {"type": "boolean"},
            },
            "required": ["family", "params"],
        },
        "flux": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "s_points": {"type": "integer", "minimum": 1},
                "units": {"enum": ["rad", "mPhi0"]},
                "elements": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "phi_x": _NUM_OR_RAMP,
                            "phi_z": _NUM_OR_RAMP,
                        },
                    },
                },
            },
            "required": ["elements"],
        },
        "task": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "out": {"type": "string"},
                "method": {"enum": ["full", "pairwise", "both"]},
                "seed": {"type": "integer", "minimum": 0},
                "asymmetry": _NUM,
                "flux_file": {"type": "string"},
                "target_file": {"type": "string"},
                "levels": _POS_INT,
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "j_tol": {"type": "number", "exclusiveMinimum": 0},
                "cell": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "qubit_phi_x": _RANGE,
                        "coupler_phi_x": _RANGE,
                        "qubit_phi_z_halfwidth": _NUM,
                        "coupler_phi_z": _NUM,
                    },
                },
                "study": {"enum": ["single", "oscillation", "adiabatic"]},
                "t_a": {"type": "number", "exclusiveMinimum": 0},
                "threshold": {
                    "type": "number",
                    "exclusiveMinimum": 0.5,
                    "exclusiveMaximum": 1,
                },
                "lambdas": {"type": "array", "items": _NUM, "minItems": 2},
                "sweeps": {
                    "type": "array",
                    "items": {"enum": ["linear", "grover"]},
                    "minItems": 1,
                },
                "expected_period": {"type": "number", "exclusiveMinimum": 0},
                "n_periods": _POS_INT,
                "samples_per_period": _POS_INT,
            },
        },
    },
}

_STOCK = {KIND_QUBIT: table_csfq, KIND_COUPLER: table_coupler}

_FAMILIES = {
    "gaussian": (GaussianProgressionParams, gaussian_progression),
    "polynomial": (PolynomialRfParams, polynomial_rf),
    "lz": (LzGadgetParams, lz_gadget),
    "dqa": (DqaParams, dqa_schedule),
}


class RunConfig:
    """Validated run configuration with typed accessors."""

    def __init__(self, raw, source=None):
        try:
            jsonschema.validate(raw, SCHEMA)
        except jsonschema.ValidationError as err:
            where = "/".join(str(p) for p in err.absolute_path) or "(top level)"
            raise ConfigError(f"config invalid at {where}: {err.message}") from None
        self.raw = raw
        self.source = source

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                raw = yaml.safe_load(fh)
        except OSError as err:
            raise ConfigError(f"cannot read config: {err}") from None
        except yaml.YAMLError as err:
            raise ConfigError(f"cannot parse config {path}: {err}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must be a mapping")
        return cls(raw, source=path)

    def hash(self):
        """Hash of the run inputs; the output directory does not count."""
        from .io import config_hash

        raw = copy.deepcopy(self.raw)
        raw.get("task", {}).pop("out", None)
        return config_hash(raw)

    # ---- section accessors -------------------------------------------

    def require(self, section):
        if section not in self.raw:
            raise ConfigError(f"this command needs a '{section}' section")
        return self.raw[section]

    def task(self, key, default=None):
        return self.raw.get("task", {}).get(key, default)

    def override_task(self, **kwargs):
        """Fold CLI flag values into the task section (None values skip)."""
        task = self.raw.setdefault("task", {})
        for key, value in kwargs.items():
            if value is not None:
                task[key] = value
        jsonschema.validate(self.raw, SCHEMA)

    def topology(self):
        section = self.require("topology")
        elements = []
        for entry in section["elements"]:
            entry = dict(entry)
            kind = entry.pop("kind")
            stock = _STOCK[kind]()
            try:
                elements.append(dataclasses.replace(stock, **entry))
            except (DomainParameterError, TypeError) as err:
                raise ConfigError(f"bad element parameters: {err}") from None
        mutuals = tuple(
            (int(k), int(l), float(m)) for k, l, m in section.get("mutuals", [])
        )
        return Topology(elements=tuple(elements), mutuals=mutuals)

    def basis(self):
        section = self.raw.get("basis", {})
        out = {}
        if "qubit" in section:
            out[KIND_QUBIT] = BasisSpec(**section["qubit"])
        if "coupler" in section:
            out[KIND_COUPLER] = BasisSpec(**section["coupler"])
        return out or None

    def truncations(self):
        return self.raw.get("basis", {}).get("truncations")

    def cell(self):
        spec = self.task("cell")
        if spec is None:
            return AnnealingCell()
        kwargs = {}
        for key in ("qubit_phi_x", "coupler_phi_x"):
            if key in spec:
                kwargs[key] = tuple(spec[key])
        for key in ("qubit_phi_z_halfwidth", "coupler_phi_z"):
            if key in spec:
                kwargs[key] = spec[key]
        return AnnealingCell(**kwargs)

    def schedule(self):
        """Build (PauliSchedule, report, params) from the schedule section.

        report is None for families without one.
        """
        section = self.require("schedule")
        cls, build = _FAMILIES[section["family"]]
        try:
            params = cls(**section["params"])
        except (ScheduleParameterError, TypeError) as err:
            raise ConfigError(f"bad schedule parameters: {err}") from None
        s_grid = np.linspace(0.0, 1.0, section.get("s_points", 201))
        if section["family"] == "polynomial":
            sched = build(params, s_grid, bell=section.get("bell", False))
            return sched, None, params
        out = build(params, s_grid)
        if isinstance(out, tuple):
            return out[0], out[1], params
        return out, None, params

    def flux_table(self, n_elements):
        """Build the inline flux ramp table from the flux section.

        Each element's phi_x/phi_z is a constant, a [lo, hi] linear ramp,
        or a piecewise-linear ramp written as [s, value] knots with
        strictly ascending s from 0.0 to 1.0.
        """
        section = self.require("flux")
        entries = section["elements"]
        if len(entries) != n_elements:
            raise ConfigError(
                f"flux section has {len(entries)} elements but the topology "
                f"has {n_elements}"
            )
        n_pts = section.get("s_points", 21)
        s = np.linspace(0.0, 1.0, n_pts) if n_pts > 1 else np.array([0.0])
        scale = (
            mphi0_to_rad(1.0) if section.get("units", "rad") == "mPhi0" else 1.0
        )

        def ramp(value):
            if isinstance(value, (int, float)):
                return np.full_like(s, float(value) * scale)
            if value and isinstance(value[0], (list, tuple)):
                xs = [float(a) for a, _ in value]
                ys = [float(b) for _, b in value]
                if xs[0] != 0.0 or xs[-1] != 1.0 or any(
                    b <= a for a, b in zip(xs, xs[1:])
                ):
                    raise ConfigError(
                        "piecewise flux knots need strictly ascending s "
                        "running from 0.0 to 1.0"
                    )
                return np.interp(s, xs, ys) * scale
            lo, hi = value
            return np.linspace(float(lo), float(hi), len(s)) * scale

        phi_x = np.vstack([ramp(e.get("phi_x", 0.0)) for e in entries])
        phi_z = np.vstack([ramp(e.get("phi_z", 0.0)) for e in entries])
        return FluxScheduleTable(s=s, phi_x=phi_x, phi_z=phi_z)
