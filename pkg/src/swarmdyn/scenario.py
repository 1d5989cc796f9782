"""Scenario files: one JSON document per reproducible experiment.

Schema (version 1):

    {
      "schema_version": 1,
      "name": "fig1",
      "model": "two-segment",            # one-segment | lumped | two-class
      "params": { ... },                 # keys depend on the model
      "controller": {"type": "bang-bang"},
      "initial_state": [0, 0, 0, 0],
      "integrator": {"method": "rk45", "t_end": 40.0, ...},
      "sweep": {...}, "optimal_control": {...}, "phase_field": {...}   # optional
    }

Controllers: constant {u}, rarest-first, bang-bang {tie_tol?},
controlled-rarity {k}, inverted {inner}.  Parsing is strict: unknown or
missing fields raise ConfigParseError naming the offending field, and a
parsed scenario serialises back to an equal value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .control import (
    BangBang,
    Constant,
    ContinuousRarest,
    ControlledRarity,
    ControlPolicy,
    Inverted,
)
from .engine import IntegratorConfig
from .lumped import ClassRates, LumpedParams, TwoClassParams
from .model import SwarmParams

__all__ = ["ConfigParseError", "SweepSpec", "OCSpec", "PhaseFieldSpec", "Scenario"]

SCHEMA_VERSION = 1

MODELS = ("one-segment", "two-segment", "lumped", "two-class")

_STATE_SIZES = {"one-segment": 2, "two-segment": 4, "lumped": 4, "two-class": 8}


class ConfigParseError(ValueError):
    """Scenario file is missing a field or holds an invalid value."""


def _get(mapping: dict, field: str, context: str):
    if field not in mapping:
        raise ConfigParseError(f"missing field '{context}{field}'")
    return mapping[field]


def _number(mapping: dict, field: str, context: str) -> float:
    value = _get(mapping, field, context)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigParseError(f"field '{context}{field}' must be a number, got {value!r}")
    return float(value)


def _check_known(mapping: dict, allowed: set[str], context: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        name = sorted(unknown)[0]
        raise ConfigParseError(f"unknown field '{context}{name}'")


def _controller_from_dict(spec, context: str) -> ControlPolicy:
    if not isinstance(spec, dict):
        raise ConfigParseError(f"field '{context}' must be an object")
    kind = _get(spec, "type", context + ".")
    if kind == "constant":
        _check_known(spec, {"type", "u"}, context + ".")
        return Constant(u=_number(spec, "u", context + "."))
    if kind == "rarest-first":
        _check_known(spec, {"type"}, context + ".")
        return ContinuousRarest()
    if kind == "bang-bang":
        _check_known(spec, {"type", "tie_tol"}, context + ".")
        tie = spec.get("tie_tol")
        return BangBang(tie_tol=None if tie is None else float(tie))
    if kind == "controlled-rarity":
        _check_known(spec, {"type", "k"}, context + ".")
        return ControlledRarity(k=_number(spec, "k", context + "."))
    if kind == "inverted":
        _check_known(spec, {"type", "inner"}, context + ".")
        return Inverted(inner=_controller_from_dict(_get(spec, "inner", context + "."), context + ".inner"))
    raise ConfigParseError(f"unknown controller type {kind!r} in '{context}'")


def _controller_to_dict(policy: ControlPolicy) -> dict:
    if isinstance(policy, Constant):
        return {"type": "constant", "u": policy.u}
    if isinstance(policy, ContinuousRarest):
        return {"type": "rarest-first"}
    if isinstance(policy, BangBang):
        out: dict = {"type": "bang-bang"}
        if policy.tie_tol is not None:
            out["tie_tol"] = policy.tie_tol
        return out
    if isinstance(policy, ControlledRarity):
        return {"type": "controlled-rarity", "k": policy.k}
    if isinstance(policy, Inverted):
        return {"type": "inverted", "inner": _controller_to_dict(policy.inner)}
    raise TypeError(f"cannot serialise controller {policy!r}")


def _params_from_dict(model: str, spec, context: str):
    if not isinstance(spec, dict):
        raise ConfigParseError(f"field '{context}' must be an object")
    ctx = context + "."
    try:
        if model in ("one-segment", "two-segment"):
            allowed = {"beta", "gamma", "lambda_l", "lambda_s", "delta", "beta0"}
            _check_known(spec, allowed, ctx)
            beta0 = spec.get("beta0")
            required = dict(
                beta=_number(spec, "beta", ctx),
                gamma=_number(spec, "gamma", ctx),
                lambda_l=_number(spec, "lambda_l", ctx),
                lambda_s=_number(spec, "lambda_s", ctx),
                delta=_number(spec, "delta", ctx),
            )
            if model == "one-segment" and beta0 is None:
                raise ConfigParseError(f"missing field '{ctx}beta0'")
            return SwarmParams(beta0=None if beta0 is None else float(beta0), **required)
        if model == "lumped":
            allowed = {"beta_r", "beta_n1", "lambda_l", "lambda_s", "delta"}
            _check_known(spec, allowed, ctx)
            return LumpedParams(
                beta_r=_number(spec, "beta_r", ctx),
                beta_n1=_number(spec, "beta_n1", ctx),
                lambda_l=_number(spec, "lambda_l", ctx),
                lambda_s=_number(spec, "lambda_s", ctx),
                delta=_number(spec, "delta", ctx),
            )
        if model == "two-class":
            _check_known(spec, {"beta_r", "beta_n1", "lo", "hi"}, ctx)

            def rates(key: str) -> ClassRates:
                sub = _get(spec, key, ctx)
                if not isinstance(sub, dict):
                    raise ConfigParseError(f"field '{ctx}{key}' must be an object")
                sub_ctx = f"{ctx}{key}."
                _check_known(sub, {"lambda_l", "lambda_s", "delta"}, sub_ctx)
                return ClassRates(
                    lambda_l=_number(sub, "lambda_l", sub_ctx),
                    lambda_s=_number(sub, "lambda_s", sub_ctx),
                    delta=_number(sub, "delta", sub_ctx),
                )

            return TwoClassParams(
                beta_r=_number(spec, "beta_r", ctx),
                beta_n1=_number(spec, "beta_n1", ctx),
                lo=rates("lo"),
                hi=rates("hi"),
            )
    except ValueError as err:
        if isinstance(err, ConfigParseError):
            raise
        raise ConfigParseError(f"invalid '{context}': {err}") from err
    raise ConfigParseError(f"unknown model {model!r}")


def _params_to_dict(model: str, params) -> dict:
    if model in ("one-segment", "two-segment"):
        out = {
            "beta": params.beta,
            "gamma": params.gamma,
            "lambda_l": params.lambda_l,
            "lambda_s": params.lambda_s,
            "delta": params.delta,
        }
        if params.beta0 is not None:
            out["beta0"] = params.beta0
        return out
    if model == "lumped":
        return {
            "beta_r": params.beta_r,
            "beta_n1": params.beta_n1,
            "lambda_l": params.lambda_l,
            "lambda_s": params.lambda_s,
            "delta": params.delta,
        }
    return {
        "beta_r": params.beta_r,
        "beta_n1": params.beta_n1,
        "lo": {
            "lambda_l": params.lo.lambda_l,
            "lambda_s": params.lo.lambda_s,
            "delta": params.lo.delta,
        },
        "hi": {
            "lambda_l": params.hi.lambda_l,
            "lambda_s": params.hi.lambda_s,
            "delta": params.hi.delta,
        },
    }


def _integrator_from_dict(spec, context: str) -> IntegratorConfig:
    if not isinstance(spec, dict):
        raise ConfigParseError(f"field '{context}' must be an object")
    ctx = context + "."
    allowed = {"method", "step", "rel_tol", "abs_tol", "t_end", "steady_tol", "record_every"}
    _check_known(spec, allowed, ctx)
    kwargs = {}
    if "method" in spec:
        kwargs["method"] = spec["method"]
    for key in ("step", "record_every"):
        if key in spec and spec[key] is not None:
            kwargs[key] = _number(spec, key, ctx)
    for key in ("rel_tol", "abs_tol", "t_end", "steady_tol"):
        if key in spec:
            kwargs[key] = _number(spec, key, ctx)
    try:
        return IntegratorConfig(**kwargs)
    except ValueError as err:
        raise ConfigParseError(f"invalid '{context}': {err}") from err


def _integrator_to_dict(cfg: IntegratorConfig) -> dict:
    out = {
        "method": cfg.method,
        "rel_tol": cfg.rel_tol,
        "abs_tol": cfg.abs_tol,
        "t_end": cfg.t_end,
        "steady_tol": cfg.steady_tol,
    }
    if cfg.step is not None:
        out["step"] = cfg.step
    if cfg.record_every is not None:
        out["record_every"] = cfg.record_every
    return out


@dataclass(frozen=True)
class SweepSpec:
    """Either a control sweep (u values) or a seeder-arrival sweep.

    ``parameter`` is "u" or "lambda_s".  A lambda_s sweep rescales delta
    and lambda_l to hold the skew coordinates eta = lambda_l/delta and
    xi = delta/lambda_s fixed, so the sweep walks the family along which
    the real-root onset bounds are defined.
    """

    parameter: str
    values: tuple[float, ...]
    per_class: bool = False

    @classmethod
    def from_dict(cls, spec, context: str) -> "SweepSpec":
        if not isinstance(spec, dict):
            raise ConfigParseError(f"field '{context}' must be an object")
        ctx = context + "."
        _check_known(spec, {"parameter", "values", "per_class"}, ctx)
        parameter = _get(spec, "parameter", ctx)
        if parameter not in ("u", "lambda_s"):
            raise ConfigParseError(f"field '{ctx}parameter' must be 'u' or 'lambda_s'")
        values = _get(spec, "values", ctx)
        if not isinstance(values, list) or not values:
            raise ConfigParseError(f"field '{ctx}values' must be a nonempty list")
        per_class = spec.get("per_class", False)
        if not isinstance(per_class, bool):
            raise ConfigParseError(f"field '{ctx}per_class' must be a boolean")
        return cls(parameter=parameter, values=tuple(float(v) for v in values), per_class=per_class)

    def to_dict(self) -> dict:
        out: dict = {"parameter": self.parameter, "values": list(self.values)}
        if self.per_class:
            out["per_class"] = True
        return out


@dataclass(frozen=True)
class OCSpec:
    """Optimal-control block: horizon, control grid size, iteration limit."""

    horizon: float
    n_intervals: int
    max_iter: int = 80

    @classmethod
    def from_dict(cls, spec, context: str) -> "OCSpec":
        if not isinstance(spec, dict):
            raise ConfigParseError(f"field '{context}' must be an object")
        ctx = context + "."
        _check_known(spec, {"horizon", "n_intervals", "max_iter"}, ctx)
        horizon = _number(spec, "horizon", ctx)
        if horizon <= 0:
            raise ConfigParseError(f"field '{ctx}horizon' must be positive, got {horizon}")
        n = _get(spec, "n_intervals", ctx)
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ConfigParseError(f"field '{ctx}n_intervals' must be a positive integer")
        max_iter = spec.get("max_iter", 80)
        if not isinstance(max_iter, int) or isinstance(max_iter, bool) or max_iter < 1:
            raise ConfigParseError(f"field '{ctx}max_iter' must be a positive integer")
        return cls(horizon=horizon, n_intervals=n, max_iter=max_iter)

    def to_dict(self) -> dict:
        out: dict = {"horizon": self.horizon, "n_intervals": self.n_intervals}
        if self.max_iter != 80:
            out["max_iter"] = self.max_iter
        return out


@dataclass(frozen=True)
class PhaseFieldSpec:
    """Phase-field block: (x_a, x_b) rectangle, resolution, slaved values."""

    x_a: tuple[float, float]
    x_b: tuple[float, float]
    resolution: int = 21
    slaved: tuple[float, float] | None = None
    trajectories: bool = True

    @classmethod
    def from_dict(cls, spec, context: str) -> "PhaseFieldSpec":
        if not isinstance(spec, dict):
            raise ConfigParseError(f"field '{context}' must be an object")
        ctx = context + "."
        _check_known(spec, {"x_a", "x_b", "resolution", "slaved", "trajectories"}, ctx)

        def pair(key: str) -> tuple[float, float]:
            value = _get(spec, key, ctx)
            if not isinstance(value, list) or len(value) != 2:
                raise ConfigParseError(f"field '{ctx}{key}' must be [lo, hi]")
            lo, hi = float(value[0]), float(value[1])
            if lo < 0 or not hi > lo:
                raise ConfigParseError(
                    f"field '{ctx}{key}' must satisfy 0 <= lo < hi, got [{lo}, {hi}]"
                )
            return lo, hi

        resolution = spec.get("resolution", 21)
        if not isinstance(resolution, int) or isinstance(resolution, bool) or resolution < 2:
            raise ConfigParseError(f"field '{ctx}resolution' must be an integer >= 2")
        slaved = spec.get("slaved")
        if slaved is not None:
            if not isinstance(slaved, list) or len(slaved) != 2:
                raise ConfigParseError(f"field '{ctx}slaved' must be [x_l, x_s]")
            slaved = (float(slaved[0]), float(slaved[1]))
        trajectories = spec.get("trajectories", True)
        if not isinstance(trajectories, bool):
            raise ConfigParseError(f"field '{ctx}trajectories' must be a boolean")
        return cls(
            x_a=pair("x_a"),
            x_b=pair("x_b"),
            resolution=resolution,
            slaved=slaved,
            trajectories=trajectories,
        )

    def to_dict(self) -> dict:
        out: dict = {"x_a": list(self.x_a), "x_b": list(self.x_b), "resolution": self.resolution}
        if self.slaved is not None:
            out["slaved"] = list(self.slaved)
        if not self.trajectories:
            out["trajectories"] = False
        return out


@dataclass(frozen=True)
class Scenario:
    """A parsed scenario file."""

    name: str
    model: str
    params: SwarmParams | LumpedParams | TwoClassParams
    controller: ControlPolicy | None
    initial_state: tuple[float, ...]
    integrator: IntegratorConfig
    sweep: SweepSpec | None = None
    optimal_control: OCSpec | None = None
    phase_field: PhaseFieldSpec | None = None

    @classmethod
    def from_dict(cls, doc) -> "Scenario":
        if not isinstance(doc, dict):
            raise ConfigParseError("scenario document must be an object")
        allowed = {
            "schema_version",
            "name",
            "model",
            "params",
            "controller",
            "initial_state",
            "integrator",
            "sweep",
            "optimal_control",
            "phase_field",
        }
        _check_known(doc, allowed, "")
        version = _get(doc, "schema_version", "")
        if version != SCHEMA_VERSION:
            raise ConfigParseError(
                f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})"
            )
        name = _get(doc, "name", "")
        if not isinstance(name, str) or not name:
            raise ConfigParseError("field 'name' must be a nonempty string")
        model = _get(doc, "model", "")
        if model not in MODELS:
            raise ConfigParseError(f"field 'model' must be one of {MODELS}, got {model!r}")
        params = _params_from_dict(model, _get(doc, "params", ""), "params")
        controller = None
        if doc.get("controller") is not None:
            if model == "one-segment":
                raise ConfigParseError(
                    "field 'controller' is not supported by the one-segment model"
                )
            controller = _controller_from_dict(doc["controller"], "controller")
        state = _get(doc, "initial_state", "")
        size = _STATE_SIZES[model]
        if not isinstance(state, list) or len(state) != size:
            raise ConfigParseError(
                f"field 'initial_state' must be a list of {size} numbers for {model}"
            )
        initial_state = tuple(float(v) for v in state)
        if any(v < 0 for v in initial_state):
            raise ConfigParseError("field 'initial_state' must be componentwise nonnegative")
        integrator = _integrator_from_dict(_get(doc, "integrator", ""), "integrator")
        sweep = None
        if doc.get("sweep") is not None:
            sweep = SweepSpec.from_dict(doc["sweep"], "sweep")
            if sweep.parameter == "u" and model not in ("lumped", "two-class"):
                raise ConfigParseError("field 'sweep.parameter': u sweeps need a lumped or two-class model")
            if sweep.parameter == "lambda_s" and model != "two-segment":
                raise ConfigParseError("field 'sweep.parameter': lambda_s sweeps need the two-segment model")
        optimal_control = None
        if doc.get("optimal_control") is not None:
            if model != "two-segment":
                raise ConfigParseError("field 'optimal_control' requires the two-segment model")
            optimal_control = OCSpec.from_dict(doc["optimal_control"], "optimal_control")
        phase = None
        if doc.get("phase_field") is not None:
            if model != "two-segment":
                raise ConfigParseError("field 'phase_field' requires the two-segment model")
            phase = PhaseFieldSpec.from_dict(doc["phase_field"], "phase_field")
        return cls(
            name=name,
            model=model,
            params=params,
            controller=controller,
            initial_state=initial_state,
            integrator=integrator,
            sweep=sweep,
            optimal_control=optimal_control,
            phase_field=phase,
        )

    def to_dict(self) -> dict:
        doc: dict = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "model": self.model,
            "params": _params_to_dict(self.model, self.params),
            "initial_state": list(self.initial_state),
            "integrator": _integrator_to_dict(self.integrator),
        }
        if self.controller is not None:
            doc["controller"] = _controller_to_dict(self.controller)
        if self.sweep is not None:
            doc["sweep"] = self.sweep.to_dict()
        if self.optimal_control is not None:
            doc["optimal_control"] = self.optimal_control.to_dict()
        if self.phase_field is not None:
            doc["phase_field"] = self.phase_field.to_dict()
        return doc

    @classmethod
    def load(cls, path) -> "Scenario":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as err:
            raise ConfigParseError(f"cannot read scenario file {path}: {err}") from err
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigParseError(f"scenario file {path} is not valid JSON: {err}") from err
        return cls.from_dict(doc)

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
