"""Run configuration: scenario presets, defaults, and the JSON config format.

The config document is JSON with the canonical SI/linear keys below; a
few unit-annotated alternates are accepted on input and converted at the
boundary (``h_hap_km``/``h_ris_km`` in kilometers, ``n0_dbm`` in dBm,
sweep thresholds in dB).  Unknown keys are rejected with the offending
path in the message.  ``serialize_config`` emits the canonical form, so a
round trip through ``parse_config`` reproduces the configuration exactly.

Default parameter set: platform density 5e-7 /m^2, surface density
5e-4 /m^2, platform altitude 50 km, surface height 50 m, path-loss
exponents (2, 3, 3) for the surface-user / platform-surface /
platform-user links, 10 W transmit energy, -92 dBm noise power, preset
``fhs-sf``, 16 elements, distance sampling, 1e5 samples, seed 42.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass

from .analytic import LinkBudget, Mode, SystemModel
from .fading import FadingScenario, RayleighParams, RicianParams, ShadowedRicianParams
from .geometry import NetworkGeometry
from .montecarlo import SamplingMode

__all__ = [
    "ConfigError",
    "PRESETS",
    "RunConfig",
    "ScenarioPreset",
    "SweepSpec",
    "db_to_linear",
    "dbm_to_watts",
    "default_config",
    "derive_seed",
    "linear_to_db",
    "parse_config",
    "serialize_config",
]


class ConfigError(ValueError):
    """Malformed or invalid configuration; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class ScenarioPreset:
    """Named fading environment for the three links."""

    name: str
    fading: FadingScenario


# fhs-sf: frequent heavy shadowing on the surface-user link with severe
# platform-surface fading; ils-wf: infrequent light shadowing with weak fading.
PRESETS = {
    "fhs-sf": ScenarioPreset(
        "fhs-sf",
        FadingScenario(
            ris_user=ShadowedRicianParams(k=0.0071, m=0.739, sigma2=1.0),
            hap_ris=RicianParams(k=0.1, sigma2=1.0),
            hap_user=RayleighParams(sigma2=1.0),
        ),
    ),
    "ils-wf": ScenarioPreset(
        "ils-wf",
        FadingScenario(
            ris_user=ShadowedRicianParams(k=4.0823, m=19.4, sigma2=1.0),
            hap_ris=RicianParams(k=10.0, sigma2=1.0),
            hap_user=RayleighParams(sigma2=1.0),
        ),
    ),
}

SWEEP_VARIABLES = ("rho_th_db", "lambda_ris", "h_hap", "elements")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError("sweep.variable", f"must be one of {SWEEP_VARIABLES}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ConfigError("sweep.values", "must be non-empty")
        diffs = [b - a for a, b in zip(vals, vals[1:])]
        if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)) and len(vals) > 1:
            raise ConfigError("sweep.values", "must be strictly monotone")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class RunConfig:
    model: SystemModel
    sampling: SamplingMode = SamplingMode.DISTANCE
    n_samples: int = 100_000
    seed: int = 42
    scenario: str = "fhs-sf"
    rho_th_db: float = 0.0
    sweep: SweepSpec | None = None
    output_path: str | None = None
    output_format: str = "csv"

    def __post_init__(self):
        if self.n_samples < 1:
            raise ConfigError("samples", "must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed", "must be non-negative")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("format", "must be 'csv' or 'json'")


def default_config(scenario: str = "fhs-sf") -> RunConfig:
    geom = NetworkGeometry(
        lambda_hap=5e-7,
        lambda_ris=5e-4,
        h_hap=50_000.0,
        h_ris=50.0,
        eps_g=2.0,
        eps_q=3.0,
        eps_u=3.0,
    )
    budget = LinkBudget(e_s=10.0, n0=dbm_to_watts(-92.0))
    model = SystemModel(geom, PRESETS[scenario].fading, budget, l_elements=16)
    return RunConfig(model=model, scenario=scenario)


def derive_seed(base: int, tag: str) -> int:
    """Stable 64-bit sub-seed for a named run within a larger command."""
    digest = hashlib.blake2b(f"{base}:{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _take(mapping: dict, path: str, known: dict):
    """Pop known keys with type coercion; reject anything left over."""
    out = {}
    for key, coerce in known.items():
        if key in mapping:
            raw = mapping.pop(key)
            try:
                out[key] = coerce(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{path}{key}", str(exc)) from exc
    if mapping:
        stray = sorted(mapping)
        raise ConfigError(f"{path}{stray[0]}", "unknown key")
    return out


def _exclusive(path: str, d: dict, plain: str, annotated: str, convert):
    if plain in d and annotated in d:
        raise ConfigError(f"{path}{annotated}", f"give either {plain} or {annotated}, not both")
    if annotated in d:
        return convert(d[annotated])
    return d.get(plain)


def parse_config(text: str) -> RunConfig:
    """Parse a JSON config document; defaults fill everything omitted."""
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from exc
    if not isinstance(doc, dict):
        raise ConfigError("document", "top level must be a JSON object")
    top = _take(
        dict(doc),
        "",
        {
            "scenario": str,
            "elements": int,
            "direct_only": bool,
            "mode": str,
            "samples": int,
            "seed": int,
            "rho_th_db": float,
            "geometry": dict,
            "budget": dict,
            "fading": dict,
            "sweep": lambda v: v if v is None or isinstance(v, dict) else _bad_sweep(),
            "output": lambda v: v if v is None else str(v),
            "format": str,
        },
    )
    scenario = top.get("scenario", "fhs-sf")
    if scenario not in PRESETS:
        raise ConfigError("scenario", f"must be one of {sorted(PRESETS)}")
    base = default_config(scenario)
    geom = _parse_geometry(top.get("geometry", {}), base.model.geometry)
    budget = _parse_budget(top.get("budget", {}), base.model.budget)
    scen = _parse_fading(top.get("fading", {}), PRESETS[scenario].fading)
    mode = Mode.DIRECT_ONLY if top.get("direct_only", False) else Mode.RIS_ASSISTED
    sampling = _parse_sampling(top.get("mode", "distance"))
    sweep = _parse_sweep(top.get("sweep"))
    try:
        model = SystemModel(
            geom, scen, budget, l_elements=top.get("elements", 16), mode=mode
        )
        return RunConfig(
            model=model,
            sampling=sampling,
            n_samples=top.get("samples", base.n_samples),
            seed=top.get("seed", base.seed),
            scenario=scenario,
            rho_th_db=top.get("rho_th_db", 0.0),
            sweep=sweep,
            output_path=top.get("output"),
            output_format=top.get("format", "csv"),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(_field_from_message(str(exc)), str(exc)) from exc


def _bad_sweep():
    raise ValueError("sweep must be an object or null")


def _field_from_message(message: str) -> str:
    return message.split(" ", 1)[0]


def _parse_sampling(value: str) -> SamplingMode:
    try:
        return SamplingMode(value)
    except ValueError:
        raise ConfigError("mode", "must be 'distance' or 'field'") from None


def _parse_geometry(raw: dict, base: NetworkGeometry) -> NetworkGeometry:
    d = _take(
        dict(raw),
        "geometry.",
        {
            "lambda_hap": float, "lambda_ris": float,
            "h_hap": float, "h_hap_km": float,
            "h_ris": float, "h_ris_km": float,
            "eps_g": float, "eps_q": float, "eps_u": float,
        },
    )
    h_hap = _exclusive("geometry.", d, "h_hap", "h_hap_km", lambda v: v * 1000.0)
    h_ris = _exclusive("geometry.", d, "h_ris", "h_ris_km", lambda v: v * 1000.0)
    try:
        return NetworkGeometry(
            lambda_hap=d.get("lambda_hap", base.lambda_hap),
            lambda_ris=d.get("lambda_ris", base.lambda_ris),
            h_hap=h_hap if h_hap is not None else base.h_hap,
            h_ris=h_ris if h_ris is not None else base.h_ris,
            eps_g=d.get("eps_g", base.eps_g),
            eps_q=d.get("eps_q", base.eps_q),
            eps_u=d.get("eps_u", base.eps_u),
        )
    except ValueError as exc:
        raise ConfigError("geometry." + _field_from_message(str(exc)), str(exc)) from exc


def _parse_budget(raw: dict, base: LinkBudget) -> LinkBudget:
    d = _take(dict(raw), "budget.", {"e_s": float, "n0": float, "n0_dbm": float})
    n0 = _exclusive("budget.", d, "n0", "n0_dbm", dbm_to_watts)
    try:
        return LinkBudget(e_s=d.get("e_s", base.e_s), n0=n0 if n0 is not None else base.n0)
    except ValueError as exc:
        raise ConfigError("budget." + _field_from_message(str(exc)), str(exc)) from exc


def _parse_fading(raw: dict, base: FadingScenario) -> FadingScenario:
    d = _take(dict(raw), "fading.", {"ris_user": dict, "hap_ris": dict, "hap_user": dict})
    try:
        ru = _take(dict(d.get("ris_user", {})), "fading.ris_user.",
                   {"k": float, "m": float, "sigma2": float})
        hr = _take(dict(d.get("hap_ris", {})), "fading.hap_ris.", {"k": float, "sigma2": float})
        hu = _take(dict(d.get("hap_user", {})), "fading.hap_user.", {"sigma2": float})
        return FadingScenario(
            ris_user=ShadowedRicianParams(
                k=ru.get("k", base.ris_user.k),
                m=ru.get("m", base.ris_user.m),
                sigma2=ru.get("sigma2", base.ris_user.sigma2),
            ),
            hap_ris=RicianParams(
                k=hr.get("k", base.hap_ris.k),
                sigma2=hr.get("sigma2", base.hap_ris.sigma2),
            ),
            hap_user=RayleighParams(sigma2=hu.get("sigma2", base.hap_user.sigma2)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("fading", str(exc)) from exc


def _parse_sweep(raw) -> SweepSpec | None:
    if raw is None:
        return None
    d = _take(dict(raw), "sweep.", {"variable": str, "values": list})
    if "variable" not in d or "values" not in d:
        raise ConfigError("sweep", "needs both 'variable' and 'values'")
    return SweepSpec(variable=d["variable"], values=tuple(d["values"]))


def serialize_config(cfg: RunConfig) -> str:
    """Canonical JSON document; parse_config(serialize_config(cfg)) == cfg."""
    geom = cfg.model.geometry
    doc = {
        "scenario": cfg.scenario,
        "elements": cfg.model.l_elements,
        "direct_only": cfg.model.mode is Mode.DIRECT_ONLY,
        "mode": cfg.sampling.value,
        "samples": cfg.n_samples,
        "seed": cfg.seed,
        "rho_th_db": cfg.rho_th_db,
        "geometry": {
            "lambda_hap": geom.lambda_hap,
            "lambda_ris": geom.lambda_ris,
            "h_hap": geom.h_hap,
            "h_ris": geom.h_ris,
            "eps_g": geom.eps_g,
            "eps_q": geom.eps_q,
            "eps_u": geom.eps_u,
        },
        "budget": {"e_s": cfg.model.budget.e_s, "n0": cfg.model.budget.n0},
        "fading": {
            "ris_user": {
                "k": cfg.model.fading.ris_user.k,
                "m": cfg.model.fading.ris_user.m,
                "sigma2": cfg.model.fading.ris_user.sigma2,
            },
            "hap_ris": {
                "k": cfg.model.fading.hap_ris.k,
                "sigma2": cfg.model.fading.hap_ris.sigma2,
            },
            "hap_user": {"sigma2": cfg.model.fading.hap_user.sigma2},
        },
        "sweep": None if cfg.sweep is None else {
            "variable": cfg.sweep.variable,
            "values": list(cfg.sweep.values),
        },
        "output": cfg.output_path,
        "format": cfg.output_format,
    }
    return json.dumps(doc, indent=2)


def apply_overrides(
    cfg: RunConfig,
    scenario: str | None = None,
    elements: int | None = None,
    samples: int | None = None,
    seed: int | None = None,
    mode: str | None = None,
    direct_only: bool = False,
    output: str | None = None,
    output_format: str | None = None,
) -> RunConfig:
    """Layer command-line flags on top of a parsed configuration."""
    if scenario is not None:
        if scenario not in PRESETS:
            raise ConfigError("scenario", f"must be one of {sorted(PRESETS)}")
        cfg = dataclasses.replace(
            cfg,
            scenario=scenario,
            model=dataclasses.replace(cfg.model, fading=PRESETS[scenario].fading),
        )
    if elements is not None:
        cfg = dataclasses.replace(cfg, model=dataclasses.replace(cfg.model, l_elements=elements))
    if samples is not None:
        cfg = dataclasses.replace(cfg, n_samples=samples)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    if mode is not None:
        cfg = dataclasses.replace(cfg, sampling=_parse_sampling(mode))
    if direct_only:
        cfg = dataclasses.replace(cfg, model=dataclasses.replace(cfg.model, mode=Mode.DIRECT_ONLY))
    if output is not None:
        cfg = dataclasses.replace(cfg, output_path=output)
    if output_format is not None:
        cfg = dataclasses.replace(cfg, output_format=output_format)
    return cfg
