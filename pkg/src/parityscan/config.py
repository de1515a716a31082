"""Run configuration: TOML schema, strict validation, and the config echo.

The schema is versioned and closed: unknown keys are rejected so that typos
fail loudly instead of silently running with defaults.  A RunConfig can be
rebuilt from the mapping echoed into every JSON output, which is what makes
runs reproducible from their own artifacts.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .detection import DetectorModel
from .errors import DomainError, ParseError, TruncationOverflow, ValidationError
from .estimator import MODES, ScanGrid, SeedSpec
from .fock import DensityMatrix, TruncationPolicy
from . import states

SCHEMA_VERSION = 1

STATE_KINDS = ("vacuum", "coherent", "fock", "phase_diffused", "mixture")
OUTPUT_FORMATS = ("csv", "json", "matrix")

_STATE_PARAM_KEYS = {
    "vacuum": set(),
    "coherent": {"alpha0_re", "alpha0_im"},
    "fock": {"n"},
    "phase_diffused": {"alpha0_mag", "center_phase", "modulation_amplitude", "nodes"},
    "mixture": {"components"},
}


def _require_float(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ValidationError(f"{where}: must be finite, got {value!r}")
    return out


def _require_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    return value


def _require_str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise ValidationError(f"{where}: expected a string, got {value!r}")
    return value


def _reject_unknown(section: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ValidationError(f"{where}: unknown key(s) {sorted(unknown)}")


@dataclass(frozen=True)
class StateSpec:
    """Declarative description of the signal state."""

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in STATE_KINDS:
            raise ValidationError(
                f"state.kind: must be one of {STATE_KINDS}, got {self.kind!r}"
            )
        _reject_unknown(self.params, _STATE_PARAM_KEYS[self.kind], f"state({self.kind})")
        object.__setattr__(self, "params", dict(self.params))

    def build(self, policy: TruncationPolicy) -> DensityMatrix:
        p = self.params
        if self.kind == "vacuum":
            return states.vacuum(policy)
        if self.kind == "coherent":
            re = _require_float(p.get("alpha0_re", 0.0), "state.alpha0_re")
            im = _require_float(p.get("alpha0_im", 0.0), "state.alpha0_im")
            return states.coherent(complex(re, im), policy)
        if self.kind == "fock":
            return states.fock(_require_int(p.get("n", 0), "state.n"), policy)
        if self.kind == "phase_diffused":
            spec = states.PhaseDiffusionSpec(
                center_phase=_require_float(p.get("center_phase", 0.0), "state.center_phase"),
                modulation_amplitude=_require_float(
                    p.get("modulation_amplitude", 0.8), "state.modulation_amplitude"
                ),
                nodes=_require_int(p.get("nodes", 64), "state.nodes"),
            )
            mag = _require_float(p.get("alpha0_mag", 0.0), "state.alpha0_mag")
            return states.phase_diffused_coherent(mag, spec, policy)
        # mixture
        comps = p.get("components")
        if not isinstance(comps, (list, tuple)) or not comps:
            raise ValidationError("state.components: expected a nonempty list")
        built = []
        for k, entry in enumerate(comps):
            where = f"state.components[{k}]"
            if not isinstance(entry, Mapping):
                raise ValidationError(f"{where}: expected a table")
            entry = dict(entry)
            weight = _require_float(entry.pop("weight", None), f"{where}.weight")
            kind = _require_str(entry.pop("kind", ""), f"{where}.kind")
            if kind == "mixture":
                raise ValidationError(f"{where}.kind: nested mixtures are not supported")
            built.append((weight, StateSpec(kind, entry).build(policy)))
        return states.mixture(built)

    def to_mapping(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_mapping(cls, section: Mapping[str, Any]) -> "StateSpec":
        section = dict(section)
        kind = _require_str(section.pop("kind", "vacuum"), "state.kind")
        return cls(kind, section)


@dataclass(frozen=True)
class RunConfig:
    """Everything one scan needs, validated before any computation starts."""

    state: StateSpec = StateSpec("vacuum")
    detector: DetectorModel = DetectorModel()
    policy: TruncationPolicy = TruncationPolicy()
    grid: ScanGrid = field(default_factory=lambda: ScanGrid.uniform())
    n_intervals: int = 8000
    seed: SeedSpec = SeedSpec(0)
    mode: str = "both"
    workers: int = 1
    output_dir: str = "."
    basename: str = "surface"
    formats: tuple[str, ...] = ("csv", "json")

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValidationError(f"run.mode: must be one of {MODES}, got {self.mode!r}")
        if self.n_intervals < 1:
            raise ValidationError(f"run.n_intervals: must be >= 1, got {self.n_intervals}")
        if self.workers < 1:
            raise ValidationError(f"run.workers: must be >= 1, got {self.workers}")
        bad = [f for f in self.formats if f not in OUTPUT_FORMATS]
        if bad or not self.formats:
            raise ValidationError(
                f"output.formats: must be a nonempty subset of {OUTPUT_FORMATS}, got {self.formats!r}"
            )

    def build_state(self) -> DensityMatrix:
        return self.state.build(self.policy)

    def with_overrides(self, **kwargs: Any) -> "RunConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def to_mapping(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "state": self.state.to_mapping(),
            "detector": {
                "eta": self.detector.eta,
                "transmission": self.detector.transmission,
                "visibility": self.detector.visibility,
                "dark_mean": self.detector.dark_mean,
            },
            "truncation": {
                "cutoff": self.policy.cutoff,
                "tail_tol": self.policy.tail_tol,
            },
            "grid": {
                "radial_levels": list(self.grid.radial_levels),
                "phases": list(self.grid.phases),
            },
            "run": {
                "n_intervals": self.n_intervals,
                "seed": self.seed.master_seed,
                "mode": self.mode,
                "workers": self.workers,
            },
            "output": {
                "directory": self.output_dir,
                "basename": self.basename,
                "formats": list(self.formats),
            },
        }

    @classmethod
    def from_mapping(cls, doc: Mapping[str, Any]) -> "RunConfig":
        if not isinstance(doc, Mapping):
            raise ValidationError("config: top level must be a table")
        doc = dict(doc)
        _reject_unknown(
            doc,
            {"schema_version", "state", "detector", "truncation", "grid", "run", "output"},
            "config",
        )
        version = doc.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValidationError(
                f"schema_version: expected {SCHEMA_VERSION}, got {version!r}"
            )

        def section(name: str) -> dict:
            sec = doc.get(name, {})
            if not isinstance(sec, Mapping):
                raise ValidationError(f"{name}: expected a table")
            return dict(sec)

        state = StateSpec.from_mapping(section("state"))

        det = section("detector")
        _reject_unknown(det, {"eta", "transmission", "visibility", "dark_mean"}, "detector")
        try:
            detector = DetectorModel(
                eta=_require_float(det.get("eta", 0.70), "detector.eta"),
                transmission=_require_float(det.get("transmission", 0.986), "detector.transmission"),
                visibility=_require_float(det.get("visibility", 0.985), "detector.visibility"),
                dark_mean=_require_float(det.get("dark_mean", 0.0), "detector.dark_mean"),
            )
        except DomainError as exc:
            raise ValidationError(f"detector.{exc}") from exc

        trunc = section("truncation")
        _reject_unknown(trunc, {"cutoff", "tail_tol"}, "truncation")
        try:
            policy = TruncationPolicy(
                cutoff=_require_int(trunc.get("cutoff", 48), "truncation.cutoff"),
                tail_tol=_require_float(trunc.get("tail_tol", 1e-9), "truncation.tail_tol"),
            )
        except DomainError as exc:
            raise ValidationError(f"truncation.{exc}") from exc

        gsec = section("grid")
        _reject_unknown(
            gsec,
            {"n_radial", "n_phases", "max_n_vac", "radial_levels", "phases"},
            "grid",
        )
        explicit = "radial_levels" in gsec or "phases" in gsec
        uniform = "n_radial" in gsec or "n_phases" in gsec or "max_n_vac" in gsec
        if explicit and uniform:
            raise ValidationError(
                "grid: give either explicit radial_levels/phases or uniform "
                "n_radial/n_phases/max_n_vac, not both"
            )
        try:
            if explicit:
                levels = gsec.get("radial_levels")
                phases = gsec.get("phases")
                if not isinstance(levels, list) or not isinstance(phases, list):
                    raise ValidationError(
                        "grid.radial_levels/grid.phases: both lists are required"
                    )
                grid = ScanGrid(
                    tuple(_require_float(x, "grid.radial_levels") for x in levels),
                    tuple(_require_float(x, "grid.phases") for x in phases),
                )
            else:
                grid = ScanGrid.uniform(
                    n_radial=_require_int(gsec.get("n_radial", 20), "grid.n_radial"),
                    n_phases=_require_int(gsec.get("n_phases", 40), "grid.n_phases"),
                    max_n_vac=_require_float(gsec.get("max_n_vac", 4.0), "grid.max_n_vac"),
                )
        except DomainError as exc:
            raise ValidationError(f"grid.{exc}") from exc

        run = section("run")
        _reject_unknown(run, {"n_intervals", "seed", "mode", "workers"}, "run")
        try:
            seed = SeedSpec(_require_int(run.get("seed", 0), "run.seed"))
        except DomainError as exc:
            raise ValidationError(f"run.seed: {exc}") from exc

        out = section("output")
        _reject_unknown(out, {"directory", "basename", "formats"}, "output")
        formats = out.get("formats", ["csv", "json"])
        if not isinstance(formats, list):
            raise ValidationError(f"output.formats: expected a list, got {formats!r}")

        try:
            cfg = cls(
                state=state,
                detector=detector,
                policy=policy,
                grid=grid,
                n_intervals=_require_int(run.get("n_intervals", 8000), "run.n_intervals"),
                seed=seed,
                mode=_require_str(run.get("mode", "both"), "run.mode"),
                workers=_require_int(run.get("workers", 1), "run.workers"),
                output_dir=_require_str(out.get("directory", "."), "output.directory"),
                basename=_require_str(out.get("basename", "surface"), "output.basename"),
                formats=tuple(_require_str(f, "output.formats") for f in formats),
            )
        except DomainError as exc:
            raise ValidationError(str(exc)) from exc
        try:
            cfg.build_state()
        except (DomainError, TruncationOverflow) as exc:
            raise ValidationError(f"state: {exc}") from exc
        return cfg


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a TOML run configuration."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"malformed config {path}: {exc}") from exc
    return RunConfig.from_mapping(doc)
