"""Run configuration: parsing with field-path errors, validation and canonical serialization."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from math import sqrt
from pathlib import Path

import yaml

from .corpus import DEFAULT_GRID, corpus_entry
from .decay import ClassifierParams
from .exceptions import ConfigurationError
from .grid import Grid
from .localization import EXTENSION_KINDS
from .operators import OperatorSpec

LEAKAGE_SIGMAS = 6.0

_CLASSIFIER_KEYS = ("s", "v", "N0", "N_sweep", "C_cap", "growth_tol", "xi_min", "band_fraction", "band_ratio",
                    "floor", "leak_eps")


@dataclass
class GridConfig:
    x_min: float = DEFAULT_GRID.x_min
    x_max: float = DEFAULT_GRID.x_max
    num_points: int = DEFAULT_GRID.num_points

    def build(self) -> Grid:
        return Grid(float(self.x_min), float(self.x_max), int(self.num_points))


@dataclass
class SignalConfig:
    corpus: str | None = None
    file: str | None = None


@dataclass
class ProbeConfig:
    centers: list | None = None
    radius: float = 1.0


@dataclass
class ScanConfig:
    s_values: list | None = None
    s_star: bool = False


@dataclass
class OutputConfig:
    json: str | None = None
    heatmap: str | None = None
    summary: str | None = None


@dataclass
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    signal: SignalConfig = field(default_factory=SignalConfig)
    probes: ProbeConfig = field(default_factory=ProbeConfig)
    classifier: dict = field(default_factory=dict)
    extension_kinds: list = field(default_factory=lambda: list(EXTENSION_KINDS))
    operator: list | None = None
    scan: ScanConfig = field(default_factory=ScanConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    # -- derived objects ---------------------------------------------------------------
    def classifier_params(self) -> ClassifierParams:
        return ClassifierParams(**self.classifier)

    def operator_spec(self) -> OperatorSpec | None:
        return None if self.operator is None else OperatorSpec.from_list(self.operator)

    def probe_centers(self) -> list:
        if self.probes.centers is not None:
            return list(self.probes.centers)
        if self.signal.corpus is not None:
            return list(corpus_entry(self.signal.corpus).centers)
        raise ConfigurationError("probe centres are required for non-corpus signals", "probes.centers")

    def s_values(self) -> list:
        return list(self.scan.s_values) if self.scan.s_values else [self.classifier_params().s]

    # -- validation ----------------------------------------------------------------------
    def validate(self) -> "RunConfig":
        grid = self.grid.build()
        if (self.signal.corpus is None) == (self.signal.file is None):
            raise ConfigurationError("give exactly one of signal.corpus and signal.file", "signal")
        if self.signal.corpus is not None:
            corpus_entry(self.signal.corpus)
        params = self.classifier_params()
        for s in self.s_values():
            params.with_s(float(s))
        for k in self.extension_kinds:
            if k not in EXTENSION_KINDS:
                raise ConfigurationError(f"unknown extension kind {k!r}", "extension_kinds")
        if not self.extension_kinds:
            raise ConfigurationError("at least one extension kind is required", "extension_kinds")
        self.operator_spec()
        r = float(self.probes.radius)
        if not r > 0:
            raise ConfigurationError("probe radius must be positive", "probes.radius")
        reach = r + LEAKAGE_SIGMAS * sqrt(params.v * params.N_max)
        for i, x0 in enumerate(self.probe_centers()):
            if not grid.contains(x0 - reach, x0 + reach):
                raise ConfigurationError(
                    f"probe {x0} needs [{x0 - reach:g}, {x0 + reach:g}] inside the grid box", f"probes.centers[{i}]")
        return self

    # -- serialization -------------------------------------------------------------------
    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["classifier"] = _canonical_classifier(self.classifier)
        if doc["operator"] is not None:
            doc["operator"] = [_coeff_out(c) for c in doc["operator"]]
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _coeff_out(c):
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


def _coeff_in(c, path):
    if isinstance(c, (list, tuple)) and len(c) == 2:
        return complex(float(c[0]), float(c[1]))
    if isinstance(c, str):
        try:
            return complex(c.replace(" ", ""))
        except ValueError:
            raise ConfigurationError(f"cannot parse coefficient {c!r}", path) from None
    if isinstance(c, (int, float)):
        return c
    raise ConfigurationError(f"cannot parse coefficient {c!r}", path)


def _canonical_classifier(values: dict) -> dict:
    try:
        p = ClassifierParams(**values)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"invalid value ({exc})", "classifier") from None
    out = {k: getattr(p, k) for k in _CLASSIFIER_KEYS}
    out["N_sweep"] = list(out["N_sweep"])
    return out


def _section(doc, key, cls, path):
    raw = doc.get(key, {})
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigurationError("expected a mapping", path)
    known = cls.__dataclass_fields__
    for k in raw:
        if k not in known:
            raise ConfigurationError(f"unknown key {k!r}", f"{path}.{k}")
    return cls(**raw)


_TOP_KEYS = ("grid", "signal", "probes", "classifier", "extension_kinds", "operator", "scan", "output")


def parse_config(doc: dict) -> RunConfig:
    """Build and validate a :class:`RunConfig` from a plain mapping."""
    if not isinstance(doc, dict):
        raise ConfigurationError("configuration must be a mapping", "<root>")
    for k in doc:
        if k not in _TOP_KEYS:
            raise ConfigurationError(f"unknown key {k!r}", k)
    cfg = RunConfig(
        grid=_section(doc, "grid", GridConfig, "grid"),
        signal=_section(doc, "signal", SignalConfig, "signal"),
        probes=_section(doc, "probes", ProbeConfig, "probes"),
        scan=_section(doc, "scan", ScanConfig, "scan"),
        output=_section(doc, "output", OutputConfig, "output"),
    )
    clf = doc.get("classifier") or {}
    if not isinstance(clf, dict):
        raise ConfigurationError("expected a mapping", "classifier")
    for k in clf:
        if k not in _CLASSIFIER_KEYS:
            raise ConfigurationError(f"unknown key {k!r}", f"classifier.{k}")
    cfg.classifier = _canonical_classifier(clf)
    if "extension_kinds" in doc:
        cfg.extension_kinds = list(doc["extension_kinds"])
    if doc.get("operator") is not None:
        ops = doc["operator"]
        if isinstance(ops, str):
            ops = ops.split(",")
        cfg.operator = [_coeff_in(c, f"operator[{i}]") for i, c in enumerate(ops)]
    if cfg.probes.centers is not None:
        cfg.probes.centers = [float(c) for c in cfg.probes.centers]
    if cfg.scan.s_values is not None:
        cfg.scan.s_values = sorted(float(s) for s in cfg.scan.s_values)
    try:
        cfg.grid.x_min, cfg.grid.x_max = float(cfg.grid.x_min), float(cfg.grid.x_max)
    except (TypeError, ValueError):
        raise ConfigurationError("grid bounds must be numbers", "grid") from None
    return cfg.validate()


def load_config(path) -> RunConfig:
    """Read a JSON or YAML configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read configuration: {exc.strerror}", str(path)) from None
    try:
        doc = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigurationError(f"malformed configuration: {exc}", str(path)) from None
    return parse_config(doc)
