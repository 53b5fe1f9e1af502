"""Run configuration: sectioned key=value text files, validated before any
compute, and re-emitted (resolved, with every default filled in) next to the
outputs so runs are reproducible."""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, field

from .spaces import SpaceParams, UnsupportedSpaceError

__all__ = ["RunConfig", "ValidationError", "load_config", "write_resolved"]


class ValidationError(ValueError):
    pass


@dataclass
class RunConfig:
    pipeline: str = "scherk"
    kappa: float = -1.0
    h_mean: float = 0.0
    k: int = 3
    a: float = 1.0
    d: float = 1.0
    alpha: float = math.pi / 8
    truncations: tuple = (2.0, 3.0, 4.0)
    depth: int = 4
    newton_tol: float = 1e-10
    scherk_samples: int = 200
    scherk_smax: float = math.pi / 2 - 1e-3
    out_dir: str = "out"
    meta: dict = field(default_factory=dict)

    def space(self) -> SpaceParams:
        try:
            return SpaceParams(self.kappa, self.h_mean)
        except UnsupportedSpaceError as exc:
            raise ValidationError(str(exc)) from exc

    def validate(self):
        if self.pipeline not in ("scherk", "knoid", "noid2k", "sister", "verify"):
            raise ValidationError(f"unknown pipeline {self.pipeline!r}")
        space = self.space()
        if self.pipeline == "scherk" and space.kappa_e >= 0:
            raise ValidationError("the scherk pipeline needs kappa + 4 H^2 < 0")
        if self.k < 2:
            raise ValidationError("k must be >= 2")
        if self.pipeline in ("knoid", "sister") and self.a <= 0:
            raise ValidationError("a must be positive")
        if self.pipeline == "noid2k":
            if self.d <= 0:
                raise ValidationError("d must be positive")
            if not 0.0 < self.alpha <= math.pi / (2 * self.k):
                raise ValidationError("alpha must lie in (0, pi/(2k)]")
        if any(t <= 0 for t in self.truncations):
            raise ValidationError("truncations must be positive")
        if list(self.truncations) != sorted(self.truncations):
            raise ValidationError("truncations must be increasing")
        if self.depth < 0 or self.depth > 9:
            raise ValidationError("depth must lie in [0, 9]")
        if self.newton_tol <= 0:
            raise ValidationError("newton_tol must be positive")
        return self


_SCHEMA = {
    "space": {"kappa": float, "h_mean": float},
    "surface": {"pipeline": str, "k": int, "a": float, "d": float,
                "alpha": float, "truncations": "floats"},
    "solver": {"depth": int, "newton_tol": float},
    "scherk": {"samples": ("scherk_samples", int), "smax": ("scherk_smax", float)},
    "output": {"out_dir": str},
}


def load_config(path=None, overrides=None) -> RunConfig:
    """Build a RunConfig from defaults, an optional INI file, and overrides."""
    cfg = RunConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        with open(path) as fh:
            parser.read_file(fh)
        for section, keys in _SCHEMA.items():
            if not parser.has_section(section):
                continue
            for key, spec in keys.items():
                if not parser.has_option(section, key):
                    continue
                raw = parser.get(section, key)
                attr, conv = (spec if isinstance(spec, tuple) else (key, spec))
                if conv == "floats":
                    setattr(cfg, attr, tuple(float(v) for v in raw.replace(",", " ").split()))
                else:
                    setattr(cfg, attr, conv(raw))
    for key, val in (overrides or {}).items():
        if val is not None:
            setattr(cfg, key, val)
    return cfg.validate()


def write_resolved(cfg: RunConfig, path):
    parser = configparser.ConfigParser()
    parser["space"] = {"kappa": repr(cfg.kappa), "h_mean": repr(cfg.h_mean)}
    parser["surface"] = {
        "pipeline": cfg.pipeline, "k": str(cfg.k), "a": repr(cfg.a),
        "d": repr(cfg.d), "alpha": repr(cfg.alpha),
        "truncations": " ".join(repr(t) for t in cfg.truncations),
    }
    parser["solver"] = {"depth": str(cfg.depth), "newton_tol": repr(cfg.newton_tol)}
    parser["scherk"] = {"samples": str(cfg.scherk_samples), "smax": repr(cfg.scherk_smax)}
    parser["output"] = {"out_dir": str(cfg.out_dir)}
    with open(path, "w") as fh:
        parser.write(fh)
    return path
