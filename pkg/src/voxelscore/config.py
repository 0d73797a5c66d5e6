"""Run configuration: defaults, key=value config files, CLI overrides.

Config files are plain text, one `key = value` per line, `#` comments.
`penalty_grid` is a comma-separated float list. CLI flags override file
values, which override defaults. `workers` controls execution only and is
deliberately left out of result sidecars so outputs stay byte-identical
across worker counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from .errors import InputError
from .ridge import PenaltyGrid


def _default_grid_values() -> tuple[float, ...]:
    return tuple(float(x) for x in np.logspace(-1.0, 8.0, 10))


@dataclass
class RunConfig:
    k: int = 5
    penalty_grid: tuple[float, ...] = field(default_factory=_default_grid_values)
    outer_folds_pooled: int = 20
    outer_folds_subject: int = 5
    inner_folds: int = 5
    eps: float = 0.01
    n_ceiling_splits: int = 20
    seed: int = 0
    workers: int = 0  # 0 = one worker per CPU

    def __post_init__(self):
        if self.k < 1:
            raise InputError(f"k must be >= 1, got {self.k}")
        for name in ("outer_folds_pooled", "outer_folds_subject", "inner_folds"):
            if getattr(self, name) < 2:
                raise InputError(f"{name} must be >= 2, got {getattr(self, name)}")
        if not (self.eps > 0):
            raise InputError(f"eps must be > 0, got {self.eps}")
        if self.n_ceiling_splits < 1:
            raise InputError(
                f"n_ceiling_splits must be >= 1, got {self.n_ceiling_splits}"
            )
        if self.workers < 0:
            raise InputError(f"workers must be >= 0, got {self.workers}")
        self.penalty_grid = tuple(float(x) for x in self.penalty_grid)
        PenaltyGrid(self.penalty_grid)  # validates ordering/positivity

    def grid(self) -> PenaltyGrid:
        return PenaltyGrid(self.penalty_grid)

    def sidecar_dict(self) -> dict:
        """Math-affecting keys only; excludes workers (see module docstring)."""
        return {
            "k": self.k,
            "penalty_grid": list(self.penalty_grid),
            "outer_folds_pooled": self.outer_folds_pooled,
            "outer_folds_subject": self.outer_folds_subject,
            "inner_folds": self.inner_folds,
            "eps": self.eps,
            "n_ceiling_splits": self.n_ceiling_splits,
            "seed": self.seed,
        }


_INT_KEYS = {
    "k",
    "outer_folds_pooled",
    "outer_folds_subject",
    "inner_folds",
    "n_ceiling_splits",
    "seed",
    "workers",
}
_FLOAT_KEYS = {"eps"}
_KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | {"penalty_grid"}


def parse_config_text(text: str) -> dict:
    """Parse key=value lines into a dict of typed values."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KNOWN_KEYS:
            raise InputError(f"config line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            else:
                out[key] = tuple(float(x) for x in value.split(",") if x.strip())
        except ValueError:
            raise InputError(
                f"config line {lineno}: bad value {value!r} for {key}"
            ) from None
    return out


def load_config_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None


def resolve_config(file_values: dict | None = None,
                   overrides: dict | None = None) -> RunConfig:
    """Defaults <- config file <- explicit overrides (None values skipped)."""
    merged: dict = {}
    for source in (file_values, overrides):
        if source:
            for key, value in source.items():
                if value is None:
                    continue
                if key not in _KNOWN_KEYS:
                    raise InputError(f"unknown config key {key!r}")
                merged[key] = value
    valid = {f.name for f in fields(RunConfig)}
    assert valid == _KNOWN_KEYS
    return RunConfig(**merged)
