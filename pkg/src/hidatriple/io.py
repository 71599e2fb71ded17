"""Run configuration and file output."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .characters import DirichletChar
from .errors import ConfigError
from .families import LambdaAdicForm, delta_family, eisenstein_family
from .iwasawa import weight_point


@dataclass
class Precisions:
    Np: int = 8
    B: int = 20
    M: tuple[int, int, int] | None = None

    def __post_init__(self) -> None:
        if self.Np <= 0 or self.B <= 0:
            raise ConfigError("precisions must be positive")
        if self.M is not None:
            self.M = tuple(int(m) for m in self.M)
            if len(self.M) != 3 or min(self.M) <= 0:
                raise ConfigError("M needs three positive truncation degrees")


@dataclass
class FamilySource:
    """Where a family comes from: a builtin recipe or a JSON file from ``family build``."""

    source: str = "delta-hida"  # delta-hida | eisenstein | ingest
    k0: int = 12
    M: int = 1
    Np: int = 12
    B: int | None = None
    path: str | None = None


@dataclass
class RunConfig:
    p: int = 11
    prec: Precisions = field(default_factory=Precisions)
    F: FamilySource = field(default_factory=lambda: FamilySource(M=7))
    G2: FamilySource = field(default_factory=FamilySource)
    G3: FamilySource = field(default_factory=FamilySource)
    grid: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]] = ((32, 42, 52, 62), (12,), (12,))
    held_out: tuple[tuple[int, int, int], ...] = ((72, 12, 12),)
    a: int | None = None
    levels: tuple[int, int, int] = (1, 1, 1)
    asserted: dict[str, bool] = field(default_factory=lambda: {"2": False, "4": False})
    allow_extension: bool = True
    workers: int = 1
    out: str = "out"

    def __post_init__(self) -> None:
        if self.p < 3 or self.p % 2 == 0:
            raise ConfigError("p must be an odd prime")
        self.grid = tuple(tuple(int(k) for k in g) for g in self.grid)
        self.held_out = tuple(tuple(int(k) for k in Q) for Q in self.held_out)
        self.levels = tuple(self.levels)
        for Q in [(a, b, c) for a in self.grid[0] for b in self.grid[1] for c in self.grid[2]] + list(self.held_out):
            if sum(Q) % 2 or Q[0] < Q[1] + Q[2]:
                raise ConfigError(f"{Q} is not an unbalanced point")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> RunConfig:
        d = dict(d)
        if "prec" in d:
            d["prec"] = Precisions(**d["prec"])
        for k in ("F", "G2", "G3"):
            if k in d:
                d[k] = FamilySource(**d[k])
        if "asserted" in d:
            d["asserted"] = {str(k): bool(v) for k, v in d["asserted"].items()}
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)


def max_q_needed(cfg: RunConfig) -> int:
    """q-precision of G2, G3 needed by one U_p step on the largest weight-k1 Katz basis."""
    from .ordproj import ordinary_projector

    ks = sorted({Q[0] for Q in _all_points(cfg)})
    Bk = max(ordinary_projector(cfg.p, k, cfg.prec.Np).basis.B for k in ks)
    return cfg.p * Bk + cfg.p


def _all_points(cfg: RunConfig) -> list[tuple[int, int, int]]:
    pts = [(a, b, c) for a in cfg.grid[0] for b in cfg.grid[1] for c in cfg.grid[2]]
    return pts + [Q for Q in cfg.held_out if Q not in pts]


def load_family(src: FamilySource, p: int, B: int) -> LambdaAdicForm:
    B = src.B or B
    if src.source == "delta-hida":
        return delta_family(p, Np=src.Np, M=src.M, B=B, k0=src.k0)
    if src.source == "eisenstein":
        c = weight_point(src.k0, p, src.Np)
        return eisenstein_family(DirichletChar.trivial(1), p, src.Np, src.M, B, c)
    if src.source == "ingest":
        if not src.path:
            raise ConfigError("ingest source needs a path")
        return LambdaAdicForm.from_json(json.loads(Path(src.path).read_text()))
    raise ConfigError(f"unknown family source {src.source!r}")


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True, default=str) + "\n")


def write_csv(path: str | Path, header: list[str], rows: list[list[Any]]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
