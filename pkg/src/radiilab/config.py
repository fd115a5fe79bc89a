"""Experiment configuration: typed parameter access with strict key accounting.

Every key in a config must be consumed by exactly one operation; leftovers
are input errors naming the offending keys, never warnings.  Set
descriptions are given under the ``spec.`` prefix (or ``spec.file`` pointing
at a spec file whose keys are unprefixed).
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from .dataio import parse_grid, parse_kv, parse_number
from .errors import InputError
from .measures import (
    Cantor,
    CantorSpec,
    Interval,
    ProductSpec,
    Scaled,
    SetSpec,
    TranslateUnion,
    lattice_interval_product,
    two_piece_cantor,
)

EXPERIMENT_NAMES = (
    "radius",
    "incidence",
    "sharpness",
    "fourier",
    "energy",
    "intersect",
    "radii-set",
    "dimension",
)


class ParamReader:
    """Typed access to raw string parameters with consumed-key tracking."""

    def __init__(self, params: dict[str, str]):
        self._params = dict(params)
        self._consumed: set[str] = set()

    def has(self, key: str) -> bool:
        return key in self._params

    def _raw(self, key: str):
        self._consumed.add(key)
        return self._params.get(key)

    def get_str(self, key: str, default: str | None = None) -> str | None:
        raw = self._raw(key)
        return default if raw is None else raw

    def get_float(self, key: str, default: float | None = None) -> float | None:
        raw = self._raw(key)
        return default if raw is None else parse_number(raw)

    def get_int(self, key: str, default: int | None = None) -> int | None:
        raw = self._raw(key)
        if raw is None:
            return default
        value = parse_number(raw)
        if value != int(value):
            raise InputError(f"{key} must be an integer, got {raw!r}")
        return int(value)

    def get_bool(self, key: str, default: bool = False) -> bool:
        raw = self._raw(key)
        if raw is None:
            return default
        low = raw.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise InputError(f"{key} must be a boolean, got {raw!r}")

    def get_grid(self, key: str, default: list[float] | None = None) -> list[float] | None:
        raw = self._raw(key)
        return default if raw is None else parse_grid(raw)

    def require(self, key: str, kind: str = "str"):
        getter = {
            "str": self.get_str,
            "float": self.get_float,
            "int": self.get_int,
            "grid": self.get_grid,
        }[kind]
        value = getter(key)
        if value is None:
            raise InputError(f"missing required config key {key!r}")
        return value

    def keys_with_prefix(self, prefix: str) -> list[str]:
        return [k for k in self._params if k.startswith(prefix)]

    def unused_keys(self) -> list[str]:
        return sorted(set(self._params) - self._consumed)

    def finish(self) -> None:
        leftover = self.unused_keys()
        if leftover:
            raise InputError(
                "unknown config keys (not consumed by any operation): "
                + ", ".join(leftover)
            )


@dataclass
class ExperimentConfig:
    """A fully parsed experiment invocation."""

    experiment: str
    params: dict[str, str]
    seed: int = 0
    output_path: str | None = None
    plot: bool = False
    config_text: str = ""

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_NAMES:
            raise InputError(
                f"unknown experiment {self.experiment!r}; expected one of "
                + ", ".join(EXPERIMENT_NAMES)
            )

    @property
    def config_hash(self) -> str:
        canon = [f"experiment = {self.experiment}", f"seed = {self.seed}"]
        canon += [f"{k} = {self.params[k]}" for k in sorted(self.params)]
        digest = hashlib.sha256("\n".join(canon).encode()).hexdigest()
        return f"sha256:{digest[:16]}"

    def reader(self) -> ParamReader:
        return ParamReader(self.params)


def load_config(
    experiment: str | None,
    config_path: str | None,
    overrides: list[str],
    seed_flag: int | None = None,
    out_flag: str | None = None,
    plot_flag: bool = False,
) -> ExperimentConfig:
    """Merge config file and key=value overrides into an ExperimentConfig."""
    params: dict[str, str] = {}
    text = ""
    if config_path:
        text = Path(config_path).read_text()
        params.update(parse_kv(text))
    for item in overrides:
        if "=" not in item:
            raise InputError(f"override must look like key=value, got {item!r}")
        key, value = item.split("=", 1)
        params[key.strip()] = value.strip()

    file_experiment = params.pop("experiment", None)
    name = experiment or file_experiment
    if name is None:
        raise InputError("no experiment named (subcommand or 'experiment =' key)")
    if experiment and file_experiment and experiment != file_experiment:
        raise InputError(
            f"config names experiment {file_experiment!r} but {experiment!r} was invoked"
        )

    seed = seed_flag
    if seed is None and "seed" in params:
        seed = int(parse_number(params.pop("seed")))
    elif "seed" in params:
        params.pop("seed")
    out = out_flag or params.pop("out", None)
    plot = plot_flag or params.pop("plot", "false").lower() in ("true", "1", "yes", "on")

    return ExperimentConfig(
        experiment=name,
        params=params,
        seed=0 if seed is None else int(seed),
        output_path=out,
        plot=plot,
        config_text=text,
    )


# ---------------------------------------------------------------------------
# spec parsing
# ---------------------------------------------------------------------------
def spec_from_reader(reader: ParamReader, prefix: str = "spec.") -> SetSpec:
    """Build a SetSpec from dotted keys under ``prefix``.

    ``<prefix>file`` loads a spec file whose keys are unprefixed.  Node types:
    cantor, two_piece_cantor, interval, translate_union, scaled, product,
    lattice_product.
    """
    file_key = f"{prefix}file"
    if reader.has(file_key):
        path = reader.require(file_key)
        sub = ParamReader(parse_kv(Path(path).read_text()))
        spec = _node_from_reader(sub, "")
        sub.finish()
        return spec
    return _node_from_reader(reader, prefix)


def _node_from_reader(reader: ParamReader, prefix: str) -> SetSpec:
    kind = reader.get_str(f"{prefix}type")
    if kind is None:
        raise InputError(f"missing {prefix}type")
    kind = kind.strip().lower()

    if kind == "cantor":
        spec = _cantor_from_reader(reader, prefix)
        return Cantor(spec)
    if kind == "two_piece_cantor":
        alpha = reader.require(f"{prefix}alpha", "float")
        return Cantor(two_piece_cantor(alpha))
    if kind == "interval":
        lo = reader.require(f"{prefix}lo", "float")
        hi = reader.require(f"{prefix}hi", "float")
        return Interval(lo, hi)
    if kind == "translate_union":
        k_min = reader.require(f"{prefix}k_min", "int")
        k_max = reader.require(f"{prefix}k_max", "int")
        child = _node_from_reader(reader, f"{prefix}child.")
        return TranslateUnion(child, k_min, k_max)
    if kind == "scaled":
        factor = reader.require(f"{prefix}factor", "float")
        child = _node_from_reader(reader, f"{prefix}child.")
        return Scaled(child, factor)
    if kind == "product":
        factors = []
        i = 1
        while reader.has(f"{prefix}factor{i}.type"):
            factors.append(_node_from_reader(reader, f"{prefix}factor{i}."))
            i += 1
        if not factors:
            raise InputError(f"product spec at {prefix!r} has no factor1.type")
        return ProductSpec(tuple(factors))
    if kind == "lattice_product":
        span = reader.require(f"{prefix}span", "int")
        if reader.has(f"{prefix}alpha"):
            cantor = two_piece_cantor(reader.require(f"{prefix}alpha", "float"))
        else:
            cantor = _cantor_from_reader(reader, prefix)
        return lattice_interval_product(cantor, span)
    raise InputError(f"unknown spec type {kind!r} at {prefix!r}")


def _cantor_from_reader(reader: ParamReader, prefix: str) -> CantorSpec:
    pieces = reader.require(f"{prefix}pieces", "int")
    ratio = reader.require(f"{prefix}ratio", "float")
    offsets = reader.require(f"{prefix}offsets", "grid")
    return CantorSpec(pieces=pieces, ratio=ratio, offsets=tuple(offsets))
