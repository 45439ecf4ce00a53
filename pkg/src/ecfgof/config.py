"""Study configuration files.

A study file is INI text.  ``[study]`` holds defaults; every section whose
name starts with ``cell`` describes one cell, or a block of cells when it
lists ``grid`` and/or ``zip`` keys:

.. code-block:: ini

    [study]
    label = SL size
    family = sl
    protocol = warp
    M = 200
    seed = 7
    truth = {"family": "sl", "xi": [0, 0], "omega": [[1, 0], [0, 1]], "alpha": [3, 0]}

    [cell sizes]
    grid = n
    n = 100 | 250 | 500
    x = ${n}

``grid`` names keys whose ``|``-separated values are crossed; ``zip`` names
keys whose value lists are walked in step.  ``${key}`` is replaced by the
current value of any grid, zip or plain key; grid and zip keys that are
not settings (``a`` or ``q`` say) serve only as such variables.  Recognised keys mirror the
command-line flags: ``family``, ``protocol`` (``warp``, ``nested`` or
``simple``), ``lambda0``, ``truth``, ``n``, ``m``, ``M``, ``B``, ``L``,
``delta``, ``kernel``, ``seed``, plus ``x``, ``series`` and ``label`` for
reports, and ``x_label`` / ``title`` in ``[study]`` for the plot.
"""

import configparser
import itertools
import json
from dataclasses import dataclass, field
from string import Template

from .distributions import from_dict
from .kernels import parse_kernel

PROTOCOLS = ("warp", "nested", "simple")
CELL_KEYS = {
    "family", "protocol", "lambda0", "truth", "n", "m", "M", "B", "L",
    "delta", "kernel", "seed", "x", "series", "label", "grid", "zip",
}
STUDY_ONLY = {"x_label", "title"}


class ConfigError(ValueError):
    pass


@dataclass
class Cell:
    label: str
    family: str
    protocol: str
    truth: object
    n: int
    m: int
    M: int
    B: int
    L: int
    delta: float
    kernel: object
    seed: int
    lambda0: object = None
    x: float = None
    series: str = ""


@dataclass
class Study:
    label: str
    cells: list = field(default_factory=list)
    x_label: str = "x"
    title: str = ""


def _split(text):
    return [v.strip() for v in text.split("|")]


def _expand(section, name):
    """Plain dicts, one per cell, with lists expanded and templates filled."""
    keys = dict(section)
    auto_label = "label" not in keys
    grid = keys.pop("grid", "").split()
    zipped = keys.pop("zip", "").split()
    for k in grid + zipped:
        if k not in keys:
            raise ConfigError(f"grid/zip key {k!r} has no values")
    grid_vals = [_split(keys[k]) for k in grid]
    zip_vals = [_split(keys[k]) for k in zipped]
    if zip_vals and len({len(v) for v in zip_vals}) != 1:
        raise ConfigError("zip keys must list the same number of values")
    zip_rows = list(zip(*zip_vals)) if zip_vals else [()]
    out = []
    for combo in itertools.product(*grid_vals):
        for zrow in zip_rows:
            cur = dict(keys)
            cur.update(zip(grid, combo))
            cur.update(zip(zipped, zrow))
            if auto_label:
                tags = " ".join(f"{k}={v}" for k, v in zip(grid + zipped, combo + zrow))
                cur["label"] = f"{name} {tags}".strip()
            plain = {k: v for k, v in cur.items() if "${" not in v}
            filled = {k: Template(v).safe_substitute(plain) for k, v in cur.items()}
            out.append((filled, set(grid + zipped)))
    return out


def _json(text, what):
    try:
        return from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what}: invalid JSON ({exc.msg})") from None


def _cell(values, index, variables=()):
    unknown = set(values) - CELL_KEYS - STUDY_ONLY - set(variables)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(unknown))}")
    try:
        family = values["family"].strip().lower()
        protocol = values.get("protocol", "warp").strip().lower()
        if protocol not in PROTOCOLS:
            raise ConfigError(f"protocol must be one of {', '.join(PROTOCOLS)}")
        truth = _json(values["truth"], "truth")
        lambda0 = _json(values["lambda0"], "lambda0") if "lambda0" in values else None
        if protocol == "simple" and lambda0 is None:
            raise ConfigError("simple protocol needs lambda0")
        n = int(values["n"])
        M = int(values.get("M", 1000))
        x = values.get("x")
        return Cell(
            label=values.get("label", f"cell {index}"),
            family=family,
            protocol=protocol,
            truth=truth,
            n=n,
            m=int(values.get("m", n)),
            M=M,
            B=int(values.get("B", 199)),
            L=int(values.get("L", M)),
            delta=float(values.get("delta", 0.05)),
            kernel=parse_kernel(values.get("kernel", "gaussian")),
            seed=int(values.get("seed", 0)),
            lambda0=lambda0,
            x=None if x is None else float(x),
            series=values.get("series", ""),
        )
    except KeyError as exc:
        raise ConfigError(f"missing key {exc.args[0]!r}") from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def parse_study(text, source="<string>"):
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str  # keys such as M and B are case sensitive
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    base = dict(cp["study"]) if cp.has_section("study") else {}
    study = Study(
        label=base.pop("label", source),
        x_label=base.pop("x_label", "x"),
        title=base.pop("title", ""),
    )
    for name in cp.sections():
        if not name.lower().startswith("cell"):
            if name != "study":
                raise ConfigError(f"{source}: unexpected section [{name}]")
            continue
        sect = {**base, **dict(cp[name])}
        for values, variables in _expand(sect, name[4:].strip() or name):
            try:
                study.cells.append(_cell(values, len(study.cells), variables))
            except ConfigError as exc:
                raise ConfigError(f"{source} [{name}]: {exc}") from None
    return study


def load_study(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_study(text, str(path))
