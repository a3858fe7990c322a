"""Parameter sweeps, critical-temperature search and CSV output."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from . import __version__
from .errors import InvalidBracket, InvalidSpec, MixedSpinError, NonFiniteResult
from .measures import CLAMP_TOL, NEGATIVE_EIGENVALUE_CUTOFF, CorrelationReport, mid, negativity
from .model import FINITE_T, T0_LIMIT, ModelParams, thermal_state

PARAMETERS = ("J", "B", "T")
QUANTITIES = ("negativity", "mid", "mutual_information", "classical_correlation", "Z")
#: quantities that have an unclamped ``<name>_raw`` companion column
RAW_QUANTITIES = ("negativity", "mid", "mutual_information", "classical_correlation")
CSV_DIGITS = 12


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    """A 2-D grid over two of (J, B, T) with the third held fixed.

    ``t0_row`` adds T = 0 to a temperature axis (evaluated as the
    ground-state limit) and allows T = 0 elsewhere in the spec. ``raw``
    adds unclamped companion columns to the output.
    """

    x_axis: Axis
    y_axis: Axis
    fixed: dict
    quantities: tuple = ("negativity", "mid")
    t0_row: bool = False
    raw: bool = False

    def __post_init__(self):
        object.__setattr__(self, "quantities", tuple(self.quantities))
        object.__setattr__(self, "fixed", dict(self.fixed))
        self.validate()

    def validate(self) -> None:
        for label, axis in (("x_axis", self.x_axis), ("y_axis", self.y_axis)):
            if axis.name not in PARAMETERS:
                raise InvalidSpec(f"{label}.name", f"must be one of {PARAMETERS}, got {axis.name!r}")
            if not isinstance(axis.steps, (int, np.integer)) or axis.steps < 2:
                raise InvalidSpec(f"{label}.steps", f"must be an integer >= 2, got {axis.steps!r}")
            if not (math.isfinite(axis.min) and math.isfinite(axis.max)):
                raise InvalidSpec(f"{label}.min", "axis bounds must be finite")
            if axis.max < axis.min:
                raise InvalidSpec(f"{label}.max", f"max {axis.max} is below min {axis.min}")
        if self.x_axis.name == self.y_axis.name:
            raise InvalidSpec("y_axis.name", f"both axes sweep {self.x_axis.name}")
        free = set(PARAMETERS) - {self.x_axis.name, self.y_axis.name}
        if set(self.fixed) != free:
            raise InvalidSpec("fixed", f"must assign exactly {sorted(free)}, got {sorted(self.fixed)}")
        for name, value in self.fixed.items():
            if not math.isfinite(value):
                raise InvalidSpec(f"fixed.{name}", "must be finite")
        if not self.quantities:
            raise InvalidSpec("quantities", "at least one quantity is required")
        for q in self.quantities:
            if q not in QUANTITIES:
                raise InvalidSpec("quantities", f"unknown quantity {q!r}; choose from {QUANTITIES}")
        if len(set(self.quantities)) != len(self.quantities):
            raise InvalidSpec("quantities", "duplicate entries")
        for name, lo in self._lower_bounds():
            if name == "B" and lo < 0:
                raise InvalidSpec("B", "magnetic field must be >= 0")
            if name == "T" and lo < 0:
                raise InvalidSpec("T", "temperature must be >= 0")
            if name == "T" and lo == 0 and not self.t0_row:
                raise InvalidSpec("T", "T = 0 requires t0_row (ground-state limit)")

    def _lower_bounds(self):
        yield self.x_axis.name, self.x_axis.min
        yield self.y_axis.name, self.y_axis.min
        yield from self.fixed.items()

    def axis_values(self, axis: Axis) -> np.ndarray:
        values = axis.values()
        if axis.name == "T" and self.t0_row and values[0] != 0.0:
            values = np.concatenate([[0.0], values])
        return values

    def columns(self) -> tuple:
        cols = [self.x_axis.name, self.y_axis.name]
        for q in self.quantities:
            cols.append(q)
            if self.raw and q in RAW_QUANTITIES:
                cols.append(q + "_raw")
        return tuple(cols)

    def points(self):
        """Grid points as (x, y, ModelParams) in y-major, x-ascending order."""
        xs = self.axis_values(self.x_axis)
        ys = self.axis_values(self.y_axis)
        for y in ys:
            for x in xs:
                values = dict(self.fixed)
                values[self.x_axis.name] = float(x)
                values[self.y_axis.name] = float(y)
                yield float(x), float(y), ModelParams(values["J"], values["B"], values["T"])


@dataclass
class SweepResult:
    spec: SweepSpec
    columns: tuple
    rows: np.ndarray
    metadata: dict = field(default_factory=dict)


PRESETS = {
    "fig1": SweepSpec(Axis("J", -2.0, 2.0, 81), Axis("T", 0.05, 3.0, 60), {"B": 0.0},
                      ("negativity", "mid")),
    "fig2": SweepSpec(Axis("B", 0.0, 3.0, 81), Axis("T", 0.05, 3.0, 60), {"J": 1.0},
                      ("negativity",)),
    "fig3": SweepSpec(Axis("B", 0.0, 3.0, 81), Axis("T", 0.05, 3.0, 60), {"J": 1.0},
                      ("mid",)),
}


def eval_point(p: ModelParams, mode: str = FINITE_T) -> CorrelationReport:
    """Evaluate every correlation quantity at one point."""
    try:
        return mid(p, mode)
    except MixedSpinError as exc:
        exc.args = (f"at J={p.J}, B={p.B}, T={p.T} ({mode}): {exc}",)
        raise


def _row(spec_columns, x, y, p):
    mode = T0_LIMIT if p.T == 0.0 else FINITE_T
    report = eval_point(p, mode)
    row = [x, y]
    for name in spec_columns[2:]:
        row.append(float(getattr(report, name)))
    bad = [n for n, v in zip(spec_columns, row) if not math.isfinite(v)]
    if bad:
        raise NonFiniteResult(
            f"non-finite {', '.join(bad)} at J={p.J}, B={p.B}, T={p.T}"
        )
    return row


def _row_chunk(args):
    columns, chunk = args
    return [_row(columns, x, y, p) for x, y, p in chunk]


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
    """Evaluate ``spec`` on its full grid.

    Points are split into contiguous chunks and farmed out to a process pool
    when ``workers > 1``; chunks are reassembled in submission order, so the
    result does not depend on the worker count.
    """
    spec.validate()
    columns = spec.columns()
    points = list(spec.points())
    workers = default_workers() if workers is None else max(1, int(workers))
    workers = min(workers, max(1, len(points) // 64))
    if workers == 1:
        rows = _row_chunk((columns, points))
    else:
        size = math.ceil(len(points) / (4 * workers))
        chunks = [(columns, points[i:i + size]) for i in range(0, len(points), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [row for part in pool.map(_row_chunk, chunks) for row in part]
    metadata = {
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "negative_eigenvalue_cutoff": NEGATIVE_EIGENVALUE_CUTOFF,
        "clamp_tolerance": CLAMP_TOL,
        "workers": workers,
    }
    return SweepResult(spec, columns, np.array(rows, dtype=float), metadata)


def _format(value: float) -> str:
    text = format(value, f".{CSV_DIGITS}g")
    return "0" if text == "-0" else text


def emit_csv(result: SweepResult, destination) -> None:
    """Write the result as CSV (header, then one line per grid point).

    ``destination`` is a path or a text stream. Numbers carry 12 significant
    digits and lines end in ``\\n``.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_format(v) for v in row])
    text = buf.getvalue()
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        destination.write(text)


def find_critical_temperature(J: float, B: float, t_lo: float = 0.05, t_hi: float = 5.0,
                              tol: float = 1e-6) -> Optional[float]:
    """Temperature above which the thermal negativity vanishes.

    Requires N(t_lo) > 1e-12 and N(t_hi) <= 1e-12; returns ``None`` when the
    bracket shows no such sign structure. Otherwise bisects until the bracket
    is narrower than ``tol`` and returns its midpoint.
    """
    if not (0 < t_lo < t_hi):
        raise InvalidBracket(f"need 0 < t_lo < t_hi, got [{t_lo}, {t_hi}]")
    if tol <= 0:
        raise InvalidBracket(f"tolerance must be positive, got {tol}")

    def entangled(t):
        rho = thermal_state(ModelParams(J, B, t)).rho
        return negativity(rho) > NEGATIVE_EIGENVALUE_CUTOFF

    if not entangled(t_lo) or entangled(t_hi):
        return None
    lo, hi = t_lo, t_hi
    while hi - lo > tol:
        midpoint = 0.5 * (lo + hi)
        if entangled(midpoint):
            lo = midpoint
        else:
            hi = midpoint
    return 0.5 * (lo + hi)


# -- spec files ---------------------------------------------------------------

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_spec_text(text: str, source: str = "<spec>") -> dict:
    """Parse the flat ``key = value`` sweep-file format into a dict.

    Blank lines and ``#`` comments are ignored; keys are case-sensitive and
    may appear once. See ``sweeps/README`` in the repository for the keys.
    """
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise InvalidSpec(f"{source}:{lineno}", f"expected 'key = value', got {raw.strip()!r}")
        if key in out:
            raise InvalidSpec(key, f"duplicate key at {source}:{lineno}")
        out[key] = value
    return out


def _float(key, value):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InvalidSpec(key, f"expected a number, got {value!r}") from None


def _int(key, value):
    try:
        return int(value)
    except (TypeError, ValueError):
        raise InvalidSpec(key, f"expected an integer, got {value!r}") from None


def _bool(key, value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise InvalidSpec(key, f"expected a boolean, got {value!r}")


_SPEC_KEYS = {
    "x_name", "x_min", "x_max", "x_steps", "y_name", "y_min", "y_max", "y_steps",
    "J", "B", "T", "quantities", "t0_row", "raw", "preset",
}


def spec_from_mapping(values: dict, base: Optional[SweepSpec] = None) -> SweepSpec:
    """Build a spec from flat keys, layered over ``base`` (e.g. a preset)."""
    unknown = set(values) - _SPEC_KEYS
    if unknown:
        raise InvalidSpec(sorted(unknown)[0], f"unknown key; valid keys are {sorted(_SPEC_KEYS)}")
    if base is None and "preset" in values:
        base = get_preset(values["preset"])
    axes = {}
    for prefix, default in (("x", base.x_axis if base else None), ("y", base.y_axis if base else None)):
        fields = {}
        for attr in ("name", "min", "max", "steps"):
            key = f"{prefix}_{attr}"
            if key in values:
                raw = values[key]
                fields[attr] = (str(raw).strip() if attr == "name"
                                else _int(key, raw) if attr == "steps" else _float(key, raw))
            elif default is not None:
                fields[attr] = getattr(default, attr)
            else:
                raise InvalidSpec(key, "missing")
        axes[prefix] = Axis(**fields)
    names = {axes["x"].name, axes["y"].name}
    fixed = {}
    for name in PARAMETERS:
        if name in names:
            if name in values:
                raise InvalidSpec(name, "is swept on an axis and cannot also be fixed")
            continue
        if name in values:
            fixed[name] = _float(name, values[name])
        elif base is not None and name in base.fixed:
            fixed[name] = base.fixed[name]
        else:
            raise InvalidSpec(f"fixed.{name}", "missing value for the parameter held fixed")
    if "quantities" in values:
        q = values["quantities"]
        quantities = tuple(s.strip() for s in q.split(",") if s.strip()) if isinstance(q, str) else tuple(q)
    elif base is not None:
        quantities = base.quantities
    else:
        raise InvalidSpec("quantities", "missing")
    t0_row = _bool("t0_row", values["t0_row"]) if "t0_row" in values else (base.t0_row if base else False)
    raw = _bool("raw", values["raw"]) if "raw" in values else (base.raw if base else False)
    return SweepSpec(axes["x"], axes["y"], fixed, quantities, t0_row, raw)


def load_spec_file(path, base: Optional[SweepSpec] = None) -> SweepSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidSpec("spec", f"cannot read {path}: {exc.strerror}") from exc
    return spec_from_mapping(parse_spec_text(text, str(path)), base)


def get_preset(name: str) -> SweepSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise InvalidSpec("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def with_overrides(spec: SweepSpec, **overrides) -> SweepSpec:
    """Replace top-level spec fields, skipping ``None`` values."""
    return replace(spec, **{k: v for k, v in overrides.items() if v is not None})
