"""Grid sweeps of transport metrics and CSV emission.

A sweep evaluates one or two linear-spaced axes over an otherwise fixed
system configuration. Every grid point is independent; per-point failures
(invalid flux, undefined coefficients, degenerate classifications) are
recorded in the row's flags column and never abort the run. Row order is the
row-major order of the grid regardless of how many workers evaluate it.
"""

from __future__ import annotations

import csv
import io
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from math import log10, pi
from pathlib import Path

import numpy as np

from .circuit import CircuitParams, filter_width_advisories
from .errors import QutritHeatError
from .rates import CHANNEL_IDS
from .transport import (
    SystemConfig,
    TemperatureScenario,
    bath_currents,
    circulation_from_currents,
    classify_regime,
    rectification_from_currents,
    solve_temperatures,
)

AXIS_NAMES = (
    "base_temperature",
    "hot_temperature",
    "flux",
    "quality_factor",
    "log10_quality_factor",
    "lambda_off",
)

#: Metric columns the engine can compute. "currents" and "regime" are
#: accepted for explicitness but add no columns; populations, currents and
#: the regime label are always emitted.
METRIC_COLUMNS = ("R_ab", "R_ac", "R_bc", "R2_ab_c", "R2_ac_b", "R2_bc_a", "C")
_NOOP_METRICS = ("currents", "regime")


@dataclass(frozen=True)
class SweepAxis:
    """One linear-spaced sweep axis."""

    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}; expected one of {AXIS_NAMES}")
        if self.count < 2:
            raise ValueError(f"axis {self.name}: point count must be >= 2")
        if not self.start < self.stop:
            raise ValueError(f"axis {self.name}: start must be < stop")
        if self.name in ("base_temperature", "hot_temperature") and self.start < 0:
            raise ValueError(f"axis {self.name}: temperatures must be >= 0")
        if self.name == "lambda_off" and self.start < 0:
            raise ValueError("axis lambda_off: weights must be >= 0")
        if self.name == "quality_factor" and self.start <= 0:
            raise ValueError("axis quality_factor: Q must be positive")

    def values(self) -> list[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]


@dataclass(frozen=True)
class SweepSpec:
    """Grid description: axes, fixed configuration, scenario template, metrics.

    The template scenario supplies the temperatures; base_temperature and
    hot_temperature axes override its base/hot values per grid point. passive
    controls the third bath in three-terminal rectification metrics: "base"
    (stays at the base temperature), "mean" ((base + hot)/2), or an explicit
    number.
    """

    config: SystemConfig
    scenario: TemperatureScenario
    axes: tuple[SweepAxis, ...]
    metrics: tuple[str, ...] = ()
    passive: str | float = "base"
    repin_resonators: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep takes one or two axes")
        names = [ax.name for ax in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("axes must be distinct")
        for m in self.metrics:
            if m not in METRIC_COLUMNS + _NOOP_METRICS:
                raise ValueError(f"unknown metric {m!r}")
        if isinstance(self.passive, str) and self.passive not in ("base", "mean"):
            raise ValueError('passive must be "base", "mean", or a temperature')

    @property
    def metric_columns(self) -> tuple[str, ...]:
        return tuple(m for m in self.metrics if m in METRIC_COLUMNS)

    @property
    def columns(self) -> tuple[str, ...]:
        return (
            tuple(ax.name for ax in self.axes)
            + ("p0", "p1", "p2", "j_a", "j_b", "j_c")
            + self.metric_columns
            + ("regime", "residual", "flags")
        )

    def grid(self) -> list[tuple[float, ...]]:
        """Axis value tuples in row-major order (first axis outermost)."""
        if len(self.axes) == 1:
            return [(v,) for v in self.axes[0].values()]
        outer, inner = self.axes[0].values(), self.axes[1].values()
        return [(u, v) for u in outer for v in inner]


@dataclass(frozen=True)
class SweepResult:
    """Rows of a finished sweep, in deterministic grid order."""

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def undefined_count(self) -> int:
        flag_idx = self.columns.index("flags")
        return sum(1 for r in self.rows if "undefined" in (r[flag_idx] or ""))

    def error_count(self) -> int:
        flag_idx = self.columns.index("flags")
        return sum(1 for r in self.rows if "error:" in (r[flag_idx] or ""))


def _point_config_scenario(
    spec: SweepSpec, values: tuple[float, ...]
) -> tuple[SystemConfig, TemperatureScenario]:
    cfg = spec.config
    scen = spec.scenario
    circuit = cfg.circuit
    cfg_kw: dict = {}
    for ax, v in zip(spec.axes, values):
        if ax.name == "base_temperature":
            scen = replace(scen, base=v)
        elif ax.name == "hot_temperature":
            scen = replace(scen, hot_temperature=v)
        elif ax.name == "flux":
            circuit = CircuitParams(e_j=circuit.e_j, e_c=circuit.e_c, phi=v)
            cfg_kw["circuit"] = circuit
            if spec.repin_resonators:
                cfg_kw["resonators"] = ()
        elif ax.name == "quality_factor":
            cfg_kw["q"] = v
        elif ax.name == "log10_quality_factor":
            cfg_kw["q"] = 10.0 ** v
        elif ax.name == "lambda_off":
            cfg_kw["lambda_off"] = v
    if cfg_kw:
        cfg = replace(cfg, **cfg_kw)
    return cfg, scen


class _PointSolver:
    """Caches scenario solves within a single grid point.

    Rectification and circulation metrics reuse each other's single-hot
    scenario solves; nothing is cached across points.
    """

    def __init__(self, config: SystemConfig, base: float, hot: float):
        self.config = config
        self.base = base
        self.hot = hot
        self._cache: dict = {}

    def solve(self, merged: tuple[str, str] | None, hot_baths: frozenset,
              overrides: tuple = ()):
        key = (merged, hot_baths, overrides)
        if key not in self._cache:
            cfg = self.config if merged is None else replace(self.config, merged=merged)
            scen = TemperatureScenario(
                hot=hot_baths, base=self.base, hot_temperature=self.hot,
                overrides=overrides,
            )
            _, currents = solve_temperatures(cfg, scen.temperatures(cfg.bath_ids()))
            self._cache[key] = (bath_currents(cfg, currents), currents.scale)
        return self._cache[key]

    def _passive_override(self, l: str, l_prime: str, passive: str | float) -> tuple:
        if passive == "base":
            return ()
        (rest,) = set(CHANNEL_IDS) - {l, l_prime}
        t = 0.5 * (self.base + self.hot) if passive == "mean" else float(passive)
        return ((rest, t),)

    def rect_3t(self, l: str, l_prime: str, passive: str | float) -> float:
        ov = self._passive_override(l, l_prime, passive)
        fwd, s1 = self.solve(None, frozenset({l_prime}), ov)
        bwd, s2 = self.solve(None, frozenset({l}), ov)
        return rectification_from_currents(fwd[l], bwd[l_prime], max(s1, s2))

    def rect_2t(self, pair: tuple[str, str], single: str) -> float:
        merged_bath = "".join(pair)
        fwd, s1 = self.solve(pair, frozenset({single}))
        bwd, s2 = self.solve(pair, frozenset({merged_bath}))
        return rectification_from_currents(fwd[merged_bath], bwd[single], max(s1, s2))

    def circulation(self) -> float:
        j = {}
        scale = 1.0
        for m in CHANNEL_IDS:
            cur, s = self.solve(None, frozenset({m}))
            j[m] = cur
            scale *= s
        j_cw = j["b"]["a"] * j["c"]["b"] * j["a"]["c"]
        j_ccw = j["c"]["a"] * j["b"]["c"] * j["a"]["b"]
        return circulation_from_currents(j_cw, j_ccw, scale)

    def metric(self, name: str, passive: str | float) -> float:
        if name == "C":
            return self.circulation()
        if name.startswith("R2_"):
            _, pair, single = name.split("_")
            return self.rect_2t((pair[0], pair[1]), single)
        _, lpair = name.split("_")
        return self.rect_3t(lpair[0], lpair[1], passive)


def _evaluate_point(spec: SweepSpec, values: tuple[float, ...]) -> tuple:
    flags: list[str] = []
    try:
        cfg, scen = _point_config_scenario(spec, values)
        steady, currents = solve_temperatures(cfg, scen.temperatures(cfg.bath_ids()))
    except (QutritHeatError, ValueError, ArithmeticError) as exc:
        flags.append(f"error:{type(exc).__name__}")
        blank = (None,) * (6 + len(spec.metric_columns))
        return values + blank + (None, None, ";".join(flags))

    try:
        regime = classify_regime(
            bath_currents(cfg, currents), scen.temperatures(cfg.bath_ids())
        )
    except QutritHeatError as exc:
        regime = None
        flags.append(f"error:{type(exc).__name__}")

    solver = _PointSolver(cfg, scen.base, scen.hot_temperature)
    metric_cells = []
    for name in spec.metric_columns:
        try:
            metric_cells.append(solver.metric(name, spec.passive))
        except QutritHeatError as exc:
            metric_cells.append(None)
            tag = (
                f"undefined:{name}"
                if type(exc).__name__ == "UndefinedCoefficient"
                else f"error:{type(exc).__name__}:{name}"
            )
            flags.append(tag)

    p = steady.p
    return (
        values
        + (float(p[0]), float(p[1]), float(p[2]))
        + (currents.j_a, currents.j_b, currents.j_c)
        + tuple(metric_cells)
        + (regime, steady.residual, ";".join(flags))
    )


def _evaluate_chunk(spec: SweepSpec, start: int, stop: int) -> list[tuple]:
    grid = spec.grid()
    return [_evaluate_point(spec, grid[k]) for k in range(start, stop)]


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate the grid; output order is independent of worker count."""
    grid = spec.grid()
    n = len(grid)
    if workers <= 1:
        rows = [_evaluate_point(spec, v) for v in grid]
    else:
        bounds = [round(k * n / workers) for k in range(workers + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = pool.map(
                _evaluate_chunk,
                [spec] * workers,
                bounds[:-1],
                bounds[1:],
            )
            rows = [row for chunk in chunks for row in chunk]
    return SweepResult(columns=spec.columns, rows=tuple(rows))


def run_map(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Temperature / coupling maps (no flux or quality-factor axis)."""
    for ax in spec.axes:
        if ax.name in ("flux", "quality_factor", "log10_quality_factor"):
            raise ValueError(f"run_map does not take a {ax.name} axis")
    return run_sweep(spec, workers=workers)


def run_flux_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Sweep with a flux axis; the spectrum is re-derived per point.

    Unless the spec pins resonator frequencies explicitly, each resonator is
    re-pinned to its assigned transition at every flux value. Points outside
    the valid flux domain are flagged per row.
    """
    if not any(ax.name == "flux" for ax in spec.axes):
        raise ValueError("run_flux_sweep requires a flux axis")
    return run_sweep(spec, workers=workers)


def run_q_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Sweep with a quality-factor axis, with a linewidth advisory check."""
    q_axes = [ax for ax in spec.axes if ax.name in ("quality_factor", "log10_quality_factor")]
    if not q_axes:
        raise ValueError("run_q_sweep requires a quality_factor axis")
    ax = q_axes[0]
    q_min = ax.start if ax.name == "quality_factor" else 10.0 ** ax.start
    spectrum = spec.config.spectrum
    resonators = {
        cid: (spec.config.resonator_frequency(cid), q_min) for cid in CHANNEL_IDS
    }
    for note in filter_width_advisories(spectrum, resonators):
        warnings.warn(note, stacklevel=2)
    return run_sweep(spec, workers=workers)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(result: SweepResult, destination) -> None:
    """Write header plus rows; floats carry 17 significant digits.

    Undefined or errored cells are empty fields. Rewriting the same result
    produces a byte-identical file.
    """
    if isinstance(destination, (str, Path)):
        with open(destination, "w", newline="") as fh:
            _write_csv_stream(result, fh)
    else:
        _write_csv_stream(result, destination)


def _write_csv_stream(result: SweepResult, stream: io.TextIOBase) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_format_cell(c) for c in row])


# ---------------------------------------------------------------------------
# Named presets reproducing the bundled parameter maps.
# ---------------------------------------------------------------------------

_MAP_CIRCUIT = CircuitParams(e_j=5.0, e_c=0.5, phi=pi / 2)


def _map_config(q: float = 100.0, lambda_off: float = 1.0) -> SystemConfig:
    return SystemConfig(circuit=_MAP_CIRCUIT, q=q, lambda_res=1.0, lambda_off=lambda_off)


def _preset_fig2() -> SweepSpec:
    # Operation-regime map over (T_b, T_a) with bath c fixed at 2.
    return SweepSpec(
        config=_map_config(),
        scenario=TemperatureScenario(
            hot=frozenset({"a"}), base=1.0, hot_temperature=1.0,
            overrides=(("c", 2.0),),
        ),
        axes=(
            SweepAxis("base_temperature", 0.2, 4.0, 201),
            SweepAxis("hot_temperature", 0.2, 4.0, 201),
        ),
    )


def _preset_fig3() -> SweepSpec:
    # Currents versus T_a with T_b = 1.5 and T_c = 2 held fixed.
    return SweepSpec(
        config=_map_config(),
        scenario=TemperatureScenario(
            hot=frozenset({"a"}), base=1.5, hot_temperature=2.0,
            overrides=(("b", 1.5), ("c", 2.0)),
        ),
        axes=(SweepAxis("hot_temperature", 2.0, 4.0, 501),),
    )


def _rect_axes() -> tuple[SweepAxis, SweepAxis]:
    return (
        SweepAxis("base_temperature", 0.1, 4.0, 201),
        SweepAxis("hot_temperature", 0.1, 4.0, 201),
    )


def _preset_fig4() -> SweepSpec:
    # Three-terminal rectification maps in the perfectly filtered limit.
    return SweepSpec(
        config=_map_config(lambda_off=0.0),
        scenario=TemperatureScenario(hot=frozenset({"a"}), base=1.0, hot_temperature=1.0),
        axes=_rect_axes(),
        metrics=("R_ab", "R_ac", "R_bc"),
    )


def _preset_fig5() -> SweepSpec:
    # Same maps with leaky couplings at Q = 100.
    return SweepSpec(
        config=_map_config(),
        scenario=TemperatureScenario(hot=frozenset({"a"}), base=1.0, hot_temperature=1.0),
        axes=_rect_axes(),
        metrics=("R_ab", "R_ac", "R_bc"),
    )


def _preset_fig6() -> SweepSpec:
    # R_ab with the passive bath at the mean of the other two temperatures.
    return SweepSpec(
        config=_map_config(),
        scenario=TemperatureScenario(hot=frozenset({"a"}), base=1.0, hot_temperature=1.0),
        axes=_rect_axes(),
        metrics=("R_ab",),
        passive="mean",
    )


def _preset_fig7() -> SweepSpec:
    # Circulation coefficient map at Q = 100, phi = pi/2.
    return SweepSpec(
        config=_map_config(),
        scenario=TemperatureScenario(hot=frozenset({"a"}), base=1.0, hot_temperature=1.0),
        axes=(
            SweepAxis("base_temperature", 0.05, 2.0, 201),
            SweepAxis("hot_temperature", 0.05, 4.0, 201),
        ),
        metrics=("C",),
    )


def _preset_fig7c() -> SweepSpec:
    # Flux dependence of the circulation at base 0.9, hot temperature inside
    # the perfect-circulation window of the phi = pi/2 map. The flux range
    # stays inside the region where the fourth level clears the qutrit
    # (omega32 > 0 for these circuit parameters).
    return SweepSpec(
        config=_map_config(),
        scenario=TemperatureScenario(hot=frozenset({"a"}), base=0.9, hot_temperature=3.86),
        axes=(SweepAxis("flux", -4.5, 4.5, 501),),
        metrics=("C",),
    )


def _preset_fig8() -> SweepSpec:
    # Circulation versus base temperature and quality factor at hot T = 2.
    return SweepSpec(
        config=_map_config(),
        scenario=TemperatureScenario(hot=frozenset({"a"}), base=1.0, hot_temperature=2.0),
        axes=(
            SweepAxis("base_temperature", 0.05, 2.0, 201),
            SweepAxis("log10_quality_factor", log10(50.0), 3.0, 201),
        ),
        metrics=("C",),
    )


PRESETS = {
    "fig2": _preset_fig2,
    "fig3": _preset_fig3,
    "fig4": _preset_fig4,
    "fig5": _preset_fig5,
    "fig6": _preset_fig6,
    "fig7": _preset_fig7,
    "fig7c": _preset_fig7c,
    "fig8": _preset_fig8,
}


def preset(name: str) -> SweepSpec:
    """Named sweep spec; raises KeyError listing valid names when unknown."""
    try:
        factory = PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; valid presets: {', '.join(sorted(PRESETS))}"
        ) from None
    return factory()
