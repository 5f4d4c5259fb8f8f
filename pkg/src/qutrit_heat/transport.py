"""Heat currents and derived transport metrics.

Sign convention used everywhere: a positive current means heat flowing out of
the bath into the system, so at any steady state the three currents sum to
zero. Scenario notation: the current "J_l when m is hot" is the probe bath
l's current with bath m at the hot temperature and every other bath at the
base temperature (unless explicitly overridden).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Mapping

from .circuit import CircuitParams, QutritSpectrum, derive_spectrum
from .errors import AmbiguousExtremum, UndefinedCoefficient
from .rates import (
    CHANNEL_IDS,
    BathChannel,
    BathSet,
    RateMatrix,
    RESONANT_PAIR,
    assemble_rate_matrix,
)
from .steady import SteadyState, solve_steady

#: A coefficient denominator below this fraction of the gross one-way flow is
#: treated as 0/0 (UndefinedCoefficient) rather than as a value.
UNDEFINED_REL_TOL = 1e-12


@dataclass(frozen=True)
class HeatCurrents:
    """Per-channel heat currents, in units lambda*hbar*omega_r**2.

    scale is the largest gross one-way energy flow of any channel (the sum of
    the absolute contributions before cancellation); it is the natural
    yardstick for "this current is numerically zero".
    """

    j_a: float
    j_b: float
    j_c: float
    scale: float

    def by_channel(self) -> dict[str, float]:
        return {"a": self.j_a, "b": self.j_b, "c": self.j_c}

    @property
    def total(self) -> float:
        return self.j_a + self.j_b + self.j_c


def heat_currents(
    steady: SteadyState,
    rates: RateMatrix,
    spectrum: QutritSpectrum,
) -> HeatCurrents:
    """Per-channel currents J_l = sum_{i<j} w_ji (G_ji p_i - G_ij p_j).

    Each upward transition absorbs the transition energy from the channel's
    bath, each downward one emits it, so the expression is positive when the
    system draws heat from the bath. Because omega20 = omega10 + omega21
    exactly, the three currents sum to zero at any steady state.
    """
    p = steady.p
    freqs = (spectrum.omega10, spectrum.omega21, spectrum.omega20)
    pairs = ((0, 1), (1, 2), (0, 2))
    values = {}
    scale = 0.0
    for cid in CHANNEL_IDS:
        g = rates.per_channel[cid]
        j = 0.0
        gross = 0.0
        for (i, jj), w in zip(pairs, freqs):
            up = w * g[jj, i] * p[i]
            down = w * g[i, jj] * p[jj]
            j += up - down
            gross += up + down
        values[cid] = j
        scale = max(scale, gross)
    return HeatCurrents(j_a=values["a"], j_b=values["b"], j_c=values["c"], scale=scale)


@dataclass(frozen=True)
class TemperatureScenario:
    """Temperature assignment for one run.

    Baths listed in hot sit at hot_temperature, the rest at base, except for
    explicit per-bath overrides (stored sorted, so scenarios hash and compare
    by value). All resulting temperatures must be non-negative.
    """

    hot: frozenset[str] = frozenset()
    base: float = 1.0
    hot_temperature: float = 1.0
    overrides: tuple[tuple[str, float], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "hot", frozenset(self.hot))
        object.__setattr__(self, "overrides", tuple(sorted(dict(self.overrides).items())))
        temps = [self.base, self.hot_temperature] + [t for _, t in self.overrides]
        if any(t < 0 for t in temps):
            raise ValueError("scenario temperatures must be >= 0")

    def temperature(self, bath: str) -> float:
        for b, t in self.overrides:
            if b == bath:
                return t
        return self.hot_temperature if bath in self.hot else self.base

    def temperatures(self, baths) -> dict[str, float]:
        return {b: self.temperature(b) for b in baths}


@dataclass(frozen=True)
class SystemConfig:
    """Full system description minus the bath temperatures.

    merged, when set, names the two channels that dissipate into one shared
    reservoir (their bath id is the sorted concatenation, e.g. "bc").
    resonators optionally pins channel frequencies; by default each resonator
    sits exactly on its assigned transition.
    """

    circuit: CircuitParams
    q: float = 100.0
    lambda_res: float = 1.0
    lambda_off: float = 1.0
    merged: tuple[str, str] | None = None
    resonators: tuple[tuple[str, float], ...] = ()

    def __post_init__(self) -> None:
        if not self.q > 0:
            raise ValueError("q must be positive")
        if self.lambda_res < 0 or self.lambda_off < 0:
            raise ValueError("coupling weights must be >= 0")
        if self.merged is not None:
            pair = tuple(sorted(self.merged))
            if len(pair) != 2 or pair[0] == pair[1] or not set(pair) <= set(CHANNEL_IDS):
                raise ValueError(f"merged must name two distinct channels, got {self.merged}")
            object.__setattr__(self, "merged", pair)
        object.__setattr__(self, "resonators", tuple(sorted(dict(self.resonators).items())))
        for cid, _ in self.resonators:
            if cid not in CHANNEL_IDS:
                raise ValueError(f"unknown resonator channel {cid!r}")

    @cached_property
    def spectrum(self) -> QutritSpectrum:
        return derive_spectrum(self.circuit)

    def bath_of(self, cid: str) -> str:
        if self.merged and cid in self.merged:
            return "".join(self.merged)
        return cid

    def bath_ids(self) -> tuple[str, ...]:
        seen: list[str] = []
        for cid in CHANNEL_IDS:
            b = self.bath_of(cid)
            if b not in seen:
                seen.append(b)
        return tuple(seen)

    def resonator_frequency(self, cid: str) -> float:
        for c, w in self.resonators:
            if c == cid:
                return w
        i, j = RESONANT_PAIR[cid]
        spec = self.spectrum
        return {(0, 1): spec.omega10, (1, 2): spec.omega21, (0, 2): spec.omega20}[(i, j)]

    def channels(self, temperatures: Mapping[str, float]) -> BathSet:
        """Instantiate the three channels at given per-bath temperatures."""
        chans = []
        for cid in CHANNEL_IDS:
            bath = self.bath_of(cid)
            chans.append(
                BathChannel(
                    id=cid,
                    omega=self.resonator_frequency(cid),
                    q=self.q,
                    lambda_res=self.lambda_res,
                    lambda_off=self.lambda_off,
                    temperature=temperatures[bath],
                    bath=bath,
                )
            )
        return BathSet.from_channels(chans)


@dataclass(frozen=True)
class TransportReport:
    """Everything known about one steady-state point."""

    scenario: TemperatureScenario
    steady: SteadyState
    currents: HeatCurrents
    regime: str


def solve_temperatures(
    config: SystemConfig, temperatures: Mapping[str, float]
) -> tuple[SteadyState, HeatCurrents]:
    """Solve the steady state at explicit per-bath temperatures."""
    rates = assemble_rate_matrix(config.spectrum, config.channels(temperatures))
    steady = solve_steady(rates)
    return steady, heat_currents(steady, rates, config.spectrum)


def bath_currents(config: SystemConfig, currents: HeatCurrents) -> dict[str, float]:
    """Aggregate channel currents into per-bath currents (merged baths sum)."""
    out: dict[str, float] = {}
    for cid, j in currents.by_channel().items():
        b = config.bath_of(cid)
        out[b] = out.get(b, 0.0) + j
    return out


def scenario_current(
    config: SystemConfig, scenario: TemperatureScenario, probe: str
) -> float:
    """Heat current of the probe bath under the given scenario."""
    baths = config.bath_ids()
    if probe not in baths:
        raise ValueError(f"probe bath {probe!r} not among {baths}")
    _, currents = solve_temperatures(config, scenario.temperatures(baths))
    return bath_currents(config, currents)[probe]


def transport_report(config: SystemConfig, scenario: TemperatureScenario) -> TransportReport:
    """Solve one scenario and classify its operating regime."""
    temps = scenario.temperatures(config.bath_ids())
    steady, currents = solve_temperatures(config, temps)
    regime = classify_regime(bath_currents(config, currents), temps)
    return TransportReport(scenario=scenario, steady=steady, currents=currents, regime=regime)


def classify_regime(
    currents: Mapping[str, float], temperatures: Mapping[str, float]
) -> str:
    """Label the thermodynamic operation of a steady state.

    "R_l": bath l sits at the minimum temperature and heat is extracted from
    it (J_l > 0). "P_l": bath l sits at the maximum temperature and heat is
    injected into it (J_l < 0). "none" otherwise, including full equilibrium.
    When two baths tie at the relevant extremum and both satisfy the current
    condition, the label is undefined and AmbiguousExtremum is raised (a tied
    bath that is not being cooled/heated does not spoil the other's label).
    If both a refrigerator and a pump label apply at once (impossible without
    a work source) the result is "none" with a warning.
    """
    if set(currents) != set(temperatures):
        raise ValueError("currents and temperatures must cover the same baths")
    temps = dict(temperatures)
    if len(set(temps.values())) == 1:
        return "none"
    tmin = min(temps.values())
    tmax = max(temps.values())
    cooled = [b for b, t in temps.items() if t == tmin and currents[b] > 0.0]
    heated = [b for b, t in temps.items() if t == tmax and currents[b] < 0.0]

    if len(cooled) > 1:
        raise AmbiguousExtremum(
            f"baths {sorted(cooled)} tie for the minimum temperature and are "
            "both cooled; refrigerator label undefined"
        )
    if len(heated) > 1:
        raise AmbiguousExtremum(
            f"baths {sorted(heated)} tie for the maximum temperature and are "
            "both heated; pump label undefined"
        )
    fridge = f"R_{cooled[0]}" if cooled else None
    pump = f"P_{heated[0]}" if heated else None
    if fridge and pump:
        warnings.warn(
            f"simultaneous {fridge} and {pump} without a work source; "
            "reporting none",
            stacklevel=2,
        )
        return "none"
    return fridge or pump or "none"


# ---------------------------------------------------------------------------
# Rectification and circulation coefficients.
# ---------------------------------------------------------------------------


def rectification_from_currents(j_forward: float, j_backward: float, scale: float) -> float:
    """-(J_fwd - J_bwd) / (|J_fwd| + |J_bwd|), guarded against 0/0."""
    denom = abs(j_forward) + abs(j_backward)
    if denom <= UNDEFINED_REL_TOL * scale:
        raise UndefinedCoefficient("forward and backward currents both vanish")
    return -(j_forward - j_backward) / denom


def circulation_from_currents(j_cw: float, j_ccw: float, scale: float) -> float:
    """(|J_cw| - |J_ccw|) / |J_cw + J_ccw|, guarded against 0/0."""
    denom = abs(j_cw + j_ccw)
    if denom <= UNDEFINED_REL_TOL * scale:
        raise UndefinedCoefficient("cycle current products cancel")
    return (abs(j_cw) - abs(j_ccw)) / denom


def _passive_bath(l: str, l_prime: str) -> str:
    (rest,) = set(CHANNEL_IDS) - {l, l_prime}
    return rest


def rectification_3t(
    config: SystemConfig,
    l: str,
    l_prime: str,
    base: float,
    hot: float,
    passive_temperature: float | None = None,
) -> float:
    """Three-terminal rectification between baths l and l'.

    Forward: l' hot, l (and the passive bath) at base; backward: roles
    swapped. The passive bath stays at base unless passive_temperature is
    given. +1 and -1 are perfect diodes (heat flows the same way between l
    and l' in both scenarios).
    """
    if config.merged is not None:
        raise ValueError("three-terminal rectification needs three distinct baths")
    if l == l_prime or not {l, l_prime} <= set(CHANNEL_IDS):
        raise ValueError(f"need two distinct channels among a,b,c, got {l!r},{l_prime!r}")
    overrides = ()
    if passive_temperature is not None:
        overrides = ((_passive_bath(l, l_prime), passive_temperature),)
    fwd = TemperatureScenario(
        hot=frozenset({l_prime}), base=base, hot_temperature=hot, overrides=overrides
    )
    bwd = TemperatureScenario(
        hot=frozenset({l}), base=base, hot_temperature=hot, overrides=overrides
    )
    baths = config.bath_ids()
    _, cf = solve_temperatures(config, fwd.temperatures(baths))
    _, cb = solve_temperatures(config, bwd.temperatures(baths))
    j_fwd = cf.by_channel()[l]
    j_bwd = cb.by_channel()[l_prime]
    return rectification_from_currents(j_fwd, j_bwd, max(cf.scale, cb.scale))


def rectification_2t(
    config: SystemConfig,
    merged: tuple[str, str],
    single: str,
    base: float,
    hot: float,
) -> float:
    """Two-reservoir rectification with channels `merged` sharing one bath.

    Forward: the single-channel bath is hot and the merged bath at base;
    backward: the merged bath is hot. The merged bath's current is the sum
    over its two channels.
    """
    pair = tuple(sorted(merged))
    if single in pair or not set(pair) <= set(CHANNEL_IDS) or len(set(pair)) != 2:
        raise ValueError(f"invalid merge {merged!r} against single {single!r}")
    cfg = replace(config, merged=pair)
    merged_bath = "".join(pair)
    fwd = TemperatureScenario(hot=frozenset({single}), base=base, hot_temperature=hot)
    bwd = TemperatureScenario(hot=frozenset({merged_bath}), base=base, hot_temperature=hot)
    baths = cfg.bath_ids()
    _, cf = solve_temperatures(cfg, fwd.temperatures(baths))
    _, cb = solve_temperatures(cfg, bwd.temperatures(baths))
    j_fwd = bath_currents(cfg, cf)[merged_bath]
    j_bwd = bath_currents(cfg, cb)[single]
    return rectification_from_currents(j_fwd, j_bwd, max(cf.scale, cb.scale))


def circulation(config: SystemConfig, base: float, hot: float) -> float:
    """Circulation coefficient from the six single-hot scenario currents.

    J_cw = J_{a,b} J_{b,c} J_{c,a} and J_ccw = J_{a,c} J_{c,b} J_{b,a},
    where J_{l,m} is bath l's current with m hot and the others at base.
    Perfectly filtered couplings give zero circulation; |C| = 1 means the
    heat always circulates the same way around the triangle.
    """
    if config.merged is not None:
        raise ValueError("circulation needs three distinct baths")
    j: dict[str, dict[str, float]] = {}
    scale = 1.0
    for hot_bath in CHANNEL_IDS:
        scen = TemperatureScenario(hot=frozenset({hot_bath}), base=base, hot_temperature=hot)
        _, cur = solve_temperatures(config, scen.temperatures(config.bath_ids()))
        j[hot_bath] = cur.by_channel()
        scale *= cur.scale
    j_cw = j["b"]["a"] * j["c"]["b"] * j["a"]["c"]
    j_ccw = j["c"]["a"] * j["b"]["c"] * j["a"]["b"]
    return circulation_from_currents(j_cw, j_ccw, scale)
