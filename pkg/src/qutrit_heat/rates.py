"""Bath-induced transition rates with Lorentzian filtering.

Each bath couples to the qutrit through a resonator of quality factor Q that
acts as a frequency filter. A channel drives all three transitions; the
resonantly assigned one (a: 0<->1, b: 1<->2, c: 0<->2) carries weight
lambda_res, the other two lambda_off, and every rate is suppressed by the
Lorentzian [1 + Q^2 (w/w_l - w_l/w)^2]^-1 evaluated at the transition
frequency. Rate pairs obey local detailed balance at the channel temperature.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import expm1

import numpy as np

from .circuit import QutritSpectrum
from .errors import ChannelMismatch

CHANNEL_IDS = ("a", "b", "c")

# Resonant level-pair assignment of each channel.
RESONANT_PAIR = {"a": (0, 1), "b": (1, 2), "c": (0, 2)}

# Upward transitions (i -> j with E_j > E_i) and their spectrum attribute.
UPWARD_TRANSITIONS = (
    (0, 1, "omega10"),
    (1, 2, "omega21"),
    (0, 2, "omega20"),
)


def bose_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation 1/(exp(omega/T) - 1).

    Exactly 0 at T = 0 (and below occupation 1e-304, where exp would
    overflow). omega must be positive, temperature non-negative.
    """
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0.0:
        return 0.0
    x = omega / temperature
    if x > 700.0:
        return 0.0
    return 1.0 / expm1(x)


def lorentz_filter(omega: float, omega_l: float, q: float) -> float:
    """Resonator suppression factor in (0, 1].

    Equals 1 iff omega == omega_l and is symmetric under omega <-> omega_l.
    Far off resonance it falls like 1/Q^2 at fixed detuning.
    """
    if not (omega > 0 and omega_l > 0 and q > 0):
        raise ValueError("omega, omega_l and q must all be positive")
    d = q * (omega / omega_l - omega_l / omega)
    return 1.0 / (1.0 + d * d)


@dataclass(frozen=True)
class BathChannel:
    """One resonator-mediated coupling to a thermal reservoir.

    bath identifies the physical reservoir the channel dissipates into;
    distinct channels may share a bath (merged-reservoir configurations), in
    which case they must be given the same temperature. Defaults to the
    channel's own id.
    """

    id: str
    omega: float
    q: float
    lambda_res: float
    lambda_off: float
    temperature: float
    bath: str = ""

    def __post_init__(self) -> None:
        if self.id not in CHANNEL_IDS:
            raise ChannelMismatch(f"channel id must be one of a,b,c: {self.id}")
        if not self.omega > 0:
            raise ValueError(f"channel {self.id}: omega must be positive")
        if not self.q > 0:
            raise ValueError(f"channel {self.id}: q must be positive")
        if self.lambda_res < 0 or self.lambda_off < 0:
            raise ValueError(f"channel {self.id}: coupling weights must be >= 0")
        if self.temperature < 0:
            raise ValueError(f"channel {self.id}: temperature must be >= 0")
        if not self.bath:
            object.__setattr__(self, "bath", self.id)

    def coupling_weight(self, pair: tuple[int, int]) -> float:
        """lambda_res on the resonantly assigned level pair, lambda_off else."""
        return self.lambda_res if RESONANT_PAIR[self.id] == pair else self.lambda_off


def _rate_pair(channel: BathChannel, omega_ji: float, weight: float) -> tuple[float, float]:
    """(excitation, relaxation) rates for one transition through one channel."""
    if not omega_ji > 0:
        raise ValueError("omega_ji must be positive (upward transition)")
    d = channel.q * (omega_ji / channel.omega - channel.omega / omega_ji)
    pref = weight * (2.0 * omega_ji / channel.q) / (1.0 + d * d)
    n = bose_occupation(omega_ji, channel.temperature)
    return pref * n, pref * (1.0 + n)


def excitation_rate(channel: BathChannel, omega_ji: float, weight: float) -> float:
    """Upward rate lambda * (2 w / Q) * filter * n_B(w, T)."""
    return _rate_pair(channel, omega_ji, weight)[0]


def relaxation_rate(channel: BathChannel, omega_ji: float, weight: float) -> float:
    """Downward rate, computed as prefactor * (1 + n_B).

    Algebraically identical to excitation_rate * exp(w/T) (local detailed
    balance) but stays finite at T = 0, where only spontaneous emission
    survives.
    """
    return _rate_pair(channel, omega_ji, weight)[1]


@dataclass(frozen=True)
class BathSet:
    """The three channels, validated as labels {a, b, c}.

    Channels sharing a bath must share a temperature.
    """

    a: BathChannel
    b: BathChannel
    c: BathChannel

    def __post_init__(self) -> None:
        temps: dict[str, float] = {}
        for ch in self:
            if temps.setdefault(ch.bath, ch.temperature) != ch.temperature:
                raise ValueError(
                    f"channels sharing bath {ch.bath!r} have different "
                    "temperatures"
                )

    @classmethod
    def from_channels(cls, channels) -> "BathSet":
        chans = {ch.id: ch for ch in channels}
        if sorted(chans) != list(CHANNEL_IDS) or len(list(channels)) != 3:
            raise ChannelMismatch(
                f"expected exactly channels a, b, c; got {[c.id for c in channels]}"
            )
        return cls(a=chans["a"], b=chans["b"], c=chans["c"])

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __getitem__(self, cid: str) -> BathChannel:
        try:
            return {"a": self.a, "b": self.b, "c": self.c}[cid]
        except KeyError:
            raise ChannelMismatch(f"no channel {cid!r}") from None


@dataclass(frozen=True)
class RateMatrix:
    """Per-channel 3x3 transition rates and their elementwise total.

    Entry [j, i] of a matrix is the rate of the i -> j transition induced by
    that channel; diagonals are zero (the solver builds the generator's
    diagonal itself). Arrays are marked read-only.
    """

    per_channel: dict[str, np.ndarray]
    total: np.ndarray

    def channel(self, cid: str) -> np.ndarray:
        return self.per_channel[cid]


def assemble_rate_matrix(spectrum: QutritSpectrum, channels) -> RateMatrix:
    """Build the full rate matrix for three channels against a spectrum.

    channels may be a BathSet or any iterable of three BathChannel with
    labels exactly {a, b, c}. Downward rates follow from the stable
    (1 + n_B) form, so detailed balance holds pair by pair.
    """
    if not isinstance(channels, BathSet):
        channels = BathSet.from_channels(tuple(channels))
    freqs = (spectrum.omega10, spectrum.omega21, spectrum.omega20)
    per: dict[str, np.ndarray] = {}
    tot = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    for ch in channels:
        g = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
        res_pair = RESONANT_PAIR[ch.id]
        for (i, j, _), w in zip(UPWARD_TRANSITIONS, freqs):
            weight = ch.lambda_res if res_pair == (i, j) else ch.lambda_off
            if weight == 0.0:
                continue
            up, down = _rate_pair(ch, w, weight)
            g[j][i] = up
            g[i][j] = down
            tot[j][i] += up
            tot[i][j] += down
        arr = np.array(g)
        arr.setflags(write=False)
        per[ch.id] = arr
    total = np.array(tot)
    total.setflags(write=False)
    return RateMatrix(per_channel=per, total=total)
