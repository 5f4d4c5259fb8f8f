"""Stationary state of the three-level rate equations.

Three independent routes to the same physics live here: the exact linear
solve of the master equation (the source of truth), the closed-form current
amplitude of the perfectly filtered limit (cross-check), and a continuous-time
jump-process Monte Carlo estimator (statistical oracle).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, log1p

import numpy as np

from .circuit import QutritSpectrum
from .errors import ReducibleChain
from .rates import RateMatrix, bose_occupation

#: Max-norm bound on the residual of the (time-normalized) rate equations.
RESIDUAL_TOL = 1e-10

MIN_JUMPS = 10_000
_BATCHES = 50


@dataclass(frozen=True)
class SteadyState:
    """Stationary populations (p0, p1, p2) and the solve residual.

    residual is the max norm of the rate equations evaluated at p, with rates
    normalized by their largest entry (so it is invariant under a uniform
    rescaling of all rates).
    """

    p: np.ndarray
    residual: float

    def __post_init__(self) -> None:
        if self.p.shape != (3,):
            raise ValueError("p must have shape (3,)")
        p0, p1, p2 = (float(v) for v in self.p)
        if abs(p0 + p1 + p2 - 1.0) > 1e-12:
            raise ValueError("populations must sum to 1")
        if min(p0, p1, p2) < 0.0 or max(p0, p1, p2) > 1.0:
            raise ValueError("populations must lie in [0, 1]")
        if not self.residual <= RESIDUAL_TOL:
            raise ValueError(f"rate-equation residual {self.residual} too large")


def generator_matrix(total: np.ndarray) -> np.ndarray:
    """Markov generator: off-diagonal rates, diagonal = -column sums."""
    m = np.array(total, dtype=float)
    np.fill_diagonal(m, 0.0)
    np.fill_diagonal(m, -m.sum(axis=0))
    return m


def is_irreducible(total: np.ndarray) -> bool:
    """Strong connectivity of the nonzero-rate digraph on three states."""
    t = np.asarray(total)
    return _strongly_connected(
        t[1, 0] > 0.0, t[2, 0] > 0.0, t[0, 1] > 0.0,
        t[2, 1] > 0.0, t[0, 2] > 0.0, t[1, 2] > 0.0,
    )


def _strongly_connected(e01, e02, e10, e12, e20, e21) -> bool:
    # eij: edge state i -> state j. On three nodes a two-hop closure decides.
    return (
        (e01 or (e02 and e21))
        and (e02 or (e01 and e12))
        and (e10 or (e12 and e20))
        and (e12 or (e10 and e02))
        and (e20 or (e21 and e10))
        and (e21 or (e20 and e01))
    )


def _solve3(a: list[list[float]], b: list[float]) -> list[float]:
    """Dense 3x3 solve by Gaussian elimination with partial pivoting."""
    rows = [a[0] + [b[0]], a[1] + [b[1]], a[2] + [b[2]]]
    for col in range(2):
        piv = max(range(col, 3), key=lambda r: abs(rows[r][col]))
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
        lead = rows[col][col]
        for r in range(col + 1, 3):
            f = rows[r][col] / lead
            if f != 0.0:
                for c in range(col + 1, 4):
                    rows[r][c] -= f * rows[col][c]
    x2 = rows[2][3] / rows[2][2]
    x1 = (rows[1][3] - rows[1][2] * x2) / rows[1][1]
    x0 = (rows[0][3] - rows[0][1] * x1 - rows[0][2] * x2) / rows[0][0]
    return [x0, x1, x2]


def solve_steady(rates: RateMatrix) -> SteadyState:
    """Unique stationary distribution of the total rate matrix.

    One redundant row of the generator is replaced by the normalization
    sum(p) = 1 and the 3x3 system solved directly (dense elimination with
    pivoting); the residual of the full rate equations, including the
    replaced row, is verified afterwards. Raises ReducibleChain when the
    chain is not strongly connected, rather than returning one of many
    stationary vectors.
    """
    t = rates.total
    r10, r20 = float(t[1, 0]), float(t[2, 0])
    r01, r21 = float(t[0, 1]), float(t[2, 1])
    r02, r12 = float(t[0, 2]), float(t[1, 2])
    scale = max(r10, r20, r01, r21, r02, r12)
    if scale <= 0.0 or not _strongly_connected(
        r10 > 0.0, r20 > 0.0, r01 > 0.0, r21 > 0.0, r02 > 0.0, r12 > 0.0
    ):
        raise ReducibleChain("rate digraph is not strongly connected")
    r10 /= scale; r20 /= scale
    r01 /= scale; r21 /= scale
    r02 /= scale; r12 /= scale
    # generator columns: diagonal = -(column sum of departures)
    m = [
        [-(r10 + r20), r01, r02],
        [r10, -(r01 + r21), r12],
        [r20, r21, -(r02 + r12)],
    ]
    p0, p1, p2 = _solve3([[1.0, 1.0, 1.0], m[1], m[2]], [1.0, 0.0, 0.0])
    # Solver noise can leave populations a few ulp outside [0, 1].
    p0 = min(max(p0, 0.0), 1.0)
    p1 = min(max(p1, 0.0), 1.0)
    p2 = min(max(p2, 0.0), 1.0)
    norm = p0 + p1 + p2
    p0 /= norm; p1 /= norm; p2 /= norm
    residual = max(
        abs(m[0][0] * p0 + m[0][1] * p1 + m[0][2] * p2),
        abs(m[1][0] * p0 + m[1][1] * p1 + m[1][2] * p2),
        abs(m[2][0] * p0 + m[2][1] * p1 + m[2][2] * p2),
    )
    p = np.array([p0, p1, p2])
    p.setflags(write=False)
    return SteadyState(p=p, residual=residual)


# ---------------------------------------------------------------------------
# Closed-form current amplitude of the perfectly filtered limit.
# ---------------------------------------------------------------------------

_amplitude_sign: float | None = None


def _reference_sign() -> float:
    """One-time sign calibration of the closed form against solve_steady.

    Builds the perfectly filtered cycle with unit couplings at a fixed
    reference point, measures the net cycle flux from the linear solve, and
    compares its sign with the closed form. The linear solve is the source
    of truth; the cached sign is applied to every later evaluation.
    """
    global _amplitude_sign
    if _amplitude_sign is None:
        omegas = (1.0, 0.8, 1.8)
        temps = (1.0, 0.9, 0.5)
        per = {}
        for cid, (i, j), w, t in zip("abc", ((0, 1), (1, 2), (0, 2)), omegas, temps):
            g = np.zeros((3, 3))
            n = bose_occupation(w, t)
            g[j, i] = n
            g[i, j] = 1.0 + n
            per[cid] = g
        rates = RateMatrix(per_channel=per, total=sum(per.values()))
        p = solve_steady(rates).p
        flux = per["a"][1, 0] * p[0] - per["a"][0, 1] * p[1]
        thetas = tuple(w / t for w, t in zip(omegas, temps))
        raw = _amplitude_raw(*thetas)
        _amplitude_sign = 1.0 if (flux >= 0.0) == (raw >= 0.0) else -1.0
    return _amplitude_sign


def _amplitude_raw(theta_a: float, theta_b: float, theta_c: float) -> float:
    # Rational function of the Boltzmann factors, written with negative
    # exponentials so it stays finite for arbitrarily large theta. The
    # numerator vanishes exactly on theta_c == theta_a + theta_b.
    s = theta_a + theta_b
    num = exp(-s) - exp(-theta_c)
    den = (
        2.0
        + exp(-theta_c)
        + 2.0 * exp(-theta_a)
        - 2.0 * exp(-(theta_a + theta_c))
        - exp(-s)
        - 2.0 * exp(-(s + theta_c))
    )
    return num / den


def ideal_current_amplitude(
    theta_a: float,
    theta_b: float,
    theta_c: float,
    kappa: float = 1.0,
) -> float:
    """Cycle flux of the perfectly filtered qutrit with symmetric couplings.

    theta_l = omega_l / T_l. The heat currents of the ideal limit are
    J_a = omega_a * A, J_b = omega_b * A, J_c = -omega_c * A. The amplitude
    vanishes exactly at the stall condition theta_c = theta_a + theta_b and
    its sign is calibrated once against the linear solve (see
    _reference_sign).
    """
    if not (theta_a > 0 and theta_b > 0 and theta_c > 0):
        raise ValueError("thetas must be positive and finite")
    return _reference_sign() * kappa * _amplitude_raw(theta_a, theta_b, theta_c)


# ---------------------------------------------------------------------------
# Jump-process Monte Carlo oracle.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StochasticEstimate:
    """Time-averaged populations and per-channel heat currents with errors.

    Standard errors come from batch means over contiguous stretches of the
    trajectory. Positive currents mean heat flowing out of the bath, matching
    the deterministic pipeline.
    """

    p_hat: np.ndarray
    sigma_p: np.ndarray
    j_hat: np.ndarray
    sigma_j: np.ndarray
    n_jumps: int
    seed: int

    def __post_init__(self) -> None:
        if abs(float(self.p_hat.sum()) - 1.0) > 1e-9:
            raise ValueError("estimated populations must sum to 1")


def derive_seed(root_seed: int, index: int) -> int:
    """Deterministic per-point seed for parallel sweeps (root + point index)."""
    ss = np.random.SeedSequence(entropy=root_seed, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def gillespie_estimate(
    rates: RateMatrix,
    spectrum: QutritSpectrum,
    n_jumps: int,
    seed: int,
) -> StochasticEstimate:
    """Simulate the continuous-time jump process and estimate steady values.

    Waiting times are exponential in the total exit rate of the current
    state; the jump target and the responsible channel are drawn from the
    individual rates. Each jump through channel l moves energy
    E_target - E_source out of bath l. The first n_jumps // 100 jumps are
    discarded as burn-in; the remaining n_jumps are accumulated in
    occupation-time averages. Deterministic for a given seed.
    """
    if n_jumps < MIN_JUMPS:
        raise ValueError(f"n_jumps must be at least {MIN_JUMPS}, got {n_jumps}")
    total = np.asarray(rates.total, dtype=float)
    if total.max() <= 0.0 or not is_irreducible(total):
        raise ReducibleChain("rate digraph is not strongly connected")

    energies = spectrum.energies
    order = sorted(rates.per_channel)
    # Per state: exit rate and the outcome table (cumulative prob, target,
    # channel index, energy out of that channel's bath).
    exit_rate = [0.0, 0.0, 0.0]
    outcomes: list[list[tuple[float, int, int, float]]] = [[], [], []]
    for i in range(3):
        acc = 0.0
        table = []
        for ci, cid in enumerate(order):
            g = rates.per_channel[cid]
            for j in range(3):
                if j != i and g[j, i] > 0.0:
                    acc += float(g[j, i])
                    table.append((acc, j, ci, energies[j] - energies[i]))
        exit_rate[i] = acc
        outcomes[i] = [(c / acc, j, ci, de) for (c, j, ci, de) in table]

    n_burn = n_jumps // 100
    total_jumps = n_burn + n_jumps
    rng = np.random.Generator(np.random.PCG64(seed))
    u_wait = rng.random(total_jumps).tolist()
    u_pick = rng.random(total_jumps).tolist()

    occ = np.zeros((_BATCHES, 3))
    heat = np.zeros((_BATCHES, len(order)))
    time_in_batch = np.zeros(_BATCHES)

    state = 0
    for k in range(total_jumps):
        dt = -log1p(-u_wait[k]) / exit_rate[state]
        u = u_pick[k]
        target = state
        ci = 0
        de = 0.0
        for cum, j, c, d in outcomes[state]:
            if u <= cum:
                target, ci, de = j, c, d
                break
        if k >= n_burn:
            b = (k - n_burn) * _BATCHES // n_jumps
            time_in_batch[b] += dt
            occ[b, state] += dt
            heat[b, ci] += de
        state = target

    t_total = time_in_batch.sum()
    p_hat = occ.sum(axis=0) / t_total
    j_hat = heat.sum(axis=0) / t_total
    p_b = occ / time_in_batch[:, None]
    j_b = heat / time_in_batch[:, None]
    sigma_p = p_b.std(axis=0, ddof=1) / np.sqrt(_BATCHES)
    sigma_j = j_b.std(axis=0, ddof=1) / np.sqrt(_BATCHES)
    for arr in (p_hat, sigma_p, j_hat, sigma_j):
        arr.setflags(write=False)
    return StochasticEstimate(
        p_hat=p_hat,
        sigma_p=sigma_p,
        j_hat=j_hat,
        sigma_j=sigma_j,
        n_jumps=n_jumps,
        seed=seed,
    )
