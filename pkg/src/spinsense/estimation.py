"""Monte Carlo check of the Cramer-Rao relation sigma_theta = 1/sqrt(N F)
for the optimal two-outcome (survival) measurement."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metrics import qfi
from .spin import SpinOperator, SpinState

_BISECT_TOL = 1e-12
_SCAN_POINTS = 4096


class _SurvivalModel:
    """Survival probability P(theta) = |<psi|exp(-i theta G)|psi>|^2 and its
    derivative, precomputed from one eigendecomposition of G."""

    def __init__(self, psi: SpinState, g: SpinOperator):
        if g.j != psi.j:
            raise ValueError("generator does not match the state dimension")
        if not g.is_hermitian():
            raise ValueError(f"generator {g.label!r} is not Hermitian")
        evals, evecs = np.linalg.eigh(g.matrix)
        weights = np.abs(evecs.conj().T @ psi.amplitudes) ** 2
        keep = weights > 0.0
        self.evals = evals[keep]
        self.weights = weights[keep]

    def amplitude(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.sum(self.weights * np.exp(-1j * np.outer(theta, self.evals)), axis=-1)

    def prob(self, theta):
        p = np.abs(self.amplitude(np.atleast_1d(theta))) ** 2
        p = np.clip(p, 0.0, 1.0)
        return float(p[0]) if np.isscalar(theta) or np.ndim(theta) == 0 else p

    def dprob(self, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        phases = np.exp(-1j * np.outer(theta, self.evals))
        s = phases @ self.weights
        ds = phases @ (-1j * self.evals * self.weights)
        d = 2.0 * np.real(np.conj(s) * ds)
        return float(d[0]) if d.size == 1 else d

    def spread(self) -> float:
        if self.evals.size < 2:
            return 0.0
        return float(self.evals.max() - self.evals.min())

    def first_slope_peak(self) -> float:
        """First maximum of |dP/dtheta| away from the stationary point at 0.

        P is even around 0 with P'(0) = 0, so P is strictly monotone up to
        this angle and the inversion estimator is well posed on (0, peak].
        """
        spread = self.spread()
        if spread == 0.0:
            raise ValueError("degenerate model: the state is an eigenstate of the generator")
        thetas = np.linspace(0.0, 2.0 * math.pi / spread, _SCAN_POINTS)[1:]
        slope = np.abs(self.dprob(thetas))
        for i in range(1, slope.size):
            if slope[i] < slope[i - 1]:
                return float(thetas[i - 1])
        return float(thetas[-1])


@dataclass
class EstimationConfig:
    """One Monte Carlo experiment: `runs` repetitions of N survival trials.

    theta_true must sit strictly inside (0, first |dP/dtheta| peak), away
    from the stationary point of P at 0 where the inversion is singular;
    this is enforced where the estimator runs (crb_report), since the raw
    trial simulation is well defined for any angle.
    """

    psi: SpinState
    generator: SpinOperator
    theta_true: float
    trials_per_run: int
    runs: int
    seed: int

    def __post_init__(self):
        if self.generator.j != self.psi.j:
            raise ValueError("generator does not match the state dimension")
        if not self.generator.is_hermitian():
            raise ValueError("generator must be Hermitian")
        if not isinstance(self.trials_per_run, (int, np.integer)) or self.trials_per_run < 100:
            raise ValueError(f"trials_per_run must be an integer >= 100, got {self.trials_per_run!r}")
        if not isinstance(self.runs, (int, np.integer)) or self.runs < 1:
            raise ValueError(f"runs must be a positive integer, got {self.runs!r}")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not (math.isfinite(self.theta_true) and self.theta_true > 0):
            raise ValueError(f"theta_true must be positive and finite, got {self.theta_true!r}")
        self.trials_per_run = int(self.trials_per_run)
        self.runs = int(self.runs)
        self.seed = int(self.seed)


@dataclass
class EstimationResult:
    """Per-run estimates plus the empirical/CRB standard deviations."""

    theta_hats: np.ndarray
    empirical_sigma: float
    crb_sigma: float
    ratio: float

    def summary_dict(self) -> dict:
        return {
            "empirical_sigma": self.empirical_sigma,
            "crb_sigma": self.crb_sigma,
            "ratio": self.ratio,
        }

    def to_csv(self) -> str:
        lines = ["run,theta_hat"]
        for run, th in enumerate(self.theta_hats):
            lines.append(f"{run},{format(float(th), '.17g')}")
        return "\n".join(lines) + "\n"


def survival_probability(psi: SpinState, g: SpinOperator, theta: float) -> float:
    """P(theta) = |<psi|exp(-i theta G)|psi>|^2, clipped into [0, 1]."""
    return _SurvivalModel(psi, g).prob(float(theta))


def _run_rng(seed: int, run_index: int) -> np.random.Generator:
    # counter-based streams keyed on (seed, run) make parallel order irrelevant
    return np.random.Generator(np.random.Philox(key=[seed, run_index]))


def simulate_trials(config: EstimationConfig) -> np.ndarray:
    """Count of 'still the original state' projections per run.

    Each run draws trials_per_run Bernoulli samples at the true survival
    probability from its own counter-based stream keyed on (seed, run), so
    results are bit-identical regardless of evaluation order.
    """
    p = survival_probability(config.psi, config.generator, config.theta_true)
    counts = np.empty(config.runs, dtype=np.int64)
    for run in range(config.runs):
        rng = _run_rng(config.seed, run)
        counts[run] = int(np.count_nonzero(rng.random(config.trials_per_run) < p))
    return counts


def _invert_monotone(model: _SurvivalModel, target: float, bracket: tuple[float, float]) -> float:
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"bracket must satisfy lo < hi, got {bracket!r}")
    grid = np.linspace(lo, hi, 257)
    slopes = model.dprob(grid)
    scale = float(np.max(np.abs(slopes)))
    if scale == 0.0:
        raise ValueError("degenerate model: P(theta) is flat on the bracket")
    signs = np.sign(slopes[np.abs(slopes) > 1e-13 * scale])
    if signs.size and (signs.max() - signs.min()) > 0:
        raise ValueError("non-monotone bracket: dP/dtheta changes sign inside it")
    increasing = signs[0] > 0 if signs.size else True

    p_lo, p_hi = model.prob(lo), model.prob(hi)
    p_min, p_max = (p_lo, p_hi) if increasing else (p_hi, p_lo)
    if target <= p_min:
        return lo if increasing else hi
    if target >= p_max:
        return hi if increasing else lo

    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        above = model.prob(mid) < target
        if above == increasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def estimate_theta(
    count: int,
    trials: int,
    psi: SpinState,
    g: SpinOperator,
    bracket: tuple[float, float],
) -> float:
    """Invert the survival model at the observed frequency by bisection.

    The bracket must lie where P(theta) is strictly monotone (checked; a
    sign change of dP/dtheta raises).  Frequencies outside the reachable
    range clip to the corresponding bracket endpoint.
    """
    if not 0 <= count <= trials:
        raise ValueError(f"count must lie in [0, {trials}], got {count}")
    return _invert_monotone(_SurvivalModel(psi, g), count / trials, bracket)


def crb_report(config: EstimationConfig) -> EstimationResult:
    """Simulate, estimate per run, and compare the spread against 1/sqrt(NF)."""
    if config.runs < 2:
        raise ValueError("need at least 2 runs for a sample standard deviation")
    fisher = qfi(config.psi, config.generator)
    if fisher <= 1e-12:
        raise ValueError("degenerate model: QFI is zero, the bound 1/sqrt(NF) is undefined")
    model = _SurvivalModel(config.psi, config.generator)
    theta_peak = model.first_slope_peak()
    if not 0.0 < config.theta_true < theta_peak:
        raise ValueError(
            f"theta_true = {config.theta_true!r} outside the invertible window (0, {theta_peak!r})"
        )
    counts = simulate_trials(config)
    n = config.trials_per_run
    bracket = (0.0, theta_peak)
    theta_hats = np.array([_invert_monotone(model, c / n, bracket) for c in counts])
    empirical = float(np.std(theta_hats, ddof=1))
    crb = 1.0 / math.sqrt(n * fisher)
    return EstimationResult(
        theta_hats=theta_hats,
        empirical_sigma=empirical,
        crb_sigma=crb,
        ratio=empirical / crb,
    )
