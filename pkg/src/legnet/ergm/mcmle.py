"""Monte-Carlo maximum likelihood (Geyer-Thompson iteration).

Starting from the pseudolikelihood estimate, each phase simulates
networks at the current theta and maximizes the importance-sampled
log-likelihood ratio, guarded by the effective sample size of the
importance weights. Convergence is declared when every simulated mean
statistic sits within `ee_tol` simulated standard deviations of its
observed value. The log-likelihood for AIC/BIC comes from bridge
sampling along the straight path from the null model, whose
normalizing constant is known in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ..errors import ConfigError, EstimationError
from ..graph import Graph
from .diagnostics import ess
from .fit import ErgmFit, _finalize, fit_mple, graph_digest
from .sampler import SimControl, sample_states
from .terms import DyadDesign, ErgmSpec


@dataclass(frozen=True)
class McmleControl:
    burnin: int = 200
    interval: int = 5
    sample_size: int = 512
    max_phases: int = 20
    ee_tol: float = 0.1
    seed: int = 0
    step_max: float = 1.0
    min_ess_frac: float = 0.05
    bridges: int = 12
    bridge_sample_size: int = 128
    bridge_burnin: int = 100

    def __post_init__(self) -> None:
        if (self.burnin < 0 or self.interval < 1 or self.sample_size < 2
                or self.max_phases < 1 or self.ee_tol <= 0
                or self.bridges < 1 or self.bridge_sample_size < 2):
            raise ConfigError("invalid Monte-Carlo control values")


def _phase_seed(seed: int, stream: int) -> int:
    # distinct deterministic streams per phase/bridge
    return (seed * 1_000_003 + stream) % (2**63)


def _weighted_update(g_obs: np.ndarray, sample: np.ndarray, theta: np.ndarray,
                     free: np.ndarray, control: McmleControl) -> np.ndarray:
    """Maximize the importance-sampled likelihood ratio from theta."""
    eta = theta.copy()
    s = sample.shape[0]
    for _ in range(50):
        lw = sample @ (eta - theta)
        lw -= lw.max()
        w = np.exp(lw)
        w /= w.sum()
        if 1.0 / (w @ w) < max(2.0, control.min_ess_frac * s):
            break
        gw = w @ sample
        centered = sample - gw
        cov = centered.T @ (w[:, None] * centered)
        grad = (g_obs - gw)[free]
        sub = cov[np.ix_(free, free)]
        try:
            step = np.linalg.solve(sub, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(sub, grad, rcond=None)[0]
        biggest = np.abs(step).max()
        if biggest > control.step_max:
            step *= control.step_max / biggest
        eta[free] += step
        if biggest < 1e-10:
            break
    return eta


def _bridge_log_likelihood(design: DyadDesign, theta: np.ndarray,
                           g_obs: np.ndarray, control: McmleControl) -> float:
    """l(theta) by path sampling from the null model.

    log kappa(0) = n(n-1) log 2 exactly (every ordered pair free), and
    each path segment contributes log E_t[exp(delta' g)] estimated from
    draws at the segment start.
    """
    log_ratio = 0.0
    for b in range(control.bridges):
        t_lo = theta * (b / control.bridges)
        t_hi = theta * ((b + 1) / control.bridges)
        sim = sample_states(
            design, t_lo,
            SimControl(control.bridge_burnin, control.interval,
                       control.bridge_sample_size,
                       seed=_phase_seed(control.seed, 10_000 + b)),
            init="observed")
        lw = sim.stats @ (t_hi - t_lo)
        log_ratio += float(logsumexp(lw) - np.log(lw.shape[0]))
    log_kappa = design.n_ordered_pairs * np.log(2.0) + log_ratio
    return float(theta @ g_obs - log_kappa)


def fit_mcmle(graph: Graph, spec: ErgmSpec,
              control: McmleControl | None = None) -> ErgmFit:
    """Monte-Carlo MLE; deterministic given the control seed.

    Coefficients separated at the pseudolikelihood stage stay pinned
    and are reported as signed infinity, exactly as in the exact-dyad
    path.
    """
    control = control or McmleControl()
    design = DyadDesign.from_graph(graph, spec)
    g_obs = design.statistics()
    start = fit_mple(graph, spec)
    theta = start.theta_pinned.copy()
    frozen = start.separation.copy()
    free = ~frozen
    if not free.any():
        raise EstimationError("every coefficient is separated; nothing to estimate")

    ee_history: list[float] = []
    sample = None
    acceptance = 0.0
    phases = 0
    for phase in range(control.max_phases):
        phases = phase + 1
        sim = sample_states(
            design, theta,
            SimControl(control.burnin, control.interval, control.sample_size,
                       seed=_phase_seed(control.seed, phase)),
            init="observed")
        sample = sim.stats
        acceptance = sim.acceptance_rate
        gbar = sample.mean(axis=0)
        gsd = sample.std(axis=0, ddof=1)
        if np.any(gsd[free] == 0.0):
            stuck = [spec.labels[k] for k in np.flatnonzero((gsd == 0.0) & free)]
            tail = np.array2string(sample[-5:], precision=3)
            raise EstimationError(
                f"degenerate simulation: constant statistics for {stuck}; "
                f"last draws:\n{tail}")
        ee = float(np.abs((gbar - g_obs)[free] / gsd[free]).max())
        ee_history.append(ee)
        if ee < control.ee_tol:
            break
        theta = _weighted_update(g_obs, sample, theta, free, control)
    else:
        raise EstimationError(
            f"estimating equations not met after {control.max_phases} phases "
            f"(discrepancy history {np.array2string(np.asarray(ee_history), precision=3)})")

    # Fisher information at theta-hat from the final simulated sample.
    centered = sample - sample.mean(axis=0)
    fisher_free = (centered[:, free].T @ centered[:, free]) / (sample.shape[0] - 1)
    fisher = np.zeros((spec.k, spec.k))
    fisher[np.ix_(free, free)] = fisher_free

    # Monte-Carlo error of theta-hat: delta method with per-term ESS.
    ess_vec = np.array([ess(sample[:, k]) for k in range(spec.k)])
    try:
        finv = np.linalg.inv(fisher_free)
    except np.linalg.LinAlgError:
        finv = np.linalg.pinv(fisher_free)
    var_free = sample.var(axis=0, ddof=1)[free]
    ess_free = np.where(np.isfinite(ess_vec[free]), ess_vec[free], sample.shape[0])
    mc_cov = finv @ np.diag(var_free / ess_free) @ finv
    mc_se = np.zeros(spec.k)
    mc_se[free] = np.sqrt(np.clip(np.diag(mc_cov), 0.0, None))

    ll = _bridge_log_likelihood(design, theta, g_obs, control)
    diagnostics = {
        "trace": sample,
        "acceptance_rate": acceptance,
        "phases": phases,
        "ee_history": ee_history,
        "mc_std_err": mc_se,
        "ess": ess_vec,
    }
    return _finalize(theta, frozen, fisher, ll, design.n_ordered_pairs,
                     "mcmle", spec, graph_digest(graph), True, phases,
                     diagnostics)
