"""Directed Bernoulli stochastic block model, fit by variational EM.

Self-pairs are excluded everywhere: the diagonal of the adjacency
carries no information. Model selection uses the integrated
classification likelihood evaluated at the hard assignment with
hard-count plug-in parameters.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.vq import kmeans2
from scipy.special import xlogy

from .errors import DataError
from .graph import Graph

_LOG_CLIP = 1e-12
_COLLAPSE_TOL = 1e-8


@dataclass(frozen=True)
class SbmFit:
    q: int
    tau: np.ndarray
    alpha: np.ndarray
    pi: np.ndarray
    labels: np.ndarray
    icl: float
    elbo: float
    elbo_trace: tuple[float, ...]
    converged: bool
    iterations: int
    requested_q: int
    collapsed: bool = False
    meta: dict = field(default_factory=dict)


def _as_binary(adjacency) -> np.ndarray:
    if isinstance(adjacency, Graph):
        y = adjacency.adjacency(weighted=False)
    else:
        y = np.asarray(adjacency, dtype=np.float64)
    if y.ndim != 2 or y.shape[0] != y.shape[1]:
        raise DataError("adjacency must be square")
    if np.any((y != 0.0) & (y != 1.0)):
        raise DataError("adjacency must be binary")
    if np.any(np.diag(y) != 0.0):
        raise DataError("adjacency diagonal must be zero")
    return y


def _elbo(y: np.ndarray, yc: np.ndarray, tau: np.ndarray,
          alpha: np.ndarray, pi: np.ndarray) -> float:
    s = tau.sum(axis=0)
    n_qr = tau.T @ y @ tau
    s_qr = np.outer(s, s) - tau.T @ tau
    ll = xlogy(n_qr, pi).sum() + xlogy(s_qr - n_qr, 1.0 - pi).sum()
    mix = xlogy(tau, alpha[None, :]).sum()
    ent = -xlogy(tau, tau).sum()
    return float(ll + mix + ent)


def _field(y: np.ndarray, yc: np.ndarray, tau: np.ndarray,
           alpha: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Per-(node, class) unnormalized log-responsibility."""
    l1 = np.log(np.clip(pi, _LOG_CLIP, None))
    l0 = np.log(np.clip(1.0 - pi, _LOG_CLIP, None))
    t1t = tau @ l1.T
    t0t = tau @ l0.T
    t1 = tau @ l1
    t0 = tau @ l0
    f = (y @ t1t + yc @ t0t + y.T @ t1 + yc.T @ t0)
    return f + np.log(np.clip(alpha, _LOG_CLIP, None))[None, :]


def _softmax_rows(f: np.ndarray) -> np.ndarray:
    z = f - f.max(axis=1, keepdims=True)
    t = np.exp(z)
    t /= t.sum(axis=1, keepdims=True)
    return t


def _estep(y: np.ndarray, yc: np.ndarray, tau: np.ndarray,
           alpha: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """One responsibility pass that never lowers the bound.

    The vectorized simultaneous update is attempted first; if it would
    decrease the ELBO, the pass is redone sequentially (true coordinate
    ascent, monotone by construction).
    """
    before = _elbo(y, yc, tau, alpha, pi)
    candidate = _softmax_rows(_field(y, yc, tau, alpha, pi))
    if _elbo(y, yc, candidate, alpha, pi) >= before - 1e-10:
        return candidate
    tau = tau.copy()
    l1 = np.log(np.clip(pi, _LOG_CLIP, None))
    l0 = np.log(np.clip(1.0 - pi, _LOG_CLIP, None))
    log_alpha = np.log(np.clip(alpha, _LOG_CLIP, None))
    # cached per-node projections, refreshed row-by-row as tau changes
    t1t, t0t, t1, t0 = tau @ l1.T, tau @ l0.T, tau @ l1, tau @ l0
    for i in range(y.shape[0]):
        f = y[i] @ t1t + yc[i] @ t0t + y[:, i] @ t1 + yc[:, i] @ t0 + log_alpha
        z = f - f.max()
        t = np.exp(z)
        tau[i] = t / t.sum()
        t1t[i], t0t[i] = tau[i] @ l1.T, tau[i] @ l0.T
        t1[i], t0[i] = tau[i] @ l1, tau[i] @ l0
    return tau


def _mstep(y: np.ndarray, tau: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = y.shape[0]
    s = tau.sum(axis=0)
    alpha = s / n
    n_qr = tau.T @ y @ tau
    s_qr = np.outer(s, s) - tau.T @ tau
    pi = np.divide(n_qr, s_qr, out=np.zeros_like(n_qr), where=s_qr > 0)
    # saturated rates make the bound -inf through xlogy(eps, 0); keep interior
    return alpha, np.clip(pi, _LOG_CLIP, 1.0 - _LOG_CLIP)


def _init_tau(y: np.ndarray, q: int, mode: str, rng: np.random.Generator) -> np.ndarray:
    n = y.shape[0]
    if q == 1:
        return np.ones((n, 1))
    if mode == "random":
        # hard labels, not soft draws: near-uniform responsibilities sit
        # in the basin of the uninformative fixed point
        labels = rng.integers(q, size=n)
    else:
        # spectral: k-means on the leading left+right singular directions,
        # scaled by singular value so noise directions don't swamp signal
        try:
            centered = y - y.mean()
            u, s, vt = np.linalg.svd(centered, full_matrices=False)
            emb = np.hstack([u[:, :q] * s[:q], vt[:q, :].T * s[:q]])
            _, labels = kmeans2(emb, q, minit="++",
                                seed=np.random.default_rng(rng.integers(2**32)))
        except Exception:
            labels = rng.integers(q, size=n)
    tau = np.full((n, q), 0.05 / max(q - 1, 1))
    tau[np.arange(n), labels] = 0.95
    return tau / tau.sum(axis=1, keepdims=True)


def classification_icl(adjacency, labels) -> float:
    """ICL at a hard partition, plug-in block rates, directed Bernoulli."""
    y = _as_binary(adjacency)
    n = y.shape[0]
    labels = np.asarray(labels)
    _, code = np.unique(labels, return_inverse=True)
    q = int(code.max()) + 1
    z = np.zeros((n, q))
    z[np.arange(n), code] = 1.0
    counts = z.sum(axis=0)
    m_qr = z.T @ y @ z
    d_qr = np.outer(counts, counts) - np.diag(counts)
    pi_hat = np.divide(m_qr, d_qr, out=np.zeros_like(m_qr), where=d_qr > 0)
    ll = xlogy(m_qr, pi_hat).sum() + xlogy(d_qr - m_qr, 1.0 - pi_hat).sum()
    mix = xlogy(counts, counts / n).sum()
    penalty = (q * q / 2.0) * np.log(n * (n - 1)) + ((q - 1) / 2.0) * np.log(n)
    return float(ll + mix - penalty)


def _renumber_by_size(tau: np.ndarray, alpha: np.ndarray,
                      pi: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    labels = tau.argmax(axis=1)
    counts = np.bincount(labels, minlength=tau.shape[1])
    order = np.argsort(-counts, kind="stable")
    tau = tau[:, order]
    alpha = alpha[order]
    pi = pi[np.ix_(order, order)]
    labels = tau.argmax(axis=1)
    return tau, alpha, pi, labels


def _single_run(y: np.ndarray, yc: np.ndarray, q: int, mode: str,
                rng: np.random.Generator, max_iter: int, tol: float
                ) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[float], bool, int, bool]:
    tau = _init_tau(y, q, mode, rng)
    alpha, pi = _mstep(y, tau)
    trace = [_elbo(y, yc, tau, alpha, pi)]
    converged = False
    collapsed = False
    it = 0
    for it in range(1, max_iter + 1):
        tau = _estep(y, yc, tau, alpha, pi)
        weight = tau.sum(axis=0)
        dead = weight < _COLLAPSE_TOL
        if dead.any() and (~dead).sum() >= 1:
            warnings.warn(f"pruned {int(dead.sum())} empty class(es) at Q={tau.shape[1]}")
            tau = tau[:, ~dead]
            tau /= tau.sum(axis=1, keepdims=True)
            collapsed = True
        alpha, pi = _mstep(y, tau)
        trace.append(_elbo(y, yc, tau, alpha, pi))
        if trace[-1] - trace[-2] < tol and trace[-1] >= trace[-2] - 1e-7:
            converged = True
            break
    return tau, alpha, pi, trace, converged, it, collapsed


def fit_q(adjacency, q: int, init: str = "spectral", restarts: int = 1,
          seed: int = 0, max_iter: int = 500, tol: float = 1e-6) -> SbmFit:
    """Best-of-`restarts` variational EM fit with Q starting classes.

    The first restart uses the requested initializer; the rest draw
    random responsibilities. Classes whose total responsibility
    collapses are pruned with a warning, so the returned fit can have
    fewer classes than requested. Deterministic for a fixed seed.
    """
    y = _as_binary(adjacency)
    n = y.shape[0]
    if not (1 <= q <= n):
        raise DataError(f"Q={q} outside [1, {n}]")
    if init not in ("spectral", "random"):
        raise DataError(f"unknown init {init!r}")
    if restarts < 1:
        raise DataError("restarts must be >= 1")
    yc = 1.0 - y
    np.fill_diagonal(yc, 0.0)

    best = None
    for r in range(restarts):
        rng = np.random.default_rng((seed * 1_000_003 + r) % 2**63)
        mode = init if r == 0 else "random"
        tau, alpha, pi, trace, converged, iters, collapsed = _single_run(
            y, yc, q, mode, rng, max_iter, tol)
        if best is None or trace[-1] > best[3][-1]:
            best = (tau, alpha, pi, trace, converged, iters, collapsed)

    tau, alpha, pi, trace, converged, iters, collapsed = best
    tau, alpha, pi, labels = _renumber_by_size(tau, alpha, pi)
    icl_value = classification_icl(y, labels)
    return SbmFit(
        q=tau.shape[1], tau=tau, alpha=alpha, pi=pi, labels=labels,
        icl=icl_value, elbo=trace[-1], elbo_trace=tuple(trace),
        converged=converged, iterations=iters, requested_q=q,
        collapsed=collapsed, meta={"init": init, "restarts": restarts, "seed": seed},
    )


def select_q(adjacency, q_range, restarts: int = 1, seed: int = 0,
             init: str = "spectral", max_iter: int = 500,
             tol: float = 1e-6) -> tuple[SbmFit, list[tuple[int, float]]]:
    """Fit every Q in the range; return the ICL-best fit and the curve."""
    qs = list(q_range)
    if not qs:
        raise DataError("empty Q range")
    best_fit = None
    curve: list[tuple[int, float]] = []
    for q in qs:
        fit = fit_q(adjacency, q, init=init, restarts=restarts,
                    seed=seed + 7919 * q, max_iter=max_iter, tol=tol)
        curve.append((q, fit.icl))
        if best_fit is None or fit.icl > best_fit.icl:
            best_fit = fit
    return best_fit, curve


def interaction_matrix(fit: SbmFit, attrs=None) -> tuple[np.ndarray, list[dict]]:
    """Block probability matrix plus per-community annotations."""
    notes = []
    for c in range(fit.q):
        members = np.flatnonzero(fit.labels == c)
        row = {"community": c + 1, "size": int(members.size)}
        if attrs is not None:
            for column in ("party", "chamber"):
                if attrs.has(column):
                    col = attrs.categorical(column)
                    values = [col[i] for i in members]
                    if values:
                        top = max(sorted(set(values)), key=values.count)
                        row[f"dominant_{column}"] = top
        notes.append(row)
    return fit.pi.copy(), notes


def community_summary(fit: SbmFit, attrs=None, centrality=None) -> list[dict]:
    """Size, dominant categorical levels, and normalized-score profile
    per community.

    Structural metrics are min-max normalized over all nodes before the
    per-community mean and coefficient of variation are taken; NaN
    scores are ignored.
    """
    n = fit.labels.shape[0]
    rows = []
    norm_metrics: dict[str, np.ndarray] = {}
    if centrality is not None:
        for name in centrality.__dataclass_fields__:
            vec = np.asarray(getattr(centrality, name), dtype=np.float64)
            lo, hi = np.nanmin(vec), np.nanmax(vec)
            norm_metrics[name] = (vec - lo) / (hi - lo) if hi > lo else np.zeros_like(vec)
    for c in range(fit.q):
        members = np.flatnonzero(fit.labels == c)
        row: dict = {"community": c + 1, "size": int(members.size),
                     "share": members.size / n}
        if attrs is not None:
            for column in attrs.categorical_columns:
                col = attrs.categorical(column)
                values = [col[i] for i in members]
                if values:
                    top = max(sorted(set(values)), key=values.count)
                    row[f"{column}_dominant"] = top
                    row[f"{column}_share"] = values.count(top) / len(values)
        for name, vec in norm_metrics.items():
            sub = vec[members]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                mean = float(np.nanmean(sub)) if sub.size else float("nan")
                sd = float(np.nanstd(sub)) if sub.size else float("nan")
            row[f"{name}_mean"] = mean
            row[f"{name}_cv"] = sd / mean if mean else 0.0
        rows.append(row)
    return rows
