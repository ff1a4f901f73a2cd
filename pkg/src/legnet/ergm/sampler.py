"""Metropolis-Hastings tie-toggle sampler.

One sweep proposes a single-tie toggle in every dyad, choosing the
direction uniformly, and accepts each with probability
min(1, exp(+/- theta' delta)). Because every term is dyad-local, a
proposal's acceptance ratio depends only on that dyad's own state, so
evaluating all proposals against the pre-sweep state is exactly the
sequential composition of single-toggle MH kernels. Burn-in and
interval controls are counted in sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..graph import Graph
from .terms import DyadDesign, ErgmSpec


@dataclass(frozen=True)
class SimControl:
    burnin: int = 100
    interval: int = 5
    sample_size: int = 256
    seed: int = 0

    def __post_init__(self) -> None:
        if self.burnin < 0 or self.interval < 1 or self.sample_size < 1:
            raise ConfigError("simulation control values must be positive")


@dataclass
class SimResult:
    """Thinned draws: statistic vectors plus the tie states behind them."""

    labels: tuple[str, ...]
    stats: np.ndarray            # (samples, K)
    states: list[tuple[np.ndarray, np.ndarray]] = field(repr=False, default_factory=list)
    acceptance_rate: float = 0.0

    def graph(self, design: DyadDesign, index: int,
              node_ids=None) -> Graph:
        """Materialize one sampled state as a Graph (unit weights)."""
        y1, y2 = self.states[index]
        ids = list(node_ids) if node_ids is not None else list(range(design.n))
        edges = [(ids[int(i)], ids[int(j)], 1.0)
                 for i, j in zip(design.iu[y1], design.ju[y1])]
        edges += [(ids[int(j)], ids[int(i)], 1.0)
                  for i, j in zip(design.iu[y2], design.ju[y2])]
        return Graph(edges, nodes=ids)


def sample_states(design: DyadDesign, theta: np.ndarray, control: SimControl,
                  init: str = "observed",
                  keep_states: bool = False) -> SimResult:
    """Run the toggle chain and record thinned statistic vectors.

    init "observed" starts from the design's stored tie state,
    "empty" from the empty graph, "random" from fair-coin ties.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (design.k,):
        raise ConfigError(f"theta has {theta.shape} entries for {design.k} terms")
    if not np.all(np.isfinite(theta)):
        raise ConfigError("theta must be finite for simulation")
    rng = np.random.default_rng(control.seed)
    d = design.n_dyads
    if init == "observed":
        y1, y2 = design.y1.copy(), design.y2.copy()
    elif init == "empty":
        y1, y2 = np.zeros(d, dtype=bool), np.zeros(d, dtype=bool)
    elif init == "random":
        y1 = rng.random(d) < 0.5
        y2 = rng.random(d) < 0.5
    else:
        raise ConfigError(f"unknown init {init!r}")

    a1 = design.t1 @ theta
    a2 = design.t2 @ theta
    tm = float(design.mvec @ theta)
    accepted = 0
    proposals = 0

    def sweep() -> None:
        nonlocal accepted, proposals
        pick1 = rng.random(d) < 0.5
        logu = np.log(rng.random(d))
        gain1 = a1 + np.where(y2, tm, 0.0)
        gain2 = a2 + np.where(y1, tm, 0.0)
        delta = np.where(pick1,
                         np.where(y1, -gain1, gain1),
                         np.where(y2, -gain2, gain2))
        accept = logu < delta
        flip1 = accept & pick1
        flip2 = accept & ~pick1
        y1[flip1] = ~y1[flip1]
        y2[flip2] = ~y2[flip2]
        accepted += int(accept.sum())
        proposals += d

    for _ in range(control.burnin):
        sweep()
    stats = np.empty((control.sample_size, design.k))
    states: list[tuple[np.ndarray, np.ndarray]] = []
    for s in range(control.sample_size):
        if s > 0:
            for _ in range(control.interval):
                sweep()
        stats[s] = design.statistics(y1, y2)
        if keep_states:
            states.append((y1.copy(), y2.copy()))
    rate = accepted / proposals if proposals else 0.0
    return SimResult(labels=design.spec.labels, stats=stats,
                     states=states, acceptance_rate=rate)


def simulate(spec: ErgmSpec, theta: np.ndarray, graph_size: int | None = None,
             control: SimControl | None = None, graph: Graph | None = None,
             keep_states: bool = True) -> tuple[SimResult, DyadDesign]:
    """Draw networks from the model at fixed theta.

    Provide either `graph` (simulation starts at its tie state) or
    `graph_size` (starts from fair-coin ties). Returns the draws and
    the dyad design used, so sampled states can be materialized.
    """
    control = control or SimControl()
    if graph is not None:
        design = DyadDesign.from_graph(graph, spec)
        init = "observed"
    elif graph_size is not None:
        design = DyadDesign(graph_size, spec)
        init = "random"
    else:
        raise ConfigError("simulate needs a graph or a graph_size")
    result = sample_states(design, theta, control, init=init, keep_states=keep_states)
    return result, design
