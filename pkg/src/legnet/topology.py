"""Descriptive network statistics for directed weighted graphs.

Geodesic metrics (closeness, betweenness) run on the binary digraph:
the stored weights are interaction ratios, not traversal costs.
Spectral scores (eigenvector, HITS) default to the binary adjacency
with a weighted toggle. Clique and clustering measures use the
undirected projection, where two nodes count as adjacent when an edge
exists in either direction.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, EstimationError
from .graph import Graph


@dataclass(frozen=True)
class CentralityReport:
    """Per-node score vectors, aligned to graph indices.

    closeness and local_clustering hold NaN where the score is
    undefined (no reachable nodes / degree below 2).
    """

    in_degree: np.ndarray
    out_degree: np.ndarray
    out_strength: np.ndarray
    closeness: np.ndarray
    betweenness: np.ndarray
    eigen: np.ndarray
    hub: np.ndarray
    authority: np.ndarray
    local_clustering: np.ndarray

    def metric(self, name: str) -> np.ndarray:
        if name not in self.__dataclass_fields__:
            raise DataError(f"unknown centrality metric {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class TriadReport:
    triad_closed_fraction: float
    transitivity: float
    mean_local_clustering: float
    local_clustering: np.ndarray


@dataclass(frozen=True)
class ConnectivityReport:
    density: float
    reciprocity: float
    transitivity: float
    mean_local_clustering: float
    triad_closed_fraction: float
    maximal_cliques: tuple[tuple[int, ...], ...]
    max_clique_size: int


# -- degrees and strength -----------------------------------------------------


def degree_strength(graph: Graph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(in_degree, out_degree, out_strength) vectors."""
    return graph.in_degrees(), graph.out_degrees(), graph.out_strengths()


# -- geodesic centralities ----------------------------------------------------


def _bfs_distances(neighbors: Sequence[np.ndarray], source: int, n: int) -> np.ndarray:
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = [source]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for v in frontier:
            for u in neighbors[v]:
                u = int(u)
                if dist[u] < 0:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    return dist


def closeness(graph: Graph, mode: str = "out", threads: int = 1) -> np.ndarray:
    """Reachable-set closeness under unweighted directed geodesics.

    For node i with nonempty reachable set R_i (i excluded),
    closeness(i) = |R_i| / sum of distances to R_i; NaN when R_i is
    empty. mode "out" follows edge direction, "in" walks edges
    backwards.
    """
    if graph.n < 2:
        raise DataError("closeness needs at least 2 nodes")
    if mode not in ("out", "in"):
        raise DataError(f"unknown closeness mode {mode!r}")
    n = graph.n
    neighbors = [graph.out_neighbors(i) if mode == "out" else graph.in_neighbors(i)
                 for i in range(n)]

    def one(i: int) -> float:
        dist = _bfs_distances(neighbors, i, n)
        reached = dist > 0
        if not reached.any():
            return np.nan
        return float(reached.sum() / dist[reached].sum())

    return np.asarray(_map_sources(one, n, threads))


def betweenness(graph: Graph, threads: int = 1) -> np.ndarray:
    """Brandes betweenness over directed geodesics, divided by (n-1)(n-2)."""
    n = graph.n
    if n < 3:
        raise DataError("betweenness needs at least 3 nodes")
    neighbors = [graph.out_neighbors(i) for i in range(n)]

    def one(s: int) -> np.ndarray:
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        preds: list[list[int]] = [[] for _ in range(n)]
        order: list[int] = []
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                order.append(v)
                for u in neighbors[v]:
                    u = int(u)
                    if dist[u] < 0:
                        dist[u] = dist[v] + 1
                        nxt.append(u)
                    if dist[u] == dist[v] + 1:
                        sigma[u] += sigma[v]
                        preds[u].append(v)
            frontier = nxt
        delta = np.zeros(n)
        contrib = np.zeros(n)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                contrib[w] = delta[w]
        return contrib

    parts = _map_sources(one, n, threads)
    total = np.zeros(n)
    for part in parts:
        total += part
    return total / ((n - 1) * (n - 2))


def _map_sources(fn, n: int, threads: int) -> list:
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(n)))
    return [fn(s) for s in range(n)]


# -- spectral centralities ----------------------------------------------------


def _undirected_matrix(graph: Graph, weighted: bool) -> np.ndarray:
    a = graph.adjacency(weighted=weighted)
    if weighted:
        return a + a.T
    return ((a + a.T) > 0).astype(np.float64)


def eigen_centrality(graph: Graph, weighted: bool = False,
                     tol: float = 1e-10, max_iter: int = 10000) -> np.ndarray:
    """Dominant-eigenvector score on the undirected projection, max 1.

    Power iteration runs on the shifted matrix M + I, which has the
    same dominant eigenvector as M but cannot oscillate on bipartite
    structures.
    """
    if graph.edge_count == 0:
        raise DataError("eigen centrality needs at least one edge")
    m = _undirected_matrix(graph, weighted)
    n = graph.n
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = m @ x + x
        top = y.max()
        if top <= 0:
            raise EstimationError("eigen iteration collapsed to zero")
        y /= top
        if np.abs(y - x).max() < tol:
            return y
        x = y
    raise EstimationError(f"eigen centrality did not converge in {max_iter} iterations")


def hits(graph: Graph, weighted: bool = False,
         tol: float = 1e-10, max_iter: int = 10000) -> tuple[np.ndarray, np.ndarray]:
    """Hub and authority scores, each max-normalized every step.

    Alternates a = A^T h, h = A a until both vectors move less than
    tol in the max norm.
    """
    if graph.edge_count == 0:
        raise DataError("HITS needs at least one edge")
    a_mat = graph.adjacency(weighted=weighted)
    n = graph.n
    hub = np.ones(n)
    auth = np.ones(n)
    for _ in range(max_iter):
        auth_new = a_mat.T @ hub
        top = auth_new.max()
        if top > 0:
            auth_new /= top
        hub_new = a_mat @ auth_new
        top = hub_new.max()
        if top > 0:
            hub_new /= top
        if np.abs(auth_new - auth).max() < tol and np.abs(hub_new - hub).max() < tol:
            return hub_new, auth_new
        hub, auth = hub_new, auth_new
    raise EstimationError(f"HITS did not converge in {max_iter} iterations")


# -- density family -----------------------------------------------------------


def density(graph: Graph) -> float:
    if graph.n < 2:
        raise DataError("density needs at least 2 nodes")
    return graph.edge_count / (graph.n * (graph.n - 1))


def reciprocity(graph: Graph) -> float:
    """Fraction of directed edges whose reverse edge also exists."""
    if graph.edge_count == 0:
        raise DataError("reciprocity needs at least one edge")
    mutual = sum(1 for i, j, _ in graph.edges() if graph.has_edge(j, i))
    return mutual / graph.edge_count


# -- triads and clustering ----------------------------------------------------


def triad_closure(graph: Graph) -> TriadReport:
    """Closure statistics on the undirected projection.

    transitivity is the triple ratio 3*(triangles)/(connected triples);
    triad_closed_fraction is the neighborhood-average form, the mean of
    the per-node local coefficients over nodes of degree >= 2. Both are
    reported because the two definitions disagree on most graphs.
    """
    if graph.n < 3:
        raise DataError("triad closure needs at least 3 nodes")
    b = _undirected_matrix(graph, weighted=False)
    deg = b.sum(axis=1)
    b3_diag = ((b @ b) * b).sum(axis=1)
    pairs = deg * (deg - 1)
    local = np.full(graph.n, np.nan)
    ok = pairs > 0
    local[ok] = b3_diag[ok] / pairs[ok]
    triples = pairs.sum()
    transitivity = float(b3_diag.sum() / triples) if triples > 0 else 0.0
    mean_local = float(np.nanmean(local)) if ok.any() else 0.0
    return TriadReport(
        triad_closed_fraction=mean_local,
        transitivity=transitivity,
        mean_local_clustering=mean_local,
        local_clustering=local,
    )


def maximal_cliques(graph: Graph, min_size: int = 1) -> list[tuple[int, ...]]:
    """All maximal cliques of the undirected projection, size >= min_size.

    Bron-Kerbosch with pivoting; output cliques are sorted internally
    and listed in lexicographic order.
    """
    n = graph.n
    nbr = [set(int(u) for u in graph.undirected_neighbors(i)) for i in range(n)]
    found: list[tuple[int, ...]] = []

    def expand(r: set[int], p: set[int], x: set[int]) -> None:
        if len(r) + len(p) < min_size:
            return
        if not p and not x:
            found.append(tuple(sorted(r)))
            return
        pivot = max(sorted(p | x), key=lambda u: len(p & nbr[u]))
        for v in sorted(p - nbr[pivot]):
            expand(r | {v}, p & nbr[v], x & nbr[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(range(n)), set())
    return sorted(found)


# -- assortativity ------------------------------------------------------------


def assortativity_categorical(graph: Graph, labels: Sequence[str]) -> float:
    """Newman's categorical assortativity over the directed mixing matrix."""
    if len(labels) != graph.n:
        raise DataError(f"{len(labels)} labels for {graph.n} nodes")
    if graph.edge_count == 0:
        raise DataError("assortativity needs at least one edge")
    levels = sorted(set(labels))
    lut = {lvl: k for k, lvl in enumerate(levels)}
    code = np.asarray([lut[v] for v in labels], dtype=np.int64)
    src, dst, _ = graph.edge_arrays()
    e = np.zeros((len(levels), len(levels)))
    np.add.at(e, (code[src], code[dst]), 1.0)
    e /= graph.edge_count
    a = e.sum(axis=1)
    b = e.sum(axis=0)
    trace = float(np.trace(e))
    chance = float(a @ b)
    if abs(1.0 - chance) < 1e-12:
        if abs(trace - 1.0) < 1e-12:
            return 1.0
        raise DataError("assortativity undefined: degenerate mixing margins")
    return (trace - chance) / (1.0 - chance)


def assortativity_scalar(graph: Graph,
                         values: Sequence[float] | None = None,
                         *,
                         source_values: Sequence[float] | None = None,
                         target_values: Sequence[float] | None = None) -> float | None:
    """Pearson correlation of endpoint scalars over directed edges.

    Pass `values` to score the same per-node scalar on both ends
    (attribute mode), or the source/target pair to split the metric by
    direction (out-in mode). Edges touching a NaN value are dropped;
    zero variance on either end makes the coefficient undefined (None).
    """
    if values is not None:
        source_values = target_values = values
    if source_values is None or target_values is None:
        raise DataError("provide `values` or both `source_values` and `target_values`")
    xs = np.asarray(source_values, dtype=np.float64)
    xt = np.asarray(target_values, dtype=np.float64)
    if xs.shape != (graph.n,) or xt.shape != (graph.n,):
        raise DataError("value vectors must have one entry per node")
    src, dst, _ = graph.edge_arrays()
    u = xs[src]
    v = xt[dst]
    ok = np.isfinite(u) & np.isfinite(v)
    u, v = u[ok], v[ok]
    if u.shape[0] < 2:
        return None
    su, sv = u.std(), v.std()
    if su == 0.0 or sv == 0.0:
        return None
    return float(((u - u.mean()) * (v - v.mean())).mean() / (su * sv))


# -- report builders ----------------------------------------------------------


def centrality_report(graph: Graph, threads: int = 1,
                      weighted: bool = False) -> CentralityReport:
    in_deg, out_deg, out_str = degree_strength(graph)
    hub, auth = hits(graph, weighted=weighted)
    return CentralityReport(
        in_degree=in_deg,
        out_degree=out_deg,
        out_strength=out_str,
        closeness=closeness(graph, "out", threads=threads),
        betweenness=betweenness(graph, threads=threads),
        eigen=eigen_centrality(graph, weighted=weighted),
        hub=hub,
        authority=auth,
        local_clustering=triad_closure(graph).local_clustering,
    )


def connectivity_report(graph: Graph,
                        min_clique_size: int | None = None) -> ConnectivityReport:
    """Graph-level cohesion summary.

    With min_clique_size=None only the maximum-size cliques are listed;
    otherwise every maximal clique at or above the threshold is kept.
    """
    triads = triad_closure(graph)
    cliques = maximal_cliques(graph, min_size=min_clique_size or 1)
    max_size = max((len(c) for c in cliques), default=0)
    if min_clique_size is None:
        cliques = [c for c in cliques if len(c) == max_size]
    return ConnectivityReport(
        density=density(graph),
        reciprocity=reciprocity(graph),
        transitivity=triads.transitivity,
        mean_local_clustering=triads.mean_local_clustering,
        triad_closed_fraction=triads.triad_closed_fraction,
        maximal_cliques=tuple(cliques),
        max_clique_size=max_size,
    )


STRUCTURAL_METRICS = ("out_degree", "in_degree", "out_strength", "closeness",
                      "betweenness", "eigen", "hub", "authority")


def assortativity_report(graph: Graph,
                         attrs=None,
                         centrality: CentralityReport | None = None
                         ) -> list[tuple[str, str, float | None]]:
    """(variable, kind, coefficient) rows; None marks undefined scores.

    Categorical and scalar attribute rows need an attribute table;
    structural rows need a centrality report. Structural metrics are
    scored in attribute mode (the same scalar on both edge ends).
    """
    rows: list[tuple[str, str, float | None]] = []
    if attrs is not None:
        for column in attrs.categorical_columns:
            rows.append((column, "categorical",
                         assortativity_categorical(graph, attrs.categorical(column))))
        for column in attrs.numeric_columns:
            rows.append((column, "scalar",
                         assortativity_scalar(graph, attrs.numeric(column))))
    if centrality is not None:
        for name in STRUCTURAL_METRICS:
            rows.append((name, "structural",
                         assortativity_scalar(graph, centrality.metric(name))))
    return rows
