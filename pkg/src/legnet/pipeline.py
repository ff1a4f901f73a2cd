"""Batch pipeline: ingest through report bundle.

Every artifact is machine-first (CSV/JSON) plus one Markdown summary.
Output is byte-reproducible for a fixed config and inputs: no
timestamps, sorted JSON keys, fixed float formatting, and all
randomness flows from the configured seed.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import math
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .attributes import AttributeTable, subgraph_by_level
from .config import (RunConfig, STAGES, build_model, model_needs_attrs,
                     model_needs_centrality, spec_from_terms)
from .errors import DataError
from .ergm import (ErgmFit, McmleControl, fit_exact_dyad, fit_mcmle, fit_mple,
                   likelihood_ratio_test, mcmc_diagnostics, report_effects)
from .graph import Graph, components
from .io import dot_dump, graphml_dump, load_attributes, load_edge_list, save_edge_list
from .partition import adjusted_rand, nmi, rand_index
from .sbm import SbmFit, community_summary, interaction_matrix, select_q
from .topology import (CentralityReport, assortativity_report,
                       centrality_report, connectivity_report, density)


def fmt(x: Any) -> str:
    """Fixed CSV float formatting; infinities mirror the sign."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    v = float(x)
    if math.isnan(v):
        return ""
    if math.isinf(v):
        return "Inf" if v > 0 else "-Inf"
    return "%.12g" % v


def compare_models(fits: Sequence[tuple[str, ErgmFit]]) -> list[dict]:
    """AIC-ranked comparison with reductions against the first fit.

    All fits must come from the same graph; the first entry is the
    baseline for the percentage columns, whatever its rank.
    """
    if len(fits) < 2:
        raise DataError("model comparison needs at least 2 fits")
    digests = {fit.graph_digest for _, fit in fits}
    if len(digests) != 1:
        raise DataError("fits come from different graphs")
    base = fits[0][1]
    rows = []
    for name, fit in fits:
        rows.append({
            "model": name,
            "terms": fit.k,
            "log_likelihood": fit.log_likelihood,
            "aic": fit.aic,
            "bic": fit.bic,
            "aic_reduction_pct": 100.0 * (base.aic - fit.aic) / base.aic,
            "bic_reduction_pct": 100.0 * (base.bic - fit.bic) / base.bic,
        })
    rows.sort(key=lambda r: r["aic"])
    return rows


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


class Pipeline:
    """Executes the configured stages and emits the report bundle."""

    def __init__(self, config: RunConfig) -> None:
        config.validate()
        self.config = config
        self.out = Path(config.out_dir)
        self.notices: list[str] = []
        self._digests: dict[str, str] = {}
        self._graph: Graph | None = None
        self._attrs: AttributeTable | None = None
        self._attrs_loaded = False
        self._centrality: CentralityReport | None = None
        self._connectivity = None
        self._sbm: SbmFit | None = None
        self._sbm_curve: list[tuple[int, float]] | None = None
        self._fits: list[tuple[str, ErgmFit]] = []
        self._selected: list[str] = [s for s in STAGES if s in config.stages]

    # -- shared lazy inputs ------------------------------------------------

    @property
    def graph(self) -> Graph:
        if self._graph is None:
            self._graph = load_edge_list(self.config.edges,
                                         format=self.config.edge_format,
                                         json_fields=self.config.json_fields)
        return self._graph

    @property
    def attrs(self) -> AttributeTable | None:
        if not self._attrs_loaded:
            self._attrs_loaded = True
            if self.config.attrs:
                self._attrs = load_attributes(self.config.attrs, self.graph)
            else:
                self._attrs = None
        return self._attrs

    @property
    def centrality(self) -> CentralityReport:
        if self._centrality is None:
            self._centrality = centrality_report(
                self.graph, threads=self.config.threads,
                weighted=self.config.weighted_spectral)
        return self._centrality

    @property
    def connectivity(self):
        if self._connectivity is None:
            self._connectivity = connectivity_report(
                self.graph, min_clique_size=self.config.min_clique_size)
        return self._connectivity

    def notice(self, text: str) -> None:
        self.notices.append(text)

    # -- emission helpers ----------------------------------------------------

    def _write_bytes(self, name: str, payload: bytes) -> None:
        path = self.out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
        self._digests[name] = hashlib.sha256(payload).hexdigest()

    def _write_text(self, name: str, text: str) -> None:
        self._write_bytes(name, text.encode("utf-8"))

    def _write_json(self, name: str, obj: Any) -> None:
        payload = json.dumps(_jsonable(obj), sort_keys=True, indent=2)
        self._write_text(name, payload + "\n")

    def _write_csv(self, name: str, header: Sequence[str],
                   rows: Sequence[Sequence[Any]]) -> None:
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
        self._write_text(name, buf.getvalue())

    # -- stages -----------------------------------------------------------

    def run(self) -> dict:
        """Execute the selected stages in dependency order."""
        self.out.mkdir(parents=True, exist_ok=True)
        wanted = set(self.config.stages)
        if "ergm" in wanted and "topology" not in wanted and any(
                model_needs_centrality(m) for m in self.config.models):
            wanted.add("topology")
            self.notice("topology stage forced: requested models use "
                        "centrality covariates")
        selected = [s for s in STAGES if s in wanted]
        self._selected = selected
        for stage in selected:
            getattr(self, f"_stage_{stage}")()
        manifest = self._manifest()
        payload = json.dumps(_jsonable(manifest), sort_keys=True, indent=2) + "\n"
        (self.out / "manifest.json").write_bytes(payload.encode("utf-8"))
        return manifest

    def _manifest(self) -> dict:
        inputs = {}
        for label, path in (("edges", self.config.edges), ("attrs", self.config.attrs)):
            if path and Path(path).exists():
                inputs[label] = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        return {
            "tool": f"legnet {__version__}",
            "numpy": np.__version__,
            "seed": self.config.seed,
            "stages": list(self._selected),
            "inputs": inputs,
            "outputs": dict(sorted(self._digests.items())),
            "notices": list(self.notices),
        }

    def _stage_ingest(self) -> None:
        graph = self.graph
        report = components(graph)
        summary = {
            "nodes": graph.n,
            "edges": graph.edge_count,
            "density": density(graph),
            "weak_component_sizes": list(report.weak_sizes),
            "strong_component_sizes": list(report.strong_sizes),
            "articulation_points": [str(v) for v in report.articulation_points],
            "is_giant_weak_component": report.is_giant_weak_component,
            "is_strongly_connected": report.is_strongly_connected,
        }
        self._write_json("graph_summary.json", summary)
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["source", "target", "weight"])
        for s, t, w in graph.edge_records():
            writer.writerow([s, t, repr(w)])
        self._write_text("edges.csv", buf.getvalue())
        self._write_text("graph.graphml", graphml_dump(graph, self.attrs))
        self._write_text("graph.dot", dot_dump(graph, self.attrs))

    def _stage_topology(self) -> None:
        graph = self.graph
        cent = self.centrality
        rows = []
        for i, node in enumerate(graph.node_ids):
            rows.append([str(node),
                         int(cent.in_degree[i]), int(cent.out_degree[i]),
                         cent.out_strength[i], cent.closeness[i],
                         cent.betweenness[i], cent.eigen[i], cent.hub[i],
                         cent.authority[i], cent.local_clustering[i]])
        self._write_csv("centrality.csv",
                        ["node_id", "in_degree", "out_degree", "out_strength",
                         "closeness", "betweenness", "eigen", "hub",
                         "authority", "local_clustering"], rows)
        conn = self.connectivity
        payload = {
            "density": conn.density,
            "reciprocity": conn.reciprocity,
            "transitivity": conn.transitivity,
            "mean_local_clustering": conn.mean_local_clustering,
            "triad_closed_fraction": conn.triad_closed_fraction,
            "max_clique_size": conn.max_clique_size,
            "maximal_cliques": [[str(graph.id_of(v)) for v in clique]
                                for clique in conn.maximal_cliques],
        }
        if self.attrs is not None:
            by_level = {}
            for column in ("party", "chamber"):
                if self.attrs.has(column):
                    for level in self.attrs.levels(column):
                        sub = subgraph_by_level(self.graph, self.attrs, column, level)
                        if sub.n >= 2:
                            by_level[f"{column}:{level}"] = density(sub)
            payload["subgraph_density"] = by_level
        self._write_json("connectivity.json", payload)

    def _stage_assort(self) -> None:
        if self.attrs is None:
            self.notice("assortativity: attribute rows skipped (no attribute file); "
                        "structural rows only")
        rows = [(name, kind, coeff) for name, kind, coeff in
                assortativity_report(self.graph, self.attrs, self.centrality)]
        self._write_csv("assortativity.csv", ["variable", "kind", "coefficient"], rows)

    def _resolve_model(self, entry: Any, index: int):
        cent = self.centrality if model_needs_centrality(entry) else self._centrality
        if isinstance(entry, str):
            name = entry
            if model_needs_attrs(name) and self.attrs is None:
                self.notice(f"ergm: {name} skipped (needs the attribute file)")
                return None, None
            spec = build_model(name, self.graph, self.attrs, cent,
                               party_reassignment=self.config.party_reassignment,
                               standardize=self.config.standardize)
            return name, spec
        if isinstance(entry, dict):
            name = entry.get("name", f"custom{index}")
            terms = entry.get("terms", [])
        else:
            name, terms = f"custom{index}", entry
        spec = spec_from_terms(terms, self.attrs, cent,
                               standardize=self.config.standardize)
        return name, spec

    def _fit(self, spec) -> ErgmFit:
        method = self.config.ergm_estimator
        if method == "exact-dyad":
            return fit_exact_dyad(self.graph, spec)
        if method == "mple":
            return fit_mple(self.graph, spec)
        mcmc = dict(self.config.mcmc)
        mcmc.setdefault("seed", self.config.seed)
        return fit_mcmle(self.graph, spec, McmleControl(**mcmc))

    def _stage_ergm(self) -> None:
        coef_rows = []
        effect_rows = []
        null_fit = None
        for index, entry in enumerate(self.config.models, start=1):
            name, spec = self._resolve_model(entry, index)
            if spec is None:
                continue
            fit = self._fit(spec)
            self._fits.append((name, fit))
            if fit.k == 1 and fit.labels == ("edges",):
                null_fit = fit
            payload = {
                "model": name,
                "method": fit.method,
                "terms": list(fit.labels),
                "theta": fit.theta,
                "std_err": fit.std_err,
                "p_values": fit.p_values,
                "separation": fit.separation,
                "log_likelihood": fit.log_likelihood,
                "aic": fit.aic,
                "bic": fit.bic,
                "converged": fit.converged,
                "iterations": fit.iterations,
            }
            if fit.method == "mcmle":
                payload["acceptance_rate"] = fit.diagnostics.get("acceptance_rate")
                payload["phases"] = fit.diagnostics.get("phases")
                payload["mc_std_err"] = fit.diagnostics.get("mc_std_err")
                self._write_json(f"ergm_{name}_diagnostics.json",
                                 mcmc_diagnostics(fit))
            self._write_json(f"ergm_{name}.json", payload)
            for k, label in enumerate(fit.labels):
                coef_rows.append([name, label, fit.theta[k], fit.std_err[k],
                                  fit.p_values[k]])
            for row in report_effects(fit):
                effect_rows.append([name, row["term"], row["theta"],
                                    row["exp"], row["expit"]])
        if coef_rows:
            self._write_csv("ergm_coefficients.csv",
                            ["model", "term", "estimate", "std_err", "p_value"],
                            coef_rows)
            self._write_csv("ergm_effects.csv",
                            ["model", "term", "theta", "exp", "expit"],
                            effect_rows)
        if len(self._fits) >= 2:
            ranking = compare_models(self._fits)
            self._write_csv("model_comparison.csv",
                            ["model", "terms", "log_likelihood", "aic", "bic",
                             "aic_reduction_pct", "bic_reduction_pct"],
                            [[r["model"], r["terms"], r["log_likelihood"],
                              r["aic"], r["bic"], r["aic_reduction_pct"],
                              r["bic_reduction_pct"]] for r in ranking])
        if null_fit is not None and len(self._fits) >= 2:
            tests = []
            for name, fit in self._fits:
                if fit is null_fit or fit.k <= null_fit.k:
                    continue
                stat, df, p = likelihood_ratio_test(fit, null_fit)
                tests.append([name, stat, df, p])
            if tests:
                self._write_csv("ergm_lrt_vs_edges.csv",
                                ["model", "statistic", "df", "p_value"], tests)

    def _stage_sbm(self) -> None:
        lo, hi = self.config.q_range
        best, curve = select_q(self.graph, range(lo, hi + 1),
                               restarts=self.config.sbm_restarts,
                               seed=self.config.seed,
                               init=self.config.sbm_init)
        self._sbm, self._sbm_curve = best, curve
        self._write_csv("sbm_icl_curve.csv", ["q", "icl"],
                        [[q, value] for q, value in curve])
        self._write_json("sbm_fit.json", {
            "q": best.q,
            "requested_q": best.requested_q,
            "alpha": best.alpha,
            "pi": best.pi,
            "icl": best.icl,
            "elbo": best.elbo,
            "converged": best.converged,
            "iterations": best.iterations,
            "collapsed": best.collapsed,
        })
        graph = self.graph
        self._write_csv("communities.csv", ["node_id", "community"],
                        [[str(graph.id_of(i)), int(best.labels[i]) + 1]
                         for i in range(graph.n)])
        pi, notes = interaction_matrix(best, self.attrs)
        self._write_csv("interaction_matrix.csv",
                        ["community"] + [str(c + 1) for c in range(best.q)],
                        [[str(r + 1)] + [pi[r, c] for c in range(best.q)]
                         for r in range(best.q)])
        self._write_json("community_annotations.json", notes)
        summary = community_summary(best, self.attrs, self._centrality)
        if summary:
            header = list(summary[0].keys())
            self._write_csv("community_summary.csv", header,
                            [[row.get(column) if isinstance(row.get(column), str)
                              else row.get(column) for column in header]
                             for row in summary])

    def _stage_score(self) -> None:
        if self.attrs is None:
            self.notice("partition scores skipped (no attribute file)")
            return
        if self._sbm is None:
            self._stage_sbm()
        labels = [int(v) for v in self._sbm.labels]
        rows = []
        for column in self.config.score_against:
            if not self.attrs.has(column):
                self.notice(f"partition scores: column {column!r} not loaded; skipped")
                continue
            other = list(self.attrs.categorical(column))
            rows.append([column,
                         rand_index(labels, other),
                         adjusted_rand(labels, other),
                         nmi(labels, other)])
        if rows:
            self._write_csv("partition_scores.csv",
                            ["partition", "rand", "adjusted_rand", "nmi"], rows)

    def _stage_report(self) -> None:
        self._write_text("summary.md", self._summary_markdown())

    # -- markdown summary ---------------------------------------------------

    def _top_table(self, values: np.ndarray, title: str, k: int = 5) -> list[str]:
        graph = self.graph
        order = np.argsort(-np.where(np.isfinite(values), values, -np.inf),
                           kind="stable")[:k]
        lines = [f"### Top {k} by {title}", "", "| node | value |", "| --- | --- |"]
        for i in order:
            lines.append(f"| {graph.id_of(int(i))} | {fmt(values[int(i)])} |")
        lines.append("")
        return lines

    def _summary_markdown(self) -> str:
        graph = self.graph
        lines = ["# Network analysis summary", ""]
        report = components(graph)
        lines += [
            f"Nodes: {graph.n}; directed edges: {graph.edge_count}; "
            f"density: {fmt(density(graph))}.",
            f"Weak components: {len(report.weak_sizes)}; "
            f"strongly connected: {report.is_strongly_connected}; "
            f"articulation points: {len(report.articulation_points)}.",
            "",
        ]
        if self._centrality is not None:
            cent = self._centrality
            lines += self._top_table(cent.in_degree.astype(float), "in-degree")
            lines += self._top_table(cent.out_degree.astype(float), "out-degree")
            lines += self._top_table(cent.betweenness, "betweenness")
            lines += self._top_table(cent.eigen, "eigenvector score")
            lines += self._top_table(cent.hub, "hub score")
            lines += self._top_table(cent.authority, "authority score")
        if self._connectivity is not None:
            conn = self._connectivity
            lines += [
                "## Cohesion", "",
                f"Reciprocity {fmt(conn.reciprocity)}; "
                f"transitivity {fmt(conn.transitivity)}; "
                f"triad closed fraction {fmt(conn.triad_closed_fraction)}; "
                f"mean local clustering {fmt(conn.mean_local_clustering)}.",
                f"Largest cliques: {len(conn.maximal_cliques)} of size "
                f"{conn.max_clique_size} (see connectivity.json).",
                "",
            ]
        if "assort" in self.config.stages:
            lines += ["## Assortativity", "",
                      "| variable | kind | coefficient |", "| --- | --- | --- |"]
            for name, kind, coeff in assortativity_report(
                    graph, self.attrs,
                    self._centrality if self._centrality is not None else None):
                value = fmt(coeff) if coeff is not None else "undefined"
                lines.append(f"| {name} | {kind} | {value} |")
            lines.append("")
        if self._fits:
            lines += ["## Models", "",
                      "| model | term | estimate | std err | p |",
                      "| --- | --- | --- | --- | --- |"]
            for name, fit in self._fits:
                for k, label in enumerate(fit.labels):
                    lines.append(f"| {name} | {label} | {fmt(fit.theta[k])} | "
                                 f"{fmt(fit.std_err[k])} | {fmt(fit.p_values[k])} |")
            lines += ["", "| model | AIC | BIC |", "| --- | --- | --- |"]
            for name, fit in self._fits:
                lines.append(f"| {name} | {fmt(fit.aic)} | {fmt(fit.bic)} |")
            lines.append("")
        if self._sbm is not None:
            best = self._sbm
            counts = np.bincount(best.labels, minlength=best.q)
            lines += [
                "## Communities", "",
                f"ICL-selected Q = {best.q} (curve in sbm_icl_curve.csv).",
                "",
                "| community | size | share |", "| --- | --- | --- |",
            ]
            for c in range(best.q):
                lines.append(f"| {c + 1} | {int(counts[c])} | "
                             f"{fmt(counts[c] / graph.n)} |")
            diag = np.sort(np.diag(best.pi))[::-1]
            top_two = ", ".join(fmt(v) for v in diag[:2])
            lines += ["", f"Two densest within-community rates: {top_two}.", ""]
        if self.notices:
            lines += ["## Notices", ""]
            lines += [f"- {n}" for n in self.notices]
            lines.append("")
        return "\n".join(lines) + "\n"


def run(config: RunConfig) -> dict:
    """Execute the configured pipeline; returns the manifest."""
    return Pipeline(config).run()
