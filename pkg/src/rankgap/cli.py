"""Command line interface: scenario generation, runs, sweeps, reports.

Scenario documents are JSON.  A document resolves, together with its seed, to
a concrete matrix, partition, tolerance, and optional uprating strategy; the
same document and seed always produce byte-identical outputs.  Reports are
emitted through :mod:`rankgap.reports`, so numbers are capped at 12
significant digits and keys are sorted.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import fixtures, generators, reports
from .collective import (
    CollectiveStrategy,
    FinderInputs,
    aggregate_value,
    apply_uprating,
    check_sufficient_conditions,
    find_eta,
    margin_numerator,
    robustness_margin,
    sufficient_gap,
)
from .completion import miss_probability_mc, reduce_solution, sparsest_majority_completion
from .learner import fit_learner, kappa_k, recommend, social_welfare, tvr
from .matrix import (
    GroupPartition,
    RatingsMatrix,
    block_partition,
    find_picky_items,
    load_ratings_csv,
    matrix_l1_norm,
    numeric_rank_of,
    save_ratings_csv,
    singular_value_gap,
    singular_values_of,
)
from .popgap import classify_users, popularity_gap_interval

OUT_DIR_ENV = "RANKGAP_OUT_DIR"

SCENARIO_KEYS = {"name", "seed", "matrix", "alpha", "alpha_sweep", "strategy", "top_k"}
MATRIX_FAMILIES = ("paired", "indicator", "csv", "block_random", "gap_class")

PRESETS: dict[str, dict] = {
    # Two popular indicator groups of four users, two singleton niche groups.
    "paired": {
        "name": "paired",
        "seed": 0,
        "matrix": {"family": "paired", "m_maj": 4, "m_minor": 1},
        "alpha": 1.5,
        "top_k": 1,
    },
    # Four popular groups of 100 users, a 4-user picky item, a 1-user niche
    # item; a quarter of each popular group uprates the picky item.
    "multigroup": {
        "name": "multigroup",
        "seed": 0,
        "matrix": {
            "family": "indicator",
            "popular_sizes": [100, 100, 100, 100],
            "niche_sizes": [4, 1],
        },
        "alpha": 2.1,
        "strategy": {
            "target_item": "picky",
            "selector": {"kind": "stratified", "fraction": 0.25},
            "eta": "auto",
        },
        "top_k": 1,
    },
}

__all__ = [
    "Scenario",
    "MaterializedScenario",
    "PRESETS",
    "generate_scenario",
    "run",
    "sweep",
    "mc_demo",
    "main",
]


@dataclass(frozen=True)
class Scenario:
    """Validated scenario document; the seed is mandatory."""

    name: str
    seed: int
    matrix_spec: dict
    alpha: float | None
    alpha_sweep: dict | None
    strategy_spec: dict | None
    top_k: int

    @classmethod
    def from_dict(cls, doc: dict) -> "Scenario":
        unknown = set(doc) - SCENARIO_KEYS
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        if "seed" not in doc:
            raise ValueError("scenario documents require a seed")
        matrix_spec = doc.get("matrix")
        if not isinstance(matrix_spec, dict) or "family" not in matrix_spec:
            raise ValueError("scenario matrix spec must be an object with a family")
        if matrix_spec["family"] not in MATRIX_FAMILIES:
            raise ValueError(
                f"unknown matrix family {matrix_spec['family']!r}; "
                f"expected one of {MATRIX_FAMILIES}"
            )
        sweep_spec = doc.get("alpha_sweep")
        if sweep_spec is not None:
            missing = {"start", "stop", "step"} - set(sweep_spec)
            if missing:
                raise ValueError(f"alpha_sweep is missing {sorted(missing)}")
            if float(sweep_spec["step"]) <= 0:
                raise ValueError("alpha_sweep step must be positive")
        alpha = doc.get("alpha")
        top_k = int(doc.get("top_k", 1))
        if top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {top_k}")
        return cls(
            name=str(doc.get("name", "scenario")),
            seed=int(doc["seed"]),
            matrix_spec=dict(matrix_spec),
            alpha=None if alpha is None else float(alpha),
            alpha_sweep=None if sweep_spec is None else dict(sweep_spec),
            strategy_spec=None if doc.get("strategy") is None else dict(doc["strategy"]),
            top_k=top_k,
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "matrix": self.matrix_spec,
            "alpha": self.alpha,
            "alpha_sweep": self.alpha_sweep,
            "strategy": self.strategy_spec,
            "top_k": self.top_k,
        }


@dataclass(frozen=True)
class MaterializedScenario:
    """A scenario resolved to concrete data.

    Block-model families carry a partition; the popularity-model family
    carries a popular-prefix width instead.  ``drawn_alpha`` is set when the
    generator family draws its own tolerance.
    """

    scenario: Scenario
    matrix: RatingsMatrix
    partition: GroupPartition | None
    n_bar: int | None
    drawn_alpha: float | None


def _build_matrix(
    spec: dict, seed: int
) -> tuple[RatingsMatrix, GroupPartition | None, int | None, float | None]:
    family = spec["family"]
    if family == "paired":
        matrix, partition = generators.paired_indicator(
            int(spec["m_maj"]), int(spec["m_minor"])
        )
        return matrix, partition, None, None
    if family == "indicator":
        matrix, partition = generators.indicator_scenario(
            spec["popular_sizes"], spec["niche_sizes"]
        )
        return matrix, partition, None, None
    if family == "csv":
        matrix = load_ratings_csv(spec["path"])[0]
        partition = block_partition(
            int(spec["m_bar"]), int(spec["n_bar"]), matrix.rows, matrix.cols
        )
        partition.validate_for(matrix)
        return matrix, partition, None, None
    rng = np.random.default_rng(seed)
    if family == "block_random":
        sc = generators.random_block_scenario(rng)
        return sc.matrix, sc.partition, None, sc.alpha
    if family == "gap_class":
        inst = generators.gap_class_instance(rng)
        return inst.matrix, None, inst.n_bar, inst.alpha
    raise ValueError(f"unknown matrix family {family!r}")


def generate_scenario(doc: dict) -> MaterializedScenario:
    """Resolve a scenario document to concrete data, deterministically."""
    scenario = Scenario.from_dict(doc)
    matrix, partition, n_bar, drawn_alpha = _build_matrix(
        scenario.matrix_spec, scenario.seed
    )
    return MaterializedScenario(
        scenario=scenario,
        matrix=matrix,
        partition=partition,
        n_bar=n_bar,
        drawn_alpha=drawn_alpha,
    )


def _resolve_alpha(mat: MaterializedScenario) -> float:
    if mat.scenario.alpha is not None:
        return mat.scenario.alpha
    if mat.drawn_alpha is not None:
        return mat.drawn_alpha
    raise ValueError("scenario has no alpha and its family draws none")


def _user_classes(mat: MaterializedScenario) -> list[str]:
    if mat.partition is not None:
        labels = []
        for u in range(mat.matrix.rows):
            labels.append("majority" if u in mat.partition.majority_users else "minority")
        return labels
    classes = classify_users(mat.matrix, mat.n_bar)
    labels = []
    for u in range(mat.matrix.rows):
        in_maj = u in classes.majority
        in_min = u in classes.minority
        labels.append("both" if in_maj and in_min else "majority" if in_maj else "minority")
    return labels


def _chosen_value(rec, top_k: int):
    if top_k == 1:
        return rec.item
    return sorted(rec.chosen)


def _run_side(
    mat: MaterializedScenario,
    revealed: RatingsMatrix,
    alpha: float,
):
    """Fit, recommend (derandomized), and price welfare against true ratings."""
    model = fit_learner(revealed, alpha)
    outcome = recommend(model.truncated, k_items=mat.scenario.top_k, derandomize=True)
    welfare = social_welfare(mat.matrix, outcome, R_tilde=revealed)
    if mat.partition is not None:
        interval = singular_value_gap(mat.matrix, mat.partition)
    else:
        interval = popularity_gap_interval(mat.matrix, mat.n_bar)
    side = {
        "alpha": float(alpha),
        "spectrum": [float(s) for s in model.spectrum.singular_values],
        "chosen_rank": model.chosen_rank,
        "tvr": tvr(model.spectrum, model.chosen_rank),
        "gap_interval": [interval.lower, interval.upper],
        "social_welfare": welfare.social_welfare,
        "u_ben": welfare.u_ben,
        "u_en": welfare.u_en,
    }
    return side, outcome, welfare


def _resolve_strategy(
    mat: MaterializedScenario, alpha: float
) -> tuple[CollectiveStrategy, FinderInputs, float, str]:
    spec = mat.scenario.strategy_spec
    if mat.partition is None:
        raise ValueError("collective uprating runs require a block-model scenario")
    matrix, partition = mat.matrix, mat.partition

    target = spec.get("target_item", "picky")
    if target == "picky":
        picky = find_picky_items(matrix, partition)
        if not picky:
            raise ValueError("scenario has no picky item to target")
        target = picky[0][0]
    target = int(target)

    selector = spec.get("selector", {"kind": "stratified", "fraction": 0.25})
    kind = selector.get("kind", "stratified")
    if kind == "stratified":
        collective = generators.stratified_collective(
            matrix, partition, float(selector.get("fraction", 0.25))
        )
    elif kind == "explicit":
        collective = frozenset(int(u) for u in selector["users"])
    else:
        raise ValueError(f"unknown collective selector kind {kind!r}")
    if not collective:
        raise ValueError("collective selector chose no users")

    maj_block = matrix.entries[
        np.ix_(sorted(partition.majority_users), sorted(partition.majority_items))
    ]
    k_maj = numeric_rank_of(maj_block)
    sigma_kmaj = float(singular_values_of(maj_block)[k_maj - 1])
    inputs = FinderInputs(
        sigma_kmaj=sigma_kmaj,
        alpha=alpha,
        n_bar=partition.n_bar,
        picky_col_sq=float((matrix.entries[:, target] ** 2).sum()),
        av=aggregate_value(matrix, collective, partition.n_bar),
        kappa=kappa_k(matrix, partition, 1),
        coll_size=len(collective),
    )

    eta_spec = spec.get("eta", "auto")
    if eta_spec == "auto":
        eta = find_eta(inputs)
        source = "auto"
        if eta == 0.0:
            raise ValueError(
                "the uprating finder returned 0: no value passes the sufficient "
                "conditions for this scenario"
            )
    else:
        eta = float(eta_spec)
        source = "given"
    strategy = CollectiveStrategy(target_item=target, collective=collective, eta=eta)
    strategy.validate_for(partition)
    return strategy, inputs, eta, source


def run(mat: MaterializedScenario) -> dict:
    """Truthful baseline plus, when a strategy is configured, a collective run."""
    scenario = mat.scenario
    alpha = _resolve_alpha(mat)
    truthful_side, truthful_outcome, truthful_welfare = _run_side(
        mat, mat.matrix, alpha
    )
    labels = _user_classes(mat)
    per_user = [
        {
            "user": u,
            "class": labels[u],
            "truthful_item": _chosen_value(truthful_outcome.users[u], scenario.top_k),
            "truthful_welfare": truthful_welfare.per_user_welfare[u],
            "collective_item": None,
            "collective_welfare": None,
        }
        for u in range(mat.matrix.rows)
    ]

    collective_side = None
    if scenario.strategy_spec is not None:
        strategy, inputs, eta, source = _resolve_strategy(mat, alpha)
        revealed = apply_uprating(mat.matrix, mat.partition, strategy)
        collective_side, collective_outcome, collective_welfare = _run_side(
            mat, revealed, alpha
        )
        minority_block = mat.matrix.entries[
            np.ix_(
                sorted(mat.partition.minority_users),
                sorted(mat.partition.minority_items),
            )
        ]
        sigma1_min = float(singular_values_of(minority_block)[0])
        sufficiency = check_sufficient_conditions(inputs, sigma1_min, eta)
        window = sufficient_gap(mat.matrix, mat.partition, strategy)
        margin = None
        if margin_numerator(inputs, eta) > 0:
            margin = robustness_margin(
                inputs,
                eta,
                l1_norm=matrix_l1_norm(mat.matrix),
                l2_norm=float(singular_values_of(mat.matrix.entries)[0]),
                n=mat.matrix.cols,
            )
        collective_side.update(
            {
                "gap_interval": [window.lower, window.upper],
                "eta": eta,
                "eta_source": source,
                "target_item": strategy.target_item,
                "collective_size": len(strategy.collective),
                "finder_inputs": {
                    "sigma_kmaj": inputs.sigma_kmaj,
                    "alpha": inputs.alpha,
                    "n_bar": inputs.n_bar,
                    "picky_col_sq": inputs.picky_col_sq,
                    "av": inputs.av,
                    "kappa": inputs.kappa,
                    "coll_size": inputs.coll_size,
                },
                "verdicts": dict(sufficiency.conditions),
                "margins": dict(sufficiency.margins),
                "ratio": collective_side["social_welfare"] / truthful_side["social_welfare"],
                "sw_delta": collective_side["social_welfare"]
                - truthful_side["social_welfare"],
                "u_en_delta": collective_side["u_en"] - truthful_side["u_en"],
                "robustness_margin": margin,
            }
        )
        for u in range(mat.matrix.rows):
            per_user[u]["collective_item"] = _chosen_value(
                collective_outcome.users[u], scenario.top_k
            )
            per_user[u]["collective_welfare"] = collective_welfare.per_user_welfare[u]

    report = {
        "kind": "run",
        "scenario": scenario.to_dict(),
        "matrix": _matrix_summary(mat),
        "truthful": truthful_side,
        "collective": collective_side,
        "per_user": per_user,
    }
    return report


def _matrix_summary(mat: MaterializedScenario) -> dict:
    summary = {"rows": mat.matrix.rows, "cols": mat.matrix.cols}
    if mat.partition is not None:
        summary.update(
            majority_users=len(mat.partition.majority_users),
            minority_users=len(mat.partition.minority_users),
            majority_items=len(mat.partition.majority_items),
            minority_items=len(mat.partition.minority_items),
        )
    else:
        classes = classify_users(mat.matrix, mat.n_bar)
        summary.update(
            majority_users=len(classes.majority),
            minority_users=len(classes.minority),
            majority_items=mat.n_bar,
            minority_items=mat.matrix.cols - mat.n_bar,
        )
    return summary


def _sweep_grid(spec: dict) -> list[float]:
    """Half-open grid [start, stop) with the given step."""
    start, stop, step = (float(spec[k]) for k in ("start", "stop", "step"))
    grid = []
    value = start
    index = 0
    while value < stop - 1e-12 * max(1.0, abs(stop)):
        grid.append(value)
        index += 1
        value = start + index * step
    if not grid:
        raise ValueError("alpha sweep grid is empty")
    return grid


def sweep(mat: MaterializedScenario) -> dict:
    """Truthful runs across the alpha grid; assembly sorted by run id."""
    scenario = mat.scenario
    if scenario.alpha_sweep is None:
        raise ValueError("sweep requires an alpha_sweep block in the scenario")
    runs = []
    for index, alpha in enumerate(_sweep_grid(scenario.alpha_sweep)):
        side, _, _ = _run_side(mat, mat.matrix, alpha)
        runs.append(
            {
                "id": index,
                "alpha": alpha,
                "chosen_rank": side["chosen_rank"],
                "tvr": side["tvr"],
                "social_welfare": side["social_welfare"],
            }
        )
    runs.sort(key=lambda r: r["id"])
    return {
        "kind": "sweep",
        "scenario": scenario.to_dict(),
        "matrix": _matrix_summary(mat),
        "runs": runs,
    }


def mc_demo(seed: int, per_user: int, trials: int) -> dict:
    """Ranks of the bundled completion fixtures plus the exploration Monte Carlo."""
    true4 = fixtures.mc_4x4_true()
    completed4 = fixtures.mc_4x4_completed()
    observed6, split6 = fixtures.mc_6x6_observed()
    zero_fill = sparsest_majority_completion(observed6, split6)
    less_sparse = fixtures.mc_6x6_less_sparse()
    reduced = reduce_solution(less_sparse, split6)

    mc_matrix, mc_split = fixtures.mc_10x10()
    estimate = miss_probability_mc(mc_matrix, mc_split, per_user, trials, seed)
    exact = _miss_probability_exact(mc_matrix, mc_split, per_user)
    sigma = math.sqrt(max(exact * (1 - exact), 1e-12) / trials)

    return {
        "kind": "mc_demo",
        "seed": seed,
        "per_user": per_user,
        "trials": trials,
        "ranks": {
            "true_4x4": numeric_rank_of(true4.entries),
            "completed_4x4": numeric_rank_of(completed4.entries),
            "zero_fill_6x6": numeric_rank_of(zero_fill.entries),
            "less_sparse_6x6": numeric_rank_of(less_sparse.entries),
            "reduced_6x6": numeric_rank_of(reduced.entries),
        },
        "reduced_equals_zero_fill": bool(
            np.array_equal(reduced.entries, zero_fill.entries)
        ),
        "miss_probability": {
            "estimate": estimate,
            "exact": exact,
            "stderr": sigma,
            "within_3_sigma": bool(abs(estimate - exact) <= 3 * sigma),
        },
    }


def _miss_probability_exact(
    matrix: RatingsMatrix, partition: GroupPartition, per_user: int
) -> float:
    """Closed-form probability that uniform per-row subsets miss every
    positive minority-block entry: rows are independent, and a row with h
    hot items is missed with probability C(n-h, q) / C(n, q)."""
    n = matrix.cols
    hot_per_row: dict[int, int] = {}
    for u in sorted(partition.minority_users):
        count = sum(
            1 for i in sorted(partition.minority_items) if matrix.entries[u, i] != 0.0
        )
        if count:
            hot_per_row[u] = count
    prob = 1.0
    for count in hot_per_row.values():
        if per_user > n - count:
            return 0.0
        prob *= math.comb(n - count, per_user) / math.comb(n, per_user)
    return prob


# ---------------------------------------------------------------------------
# Command handlers
# ---------------------------------------------------------------------------


def _load_scenario_doc(args) -> dict:
    if args.config and args.preset:
        raise ValueError("pass either --config or --preset, not both")
    if args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    elif args.preset:
        doc = json.loads(json.dumps(PRESETS[args.preset]))
    else:
        raise ValueError("a scenario is required: pass --config FILE or --preset NAME")
    if args.seed is not None:
        doc["seed"] = args.seed
    return doc


def _out_dir(args) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUT_DIR_ENV, "."))


def cmd_generate(args) -> int:
    mat = generate_scenario(_load_scenario_doc(args))
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    name = mat.scenario.name
    csv_path = out / f"{name}.ratings.csv"
    save_ratings_csv(csv_path, mat.matrix)
    doc_path = out / f"{name}.scenario.json"
    doc_path.write_bytes(reports.canonical_json_bytes(mat.scenario.to_dict()))
    print(f"wrote {csv_path} ({mat.matrix.rows}x{mat.matrix.cols}) and {doc_path}")
    return 0


def cmd_run(args) -> int:
    mat = generate_scenario(_load_scenario_doc(args))
    report = run(mat)
    path = reports.report_emit(
        report, args.format, _out_dir(args), f"{mat.scenario.name}.report"
    )
    t = report["truthful"]
    print(
        f"truthful: rank {t['chosen_rank']}, social welfare "
        f"{reports.round_sig(t['social_welfare'])}"
    )
    c = report["collective"]
    if c is not None:
        print(
            f"collective: rank {c['chosen_rank']}, eta {reports.round_sig(c['eta'])} "
            f"({c['eta_source']}), social welfare "
            f"{reports.round_sig(c['social_welfare'])}, ratio "
            f"{reports.round_sig(c['ratio'])}"
        )
    print(f"wrote {path}")
    return 0


def cmd_sweep(args) -> int:
    mat = generate_scenario(_load_scenario_doc(args))
    report = sweep(mat)
    out = _out_dir(args)
    name = f"{mat.scenario.name}.sweep"
    if args.format == "json":
        path = reports.report_emit(report, "json", out, name)
    else:
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{name}.csv"
        lines = ["id,alpha,chosen_rank,tvr,social_welfare"]
        for r in report["runs"]:
            lines.append(
                f"{r['id']},{reports.round_sig(r['alpha']):.12g},{r['chosen_rank']},"
                f"{reports.round_sig(r['tvr']):.12g},"
                f"{reports.round_sig(r['social_welfare']):.12g}"
            )
        path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    ranks = sorted({r["chosen_rank"] for r in report["runs"]})
    print(f"swept {len(report['runs'])} tolerances; chosen ranks {ranks}")
    print(f"wrote {path}")
    return 0


def _finder_inputs_from_args(args) -> FinderInputs:
    return FinderInputs(
        sigma_kmaj=args.sigma_kmaj,
        alpha=args.alpha,
        n_bar=args.n_bar,
        picky_col_sq=args.picky_col_sq,
        av=args.av,
        kappa=args.kappa,
        coll_size=args.coll_size,
    )


def _maybe_emit(args, report: dict, name: str) -> None:
    if args.out:
        if args.format != "json":
            raise ValueError(f"{report['kind']} reports are emitted as json only")
        path = reports.report_emit(report, "json", _out_dir(args), name)
        print(f"wrote {path}")


def cmd_find_eta(args) -> int:
    inputs = _finder_inputs_from_args(args)
    eta = find_eta(inputs)
    print(f"eta = {reports.round_sig(eta):.12g}")
    _maybe_emit(
        args,
        {"kind": "find_eta", "inputs": asdict(inputs), "eta": eta},
        "find_eta",
    )
    return 0


def cmd_check(args) -> int:
    inputs = _finder_inputs_from_args(args)
    report = check_sufficient_conditions(inputs, args.sigma1_min, args.eta)
    for name, value in report.conditions.items():
        print(f"{name}: {'pass' if value else 'FAIL'} (margin {report.margins[name]:.6g})")
    print(f"verdict: {'pass' if report.verdict else 'FAIL'}")
    _maybe_emit(
        args,
        {
            "kind": "check",
            "inputs": asdict(inputs),
            "eta": args.eta,
            "sigma1_min": args.sigma1_min,
            "conditions": report.conditions,
            "margins": report.margins,
            "verdict": report.verdict,
        },
        "check",
    )
    return 0 if report.verdict else 1


def cmd_robustness(args) -> int:
    inputs = _finder_inputs_from_args(args)
    margin = robustness_margin(
        inputs, args.eta, l1_norm=args.l1_norm, l2_norm=args.l2_norm, n=args.n_items
    )
    print(f"margin = {reports.round_sig(margin):.12g}")
    _maybe_emit(
        args,
        {
            "kind": "robustness",
            "inputs": asdict(inputs),
            "eta": args.eta,
            "l1_norm": args.l1_norm,
            "l2_norm": args.l2_norm,
            "n_items": args.n_items,
            "margin": margin,
        },
        "robustness",
    )
    return 0


def cmd_mc_demo(args) -> int:
    seed = 0 if args.seed is None else args.seed
    report = mc_demo(seed, args.per_user, args.trials)
    ranks = report["ranks"]
    print(
        "ranks: true 4x4 = {true_4x4}, completed 4x4 = {completed_4x4}, "
        "zero-fill 6x6 = {zero_fill_6x6}, reduced 6x6 = {reduced_6x6}".format(**ranks)
    )
    mp = report["miss_probability"]
    print(
        f"miss probability: estimate {reports.round_sig(mp['estimate']):.12g} vs "
        f"exact {reports.round_sig(mp['exact']):.12g} "
        f"({'within' if mp['within_3_sigma'] else 'OUTSIDE'} 3 sigma)"
    )
    _maybe_emit(args, report, "mc_demo")
    return 0 if mp["within_3_sigma"] else 1


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    parser.add_argument(
        "--out",
        default=None,
        help=f"output directory (default: ${OUT_DIR_ENV} or the working directory)",
    )
    parser.add_argument(
        "--format", choices=("json", "csv"), default="json", help="report format"
    )


def _add_scenario_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="scenario JSON document")
    parser.add_argument(
        "--preset", choices=sorted(PRESETS), default=None, help="built-in scenario"
    )


def _add_finder_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sigma-kmaj", dest="sigma_kmaj", type=float, required=True)
    parser.add_argument("--alpha", type=float, required=True)
    parser.add_argument("--n-bar", dest="n_bar", type=int, required=True)
    parser.add_argument("--picky-col-sq", dest="picky_col_sq", type=float, required=True)
    parser.add_argument("--av", type=float, required=True)
    parser.add_argument("--kappa", type=float, required=True)
    parser.add_argument("--coll-size", dest="coll_size", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankgap",
        description="Rank-selection gaps, collective uprating, and report emission.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="materialize a scenario to ratings CSV")
    _add_scenario_source(p)
    _add_common(p)
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("run", help="truthful and collective runs, full report")
    _add_scenario_source(p)
    _add_common(p)
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("sweep", help="truthful runs across an alpha grid")
    _add_scenario_source(p)
    _add_common(p)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("find-eta", help="closed-form effective uprating finder")
    _add_finder_args(p)
    _add_common(p)
    p.set_defaults(handler=cmd_find_eta)

    p = sub.add_parser("check", help="evaluate the sufficient uprating conditions")
    _add_finder_args(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--sigma1-min", dest="sigma1_min", type=float, default=0.0)
    _add_common(p)
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("robustness", help="parameter-error budget for a found eta")
    _add_finder_args(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--l1-norm", dest="l1_norm", type=float, required=True)
    p.add_argument("--l2-norm", dest="l2_norm", type=float, required=True)
    p.add_argument("--n-items", dest="n_items", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_robustness)

    p = sub.add_parser("mc-demo", help="completion fixture ranks and exploration MC")
    p.add_argument("--per-user", dest="per_user", type=int, default=3)
    p.add_argument("--trials", type=int, default=100_000)
    _add_common(p)
    p.set_defaults(handler=cmd_mc_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
