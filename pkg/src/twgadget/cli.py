"""Command-line surface.

Reports are line-oriented ``key value`` pairs on stdout so they can be
grepped or parsed; diagnostics go to stderr.  Exit codes: 0 when every
requested check passes, 1 when a check fails (an invalid decomposition, a
violated bound), 2 for bad input, violated construction constraints, or
exceeded oracle budgets.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import cnf, decomposition, exacttw, lowerbound, reduction
from .errors import BudgetExceededError
from .graph import GrFormatError, parse_gr, write_gr

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


@dataclass(frozen=True)
class RunConfig:
    """Resolved invocation: subcommand, paths, policy, and oracle budgets."""

    subcommand: str
    inputs: tuple[Path, ...]
    outputs: tuple[Path, ...]
    gamma: str
    dp_budget: int
    maxsat_budget: int
    seed: int | None
    quiet: bool

    def __post_init__(self) -> None:
        if self.dp_budget < 1 or self.maxsat_budget < 1:
            raise ValueError("budgets must be positive")
        out_set = set(self.outputs)
        if out_set & set(self.inputs):
            raise ValueError("input and output paths must be distinct")


class Reporter:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def line(self, key: str, value) -> None:
        if not self.quiet:
            print(f"{key} {value}")

    def final(self, key: str, value) -> None:
        print(f"{key} {value}")


def _load_formula(path: Path) -> cnf.Formula:
    return cnf.parse_dimacs(path.read_text())


def _instance(formula: cnf.Formula, gamma: str) -> tuple[reduction.ReductionInstance, reduction.GammaPolicy]:
    policy = reduction.GammaPolicy.parse(gamma)
    gammas = reduction.compute_gammas(formula, policy)
    return reduction.build_graph(formula, gammas), policy


def cmd_reduce(config: RunConfig, rep: Reporter) -> int:
    formula = _load_formula(config.inputs[0])
    inst, policy = _instance(formula, config.gamma)
    gr_path, meta_path = config.outputs
    gr_path.write_text(write_gr(inst.graph))
    meta_path.write_text(reduction.format_metadata(inst, policy))
    rep.line("n", inst.n)
    rep.line("m", inst.m)
    rep.line("gamma_policy", policy.render())
    rep.line("sum_gamma", inst.sum_gamma)
    rep.line("max_gamma", inst.max_gamma)
    rep.line("vertices", inst.vertex_count)
    rep.line("edges", inst.graph.edge_count)
    rep.line("graph_file", gr_path)
    rep.line("metadata_file", meta_path)
    rep.final("verdict", "PASS")
    return EXIT_OK


def cmd_build_td(config: RunConfig, rep: Reporter) -> int:
    formula = _load_formula(config.inputs[0])
    assignment = cnf.parse_assignment(config.inputs[1].read_text(), formula.n)
    inst, _ = _instance(formula, config.gamma)
    td = decomposition.build_from_assignment(inst, assignment)
    config.outputs[0].write_text(decomposition.write_td(td))
    satisfied = cnf.evaluate(formula, assignment)
    rep.line("satisfied", satisfied)
    rep.line("center_size", td.bag(1).bit_count())
    rep.line("nodes", td.node_count)
    rep.line("width", td.width)
    rep.line("width_cap", inst.sum_gamma + inst.max_gamma + 7 * inst.m - satisfied - 1)
    rep.line("td_file", config.outputs[0])
    rep.final("verdict", "PASS")
    return EXIT_OK


def cmd_verify_td(config: RunConfig, rep: Reporter) -> int:
    g = parse_gr(config.inputs[0].read_text())
    td = decomposition.parse_td(config.inputs[1].read_text())
    report = decomposition.validate(g, td)
    rep.line("nodes", td.node_count)
    if report.valid:
        rep.line("width", report.width)
        rep.final("verdict", "PASS")
        return EXIT_OK
    rep.line("violation", report.violation)
    rep.final("verdict", "FAIL")
    return EXIT_CHECK_FAILED


def cmd_certify_lb(config: RunConfig, rep: Reporter) -> int:
    formula = _load_formula(config.inputs[0])
    inst, policy = _instance(formula, config.gamma)
    cert = lowerbound.certify_lower_bound(inst)
    rep.line("n", inst.n)
    rep.line("m", inst.m)
    rep.line("gamma_policy", policy.render())
    rep.line("sum_gamma", inst.sum_gamma)
    rep.line("cover_size", len(cert.cover))
    rep.line("normalized_size", len(cert.normalized))
    rep.line("removed_a", len(cert.removed_a))
    rep.line("assignment", " ".join(
        str(i + 1 if v else -(i + 1)) for i, v in enumerate(cert.assignment)
    ))
    if config.outputs:
        config.outputs[0].write_text(lowerbound.write_cover(cert.normalized))
        rep.line("cover_file", config.outputs[0])
    rep.final("bound", cert.bound)
    return EXIT_OK


def cmd_exact_tw(config: RunConfig, rep: Reporter, input_format: str) -> int:
    if input_format == "gr":
        g = parse_gr(config.inputs[0].read_text())
        rep.line("vertices", g.n)
        rep.final("tw", exacttw.treewidth_exact(g, config.dp_budget))
        return EXIT_OK
    if input_format == "wgr":
        wg = exacttw.parse_weighted_gr(config.inputs[0].read_text())
        rep.line("vertices", wg.graph.n)
        rep.line("total_weight", wg.total_weight)
        rep.final("tw", exacttw.weighted_treewidth_exact(wg, config.dp_budget))
        return EXIT_OK
    formula = _load_formula(config.inputs[0])
    inst, _ = _instance(formula, config.gamma)
    q = exacttw.quotient(inst)
    rep.line("vertices", inst.vertex_count)
    rep.line("quotient_vertices", q.weighted.graph.n)
    rep.final("tw", exacttw.weighted_treewidth_exact(q.weighted, config.dp_budget))
    return EXIT_OK


def cmd_maxsat(config: RunConfig, rep: Reporter) -> int:
    formula = _load_formula(config.inputs[0])
    best, witness = cnf.max_sat_bruteforce(formula, config.maxsat_budget)
    rep.line("n", formula.n)
    rep.line("m", formula.m)
    rep.line("witness", cnf.write_assignment(witness).strip())
    rep.final("msat", best)
    return EXIT_OK


def cmd_gap_check(config: RunConfig, rep: Reporter, duplicate_k: int) -> int:
    formula = _load_formula(config.inputs[0])
    if duplicate_k > 1:
        formula = cnf.duplicate(formula, duplicate_k)
    inst, policy = _instance(formula, config.gamma)
    best, _ = cnf.max_sat_bruteforce(formula, config.maxsat_budget)
    lower, upper = reduction.predicted_bounds(inst, best)
    tw = exacttw.treewidth_via_quotient(inst, config.dp_budget)
    rep.line("n", formula.n)
    rep.line("m", formula.m)
    rep.line("gamma_policy", policy.render())
    rep.line("msat", best)
    rep.line("tw_lower", lower)
    rep.line("tw_upper", upper)
    rep.line("tw_exact", tw)
    if lower <= tw <= upper:
        rep.final("verdict", "PASS")
        return EXIT_OK
    print(
        f"error: exact treewidth {tw} escapes the predicted window [{lower}, {upper}]; "
        "this indicates an implementation bug",
        file=sys.stderr,
    )
    rep.final("verdict", "FAIL")
    return EXIT_CHECK_FAILED


def cmd_duplicate(config: RunConfig, rep: Reporter, k: int) -> int:
    formula = _load_formula(config.inputs[0])
    doubled = cnf.duplicate(formula, k)
    config.outputs[0].write_text(cnf.write_dimacs(doubled))
    rep.line("n", doubled.n)
    rep.line("m", doubled.m)
    rep.line("cnf_file", config.outputs[0])
    rep.final("verdict", "PASS")
    return EXIT_OK


def cmd_validate_32b(config: RunConfig, rep: Reporter) -> int:
    formula = _load_formula(config.inputs[0])
    report = cnf.validate_32b(formula)
    rep.line("n", formula.n)
    rep.line("m", formula.m)
    rep.line("balanced", str(report.ok).lower())
    rep.line("variable_count_ok", str(report.variable_count_ok).lower())
    if report.bad_variables:
        rep.line("offending", " ".join(str(v) for v in report.bad_variables))
    rep.final("verdict", "PASS" if report.ok else "FAIL")
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twgadget",
        description="Compile 3-CNF formulas into co-tripartite gadget graphs and "
        "check the treewidth bounds the construction promises.",
    )
    parser.add_argument("--quiet", action="store_true", help="emit only the final verdict line")
    parser.add_argument("--dp-budget", type=int, default=exacttw.DP_VERTEX_BUDGET,
                        help="max vertex count for the subset treewidth DP")
    parser.add_argument("--maxsat-budget", type=int, default=cnf.MAXSAT_VARIABLE_BUDGET,
                        help="max variable count for brute-force max-sat")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed recorded in the run config (reserved for randomized tooling)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_gamma(p):
        p.add_argument("--gamma", default="auto", metavar="POLICY",
                       help="auto | fixed:N | pervar | occ4 (default: auto)")

    p = sub.add_parser("reduce", help="compile a CNF into a .gr graph plus metadata sidecar")
    p.add_argument("cnf", type=Path)
    add_gamma(p)
    p.add_argument("-o", "--output", type=Path, default=None, help="output .gr path")
    p.add_argument("--meta", type=Path, default=None, help="metadata sidecar path")

    p = sub.add_parser("build-td", help="build the tree decomposition realized by an assignment")
    p.add_argument("cnf", type=Path)
    p.add_argument("assignment", type=Path)
    add_gamma(p)
    p.add_argument("-o", "--output", type=Path, default=None, help="output .td path")

    p = sub.add_parser("verify-td", help="validate a .td against a .gr")
    p.add_argument("gr", type=Path)
    p.add_argument("td", type=Path)

    p = sub.add_parser("certify-lb", help="treewidth lower bound from an exact cover of I(G)")
    p.add_argument("cnf", type=Path)
    add_gamma(p)
    p.add_argument("--cover-out", type=Path, default=None, help="write the witness cover here")

    p = sub.add_parser("exact-tw", help="exact treewidth (CNF via quotient, or a graph file)")
    p.add_argument("input", type=Path)
    add_gamma(p)
    p.add_argument("--input-format", choices=("cnf", "gr", "wgr"), default="cnf")

    p = sub.add_parser("maxsat", help="brute-force maximum satisfiable clause count")
    p.add_argument("cnf", type=Path)

    p = sub.add_parser("gap-check", help="assert exact treewidth lies in the predicted window")
    p.add_argument("cnf", type=Path)
    add_gamma(p)
    p.add_argument("--duplicate", type=int, default=1, metavar="K",
                   help="check the K-fold disjoint copy of the formula")

    p = sub.add_parser("duplicate", help="write the k-fold disjoint-variable copy of a CNF")
    p.add_argument("cnf", type=Path)
    p.add_argument("k", type=int)
    p.add_argument("-o", "--output", type=Path, default=None, help="output .cnf path")

    p = sub.add_parser("validate-32b", help="check every variable occurs twice per polarity")
    p.add_argument("cnf", type=Path)

    return parser


def _default_out(inp: Path, suffix: str) -> Path:
    return inp.with_suffix(suffix)


def _make_config(ns: argparse.Namespace) -> tuple[RunConfig, dict]:
    extra: dict = {}
    gamma = getattr(ns, "gamma", "auto")
    if ns.subcommand == "reduce":
        out = ns.output or _default_out(ns.cnf, ".gr")
        meta = ns.meta or out.with_suffix(out.suffix + ".meta")
        inputs, outputs = (ns.cnf,), (out, meta)
    elif ns.subcommand == "build-td":
        out = ns.output or _default_out(ns.cnf, ".td")
        inputs, outputs = (ns.cnf, ns.assignment), (out,)
    elif ns.subcommand == "verify-td":
        inputs, outputs = (ns.gr, ns.td), ()
    elif ns.subcommand == "certify-lb":
        inputs = (ns.cnf,)
        outputs = (ns.cover_out,) if ns.cover_out else ()
    elif ns.subcommand == "exact-tw":
        inputs, outputs = (ns.input,), ()
        extra["input_format"] = ns.input_format
    elif ns.subcommand == "maxsat":
        inputs, outputs = (ns.cnf,), ()
    elif ns.subcommand == "gap-check":
        inputs, outputs = (ns.cnf,), ()
        extra["duplicate_k"] = ns.duplicate
    elif ns.subcommand == "duplicate":
        out = ns.output or ns.cnf.with_suffix(f".x{ns.k}.cnf")
        inputs, outputs = (ns.cnf,), (out,)
        extra["k"] = ns.k
    else:  # validate-32b
        inputs, outputs = (ns.cnf,), ()
    config = RunConfig(
        subcommand=ns.subcommand,
        inputs=inputs,
        outputs=outputs,
        gamma=gamma,
        dp_budget=ns.dp_budget,
        maxsat_budget=ns.maxsat_budget,
        seed=ns.seed,
        quiet=ns.quiet,
    )
    return config, extra


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        config, extra = _make_config(ns)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    rep = Reporter(config.quiet)
    try:
        if config.subcommand == "reduce":
            return cmd_reduce(config, rep)
        if config.subcommand == "build-td":
            return cmd_build_td(config, rep)
        if config.subcommand == "verify-td":
            return cmd_verify_td(config, rep)
        if config.subcommand == "certify-lb":
            return cmd_certify_lb(config, rep)
        if config.subcommand == "exact-tw":
            return cmd_exact_tw(config, rep, extra["input_format"])
        if config.subcommand == "maxsat":
            return cmd_maxsat(config, rep)
        if config.subcommand == "gap-check":
            return cmd_gap_check(config, rep, extra["duplicate_k"])
        if config.subcommand == "duplicate":
            return cmd_duplicate(config, rep, extra["k"])
        return cmd_validate_32b(config, rep)
    except BudgetExceededError as exc:
        print(f"error: oracle budget exceeded: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (cnf.DimacsError, GrFormatError, decomposition.TdFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (reduction.GammaConstraintError, lowerbound.NotACoverError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
