"""Command-line interface.

Subcommands: count, dim, classify, partition, verify, demo.  Reports are
JSON on stdout; with --out DIR the payload, CSV companions for matrices,
and rendered PNG figures are written into the directory.  Exit codes:
0 all checks pass, 1 a named check failed, 2 bad configuration,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, corpus
from .counting import DEFAULT_BUDGET, DefinableSet, count_solutions, count_sweep, definable_set
from .dim_measure import (
    DEFAULT_MAX_DENOMINATOR,
    DEFAULT_RESIDUAL_THRESHOLD,
    DEFAULT_WINDOW_CONSTANT,
    classify_parameters,
    estimate_dim_measure,
)
from .errors import BudgetError, ConfigError, DefregError
from .field import parse_field_descriptor, primes_in_range
from .formula import ComplexityBudget, parse_formula
from .regularity import (
    DEFAULT_MAX_BLOCKS,
    EXPONENT_SLACK,
    PAIR_EXACT_LIMIT,
    PAIR_SAMPLE_PAIRS,
    build_partition,
    check_exceptional_dimension,
    descriptor_size,
    graph_from_spec,
    load_graph,
    match_block_labels,
    pair_invariant_table,
    trivial_blocks,
    verify_regularity,
)
from . import reports


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="defreg", description=__doc__)
    top.add_argument("--version", action="version", version=f"defreg {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="directory for report files (JSON, CSV, PNG figures)")
    common.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    common.add_argument("--no-csv", action="store_true", help="skip CSV companions")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="enumeration work budget (default %(default)s)")
    common.add_argument("--workers", type=int, default=None,
                        help="parallel workers for counting (default: env DEFREG_WORKERS or 1)")
    common.add_argument("--max-den", type=int, default=DEFAULT_MAX_DENOMINATOR,
                        help="measure denominator snap bound (default %(default)s)")
    common.add_argument("--window-c", type=float, default=DEFAULT_WINDOW_CONSTANT,
                        help="error-window constant C in C*q^(d-1/2) (default %(default)s)")
    common.add_argument("--residual-threshold", type=float, default=DEFAULT_RESIDUAL_THRESHOLD,
                        help="max accepted fit residual (default %(default)s)")
    common.add_argument("--max-complexity", type=int, default=None,
                        help="reject formulas above this AST node count")
    common.add_argument("--seed", type=int, default=0, help="RNG seed recorded in reports")

    fieldsel = argparse.ArgumentParser(add_help=False)
    fieldsel.add_argument("--fields", help='comma list of field descriptors, e.g. "13,17,2^3"')
    fieldsel.add_argument("--fields-range",
                          help='prime range "lo:hi" with optional congruence "lo:hi:mod=r%%m"')

    p = sub.add_parser("count", parents=[common], help="exact point count over one field")
    p.add_argument("--formula", required=True, help="formula text or path to a file")
    p.add_argument("--objects", required=True, help="comma list of object variables")
    p.add_argument("--params", default="", help='parameter binding "y=3,z=5" (element indices)')
    p.add_argument("--field", required=True, help='field descriptor "p" or "p^k"')

    p = sub.add_parser("dim", parents=[common, fieldsel],
                       help="estimate (dimension, measure) from a count sweep")
    p.add_argument("--formula", required=True)
    p.add_argument("--objects", required=True)

    p = sub.add_parser("classify", parents=[common, fieldsel],
                       help="empirical parameter classes of a parametrised set")
    p.add_argument("--formula", required=True)
    p.add_argument("--objects", required=True)
    p.add_argument("--params", required=True, help="comma list of parameter variables")

    part = argparse.ArgumentParser(add_help=False)
    part.add_argument("--graph", required=True,
                      help="graph spec: JSON file path or builtin name "
                           f"({', '.join(sorted(corpus.GRAPH_SPECS))})")
    part.add_argument("--tau", type=float, default=2.0,
                      help="exceptional tolerance coefficient c in c/sqrt(q) (default %(default)s)")
    part.add_argument("--max-blocks", type=int, default=DEFAULT_MAX_BLOCKS)
    part.add_argument("--pair-limit", type=int, default=PAIR_EXACT_LIMIT,
                      help="largest |W(F)| tabled exactly (default %(default)s)")
    part.add_argument("--pair-samples", type=int, default=PAIR_SAMPLE_PAIRS,
                      help="sampled pair budget above the exact limit (default %(default)s)")
    part.add_argument("--slack", type=float, default=EXPONENT_SLACK,
                      help="exceptional-set exponent slack (default %(default)s)")
    part.add_argument("--scramble-edges", type=int, default=None, metavar="SEED",
                      help="test hook: replace pair counts with per-field random noise")

    p = sub.add_parser("partition", parents=[common, fieldsel, part],
                       help="build the regularity partition of W from pair invariants")

    p = sub.add_parser("verify", parents=[common, fieldsel, part],
                       help="verify the sampled subset-deviation bound")
    p.add_argument("--samples", type=int, default=100, help="subset samples per block pair")
    p.add_argument("--alpha-slack", type=float, default=0.0,
                   help="slack added to the -1/4 exponent check (default %(default)s)")
    p.add_argument("--trivial-partition", action="store_true",
                   help="use the one-block partition on both sides")

    p = sub.add_parser("demo", parents=[common, fieldsel],
                       help="run the built-in corpus end to end and write a summary")
    p.add_argument("--samples", type=int, default=60)

    return top


# -- helpers -----------------------------------------------------------------


def _formula_source(text: str) -> str:
    path = Path(text)
    try:
        if path.is_file():
            return path.read_text(encoding="utf-8")
    except OSError:
        pass
    return text


def _load_set(args, objects: str, params: str = "") -> DefinableSet:
    f = parse_formula(_formula_source(args.formula))
    if args.max_complexity is not None:
        ComplexityBudget(args.max_complexity).check(f)
    obj = tuple(v.strip() for v in objects.split(",") if v.strip())
    par = tuple(v.strip() for v in params.split(",") if v.strip())
    return DefinableSet(f, obj, par)


def _parse_binding(text: str) -> dict[str, int]:
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f'bad parameter binding {part!r}; expected "name=value"')
        name, value = part.split("=", 1)
        out[name.strip()] = int(value)
    return out


def _fields(args) -> list:
    descriptors = []
    if getattr(args, "fields", None):
        descriptors += [d.strip() for d in args.fields.split(",") if d.strip()]
    if getattr(args, "fields_range", None):
        m = re.fullmatch(r"(\d+):(\d+)(?::mod=(\d+)%(\d+))?", args.fields_range.strip())
        if not m:
            raise ConfigError(f'bad --fields-range {args.fields_range!r}; use "lo:hi[:mod=r%%m]"')
        cong = (int(m[3]), int(m[4])) if m[3] else None
        descriptors += [str(p) for p in primes_in_range(int(m[1]), int(m[2]), cong)]
    if not descriptors:
        raise ConfigError("no fields given; use --fields and/or --fields-range")
    return [parse_field_descriptor(d) for d in descriptors]


def _graph(args):
    name = args.graph
    if name in corpus.GRAPH_SPECS:
        return corpus.builtin_graph(name)
    if Path(name).is_file():
        return load_graph(name)
    raise ConfigError(f"--graph {name!r} is neither a builtin name nor a file")


def _sink(args) -> reports.ReportSink:
    return reports.ReportSink(args.out, figures=not args.no_figures, csv_files=not args.no_csv)


def _config_echo(args) -> dict:
    skip = {"command", "func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _finish(args, doc: dict, sink: reports.ReportSink, json_name: str,
            failures: list[str]) -> int:
    text = reports.dump_json(doc)
    sys.stdout.write(text)
    sink.emit_json(doc, json_name)
    for failure in failures:
        print(f"FAILED check: {failure}", file=sys.stderr)
    return 1 if failures else 0


# -- subcommands ----------------------------------------------------------------


def cmd_count(args) -> int:
    S = _load_set(args, args.objects, ",".join(sorted(_parse_binding(args.params))))
    F = parse_field_descriptor(args.field)
    binding = _parse_binding(args.params)
    res = count_solutions(S, F, binding, budget=args.budget, workers=args.workers)
    doc = reports.payload("count", _config_echo(args), {
        "field": res.field, "q": res.q, "params": res.params, "N": res.count,
    })
    return _finish(args, doc, _sink(args), "count.json", [])


def cmd_dim(args) -> int:
    S = _load_set(args, args.objects)
    fields = _fields(args)
    results = count_sweep(S, fields, budget=args.budget, workers=args.workers)
    counts = [(r.q, r.count) for r in results]
    dm = estimate_dim_measure(counts, n_max=len(S.objects), window_c=args.window_c,
                              max_den=args.max_den, residual_threshold=args.residual_threshold)
    sink = _sink(args)
    doc = reports.payload("dim", _config_echo(args), {
        "counts": [{"field": r.field, "q": r.q, "N": r.count} for r in results],
        "invariant": dm.to_json(),
    })
    sink.emit_csv("counts.csv", ["field", "q", "N"],
                  [[r.field, r.q, r.count] for r in results])
    sink.emit_figure(lambda p: reports.fig_count_fit(counts, dm, "count growth", p),
                     "dim_fit.png")
    return _finish(args, doc, sink, "dim.json", [])


def cmd_classify(args) -> int:
    S = _load_set(args, args.objects, args.params)
    fields = _fields(args)
    classes = classify_parameters(S, fields, window_c=args.window_c,
                                  max_den=args.max_den, budget=args.budget)
    cover = {}
    for F in fields:
        fd = F.descriptor()
        total = sum(c.size(fd) for c in classes)
        cover[fd] = total == F.q ** len(S.params)
    sink = _sink(args)
    doc = reports.payload("classify", _config_echo(args), {
        "classes": [c.to_json() for c in classes],
        "partition_cover": cover,
    })
    rows = []
    for c in classes:
        for fd in sorted(c.members):
            for t in c.members[fd]:
                rows.append([fd, " ".join(map(str, t)), c.counts[fd][t], c.class_id,
                             c.invariant.label()])
    sink.emit_csv("classes.csv", ["field", "params", "count", "class", "invariant"], rows)
    points = {c.class_id + " " + c.invariant.label(): sorted(
        (descriptor_size(fd), n) for fd in c.counts for n in c.counts[fd].values())
        for c in classes}
    sink.emit_figure(lambda p: reports.fig_class_counts(points, "fiber counts by class", p),
                     "classes.png")
    failures = [] if all(cover.values()) else ["parameter classes do not cover parameter space"]
    return _finish(args, doc, sink, "classify.json", failures)


def _partition_pipeline(args, fields):
    G = _graph(args)
    if getattr(args, "max_complexity", None) is not None:
        budget = ComplexityBudget(args.max_complexity)
        for S in (G.V, G.W, G.E):
            budget.check(S.formula)
    tables = pair_invariant_table(
        G, fields, budget=args.budget, pair_exact_limit=args.pair_limit,
        pair_sample_pairs=args.pair_samples, sample_seed=args.seed,
        window_c=args.window_c, max_den=args.max_den,
        scramble_seed=args.scramble_edges,
    )
    blocks, summaries = build_partition(
        tables, tau=lambda q: args.tau / q**0.5, max_blocks=args.max_blocks,
        window_c=args.window_c, max_den=args.max_den,
    )
    labels = match_block_labels(blocks, fields, G, budget=args.budget)
    k_inv = estimate_dim_measure(sorted((t.field.q, tables.w_sizes[t.field.descriptor()])
                                        for t in tables.tables),
                                 n_max=len(G.W.objects), window_c=args.window_c,
                                 max_den=args.max_den)
    k_dim = 0 if k_inv.is_empty else k_inv.dim
    dim_checks = []
    for s in summaries:
        ok, exponent = check_exceptional_dimension(s, k_dim, slack=args.slack)
        dim_checks.append({"blocks": [s.block_i, s.block_j], "ok": ok, "exponent": exponent})
    return G, tables, blocks, summaries, labels, k_dim, dim_checks


def _emit_partition(sink, G, tables, blocks, summaries, labels, dim_checks, prefix=""):
    sink.emit_csv(f"{prefix}blocks.csv", ["block", "label", "field", "size"],
                  [[b.block_id, b.label, fd, size]
                   for b in blocks for fd, size in sorted(b.sizes().items())])
    sink.emit_csv(f"{prefix}pair_summaries.csv",
                  ["block_i", "block_j", "verdict", "invariant", "c", "field",
                   "exceptional", "exceptional_fraction"],
                  [[s.block_i, s.block_j, s.verdict, s.invariant.label(),
                    "" if s.c is None else str(s.c), fd, s.exceptional_counts[fd],
                    s.exceptional_fractions[fd]]
                   for s in summaries for fd in sorted(s.exceptional_counts)])
    for t in tables.tables:
        fd = t.field.descriptor()
        index_of = {int(w): pos for pos, w in enumerate(t.w_members)}
        positions = []
        for b in blocks:
            pos = []
            for tup in b.members.get(fd, []):
                idx = 0
                for v in tup:
                    idx = idx * t.field.q + v
                if idx in index_of:
                    pos.append(index_of[idx])
            positions.append(pos)
        sink.emit_figure(
            lambda p, fd=fd, positions=positions: reports.fig_pair_matrix(tables, fd, positions, p),
            f"{prefix}pair_counts_{fd.replace('^', 'e')}.png")


def cmd_partition(args) -> int:
    fields = _fields(args)
    G, tables, blocks, summaries, labels, k_dim, dim_checks = _partition_pipeline(args, fields)
    sink = _sink(args)
    doc = reports.payload("partition", _config_echo(args), {
        "graph": G.name,
        "exact": tables.exact,
        "invariants": [iv.to_json() for iv in tables.invariants],
        "k_dim": k_dim,
        "blocks": [b.to_json() for b in blocks],
        "labels": labels,
        "summaries": [s.to_json() for s in summaries],
        "exceptional_dimension": dim_checks,
    })
    _emit_partition(sink, G, tables, blocks, summaries, labels, dim_checks)
    failures = [f"exceptional set of block pair {c['blocks']} has exponent "
                f"{c['exponent']:.2f} >= 2k-1+slack"
                for c in dim_checks if not c["ok"]]
    return _finish(args, doc, sink, "partition.json", failures)


def cmd_verify(args) -> int:
    fields = _fields(args)
    G = _graph(args)
    if args.trivial_partition:
        blocks_w = trivial_blocks(G, fields, side="W", budget=args.budget)
        blocks_v = trivial_blocks(G, fields, side="V", budget=args.budget)
        partition_doc = {"mode": "trivial"}
    else:
        _, tables, blocks_w, summaries, labels, k_dim, dim_checks = _partition_pipeline(args, fields)
        Gt = G.transpose()
        tables_t = pair_invariant_table(
            Gt, fields, budget=args.budget, pair_exact_limit=args.pair_limit,
            pair_sample_pairs=args.pair_samples, sample_seed=args.seed,
            window_c=args.window_c, max_den=args.max_den,
            scramble_seed=args.scramble_edges,
        )
        blocks_v, _ = build_partition(
            tables_t, tau=lambda q: args.tau / q**0.5, max_blocks=args.max_blocks,
            window_c=args.window_c, max_den=args.max_den,
        )
        partition_doc = {
            "mode": "computed",
            "blocks_w": [b.to_json(include_members=False) for b in blocks_w],
            "blocks_v": [b.to_json(include_members=False) for b in blocks_v],
            "labels_w": labels,
        }
    report = verify_regularity(G, blocks_v, blocks_w, fields, samples=args.samples,
                               seed=args.seed, alpha_slack=args.alpha_slack,
                               budget=args.budget)
    sink = _sink(args)
    doc = reports.payload("verify", _config_echo(args), {
        "partition": partition_doc,
        "report": report.to_json(),
    })
    sink.emit_csv("densities.csv", ["field", "block_i", "block_j", "density", "density_float"],
                  [[fd, st.i, st.j, str(st.densities[fd]), float(st.densities[fd])]
                   for st in report.pair_stats for fd in sorted(st.densities)])
    sink.emit_csv("deviations.csv",
                  ["field", "block_i", "block_j", "delta_max", "delta_norm_max"],
                  [[fd, st.i, st.j, st.delta_max[fd], st.delta_norm_max[fd]]
                   for st in report.pair_stats for fd in sorted(st.delta_max)])
    sink.emit_figure(lambda p: reports.fig_deviation_scaling(report, p), "deviation_scaling.png")
    failures = []
    if not all(report.density_consistent.values()):
        failures.append("density consistency: sum d_ij |V_i||W_j| != |E|")
    if not report.all_alpha_ok:
        failures.append(f"deviation exponent alpha={report.alpha_worst:.3f} "
                        f"above -1/4+{args.alpha_slack}")
    return _finish(args, doc, sink, "verify.json", failures)


# -- demo -------------------------------------------------------------------------


def cmd_demo(args) -> int:
    if not getattr(args, "fields", None) and not getattr(args, "fields_range", None):
        args.fields = "11,13,17,19,23,29"
    if args.out is None:
        args.out = "defreg_demo"
    fields = _fields(args)
    fields_1mod4 = [F for F in fields if F.q % 4 == 1]
    if len(fields_1mod4) < 3:
        raise ConfigError("demo needs at least 3 fields with q = 1 mod 4 "
                          "for the quadratic-residue graphs")
    sink = _sink(args)
    checks: list[dict] = []

    def check(name: str, ok: bool, detail: str):
        checks.append({"name": name, "pass": bool(ok), "detail": detail})

    results: dict = {"fields": [F.descriptor() for F in fields],
                     "fields_1mod4": [F.descriptor() for F in fields_1mod4]}

    # 1. dimension/measure sweeps over the formula corpus
    dim_results = []
    for name, text, objects, expected in corpus.DIM_EXAMPLES:
        S = definable_set(text, objects)
        sweep = count_sweep(S, fields, budget=args.budget, workers=args.workers)
        counts = [(r.q, r.count) for r in sweep]
        dm = estimate_dim_measure(counts, n_max=len(objects), window_c=args.window_c,
                                  max_den=args.max_den,
                                  residual_threshold=args.residual_threshold)
        if expected == "empty":
            ok = dm.is_empty
            want = "empty"
        else:
            ok = (dm.dim, dm.measure) == expected
            want = f"({expected[0]}, {expected[1]})"
        check(f"dim[{name}]", ok, f"expected {want}, got {dm.label()}, "
                                  f"residual {dm.fit_residual:.3f}")
        dim_results.append({"name": name, "formula": text,
                            "counts": [[q, n] for q, n in counts],
                            "invariant": dm.to_json()})
        sink.emit_figure(
            lambda p, counts=counts, dm=dm, name=name:
                reports.fig_count_fit(counts, dm, f"{name}: count growth", p),
            f"dim_fit_{name}.png")
    results["dim_examples"] = dim_results

    # 2. parameter classification
    classify_results = []
    for name, text, objects, params, expected in corpus.CLASSIFY_EXAMPLES:
        S = definable_set(text, objects, params)
        classes = classify_parameters(S, fields, window_c=args.window_c,
                                      max_den=args.max_den, budget=args.budget)
        ok = len(classes) == len(expected)
        details = []
        for cls, (inv_want, size_fn) in zip(classes, expected):
            want_label = "empty" if inv_want == "empty" else f"({inv_want[0]}, {inv_want[1]})"
            inv_ok = cls.invariant.label() == want_label
            size_ok = all(cls.size(F.descriptor()) == size_fn(F.q) for F in fields)
            ok = ok and inv_ok and size_ok and cls.uniform
            details.append(f"{cls.class_id}={cls.invariant.label()}"
                           f"{'' if size_ok else ' (bad sizes)'}")
        cover = all(sum(c.size(F.descriptor()) for c in classes) == F.q ** len(params)
                    for F in fields)
        ok = ok and cover
        check(f"classify[{name}]", ok, "; ".join(details) + f"; cover={cover}")
        classify_results.append({"name": name, "formula": text,
                                 "classes": [c.to_json(include_members=False) for c in classes]})
        points = {c.class_id + " " + c.invariant.label(): sorted(
            (descriptor_size(fd), n) for fd in c.counts for n in c.counts[fd].values())
            for c in classes}
        sink.emit_figure(
            lambda p, points=points, name=name:
                reports.fig_class_counts(points, f"{name}: fiber counts by class", p),
            f"classes_{name}.png")
    results["classify_examples"] = classify_results

    # 3. partitions and exceptional sets
    partition_results = []
    partition_expectations = {
        "square-class": dict(blocks=2, labels={"nonzero squares", "nonsquares"},
                             constant_c=Fraction(1, 2)),
        "paley": dict(blocks=1, labels={"all of W"}, constant_c=Fraction(1, 4)),
        "function-graph": dict(blocks=1, labels=None, constant_c=None),
    }
    for gname, expect in partition_expectations.items():
        G = corpus.builtin_graph(gname)
        gfields = fields_1mod4 if gname in corpus.NEEDS_1_MOD_4 else fields
        pargs = argparse.Namespace(**vars(args))
        pargs.graph = gname
        pargs.tau = 2.0
        pargs.max_blocks = DEFAULT_MAX_BLOCKS
        pargs.pair_limit = PAIR_EXACT_LIMIT
        pargs.pair_samples = PAIR_SAMPLE_PAIRS
        pargs.slack = EXPONENT_SLACK
        pargs.scramble_edges = None
        G, tables, blocks, summaries, labels, k_dim, dim_checks = _partition_pipeline(pargs, gfields)
        ok = True
        notes = [f"{len(blocks)} block(s)"]
        if expect["blocks"] is not None and len(blocks) != expect["blocks"]:
            ok = False
            notes.append(f"expected {expect['blocks']} blocks")
        if expect["labels"] is not None and set(labels) != expect["labels"]:
            ok = False
            notes.append(f"labels {labels}")
        if expect["constant_c"] is not None:
            diag = [s for s in summaries if s.block_i == s.block_j]
            cs = {s.c for s in diag}
            if cs != {expect["constant_c"]}:
                ok = False
                notes.append(f"within-block constants {sorted(map(str, cs))}")
        if not all(c["ok"] for c in dim_checks):
            ok = False
            notes.append("exceptional-set dimension check failed")
        check(f"partition[{gname}]", ok, "; ".join(notes))
        partition_results.append({
            "name": gname,
            "blocks": [b.to_json(include_members=False) for b in blocks],
            "labels": labels,
            "summaries": [s.to_json() for s in summaries],
            "exceptional_dimension": dim_checks,
        })
        _emit_partition(sink, G, tables, blocks, summaries, labels, dim_checks,
                        prefix=f"{gname}_")
    results["partitions"] = partition_results

    # 4. sampled regularity verification
    verify_results = []
    for gname in ("paley", "square-class"):
        G = corpus.builtin_graph(gname)
        gfields = fields_1mod4
        blocks_v = trivial_blocks(G, gfields, side="V", budget=args.budget)
        blocks_w = trivial_blocks(G, gfields, side="W", budget=args.budget)
        report = verify_regularity(G, blocks_v, blocks_w, gfields, samples=args.samples,
                                   seed=args.seed, budget=args.budget)
        ok = (all(report.density_consistent.values()) and report.all_alpha_ok
              and report.clause_c_worst <= 4.0
              and report.min_block_fraction >= 1.0 / 8)
        check(f"verify[{gname}]", ok,
              f"alpha={report.alpha_worst if report.alpha_worst is not None else 'n/a'} "
              f"clause_c={report.clause_c_worst:.3f} "
              f"density_consistent={all(report.density_consistent.values())}")
        verify_results.append({"name": gname, "report": report.to_json()})
        sink.emit_figure(
            lambda p, report=report, gname=gname: reports.fig_deviation_scaling(report, p),
            f"deviation_scaling_{gname}.png")
    results["verification"] = verify_results

    results["checks"] = checks
    results["all_pass"] = all(c["pass"] for c in checks)
    doc = reports.payload("demo", _config_echo(args), results)
    sink.emit_csv("demo_checks.csv", ["name", "pass", "detail"],
                  [[c["name"], c["pass"], c["detail"]] for c in checks])
    failures = [f"{c['name']}: {c['detail']}" for c in checks if not c["pass"]]
    return _finish(args, doc, sink, "summary.json", failures)


# -- entry ------------------------------------------------------------------------


_COMMANDS = {
    "count": cmd_count,
    "dim": cmd_dim,
    "classify": cmd_classify,
    "partition": cmd_partition,
    "verify": cmd_verify,
    "demo": cmd_demo,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except BudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except DefregError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
