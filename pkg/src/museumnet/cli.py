"""Command-line front end.

    museumnet summary      --input visits.csv
    museumnet learn-forest --input visits.csv --out results/ [--include-status]
    museumnet learn-dag    --input visits.csv --out results/ --penalty 200 --restarts 500
    museumnet metrics      --input visits.csv
    museumnet temporal     --input visits.csv
    museumnet simulate     --out results/ --items 10 --subjects 5000 --seed 1

Options may also come from ``--config FILE`` holding ``key=value`` lines
(keys as the long option names, dashes or underscores); command-line flags
win over the file. Exit codes: 0 ok, 1 usage error, 2 data or I/O error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import export
from .dag import SearchConfig, hill_climb, statistical_time
from .forest import connected_components, learn_min_bic_forest
from .ingest import (IngestError, build_indicator_dataset, deduplicate, parse_transactions,
                     select_main_items, visit_counts, write_transactions)
from .metrics import metrics_report
from .stats import ScoreConfig
from .synth import (item_names, make_rng, random_dag_model, random_spanning_tree,
                    sample_itineraries, tree_model)
from .temporal import conjecture_check, precedence_table

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_config(path: str) -> dict[str, str]:
    """Flat ``key=value`` file; blank lines and ``#`` comments ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _flag(value: str | bool) -> bool:
    if isinstance(value, bool):
        return value
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {value!r}")


def _fraction(text: str) -> float:
    p = float(text)
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return p


def _nonneg_float(text: str) -> float:
    x = float(text)
    if x < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return x


def _nonneg_int(text: str) -> int:
    x = int(text)
    if x < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="museumnet", description="Item networks from visit logs.")
    parser.add_argument("--config", help="key=value file with default options")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--input", help="visit log CSV (required)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--percentile", type=_fraction, default=0.85,
                       help="keep items visited more than this nearest-rank percentile")
        p.add_argument("--all-items", action="store_true",
                       help="skip percentile selection and keep every item")
        p.add_argument("--delimiter", default=",")
        p.add_argument("--year", type=int, default=None, help="reject dates outside this year")

    p = sub.add_parser("summary", help="subject and visit counts")
    common(p)

    for name in ("learn-forest", "metrics"):
        p = sub.add_parser(name, help="minimum-BIC forest" if name == "learn-forest"
                           else "centrality of the minimum-BIC forest")
        common(p)
        p.add_argument("--include-status", action="store_true")
        p.add_argument("--penalty", type=_nonneg_float, default=None,
                       help="penalty per free parameter (default ln(N)/2)")

    p = sub.add_parser("learn-dag", help="hill-climbing DAG and visit-order agreement")
    common(p)
    p.add_argument("--include-status", action="store_true")
    p.add_argument("--penalty", type=_nonneg_float, default=None)
    p.add_argument("--restarts", type=_nonneg_int, default=500)
    p.add_argument("--perturbation-size", type=int, default=2)
    p.add_argument("--max-iterations", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-support", type=_nonneg_int, default=30)

    p = sub.add_parser("temporal", help="pairwise first-visit precedence table")
    common(p)

    p = sub.add_parser("simulate", help="write a synthetic visit log and its ground truth")
    p.add_argument("--out")
    p.add_argument("--items", type=int, default=10)
    p.add_argument("--subjects", type=int, default=1000)
    p.add_argument("--model", choices=("tree", "dag"), default="tree")
    p.add_argument("--agreement", type=_fraction, default=0.9,
                   help="tree model: probability a child copies its parent")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--year", type=int, default=2012)
    return parser


REQUIRED = {
    "summary": ("input",), "metrics": ("input",), "temporal": ("input",),
    "learn-forest": ("input", "out"), "learn-dag": ("input", "out"), "simulate": ("out",),
}


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            config = load_config(known.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        # config values become subcommand defaults, so explicit flags win
        subparsers = next(a for a in parser._actions
                          if isinstance(a, argparse._SubParsersAction))
        for sp in subparsers.choices.values():
            actions = {a.dest: a for a in sp._actions}
            values = {}
            for key, raw in config.items():
                act = actions.get(key)
                if act is None:
                    continue
                try:
                    if act.nargs == 0:
                        values[key] = _flag(raw)
                    else:
                        values[key] = act.type(raw) if act.type else raw
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise UsageError(f"config {key}={raw}: {exc}") from None
            sp.set_defaults(**values)
    args = parser.parse_args(argv)
    for name in REQUIRED[args.command]:
        if getattr(args, name) is None:
            raise UsageError(f"{args.command}: --{name} is required")
    return args


def _load(args):
    with open(args.input, encoding="utf-8", newline="") as fh:
        log = parse_transactions(fh, delimiter=args.delimiter, year=args.year)
    return log


def _main_items(args, log):
    counts = visit_counts(log)
    if args.all_items:
        return sorted(counts.counts)
    items = select_main_items(counts, args.percentile)
    if not items:
        raise IngestError(f"no item is visited more often than the {args.percentile} percentile")
    return sorted(items)


def _emit(args, filename: str, text: str) -> None:
    if getattr(args, "out", None):
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_summary(args) -> None:
    log = _load(args)
    counts = visit_counts(log)
    main = set()
    if counts.counts:
        main = counts.counts.keys() if args.all_items else select_main_items(counts, args.percentile)
    lines = [
        f"subjects\t{len(log.subjects())}",
        f"records\t{len(log)}",
        f"items\t{len(counts.counts)}",
        f"visits\t{counts.total()}",
        f"main_items\t{len(main)}",
        f"main_visits\t{counts.total(main)}",
        "item\tvisits\tmain",
    ]
    for item, c in sorted(counts.counts.items()):
        lines.append(f"{item}\t{c}\t{int(item in main)}")
    _emit(args, "summary.tsv", "\n".join(lines) + "\n")


def _forest(args):
    log = _load(args)
    ds = build_indicator_dataset(log, _main_items(args, log), include_status=args.include_status)
    return learn_min_bic_forest(ds, include_status=args.include_status,
                                cfg=ScoreConfig(args.penalty))


def cmd_learn_forest(args) -> None:
    f = _forest(args)
    _emit(args, "forest.dot", export.forest_to_dot(f))
    _emit(args, "metrics.tsv", export.metrics_tsv(metrics_report(f)))
    n_trees = len(connected_components(f))
    print(f"forest: {len(f.vertices)} nodes, {len(f.edges)} edges, {n_trees} trees")


def cmd_metrics(args) -> None:
    _emit(args, "metrics.tsv", export.metrics_tsv(metrics_report(_forest(args))))


def cmd_learn_dag(args) -> None:
    log = _load(args)
    ds = build_indicator_dataset(log, _main_items(args, log), include_status=args.include_status)
    cfg = SearchConfig(penalty=args.penalty, restarts=args.restarts,
                       perturbation_size=args.perturbation_size, seed=args.seed,
                       max_iterations=args.max_iterations)
    res = hill_climb(ds, cfg, include_status=args.include_status)
    report = conjecture_check(res.dag, deduplicate(log), args.min_support)
    _emit(args, "dag.dot", export.dag_to_dot(res.dag, report))
    _emit(args, "agreement.tsv", export.agreement_tsv(report))
    agreement = report.agreement
    lines = [
        f"score\t{res.score!r}",
        f"empty_score\t{res.empty_score!r}",
        f"arcs\t{len(res.dag.arcs)}",
        f"statistical_time\t{' '.join(statistical_time(res.dag))}",
        *(f"{k}\t{v}" for k, v in report.counts.items()),
        f"agreement\t{'NA' if agreement is None else repr(agreement)}",
    ]
    _emit(args, "score.tsv", "\n".join(lines) + "\n")
    print(f"dag: {len(res.dag.arcs)} arcs, score {res.score:.4f}, agreement "
          f"{'NA' if agreement is None else f'{agreement:.3f}'}")


def cmd_temporal(args) -> None:
    log = _load(args)
    entries = precedence_table(deduplicate(log), _main_items(args, log))
    _emit(args, "precedence.tsv", export.precedence_tsv(entries))


def cmd_simulate(args) -> None:
    if args.items < 1 or args.subjects < 1:
        raise UsageError("--items and --subjects must be positive")
    rng = make_rng(args.seed, 2)
    names = item_names(args.items)
    if args.model == "tree":
        tree = random_spanning_tree(names, rng)
        order = [names[k] for k in rng.permutation(len(names))]
        model = tree_model(tree, args.agreement, temporal_order=order)
        truth = export.forest_to_dot(tree, "truth")
    else:
        model = random_dag_model(names, rng, with_temporal_order=True)
        truth = export.dag_to_dot(model.structure, name="truth")
    log = sample_itineraries(model, args.subjects, args.seed, args.year)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "transactions.csv", "w", encoding="utf-8", newline="") as fh:
        write_transactions(log, fh)
    (out / "truth.dot").write_text(truth, encoding="utf-8")
    print(f"simulated {len(log.subjects())} subjects with visits, {len(log)} records")


COMMANDS = {
    "summary": cmd_summary,
    "learn-forest": cmd_learn_forest,
    "learn-dag": cmd_learn_dag,
    "metrics": cmd_metrics,
    "temporal": cmd_temporal,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        COMMANDS[args.command](args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"museumnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestError, ValueError, OSError) as exc:
        print(f"museumnet: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
