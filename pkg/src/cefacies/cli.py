"""Command-line workflow: rank, select, evaluate, compare.

Exit codes: 0 success, 1 internal error, 2 schema or input error,
3 degenerate configuration.
"""

import argparse
from dataclasses import dataclass, field
import json
import logging
from pathlib import Path
import sys

from .classify import ClassifierConfig, grouped_cv
from .dataio import CsvSchema, load_csv
from .errors import DegenerateError, InputError
from .selection import Threshold, TopK, rank_variables, select

log = logging.getLogger("cefacies")

COMMANDS = ("rank", "select", "evaluate", "compare")


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's output. Parallelism is deliberately absent."""

    command: str
    input: str
    schema: CsvSchema
    k_ce: int = 3
    rule: object = None
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    seed: int = 0
    seeds: int = 1
    jitter_label: bool = False
    adjacency: str = None
    out_dir: str = "."

    def to_dict(self):
        return {
            "command": self.command,
            "input": self.input,
            "schema": self.schema.to_dict(),
            "k_ce": self.k_ce,
            "rule": None if self.rule is None else self.rule.to_dict(),
            "classifier": self.classifier.to_dict(),
            "seed": self.seed,
            "seeds": self.seeds,
            "jitter_label": self.jitter_label,
            "adjacency": self.adjacency,
            "out_dir": self.out_dir,
        }


def _write_json(path, obj):
    text = json.dumps(obj, indent=2, allow_nan=False) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def _load(config):
    return load_csv(config.input, config.schema, sidecar=config.adjacency, return_report=True)


def _rank(config, data, seed, n_jobs):
    return rank_variables(data, k=config.k_ce, jitter_label=config.jitter_label, seed=seed, n_jobs=n_jobs)


def _ranking_payload(ranking):
    return {
        "ranking": ranking.to_records(),
        "diagnostics": {"floored_points": {e.name: e.n_floored for e in ranking.entries}},
    }


def cmd_rank(config, n_jobs=1):
    data, load_report = _load(config)
    ranking = _rank(config, data, config.seed, n_jobs)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "ranking.json", {"config": config.to_dict(), "load": load_report.to_dict(), **_ranking_payload(ranking)})
    with open(out / "ranking.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("name,ce\n")
        for e in ranking.entries:
            fh.write(f"{e.name},{e.ce!r}\n")
    width = max(len(e.name) for e in ranking.entries)
    for i, e in enumerate(ranking.entries, 1):
        print(f"{i:3d}  {e.name:<{width}}  {e.ce: .6f}")
    return ranking


def cmd_select(config, n_jobs=1):
    if config.rule is None:
        raise InputError("select needs --top-k or --threshold")
    data, load_report = _load(config)
    ranking = _rank(config, data, config.seed, n_jobs)
    chosen = select(ranking, config.rule)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(
        out / "selection.json",
        {"config": config.to_dict(), "load": load_report.to_dict(), **_ranking_payload(ranking),
         "selected": chosen, "empty_selection": not chosen},
    )
    print(",".join(chosen) if chosen else "(empty selection)")
    return chosen


def cmd_evaluate(config, n_jobs=1):
    data, load_report = _load(config)
    report = grouped_cv(data, config.classifier, n_jobs=n_jobs)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(
        out / "evaluate.json",
        {"config": config.to_dict(), "load": load_report.to_dict(),
         "features": data.feature_names, "report": report.to_dict()},
    )
    print(f"accuracy {report.accuracy:.4f}  macro_f1 {report.macro_f1:.4f}")
    return report


def _compare_once(config, data, seed, n_jobs, full=None):
    ranking = _rank(config, data, seed, n_jobs)
    chosen = select(ranking, config.rule)
    if not chosen:
        raise DegenerateError("empty selection: no variable passes the selection rule")
    if full is None:
        full = grouped_cv(data, config.classifier, n_jobs=n_jobs)
    sub = grouped_cv(data, config.classifier, selected=chosen, n_jobs=n_jobs)
    return ranking, chosen, full, sub


def cmd_compare(config, n_jobs=1):
    """Grouped CV with all variables and with the selected subset.

    ``accuracy_delta`` is selected minus all. With ``seeds > 1`` the run is
    repeated for seeds ``seed .. seed + seeds - 1``; the seed drives the
    label jitter, so repeats only differ when jitter is on.
    """
    if config.rule is None:
        raise InputError("compare needs --top-k or --threshold")
    data, load_report = _load(config)
    ranking, chosen, full, sub = _compare_once(config, data, config.seed, n_jobs)
    runs = [{"seed": config.seed, "selected": chosen, "accuracy_all": full.accuracy,
             "accuracy_selected": sub.accuracy, "accuracy_delta": sub.accuracy - full.accuracy}]
    for s in range(config.seed + 1, config.seed + config.seeds):
        _, c, _, sb = _compare_once(config, data, s, n_jobs, full=full)
        runs.append({"seed": s, "selected": c, "accuracy_all": full.accuracy,
                     "accuracy_selected": sb.accuracy, "accuracy_delta": sb.accuracy - full.accuracy})
    payload = {
        "config": config.to_dict(),
        "load": load_report.to_dict(),
        **_ranking_payload(ranking),
        "selected": chosen,
        "n_variables_all": data.features.d,
        "n_variables_selected": len(chosen),
        "all_features": full.to_dict(),
        "selected_features": sub.to_dict(),
        "accuracy_delta": sub.accuracy - full.accuracy,
        "seed_runs": runs,
        "mean_accuracy_delta": sum(r["accuracy_delta"] for r in runs) / len(runs),
    }
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "compare.json", payload)
    print(
        f"all {data.features.d} variables: accuracy {full.accuracy:.4f}\n"
        f"selected {len(chosen)} ({', '.join(chosen)}): accuracy {sub.accuracy:.4f}\n"
        f"delta {payload['accuracy_delta']:+.4f}"
    )
    return payload


HANDLERS = {"rank": cmd_rank, "select": cmd_select, "evaluate": cmd_evaluate, "compare": cmd_compare}


def build_parser():
    p = argparse.ArgumentParser(prog="cefacies", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", required=True, help="well-log CSV")
    p.add_argument("--well-col", default="Well Name")
    p.add_argument("--depth-col", default="Depth")
    p.add_argument("--label-col", default="Facies")
    p.add_argument("--features", help="comma-separated feature columns (default: all other columns)")
    p.add_argument("--missing", choices=("drop", "median"), default="drop")
    p.add_argument("--missing-token", default="", help="cell value treated as missing besides empty")
    p.add_argument("--k-ce", type=int, default=3, help="neighbour order of the CE estimator")
    rule = p.add_mutually_exclusive_group()
    rule.add_argument("--top-k", type=int)
    rule.add_argument("--threshold", type=float, help="keep variables with CE <= this (nats)")
    p.add_argument("--knn", type=int, default=5, help="classifier neighbours")
    p.add_argument("--weighting", choices=("distance", "uniform"), default="distance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=1, help="repeat compare over this many consecutive seeds")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--adjacency", help="sidecar JSON with class names and adjacency")
    p.add_argument("--jitter-label", action="store_true", help="break label ties with seeded noise")
    p.add_argument("--jobs", type=int, default=1, help="worker threads; results do not depend on it")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args):
    if args.seeds < 1:
        raise InputError("--seeds must be >= 1")
    if not 0 <= args.seed < 2 ** 64:
        raise InputError("--seed must be a 64-bit unsigned integer")
    features = None if args.features is None else tuple(c.strip() for c in args.features.split(",") if c.strip())
    rule = None
    if args.top_k is not None:
        rule = TopK(args.top_k)
    elif args.threshold is not None:
        rule = Threshold(args.threshold)
    return RunConfig(
        command=args.command,
        input=args.input,
        schema=CsvSchema(args.well_col, args.depth_col, args.label_col, features, args.missing, args.missing_token),
        k_ce=args.k_ce,
        rule=rule,
        classifier=ClassifierConfig(args.knn, args.weighting),
        seed=args.seed,
        seeds=args.seeds,
        jitter_label=args.jitter_label,
        adjacency=args.adjacency,
        out_dir=args.out_dir,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        config = config_from_args(args)
        HANDLERS[config.command](config, n_jobs=max(1, args.jobs))
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegenerateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
