"""Command line entry point.

    smartigan run EXPERIMENT.ini [--seed S] [--workers W] [--out PATH]
                  [--format csv|markdown] [--n-iter N] [--finish-hartigan on|off]
    smartigan replay EXPERIMENT.ini --instance I --run R [--k K] [--n N] [--seed S]
    smartigan datasets
    smartigan gen --regime small_distance --d 2 --k 10 --n 500 --seed S --out data.csv

Exit codes: 0 success, 2 bad experiment file or arguments, 3 dataset
error, 4 internal invariant failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .bench import RunError, load_experiment, replay_run, run_experiment
from .core import ContractError
from .dataio import BUILTIN_MANIFESTS, OPTIONAL_MANIFESTS, DatasetError, load_dataset, render_report, save_dataset, write_report
from .synth import REGIMES, MixtureSpec, generate

EXIT_OK, EXIT_SPEC, EXIT_DATA, EXIT_INTERNAL = 0, 2, 3, 4


class InvariantError(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_SPEC, f"{self.prog}: error: {message}\n")


def _on_off(v: str) -> bool:
    if v not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return v == "on"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="smartigan", description="Paired Lloyd / Hartigan / Smartigan k-means experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment description file")
    run.add_argument("experiment")
    run.add_argument("--seed", type=int, help="override master_seed")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--format", choices=("csv", "markdown"), default="csv")
    run.add_argument("--n-iter", type=int, dest="n_iter")
    run.add_argument("--finish-hartigan", type=_on_off, dest="finish")

    rep = sub.add_parser("replay", help="re-execute a single (instance, run) pair")
    rep.add_argument("experiment")
    rep.add_argument("--instance", type=int, required=True)
    rep.add_argument("--run", type=int, required=True)
    rep.add_argument("--k", type=int)
    rep.add_argument("--n", type=int)
    rep.add_argument("--seed", type=int, help="override master_seed")
    rep.add_argument("--n-iter", type=int, dest="n_iter")
    rep.add_argument("--finish-hartigan", type=_on_off, dest="finish")

    sub.add_parser("datasets", help="list dataset manifests")

    gen = sub.add_parser("gen", help="export a synthetic Gaussian mixture as CSV")
    gen.add_argument("--regime", choices=sorted(REGIMES), required=True)
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    return p


def _spec_with_overrides(args):
    spec = load_experiment(args.experiment)
    changes = {}
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if args.n_iter is not None:
        changes["n_iter"] = args.n_iter
    if args.finish is not None:
        changes["finish_with_hartigan"] = args.finish
    return dataclasses.replace(spec, **changes) if changes else spec


def _cmd_run(args):
    spec = _spec_with_overrides(args)
    results = run_experiment(spec, workers=max(1, args.workers))
    for cell in results:
        by_alg = {}
        for r in cell.records:
            by_alg.setdefault((r.instance, r.run), set()).add(r.initial_loss)
        if any(len(v) != 1 for v in by_alg.values()):
            raise InvariantError("paired runs started from different initial losses")
    title = f"# {spec.name or args.experiment} (master_seed={spec.master_seed}, n_iter={spec.n_iter})"
    print(f"master_seed = {spec.master_seed}", file=sys.stderr)
    if args.out:
        write_report(results, args.out, args.format, title=title)
    else:
        sys.stdout.write(render_report(results, args.format, title=title))
    return EXIT_OK


def _cmd_replay(args):
    spec = _spec_with_overrides(args)
    reports = replay_run(spec, args.instance, args.run, k=args.k, n=args.n)
    print(f"master_seed = {spec.master_seed}  instance = {args.instance}  run = {args.run}")
    for name, rep in reports.items():
        nmi = "" if rep.nmi is None else f"  nmi={rep.nmi:.6f}"
        print(
            f"{name:15s} seed={rep.seed}  initial={rep.initial_loss!r}  final={rep.final_loss!r}  "
            f"epochs={rep.iterations_used}+{rep.finish_iterations}  converged={rep.converged}{nmi}"
        )
    return EXIT_OK


def _cmd_datasets(args):
    for name, m in sorted(BUILTIN_MANIFESTS.items()):
        data = load_dataset(m)
        scale = "" if m.loss_scale == 1 else f"  (losses reported x{m.loss_scale:g})"
        print(f"{name:10s} bundled   n={data.n:<5d} d={data.d:<5d} {m.path}{scale}")
    for name, (n, d, k) in OPTIONAL_MANIFESTS.items():
        print(f"{name:10s} optional  n={n:<5d} d={d:<5d} K={k}  supply your own [dataset] path")
    return EXIT_OK


def _cmd_gen(args):
    data = generate(MixtureSpec(args.regime, args.d, args.k, args.n, args.seed))
    save_dataset(data, args.out)
    print(f"wrote {data.n} points in d={data.d} to {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "replay": _cmd_replay, "datasets": _cmd_datasets, "gen": _cmd_gen}[args.command]
    try:
        return handler(args)
    except (DatasetError, FileNotFoundError) as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except RunError as exc:
        if isinstance(exc.__cause__, DatasetError):
            print(f"dataset error: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ContractError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except InvariantError as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
