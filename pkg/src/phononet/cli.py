"""Command-line front end.

Every flag can also be set through an environment variable named
``PHONONET_<FLAG>`` (upper case, dashes as underscores), e.g.
``PHONONET_SEED=7`` or ``PHONONET_KEEP_FIRST_HOMOPHONE=1``.  Flags given on
the command line win.  Exit status: 0 on success, 1 on data or model
errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .calibrate import (CalibrationTarget, calibrate_epsilon, calibrate_f,
                        default_core_grid, scan_core_density)
from .ensemble import EnsembleResult, _run_member, map_members
from .exceptions import PhonoNetError
from .growth import CAUSES, KMAX_PRESETS, GrowthModel
from .lexicon import (DEFAULT_STRIP_SET, length_histogram, load_inventory,
                      read_lexicon, read_strip_set)
from .mcmc import TRAJECTORY_COLUMNS, run_mcmc
from .network import build_network, net_stats
from .percolation import percolation_experiment
from .serialize import (OutputSet, RunManifest, csv_text, dumps, figure_files,
                        histogram_csv, read_stats_csv, sha256_file, stats_rows_csv)

logger = logging.getLogger("phononet")

ENV_PREFIX = "PHONONET_"
DISTRIBUTIONS = ("degree_histogram", "component_sizes", "mean_degree_by_length",
                 "clustering_by_degree", "giant_length_histogram", "length_histogram")
DIST_AXES = {
    "degree_histogram": ("k", "count"),
    "component_sizes": ("size", "count"),
    "mean_degree_by_length": ("length", "mean_degree"),
    "clustering_by_degree": ("k", "clustering"),
    "giant_length_histogram": ("length", "count"),
    "length_histogram": ("length", "count"),
}


class UsageError(Exception):
    pass


# --- argument parsing ------------------------------------------------------

def _kmax(text):
    low = text.lower()
    if low in ("none", "off"):
        return None
    if low in KMAX_PRESETS:
        return KMAX_PRESETS[low]
    return int(text)


def _grid(text):
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError("grid step must be positive")
        n = int(round((stop - start) / step))
        return [round(start + i * step, 10) for i in range(n + 1)]
    return [float(x) for x in text.split(",") if x.strip()]


def _common(p):
    g = p.add_argument_group("common")
    g.add_argument("--lexicon", help="label<TAB>transcription file")
    g.add_argument("--inventory", help="phoneme inventory, one symbol per line")
    g.add_argument("--strip", help="suprasegmental marks to strip, one per line")
    g.add_argument("--keep-first-homophone", action="store_true",
                   help="keep the first word of each homophone set instead of dropping all")
    g.add_argument("--max-length", type=int, default=21)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--out", default=".", help="output directory")


def _growth_flags(p, calibrating=False):
    p.add_argument("--type", dest="kind", choices=("0", "1", "2"), default="2")
    if not calibrating:
        p.add_argument("--f", type=float, default=0.0)
    p.add_argument("--kmax", type=_kmax, default=25,
                   help="integer, 'text' (25), 'table' (20) or 'none'")
    p.add_argument("--nu", type=float, default=0.1)
    p.add_argument("--tau", type=float, default=0.01)
    p.add_argument("--order", choices=("ordered", "random"), default="ordered")
    p.add_argument("--delta", type=float, default=0.99)


def _calibration_flags(p):
    p.add_argument("--target-from", help="stats CSV providing gc, L0 and L")
    p.add_argument("--target-row", help="model label of the row to use (default: first)")
    p.add_argument("--tol", type=float, default=0.02)
    p.add_argument("--ensemble", type=int, default=10)
    p.add_argument("--max-ensemble", type=int)
    p.add_argument("--f-max", type=float, default=0.999)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phononet", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="clean a lexicon and write it back normalised")
    _common(p)

    p = sub.add_parser("stats", help="network statistics of a lexicon")
    _common(p)
    p.add_argument("--scope", choices=("giant", "all"), default="giant")

    p = sub.add_parser("percolate", help="percolation pseudolexicon ensemble")
    _common(p)
    p.add_argument("--type", dest="kind", choices=("0", "1", "2"), default="2")
    p.add_argument("--ensemble", type=int, default=10)
    p.add_argument("--retry-cap", type=int, default=10**6)

    p = sub.add_parser("mcmc", help="link-preserving randomization")
    _common(p)
    p.add_argument("--sweeps", type=int, default=200)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--d-stride", type=int, default=10)
    p.add_argument("--check-every", type=int, default=10)

    p = sub.add_parser("grow", help="rejection-sampling growth")
    _common(p)
    p.add_argument("--mode", choices=("gc", "cp", "cp-eps"), default="gc")
    _growth_flags(p)
    p.add_argument("--Wc", dest="W_C", type=int, default=5)
    p.add_argument("--mc", dest="m_C", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--ensemble", type=int, default=1)
    p.add_argument("--no-trace", action="store_true", help="skip the acceptance trace")

    p = sub.add_parser("calibrate", help="match growth parameters to a target")
    what = p.add_subparsers(dest="what", required=True)
    q = what.add_parser("f", help="find f where the giant component matches")
    _common(q)
    _growth_flags(q, calibrating=True)
    _calibration_flags(q)
    q.add_argument("--mode", choices=("gc", "cp", "cp-eps"), default="gc")
    q.add_argument("--Wc", dest="W_C", type=int, default=5)
    q.add_argument("--mc", dest="m_C", type=float, default=0.0)
    q.add_argument("--eps", type=float, default=0.0)
    q = what.add_parser("core", help="scan m_C for giant-component link crossings")
    _common(q)
    _growth_flags(q, calibrating=True)
    _calibration_flags(q)
    q.add_argument("--Wc", dest="W_C", type=int, default=5)
    q.add_argument("--eps", type=float, default=0.0)
    q.add_argument("--grid", type=_grid, help="start:stop:step or comma list of m_C")
    q.add_argument("--grid-step", type=float, default=0.2)
    q = what.add_parser("epsilon", help="tune eps so total links match")
    _common(q)
    _growth_flags(q, calibrating=True)
    _calibration_flags(q)
    q.add_argument("--Wc", dest="W_C", type=int, default=5)
    q.add_argument("--grid", type=_grid)
    q.add_argument("--grid-step", type=float, default=0.2)
    q.add_argument("--eps-max", type=float, default=0.95)

    _apply_env(parser)
    return parser


def _subparsers(parser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for p in action.choices.values():
                yield p
                yield from _subparsers(p)


def _apply_env(parser):
    """Let ``PHONONET_<DEST>`` variables replace flag defaults."""
    for p in [parser, *_subparsers(parser)]:
        for action in p._actions:
            if not action.option_strings or action.dest in ("help", "version"):
                continue
            name = ENV_PREFIX + action.option_strings[-1].lstrip("-").replace("-", "_").upper()
            if name not in os.environ:
                continue
            raw = os.environ[name]
            if isinstance(action, argparse._StoreTrueAction):
                action.default = raw.strip().lower() in ("1", "true", "yes", "on")
            else:
                action.default = raw  # argparse applies ``type`` to string defaults


# --- shared plumbing -------------------------------------------------------

def _load(args):
    if not args.lexicon:
        raise UsageError("--lexicon is required (or set PHONONET_LEXICON)")
    inventory = load_inventory(args.inventory)
    strip = read_strip_set(args.strip) if args.strip else DEFAULT_STRIP_SET
    lex = read_lexicon(args.lexicon, inventory, strip,
                       keep_first_homophone=args.keep_first_homophone,
                       max_length=args.max_length)
    return lex


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "handler"}


def _stats_outputs(out: OutputSet, rows, prefix=""):
    out.add(f"{prefix}stats.csv", stats_rows_csv(rows))
    out.add(f"{prefix}stats.json", dumps({label: (s if isinstance(s, dict) else s.to_dict())
                                          for label, s in rows}))


def _dist_outputs(out: OutputSet, dist, suffix=""):
    for name in DISTRIBUTIONS:
        hist = dist[name] if isinstance(dist, dict) else getattr(dist, name)
        out.add(f"{name}{suffix}.csv", histogram_csv(hist, *DIST_AXES[name]))


def _growth_model(args, **overrides) -> GrowthModel:
    params = dict(kind=f"type{args.kind}", k_max=args.kmax, nu=args.nu, tau=args.tau,
                  order=args.order, delta=args.delta)
    for name in ("mode", "f", "W_C", "m_C", "eps"):
        if hasattr(args, name):
            params[name] = getattr(args, name)
    params.update(overrides)
    if "mode" in params:
        params["mode"] = params["mode"].replace("-", "_")
    return GrowthModel(**params)


def _target(args, lex) -> CalibrationTarget:
    if not args.target_from:
        return CalibrationTarget.from_lexicon(lex)
    rows = read_stats_csv(args.target_from)
    if args.target_row:
        rows = [r for r in rows if r["model"] == args.target_row]
        if not rows:
            raise ValueError(f"no row labelled {args.target_row!r} in {args.target_from}")
    r = rows[0]
    return CalibrationTarget(int(round(r["gc"])), int(round(r["L0"])), int(round(r["L"])))


# --- subcommands -----------------------------------------------------------

def cmd_build(args, out):
    lex = _load(args)
    out.add("lexicon.tsv", "".join(f"{lab}\t{tr}\n" for lab, tr in lex.records(" ")))
    out.add("skipped.csv", csv_text(("line", "label", "transcription", "reason"),
                                    [(s.line, s.label, s.raw, s.reason) for s in lex.skipped]))
    out.add("length_histogram.csv",
            histogram_csv(length_histogram(lex), "length", "count"))
    return dict(n_words=len(lex), n_skipped=len(lex.skipped))


def cmd_stats(args, out):
    lex = _load(args)
    stats, dist = net_stats(build_network(lex), scope=args.scope)
    _stats_outputs(out, [("reference", stats)])
    _dist_outputs(out, dist)
    for name, text in figure_files({"degree": {"reference": dist.degree_histogram}},
                                   "fig2").items():
        out.add(name, text)
    return dict(n_words=len(lex))


def _ensemble_outputs(out, label, ens: EnsembleResult, members_dist=True):
    rows = [(f"{label}/{i:03d}", s) for i, s in enumerate(ens.stats)]
    rows += [(f"{label}/mean", ens.mean), (f"{label}/sem", ens.sem)]
    _stats_outputs(out, rows)
    if members_dist:
        for i, d in enumerate(ens.distributions):
            _dist_outputs(out, d, f"_{i:03d}")
    _dist_outputs(out, {name: ens.mean_distribution(name) for name in DISTRIBUTIONS},
                  "_mean")


def cmd_percolate(args, out):
    lex = _load(args)
    kind = f"type{args.kind}"
    ens = percolation_experiment(lex, kind, args.ensemble, args.seed, args.jobs,
                                 args.retry_cap)
    _ensemble_outputs(out, kind, ens)
    _, ref = net_stats(build_network(lex), with_geodesics=False)
    degree = {"reference": ref.degree_histogram,
              kind: ens.mean_distribution("degree_histogram")}
    for name, text in figure_files({"degree": degree}, "fig2").items():
        out.add(name, text)
    return dict(failures=ens.failures)


def cmd_mcmc(args, out):
    lex = _load(args)
    res = run_mcmc(lex, args.sweeps, args.burn_in, args.stride, args.seed,
                   d_stride=args.d_stride, check_every=args.check_every)
    out.add("trajectory.csv", csv_text(TRAJECTORY_COLUMNS, [p.row() for p in res.trajectory]))
    initial, _ = net_stats(build_network(lex))
    final, dist = net_stats(build_network(res.final_lexicon))
    _stats_outputs(out, [("input", initial), ("mcmc/final", final),
                         ("mcmc/mean", res.mean), ("mcmc/sem", res.sem)])
    _dist_outputs(out, dist)
    out.add("counters.json", dumps(res.counters))
    out.add("lexicon.tsv", "".join(f"{lab}\t{tr}\n"
                                   for lab, tr in res.final_lexicon.records(" ")))
    return dict(checks=res.checks, **res.counters)


def _grow_member(model, seed):
    res = model.sample(seed)
    stats, dist = net_stats(res.network)
    return stats, dist, res.counters


def cmd_grow(args, out):
    lex = _load(args)
    model = _growth_model(args, record_trace=not args.no_trace).fit(lex)
    first, failures = _run_member(_grow_trace_member, model, args.seed, 0)
    rest = map_members(_grow_member, model.set_params(record_trace=False),
                       range(1, args.ensemble), args.seed, args.jobs)
    results = [first] + [r[0] for r in rest]
    failures += sum(r[1] for r in rest)
    ens = EnsembleResult([r[0] for r in results], [r[1] for r in results], failures)
    _ensemble_outputs(out, f"grow-{args.mode}", ens, members_dist=args.ensemble > 1)
    causes = {c: sum(r[2][c] for r in results) for c in CAUSES}
    out.add("causes.csv", csv_text(("cause", "count"), causes.items()))
    if not args.no_trace:
        out.add("trace.csv", csv_text(("step", "length", "degree", "cause"), first[3]))
        out.add("lexicon.tsv", "".join(f"{lab}\t{tr}\n" for lab, tr in first[4].records(" ")))
    _, ref = net_stats(build_network(lex), with_geodesics=False)
    comps = {"reference": ref.component_sizes,
             f"grow-{args.mode}": ens.mean_distribution("component_sizes")}
    for name, text in figure_files({"components": comps}, "fig6").items():
        out.add(name, text)
    return dict(failures=failures, causes=causes)


def _grow_trace_member(model, seed):
    res = model.sample(seed)
    stats, dist = net_stats(res.network)
    return stats, dist, res.counters, res.trace or [], res.lexicon


def cmd_calibrate(args, out):
    lex = _load(args)
    target = _target(args, lex)
    f_bounds = (0.0, args.f_max)
    report = dict(target=dict(gc=target.gc_target, L0=target.L0_target, L=target.L_target))
    if args.what == "f":
        res = calibrate_f(_growth_model(args), lex, target.gc_target, args.tol,
                          args.ensemble, args.seed, args.jobs, f_bounds=f_bounds,
                          max_ensemble=args.max_ensemble)
        report["result"] = res.to_dict()
        last = {}
        for p in res.probes:
            last[p["f"]] = p
        sweep = [(f, p["gc"] / target.gc_target, p["gc_sem"] / target.gc_target)
                 for f, p in sorted(last.items())]
        figs = figure_files({"f_sweep": sweep}, "fig3a")
    elif args.what == "core":
        grid = args.grid or default_core_grid(lex, args.W_C, args.grid_step)
        _, ref = net_stats(build_network(lex), with_geodesics=False)
        scan = scan_core_density(_growth_model(args, mode="cp"), lex, args.W_C, args.eps,
                                 target.gc_target, target.L0_target, grid, args.tol,
                                 args.ensemble, args.seed, args.jobs, f_bounds=f_bounds,
                                 degree_reference=ref.degree_histogram)
        report["scan"] = scan.to_dict()
        figs = figure_files({"scans": {args.W_C: report["scan"]}}, "fig5")
    else:
        grid = args.grid or default_core_grid(lex, args.W_C, args.grid_step)
        res = calibrate_epsilon(_growth_model(args, mode="cp_eps"), lex, args.W_C, target,
                                args.tol, args.ensemble, args.seed, args.jobs, grid=grid,
                                eps_bounds=(0.0, args.eps_max), f_bounds=f_bounds)
        report["result"] = res.to_dict()
        figs = figure_files({"eps_sweep": [(p["eps"], p.get("L0", target.L0_target), p["L"])
                                           for p in res.probes if p.get("feasible")]},
                            "fig6")
    out.add("calibration.json", dumps(report))
    for name, text in figs.items():
        out.add(name, text)
    return {}


HANDLERS = dict(build=cmd_build, stats=cmd_stats, percolate=cmd_percolate,
                mcmc=cmd_mcmc, grow=cmd_grow, calibrate=cmd_calibrate)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    out = OutputSet()
    started = time.time()
    try:
        summary = HANDLERS[args.command](args, out)
    except UsageError as exc:
        print(f"phononet: usage error: {exc}", file=sys.stderr)
        return 2
    except (PhonoNetError, OSError, ValueError, RuntimeError) as exc:
        print(f"phononet: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    manifest = RunManifest(
        command=["phononet", *argv], seed=args.seed, version=__version__,
        lexicon_sha256=sha256_file(args.lexicon),
        config=_config(args),
        timing=dict(started=started, seconds=round(time.time() - started, 3)),
        outputs=sorted(out.files) + ["manifest.json"])
    manifest.config["summary"] = summary
    out.add("manifest.json", manifest.to_json())
    try:
        out.commit(Path(args.out))
    except OSError as exc:
        print(f"phononet: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
