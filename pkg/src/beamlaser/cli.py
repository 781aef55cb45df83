"""Command-line front end: single runs, parameter sweeps, figure presets.

    beamlaser run --config run.cfg --seed 7 --out results/
    beamlaser sweep --config run.cfg --axis cavity.delta_ca_mhz=-10,0,10 \
        --axis beam.n_mean=250:4000:5 --repeats 2 --parallel 4 --out sweep/
    beamlaser reproduce fig3 --desk-scale --out fig3/

Every run writes a config echo, a metrics key=value file, a spectrum table
and a JSON manifest; sweeps add one aggregate table ordered by axis values.
Exit codes: 0 success, 2 configuration error, 3 simulation failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
import time

import numpy as np

from .config import (ConfigError, SimConfig, apply_overrides, config_hash,
                     config_to_doc, doc_to_config, load_config, save_config)
from .dynamics import run_trajectory, write_record
from .presets import FIGURE_IDS, figure_jobs
from .spectrum import pulling_coefficient, write_spectrum
from .sweep import (METRIC_KEYS, SweepSpec, _fmt, analyze_record,
                    derived_seed, run_sweep, write_manifest, write_map_table,
                    write_metrics, write_sweep_table)
from ._engine import resolve_engine


def _parse_overrides(pairs: list[str]) -> dict[str, str]:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"override must be key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _parse_axis(text: str) -> tuple[str, list[float]]:
    if "=" not in text:
        raise ConfigError(f"axis must be path=values, got {text!r}")
    path, spec = text.split("=", 1)
    spec = spec.strip()
    if spec.startswith("log:"):
        a, b, n = spec[4:].split(":")
        values = np.geomspace(float(a), float(b), int(n))
    elif ":" in spec:
        a, b, n = spec.split(":")
        values = np.linspace(float(a), float(b), int(n))
    else:
        values = np.array([float(v) for v in spec.split(",")])
    if values.size < 1:
        raise ConfigError(f"axis {path!r} needs at least one value")
    return path.strip(), [float(v) for v in values]


def _load(args) -> SimConfig:
    cfg = load_config(args.config)
    overrides = _parse_overrides(args.override)
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    if args.seed is not None:
        cfg.numerics.seed = args.seed
    return cfg


def cmd_run(args) -> int:
    cfg = _load(args)
    os.makedirs(args.out, exist_ok=True)
    t_start = time.time()
    record = run_trajectory(cfg)
    spec, metrics = analyze_record(record, cfg)
    h = config_hash(cfg)
    paths = {
        "config": os.path.join(args.out, "config.cfg"),
        "metrics": os.path.join(args.out, "metrics.txt"),
        "spectrum": os.path.join(args.out, "spectrum.tsv"),
        "record": os.path.join(args.out, "record.tsv"),
        "manifest": os.path.join(args.out, "manifest.json"),
    }
    save_config(cfg, paths["config"])
    write_metrics(metrics, paths["metrics"], h, cfg.numerics.seed)
    write_spectrum(spec, paths["spectrum"],
                   meta=f"config_hash={h} seed={cfg.numerics.seed}")
    if not args.no_record:
        write_record(record, paths["record"])
    write_manifest(paths["manifest"], cfg, cfg.numerics.seed,
                   sorted(paths.values()), t_start, time.time(),
                   engine=resolve_engine(cfg.numerics.engine))
    print(f"run complete: hash={h} seed={cfg.numerics.seed} "
          f"samples={len(record)}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    axes = [_parse_axis(a) for a in args.axis]
    spec = SweepSpec(axes=axes, base_seed=args.seed or 0, repeats=args.repeats)
    os.makedirs(args.out, exist_ok=True)
    t_start = time.time()
    result = run_sweep(cfg, spec, parallel=args.parallel, out_dir=args.out,
                       save_spectra=args.save_spectra)
    table_path = os.path.join(args.out, "sweep.tsv")
    write_sweep_table(result, table_path)
    write_manifest(os.path.join(args.out, "manifest.json"), cfg,
                   spec.base_seed, [table_path], t_start, time.time(),
                   engine=resolve_engine(cfg.numerics.engine))
    failed = sum(1 for r in result.rows if r["status"] != "ok")
    print(f"sweep complete: {len(result.rows)} points, {failed} failed "
          f"-> {table_path}")
    return 0 if failed == 0 else 3


def _preset_worker(job_args):
    index, doc, seed = job_args
    cfg = doc_to_config(doc)
    cfg.numerics.seed = seed
    record = run_trajectory(cfg)
    spec, metrics = analyze_record(record, cfg)
    return index, metrics, spec


def cmd_reproduce(args) -> int:
    jobs = figure_jobs(args.figure, desk=args.desk_scale)
    overrides = _parse_overrides(args.override)
    base_seed = args.seed or 0
    os.makedirs(args.out, exist_ok=True)

    work = []
    for i, job in enumerate(jobs):
        cfg = apply_overrides(job.config, overrides) if overrides else job.config
        work.append((i, config_to_doc(cfg), derived_seed(base_seed, i)))

    results: dict[int, tuple[dict, object]] = {}
    t_start = time.time()
    if args.parallel > 1:
        with concurrent.futures.ProcessPoolExecutor(args.parallel) as pool:
            for i, metrics, spec in pool.map(_preset_worker, work):
                results[i] = (metrics, spec)
    else:
        for item in work:
            i, metrics, spec = _preset_worker(item)
            results[i] = (metrics, spec)

    outputs = []
    # Per-group map tables (detuning maps).
    groups = sorted({j.group for j in jobs if j.group.startswith("map_")})
    for group in groups:
        entries = [(jobs[i].coord["delta_ca_mhz"], results[i][1])
                   for i in range(len(jobs)) if jobs[i].group == group]
        path = os.path.join(args.out, f"{args.figure}_{group}.tsv")
        write_map_table(sorted(entries, key=lambda e: e[0]), path)
        outputs.append(path)

    # Aggregate metrics table over all jobs.
    coord_keys = sorted({k for j in jobs for k in j.coord})
    table_path = os.path.join(args.out, f"{args.figure}_table.tsv")
    with open(table_path, "w", encoding="utf-8") as fh:
        cols = ["label"] + coord_keys + ["seed"] + list(METRIC_KEYS)
        fh.write("\t".join(cols) + "\n")
        for i, job in enumerate(jobs):
            metrics = results[i][0]
            row = [job.label] + [_fmt(job.coord.get(k, "")) for k in coord_keys]
            row.append(str(derived_seed(base_seed, i)))
            row += [_fmt(metrics.get(k, "")) for k in METRIC_KEYS]
            fh.write("\t".join(row) + "\n")
    outputs.append(table_path)

    # Figure-specific digests.
    if args.figure == "fig1":
        path = os.path.join(args.out, "fig1_pulling.tsv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("n_tau_gamma_c\tpulling_p\tpulling_p_kappa_tau\n")
            events = sorted({j.coord["n_tau_gamma_c"] for j in jobs})
            for ev in events:
                idx = [i for i, j in enumerate(jobs)
                       if j.coord["n_tau_gamma_c"] == ev]
                dets = [jobs[i].config.delta_ca for i in idx]
                offs = [results[i][0]["central_offset_hz"] for i in idx]
                if any(o == "" for o in offs):
                    fh.write(f"{ev:g}\tnan\tnan\n")
                    continue
                pr = pulling_coefficient(np.array(dets), np.array(offs),
                                         kappa=jobs[idx[0]].config.kappa,
                                         tau=jobs[idx[0]].config.tau)
                fh.write(f"{ev:g}\t{pr.p:.6g}\t{pr.p_norm:.6g}\n")
        outputs.append(path)

    if args.figure == "fig6":
        best = max(range(len(jobs)),
                   key=lambda i: jobs[i].coord["delta_offset_mhz"])
        path = os.path.join(args.out, "fig6_spectrum.tsv")
        write_spectrum(results[best][1], path,
                       meta=f"delta_offset_mhz="
                            f"{jobs[best].coord['delta_offset_mhz']:g}")
        outputs.append(path)

    write_manifest(os.path.join(args.out, "manifest.json"), jobs[0].config,
                   base_seed, sorted(outputs), t_start, time.time(),
                   engine=resolve_engine(jobs[0].config.numerics.engine))
    print(f"reproduce {args.figure} complete: {len(jobs)} runs, "
          f"{len(outputs)} artifacts in {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamlaser",
        description="Superradiant beam-laser simulator: spectra, linewidths, "
                    "pulling and contrast metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="seed (run) or base seed (sweep/reproduce)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--override", action="append", metavar="K=V",
                        help="dotted config override, e.g. "
                             "cavity.delta_ca_mhz=10")

    p_run = sub.add_parser("run", parents=[common],
                           help="one trajectory + spectrum + metrics")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--no-record", action="store_true",
                       help="skip writing the field record table")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="cartesian parameter sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--axis", action="append", required=True,
                         metavar="PATH=VALUES",
                         help="values: v1,v2,... | start:stop:count | "
                              "log:start:stop:count")
    p_sweep.add_argument("--repeats", type=int, default=1)
    p_sweep.add_argument("--parallel", type=int, default=1)
    p_sweep.add_argument("--save-spectra", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_rep = sub.add_parser("reproduce", parents=[common],
                           help="run a built-in figure preset")
    p_rep.add_argument("figure", choices=FIGURE_IDS)
    p_rep.add_argument("--desk-scale", action="store_true",
                       help="reduced atom numbers, spans and grids")
    p_rep.add_argument("--parallel", type=int, default=1)
    p_rep.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
