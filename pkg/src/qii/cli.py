"""Command-line front end: loop generation, inequality verification, model
runs, application bounds, conjecture searches, and table/plot emission.

Exit codes: 0 success, 1 usage error, 2 scientific violation or
propagated computation error -- so CI can gate on inequality violations.
Every run with an output directory writes a manifest.json echoing the
fully resolved configuration, the seed, and the package version, which
is sufficient to reproduce the run bit-identically.  The environment
variable QII_THREADS caps the verify worker count; a JSON --config file
provides defaults that explicit flags override.
"""

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .applications import (adiabatic_cone_demo, eph_bound_chain,
                           superfluid_weight_1d, wannier_bound_chain)
from .config import TOL
from .errors import DegenerateSpec, QiiError
from .geometry import Loop, bloch_solid_angle, loop_distance, summarize
from .inequalities import (plane_check, sphere_check, strong_qii, tol_for,
                           weak_qii)
from .loops import (bloch_circle, fourier_loop, great_circle, load_loop,
                    random_fourier_spec, save_loop, spherical_polygon,
                    split_self_intersections)
from .models import (bloch_table_from_csv, bz_loop, creutz, dirac,
                     fermi_surface_loop, model_from_json, rhombohedral, ssh)
from .search import SearchConfig, minimize_margin
from .svgplot import line_chart, scatter_under_quarter_circle


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _prepare_outdir(args, command) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = {}
    for key, val in sorted(vars(args).items()):
        if key in {"func", "command"}:
            continue
        config[key] = str(val) if isinstance(val, Path) else val
    manifest = {"command": command, "config": config, "version": __version__}
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return out


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("QII_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------- verify

def _loop_for_index(m, k, n, seed, index):
    for retry in range(16):
        rng = np.random.default_rng(np.random.SeedSequence([seed, index, retry]))
        spec = random_fourier_spec(m, k, n, rng)
        try:
            return spec, fourier_loop(spec)
        except DegenerateSpec:
            continue
    raise DegenerateSpec(f"no valid loop for index {index} after 16 retries")


def _verify_rows(params):
    m, k, n, seed, indices, strong = params
    rows = []
    for i in indices:
        _, loop = _loop_for_index(m, k, n, seed, i)
        s = summarize(loop)
        row = [i, s.d_fs, s.gamma_b, s.d_fs - s.gamma_b,
               s.d_fs - abs(s.gamma_b), s.convergence_est]
        if strong:
            parts = split_self_intersections(loop)
            margins = []
            for p in parts:
                rep = strong_qii(summarize(p), conjecture=(m > 2 or len(parts) > 1))
                margins.append(rep.margin)
            row += [min(margins), len(parts)]
        rows.append(row)
    return rows


def run_weak_suite(m, n_loops, k, n, seed, strong=False, workers=1):
    """Margins of n_loops random Fourier loops; returns the row list."""
    indices = list(range(n_loops))
    if workers <= 1:
        return _verify_rows((m, k, n, seed, indices, strong))
    chunks = [indices[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_verify_rows,
                              [(m, k, n, seed, c, strong) for c in chunks]))
    rows = [row for part in parts for row in part]
    rows.sort(key=lambda r: r[0])
    return rows


def _cmd_verify(args) -> int:
    if args.m < 2:
        raise _UsageError("a single-band Hilbert space is a point; need --m >= 2")
    out = _prepare_outdir(args, "verify")
    rows = run_weak_suite(args.m, args.loops, args.k, args.n, args.seed,
                          strong=args.strong, workers=_worker_count())
    header = ["index", "d_fs", "gamma_b", "weak_margin", "weak_margin_abs",
              "convergence_est"]
    if args.strong:
        header += ["strong_margin", "n_subloops"]
    _write_csv(out / "margins.csv", header, rows)
    weak_min = min(r[3] for r in rows)
    bad = [r for r in rows if r[3] < -TOL.saturation_floor]
    if args.strong:
        bad += [r for r in rows
                if r[6] < -max(TOL.saturation_floor, 10.0 * r[5])]
    print(f"verify: m={args.m} loops={args.loops} n={args.n} seed={args.seed} "
          f"min weak margin {weak_min:.3e}")
    if bad:
        index = int(bad[0][0])
        spec, loop = _loop_for_index(args.m, args.k, args.n, args.seed, index)
        save_loop(out / "violation_loop.csv", loop, generator="fourier-random",
                  parameters={"k": args.k, "index": index}, seed=args.seed)
        print(f"verify: VIOLATION at loop {index}; serialized to "
              f"{out / 'violation_loop.csv'}", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------- figure1

def _cmd_figure1(args) -> int:
    out = _prepare_outdir(args, "figure1")
    planar = []
    for n in args.n_list:
        perim = 2.0 * n * np.sin(np.pi / n)
        area = 0.5 * n * np.sin(2.0 * np.pi / n)
        rep = plane_check(perim, area)
        planar.append([n, perim, area, rep.inputs["quotient"], rep.margin])
    _write_csv(out / "planar.csv",
               ["n_sides", "perimeter", "area", "quotient", "margin"], planar)

    spherical = []
    for n in args.n_list:
        if n > 2048:
            continue  # geodesic sampling cost grows linearly; the limit is the circle row
        loop = spherical_polygon(n, args.theta, args.n_per_edge)
        perim = loop_distance(loop)
        area = bloch_solid_angle(loop) * 0.25  # radius 1/2
        rep = sphere_check(perim, abs(area), 0.5)
        spherical.append([n, perim, abs(area), rep.inputs["quotient"], rep.margin])
    circle = sphere_check(np.pi * np.sin(args.theta),
                          0.5 * np.pi * (1.0 - np.cos(args.theta)), 0.5)
    spherical.append(["circle", np.pi * np.sin(args.theta),
                      0.5 * np.pi * (1.0 - np.cos(args.theta)),
                      circle.inputs["quotient"], circle.margin])
    _write_csv(out / "spherical.csv",
               ["n_sides", "perimeter", "area", "quotient", "margin"], spherical)

    series = {"planar": ([r[0] for r in planar], [r[3] for r in planar])}
    sph_numeric = [r for r in spherical if isinstance(r[0], int)]
    if sph_numeric:
        series["spherical"] = ([r[0] for r in sph_numeric],
                               [r[3] for r in sph_numeric])
    line_chart(out / "figure1.svg", series,
               title="inverse isoperimetric quotient vs polygon sides",
               xlabel="sides", ylabel="quotient")
    print(f"figure1: wrote {out / 'planar.csv'}, {out / 'spherical.csv'}")
    return 0


# ---------------------------------------------------------------- models

def _model_from_args(args):
    if getattr(args, "model_json", None):
        return model_from_json(Path(args.model_json).read_text(encoding="utf-8"))
    if getattr(args, "table_csv", None):
        return bloch_table_from_csv(args.table_csv, a=args.a)
    name = args.model
    if name == "ssh":
        return ssh(args.v, args.w, args.a)
    if name == "creutz":
        return creutz(args.t, args.a)
    if name == "rhombohedral":
        return rhombohedral(args.layers, args.scale, args.a)
    if name == "dirac":
        return dirac(args.vf)
    raise _UsageError(f"unknown model {name!r}")


def _add_model_flags(parser):
    parser.add_argument("--model", default="ssh",
                        choices=["ssh", "creutz", "rhombohedral", "dirac"])
    parser.add_argument("--v", type=float, default=0.0, help="SSH intracell hopping")
    parser.add_argument("--w", type=float, default=1.0, help="SSH intercell hopping")
    parser.add_argument("--t", type=float, default=1.0, help="Creutz hopping")
    parser.add_argument("--layers", type=int, default=1, help="rhombohedral layer count")
    parser.add_argument("--scale", type=float, default=1.0, help="rhombohedral scale")
    parser.add_argument("--vf", type=float, default=1.0, help="Dirac Fermi velocity")
    parser.add_argument("--a", type=float, default=1.0, help="lattice constant")
    parser.add_argument("--model-json", default=None,
                        help="JSON model config {kind, parameters, lattice_const}")
    parser.add_argument("--table-csv", default=None,
                        help="CSV Bloch-vector table (k, nx, ny, nz)")


def _cmd_models(args) -> int:
    spec = _model_from_args(args)
    out = _prepare_outdir(args, "models")
    if spec.dim_k == 1:
        loop = bz_loop(spec, args.band, args.nk)
    else:
        loop, _ = fermi_surface_loop(spec, args.ef, args.nk)
    parts = split_self_intersections(loop)
    summaries = [summarize(p) for p in parts]
    rows = []
    worst = np.inf
    for i, s in enumerate(summaries):
        wrep = weak_qii(s)
        srep = strong_qii(s, conjecture=len(parts) > 1)
        worst = min(worst, wrep.margin + tol_for(s))
        rows.append([spec.describe(), args.band, i, s.n_segments, s.d_fs,
                     s.gamma_b, wrep.margin, srep.margin, int(srep.saturated)])
    total_d = sum(s.d_fs for s in summaries)
    total_g = sum(s.gamma_b for s in summaries)
    rows.append([spec.describe(), args.band, "aggregate",
                 sum(s.n_segments for s in summaries), total_d, total_g,
                 total_d - total_g, "", ""])
    _write_csv(out / "models.csv",
               ["model", "band", "subloop", "n", "d_fs", "gamma_b",
                "weak_margin", "strong_margin", "strong_saturated"], rows)
    if args.svg:
        scatter_under_quarter_circle(out / "models.svg",
                                     [s.d_fs for s in summaries],
                                     [abs(s.gamma_b) for s in summaries],
                                     title=spec.describe())
    print(f"models: {spec.describe()} d_fs={total_d:.6f} gamma_b={total_g:.6f} "
          f"({len(parts)} subloop(s))")
    return 0 if worst >= 0 else 2


# ---------------------------------------------------------------- apps

def _chain_rows(chain):
    return [[label, value, chain.unit] for label, value in chain.entries]


def _cmd_apps(args) -> int:
    out = _prepare_outdir(args, "apps")
    notes = ()
    if args.app == "wannier":
        chain = wannier_bound_chain(_model_from_args(args), args.band, args.nk)
    elif args.app == "sfweight":
        chain = superfluid_weight_1d(_model_from_args(args), args.u, args.nu, args.nk)
    elif args.app == "eph":
        chain = eph_bound_chain(_model_from_args(args), args.ef, args.nk)
    elif args.app == "speed":
        _, gamma, report = adiabatic_cone_demo(args.theta_c, ratio=args.ratio,
                                               steps=args.steps)
        chain = report.chain
        notes = (f"gamma_b={gamma:.9g}", f"eq8_residual={report.residual:.3e}")
    else:
        raise _UsageError(f"unknown application {args.app!r}")
    _write_csv(out / "chain.csv", ["label", "value", "unit"], _chain_rows(chain))
    report_doc = {"app": args.app, "entries": list(chain.entries),
                  "unit": chain.unit, "notes": list(chain.notes) + list(notes),
                  "monotone": chain.is_monotone(TOL.saturation_floor)}
    (out / "report.json").write_text(
        json.dumps(report_doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    values = " >= ".join(f"{v:.9g}" for v in chain.values)
    print(f"apps/{args.app}: {values} [{chain.unit}]")
    return 0 if chain.is_monotone(TOL.saturation_floor) else 2


# ---------------------------------------------------------------- search

def _search_record(cfg, result) -> dict:
    return {
        "config": cfg.to_dict(),
        "best_margin": result.best_margin,
        "margin_at_n": result.margin_at_n,
        "evals": result.evals,
        "status": result.status,
        "violation": result.violation,
        "history": [list(h) for h in result.history],
        "best_spec": {
            "m": result.best_spec.m_dim, "k": result.best_spec.k,
            "n": result.best_spec.n,
            "coeffs_re": result.best_spec.coeffs.real.tolist(),
            "coeffs_im": result.best_spec.coeffs.imag.tolist(),
        },
    }


def _cmd_search(args) -> int:
    if args.m < 2:
        raise _UsageError("need --m >= 2")
    out = _prepare_outdir(args, "search")
    # a seed list runs one search per seed (the resume path: add seeds to
    # extend an earlier campaign); merging keeps the worst margin
    seeds = args.seeds if args.seeds else [args.seed]
    runs = []
    worst = None
    for seed in seeds:
        cfg = SearchConfig(m_dim=args.m, k=args.k, n=args.n, budget=args.budget,
                           restarts=args.restarts, seed=seed,
                           coeff_bound=args.coeff_bound)
        result = minimize_margin(cfg)
        runs.append((cfg, result))
        if worst is None or result.best_margin < worst[1].best_margin:
            worst = (cfg, result)
    cfg, result = worst
    record = _search_record(cfg, result)
    record["seeds"] = seeds
    record["runs"] = [_search_record(c, r) for c, r in runs]
    (out / "run.json").write_text(
        json.dumps(record, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    total_evals = sum(r.evals for _, r in runs)
    print(f"search: m={args.m} seeds={seeds} best_margin="
          f"{result.best_margin:.3e} evals={total_evals} status={result.status}")
    if result.violation:
        loop = fourier_loop(result.best_spec.with_resolution(4 * cfg.n))
        save_loop(out / "counterexample_loop.csv", loop, generator="search",
                  parameters=cfg.to_dict(), seed=cfg.seed)
        print(f"search: VIOLATION candidate persisted at 4n; serialized to "
              f"{out / 'counterexample_loop.csv'}", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------- loop-io

def _cmd_loop_io(args) -> int:
    if args.action == "export":
        gen = args.generator
        if gen == "bloch-circle":
            loop = bloch_circle(args.theta, args.n)
            params = {"theta": args.theta, "n": args.n}
        elif gen == "great-circle":
            axis = [float(x) for x in args.axis.split(",")]
            loop = great_circle(axis, args.n, turns=args.turns)
            params = {"axis": axis, "n": args.n, "turns": args.turns}
        elif gen == "spherical-polygon":
            loop = spherical_polygon(args.vertices, args.theta, args.n_per_edge)
            params = {"vertices": args.vertices, "theta": args.theta,
                      "n_per_edge": args.n_per_edge}
        elif gen == "fourier-random":
            spec = random_fourier_spec(args.m, args.k, args.n, args.seed)
            loop = fourier_loop(spec)
            params = {"m": args.m, "k": args.k, "n": args.n}
        else:
            raise _UsageError(f"unknown generator {gen!r}")
        save_loop(args.file, loop, generator=gen, parameters=params,
                  seed=getattr(args, "seed", None))
        print(f"loop-io: wrote {args.file} ({loop.n} states, dim {loop.dim})")
        return 0

    loop, meta = load_loop(args.file)
    parts = split_self_intersections(loop) if args.split else [loop]
    summaries = [summarize(p) for p in parts]
    doc = {"meta": meta, "n": loop.n, "dim": loop.dim, "subloops": []}
    for s in summaries:
        doc["subloops"].append({
            "n": s.n_segments, "d_fs": s.d_fs, "gamma_b": s.gamma_b,
            "weak_margin": weak_qii(s).margin,
            "strong_margin": strong_qii(s, conjecture=loop.dim > 2).margin,
        })
    print(json.dumps(doc, sort_keys=True, indent=2))
    return 0


# ---------------------------------------------------------------- parser

def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def build_parser():
    parser = _Parser(prog="qii",
                     description="quantum isoperimetric inequality toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)
    by_name = {}

    p = by_name["verify"] = subs.add_parser(
        "verify", help="random-loop inequality property suite")
    p.add_argument("--m", type=int, required=True, help="Hilbert-space dimension")
    p.add_argument("--loops", type=int, default=1000)
    p.add_argument("--k", type=int, default=2, help="harmonic cutoff")
    p.add_argument("--n", type=int, default=2048, help="loop resolution")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strong", action="store_true",
                   help="also check the strong QII on split sub-loops")
    p.set_defaults(func=_cmd_verify)

    p = by_name["figure1"] = subs.add_parser(
        "figure1", help="planar and spherical polygon quotient tables")
    p.add_argument("--theta", type=float, default=np.pi / 4)
    p.add_argument("--n-list", type=_int_list, default=[3, 4, 6, 10000])
    p.add_argument("--n-per-edge", type=int, default=64)
    p.set_defaults(func=_cmd_figure1)

    p = by_name["models"] = subs.add_parser(
        "models", help="Brillouin-zone / Fermi-surface loop summaries")
    _add_model_flags(p)
    p.add_argument("--band", default="lower", choices=["lower", "upper"])
    p.add_argument("--nk", type=int, default=2048)
    p.add_argument("--ef", type=float, default=1.0, help="Fermi energy (2D models)")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=_cmd_models)

    p = by_name["apps"] = subs.add_parser(
        "apps", help="physical bound chains")
    p.add_argument("--app", required=True,
                   choices=["wannier", "speed", "eph", "sfweight"])
    _add_model_flags(p)
    p.add_argument("--band", default="lower", choices=["lower", "upper"])
    p.add_argument("--nk", type=int, default=256)
    p.add_argument("--ef", type=float, default=1.0)
    p.add_argument("--u", type=float, default=1.0, help="Hubbard interaction")
    p.add_argument("--nu", type=float, default=0.5, help="filling factor")
    p.add_argument("--theta-c", type=float, default=np.pi / 3, help="cone angle")
    p.add_argument("--ratio", type=float, default=50.0,
                   help="drive period / Larmor period")
    p.add_argument("--steps", type=int, default=20000)
    p.set_defaults(func=_cmd_apps)

    p = by_name["search"] = subs.add_parser(
        "search", help="derivative-free strong-QII conjecture probe")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--budget", type=int, default=10000)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=_int_list, default=None,
                   help="run one search per seed and merge (resume path)")
    p.add_argument("--coeff-bound", type=float, default=1.5)
    p.set_defaults(func=_cmd_search)

    p = by_name["loop-io"] = subs.add_parser(
        "loop-io", help="import/export loop CSV files")
    p.add_argument("action", choices=["export", "import"])
    p.add_argument("file", help="loop CSV path")
    p.add_argument("--generator", default="bloch-circle",
                   choices=["bloch-circle", "great-circle", "spherical-polygon",
                            "fourier-random"])
    p.add_argument("--theta", type=float, default=np.pi / 4)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--axis", default="0,0,1")
    p.add_argument("--turns", type=int, default=1)
    p.add_argument("--vertices", type=int, default=3)
    p.add_argument("--n-per-edge", type=int, default=64)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", action="store_true")
    p.set_defaults(func=_cmd_loop_io)

    for name, sub in by_name.items():
        sub.add_argument("--out", default="qii-out",
                         help="output directory for tables and manifests")
        sub.add_argument("--config", default=None,
                         help="JSON file with default values for these flags")
    return parser, by_name


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, by_name = build_parser()
    try:
        command = next((tok for tok in argv if not tok.startswith("-")), None)
        if "--config" in argv:
            cfg_path = argv[argv.index("--config") + 1]
            defaults = json.loads(Path(cfg_path).read_text(encoding="utf-8"))
            if command in by_name:
                valid = {a.dest for a in by_name[command]._actions}
                unknown = set(defaults) - valid
                if unknown:
                    raise _UsageError(f"unknown config keys: {sorted(unknown)}")
                by_name[command].set_defaults(**defaults)
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except IndexError:
        print("usage error: --config needs a file path", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (QiiError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
