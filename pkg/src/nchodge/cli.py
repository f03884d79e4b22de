"""Command line entry points.

    nchodge <command> [options]

Reports are JSON (stdout by default, ``--out`` for a file); most commands
can also emit a flat CSV table with ``--csv``.  Exit codes: 0 on success,
1 for input problems (bad file, unknown name, malformed JSON), 2 when the
computation ran but an invariant check failed -- in that case the report
is still written so the failure can be inspected.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import reporting
from .algebra import BUILTIN_ALGEBRAS, builtin_algebra, load_algebra
from .errors import InputError, NCHodgeError
from .foliation import (BUILTIN_MODELS, PHI_PROFILES, builtin_model,
                        load_model, model_to_json, random_smooth_phi,
                        witten_betti_sweep)
from .forms import build_window, operator_matrices, window_identity_residuals
from .gv import gv_report
from .hodge import (abelian_cs_partition, hodge_package, laplacian_spectra,
                    load_complex, rs_torsion)
from .morse import BUILTIN_CHARTS, builtin_chart, morse_scan
from .scalars import MODES, RATIONAL
from .selftest import SelftestConfig, run_all
from .spectral import spectral_report


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; 2 is reserved for invariant
    # failures here, so route usage errors to exit code 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _bundled(name):
    candidate = resources.files("nchodge").joinpath("data", name)
    if candidate.is_file():
        return candidate
    if not name.endswith(".json"):
        candidate = resources.files("nchodge").joinpath("data", name + ".json")
        if candidate.is_file():
            return candidate
    return None


def _bundled_names():
    root = resources.files("nchodge").joinpath("data")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def _load_json_source(value, what):
    """Resolve a CLI file argument: real path first, then bundled data."""
    path = Path(value)
    if path.is_file():
        with open(path) as fh:
            data = json.load(fh)
        return data, path.stem
    found = _bundled(value)
    if found is not None:
        data = json.loads(found.read_text())
        return data, Path(found.name).stem
    raise InputError(
        f"cannot find {what} {value!r}: neither a file nor bundled data",
        available=_bundled_names())


def _algebra_arg(value, scalar_mode):
    if value in BUILTIN_ALGEBRAS:
        return builtin_algebra(value, scalar_mode)
    data, stem = _load_json_source(value, "algebra")
    data.setdefault("name", stem)
    return load_algebra(data, scalar_mode)


def _complex_arg(value):
    data, stem = _load_json_source(value, "complex")
    data.setdefault("name", stem)
    return load_complex(data)


def _model_arg(value):
    if value in BUILTIN_MODELS:
        return builtin_model(value)
    data, stem = _load_json_source(value, "model")
    data.setdefault("name", stem)
    return load_model(data)


def _parse_taus(values):
    if not values:
        return (0.0, 0.5, 1.0, 2.0, 5.0)
    taus = []
    for chunk in values:
        for part in str(chunk).split(","):
            part = part.strip()
            if part:
                taus.append(float(part))
    if not taus:
        raise InputError("no usable tau values given")
    return tuple(taus)


def _emit(args, report):
    out = getattr(args, "out", None)
    if out:
        reporting.write_json(out, report)
        print(f"report written to {out}")
    else:
        sys.stdout.write(reporting.json_bytes(report).decode())


def _emit_csv(args, table):
    path = getattr(args, "csv", None)
    if path and table:
        rows, fieldnames = table
        reporting.write_csv(path, rows, fieldnames)
        print(f"table written to {path}")


def _emit_error(entry):
    payload = {"schema": reporting.SCHEMA_VERSION, "kind": "error", **entry}
    sys.stderr.write(reporting.json_bytes(payload).decode())


# -- command handlers: return (report, passed, csv table or None) ------------

def _cmd_nc_report(args):
    algebra = _algebra_arg(args.algebra, args.scalar)
    window = build_window(algebra, args.nmax)
    residuals = window_identity_residuals(window)
    identities = {
        key: [{"degree": d, "exact_zero": flag, "max_abs": val}
              for d, flag, val in rows]
        for key, rows in residuals.items()}
    ok = all(flag or val < 1e-12
             for rows in residuals.values() for _, flag, val in rows)
    body = {"algebra": algebra.name,
            "scalars": args.scalar,
            "n_max": args.nmax,
            "degree_dims": list(window.degree_dims),
            "identities": identities,
            "passed": ok}
    if max(window.degree_dims) <= 48:
        body["basis_labels"] = {
            str(n): [window.word_label(wrd) for wrd in window.bases[n]]
            for n in range(args.nmax + 1)}
    if args.matrices or max(window.degree_dims) <= 12:
        ops = operator_matrices(window)
        body["matrices"] = {
            opname: {str(n): window.field.matrix_to_json(block)
                     for n, block in ops[opname].blocks.items()}
            for opname in ("d", "b", "k")}
    csv_rows = [{"identity": key, "degree": r["degree"],
                 "exact_zero": r["exact_zero"], "max_abs": r["max_abs"]}
                for key, rows in identities.items() for r in rows]
    table = (csv_rows, ["identity", "degree", "exact_zero", "max_abs"])
    return reporting.make_report("nc-report", body), ok, table


def _cmd_spectral(args):
    algebra = _algebra_arg(args.algebra, args.scalar)
    window = build_window(algebra, args.nmax)
    rep = spectral_report(window,
                          cluster_tol=args.cluster_tol,
                          root_tol=args.root_tol,
                          rank_tol=args.rank_tol,
                          crt_vs_eig_tol=args.crt_tol)
    rows = [{"degree": r["degree"], "dim": r["dim"], "rank_P": r["rank_P"],
             "rank_one_minus_k_squared": r["rank_one_minus_k_squared"],
             "rank_split_ok": r["rank_split_ok"], "crt_vs_eig": r["crt_vs_eig"],
             "passed": r["passed"]} for r in rep["degrees"]]
    table = (rows, ["degree", "dim", "rank_P", "rank_one_minus_k_squared",
                    "rank_split_ok", "crt_vs_eig", "passed"])
    return reporting.make_report("spectral", rep), rep["passed"], table


def _cmd_hodge(args):
    cx = _complex_arg(args.complex)
    body = hodge_package(cx, rel_tol=args.rel_tol)
    rows = [{"degree": k, "dim": body["dims"][k], "betti": body["betti"][k],
             "det_prime": body["det_prime"][k]}
            for k in range(len(body["dims"]))]
    table = (rows, ["degree", "dim", "betti", "det_prime"])
    return reporting.make_report("hodge", body), True, table


def _cmd_torsion(args):
    cx = _complex_arg(args.complex)
    body = rs_torsion(cx, rel_tol=args.rel_tol)
    body["name"] = cx.name
    body["dims"] = list(cx.dims)
    spectra = laplacian_spectra(cx)
    body["spectra"] = [[float(v) for v in s] for s in spectra]
    if args.out:
        print(f"log torsion {body['log_torsion']:.12g}, "
              f"torsion {body['torsion']:.12g}")
    rows = [{"degree": k, "index": i, "eigenvalue": float(v)}
            for k, s in enumerate(spectra) for i, v in enumerate(s)]
    table = (rows, ["degree", "index", "eigenvalue"])
    return reporting.make_report("torsion", body), True, table


def _cmd_cs_partition(args):
    cx = _complex_arg(args.complex)
    body = abelian_cs_partition(cx, rel_tol=args.rel_tol)
    body["name"] = cx.name
    if args.out:
        print(f"log Z {body['log_Z']:.12g}, Z {body['Z']:.12g}")
    rows = [{"degree": k, "det_prime": body["det_prime"][k],
             "log_det_prime": body["log_det_prime"][k]} for k in (0, 1)]
    table = (rows, ["degree", "det_prime", "log_det_prime"])
    return reporting.make_report("cs-partition", body), True, table


def _cmd_witten_sweep(args):
    model = _model_arg(args.model)
    if args.phi == "random":
        phi = random_smooth_phi(np.random.default_rng(args.seed),
                                modes=1, amplitude=0.3)
    elif args.phi in PHI_PROFILES:
        phi = args.phi
    else:
        raise InputError(f"unknown phi profile {args.phi!r}",
                         available=sorted(PHI_PROFILES) + ["random"])
    taus = _parse_taus(args.tau)
    rep = witten_betti_sweep(model, phi, taus, rel_tol=args.rel_tol)
    rep["model_spec"] = model_to_json(model)
    rows = [{"tau": r["tau"], "betti": r["betti"],
             "matches_base": r["matches_base"],
             "intertwiner_ranks": r["intertwiner_ranks"],
             "ranks_ok": r["intertwiner_ranks_ok"]} for r in rep["rows"]]
    table = (rows, ["tau", "betti", "matches_base", "intertwiner_ranks",
                    "ranks_ok"])
    return reporting.make_report("witten-sweep", rep), rep["passed"], table


def _cmd_morse_scan(args):
    if args.chart not in BUILTIN_CHARTS:
        raise InputError(f"unknown chart {args.chart!r}",
                         available=sorted(BUILTIN_CHARTS))
    rep = morse_scan(builtin_chart(args.chart), n_h=args.n_h, n_v=args.n_v,
                     tol=args.tol)
    rows = [{"index": f["index"], "h_mean": f["h_mean"], "h_min": f["h_min"],
             "h_max": f["h_max"], "v_first": f["v_first"],
             "v_last": f["v_last"], "count": f["count"]}
            for f in rep["families"]]
    table = (rows, ["index", "h_mean", "h_min", "h_max", "v_first", "v_last",
                    "count"])
    return reporting.make_report("morse-scan", rep), rep["passed"], table


def _cmd_gv(args):
    source = args.omega
    if source not in ("dz", "sin-z", "x-dy"):
        data, _ = _load_json_source(source, "defining form")
        missing = [c for c in ("x", "y", "z") if c not in data]
        if missing:
            raise InputError(f"defining form file lacks components {missing}")
        source = {c: np.asarray(data[c], dtype=float) for c in ("x", "y", "z")}
    rep = gv_report(source, n=args.n, derivative=args.derivative,
                    tol=args.tol, gauge_tol=args.gauge_tol)
    rows = [{"omega": rep["omega"], "n": rep["n"], "gv": rep["gv"],
             "integrability_max_abs": rep["integrability_max_abs"],
             "gauge_residual": rep["gauge_residual"], "passed": rep["passed"]}]
    table = (rows, ["omega", "n", "gv", "integrability_max_abs",
                    "gauge_residual", "passed"])
    return reporting.make_report("gv", rep), rep["passed"], table


def _cmd_selftest(args):
    config = SelftestConfig(seed=args.seed,
                            random_triples=args.triples,
                            random_complexes=args.complexes,
                            gv_grid=args.gv_grid,
                            budget_seconds=args.budget)
    report, lines, _total = run_all(config)
    for line in lines:
        print(line)
    if args.out:
        reporting.write_json(args.out, report)
        print(f"report written to {args.out}")
    rows = [{"id": r["id"], "name": r["name"], "passed": r["passed"],
             "headline": r["headline"]} for r in report["criteria"]]
    _emit_csv(args, (rows, ["id", "name", "passed", "headline"]))
    return report, report["passed"], None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nchodge",
                     description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def add_algebra_flags(p):
        p.add_argument("--algebra", required=True,
                       help="stock algebra name (%s) or JSON file"
                            % ", ".join(sorted(BUILTIN_ALGEBRAS)))
        p.add_argument("--nmax", type=int, default=4,
                       help="top form degree of the window (default 4)")
        p.add_argument("--scalar", choices=list(MODES), default=RATIONAL,
                       help="scalar mode (default rational)")

    def add_output_flags(p):
        p.add_argument("--out", help="write the JSON report here "
                                     "instead of stdout")
        p.add_argument("--csv", help="also write a flat CSV table here")

    p = sub.add_parser("nc-report", help="window dimensions, basis labels, "
                       "operator identities (and small matrices)")
    add_algebra_flags(p)
    p.add_argument("--matrices", action="store_true",
                   help="include operator matrices regardless of size")
    add_output_flags(p)
    p.set_defaults(handler=_cmd_nc_report)

    p = sub.add_parser("spectral", help="harmonic projection, Green's "
                       "operator, and the full per-degree invariant report")
    add_algebra_flags(p)
    p.add_argument("--cluster-tol", type=float, default=1e-8)
    p.add_argument("--root-tol", type=float, default=1e-6)
    p.add_argument("--rank-tol", type=float, default=1e-10)
    p.add_argument("--crt-tol", type=float, default=1e-10,
                   help="allowed gap between the exact and float projections")
    add_output_flags(p)
    p.set_defaults(handler=_cmd_spectral)

    p = sub.add_parser("hodge", help="Betti numbers, spectra, and "
                       "determinants of a finite cochain complex")
    p.add_argument("--complex", required=True, help="complex JSON file "
                   "or bundled name")
    p.add_argument("--rel-tol", type=float, default=1e-9)
    add_output_flags(p)
    p.set_defaults(handler=_cmd_hodge)

    p = sub.add_parser("torsion", help="analytic torsion from the "
                       "Laplacian spectra")
    p.add_argument("--complex", required=True)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    add_output_flags(p)
    p.set_defaults(handler=_cmd_torsion)

    p = sub.add_parser("cs-partition", help="abelian Chern-Simons one-loop "
                       "partition function from degrees 0 and 1")
    p.add_argument("--complex", required=True)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    add_output_flags(p)
    p.set_defaults(handler=_cmd_cs_partition)

    p = sub.add_parser("witten-sweep", help="deformed Betti numbers and "
                       "intertwiner ranks across a tau sweep")
    p.add_argument("--model", required=True,
                   help="model name (%s) or JSON file"
                        % ", ".join(sorted(BUILTIN_MODELS)))
    p.add_argument("--phi", default="cos-h",
                   help="leaf function: %s, or 'random' (seeded)"
                        % ", ".join(sorted(PHI_PROFILES)))
    p.add_argument("--tau", action="append",
                   help="tau values, repeatable or comma separated "
                        "(default 0,0.5,1,2,5)")
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    add_output_flags(p)
    p.set_defaults(handler=_cmd_witten_sweep)

    p = sub.add_parser("morse-scan", help="critical point families and "
                       "degeneracies of a leaf chart")
    p.add_argument("--chart", default="cos-h",
                   help="chart name: %s" % ", ".join(sorted(BUILTIN_CHARTS)))
    p.add_argument("--n-h", type=int, default=256)
    p.add_argument("--n-v", type=int, default=33)
    p.add_argument("--tol", type=float, default=1e-6)
    add_output_flags(p)
    p.set_defaults(handler=_cmd_morse_scan)

    p = sub.add_parser("gv", help="Godbillon-Vey quadrature for a "
                       "defining 1-form on the 3-torus grid")
    p.add_argument("--omega", default="sin-z",
                   help="dz, sin-z, x-dy, or a JSON file with x/y/z fields")
    p.add_argument("--n", type=int, default=32, help="grid points per axis")
    p.add_argument("--derivative", choices=("spectral", "central"),
                   default="spectral")
    p.add_argument("--tol", type=float, default=1e-8,
                   help="integrability tolerance")
    p.add_argument("--gauge-tol", type=float, default=1e-6)
    add_output_flags(p)
    p.set_defaults(handler=_cmd_gv)

    p = sub.add_parser("selftest", help="run the full invariant suite and "
                       "print a pass/fail table")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--triples", type=int, default=200,
                   help="random form triples per algebra")
    p.add_argument("--complexes", type=int, default=50,
                   help="random complexes for the decomposition check")
    p.add_argument("--gv-grid", type=int, default=32)
    p.add_argument("--budget", type=float, default=300.0,
                   help="time budget in seconds")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker hint; the suite currently runs in-process")
    add_output_flags(p)
    p.set_defaults(handler=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, ok, table = args.handler(args)
    except NCHodgeError as exc:
        _emit_error(exc.report_entry())
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        _emit_error({"code": "cli/InputError", "message": str(exc),
                     "context": {}})
        return 1
    except AssertionError as exc:
        # invariant failure mid-computation: still write what we know
        report = reporting.make_report("invariant-failure", {
            "command": args.command, "error": str(exc), "passed": False})
        _emit(args, report)
        return 2
    if args.handler is not _cmd_selftest:
        _emit(args, report)
        _emit_csv(args, table)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
