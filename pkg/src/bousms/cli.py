"""Command-line interface.

Exit statuses: 0 success, 1 numerical non-convergence, 2 input error,
3 blow-up during time integration.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import fileio
from . import msform, sim, travel
from . import spectralkit as sk
from .coeffs import PRESETS, classify_structure, classify_wellposedness, coefficients_from_mapping
from .errors import (BlowUpError, BousmsError, ConvergenceError, DegenerateError, DomainError,
                     StructureError, UnsupportedRegimeError)

EXIT_OK, EXIT_NONCONV, EXIT_INPUT, EXIT_BLOWUP = 0, 1, 2, 3


class InputError(Exception):
    """Malformed command-line input (exit 2)."""


# --- argument parsing -------------------------------------------------------

def load_model(source: str):
    """A preset name or a JSON file with coefficients (flat or under "coeffs")."""
    if source in PRESETS:
        return PRESETS[source]
    path = Path(source)
    if not path.is_file():
        raise InputError(f"model {source!r} is neither a preset {sorted(PRESETS)} nor a file")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON ({exc})") from None
    if isinstance(doc, dict) and isinstance(doc.get("coeffs"), dict):
        doc = doc["coeffs"]
    if not isinstance(doc, dict):
        raise InputError(f"{source}: expected a JSON object")
    try:
        return coefficients_from_mapping(doc)
    except DomainError as exc:
        raise InputError(f"{source}: {exc}") from None


def parse_speeds(text: str) -> list[float]:
    """'1.1,1.2' (list) or '1.02:1.2:10' (10 evenly spaced values, ends included)."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            n = int(count)
            if n < 1:
                raise ValueError("count must be >= 1")
            return [float(v) for v in np.linspace(float(start), float(stop), n)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"bad speed specification {text!r}: {exc}") from None


def parse_grid(text: str) -> sk.PeriodicGrid:
    try:
        L, n = text.split(",")
        return sk.PeriodicGrid(float(L), int(n))
    except (ValueError, DomainError) as exc:
        raise InputError(f"bad grid {text!r} (expected L,N): {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bousms", description="Boussinesq (a,b,c,d) systems: structure "
                                "checks, traveling waves and simulation.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="preset name or JSON file")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[common], help="structure and well-posedness report")
    sub.add_parser("ms-matrices", parents=[common], help="K, M and a gradient symmetry check")

    sp = sub.add_parser("spectrum", parents=[common], help="traveling-wave eigenvalues per speed")
    sp.add_argument("--cs", required=True, help="speeds: list a,b,c or range start:stop:count")

    tr = sub.add_parser("travel", parents=[common], help="solitary-wave profiles")
    tr.add_argument("--cs", help="speeds: list or range")
    tr.add_argument("--curve", help="speed range for a speed-amplitude table")
    tr.add_argument("--grid", help="L,N (default chosen from c_s)")

    si = sub.add_parser("simulate", parents=[common], help="time integration with diagnostics")
    si.add_argument("--grid", default="64,512", help="L,N (default 64,512)")
    si.add_argument("--dt", type=float, default=1e-3)
    si.add_argument("--T", type=float, default=10.0)
    si.add_argument("--observe-every", type=int, default=100)
    si.add_argument("--init", choices=("gaussian", "solitary"), default="gaussian")
    si.add_argument("--amp", type=float, default=0.3, help="gaussian pulse height")
    si.add_argument("--cs", default="1.1", help="solitary-wave speed for --init solitary")
    return p


# --- commands ---------------------------------------------------------------

def _emit(args, stem: str, doc, csv_table=None):
    """Print the document and, with --out, store it as JSON or CSV."""
    print(fileio.dumps(doc))
    if args.out is None:
        return
    out = Path(args.out)
    if args.format == "csv" and csv_table is not None:
        fileio.write_csv(out / f"{stem}.csv", *csv_table)
    else:
        fileio.write_json(out / f"{stem}.json", doc)


def cmd_classify(args) -> int:
    s = load_model(args.model)
    doc = {
        "coeffs": s.to_dict(),
        "structure": classify_structure(s).to_dict(),
        "wellposedness": classify_wellposedness(s).to_dict(),
    }
    flat = [("coeffs." + k, v) for k, v in doc["coeffs"].items()]
    for section in ("structure", "wellposedness"):
        for k, v in doc[section].items():
            flat.append((f"{section}.{k}", json.dumps(v) if isinstance(v, (list, tuple)) else v))
    _emit(args, "classify", doc, (["key", "value"], flat))
    return EXIT_OK


def cmd_ms_matrices(args) -> int:
    s = load_model(args.model)
    ms = msform.build_boussinesq_ms(s)
    rng = np.random.default_rng(0)
    asym = max(msform.jacobian_asymmetry(ms.gradient, rng.standard_normal(ms.dim))
               for _ in range(20))
    doc = {
        "names": list(ms.names),
        "K": ms.K.tolist(),
        "M": ms.M.tolist(),
        "K_skew_defect": float(np.max(np.abs(ms.K + ms.K.T))),
        "M_skew_defect": float(np.max(np.abs(ms.M + ms.M.T))),
        "gradient_asymmetry_max": asym,
    }
    print(fileio.dumps(doc))
    if args.out is not None:
        out = Path(args.out)
        if args.format == "csv":
            for name in ("K", "M"):
                fileio.write_csv(out / f"{name}.csv", ["row"] + list(ms.names),
                                 [[r] + list(row) for r, row in zip(ms.names, getattr(ms, name))])
        else:
            fileio.write_json(out / "ms_matrices.json", doc)
    return EXIT_OK


def _spectrum_row(s, c_s):
    try:
        rep = travel.eigen_classify(travel.TravelingWaveSetup(s, c_s))
    except DegenerateError as exc:
        return {"c_s": c_s, "eigenvalues": [], "classification": "Degenerate",
                "table1_prediction": travel.table1_prediction(s.a, s.b, s.d), "note": str(exc)}
    return {"c_s": c_s, **rep.to_dict()}


def cmd_spectrum(args) -> int:
    s = load_model(args.model)
    rows = [_spectrum_row(s, c) for c in parse_speeds(args.cs)]
    header = ["c_s"] + [f"lambda{i}_{p}" for i in range(1, 5) for p in ("re", "im")]
    header += ["classification", "table1_prediction"]
    table = []
    for r in rows:
        lam = [v for pair in r["eigenvalues"] for v in pair] or [None] * 8
        table.append([r["c_s"], *lam, r["classification"], r["table1_prediction"]])
    _emit(args, "spectrum", rows, (header, table))
    return EXIT_OK


def _solve_one(s, c_s, grid):
    setup = travel.TravelingWaveSetup(s, c_s)
    label = travel.eigen_classify(setup).classification
    if label == "Gen":
        return label, travel.solve_generalized(setup, grid)
    return label, travel.solve_classical(setup, grid)


def cmd_travel(args) -> int:
    s = load_model(args.model)
    if not args.cs and not args.curve:
        raise InputError("travel needs --cs and/or --curve")
    grid = parse_grid(args.grid) if args.grid else None
    out = Path(args.out or ".")
    status = EXIT_OK
    summary = []
    for i, c_s in enumerate(parse_speeds(args.cs) if args.cs else []):
        row = {"c_s": c_s, **_spectrum_row(s, c_s)}
        try:
            label, pair = _solve_one(s, c_s, grid)
        except (ConvergenceError, BousmsError) as exc:
            row.update(status=f"failed: {exc}")
            print(f"c_s={c_s:g}: {exc}", file=sys.stderr)
            status = EXIT_NONCONV
        else:
            path = fileio.write_csv(out / f"profile_{i:02d}.csv", ["x", "zeta", "u"],
                                    zip(pair.x, pair.zeta, pair.u))
            amp_z, amp_u = pair.amplitude
            row.update(status="ok", profile=path.name, amp_zeta=amp_z, amp_u=amp_u,
                       residual=pair.residual_norm, tail_amplitude=pair.tail_amplitude,
                       L=pair.grid.L, N=pair.grid.n)
        summary.append(row)
    if summary:
        keys = ["c_s", "classification", "table1_prediction", "status", "amp_zeta", "amp_u",
                "residual", "tail_amplitude", "profile"]
        if args.format == "csv":
            fileio.write_csv(out / "travel.csv", keys, [[r.get(k) for k in keys] for r in summary])
        else:
            fileio.write_json(out / "travel.json", summary)
        print(fileio.dumps([{k: r.get(k) for k in keys} for r in summary]))
    if args.curve:
        rows = travel.speed_amplitude_curve(s, parse_speeds(args.curve), grid)
        fileio.write_csv(out / "curve.csv", ["c_s", "amp_zeta", "amp_u", "residual", "status"],
                         [r.as_tuple() for r in rows])
        for r in rows:
            print(",".join(fileio.fmt(v) for v in r.as_tuple()))
        if any(r.status != "ok" for r in rows):
            status = EXIT_NONCONV
    return status


def _initial_state(args, s, grid):
    if args.init == "gaussian":
        x = grid.x
        return sim.FieldState(grid, args.amp * np.exp(-x**2 / 4.0), np.zeros(grid.n))
    c_s = parse_speeds(args.cs)[0]
    pair = travel.solve_classical(travel.TravelingWaveSetup(s, c_s), grid)
    return sim.FieldState(grid, pair.zeta, pair.u)


def cmd_simulate(args) -> int:
    s = load_model(args.model)
    grid = parse_grid(args.grid)
    out = Path(args.out or ".")
    state = _initial_state(args, s, grid)
    rows = []
    try:
        final = sim.integrate(s, state, args.T, args.dt,
                              observer=lambda d: rows.append(d.as_row()),
                              observe_every=args.observe_every)
        code = EXIT_OK
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        final, code = exc.last_state, EXIT_BLOWUP
    header = list(sim.ConservedDiagnostics.FIELDS)
    if args.format == "csv":
        fileio.write_csv(out / "diagnostics.csv", header, rows)
    else:
        fileio.write_json(out / "diagnostics.json", [dict(zip(header, r)) for r in rows])
    fileio.write_csv(out / "snapshot.csv", ["x", "eta", "u"], zip(final.grid.x, final.eta, final.u))
    fileio.write_json(out / "run.json", {
        "coeffs": s.to_dict(), "grid": {"L": grid.L, "N": grid.n}, "dt": args.dt, "T": args.T,
        "observe_every": args.observe_every, "init": args.init,
    })
    print(f"t={final.t:.6g} rows={len(rows)} out={out}")
    return code


COMMANDS = {
    "classify": cmd_classify,
    "ms-matrices": cmd_ms_matrices,
    "spectrum": cmd_spectrum,
    "travel": cmd_travel,
    "simulate": cmd_simulate,
}


def _thread_limit():
    raw = os.environ.get("BMS_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
        if n < 1:
            raise ValueError
    except ValueError:
        raise InputError(f"BMS_THREADS must be a positive integer, got {raw!r}") from None
    return n


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads = _thread_limit()
        if threads is None:
            return COMMANDS[args.command](args)
        from threadpoolctl import threadpool_limits
        with threadpool_limits(limits=threads):
            return COMMANDS[args.command](args)
    except (InputError, DomainError, StructureError, UnsupportedRegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except BousmsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONV


if __name__ == "__main__":
    sys.exit(main())
