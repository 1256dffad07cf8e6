"""Command-line surface: reproducible experiment runs with manifest output.

Subcommands
-----------
lyap-scan      torus-line scan of all radial-coefficient computations
henon-diagram  two-parameter bifurcation diagram data and figure
henon-circle   invariant-circle sweep across the torus line
nf-lc          radial coefficients of one jet (preset or JSON file)
cycle-verify   heteroclinic-model convergence study against its target

Every command writes its data files plus a ``*_manifest.json`` recording
the resolved configuration, a hash of it, and the content hashes of all
outputs; rerunning an identical invocation reproduces every non-manifest
byte and every manifest field except the timestamp.

Exit codes: 0 success, 2 usage errors, 3 validation failures (bad values,
failed preconditions, failed config checks), 4 numerical failures (Newton
breakdown, precision-cap refusals, orbit escapes from their domains).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import math
import os
import sys

import numpy as np

from . import __version__
from . import henon as henon_mod
from ._io import SvgFigure, csv_text, fmt_float, json_text, sha256_hex, write_text
from .circles import DetectOptions, SweepEntry, detect_repelling, ns_sweep
from .cycle import (
    CycleModelError,
    InadmissibleError,
    ItineraryError,
    NewtonError,
    OrientationError,
    PrecisionError,
    TargetBoxError,
    config_from_toml,
    convergence_study,
    default_config,
    validate,
)
from .henon import (
    HenonParams,
    PoleError,
    SaddleNodeBoundaryError,
    diagram_data,
    fixed_points,
    henon_adapted_jet,
    lomega_scan,
)
from .jets import JetError, UnitMultiplier, jet_from_json
from .normalform import (
    ResonanceError,
    lc_direct,
    lc_oracle,
    lc_partial_incorrect,
)

__all__ = ["main"]

_NUMERICAL_ERRORS = (
    PrecisionError,
    NewtonError,
    ItineraryError,
    SaddleNodeBoundaryError,
    ArithmeticError,
    np.linalg.LinAlgError,
)
_VALIDATION_ERRORS = (
    TargetBoxError,
    OrientationError,
    InadmissibleError,
    CycleModelError,
    ResonanceError,
    PoleError,
    JetError,
    ValueError,
    OSError,
)


class _ValidationFailure(Exception):
    """Config validation produced FAIL items; message carries the report."""


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _emit(out_dir: str, name: str, text: str, outputs: list[dict]) -> str:
    path = os.path.join(out_dir, name)
    digest = write_text(path, text)
    outputs.append({"file": name, "sha256": digest, "bytes": len(text.encode("utf-8"))})
    return path


def _write_manifest(
    out_dir: str, command: str, config: dict, outputs: list[dict], results: dict
) -> None:
    body = {
        "command": command,
        "version": __version__,
        "configuration": config,
        "input_hash": sha256_hex(json_text(config)),
        "outputs": outputs,
        "results": results,
    }
    manifest = dict(body, timestamp=_timestamp())
    name = command.replace("-", "_") + "_manifest.json"
    write_text(os.path.join(out_dir, name), json_text(manifest))


def _common_config(args: argparse.Namespace) -> dict:
    # out_dir is deliberately omitted: it names a location, not an input, and
    # the manifest hash must be identical for reruns into different folders.
    return {
        "threads": args.threads,
        "seed": args.seed,
        "extended_precision": bool(args.extended_precision),
    }


# --------------------------------------------------------------------------
# subcommands


def _cmd_lyap_scan(args: argparse.Namespace) -> int:
    scan = lomega_scan(args.samples)
    columns = ["psi", "m1", "lc_closed", "lc_direct", "lc_oracle", "lc_incorrect"]
    rows = [
        (r.psi, r.m1, r.lc_closed, r.lc_direct, r.lc_oracle, r.lc_incorrect)
        for r in scan.rows
    ]
    identity_all_pass = all(
        abs(r.lc_direct - r.lc_closed) <= 1e-10 for r in scan.rows
    )
    outputs: list[dict] = []
    _emit(
        args.out_dir,
        args.out,
        csv_text(columns, rows, "torus-line radial-coefficient scan"),
        outputs,
    )

    fig = SvgFigure(0.0, math.pi, -1.0, 1.0, title="radial coefficient on the torus line")
    segment: list[tuple[float, float]] = []
    gap_set = sorted(scan.gaps)
    b_idx = 0
    for r in scan.rows:
        while b_idx < len(gap_set) and r.psi > gap_set[b_idx]:
            fig.polyline(segment, color="steelblue")
            segment = []
            b_idx += 1
        segment.append((r.psi, max(-1.0, min(1.0, r.lc_closed))))
    fig.polyline(segment, color="steelblue")
    for gap in scan.gaps:
        fig.annotate(gap, 0.9, f"gap psi={gap:.4f}")
    _emit(args.out_dir, "lyap_scan.svg", fig.render("psi", "coefficient"), outputs)

    results = {
        "rows": len(rows),
        "gaps": [fmt_float(g) for g in scan.gaps],
        "identity_all_pass": identity_all_pass,
    }
    config = dict(_common_config(args), samples=args.samples, out=args.out)
    _write_manifest(args.out_dir, "lyap-scan", config, outputs, results)
    print(f"lyap-scan: {len(rows)} rows, identity_all_pass={identity_all_pass}")
    return 0


def _cmd_henon_diagram(args: argparse.Namespace) -> int:
    lo, hi = args.m2_range
    data = diagram_data((lo, hi), args.resolution)
    columns = ["curve", "m1", "m2"]
    rows: list[tuple] = []
    for name, arr in (("L+", data.lplus), ("L-", data.lminus), ("Lomega", data.lomega)):
        rows.extend((name, float(a), float(b)) for a, b in arr)
    outputs: list[dict] = []
    _emit(
        args.out_dir,
        "henon_diagram.csv",
        csv_text(columns, rows, "fixed-point bifurcation curves"),
        outputs,
    )

    m1_lo = min(float(data.lplus[:, 0].min()), -1.5)
    m1_hi = max(float(data.lminus[:, 0].max()), 3.5)
    fig = SvgFigure(m1_lo, m1_hi, lo, hi, title="fixed-point bifurcation diagram")
    fig.polyline([(a, b) for a, b in data.lplus], color="darkorange")
    fig.polyline([(a, b) for a, b in data.lminus], color="seagreen")
    fig.polyline([(a, b) for a, b in data.lomega], color="steelblue")
    for label, m1, m2 in data.markers:
        fig.marker(m1, m2, label)
    _emit(args.out_dir, "henon_diagram.svg", fig.render("m1", "m2"), outputs)

    results = {"markers": [label for label, _, _ in data.markers], "rows": len(rows)}
    config = dict(
        _common_config(args), m2_range=[lo, hi], resolution=args.resolution
    )
    _write_manifest(args.out_dir, "henon-diagram", config, outputs, results)
    print(f"henon-diagram: {len(rows)} curve samples, markers {results['markers']}")
    return 0


def _sweep_rows(entries: list[SweepEntry]) -> list[tuple]:
    rows = []
    for e in entries:
        r = e.report
        rows.append(
            (
                e.delta,
                r.verdict,
                r.mean_radius,
                r.thickness_ratio,
                r.rotation_number,
                r.contraction_rate,
            )
        )
    return rows


def _cmd_henon_circle(args: argparse.Namespace) -> int:
    deltas = [float(tok) for tok in args.deltas.split(",") if tok.strip()]
    if not deltas:
        raise ValueError("empty delta list")
    opts = DetectOptions()
    if args.repelling:
        entries = []
        for delta in deltas:
            params = HenonParams(args.m1, 1.0 + delta)
            seed = fixed_points(params)["plus"].location + np.array([1e-3, 0.0])
            report = detect_repelling(
                lambda pt, p=params: henon_mod.apply(p, pt),
                lambda pt, p=params: henon_mod.inverse(p, pt),
                seed,
                opts,
            )
            entries.append(SweepEntry(delta=delta, report=report))
        pattern_ok = None
    else:
        entries, pattern_ok = ns_sweep(args.m1, deltas, opts)
    columns = [
        "delta",
        "verdict",
        "mean_radius",
        "thickness_ratio",
        "rotation_number",
        "contraction_rate",
    ]
    outputs: list[dict] = []
    _emit(
        args.out_dir,
        "henon_circle.csv",
        csv_text(columns, _sweep_rows(entries), f"circle sweep at m1={fmt_float(args.m1)}"),
        outputs,
    )
    results = {
        "verdicts": {fmt_float(e.delta): e.report.verdict for e in entries},
        "sidedness_pattern_ok": pattern_ok,
    }
    config = dict(
        _common_config(args), m1=args.m1, deltas=deltas, repelling=bool(args.repelling)
    )
    _write_manifest(args.out_dir, "henon-circle", config, outputs, results)
    for e in entries:
        print(f"henon-circle: delta={e.delta:+.4g} -> {e.report.verdict}")
    return 0


def _cmd_nf_lc(args: argparse.Namespace) -> int:
    if args.jet is not None:
        with open(args.jet, "r", encoding="utf-8") as fh:
            jet = jet_from_json(fh.read())
    elif args.preset == "henon":
        jet = henon_adapted_jet(args.psi)
    else:
        raise ValueError(f"unknown preset {args.preset!r}")
    mult = UnitMultiplier(args.psi)
    values = {
        "direct": lc_direct(jet, mult),
        "oracle": lc_oracle(jet, mult),
        "partial_incorrect": lc_partial_incorrect(jet, mult),
    }
    payload = {
        "psi": args.psi,
        "multiplier": [mult.nu.real, mult.nu.imag],
        "coefficients": {
            name: {
                "alpha": [lv.alpha.real, lv.alpha.imag],
                "lc": lv.lc,
                "method": lv.method,
            }
            for name, lv in values.items()
        },
    }
    outputs: list[dict] = []
    _emit(args.out_dir, "nf_lc.json", json_text(payload), outputs)
    config = dict(
        _common_config(args), psi=args.psi, preset=args.preset, jet=args.jet
    )
    results = {name: lv.lc for name, lv in values.items()}
    _write_manifest(args.out_dir, "nf-lc", config, outputs, results)
    for name, lv in values.items():
        print(f"nf-lc: {name} lc = {fmt_float(lv.lc)}")
    return 0


def _cmd_cycle_verify(args: argparse.Namespace) -> int:
    cfg = config_from_toml(args.config) if args.config else default_config()
    report = validate(cfg)
    if not report.ok:
        raise _ValidationFailure(
            "configuration validation failed:\n" + str(report)
        )
    tokens = args.target.split(",")
    if len(tokens) != 2:
        raise ValueError(f"target must be 'm1,m2', got {args.target!r}")
    target = HenonParams(float(tokens[0]), float(tokens[1]))
    if args.ij_sequence != "auto":
        raise ValueError("only the 'auto' index sequence is implemented")
    rows = convergence_study(
        cfg, target, j_min=args.j_min, extended=bool(args.extended_precision)
    )
    if not rows:
        raise PrecisionError("no index pairs available below the precision cap")
    columns = [
        "i",
        "j",
        "m1",
        "m2",
        "mult_err",
        "det_err",
        "lc_sign",
        "circle_verdict",
        "tau",
    ]
    table = [
        (r.i, r.j, r.m1, r.m2, r.mult_err, r.det_err, r.lc_sign, r.circle_verdict, r.tau)
        for r in rows
    ]
    outputs: list[dict] = []
    _emit(
        args.out_dir,
        "cycle_verify.csv",
        csv_text(columns, table, "return-map convergence study"),
        outputs,
    )
    errors = [r.mult_err for r in rows]
    results = {
        "pairs": [[r.i, r.j] for r in rows],
        "final_mult_err": fmt_float(errors[-1]),
        "monotone_with_slack": all(
            b <= a * 1.1 + 1e-12 for a, b in zip(errors, errors[1:])
        ),
        "circle_verdicts": [r.circle_verdict for r in rows],
        "validation": [str(item) for item in report.items],
    }
    config = dict(
        _common_config(args),
        config=args.config,
        target=[target.m1, target.m2],
        ij_sequence=args.ij_sequence,
        j_min=args.j_min,
    )
    _write_manifest(args.out_dir, "cycle-verify", config, outputs, results)
    for r in rows:
        print(
            f"cycle-verify: (i,j)=({r.i},{r.j}) mult_err={r.mult_err:.3e} "
            f"det_err={r.det_err:.3e} lc_sign={r.lc_sign:+d} circle={r.circle_verdict}"
        )
    return 0


# --------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=".", help="output directory")
    common.add_argument(
        "--threads", type=int, default=1, help="worker budget (recorded; sweeps run ordered)"
    )
    common.add_argument(
        "--seed", type=int, default=0, help="seed for randomized corpora (recorded)"
    )
    common.add_argument(
        "--extended-precision",
        action="store_true",
        help="lift the cancellation cap using 50-digit arithmetic",
    )

    parser = argparse.ArgumentParser(
        prog="bifkit", description="bifurcation toolkit experiment runner"
    )
    parser.add_argument("--version", action="version", version=f"bifkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lyap-scan", parents=[common], help="torus-line coefficient scan")
    p.add_argument("--samples", type=int, default=200, help="grid size (>= 2)")
    p.add_argument("--out", default="lyap_scan.csv", help="CSV file name")
    p.set_defaults(fn=_cmd_lyap_scan)

    p = sub.add_parser(
        "henon-diagram", parents=[common], help="two-parameter bifurcation diagram"
    )
    p.add_argument(
        "--m2-range", type=float, nargs=2, default=[-1.5, 1.5], metavar=("LO", "HI")
    )
    p.add_argument("--resolution", type=int, default=256)
    p.set_defaults(fn=_cmd_henon_diagram)

    p = sub.add_parser("henon-circle", parents=[common], help="invariant-circle sweep")
    p.add_argument("--m1", type=float, required=True)
    p.add_argument(
        "--deltas",
        default="0.005,0.01,0.02,0.04",
        help="comma list of m2-1; write --deltas=-0.01,... when the list starts negative",
    )
    p.add_argument("--repelling", action="store_true", help="probe in reverse time")
    p.set_defaults(fn=_cmd_henon_circle)

    p = sub.add_parser("nf-lc", parents=[common], help="radial coefficients of one jet")
    p.add_argument("--psi", type=float, required=True, help="rotation angle in (0, pi)")
    p.add_argument("--preset", default="henon", help="built-in jet preset")
    p.add_argument("--jet", default=None, help="jet JSON file (overrides preset)")
    p.set_defaults(fn=_cmd_nf_lc)

    p = sub.add_parser(
        "cycle-verify", parents=[common], help="heteroclinic-model convergence study"
    )
    p.add_argument("--config", default=None, help="model config TOML")
    p.add_argument("--target", default="1.0,1.02", help="target 'm1,m2'")
    p.add_argument("--ij-sequence", default="auto")
    p.add_argument("--j-min", type=int, default=5)
    p.set_defaults(fn=_cmd_cycle_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "lyap-scan" and args.samples < 2:
        parser.error("--samples must be at least 2")
    if args.command == "henon-diagram" and not args.m2_range[0] < args.m2_range[1]:
        parser.error("--m2-range must be increasing")
    os.makedirs(args.out_dir, exist_ok=True)
    try:
        return args.fn(args)
    except _ValidationFailure as exc:
        print(str(exc), file=sys.stderr)
        return 3
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except _VALIDATION_ERRORS as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover - exercised via the console script
    sys.exit(main())
