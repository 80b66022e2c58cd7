"""Command-line front end.

Subcommands::

    photonpair report --scenario FILE [--out DIR] [--csv]
    photonpair wigner --scenario FILE --out DIR [--contour-level X]
    photonpair design MATERIAL {sgvm,agvm} LO:HI [--length MM] [--csv]
    photonpair scan --scenario FILE --out DIR [--lengths 1,2,5] [--bandwidths 3,5]

Exit status: 0 on success, 2 for usage or scenario errors, 3 when the
computation fails.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import design, gaussian, wigner
from . import io as pio
from .errors import PhotonPairError, ScenarioError
from .pipeline import load_scenario, run_pipeline

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPUTE = 3

WIGNER_FILES = {
    "cwf": "cwf.csv",
    "contour_numeric": "contour_numeric.csv",
    "contour_analytic": "contour_analytic.csv",
    "i_omega": "i_omega.csv",
    "i_t": "i_t.csv",
}


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _range(text):
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI in nm, got {text!r}")
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"empty wavelength range {text!r}")
    return lo, hi


def _config(args):
    cfg = load_scenario(args.scenario)
    changes = {}
    if getattr(args, "grid_n", None) is not None:
        n = args.grid_n
        if n < 64 or n & (n - 1):
            raise ScenarioError(f"--grid-n must be a power of two >= 64, got {n}", "grid_N")
        changes["grid_N"] = n
    if getattr(args, "contour_level", None) is not None:
        if not 0 < args.contour_level < 1:
            raise ScenarioError("--contour-level must lie in (0, 1)", "contour_level")
        changes["contour_level"] = args.contour_level
    return replace(cfg, **changes) if changes else cfg


def _out_dir(args, cfg):
    out = args.out or cfg.output_dir
    return Path(out) if out else None


def cmd_report(args):
    cfg = _config(args)
    res = run_pipeline(cfg)
    out = _out_dir(args, cfg)
    files = {}
    if out is not None and args.csv and res.entanglement is not None:
        files["schmidt"] = str(pio.write_schmidt(out / "schmidt.csv", res.decomposition.eigenvalues,
                                                 limit=64))
    report = res.report(files)
    if out is not None:
        pio.write_json(out / "report.json", report)
    if args.json or out is None:
        sys.stdout.write(pio.dumps_json(report))
    return EXIT_OK


def analytic_time_offset(report: gaussian.GaussianReport, frame="center"):
    """Where the Gaussian-model photon sits on the numeric time axis.

    The centre-frame PMF is real, so the photon is centred on t = 0.  The
    exit-frame phase exp(i tau_s nu / 2) delays it to -T under the e^{+i w t}
    kernel used for W.
    """
    return 0.0 if frame == "center" else -report.t_shift


def analytic_contour(report: gaussian.GaussianReport, level, n=256, frame="center"):
    """Contour of the Gaussian CWF on a window of +-4 widths around its peak."""
    t0 = analytic_time_offset(report, frame)
    omega = report.omega_c - report.omega_shift + np.linspace(-4, 4, n) * report.delta_omega
    t = t0 + np.linspace(-4, 4, n) * report.delta_t
    return wigner.contour_e1(gaussian.analytic_cwf(report, omega, t, t0=t0), level)


def cmd_wigner(args):
    cfg = replace(_config(args), numerical=True, schmidt=False, joint_temporal=False)
    out = _out_dir(args, cfg)
    if out is None:
        raise UsageError("wigner needs --out DIR (or output_dir in the scenario)")
    res = run_pipeline(cfg)
    level = cfg.contour_level
    files = {}
    files["cwf"] = pio.write_cwf(out / WIGNER_FILES["cwf"], wigner.crop_cwf(res.cwf))
    files["contour_numeric"] = pio.write_contours(out / WIGNER_FILES["contour_numeric"],
                                                  wigner.contour_e1(res.cwf, level))
    if res.gaussian is not None:
        files["contour_analytic"] = pio.write_contours(out / WIGNER_FILES["contour_analytic"],
                                                       analytic_contour(res.gaussian, level,
                                                                        frame=cfg.pmf_frame))
    files["i_omega"] = pio.write_profile(out / WIGNER_FILES["i_omega"], res.i_omega, "omega_THz")
    files["i_t"] = pio.write_profile(out / WIGNER_FILES["i_t"], res.i_t, "t_fs")
    report = res.report({k: str(v) for k, v in files.items()})
    pio.write_json(out / "report.json", report)
    if args.json:
        sys.stdout.write(pio.dumps_json(report))
    return EXIT_OK


def cmd_design(args):
    cond = args.condition.lower()
    if cond == "sgvm":
        sol = design.find_sgvm(args.material, args.range, length=args.length)
    else:
        sol = design.find_agvm(args.material, args.range, length=args.length)
    row = sol.to_dict()
    if args.csv:
        keys = list(row)
        sys.stdout.write(",".join(keys) + "\n" + ",".join(str(row[k]) for k in keys) + "\n")
    else:
        sys.stdout.write(pio.dumps_json(row))
    return EXIT_OK


def cmd_scan(args):
    cfg = _config(args)
    out = _out_dir(args, cfg)
    if out is None:
        raise UsageError("scan needs --out DIR (or output_dir in the scenario)")
    table = design.scan(cfg, args.lengths, args.bandwidths, threads=args.threads)
    csv_path, meta_path = pio.write_scan(out / "scan.csv", table)
    if args.json:
        sys.stdout.write(pio.dumps_json({"records": table.records, "metadata": table.metadata}))
    else:
        sys.stdout.write(f"{csv_path}\n{meta_path}\n")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="photonpair",
                                description="Heralded PDC single-photon source analysis.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scenario=True):
        if scenario:
            sp.add_argument("--scenario", required=True, type=Path, help="scenario file")
            sp.add_argument("--grid-n", type=int, help="override grid size N")
        sp.add_argument("--out", type=Path, help="output directory")
        fmt = sp.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="print JSON to stdout")
        fmt.add_argument("--csv", action="store_true", help="emit CSV output")
        sp.add_argument("--threads", type=int, default=1, help="worker threads")

    sp = sub.add_parser("report", help="run a scenario and emit the JSON report")
    common(sp)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("wigner", help="write CWF grid, contours and marginals as CSV")
    common(sp)
    sp.add_argument("--contour-level", type=float, help="contour level relative to max W")
    sp.set_defaults(func=cmd_wigner)

    sp = sub.add_parser("design", help="solve a group-velocity-matching condition")
    sp.add_argument("material")
    sp.add_argument("condition", choices=["sgvm", "agvm", "SGVM", "AGVM"])
    sp.add_argument("range", type=_range, help="wavelength range LO:HI in nm")
    sp.add_argument("--length", type=float, default=1.0, help="crystal length in mm")
    common(sp, scenario=False)
    sp.set_defaults(func=cmd_design)

    sp = sub.add_parser("scan", help="scan crystal length and pump bandwidth")
    common(sp)
    sp.add_argument("--lengths", type=_float_list, default=list(design.DEFAULT_SCAN_LENGTHS),
                    help="lengths in mm, comma separated")
    sp.add_argument("--bandwidths", type=_float_list,
                    default=list(design.DEFAULT_SCAN_BANDWIDTHS),
                    help="pump FWHM in nm, comma separated")
    sp.set_defaults(func=cmd_scan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ScenarioError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except design.DesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except PhotonPairError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
