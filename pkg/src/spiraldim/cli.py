"""Command-line front door.

Subcommands: generate, dim, content, poincare, rectify, classify, suite,
report.  Family parameters are key=value tokens scoped to the family flag,
e.g. ``spiraldim dim --spiral alpha=0.5``.  A config file (key = value
lines) supplies defaults; flags override config.  Exit codes: 0 success,
1 validation error (message names the violated precondition), 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .boxcount import (
    ScaleLadder,
    box_count,
    fit_dimension,
    graph_ladder,
    ladder_from_turn_positions,
)
from .config import read_kv, write_kv
from .errors import NumericalError, ValidationError
from .families import trajectory_state
from .generators import (
    gen_chirp_graph,
    gen_chirp_phase_curve,
    gen_phase_trajectory,
    gen_power_spiral,
)
from .integrators import gen_hopf_trajectory, integrate_normal_form
from .measure import content_profile, epsilon_measure
from .phaseplane import (
    arc_length_profile,
    classify_curve,
    fit_return_exponent,
    poincare_sequence,
    project,
    unwrap_phase,
)
from .specs import ChirpSpec, NormalFormSpec, PowerSpiralSpec, TrajectoryFamilySpec
from .suites import ALL_SUITES, default_workers, emit_report, run_suite

TWO_PI = 2.0 * math.pi


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{message}\n{self.format_usage()}")


def _parse_kv_tokens(tokens, what) -> dict:
    out = {}
    for tok in tokens or ():
        if "=" not in tok:
            raise ValidationError(f"{what}: expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        try:
            out[key.strip()] = float(val)
        except ValueError:
            out[key.strip()] = val.strip()
    return out


def _chirp_spec(kv) -> ChirpSpec:
    return ChirpSpec(
        alpha=float(kv.get("alpha", 0.5)),
        beta=float(kv.get("beta", 1.0)),
        phase_shift=float(kv.get("phase", 0.0)),
        trig=str(kv.get("trig", "sin")),
    )


def _spiral_spec(kv) -> PowerSpiralSpec:
    beta = float(kv.get("log", kv.get("log_exponent", 0.0)))
    default_phi = 1.5 if beta <= 0 else math.e ** (2 * beta)
    return PowerSpiralSpec(
        alpha=float(kv.get("alpha", 0.5)),
        log_exponent=beta,
        phi_min=float(kv.get("phi_min", default_phi)),
        mirror=bool(kv.get("mirror", 0.0)),
    )


def _family_spec(kv) -> TrajectoryFamilySpec:
    t0 = kv.get("t0")
    return TrajectoryFamilySpec(
        alpha=float(kv.get("alpha", 0.5)),
        gamma=float(kv.get("gamma", 1.0)),
        K=float(kv.get("K", 1.0)),
        log_p_exponent=int(kv.get("logp", 0)),
        log_q_exponent=int(kv.get("logq", 0)),
        C1=float(kv.get("C1", 1.0)),
        C2=float(kv.get("C2", 0.0)),
        C3=float(kv.get("C3", 0.0)),
        t0=float(t0) if t0 is not None else None,
    )


def _normal_form_spec(kv) -> NormalFormSpec:
    l = int(kv.get("l", 1))
    p = int(kv.get("p", 2))
    b_p = float(kv.get("bp", -1.0))
    b = tuple(0.0 if i + 2 != p else b_p for i in range(p - 1))
    return NormalFormSpec(l=l, a=(0.0,) * l, b=b, omega=float(kv.get("omega", 1.0)))


def _print_kv(mapping) -> None:
    for key, val in mapping.items():
        if isinstance(val, float):
            val = format(val, ".6g")
        print(f"{key} = {val}")


def _add_family_flags(p: argparse.ArgumentParser, families) -> None:
    for name in families:
        p.add_argument(
            f"--{name}",
            nargs="*",
            metavar="key=value",
            default=None,
            help=f"{name.replace('-', ' ')} parameters as key=value tokens",
        )


def _selected_family(args, families):
    chosen = [(name, getattr(args, name.replace("-", "_"))) for name in families]
    chosen = [(n, v) for n, v in chosen if v is not None]
    if len(chosen) != 1:
        raise ValidationError(f"choose exactly one of {', '.join('--' + f for f in families)}")
    name, tokens = chosen[0]
    return name, _parse_kv_tokens(tokens, f"--{name}")


def _curve_for(args, name, kv):
    budget = int(getattr(args, "budget", 2_000_000))
    chord = getattr(args, "chord", None)
    if name == "chirp":
        return gen_chirp_graph(_chirp_spec(kv), float(getattr(args, "taumax", 1.0)), budget, chord)
    if name == "spiral":
        spec = _spiral_spec(kv)
        r_min = float(kv.get("r_min", 0.02))
        return gen_power_spiral(spec, r_min, budget, chord)
    if name == "family":
        spec = _family_spec(kv)
        t_max = float(getattr(args, "tmax", None) or kv.get("tmax", spec.t0 + 2000.0))
        return gen_phase_trajectory(spec, t_max, budget, chord)
    if name == "chirp-phase":
        t0 = float(kv.get("t0", 1.0))
        t_max = float(getattr(args, "tmax", None) or kv.get("tmax", t0 + 1500.0))
        return gen_chirp_phase_curve(
            float(kv.get("alpha", 0.5)), float(kv.get("beta", 1.0)), t0, t_max, budget, chord
        )
    if name == "normal-form":
        spec = _normal_form_spec(kv)
        turns = float(kv.get("turns", 500.0))
        if float(kv.get("attracted", 1.0)):
            return gen_hopf_trajectory(spec, r_start=float(kv.get("r0", 6.0)), turns=turns,
                                       chord_target=chord)
        init = (float(kv.get("r0", 0.5)), float(kv.get("phi0", 0.0)), float(kv.get("z0", 0.1)))
        return integrate_normal_form(spec, init, (0.0, TWO_PI * turns), chord_target=chord)
    raise ValidationError(f"no generator for family {name!r}")


def cmd_generate(args) -> int:
    name, kv = _selected_family(args, ("chirp", "spiral", "family", "chirp-phase", "normal-form"))
    curve = _curve_for(args, name, kv)
    curve.to_csv(args.out)
    meta = args.meta or (os.path.splitext(args.out)[0] + ".meta.txt")
    curve.write_metadata(meta)
    print(f"wrote {len(curve)} samples to {args.out} (metadata: {meta})")
    return 0


def _dim_counts(args, name, kv):
    curve = _curve_for(args, name, kv)
    plane = getattr(args, "projection", None)
    if plane:
        if curve.ambient != 3:
            raise ValidationError("--projection needs a space curve (--family)")
        curve = project(curve, plane).normalize_axes()
    if name in ("chirp",) or plane in ("xz", "yz"):
        ordinate, abscissa = (1, 0) if name == "chirp" else (0, 1)
        ladder = graph_ladder(curve, ordinate=ordinate, abscissa=abscissa)
    elif name in ("spiral", "family", "normal-form"):
        prof = unwrap_phase(curve if curve.ambient == 2 else project(curve, "xy"))
        psi, r = prof.winding, prof.radii
        marks = TWO_PI * np.arange(1, int(psi[-1] / TWO_PI))
        positions = np.interp(marks, psi, r)
        ladder = ladder_from_turn_positions(positions, curve.max_chord, curve.bbox_diameter())
    else:
        ladder = ScaleLadder.for_curve(curve)
    return curve, box_count(curve, ladder)


def cmd_dim(args) -> int:
    name, kv = _selected_family(args, ("chirp", "spiral", "family"))
    curve, counts = _dim_counts(args, name, kv)
    est = fit_dimension(counts)
    _print_kv(est.as_mapping())
    if args.counts_out:
        counts.to_csv(args.counts_out)
        print(f"counts written to {args.counts_out}")
    return 0


def cmd_content(args) -> int:
    name, kv = _selected_family(args, ("spiral",))
    curve = _curve_for(args, name, kv)
    eps_hi = args.eps_max or curve.bbox_diameter() / 8.0
    eps_lo = args.eps_min or eps_hi / 64.0
    ladder = ScaleLadder.from_bounds(eps_hi, eps_lo)
    profile = epsilon_measure(curve, ladder, raster_cell=eps_lo / 8.0)
    quotients, verdict = content_profile(profile, args.s)
    for eps, q in quotients:
        print(f"{eps:.6g},{q:.6g}")
    _print_kv(
        {
            "verdict": verdict.label,
            "quotient_ratio": verdict.ratio,
            "monotone": verdict.monotone,
            "ratio_threshold": verdict.ratio_threshold,
        }
    )
    if args.out:
        profile.to_csv(args.out)
    return 0


def cmd_poincare(args) -> int:
    name, kv = _selected_family(args, ("family", "spiral"))
    curve = _curve_for(args, name, kv)
    planar = curve if curve.ambient == 2 else project(curve, "xy")
    seq = poincare_sequence(unwrap_phase(planar), args.section)
    fit = fit_return_exponent(seq)
    _print_kv(
        {
            "returns": len(seq),
            "exponent": fit.value,
            "band": fit.band,
            "interpolation_error": seq.interpolation_error,
        }
    )
    if args.out:
        seq.to_csv(args.out)
    return 0


def cmd_rectify(args) -> int:
    name, kv = _selected_family(args, ("family", "spiral", "chirp"))
    curve = _curve_for(args, name, kv)
    profile = arc_length_profile(curve)
    _print_kv(
        {
            "verdict": profile.verdict,
            "tail_exponent": profile.tail_exponent if profile.tail_exponent is not None else "",
            "sampled_length": profile.sampled_length,
            "extrapolated_length": profile.total_length if profile.total_length else "",
            "stability": profile.stability if profile.stability is not None else "",
        }
    )
    return 0


def cmd_classify(args) -> int:
    name, kv = _selected_family(args, ("chirp-phase",))
    curve = _curve_for(args, name, kv)
    regime = classify_curve(curve, float(kv.get("alpha", 0.5)), float(kv.get("beta", 1.0)))
    _print_kv(
        {
            "regime": regime.label,
            "wave_count": regime.violation_count,
            "inf_radius_trend": regime.inf_radius_trend,
            "sup_radius_trend": regime.sup_radius_trend,
        }
    )
    return 0


def cmd_suite(args) -> int:
    mapping = read_kv(args.config) if args.config else {}
    names = list(ALL_SUITES) if args.suite == "all" else [args.suite]
    workers = args.workers if args.workers else None
    results = []
    for name in names:
        res = run_suite(name, mapping, workers=workers)
        results.append(res)
        print(f"{name}: {res.n_passed}/{len(res.gated_rows)} rows passed ({res.runtime:.1f}s)")
        for row in res.rows:
            mark = "PASS" if row.passed else "FAIL"
            if row.experimental:
                mark += "*"
            print(f"  {mark:5s} {row.label}")
    out_dir = args.out or (mapping.get("out_dir") if mapping else None)
    if out_dir:
        files = emit_report(results, out_dir)
        print(f"wrote {len(files)} files to {out_dir}")
    return 0


def cmd_report(args) -> int:
    rows = []
    for name in sorted(os.listdir(args.results)):
        if name.endswith(".csv") and "__counts" not in name and name != "summary.csv":
            path = os.path.join(args.results, name)
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.read().strip().splitlines()[1:]
            n_pass = sum(1 for ln in lines if ",true," in ln)
            rows.append((name[:-4], len(lines), n_pass))
    out = os.path.join(args.results, "summary.csv")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("suite,rows,passed\n")
        for name, n, p in rows:
            fh.write(f"{name},{n},{p}\n")
    for name, n, p in rows:
        print(f"{name}: {p}/{n}")
    print(f"summary written to {out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="spiraldim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"spiraldim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a curve family to CSV")
    _add_family_flags(p, ("chirp", "spiral", "family", "chirp-phase", "normal-form"))
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--taumax", type=float, default=1.0)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--chord", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--meta", default=None)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("dim", help="box-dimension estimate of a curve family")
    _add_family_flags(p, ("chirp", "spiral", "family"))
    p.add_argument("--projection", choices=("xy", "xz", "yz"), default=None)
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--chord", type=float, default=2.0e-4)
    p.add_argument("--counts-out", default=None)
    p.set_defaults(fn=cmd_dim)

    p = sub.add_parser("content", help="epsilon-neighborhood content profile and verdict")
    _add_family_flags(p, ("spiral",))
    p.add_argument("--s", type=float, default=4.0 / 3.0)
    p.add_argument("--eps-min", type=float, default=None)
    p.add_argument("--eps-max", type=float, default=None)
    p.add_argument("--budget", type=int, default=4_000_000)
    p.add_argument("--chord", type=float, default=5.0e-4)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_content)

    p = sub.add_parser("poincare", help="section return radii and difference exponent")
    _add_family_flags(p, ("family", "spiral"))
    p.add_argument("--section", type=float, default=0.0)
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--chord", type=float, default=2.0e-4)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_poincare)

    p = sub.add_parser("rectify", help="arc-length profile and rectifiability verdict")
    _add_family_flags(p, ("family", "spiral", "chirp"))
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--chord", type=float, default=2.0e-4)
    p.set_defaults(fn=cmd_rectify)

    p = sub.add_parser("classify", help="regime of a chirp-generated phase curve")
    _add_family_flags(p, ("chirp-phase",))
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--budget", type=int, default=3_000_000)
    p.add_argument("--chord", type=float, default=2.0e-3)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("suite", help="run reproduction suites and emit reports")
    p.add_argument("--suite", default="all", choices=["all"] + sorted(ALL_SUITES))
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(fn=cmd_suite)

    p = sub.add_parser("report", help="merge per-suite CSVs in a directory into a summary")
    p.add_argument("--results", required=True)
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
