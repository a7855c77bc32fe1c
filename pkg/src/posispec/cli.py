"""Command-line front end.

Subcommands: ``analyze`` (full engine report for one matrix file),
``spectrum`` (eigenvalues as CSV), ``gallery list|run`` (named scenarios),
and ``campaign`` (seeded random-matrix sweeps).  Output is deterministic
JSON/CSV on stdout; ``--figdir`` additionally renders figures next to the
delimited output.

Exit codes: 0 success, 1 I/O or solver failure, 2 soundness violation
(hypotheses passed but conclusion failed; reproduction files are written).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .campaign import GENERATORS, CampaignConfig, run_campaign
from .errors import PosispecError
from .fileio import load_operator, save_operator
from .gallery import list_scenarios, run_scenario
from .spectral import eigenvalues
from .structure import dominates_identity
from .verdicts import AnalysisOptions, analyze

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_SOUNDNESS = 2


def _json_dump(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _add_tolerance_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol-eig", type=float, default=None,
                        help="eigenvalue clustering tolerance"
                             " (default 1e-8 * (1 + |T|))")
    parser.add_argument("--tol-support", type=float, default=None,
                        help="support threshold (default 1e-12 * scale)")
    parser.add_argument("--horizon", type=int, default=None,
                        help="support-expansion horizon (default 2 * dim)")
    parser.add_argument("--kmax", type=int, default=5000,
                        help="power/Cesaro iteration budget")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for sampled hypothesis checks")


def _options_from_args(args) -> AnalysisOptions:
    return AnalysisOptions(
        tol_eig=args.tol_eig,
        tol_support=args.tol_support,
        horizon=args.horizon,
        k_max=args.kmax,
        seed=args.seed,
    )


def _render_report_figures(T, report, figdir: Path) -> None:
    from .plots import (power_residual_trace, save_convergence_figure,
                        save_matrix_figure, save_spectrum_figure)
    figdir.mkdir(parents=True, exist_ok=True)
    stem = (T.label or "operator").replace("/", "_")
    eps = dominates_identity(T)
    save_spectrum_figure(report.spectrum, figdir / f"{stem}-spectrum.png",
                         title=stem, disk_epsilon=eps if eps > 0 else None)
    save_matrix_figure(T, figdir / f"{stem}-matrix.png", title=stem)
    trace = power_residual_trace(T, min(500, max(50, 4 * T.dim)))
    save_convergence_figure(trace, figdir / f"{stem}-convergence.png",
                            title=f"{stem}: power increments")


def _write_violations(report_dict: dict, outdir: Path, stem: str) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"violation-{stem}.json"
    path.write_text(_json_dump(report_dict) + "\n")
    return path


def cmd_analyze(args) -> int:
    try:
        T = load_operator(args.path)
        report = analyze(T, _options_from_args(args))
    except PosispecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    print(_json_dump(report.to_dict()))
    if args.figdir:
        _render_report_figures(T, report, Path(args.figdir))
    if report.violations:
        path = _write_violations(report.to_dict(), Path(args.outdir),
                                 Path(args.path).stem)
        print(f"soundness violation; reproduction written to {path}",
              file=sys.stderr)
        return EXIT_SOUNDNESS
    return EXIT_OK


def cmd_spectrum(args) -> int:
    try:
        T = load_operator(args.path)
        spectrum = eigenvalues(T, args.tol_eig)
    except PosispecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    if args.json:
        print(_json_dump({"label": T.label, "spr": spectrum.spr,
                          "eigenvalues": spectrum.to_dicts()}))
    else:
        print("re,im,mult,residual")
        for entry in spectrum.entries:
            print(f"{entry.value.real!r},{entry.value.imag!r},"
                  f"{entry.multiplicity},{entry.residual!r}")
    if args.figdir:
        from .plots import save_spectrum_figure
        figdir = Path(args.figdir)
        figdir.mkdir(parents=True, exist_ok=True)
        stem = (T.label or "operator").replace("/", "_")
        save_spectrum_figure(spectrum, figdir / f"{stem}-spectrum.png",
                             title=stem)
    return EXIT_OK


def _parse_overrides(pairs) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise PosispecError(f"override {pair!r} is not key=value")
        key, raw = pair.split("=", 1)
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def cmd_gallery(args) -> int:
    if args.gallery_command == "list":
        for name in list_scenarios():
            print(name)
        return EXIT_OK
    try:
        overrides = _parse_overrides(args.set)
        report = run_scenario(args.name, **overrides)
    except PosispecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    if args.json:
        print(_json_dump(report.to_dict()))
    else:
        print(f"scenario {report.name} ({report.label})")
        for a in report.assertions:
            status = "PASS" if a.passed else "FAIL"
            print(f"  [{status}] {a.name}" + (f": {a.detail}" if a.detail else ""))
    if args.figdir:
        from .gallery import BUILDERS
        from .plots import save_matrix_figure, save_spectrum_figure
        if report.name in BUILDERS:
            params = {k: v for k, v in report.parameters.items()
                      if v is not None and k not in ("k_max",)}
            if report.name == "partition":
                T = BUILDERS[report.name](params["N"], params["block_size"],
                                          params.get("pairing"),
                                          params["overlap"])
            else:
                T = BUILDERS[report.name](**params)
            figdir = Path(args.figdir)
            figdir.mkdir(parents=True, exist_ok=True)
            save_spectrum_figure(eigenvalues(T),
                                 figdir / f"{report.name}-spectrum.png",
                                 title=report.label)
            save_matrix_figure(T, figdir / f"{report.name}-matrix.png",
                               title=report.label)
    if not report.all_passed:
        print("scenario assertions failed", file=sys.stderr)
        return EXIT_SOUNDNESS
    return EXIT_OK


def cmd_campaign(args) -> int:
    try:
        config = CampaignConfig(
            generator=args.generator,
            count=args.count,
            dim_min=args.dim_min,
            dim_max=args.dim_max,
            seed=args.seed,
            epsilon=args.eps,
            domination_n=args.n,
            options=AnalysisOptions(tol_eig=args.tol_eig,
                                    tol_support=args.tol_support,
                                    horizon=args.horizon,
                                    k_max=args.kmax,
                                    seed=args.seed),
        )
        summary = run_campaign(config, jobs=args.jobs)
    except (PosispecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    print(_json_dump(summary.to_dict()))
    if summary.violations:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        for payload in summary.violations:
            stem = f"{config.generator}-{config.seed}-{payload['instance']}"
            (outdir / f"violation-{stem}.json").write_text(
                _json_dump(payload) + "\n")
        print(f"{len(summary.violations)} soundness violations written to"
              f" {outdir}", file=sys.stderr)
        return EXIT_SOUNDNESS
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posispec",
        description="Spectral verification toolkit for positive operators")
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="full engine report for a matrix file")
    p_analyze.add_argument("path")
    _add_tolerance_flags(p_analyze)
    p_analyze.add_argument("--figdir", default=None,
                           help="directory for rendered figures")
    p_analyze.add_argument("--outdir", default="posispec-violations",
                           help="directory for soundness reproduction files")
    p_analyze.set_defaults(func=cmd_analyze)

    p_spec = sub.add_parser("spectrum", help="eigenvalues of a matrix file as CSV")
    p_spec.add_argument("path")
    p_spec.add_argument("--csv", action="store_true", default=True,
                        help="CSV output (default)")
    p_spec.add_argument("--json", action="store_true",
                        help="JSON output instead of CSV")
    p_spec.add_argument("--tol-eig", type=float, default=None)
    p_spec.add_argument("--figdir", default=None)
    p_spec.set_defaults(func=cmd_spectrum)

    p_gal = sub.add_parser("gallery", help="named scenario reproductions")
    gal_sub = p_gal.add_subparsers(dest="gallery_command", required=True)
    gal_list = gal_sub.add_parser("list", help="list scenario names")
    gal_list.set_defaults(func=cmd_gallery)
    gal_run = gal_sub.add_parser("run", help="run one scenario")
    gal_run.add_argument("name")
    gal_run.add_argument("--json", action="store_true")
    gal_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                         help="override a scenario parameter")
    gal_run.add_argument("--figdir", default=None)
    gal_run.set_defaults(func=cmd_gallery)

    p_camp = sub.add_parser("campaign", help="seeded random-matrix campaign")
    p_camp.add_argument("--generator", choices=GENERATORS,
                        default="StochasticPositiveDiag")
    p_camp.add_argument("--count", type=int, default=100)
    p_camp.add_argument("--dim-min", type=int, default=2)
    p_camp.add_argument("--dim-max", type=int, default=10)
    p_camp.add_argument("--eps", type=float, default=0.3,
                        help="epsilon for domination generators")
    p_camp.add_argument("--n", type=int, default=2,
                        help="power for the power-domination engine")
    p_camp.add_argument("--jobs", type=int, default=1)
    p_camp.add_argument("--outdir", default="posispec-violations")
    _add_tolerance_flags(p_camp)
    p_camp.set_defaults(func=cmd_campaign)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entrypoint() -> None:
    sys.exit(main())
