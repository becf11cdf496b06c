"""Command line for the solver, distribution, diagnostics and simulations.

The CLI is a thin client: each subcommand builds a request, sends it to the
service (in-process by default, a remote instance with ``--server``), and
formats the response. Every run writes one manifest with enough information
to reproduce it; volatile fields (timestamps, wall time) live only there, so
all other outputs are byte-identical across reruns with the same flags.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from pathlib import Path

from . import __version__
from .client import ServiceClient, ServiceError
from .errors import DomainError
from .modelspec import parse_model_file

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


def _fmt(value: float) -> str:
    return format(float(value), "#.6g")


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise DomainError(f"could not parse number list {text!r}: {exc}") from exc


def _add_model_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--model", metavar="FILE", help="model-spec file")
    group.add_argument("--id", action="store_true", help="identity covariance")
    group.add_argument("--eigenvalues", metavar="V,V,...", help="explicit eigenvalue list")
    group.add_argument("--atoms", metavar="V:M,V:M,...", help="eigenvalue:mass atoms")
    group.add_argument("--toeplitz", metavar="A0,A1,...", help="symmetric Toeplitz band")
    group.add_argument("--interval", metavar="ZETA,XI", help="equally spaced spectrum")
    parser.add_argument("--p", type=int, help="covariance dimension")


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", metavar="DIR", default="twedge-out", help="output directory")
    parser.add_argument("--format", choices=("text", "csv", "json"), default="text")
    parser.add_argument("--server", metavar="URL", help="use a running service instead of in-process")


def _model_payload(args, parser: argparse.ArgumentParser) -> dict:
    if args.model:
        return parse_model_file(args.model).to_mapping()
    if args.id:
        if not args.p:
            parser.error("--id requires --p")
        return {"kind": "atoms", "values": [1.0], "masses": [1.0], "p": args.p}
    if args.eigenvalues:
        return {"kind": "eigenvalues", "values": _parse_floats(args.eigenvalues)}
    if args.atoms:
        values, masses = [], []
        for chunk in args.atoms.split(","):
            if not chunk.strip():
                continue
            value, sep, mass = chunk.partition(":")
            if not sep:
                raise DomainError(f"atom {chunk!r} is not of the form value:mass")
            values.append(float(value))
            masses.append(float(mass))
        if not args.p:
            parser.error("--atoms requires --p")
        return {"kind": "atoms", "values": values, "masses": masses, "p": args.p}
    if args.toeplitz:
        if not args.p:
            parser.error("--toeplitz requires --p")
        return {"kind": "toeplitz", "coefficients": _parse_floats(args.toeplitz), "p": args.p}
    if args.interval:
        endpoints = _parse_floats(args.interval)
        if len(endpoints) != 2:
            raise DomainError("--interval expects exactly ZETA,XI")
        if not args.p:
            parser.error("--interval requires --p")
        return {"kind": "interval", "zeta": endpoints[0], "xi": endpoints[1], "p": args.p}
    parser.error("a model is required (--model/--id/--eigenvalues/--atoms/--toeplitz/--interval)")


def _write_manifest(args, command: str, config: dict, extras: dict, outputs: list[str]) -> Path:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "tool_version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": config,
        "outputs": outputs,
    }
    manifest.update(extras)
    path = outdir / f"{command}_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _cmd_solve(args, parser) -> int:
    model = _model_payload(args, parser)
    request = {"model": model, "n": args.n}
    with ServiceClient(args.server) as client:
        payload = client.post("/solve", request)
    if args.format == "json":
        _print_json(payload)
    else:
        for key in ("c", "mu", "sigma", "alpha1", "margin"):
            print(f"{key:<6} = {_fmt(payload[key])}")
    _write_manifest(args, "solve", request, {"edge": payload}, [])
    return EXIT_OK


def _cmd_tw(args, parser) -> int:
    with ServiceClient(args.server) as client:
        outputs: list[str] = []
        config: dict = {}
        if args.cdf is not None:
            config = {"s": _parse_floats(args.cdf)}
            payload = client.post("/tw/cdf", config)
            body = payload["values"]
            if args.format == "json":
                _print_json(payload)
            else:
                for v in body:
                    print(_fmt(v))
        elif args.quantile is not None:
            config = {"prob": _parse_floats(args.quantile)}
            payload = client.post("/tw/quantile", config)
            if args.format == "json":
                _print_json(payload)
            else:
                for v in payload["values"]:
                    print(_fmt(v))
        elif args.table:
            payload = client.get("/tw/table")
            config = {"table": True}
            if args.format == "json":
                _print_json(payload)
            elif args.format == "csv":
                print("s,target,F0")
                for row in payload["rows"]:
                    print(f"{row['s']:.10g},{row['target']:.10g},{row['F0']:.10g}")
            else:
                print(f"{'s':>8} {'target':>8} {'F0':>10}")
                for row in payload["rows"]:
                    print(f"{row['s']:>8.2f} {row['target']:>8.2f} {row['F0']:>10.6f}")
        else:
            payload = client.get("/tw/grid")
            config = {"export_table": args.export_table}
            target = Path(args.export_table)
            with open(target, "w", newline="") as handle:
                handle.write("x,q,F0\n")
                for row in payload["rows"]:
                    handle.write(f"{row['x']:.10g},{row['q']:.12g},{row['F0']:.12g}\n")
            outputs.append(str(target))
            print(f"wrote {target}")
    _write_manifest(args, "tw", config, {}, outputs)
    return EXIT_OK


def _cmd_simulate(args, parser) -> int:
    if args.config:
        request = json.loads(Path(args.config).read_text())
    else:
        model = _model_payload(args, parser)
        request = {
            "model": model,
            "n": args.n,
            "replications": args.reps,
            "master_seed": args.seed,
            "entry_law": args.entry_law,
            "top_k": args.top_k,
            "keep_samples": args.keep_samples,
            "workers": args.workers,
        }
        if args.grid:
            grid = []
            for chunk in args.grid.split(","):
                s, sep, target = chunk.partition(":")
                if not sep:
                    raise DomainError(f"grid point {chunk!r} is not of the form s:target")
                grid.append((float(s), float(target)))
            request["quantile_grid"] = grid
    with ServiceClient(args.server) as client:
        payload = client.post("/simulate", request)

    wall_time = payload.pop("wall_time_s", None)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "simulate_report.csv"
    with open(csv_path, "w", newline="") as handle:
        handle.write("s,target,F_hat,two_se\n")
        for row in payload["rows"]:
            handle.write(
                f"{row['s']:.10g},{row['target']:.10g},{row['f_hat']:.10g},{row['two_se']:.10g}\n"
            )
    if args.format == "json":
        _print_json(payload)
    else:
        edge = payload["edge"]
        print(f"n = {payload['n']}  p = {payload['p']}  replications = {payload['replications']}")
        print(f"mu = {_fmt(edge['mu'])}  sigma = {_fmt(edge['sigma'])}")
        print(f"{'s':>8} {'target':>8} {'F_hat':>8} {'2*SE':>8}")
        for row in payload["rows"]:
            print(
                f"{row['s']:>8.2f} {row['target']:>8.2f} {row['f_hat']:>8.4f} {row['two_se']:>8.4f}"
            )
        print(f"mean = {_fmt(payload['mean'])}  sd = {_fmt(payload['sd'])}")
    _write_manifest(
        args,
        "simulate",
        request,
        {"edge": payload["edge"], "wall_time_s": wall_time, "master_seed": payload["master_seed"]},
        [str(csv_path)],
    )
    return EXIT_OK


def _cmd_spike(args, parser) -> int:
    model = _model_payload(args, parser)
    request = {
        "model": model,
        "n": args.n,
        "spikes": _parse_floats(args.spikes),
        "chi_tol": args.chi_tol,
    }
    with ServiceClient(args.server) as client:
        payload = client.post("/spike", request)
    if args.format == "json":
        _print_json(payload)
    else:
        print(f"threshold = {_fmt(payload['threshold'])}  c = {_fmt(payload['c_base'])}", end="")
        if payload["c_tilde"] is not None:
            print(f"  c_tilde = {_fmt(payload['c_tilde'])}")
        else:
            print()
        print(f"{'spike':>12} {'regime':>14} {'rel_distance':>14}")
        for row in payload["spikes"]:
            print(f"{row['value']:>12.6g} {row['regime']:>14} {row['rel_distance']:>14.3e}")
        if payload.get("warning"):
            print(f"warning: {payload['warning']}")
    _write_manifest(args, "spike", request, {"report": payload}, [])
    return EXIT_OK


def _cmd_diagnose(args, parser) -> int:
    model = _model_payload(args, parser)
    request = {
        "model": model,
        "n": args.n,
        "thresholds": {
            "margin_min": args.margin_min,
            "lambda1_max": args.lambda1_max,
            "lambdap_min": args.lambdap_min,
        },
    }
    with ServiceClient(args.server) as client:
        payload = client.post("/diagnose", request)
    if args.format == "json":
        _print_json(payload)
    else:
        print(f"{'check':<18} {'status':<6} {'value':>12} {'threshold':>12}")
        for chk in payload["checks"]:
            threshold = "-" if chk["threshold"] is None else _fmt(chk["threshold"])
            status = "pass" if chk["passed"] else "FAIL"
            print(f"{chk['name']:<18} {status:<6} {_fmt(chk['value']):>12} {threshold:>12}")
        print(f"atom bound slack = {_fmt(payload['atom_bound_slack'])}")
        if payload.get("symbol_flat_spots"):
            print(f"symbol flat spots: {payload['symbol_flat_spots']}")
        print(f"overall: {'pass' if payload['passed'] else 'FAIL'}")
    _write_manifest(args, "diagnose", request, {"report": payload}, [])
    return EXIT_OK if payload["passed"] else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twedge",
        description="centering/scaling solver and Monte Carlo harness for the "
        "largest eigenvalue of complex sample covariance matrices",
    )
    parser.add_argument("--version", action="version", version=f"twedge {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sp = subparsers.add_parser("solve", help="solve for (c, mu, sigma)")
    _add_model_args(sp)
    _add_common_args(sp)
    sp.add_argument("--n", type=int, required=True, help="sample count")
    sp.set_defaults(handler=_cmd_solve)

    sp = subparsers.add_parser("tw", help="limiting distribution values")
    _add_common_args(sp)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--cdf", metavar="S[,S...]", help="use --cdf=-1.81,... for negative lists")
    group.add_argument("--quantile", metavar="P[,P...]")
    group.add_argument("--table", action="store_true", help="reference quantile rows")
    group.add_argument("--export-table", metavar="FILE", help="write the full (x, q, F0) grid")
    sp.set_defaults(handler=_cmd_tw)

    sp = subparsers.add_parser("simulate", help="seeded Monte Carlo run")
    _add_model_args(sp)
    _add_common_args(sp)
    sp.add_argument("--n", type=int, help="sample count")
    sp.add_argument("--config", metavar="FILE", help="JSON request body instead of flags")
    sp.add_argument("--reps", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=20070663)
    sp.add_argument("--entry-law", choices=("complex-gaussian", "real-gaussian", "scaled-rademacher"),
                    default="complex-gaussian")
    sp.add_argument("--top-k", type=int, default=1)
    sp.add_argument("--keep-samples", action="store_true")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--grid", metavar="S:TARGET,...", help="override the quantile grid")
    sp.set_defaults(handler=_cmd_simulate)

    sp = subparsers.add_parser("spike", help="classify spiked perturbations")
    _add_model_args(sp)
    _add_common_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--spikes", required=True, metavar="V,V,...")
    sp.add_argument("--chi-tol", type=float, default=1e-5)
    sp.set_defaults(handler=_cmd_spike)

    sp = subparsers.add_parser("diagnose", help="applicability checks")
    _add_model_args(sp)
    _add_common_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--margin-min", type=float, default=0.02)
    sp.add_argument("--lambda1-max", type=float, default=None)
    sp.add_argument("--lambdap-min", type=float, default=None)
    sp.set_defaults(handler=_cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and not args.config and args.n is None:
        parser.error("simulate requires --n (or --config)")
    try:
        return args.handler(args, parser)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ServiceError as exc:
        code = EXIT_USAGE if exc.status_code == 422 else EXIT_NUMERICAL
        print(f"error: {exc.detail}", file=sys.stderr)
        return code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
