"""Command-line front end: ``horoaf verify|flow|search|report``.

Exit codes: 0 success (including violated conjectures), 1 usage error,
2 a proven inequality failed beyond tolerance, 3 no certificate found.
"""

import argparse
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .errors import BudgetExhausted, CertificateUnstable, HoroafError, NoFeasiblePoint
from .flow import default_times, trace_flow
from .functionals import run_suite
from .sphere_grid import build_grid
from .surface import parse_shape, rescale_spec, spec_from_dict, spec_to_dict

log = logging.getLogger("horoaf")

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_NO_CERTIFICATE = 0, 1, 2, 3
DEFAULT_RESOLUTION = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text, output):
    if output:
        write_atomic(output, text)
    else:
        sys.stdout.write(text)


def dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def resolve_surface(text, n, at_time=None):
    """Surface from the mini-language or a JSON file (shape or certificate).

    A certificate file resolves to its body at the certified flow time
    unless ``at_time`` overrides it.  Returns (spec, certificate resolution
    or None).
    """
    if text is None:
        raise UsageError("--surface is required")
    path = Path(text)
    if text.endswith(".json") or path.is_file():
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read surface file {text}: {exc}") from exc
        if "t0" in data and "surface" in data:
            spec = spec_from_dict(data["surface"])
            t = data["t0"] if at_time is None else at_time
            cert_resolution = data.get("resolution")
        else:
            spec, t, cert_resolution = spec_from_dict(data), at_time, None
    else:
        spec, t, cert_resolution = parse_shape(text, n), at_time, None
    if t:
        spec = rescale_spec(spec, math.exp(-t))
    return spec, cert_resolution


def _surface_and_resolution(args):
    spec, cert_resolution = resolve_surface(args.surface, args.n, args.at_time)
    if args.resolution is None:
        args.resolution = cert_resolution or DEFAULT_RESOLUTION
    return spec


def _config(args):
    keys = ("command", "n", "resolution", "surface", "t_max", "dt", "budget", "format", "at_time", "inputs")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def cmd_verify(args):
    spec = _surface_and_resolution(args)
    reports, gating = run_suite(spec, args.resolution)
    failures = [r.name + ("" if r.k is None else f"[{r.k}]") for r, g in zip(reports, gating) if g and not r.holds]
    doc = {
        "kind": "verify",
        "version": __version__,
        "config": _config(args),
        "surface": spec_to_dict(spec),
        "grid": build_grid(spec.n, args.resolution).describe(),
        "reports": [dict(r.to_dict(), gating=g) for r, g in zip(reports, gating)],
        "proven_failures": failures,
    }
    _emit(dumps(doc), args.output)
    for r, g in zip(reports, gating):
        tag = "" if r.k is None else f"[{r.k}]"
        kind = "proven" if g else "conjectural"
        log.info("%-22s %-11s %-8s margin=%.6g", r.name + tag, kind, r.to_dict()["status"], r.margin)
    return EXIT_VIOLATION if failures else EXIT_OK


def cmd_flow(args):
    spec = _surface_and_resolution(args)
    trace = trace_flow(spec, build_grid(spec.n, args.resolution), default_times(args.t_max, args.dt))
    if args.format == "csv":
        text = trace.to_csv()
    else:
        text = dumps({"kind": "flow", "version": __version__, "config": _config(args),
                      "grid": build_grid(spec.n, args.resolution).describe(), "trace": trace.to_dict()})
    _emit(text, args.output)
    return EXIT_OK


def cmd_search(args):
    from .search import find_counterexample

    if args.n != 3:
        raise UsageError("the counterexample search is defined for n = 3 only")
    try:
        cert = find_counterexample(3, args.resolution, args.budget)
    except (BudgetExhausted, CertificateUnstable, NoFeasiblePoint) as exc:
        log.error("no certificate: %s", exc)
        return EXIT_NO_CERTIFICATE
    doc = dict(cert.to_dict(), kind="certificate", config=_config(args))
    _emit(dumps(doc), args.output)
    log.info("certificate: Q=%.6f t0=%.6f P=%.6f min_lambda=%.6f", cert.Q, cert.t0, cert.scaled_P, cert.min_lambda_scaled)
    return EXIT_OK


def merge_reports(documents):
    """Merge verify/report documents into one report document.

    Individual reports are de-duplicated by content, so merging is
    idempotent.
    """
    seen = {}
    for doc in documents:
        for rep in doc.get("reports", []):
            seen[json.dumps(rep, sort_keys=True)] = rep
    reports = [seen[key] for key in sorted(seen)]
    summary = {}
    for rep in reports:
        key = rep["name"] + ("" if rep.get("k") is None else f"[{rep['k']}]")
        entry = summary.setdefault(key, {"count": 0, "min_margin": math.inf, "min_relative_margin": math.inf, "all_hold": True})
        entry["count"] += 1
        entry["min_margin"] = min(entry["min_margin"], rep["margin"])
        entry["min_relative_margin"] = min(entry["min_relative_margin"], rep["relative_margin"])
        entry["all_hold"] = entry["all_hold"] and bool(rep["holds"])
    return {"kind": "report", "version": __version__, "reports": reports, "summary": summary}


def cmd_report(args):
    if not args.inputs:
        raise UsageError("report needs --inputs")
    docs = []
    for path in args.inputs:
        try:
            docs.append(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc
    _emit(dumps(merge_reports(docs)), args.output)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="horoaf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, resolution):
        p.add_argument("--n", type=int, default=3, choices=(2, 3, 4), help="ambient dimension")
        p.add_argument("--resolution", type=int, default=resolution,
                       help="grid resolution (default: the certificate's, else %d)" % DEFAULT_RESOLUTION)
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("verify", help="run the inequality suite on one surface")
    common(p, None)
    p.add_argument("--surface", required=True, help="family:key=value,... or a JSON shape/certificate file")
    p.add_argument("--at-time", type=float, help="evaluate the surface after flowing to this time")
    p.add_argument("--format", choices=("json",), default="json")

    p = sub.add_parser("flow", help="trace P along the homothety flow")
    common(p, None)
    p.add_argument("--surface", required=True)
    p.add_argument("--at-time", type=float)
    p.add_argument("--t-max", type=float, default=8.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("search", help="search for a counterexample certificate (n = 3)")
    common(p, 96)
    p.add_argument("--budget", type=int, default=400)
    p.add_argument("--format", choices=("json",), default="json")

    p = sub.add_parser("report", help="merge JSON outputs into one summary")
    p.add_argument("--inputs", nargs="+")
    p.add_argument("--output")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


COMMANDS = {"verify": cmd_verify, "flow": cmd_flow, "search": cmd_search, "report": cmd_report}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if (getattr(args, "resolution", None) or 8) < 8:
        parser.error("--resolution must be at least 8")
    if getattr(args, "dt", 1) <= 0 or getattr(args, "t_max", 1) <= 0:
        parser.error("--dt and --t-max must be positive")
    if getattr(args, "budget", 50) < 50:
        parser.error("--budget must be at least 50")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (HoroafError, ValueError, KeyError, TypeError) as exc:
        log.error("error: %s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
