"""
Command-line interface for persistence-cdga.

Commands:
- check FILE                 d² = 0, relative structure, minimality and stage closure
- theta FILE                 stage table of Θ(f)
- cohomology FILE            stage-wise cohomology dimensions
- barcode FILE               cohomology barcode, one `degree birth death` line per bar
- dist A B                   module-level d_CohI
- verify A B CERT            check an interleaving certificate
- obstruct A B               lower bound on d_IHC from the obstruction scan
- bounds A [B]               closed-form upper bounds
- formality FILE CERT        check an H-formality certificate
- run-corpus [NAME ...]      reproduce the expected values of the corpus

Exit codes: 0 success, 1 violation found, 2 input error, 3 inconclusive only.
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy

from . import __version__
from .cdga import CheckResult
from .config import load_config
from .corpus import run_corpus
from .distances import (
    bound_basepoint,
    bound_N,
    bound_path_fibration,
    bound_wht,
    d_cohi_module,
    format_distance,
)
from .errors import ModelError, PersistenceCDGAError, StageEscapeError
from .interleaving import lower_bound_scan, verify_certificate, verify_h_formality_certificate
from .parser import (
    load_certificate,
    load_family,
    load_formality,
    load_model,
    read_source,
    top_degree,
)
from .persistence import (
    PersistenceCDGA,
    barcode,
    build_theta,
    persistence_cohomology,
    persistence_linear_homology,
    to_rational,
)
from .sullivan import RelativeSullivanModel, check_relative, verify_minimality

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT_ERROR = 2
EXIT_INCONCLUSIVE = 3


class Session:
    """Configuration and flags shared by every command of one run."""

    def __init__(self, args: argparse.Namespace, config: Dict[str, Any]):
        self.args = args
        self.config = config
        engine = config.get("engine", {})
        self.field: Optional[str] = args.field
        self.default_field: str = engine.get("field", "Q")
        self.cap_margin: int = engine.get("cap_margin", 3)
        self.t_cap: int = engine.get("t_degree_cap", 8)
        self.json: bool = bool(args.json or config.get("output", {}).get("json", False))

    def cap_for(self, paths: Sequence[str]) -> int:
        """Cohomology cap: --cap, or the largest generator degree of the inputs plus the margin."""
        if self.args.cap is not None:
            return self.args.cap
        top = max(top_degree(read_source(p), p) for p in paths)
        return top + self.cap_margin

    def models(self, paths: Sequence[str]) -> Tuple[List[RelativeSullivanModel], int]:
        cap = self.cap_for(paths)
        models = [load_model(p, self.field, cap + 1, default_field=self.default_field) for p in paths]
        fields = {m.field.name for m in models}
        if len(fields) > 1:
            raise ModelError(f"Inputs are over different fields: {', '.join(sorted(fields))}")
        return models, cap

    def thetas(self, paths: Sequence[str]) -> Tuple[List[PersistenceCDGA], int]:
        models, cap = self.models(paths)
        return [build_theta(m) for m in models], cap

    def emit(self, lines: List[str], data: Dict[str, Any]) -> None:
        if self.json:
            print(json.dumps(data, sort_keys=True, indent=2))
        else:
            for line in lines:
                print(line)


def _check_lines(checks: Sequence[CheckResult]) -> List[str]:
    lines = []
    for check in checks:
        lines.append(f"[{'ok' if check.ok else 'FAIL'}] {check.check}: {check.message}")
        if not check.ok and check.generator:
            lines.append(f"       generator: {check.generator}")
        if not check.ok and check.residue:
            lines.append(f"       residue: {check.residue}")
    return lines


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------


def cmd_check(session: Session) -> int:
    (model,), cap = session.models([session.args.file])
    checks = [check_relative(model), verify_minimality(model)]
    try:
        build_theta(model)
        checks.append(CheckResult.passed("stages", "every stage is closed under d"))
    except StageEscapeError as e:
        checks.append(CheckResult.failed("stages", str(e), generator=e.generator))
    ok = all(checks)
    lines = [f"{model.label}: {'ok' if ok else 'FAILED'}", f"cap {cap}"] + _check_lines(checks)
    session.emit(lines, {"model": model.label, "ok": ok, "cap": cap, "checks": [c.to_dict() for c in checks]})
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_theta(session: Session) -> int:
    (theta,), cap = session.thetas([session.args.file])
    table = theta.stage_table()
    lines = [f"{theta.label}: stabilization index {theta.stabilization_index}", f"cap {cap}"]
    lines.extend(f"stage {s}: {', '.join(names) or '-'}" for s, names in table)
    if theta.truncated:
        lines.append("truncated (bound only)")
    data = {
        "model": theta.label,
        "cap": cap,
        "stabilization_index": theta.stabilization_index,
        "truncated": theta.truncated,
        "stages": {str(s): list(names) for s, names in table},
    }
    session.emit(lines, data)
    return EXIT_OK


def cmd_cohomology(session: Session) -> int:
    (theta,), cap = session.thetas([session.args.file])
    module = persistence_cohomology(theta, cap)
    linear = persistence_linear_homology(theta, cap)
    lines = [f"{theta.label}: dimensions in degrees 0..{cap}", f"cap {cap}"]
    data: Dict[str, Any] = {"model": theta.label, "cap": cap, "H": {}, "HQ": {}}
    for s in range(module.last_stage + 1):
        h = [module.dimension(n, s) for n in range(cap + 1)]
        hq = [linear.dimension(n, s) for n in range(cap + 1)]
        lines.append(f"stage {s}: H {h} HQ {hq}")
        data["H"][str(s)] = h
        data["HQ"][str(s)] = hq
    session.emit(lines, data)
    return EXIT_OK


def cmd_barcode(session: Session) -> int:
    (theta,), cap = session.thetas([session.args.file])
    bars = barcode(persistence_cohomology(theta, cap))
    lines = [f"cap {cap}"] + bars.format_lines()
    if bars.truncated:
        lines.append("truncated (bound only)")
    session.emit(lines, {"model": theta.label, "cap": cap, "truncated": bars.truncated, "bars": bars.to_list()})
    return EXIT_OK


def cmd_dist(session: Session) -> int:
    (first, second), cap = session.thetas([session.args.first, session.args.second])
    report = d_cohi_module(first, second, cap)
    session.emit(report.format_lines(), report.to_dict())
    return EXIT_OK


def cmd_verify(session: Session) -> int:
    (first, second), cap = session.thetas([session.args.first, session.args.second])
    certificate = load_certificate(session.args.certificate, first, second, session.t_cap)
    report = verify_certificate(certificate, first, second, cap + 1)
    data = report.to_dict()
    data["cap"] = cap
    session.emit(report.format_lines() + [f"cap {cap}"], data)
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_obstruct(session: Session) -> int:
    (first, second), cap = session.thetas([session.args.first, session.args.second])
    obstruction = session.config.get("obstruction", {})
    eps_max = session.args.eps_max if session.args.eps_max is not None else obstruction.get("eps_max", 4)
    family = None
    if session.args.family:
        family = load_family(session.args.family, first.stage(0))
    solver = {
        "max_witness_variables": obstruction.get("max_witness_variables", 4),
        "witness_values": obstruction.get("witness_values", [0, 1, -1]),
    }
    report = lower_bound_scan(first, second, cap, eps_max, family, solver)
    data = report.to_dict()
    data["cap"] = cap
    session.emit(report.format_lines() + [f"cap {cap}"], data)
    inconclusive = any(r.inconclusive for r in report.reports)
    if not any(r.obstructed for r in report.reports) and inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_bounds(session: Session) -> int:
    paths = [session.args.first] + ([session.args.second] if session.args.second else [])
    models, cap = session.models(paths)
    bounds: Dict[str, Any] = {}
    for model in models:
        build_theta(model)
        bounds[f"N({model.label})"] = bound_N(model)
        try:
            bounds[f"basepoint({model.label})"] = bound_basepoint(model, cap)
        except ModelError as e:
            logger.debug(f"No basepoint bound for {model.label}: {e}")
    if len(models) == 2:
        bases = [m.base_algebra for m in models]
        bounds["wht"] = bound_wht(*bases)
        bounds["path_fibration"] = bound_path_fibration(*bases)
    lines = [f"{name}: {format_distance(value)}" for name, value in bounds.items()] + [f"cap {cap}"]
    data = {"cap": cap, "bounds": {name: format_distance(value) for name, value in bounds.items()}}
    session.emit(lines, data)
    return EXIT_OK


def cmd_formality(session: Session) -> int:
    (theta,), cap = session.thetas([session.args.file])
    zigzag, projection = load_formality(session.args.certificate, theta)
    report = verify_h_formality_certificate(theta, zigzag, projection, cap)
    data = report.to_dict()
    data["cap"] = cap
    session.emit(report.format_lines() + [f"cap {cap}"], data)
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_run_corpus(session: Session) -> int:
    config = session.config
    if session.args.cap is not None:
        logger.warning("--cap is ignored by run-corpus; entries use engine.cap_margin")
    report = run_corpus(session.args.names or None, config, session.field)
    session.emit(report.format_lines(), report.to_dict())
    return EXIT_OK if report.ok else EXIT_VIOLATION


COMMANDS = {
    "check": cmd_check,
    "theta": cmd_theta,
    "cohomology": cmd_cohomology,
    "barcode": cmd_barcode,
    "dist": cmd_dist,
    "verify": cmd_verify,
    "obstruct": cmd_obstruct,
    "bounds": cmd_bounds,
    "formality": cmd_formality,
    "run-corpus": cmd_run_corpus,
}


def _cap_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid cap: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"cap must be non-negative, got {value}")
    return value


def _epsilon_arg(text: str) -> sympy.Rational:
    try:
        value = to_rational(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"invalid rational: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"epsilon must be non-negative, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    common.add_argument("--config", help="Configuration file (default: config.yaml in the config dir)")
    common.add_argument("--cap", type=_cap_arg, help="Cohomology degree cap (default: top degree + cap_margin)")
    common.add_argument("--field", choices=["Q", "Q(i)"], help="Override the [field] section of the inputs")
    common.add_argument("--json", action="store_true", help="Structured output with sorted keys")

    parser = argparse.ArgumentParser(
        prog="persistence-cdga", description="Persistence CDGAs of relative Sullivan models", parents=[common]
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("check", "Check a model file"),
        ("theta", "Print the stage table"),
        ("cohomology", "Print stage-wise cohomology dimensions"),
        ("barcode", "Print the cohomology barcode"),
    ):
        sub = commands.add_parser(name, help=help_text, parents=[common])
        sub.add_argument("file")

    for name, help_text in (("dist", "Module-level d_CohI"), ("obstruct", "Lower bound on d_IHC")):
        sub = commands.add_parser(name, help=help_text, parents=[common])
        sub.add_argument("first")
        sub.add_argument("second")
        if name == "obstruct":
            sub.add_argument("--eps-max", dest="eps_max", type=_epsilon_arg, help="Scan epsilon up to this rational")
            sub.add_argument("--family", help="Automorphism family of the common base")

    sub = commands.add_parser("verify", help="Check an interleaving certificate", parents=[common])
    sub.add_argument("first")
    sub.add_argument("second")
    sub.add_argument("certificate")

    sub = commands.add_parser("bounds", help="Closed-form upper bounds", parents=[common])
    sub.add_argument("first")
    sub.add_argument("second", nargs="?")

    sub = commands.add_parser("formality", help="Check an H-formality certificate", parents=[common])
    sub.add_argument("file")
    sub.add_argument("certificate")

    sub = commands.add_parser("run-corpus", help="Reproduce the corpus", parents=[common])
    sub.add_argument("names", nargs="*", help="Entries to run (default: all)")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    # Configure logging
    log_level = logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(level=log_level, format="%(asctime)s [%(levelname)s] %(name)s: %(message)s")

    config = load_config(args.config)
    session = Session(args, config)
    try:
        return COMMANDS[args.command](session)
    except (PersistenceCDGAError, OSError) as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
