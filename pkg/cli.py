"""
Kommandozeile: python cli.py <analyze|modify|cut|verify|render|lab> [flags]

Exit-Codes: 0 ok, 1 fachlicher Fehler, 2 Parse-Fehler.
Fehler gehen als JSON-Dokument nach stderr.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

from arrangement import render_svg
from errors import HKModError, ParseError, UnsupportedDimension
from exact import format_rat, parse_rat
from flatlab import SampleConfig, run_lab
from model_files import (
    dump_document, parse_model, parse_polytope, parse_steps, polytope_document,
    serialize_model, sha256_hex,
)
from modify import (
    collapsed_facets, generalized_cut, iterate, symplectic_cut_polytope, verify_b2_increment,
)
from settings import load_settings
from toric import analyze, euler_characteristic, orbifold_check, smoothness_diagnostics, validate

logger = logging.getLogger(__name__)

TOOL_VERSION = "1.0"
COMMANDS = ("analyze", "modify", "cut", "verify", "render", "lab")
RATIONAL_FLAGS = ("--cut-normal", "--cut-offset", "--shift")


# -----------------------------
# Argumente
# -----------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cli.py",
                                     description="Toric hyperkähler modification workbench")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", help="model file (JSON)")
    parser.add_argument("--output", help="output file, default stdout")
    parser.add_argument("--steps", help="modification steps (JSON)")
    parser.add_argument("--axis", type=int, choices=(1, 2, 3), default=1, help="slice axis")
    parser.add_argument("--seed", type=int, help="seed for verify/lab")
    parser.add_argument("--count", type=int, help="number of instances / samples")
    parser.add_argument("--format", choices=("structured", "text"), help="report format")
    parser.add_argument("--svg", help="SVG target for render")
    parser.add_argument("--tol", type=float, help="lab tolerance")
    parser.add_argument("--log-level", dest="log_level",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    parser.add_argument("--polytope", help="polytope document for cut")
    parser.add_argument("--cut-normal", dest="cut_normal", help='e.g. "1,0"')
    parser.add_argument("--cut-offset", dest="cut_offset", help='e.g. "1/2"')
    parser.add_argument("--delta", help="polytope document for the generalized cut")
    parser.add_argument("--shift", help='translation of delta, e.g. "0,1/2"')
    return parser


def join_rational_flags(argv) -> list[str]:
    """'--cut-offset -1/2' -> '--cut-offset=-1/2'; argparse liest -1/2 sonst als Option."""
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        if argv[i] in RATIONAL_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def _rat_list(text: str, flag: str) -> tuple:
    try:
        return tuple(parse_rat(x) for x in text.split(","))
    except ValueError as e:
        raise ParseError(f"{flag}: {e}", field=flag) from e


def _read_text(path: str | None, flag: str) -> str:
    if not path:
        raise ParseError(f"{flag} is required for this command", field=flag)
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}", field=flag, path=path) from e


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -----------------------------
# Berichte
# -----------------------------
def provenance(input_text: str | None, seed: int | None) -> dict:
    return {
        "input_sha256": sha256_hex(input_text) if input_text is not None else None,
        "tool_version": TOOL_VERSION,
        "seed": seed,
    }


def topology_report(data, axis: int = 1, attempts: int = 64) -> dict:
    topo = analyze(data, axis, attempts)
    diags = [dg for dg in validate(data) if dg.severity != "error"]
    diags += smoothness_diagnostics(data)
    return {
        "n": data.n,
        "flats": data.d,
        "axis": axis,
        "rotation_index": topo.rotation_index,
        "d": list(topo.counts),
        "betti": list(topo.poincare.coeffs),
        "poincare": str(topo.poincare),
        "euler": euler_characteristic(data, axis, attempts),
        "orbifold": orbifold_check(data),
        "diagnostics": [dg.to_dict() for dg in diags],
    }


def _text_lines(doc, prefix: str = "") -> list[str]:
    lines = []
    for key in sorted(doc):
        value = doc[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            lines.extend(_text_lines(value, name + "."))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            for i, item in enumerate(value):
                lines.extend(_text_lines(item, f"{name}[{i}]."))
        else:
            lines.append(f"{name}: {json.dumps(value, ensure_ascii=False)}")
    return lines


def emit_report(report: dict, fmt: str = "structured") -> str:
    if fmt == "text":
        return "\n".join(_text_lines(report)) + "\n"
    return dump_document(report)


def error_document(e: Exception) -> str:
    details = getattr(e, "details", {}) or {}
    doc = {"error": e.__class__.__name__, "message": str(e), "details": details}
    return json.dumps(doc, ensure_ascii=False, sort_keys=True, default=str) + "\n"


# -----------------------------
# Kommandos
# -----------------------------
def cmd_analyze(args, settings) -> dict:
    text = _read_text(args.input, "--input")
    data = parse_model(text)
    report = topology_report(data, args.axis, int(settings["rotation_attempts"]))
    report["command"] = "analyze"
    report["provenance"] = provenance(text, None)
    return report


def cmd_modify(args, settings) -> dict:
    text = _read_text(args.input, "--input")
    data = parse_model(text)
    steps = parse_steps(_read_text(args.steps, "--steps"))

    checks = []
    data = iterate(data, steps, checks)

    model_text = serialize_model(data)
    if args.output:
        Path(args.output).write_text(model_text, encoding="utf-8")
    report = topology_report(data, args.axis, int(settings["rotation_attempts"]))
    report["command"] = "modify"
    report["goodness"] = [
        {
            "step": i,
            "normal": list(g.normal),
            "level_forced": g.level_forced,
            "extended_orbifold": g.extended_orbifold,
            "forced_levels": [[format_rat(x) for x in lam.as_tuple()] for lam in g.forced],
            "diagnostics": [dg.to_dict() for dg in g.diagnostics],
        }
        for i, g in enumerate(checks)
    ]
    report["model"] = json.loads(model_text)
    report["provenance"] = provenance(text, None)
    return report


def cmd_cut(args, settings) -> dict:
    text = _read_text(args.polytope, "--polytope")
    P = parse_polytope(text)
    if args.delta:
        Delta = parse_polytope(_read_text(args.delta, "--delta"))
        shift = _rat_list(args.shift, "--shift") if args.shift else (0,) * P.dim
        result = generalized_cut(P, Delta, shift)
        doc = polytope_document(result)
        doc["collapsed_facets"] = collapsed_facets(P, Delta, shift)
    else:
        if not args.cut_normal or args.cut_offset is None:
            raise ParseError("cut needs --cut-normal and --cut-offset, or --delta", field="--cut-normal")
        a = _rat_list(args.cut_normal, "--cut-normal")
        eps = _rat_list(args.cut_offset, "--cut-offset")
        if len(eps) != 1:
            raise ParseError("--cut-offset takes a single rational", field="--cut-offset")
        doc = polytope_document(symplectic_cut_polytope(P, a, eps[0]))
    doc["command"] = "cut"
    doc["provenance"] = provenance(text, None)
    return doc


def cmd_verify(args, settings) -> dict:
    seed = args.seed if args.seed is not None else int(settings["seed"])
    count = args.count if args.count is not None else int(settings["verify_count"])
    report = verify_b2_increment(seed, count).to_dict()
    report["command"] = "verify"
    report["provenance"] = provenance(None, seed)
    return report


def cmd_render(args, settings) -> str:
    data = parse_model(_read_text(args.input, "--input"))
    if data.n != 2:
        raise UnsupportedDimension(f"render needs n = 2, got n = {data.n}", n=data.n)
    topo = analyze(data, args.axis, int(settings["rotation_attempts"]))
    return render_svg(topo.hyperplanes, topo.complex, title=None)


def cmd_lab(args, settings) -> dict:
    config = SampleConfig.from_settings(settings, seed=args.seed, count=args.count, tol=args.tol)
    report = run_lab(config)
    report["command"] = "lab"
    report["provenance"] = provenance(None, config.seed)
    return report


HANDLERS = {
    "analyze": cmd_analyze,
    "modify": cmd_modify,
    "cut": cmd_cut,
    "verify": cmd_verify,
    "render": cmd_render,
    "lab": cmd_lab,
}


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(join_rational_flags(argv))
    settings = load_settings()
    logging.basicConfig(
        level=args.log_level or settings["log_level"],
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    fmt = args.format or settings["format"]

    try:
        result = HANDLERS[args.command](args, settings)
    except ParseError as e:
        sys.stderr.write(error_document(e))
        return 2
    except (HKModError, ValueError) as e:
        logger.debug("command %s failed", args.command, exc_info=True)
        sys.stderr.write(error_document(e))
        return 1

    if args.command == "render":
        _write(args.svg or args.output, result)
        return 0
    _write(args.output if args.command != "modify" else None, emit_report(result, fmt))
    if args.command == "verify" and result["failures"]:
        return 1
    return 0


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
