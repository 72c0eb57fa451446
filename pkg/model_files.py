"""
JSON-Dokumente: Modell (n + Flats), Schritte, Polytope.

Rationale Zahlen stehen immer als Strings "p/q" in den Dokumenten.
Fehler im Aufbau -> ParseError mit Zeile (bei JSON-Syntaxfehlern) und
Feldpfad, z. B. "flats[2].lambda[0]".
"""
import hashlib
import json

from errors import ParseError
from exact import format_rat, parse_rat
from modify import CirclePick, Polytope, Step, polytope_vertices
from toric import Flat, Level3, ToricHKData


# -----------------------------
# Hilfen
# -----------------------------
def sha256_hex(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode("utf-8")
    return hashlib.sha256(text).hexdigest()


def dump_document(doc) -> str:
    """Kanonische Ausgabe: sortierte Keys, 2er-Einrückung, Zeilenende."""
    return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from e


def _rat(value, field: str):
    if not isinstance(value, str):
        raise ParseError(f"{field} must be a rational string like \"p/q\", got {value!r}", field=field)
    try:
        return parse_rat(value)
    except ValueError as e:
        raise ParseError(f"{field}: {e}", field=field) from e


def _int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{field} must be an integer, got {value!r}", field=field)
    return value


def _list(value, field: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"{field} must be a list", field=field)
    return value


def _require(doc: dict, key: str, field: str):
    if not isinstance(doc, dict):
        raise ParseError(f"{field or 'document'} must be an object", field=field or None)
    if key not in doc:
        path = f"{field}.{key}" if field else key
        raise ParseError(f"missing field {path!r}", field=path)
    return doc[key]


def _level(value, field: str) -> Level3:
    vals = _list(value, field)
    if len(vals) != 3:
        raise ParseError(f"{field} needs 3 entries, got {len(vals)}", field=field)
    return Level3(*(_rat(x, f"{field}[{i}]") for i, x in enumerate(vals)))


# -----------------------------
# Modell
# -----------------------------
def parse_model(text: str) -> ToricHKData:
    doc = _load_json(text)
    n = _int(_require(doc, "n", ""), "n")
    if n < 1:
        raise ParseError(f"n must be at least 1, got {n}", field="n")
    flats = []
    for k, item in enumerate(_list(_require(doc, "flats", ""), "flats")):
        base = f"flats[{k}]"
        u = [_int(x, f"{base}.u[{i}]") for i, x in enumerate(_list(_require(item, "u", base), f"{base}.u"))]
        lam = _level(_require(item, "lambda", base), f"{base}.lambda")
        flats.append(Flat(tuple(u), lam))
    return ToricHKData(n, tuple(flats))


def model_document(data: ToricHKData) -> dict:
    return {
        "n": data.n,
        "flats": [
            {"u": list(f.u), "lambda": [format_rat(x) for x in f.level.as_tuple()]}
            for f in data.flats
        ],
    }


def serialize_model(data: ToricHKData) -> str:
    return dump_document(model_document(data))


# -----------------------------
# Schritte
# -----------------------------
def parse_steps(text: str) -> list[Step]:
    """Liste von {"xi": [...], "epsilon": [...]} oder {"steps": [...]}."""
    doc = _load_json(text)
    if isinstance(doc, dict):
        doc = _require(doc, "steps", "")
    steps = []
    for i, item in enumerate(_list(doc, "steps")):
        base = f"steps[{i}]"
        xi = [_int(x, f"{base}.xi[{j}]") for j, x in enumerate(_list(_require(item, "xi", base), f"{base}.xi"))]
        eps = _level(_require(item, "epsilon", base), f"{base}.epsilon")
        steps.append(Step(CirclePick(tuple(xi)), eps))
    return steps


def serialize_steps(steps) -> str:
    return dump_document({"steps": [s.to_document() for s in steps]})


# -----------------------------
# Polytope
# -----------------------------
def parse_polytope(text: str) -> Polytope:
    """
    {"box": [["lo", "hi"], ...]} oder
    {"dim": k, "constraints": [{"normal": [...], "offset": "c"}, ...]}  (<x, normal> >= c)
    """
    doc = _load_json(text)
    if isinstance(doc, dict) and "box" in doc:
        intervals = []
        for i, pair in enumerate(_list(doc["box"], "box")):
            pair = _list(pair, f"box[{i}]")
            if len(pair) != 2:
                raise ParseError(f"box[{i}] needs [lo, hi]", field=f"box[{i}]")
            intervals.append((_rat(pair[0], f"box[{i}][0]"), _rat(pair[1], f"box[{i}][1]")))
        return Polytope.from_box(intervals)

    dim = _int(_require(doc, "dim", ""), "dim")
    cs = []
    for i, item in enumerate(_list(_require(doc, "constraints", ""), "constraints")):
        base = f"constraints[{i}]"
        normal = [_rat(x, f"{base}.normal[{j}]")
                  for j, x in enumerate(_list(_require(item, "normal", base), f"{base}.normal"))]
        if len(normal) != dim:
            raise ParseError(f"{base}.normal has length {len(normal)}, expected {dim}", field=f"{base}.normal")
        cs.append((tuple(normal), _rat(_require(item, "offset", base), f"{base}.offset")))
    return Polytope(tuple(cs), dim)


def polytope_document(P: Polytope) -> dict:
    empty = P.is_empty()
    return {
        "dim": P.dim,
        "constraints": [
            {"normal": [format_rat(x) for x in a], "offset": format_rat(c)}
            for a, c in P.constraints
        ],
        "empty": empty,
        "vertices": [] if empty else [[format_rat(x) for x in v] for v in polytope_vertices(P)],
    }
