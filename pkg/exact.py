"""
Exakte rationale lineare Algebra.

Alles hier rechnet mit fractions.Fraction bzw. int, nie mit float:
Rang (Bareiss, bruchfrei), affine Gleichungssysteme (reduzierte
Zeilenstufenform), Zulässigkeit und Beschränktheit von Systemen mit
strikten Ungleichungen (Fourier-Motzkin).
"""
import logging
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd, lcm

from errors import EmptyRegion

logger = logging.getLogger(__name__)

Rat = Fraction
RatVec = tuple  # tuple[Fraction, ...]
RatMat = tuple  # tuple[RatVec, ...]

_RAT_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


# -----------------------------
# Rationale Zahlen / Vektoren
# -----------------------------
def parse_rat(text: str) -> Fraction:
    """
    "p/q" oder "p" -> Fraction. Keine Dezimalzahlen, kein Nenner 0.
      "-3/2" -> Fraction(-3, 2)
      "4/2"  -> Fraction(2, 1)
    """
    m = _RAT_RE.match(str(text))
    if not m:
        raise ValueError(f"not a rational of the form p/q: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rat(q) -> str:
    # str(Fraction) ist schon gekürzt, Nenner 1 fällt weg
    return str(Fraction(q))


def to_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rat(x)
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


def as_vec(xs) -> RatVec:
    return tuple(to_rat(x) for x in xs)


def as_mat(rows) -> RatMat:
    m = tuple(as_vec(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("matrix rows must have equal length")
    return m


def unit_vec(dim: int, i: int, scale=1) -> RatVec:
    return tuple(Fraction(scale) if j == i else Fraction(0) for j in range(dim))


def dot(a, b) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def is_zero_vec(v) -> bool:
    return all(x == 0 for x in v)


# -----------------------------
# Rang (Bareiss)
# -----------------------------
def _integer_rows(rows: RatMat) -> list[list[int]]:
    out = []
    for row in rows:
        m = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * m) for x in row])
    return out


def rank(A) -> int:
    """Exakter Rang über Q. Zeilen werden vorab ganzzahlig skaliert."""
    M = _integer_rows(as_mat(A))
    if not M or not M[0]:
        return 0
    m, n = len(M), len(M[0])
    r = 0
    prev = 1
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, m):
            for j in range(c + 1, n):
                # Division ist exakt (Sylvester-Identität)
                M[i][j] = (M[r][c] * M[i][j] - M[i][c] * M[r][j]) // prev
            M[i][c] = 0
        prev = M[r][c]
        r += 1
    return r


def det(A) -> Fraction:
    A = as_mat(A)
    if any(len(r) != len(A) for r in A):
        raise ValueError("det needs a square matrix")
    M = [list(r) for r in A]
    n = len(M)
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            result = -result
        result *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return result


# -----------------------------
# Affine Systeme A x = b
# -----------------------------
@dataclass(frozen=True)
class AffineSolution:
    witness: RatVec
    nullspace: tuple  # tuple[RatVec, ...], spannt ker A


def solve_affine(A, b, dim: int | None = None) -> AffineSolution | None:
    """
    Löst A x = b exakt. None, wenn das System widersprüchlich ist.

    Zeuge: reduzierte Zeilenstufenform, Pivots von links,
    freie Variablen = 0. Nullraum-Basis: eine Richtung pro freier Variable
    (freie Variable = 1, die übrigen freien = 0).
    `dim` wird nur gebraucht, wenn A keine Zeilen hat.
    """
    A = as_mat(A)
    b = as_vec(b)
    if len(A) != len(b):
        raise ValueError(f"A has {len(A)} rows but b has {len(b)} entries")
    ncols = len(A[0]) if A else dim
    if ncols is None:
        raise ValueError("dim is required for a system without rows")

    rows = [list(r) + [bi] for r, bi in zip(A, b)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1

    if any(rows[i][ncols] != 0 for i in range(r, len(rows))):
        return None

    witness = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        witness[c] = rows[i][ncols]

    basis = []
    pivot_set = set(pivots)
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][f]
        basis.append(tuple(v))

    return AffineSolution(tuple(witness), tuple(basis))


# -----------------------------
# Lineare Bedingungen
# -----------------------------
class Relation(Enum):
    LT = "<"
    LE = "<="
    EQ = "="
    GE = ">="
    GT = ">"

    def closed(self) -> "Relation":
        return {Relation.LT: Relation.LE, Relation.GT: Relation.GE}.get(self, self)

    def holds(self, lhs, rhs) -> bool:
        if self is Relation.LT:
            return lhs < rhs
        if self is Relation.LE:
            return lhs <= rhs
        if self is Relation.EQ:
            return lhs == rhs
        if self is Relation.GE:
            return lhs >= rhs
        return lhs > rhs


@dataclass(frozen=True)
class LinearConstraint:
    """<normal, x> relation offset"""
    normal: RatVec
    relation: Relation
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "normal", as_vec(self.normal))
        object.__setattr__(self, "offset", to_rat(self.offset))

    def holds(self, x) -> bool:
        return self.relation.holds(dot(self.normal, x), self.offset)


# -----------------------------
# Fourier-Motzkin mit strikten Ungleichungen
# -----------------------------
# interne Form: (coeffs, bound, strict)  bedeutet  coeffs . t  <  bound  (bzw. <=)

def _normalize(system):
    """
    Skaliert jede Zeile auf einen primitiven ganzzahligen Koeffizientenvektor
    und behält pro Richtung nur die schärfste Schranke.
    Konstante Zeilen werden geprüft: None = Widerspruch.
    """
    best = {}
    for coeffs, bound, strict in system:
        if all(a == 0 for a in coeffs):
            if bound < 0 or (strict and bound == 0):
                return None
            continue
        m = lcm(*(a.denominator for a in coeffs))
        ints = [int(a * m) for a in coeffs]
        g = gcd(*ints)
        key = tuple(a // g for a in ints)
        scaled = bound * m / g
        old = best.get(key)
        if old is None or scaled < old[0] or (scaled == old[0] and strict and not old[1]):
            best[key] = (scaled, strict)
    return [(tuple(Fraction(a) for a in k), b, s) for k, (b, s) in best.items()]


def _eliminate(system, j: int):
    pos, neg, rest = [], [], []
    for row in system:
        a = row[0][j]
        if a > 0:
            pos.append(row)
        elif a < 0:
            neg.append(row)
        else:
            rest.append(row)
    for cp, bp, sp in pos:
        alpha = cp[j]
        for cn, bn, sn in neg:
            beta = -cn[j]
            coeffs = tuple(beta * x + alpha * y for x, y in zip(cp, cn))
            rest.append((coeffs, beta * bp + alpha * bn, sp or sn))
    return _normalize(rest)


def _pick_value(system, j: int, t: list[Fraction]) -> Fraction:
    lo = hi = None
    for coeffs, bound, _strict in system:
        a = coeffs[j]
        if a == 0:
            continue
        rest = bound - sum((coeffs[i] * t[i] for i in range(j)), Fraction(0))
        val = rest / a
        if a > 0:
            hi = val if hi is None else min(hi, val)
        else:
            lo = val if lo is None else max(lo, val)
    if lo is not None and hi is not None:
        return (lo + hi) / 2
    if lo is not None:
        return lo + 1
    if hi is not None:
        return hi - 1
    return Fraction(0)


def _fm_solve(system, k: int) -> list[Fraction] | None:
    system = _normalize(system)
    if system is None:
        return None
    levels = []
    for j in reversed(range(k)):
        levels.append(system)
        system = _eliminate(system, j)
        if system is None:
            return None
    t = [Fraction(0)] * k
    for j in range(k):
        t[j] = _pick_value(levels[k - 1 - j], j, t)
    return t


def feasible_witness(cs, dim: int) -> RatVec | None:
    """
    Punkt, der alle Bedingungen exakt erfüllt (strikte strikt), sonst None.

    Gleichungen werden zuerst über solve_affine eliminiert, der Rest läuft
    durch Fourier-Motzkin auf den Parametern des Lösungsraums.
    Rücksubstitution: Mittelpunkt des zulässigen Intervalls,
    Schranke +-1 bei Halbgeraden, 0 ohne Schranke.
    """
    cs = list(cs)
    for c in cs:
        if len(c.normal) != dim:
            raise ValueError(f"constraint normal has length {len(c.normal)}, expected {dim}")

    eqs = [c for c in cs if c.relation is Relation.EQ]
    sol = solve_affine([c.normal for c in eqs], [c.offset for c in eqs], dim=dim)
    if sol is None:
        return None
    x0, basis = sol.witness, sol.nullspace

    system = []
    for c in cs:
        if c.relation is Relation.EQ:
            continue
        coeffs = tuple(dot(c.normal, v) for v in basis)
        bound = c.offset - dot(c.normal, x0)
        strict = c.relation in (Relation.LT, Relation.GT)
        if c.relation in (Relation.LT, Relation.LE):
            system.append((coeffs, bound, strict))
        else:
            system.append((tuple(-a for a in coeffs), -bound, strict))

    t = _fm_solve(system, len(basis))
    if t is None:
        return None
    x = list(x0)
    for tj, v in zip(t, basis):
        for i in range(dim):
            x[i] += tj * v[i]
    x = tuple(x)
    if not all(c.holds(x) for c in cs):
        raise RuntimeError("Fourier-Motzkin witness violates its constraints")
    return x


def recession_cone_trivial(cs, dim: int) -> bool:
    """
    Ist der Rezessionskegel des Abschlusses {0}?
    (Bedingungen homogenisiert, strikt -> nicht strikt, Offsets 0.)
    Kegel != {0} gdw. es im Parameterraum der Gleichungen eine Richtung
    mit t_i = +-1 gibt; k Parameter -> 2k Richtungen.
    """
    cs = list(cs)
    eqs = [c for c in cs if c.relation is Relation.EQ]
    basis = solve_affine([c.normal for c in eqs], [0] * len(eqs), dim=dim).nullspace
    k = len(basis)
    if k == 0:
        return True
    cone = []
    for c in cs:
        if c.relation is Relation.EQ:
            continue
        coeffs = tuple(dot(c.normal, v) for v in basis)
        if c.relation in (Relation.LT, Relation.LE):
            cone.append((coeffs, Fraction(0), False))
        else:
            cone.append((tuple(-a for a in coeffs), Fraction(0), False))
    for i in range(k):
        e = tuple(Fraction(int(j == i)) for j in range(k))
        minus_e = tuple(-x for x in e)
        for s in (1, -1):
            ray = [(e, Fraction(s), False), (minus_e, Fraction(-s), False)]
            if _fm_solve(cone + ray, k) is not None:
                return False
    return True


def is_bounded(cs, dim: int) -> bool:
    """True gdw. die (nichtleere) Region beschränkt ist."""
    cs = list(cs)
    if feasible_witness(cs, dim) is None:
        raise EmptyRegion("is_bounded called on an empty region")
    return recession_cone_trivial(cs, dim)
