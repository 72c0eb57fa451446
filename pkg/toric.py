"""
Torische hyperkähler Daten: Normalen u_k in Z^n und Level lambda_k in Q^3.

Die Topologie kommt aus der Anordnung <x, u_k> = lambda_k^axis: der
beschränkte Komplex C mit Anzahlen d_k liefert P_t = sum_k d_k (t^2 - 1)^k.
Flat-Indizes beginnen bei 0.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, gcd

from arrangement import MAX_DIM, MAX_HYPERPLANES, BoundedComplex, Hyperplane, bounded_complex, enumerate_faces
from errors import (
    BettiCrossCheckFailure, DuplicateFlatError, IndexOutOfRange, InvalidToricData,
    NotOrbifold, SliceUnfixable,
)
from exact import as_vec, det, dot, is_zero_vec, rank, solve_affine, to_rat

logger = logging.getLogger(__name__)

ROTATION_ATTEMPTS = 64


# -----------------------------
# Datentypen
# -----------------------------
@dataclass(frozen=True, order=True)
class Level3:
    l1: Fraction
    l2: Fraction
    l3: Fraction

    def __post_init__(self):
        for name in ("l1", "l2", "l3"):
            object.__setattr__(self, name, to_rat(getattr(self, name)))

    @classmethod
    def of(cls, value) -> "Level3":
        if isinstance(value, Level3):
            return value
        vals = tuple(value)
        if len(vals) != 3:
            raise ValueError(f"a level needs 3 entries, got {len(vals)}")
        return cls(*vals)

    @classmethod
    def zero(cls) -> "Level3":
        return cls(0, 0, 0)

    def as_tuple(self) -> tuple:
        return (self.l1, self.l2, self.l3)

    def component(self, axis: int) -> Fraction:
        if axis not in (1, 2, 3):
            raise ValueError(f"axis must be 1, 2 or 3, got {axis}")
        return self.as_tuple()[axis - 1]

    def rotated(self, R) -> "Level3":
        v = self.as_tuple()
        return Level3(*(dot(row, v) for row in R))

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.as_tuple()) + ")"


@dataclass(frozen=True)
class Flat:
    u: tuple
    level: Level3

    def __post_init__(self):
        u = tuple(self.u)
        for x in u:
            if isinstance(x, bool) or Fraction(x).denominator != 1:
                raise ValueError(f"normals must be integer vectors, got {u}")
        object.__setattr__(self, "u", tuple(int(x) for x in u))
        object.__setattr__(self, "level", Level3.of(self.level))


@dataclass(frozen=True)
class ToricHKData:
    n: int
    flats: tuple

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError("quaternionic dimension n must be at least 1")
        object.__setattr__(self, "n", int(self.n))
        flats = tuple(f if isinstance(f, Flat) else Flat(*f) for f in self.flats)
        object.__setattr__(self, "flats", flats)

    @classmethod
    def build(cls, n: int, pairs) -> "ToricHKData":
        return cls(n, tuple(Flat(u, lam) for u, lam in pairs))

    @property
    def d(self) -> int:
        return len(self.flats)

    @property
    def normals(self) -> tuple:
        return tuple(f.u for f in self.flats)

    @property
    def levels(self) -> tuple:
        return tuple(f.level for f in self.flats)

    def with_flat(self, u, level) -> "ToricHKData":
        return ToricHKData(self.n, self.flats + (Flat(u, level),))

    def with_levels(self, levels) -> "ToricHKData":
        return ToricHKData(self.n, tuple(Flat(f.u, lam) for f, lam in zip(self.flats, levels)))


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    indices: tuple = ()
    severity: str = "error"

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message,
                "indices": list(self.indices), "severity": self.severity}


@dataclass(frozen=True)
class PoincarePoly:
    coeffs: tuple  # b_0, b_2, ..., b_2n

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise BettiCrossCheckFailure(f"b_0 must be 1, got coefficients {self.coeffs}")
        if any(b < 0 for b in self.coeffs):
            raise BettiCrossCheckFailure(f"negative Betti number in {self.coeffs}")

    @classmethod
    def from_counts(cls, counts) -> "PoincarePoly":
        # sum_k d_k (t^2 - 1)^k ausmultiplizieren
        n = len(counts) - 1
        coeffs = []
        for j in range(n + 1):
            coeffs.append(sum(counts[k] * comb(k, j) * (-1) ** (k - j) for k in range(j, n + 1)))
        return cls(tuple(coeffs))

    def __call__(self, t):
        return sum(b * t ** (2 * k) for k, b in enumerate(self.coeffs))

    def __str__(self):
        terms = []
        for k, b in enumerate(self.coeffs):
            if b == 0:
                continue
            terms.append(str(b) if k == 0 else f"{b} t^{2 * k}")
        return " + ".join(terms) or "0"


@dataclass(frozen=True)
class StabilizerSpan:
    indices: tuple
    dim: int


@dataclass(frozen=True)
class Topology:
    counts: tuple
    poincare: PoincarePoly
    axis: int
    rotation_index: int
    complex: BoundedComplex
    hyperplanes: tuple


# -----------------------------
# Beispiele
# -----------------------------
def flat_space(n: int) -> ToricHKData:
    """H^n: Standardbasis, alle Level 0."""
    return ToricHKData.build(n, [
        (tuple(1 if j == i else 0 for j in range(n)), Level3.zero()) for i in range(n)
    ])


def multi_instanton(levels) -> ToricHKData:
    """Gibbons-Hawking, n = 1: ein Punkt in R^3 pro Level."""
    return ToricHKData.build(1, [((1,), Level3.of(lam)) for lam in levels])


def taub_nut_chain(levels) -> ToricHKData:
    # Multi-Taub-NUT: topologisch dieselbe Kette wie multi_instanton, nur die Metrik ist anders
    return multi_instanton(levels)


def calabi_tp2(level3=(-1, 0, 0)) -> ToricHKData:
    """T*P^2: u = e1, e2, -(e1+e2)."""
    return ToricHKData.build(2, [
        ((1, 0), Level3.zero()),
        ((0, 1), Level3.zero()),
        ((-1, -1), Level3.of(level3)),
    ])


# -----------------------------
# Validierung
# -----------------------------
def validate(data: ToricHKData) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    n = data.n
    ok_normals = []
    for k, f in enumerate(data.flats):
        if len(f.u) != n:
            diags.append(Diagnostic("DimensionMismatch",
                                    f"flat {k} has a normal of length {len(f.u)}, expected {n}", (k,)))
        elif is_zero_vec(f.u):
            diags.append(Diagnostic("ZeroNormal", f"flat {k} has the zero normal", (k,)))
        else:
            ok_normals.append(f.u)

    if rank(ok_normals) < n:
        diags.append(Diagnostic("SpanFailure", f"the normals do not span R^{n}"))

    for i, j in combinations(range(data.d), 2):
        if data.flats[i] == data.flats[j]:
            diags.append(Diagnostic("DuplicateFlat", f"flats {i} and {j} are identical",
                                    (i, j), severity="warning"))

    if data.d > MAX_HYPERPLANES or n > MAX_DIM:
        diags.append(Diagnostic("CapacityExceeded",
                                f"d = {data.d}, n = {n} exceeds d <= {MAX_HYPERPLANES}, n <= {MAX_DIM}"))
    return diags


def _require_valid(data: ToricHKData) -> None:
    errs = [dg for dg in validate(data) if dg.severity == "error"]
    if errs:
        raise InvalidToricData("; ".join(dg.message for dg in errs), diagnostics=errs)


def _check_indices(data: ToricHKData, S) -> tuple:
    S = tuple(sorted(set(int(k) for k in S)))
    if not S:
        raise ValueError("index subset must be nonempty")
    bad = [k for k in S if k < 0 or k >= data.d]
    if bad:
        raise IndexOutOfRange(f"flat indices {bad} out of range 0..{data.d - 1}", indices=bad)
    return S


# -----------------------------
# Schnitte von Flats
# -----------------------------
def _dependencies(normals) -> tuple:
    """Basis aller c mit sum_k c_k u_k = 0."""
    n = len(normals[0])
    columns = tuple(tuple(u[i] for u in normals) for i in range(n))
    return solve_affine(columns, (0,) * n).nullspace


def _forced_sums(data: ToricHKData, S) -> list[tuple]:
    # sum_k c_k lambda_k für jede Abhängigkeit c
    deps = _dependencies([data.flats[k].u for k in S])
    sums = []
    for c in deps:
        sums.append(tuple(
            sum((ck * data.flats[k].level.component(axis) for ck, k in zip(c, S)), Fraction(0))
            for axis in (1, 2, 3)
        ))
    return sums


def flats_meet(data: ToricHKData, S) -> bool:
    """Ist {<y,u_k> = lambda_k : k in S} für y in R^n x R^3 lösbar?"""
    S = _check_indices(data, S)
    return all(all(x == 0 for x in v) for v in _forced_sums(data, S))


def orbifold_check(data: ToricHKData) -> bool:
    """Höchstens Orbifold-Singularitäten gdw. keine n+1 Flats sich treffen."""
    return not any(flats_meet(data, S) for S in combinations(range(data.d), data.n + 1))


def point_on_flats(data: ToricHKData, S) -> tuple | None:
    """Ein Punkt y (Blöcke y^1, y^2, y^3) im Schnitt der Flats aus S."""
    S = _check_indices(data, S)
    rows = [data.flats[k].u for k in S]
    blocks = []
    for axis in (1, 2, 3):
        sol = solve_affine(rows, [data.flats[k].level.component(axis) for k in S])
        if sol is None:
            return None
        blocks.extend(sol.witness)
    return tuple(blocks)


def stabilizer_span(data: ToricHKData, y) -> StabilizerSpan:
    y = as_vec(y)
    n = data.n
    if len(y) != 3 * n:
        raise ValueError(f"y must have length 3n = {3 * n}, got {len(y)}")
    blocks = [y[j * n:(j + 1) * n] for j in range(3)]
    indices = tuple(
        k for k, f in enumerate(data.flats)
        if all(dot(blocks[j], f.u) == f.level.component(j + 1) for j in range(3))
    )
    return StabilizerSpan(indices, rank([data.flats[k].u for k in indices]))


def smoothness_diagnostics(data: ToricHKData) -> list[Diagnostic]:
    """Treffende n-Teilmengen mit |det| != 1 (echte Orbifold-Punkte)."""
    diags = []
    for S in combinations(range(data.d), data.n):
        normals = [data.flats[k].u for k in S]
        D = det(normals)
        if D == 0 or not flats_meet(data, S):
            continue
        if abs(D) != 1:
            diags.append(Diagnostic("NonUnimodular",
                                    f"flats {list(S)} meet with |det| = {abs(D)}", S, severity="warning"))
    return diags


def vertex_count(data: ToricHKData) -> int:
    """Anzahl der n-Teilmengen mit linear unabhängigen Normalen."""
    return sum(1 for S in combinations(range(data.d), data.n)
               if rank([data.flats[k].u for k in S]) == data.n)


# -----------------------------
# Rationale Drehungen / Schnitt-Treue
# -----------------------------
def _quaternion_rotation(a: int, b: int, c: int, d: int) -> tuple:
    N = a * a + b * b + c * c + d * d
    rows = (
        (a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)),
        (2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)),
        (2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d),
    )
    return tuple(tuple(Fraction(x, N) for x in row) for row in rows)


def rational_rotations(limit: int = ROTATION_ATTEMPTS) -> list[tuple]:
    """
    Feste Folge rationaler SO(3)-Matrizen: Konjugation mit ganzen Quaternionen
    q = (a, b, c, d), a in 1..3, b, c, d in 0..2, (b, c, d) != 0, primitiv,
    sortiert nach |q|^2 und dann absteigend lexikographisch:
    (1,1,0,0), (1,0,1,0), (1,0,0,1), (1,1,1,0), ...
    """
    qs = []
    for a in range(1, 4):
        for b in range(3):
            for c in range(3):
                for d in range(3):
                    if (b, c, d) == (0, 0, 0):
                        continue
                    if gcd(a, b, c, d) != 1:
                        continue
                    qs.append((a, b, c, d))
    qs.sort(key=lambda q: (sum(x * x for x in q), tuple(-x for x in q)))
    return [_quaternion_rotation(*q) for q in qs[:limit]]


_IDENTITY = tuple(tuple(Fraction(int(i == j)) for j in range(3)) for i in range(3))


def _slice_faithful(data: ToricHKData, axis: int, R) -> bool:
    # Schnitt trifft sich <=> Flats treffen sich, für alle |S| <= n+1
    for size in range(2, min(data.d, data.n + 1) + 1):
        for S in combinations(range(data.d), size):
            sums = _forced_sums(data, S)
            if not sums:
                continue
            flats = all(all(x == 0 for x in v) for v in sums)
            sliced = all(dot(R[axis - 1], v) == 0 for v in sums)
            if sliced and not flats:
                return False
    return True


def faithful_rotation(data: ToricHKData, axis: int = 1, attempts: int = ROTATION_ATTEMPTS) -> tuple:
    """(R, index): index 0 = keine Drehung, sonst Position in rational_rotations + 1."""
    if _slice_faithful(data, axis, _IDENTITY):
        return _IDENTITY, 0
    for i, R in enumerate(rational_rotations(attempts), start=1):
        if _slice_faithful(data, axis, R):
            logger.debug("slice at axis %d made faithful by rotation %d", axis, i)
            return R, i
    raise SliceUnfixable(f"no rotation among {attempts} makes the axis-{axis} slice faithful",
                         axis=axis, attempts=attempts)


def slice_hyperplanes(data: ToricHKData, axis: int = 1, R=_IDENTITY) -> tuple:
    return tuple(
        Hyperplane(f.u, f.level.rotated(R).component(axis)) for f in data.flats
    )


# -----------------------------
# Topologie
# -----------------------------
def _require_betti_ready(data: ToricHKData) -> None:
    _require_valid(data)
    dups = [dg for dg in validate(data) if dg.code == "DuplicateFlat"]
    if dups:
        raise DuplicateFlatError("; ".join(dg.message for dg in dups),
                                 indices=[list(dg.indices) for dg in dups])
    if not orbifold_check(data):
        raise NotOrbifold(f"{data.n + 1} flats meet; the space is not an orbifold")


def analyze(data: ToricHKData, axis: int = 1, attempts: int = ROTATION_ATTEMPTS) -> Topology:
    return _analyze(data, int(axis), int(attempts))


@lru_cache(maxsize=256)
def _analyze(data: ToricHKData, axis: int, attempts: int) -> Topology:
    _require_betti_ready(data)
    R, idx = faithful_rotation(data, axis, attempts)
    hps = slice_hyperplanes(data, axis, R)
    cx = bounded_complex(enumerate_faces(hps))
    if cx.euler_sum != 1:
        raise BettiCrossCheckFailure(
            f"sum (-1)^k d_k = {cx.euler_sum} for counts {cx.counts}, expected 1", counts=list(cx.counts))
    poly = PoincarePoly.from_counts(cx.counts)
    logger.debug("analyze: n=%d d=%d counts=%s P=%s", data.n, data.d, cx.counts, poly)
    return Topology(cx.counts, poly, axis, idx, cx, hps)


def poincare_polynomial(data: ToricHKData, axis: int = 1, attempts: int = ROTATION_ATTEMPTS) -> PoincarePoly:
    return analyze(data, axis, attempts).poincare


def betti(data: ToricHKData, axis: int = 1, attempts: int = ROTATION_ATTEMPTS) -> list[int]:
    """[b_0, b_2, ..., b_2n]; für n = 2 gegen b_2 = d_1 - 2 d_2, b_4 = d_2 geprüft."""
    topo = analyze(data, axis, attempts)
    b = list(topo.poincare.coeffs)
    if data.n == 2:
        d = topo.counts
        if b[1] != d[1] - 2 * d[2] or b[2] != d[2]:
            raise BettiCrossCheckFailure(f"Betti {b} disagree with counts {d}", counts=list(d))
    return b


def euler_characteristic(data: ToricHKData, axis: int = 1, attempts: int = ROTATION_ATTEMPTS) -> int:
    topo = analyze(data, axis, attempts)
    chi = sum(topo.poincare.coeffs)
    if not (chi == topo.poincare(1) == topo.poincare(-1) == topo.counts[0]):
        raise BettiCrossCheckFailure(
            f"chi = {chi} but d_0 = {topo.counts[0]}", counts=list(topo.counts))
    return chi
