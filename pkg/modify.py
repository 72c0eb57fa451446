"""
Modifikation toroidaler Hyperkähler-Daten: neuer Flat u_{d+1} = sum xi_i u_i
auf Level eps, dazu die Gutheits-Prüfung und die b_2 + 1 Kontrolle.

Außerdem die Polytop-Seite des symplektischen Schnitts (Moment-Bilder).
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from errors import (
    BettiIncrementViolation, EulerBookkeepingViolation, GoodnessViolation, HKModError,
    PickSizeMismatch, ZeroCircle,
)
from exact import (
    LinearConstraint, Relation, as_vec, dot, feasible_witness, format_rat, rank,
    solve_affine, to_rat, unit_vec,
)
from toric import (
    Diagnostic, Level3, ToricHKData, betti, euler_characteristic, flats_meet,
    orbifold_check, validate,
)

logger = logging.getLogger(__name__)


# -----------------------------
# Datentypen
# -----------------------------
@dataclass(frozen=True)
class CirclePick:
    """Koeffizienten xi des gewählten Kreises, ein Eintrag pro Flat."""
    xi: tuple

    def __post_init__(self):
        xi = tuple(self.xi)
        for x in xi:
            if isinstance(x, bool) or Fraction(x).denominator != 1:
                raise ValueError(f"circle coefficients must be integers, got {xi}")
        object.__setattr__(self, "xi", tuple(int(x) for x in xi))


@dataclass(frozen=True)
class Step:
    pick: CirclePick
    eps: Level3

    def __post_init__(self):
        if not isinstance(self.pick, CirclePick):
            object.__setattr__(self, "pick", CirclePick(self.pick))
        object.__setattr__(self, "eps", Level3.of(self.eps))

    def to_document(self) -> dict:
        return {"xi": list(self.pick.xi),
                "epsilon": [format_rat(x) for x in self.eps.as_tuple()]}


@dataclass(frozen=True)
class Goodness:
    level_forced: bool
    extended_orbifold: bool
    normal: tuple
    forced: tuple = ()
    diagnostics: tuple = ()

    @property
    def good(self) -> bool:
        return not self.level_forced and self.extended_orbifold


@dataclass(frozen=True)
class EulerBookkeeping:
    chi_before: int
    chi_after: int
    new_fixed_points: int


# -----------------------------
# Neuer Flat
# -----------------------------
def new_flat_normal(data: ToricHKData, pick: CirclePick) -> tuple:
    if len(pick.xi) != data.d:
        raise PickSizeMismatch(f"circle pick has {len(pick.xi)} entries, data has {data.d} flats",
                               expected=data.d, got=len(pick.xi))
    u = tuple(sum(x * f.u[i] for x, f in zip(pick.xi, data.flats)) for i in range(data.n))
    if all(x == 0 for x in u):
        raise ZeroCircle(f"sum xi_i u_i vanishes for xi = {list(pick.xi)}", xi=list(pick.xi))
    return u


def forced_levels(data: ToricHKData, pick: CirclePick) -> list[Level3]:
    """
    Level, auf denen der neue Flat einen Schnitt von Flats ganz enthalten
    würde: für treffende S mit u_{d+1} = sum_S c_k u_k ist <y, u_{d+1}>
    dort konstant sum_S c_k lambda_k. Teilmengen bis Größe n reichen,
    eine Basis-Teilmenge liefert denselben Wert.
    """
    u_new = new_flat_normal(data, pick)
    found = set()
    for size in range(1, min(data.d, data.n) + 1):
        for S in combinations(range(data.d), size):
            if not flats_meet(data, S):
                continue
            columns = [[data.flats[k].u[i] for k in S] for i in range(data.n)]
            sol = solve_affine(columns, u_new)
            if sol is None:
                continue
            c = sol.witness
            found.add(Level3(*(
                sum((ck * data.flats[k].level.component(axis) for ck, k in zip(c, S)), Fraction(0))
                for axis in (1, 2, 3)
            )))
    return sorted(found)


def goodness(data: ToricHKData, pick: CirclePick, eps) -> Goodness:
    eps = Level3.of(eps)
    u_new = new_flat_normal(data, pick)
    forced = tuple(forced_levels(data, pick))
    level_forced = eps in forced
    extended_orbifold = orbifold_check(data.with_flat(u_new, eps))

    diags = []
    if level_forced:
        diags.append(Diagnostic("ForcedLevel",
                                f"level {eps} is forced for the circle {list(pick.xi)}"))
    if not extended_orbifold:
        diags.append(Diagnostic("ExtendedNotOrbifold",
                                f"after adding u = {list(u_new)} at {eps}, {data.n + 1} flats meet"))
    return Goodness(level_forced, extended_orbifold, u_new, forced, tuple(diags))


def is_good(data: ToricHKData, pick: CirclePick, eps) -> bool:
    return goodness(data, pick, eps).good


# -----------------------------
# Modifikation
# -----------------------------
def _apply(data: ToricHKData, pick: CirclePick, eps: Level3, g: Goodness) -> ToricHKData:
    if not g.good:
        raise GoodnessViolation("; ".join(dg.message for dg in g.diagnostics),
                                diagnostics=g.diagnostics)
    result = data.with_flat(g.normal, eps)

    b2_before = betti(data)[1]
    b2_after = betti(result)[1]
    if b2_after != b2_before + 1:
        raise BettiIncrementViolation(
            f"b_2 went from {b2_before} to {b2_after}, expected {b2_before + 1}",
            before=b2_before, after=b2_after)
    logger.info("modify: u = %s at %s, b_2 %d -> %d", list(g.normal), eps, b2_before, b2_after)
    return result


def modify(data: ToricHKData, pick: CirclePick, eps) -> ToricHKData:
    eps = Level3.of(eps)
    return _apply(data, pick, eps, goodness(data, pick, eps))


def iterate(data: ToricHKData, steps, checks: list | None = None) -> ToricHKData:
    """
    Schritte der Reihe nach. Fehler tragen den Index des Schritts (`step`);
    `checks` sammelt, falls gegeben, das Goodness-Ergebnis jedes Schritts.
    """
    for i, step in enumerate(steps):
        if not isinstance(step, Step):
            step = Step(*step)
        eps = Level3.of(step.eps)
        try:
            g = goodness(data, step.pick, eps)
            if checks is not None:
                checks.append(g)
            data = _apply(data, step.pick, eps, g)
        except GoodnessViolation as e:
            raise GoodnessViolation(f"step {i}: {e}", diagnostics=e.diagnostics, step=i) from e
        except HKModError as e:
            e.details["step"] = i
            raise
    return data


def euler_bookkeeping(data: ToricHKData, pick: CirclePick, eps) -> EulerBookkeeping:
    """
    chi(M~) = chi(M) + Anzahl neuer Torus-Fixpunkte auf dem neuen Flat,
    d.h. (n-1)-Teilmengen, die zusammen mit u_{d+1} eine Basis bilden.
    """
    result = modify(data, pick, eps)
    u_new = result.flats[-1].u
    new_points = sum(
        1 for S in combinations(range(data.d), data.n - 1)
        if rank([data.flats[k].u for k in S] + [u_new]) == data.n
    )
    before = euler_characteristic(data)
    after = euler_characteristic(result)
    if after != before + new_points:
        raise EulerBookkeepingViolation(
            f"chi went from {before} to {after}, expected {before} + {new_points}",
            before=before, after=after, new_fixed_points=new_points)
    return EulerBookkeeping(before, after, new_points)


# -----------------------------
# Zufällige gute Instanzen (b_2 + 1 Suite)
# -----------------------------
_MAX_TRIES = 200


def _random_level(rng) -> Level3:
    return Level3(*(Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4))) for _ in range(3)))


def random_good_instance(rng, max_entry: int = 3):
    """(data, pick, eps) mit n in {1,2,3}, d+1 <= 8, Normaleneinträge in [-max_entry, max_entry]."""
    n = int(rng.integers(1, 4))
    d = int(rng.integers(n, min(n + 3, 7) + 1))
    for _ in range(_MAX_TRIES):
        normals = [tuple(int(x) for x in rng.integers(-max_entry, max_entry + 1, size=n))
                   for _ in range(d)]
        if any(all(x == 0 for x in u) for u in normals) or rank(normals) < n:
            continue
        data = ToricHKData.build(n, [(u, _random_level(rng)) for u in normals])
        if validate(data) or not orbifold_check(data):
            continue
        pick = CirclePick(tuple(int(x) for x in rng.integers(-2, 3, size=d)))
        try:
            u_new = new_flat_normal(data, pick)
        except ZeroCircle:
            continue
        if any(abs(x) > max_entry for x in u_new):
            continue
        eps = _random_level(rng)
        if is_good(data, pick, eps):
            return data, pick, eps
    raise RuntimeError(f"no good instance found in {_MAX_TRIES} tries")


@dataclass
class VerifyReport:
    seed: int
    count: int
    passed: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.count

    def to_dict(self) -> dict:
        return {"seed": self.seed, "count": self.count, "passed": self.passed,
                "failures": list(self.failures)}


def verify_b2_increment(seed: int, count: int) -> VerifyReport:
    """Jede Instanz i bekommt ihren eigenen Generator aus (seed, i)."""
    report = VerifyReport(seed, count)
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        data, pick, eps = random_good_instance(rng)
        try:
            result = modify(data, pick, eps)
            if euler_characteristic(result) < euler_characteristic(data):
                raise EulerBookkeepingViolation("euler characteristic decreased")
        except (BettiIncrementViolation, EulerBookkeepingViolation) as e:
            report.failures.append({"instance": i, "n": data.n, "d": data.d, "error": str(e)})
            continue
        report.passed += 1
    logger.info("verify: %d/%d instances passed (seed %d)", report.passed, count, seed)
    return report


# -----------------------------
# Polytope (Moment-Bilder)
# -----------------------------
@dataclass(frozen=True)
class Polytope:
    """{x : <x, a> >= c für alle (a, c)}; darf redundant sein."""
    constraints: tuple
    dim: int

    def __post_init__(self):
        cs = tuple((as_vec(a), to_rat(c)) for a, c in self.constraints)
        for a, _ in cs:
            if len(a) != self.dim:
                raise ValueError(f"constraint normal of length {len(a)} in a polytope of dim {self.dim}")
        object.__setattr__(self, "constraints", cs)

    @classmethod
    def from_box(cls, intervals) -> "Polytope":
        intervals = list(intervals)
        dim = len(intervals)
        cs = []
        for i, (lo, hi) in enumerate(intervals):
            cs.append((unit_vec(dim, i), lo))
            cs.append((unit_vec(dim, i, -1), -to_rat(hi)))
        return cls(tuple(cs), dim)

    def linear(self) -> list[LinearConstraint]:
        return [LinearConstraint(a, Relation.GE, c) for a, c in self.constraints]

    def is_empty(self) -> bool:
        return feasible_witness(self.linear(), self.dim) is None

    def __contains__(self, x) -> bool:
        x = as_vec(x)
        return all(dot(a, x) >= c for a, c in self.constraints)

    def _same_dim(self, other: "Polytope") -> None:
        if other.dim != self.dim:
            raise ValueError(f"polytope dims differ: {self.dim} vs {other.dim}")

    def intersect(self, other: "Polytope") -> "Polytope":
        self._same_dim(other)
        return Polytope(self.constraints + other.constraints, self.dim)

    def translation(self, shift) -> "Polytope":
        # <x - s, a> >= c  <=>  <x, a> >= c + <s, a>
        s = as_vec(shift)
        if len(s) != self.dim:
            raise ValueError(f"shift of length {len(s)} for a polytope of dim {self.dim}")
        return Polytope(tuple((a, c + dot(s, a)) for a, c in self.constraints), self.dim)


def symplectic_cut_polytope(P: Polytope, a, eps) -> Polytope:
    """P geschnitten mit {<x, a> >= eps}; leer ist erlaubt."""
    return P.intersect(Polytope(((a, eps),), P.dim))


def generalized_cut(P: Polytope, Delta: Polytope, shift) -> Polytope:
    return P.intersect(Delta.translation(shift))


def polytope_contains(P: Polytope, Q: Polytope) -> bool:
    """Q ⊆ P, exakt: kein Punkt von Q verletzt eine Ungleichung von P."""
    P._same_dim(Q)
    base = Q.linear()
    for a, c in P.constraints:
        if feasible_witness(base + [LinearConstraint(a, Relation.LT, c)], Q.dim) is not None:
            return False
    return True


def polytope_vertices(P: Polytope) -> list[tuple]:
    """Ecken als exakte Punkte, lexikographisch sortiert."""
    found = set()
    for S in combinations(P.constraints, P.dim):
        normals = [a for a, _ in S]
        if rank(normals) < P.dim:
            continue
        x = solve_affine(normals, [c for _, c in S]).witness
        if x in P:
            found.add(x)
    return sorted(found)


def collapsed_facets(P: Polytope, Delta: Polytope, shift) -> list[int]:
    """
    Indizes der Facetten des verschobenen Delta, die den verallgemeinerten
    Schnitt berühren. Deren Normalen erzeugen die Stabilisatoren am Rand.
    """
    cut = generalized_cut(P, Delta, shift)
    base = cut.linear()
    if feasible_witness(base, cut.dim) is None:
        return []
    moved = Delta.translation(shift)
    return [
        i for i, (a, c) in enumerate(moved.constraints)
        if feasible_witness(base + [LinearConstraint(a, Relation.EQ, c)], cut.dim) is not None
    ]
