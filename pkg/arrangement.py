"""
Flächen einer rationalen Hyperebenen-Anordnung im R^n.

Jede Fläche ist durch ihren Vorzeichenvektor (-, 0, + pro Hyperebene)
festgelegt. Aufzählung: Tiefensuche in lexikographischer Ordnung
MINUS < ZERO < PLUS, unzulässige Teilmuster werden sofort abgeschnitten.
Beschränktheit über die Strahlen der zentralen Anordnung.
"""
import logging
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from itertools import combinations

from errors import CapacityExceeded, ComplexClosureViolation, UnsupportedDimension
from exact import (
    LinearConstraint, Relation, as_vec, dot, feasible_witness, is_zero_vec,
    rank, solve_affine, to_rat,
)

logger = logging.getLogger(__name__)

MAX_HYPERPLANES = 14
MAX_DIM = 4


class Sign(IntEnum):
    MINUS = -1
    ZERO = 0
    PLUS = 1

    @property
    def symbol(self) -> str:
        return {-1: "-", 0: "0", 1: "+"}[int(self)]


_RELATION = {Sign.MINUS: Relation.LT, Sign.ZERO: Relation.EQ, Sign.PLUS: Relation.GT}


@dataclass(frozen=True)
class Hyperplane:
    """<x, normal> = offset"""
    normal: tuple
    offset: object

    def __post_init__(self):
        object.__setattr__(self, "normal", as_vec(self.normal))
        object.__setattr__(self, "offset", to_rat(self.offset))
        if is_zero_vec(self.normal):
            raise ValueError("hyperplane normal must be nonzero")

    @property
    def dim(self) -> int:
        return len(self.normal)

    def constraint(self, sign: Sign) -> LinearConstraint:
        return LinearConstraint(self.normal, _RELATION[sign], self.offset)


@dataclass(frozen=True)
class Face:
    sign: tuple  # tuple[Sign, ...]
    dim: int
    bounded: bool
    witness: tuple

    @property
    def label(self) -> str:
        return "".join(s.symbol for s in self.sign)


@dataclass(frozen=True)
class BoundedComplex:
    n: int
    faces_by_dim: tuple  # faces_by_dim[k] = beschränkte k-Flächen

    @property
    def counts(self) -> tuple:
        return tuple(len(fs) for fs in self.faces_by_dim)

    @property
    def euler_sum(self) -> int:
        return sum((-1) ** k * d for k, d in enumerate(self.counts))


# -----------------------------
# Aufzählung
# -----------------------------
def _check_capacity(hps) -> int:
    if not hps:
        raise ValueError("at least one hyperplane is required")
    n = hps[0].dim
    if any(h.dim != n for h in hps):
        raise ValueError("hyperplanes must share one ambient dimension")
    if len(hps) > MAX_HYPERPLANES or n > MAX_DIM:
        raise CapacityExceeded(
            f"arrangement of {len(hps)} hyperplanes in R^{n} exceeds "
            f"the capacity d <= {MAX_HYPERPLANES}, n <= {MAX_DIM}",
            d=len(hps), n=n,
        )
    return n


def _side(h: Hyperplane, x) -> Sign:
    v = dot(h.normal, x) - h.offset
    return Sign.PLUS if v > 0 else Sign.MINUS if v < 0 else Sign.ZERO


def _central_rays(hps, n: int):
    """
    Vorzeichenvektoren der Strahlen der zentralen Anordnung <x, u_k> = 0.
    Jeder Strahl liegt im Kern einer (n-1)-Teilmenge vom Rang n-1.
    None, wenn die Normalen R^n nicht aufspannen (dann ist keine Fläche beschränkt).
    """
    normals = [h.normal for h in hps]
    if rank(normals) < n:
        return None
    rays = set()
    for S in combinations(range(len(hps)), n - 1):
        kernel = solve_affine([normals[i] for i in S], [0] * (n - 1), dim=n).nullspace
        if len(kernel) != 1:
            continue
        signs = tuple((dot(u, kernel[0]) > 0) - (dot(u, kernel[0]) < 0) for u in normals)
        rays.add(signs)
        rays.add(tuple(-s for s in signs))
    return rays


def _bounded(sign, rays) -> bool:
    # unbeschränkt gdw. ein Strahl konform zum Vorzeichenvektor ist
    if rays is None:
        return False
    return not any(all(r == 0 or r == s for r, s in zip(ray, sign)) for ray in rays)


def enumerate_faces(hps) -> list[Face]:
    """Alle nichtleeren Vorzeichenzellen, lexikographisch sortiert."""
    hps = list(hps)
    n = _check_capacity(hps)
    d = len(hps)
    rays = _central_rays(hps, n)
    faces: list[Face] = []
    solved = 0

    def extend(prefix: list, cs: list, witness, zeros: list):
        nonlocal solved
        k = len(prefix)
        zero_rank = rank(zeros)
        if k == d:
            faces.append(Face(
                sign=tuple(prefix),
                dim=n - zero_rank,
                bounded=_bounded(prefix, rays),
                witness=witness,
            ))
            return
        h = hps[k]
        here = _side(h, witness)
        for s in (Sign.MINUS, Sign.ZERO, Sign.PLUS):
            c = h.constraint(s)
            if s is here:
                w = witness
            elif zero_rank == n:
                # die Region ist nur noch der Punkt witness
                continue
            else:
                solved += 1
                w = feasible_witness(cs + [c], n)
                if w is None:
                    continue
            extend(prefix + [s], cs + [c], w, zeros + [h.normal] if s is Sign.ZERO else zeros)

    extend([], [], tuple(Fraction(0) for _ in range(n)), [])
    logger.debug("enumerate_faces: d=%d n=%d, %d feasibility solves, %d faces",
                 d, n, solved, len(faces))
    return faces


def _in_closure(vertex: Face, face: Face) -> bool:
    return all(v == f or v is Sign.ZERO for v, f in zip(vertex.sign, face.sign))


def bounded_complex(faces) -> BoundedComplex:
    """
    Alle beschränkten Flächen (mit ihren Rändern), nach Dimension.
    Prüft die Abgeschlossenheit: jede nichtleere Randzelle einer
    beschränkten Fläche muss wieder dabei sein.
    """
    faces = list(faces)
    if not faces:
        raise ValueError("no faces given")
    n = len(faces[0].witness)
    by_sign = {f.sign: f for f in faces}
    kept = [f for f in faces if f.bounded]
    kept_signs = {f.sign for f in kept}

    for f in kept:
        for i, s in enumerate(f.sign):
            if s is Sign.ZERO:
                continue
            boundary = f.sign[:i] + (Sign.ZERO,) + f.sign[i + 1:]
            if boundary in by_sign and boundary not in kept_signs:
                raise ComplexClosureViolation(
                    f"face {f.label} is bounded but its boundary cell "
                    f"{by_sign[boundary].label} is not",
                    face=f.label,
                )

    faces_by_dim = tuple(
        tuple(f for f in kept if f.dim == k) for k in range(n + 1)
    )
    return BoundedComplex(n=n, faces_by_dim=faces_by_dim)


def cell_vertices(complex_: BoundedComplex, face: Face) -> list[Face]:
    """Ecken (0-Flächen) im Abschluss einer beschränkten Fläche."""
    return [v for v in complex_.faces_by_dim[0] if _in_closure(v, face)]


# -----------------------------
# SVG
# -----------------------------
def render_svg(hps, complex_: BoundedComplex, title: str | None = None) -> str:
    hps = list(hps)
    n = hps[0].dim if hps else complex_.n
    if n != 2 or complex_.n != 2:
        raise UnsupportedDimension(f"render_svg needs n = 2, got n = {n}", n=n)

    # matplotlib erst hier laden, die exakten Teile brauchen es nicht
    from plots.arrangement_plot import ArrangementPlot

    plot = ArrangementPlot()
    plot.update_plot(hps, complex_, title=title)
    return plot.to_svg()
