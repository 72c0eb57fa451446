from itertools import permutations, product

import numpy as np
import pytest

from arrangement import (
    Hyperplane, Sign, bounded_complex, cell_vertices, enumerate_faces, render_svg,
)
from errors import CapacityExceeded, UnsupportedDimension
from exact import feasible_witness, is_bounded


def triangle():
    # T*P^2-Schnitt: x = 0, y = 0, x + y = 1
    return [Hyperplane((1, 0), 0), Hyperplane((0, 1), 0), Hyperplane((1, 1), 1)]


def test_single_point_on_a_line():
    faces = enumerate_faces([Hyperplane((1,), 0)])
    assert [f.label for f in faces] == ["-", "0", "+"]
    assert [f.dim for f in faces] == [1, 0, 1]
    assert [f.bounded for f in faces] == [False, True, False]
    assert bounded_complex(faces).counts == (1, 0)


def test_two_points_on_a_line():
    faces = enumerate_faces([Hyperplane((1,), 0), Hyperplane((1,), 1)])
    assert len(faces) == 5
    cx = bounded_complex(faces)
    assert cx.counts == (2, 1)
    assert cx.euler_sum == 1


def test_triangle_faces_and_complex():
    faces = enumerate_faces(triangle())
    by_dim = [sum(1 for f in faces if f.dim == k) for k in range(3)]
    assert by_dim == [3, 9, 7]
    cx = bounded_complex(faces)
    assert cx.counts == (3, 3, 1)
    assert cx.euler_sum == 1


def test_faces_come_in_lexicographic_order():
    faces = enumerate_faces(triangle())
    signs = [tuple(int(s) for s in f.sign) for f in faces]
    assert signs == sorted(signs)


def test_witness_realizes_sign_vector():
    hps = triangle() + [Hyperplane((1, -1), "1/3")]
    for f in enumerate_faces(hps):
        for h, s in zip(hps, f.sign):
            assert h.constraint(s).holds(f.witness)


def _exhaustive_signs(hps):
    n = hps[0].dim
    found = []
    for signs in product((Sign.MINUS, Sign.ZERO, Sign.PLUS), repeat=len(hps)):
        cs = [h.constraint(s) for h, s in zip(hps, signs)]
        if feasible_witness(cs, n) is not None:
            found.append(signs)
    return found


def test_enumeration_matches_exhaustive_oracle():
    rng = np.random.default_rng(5)
    for _ in range(8):
        d = int(rng.integers(2, 6))
        hps = []
        while len(hps) < d:
            u = [int(x) for x in rng.integers(-2, 3, size=2)]
            if u == [0, 0]:
                continue
            hps.append(Hyperplane(u, int(rng.integers(-2, 3))))
        faces = enumerate_faces(hps)
        assert [f.sign for f in faces] == _exhaustive_signs(hps)


@pytest.mark.parametrize("n", [2, 3])
def test_bounded_flag_agrees_with_recession_cone(n):
    rng = np.random.default_rng([11, n])
    for _ in range(6):
        d = int(rng.integers(n, n + 3))
        hps = []
        while len(hps) < d:
            u = [int(x) for x in rng.integers(-2, 3, size=n)]
            if not any(u):
                continue
            hps.append(Hyperplane(u, int(rng.integers(-2, 3))))
        for f in enumerate_faces(hps):
            cs = [h.constraint(s) for h, s in zip(hps, f.sign)]
            assert f.bounded == is_bounded(cs, n), f.label


def test_parallel_lines_bound_nothing():
    hps = [Hyperplane((1, 0), 0), Hyperplane((1, 0), 1), Hyperplane((2, 0), 5)]
    assert not any(f.bounded for f in enumerate_faces(hps))


def test_permuting_hyperplanes_keeps_counts():
    hps = triangle() + [Hyperplane((1, 2), "1/3")]
    expected = bounded_complex(enumerate_faces(hps)).counts
    for perm in list(permutations(range(4)))[:6]:
        cx = bounded_complex(enumerate_faces([hps[i] for i in perm]))
        assert cx.counts == expected


def test_adding_a_hyperplane_never_decreases_counts():
    before = bounded_complex(enumerate_faces(triangle())).counts
    after = bounded_complex(enumerate_faces(triangle() + [Hyperplane((1, 1), "1/2")])).counts
    assert after == (5, 6, 2)
    assert all(a >= b for a, b in zip(after, before))


def test_parallel_pair_keeps_bounded_edge():
    # {e1, e1, e2}: keine beschränkte Kammer, aber Kante und zwei Ecken
    hps = [Hyperplane((1, 0), 0), Hyperplane((1, 0), 1), Hyperplane((0, 1), 0)]
    assert bounded_complex(enumerate_faces(hps)).counts == (2, 1, 0)


def test_cell_vertices_of_triangle():
    cx = bounded_complex(enumerate_faces(triangle()))
    (cell,) = cx.faces_by_dim[2]
    assert len(cell_vertices(cx, cell)) == 3


def test_zero_normal_is_rejected():
    with pytest.raises(ValueError):
        Hyperplane((0, 0), 1)


def test_capacity_limit():
    hps = [Hyperplane((1,), k) for k in range(15)]
    with pytest.raises(CapacityExceeded):
        enumerate_faces(hps)


# -----------------------------
# SVG
# -----------------------------
def test_render_svg_structure():
    hps = triangle()
    svg = render_svg(hps, bounded_complex(enumerate_faces(hps)))
    assert svg.lstrip().startswith("<?xml")
    assert svg.count('id="hyperplane-') == 3
    assert svg.count('id="cell-') == 1
    assert 'id="vertices"' in svg


def test_render_svg_is_deterministic(tmp_path):
    hps = triangle()
    cx = bounded_complex(enumerate_faces(hps))
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    a.write_text(render_svg(hps, cx), encoding="utf-8")
    b.write_text(render_svg(hps, cx), encoding="utf-8")
    assert a.read_bytes() == b.read_bytes()


def test_render_svg_needs_plane():
    hps = [Hyperplane((1, 0, 0), 0), Hyperplane((0, 1, 0), 0), Hyperplane((0, 0, 1), 0)]
    with pytest.raises(UnsupportedDimension):
        render_svg(hps, bounded_complex(enumerate_faces(hps)))
