import cmath
import math

import numpy as np
import pytest

from errors import WeightsNotCoprime, ZeroWeight
from flatlab import (
    HPoint, R3Val, SampleConfig, act_H, angle_error, cut_phi_residual, cut_section,
    estimate_sphere_bound, fibre_align, hs_act, hs_cut_image_member, hs_fibre_type,
    hs_in_cone, hs_mu, hs_partner, hs_phi_residual, hs_same_orbit, mu_H, mu_H_preimage,
    phi_residual, run_lab, sasaki_level_sample, sasaki_modify_weights, sasaki_residual,
    sasaki_t_bound, sphere_moment, triham_residual,
)
from settings import save_settings

TOL = 1e-9


def close(a: R3Val, b: R3Val, tol=TOL) -> bool:
    return (a - b).norm() <= tol


# -----------------------------
# H
# -----------------------------
def test_mu_H_examples():
    assert close(mu_H(HPoint(1, 0)), R3Val(0.5, 0))
    assert close(mu_H(HPoint(0, 0)), R3Val(0, 0))
    assert close(mu_H(HPoint(1, 1)), R3Val(0, 1j))


def test_act_H():
    p = HPoint(1, 1)
    assert act_H(0.0, p).distance(p) <= TOL
    assert act_H(math.pi, p).distance(HPoint(-1, -1)) <= TOL


def test_mu_H_is_invariant():
    rng = np.random.default_rng(1)
    for _ in range(100):
        x = rng.standard_normal(4)
        p = HPoint(complex(x[0], x[1]), complex(x[2], x[3]))
        theta = rng.uniform(0, 2 * math.pi)
        assert close(mu_H(act_H(theta, p)), mu_H(p))


def test_phi_residual():
    assert close(phi_residual(R3Val(0.5), HPoint(1, 0), R3Val(0)), R3Val(0))
    mu_m, eps = R3Val(2, 1j), R3Val(0.5, 3)
    assert close(phi_residual(mu_m, HPoint(0, 0), eps), mu_m - eps)
    assert close(phi_residual(eps, HPoint(0, 0), eps), R3Val(0))


def test_mu_H_preimage_is_onto():
    rng = np.random.default_rng(2)
    for _ in range(2000):
        x = rng.standard_normal(3) * 3
        v = R3Val(x[0], complex(x[1], x[2]))
        assert close(mu_H(mu_H_preimage(v)), v)
    assert close(mu_H(mu_H_preimage(R3Val(-2))), R3Val(-2))
    assert close(mu_H(mu_H_preimage(R3Val(0))), R3Val(0))


def test_fibre_align_examples():
    assert fibre_align(HPoint(1, 0), HPoint(1, 0)) == 0.0
    assert fibre_align(HPoint(1, 0), HPoint(1j, 0)) == pytest.approx(math.pi / 2, abs=TOL)
    assert fibre_align(HPoint(1, 0), HPoint(0, 1)) is None
    assert fibre_align(HPoint(0, 0), HPoint(0, 0)) is None


def test_fibre_align_recovers_angle():
    rng = np.random.default_rng(3)
    for _ in range(500):
        x = rng.standard_normal(4)
        p = HPoint(complex(x[0], x[1]), complex(x[2], x[3]))
        theta = rng.uniform(0, 2 * math.pi)
        found = fibre_align(p, act_H(theta, p))
        assert found is not None
        assert 0.0 <= found < 2 * math.pi
        assert angle_error(found, theta) <= TOL


# -----------------------------
# Tri-Hamiltonsch
# -----------------------------
def _pair(rng, m):
    x = rng.standard_normal((4, m))
    return x[0] + 1j * x[1], x[2] + 1j * x[3]


def test_triham_residual_vanishes_at_origin():
    rng = np.random.default_rng(4)
    v = _pair(rng, 1)
    zero = (np.zeros(1, complex), np.zeros(1, complex))
    for comp in (1, 2, 3):
        assert triham_residual((1,), zero, v, comp, 1e-4) <= 1e-12


def test_triham_residual_small_and_second_order():
    rng = np.random.default_rng(5)
    ratios = []
    for weights in ((1,), (1, 2)):
        for _ in range(50):
            p, v = _pair(rng, len(weights)), _pair(rng, len(weights))
            for comp in (1, 2, 3):
                r1 = triham_residual(weights, p, v, comp, 1e-4)
                r2 = triham_residual(weights, p, v, comp, 5e-5)
                assert r1 < 1e-6
                if r2 > 1e-9:
                    ratios.append(r1 / r2)
    assert ratios
    assert 3.5 <= min(ratios) and max(ratios) <= 4.5


def test_triham_rejects_bad_step():
    with pytest.raises(ValueError):
        triham_residual((1,), ([1j], [0j]), ([1], [1]), 1, 0.0)


# -----------------------------
# Symplektischer Schnitt
# -----------------------------
def test_cut_section_lands_on_level():
    for mu_m in (0.5, 1.0, 7.25):
        s = cut_section(mu_m, 0.5)
        assert abs(cut_phi_residual(mu_m, s, 0.5)) <= TOL
    assert cut_section(0.2, 0.5) is None


# -----------------------------
# Hypersymplektisch
# -----------------------------
def test_hs_mu_examples():
    assert close(hs_mu(HPoint(1, 0)), R3Val(0.5, 0))
    assert close(hs_mu(HPoint(2, 1)), R3Val(2.5, 2j))
    assert close(hs_mu(HPoint(1, 2)), R3Val(2.5, 2j))


def test_hs_cone():
    assert hs_in_cone(R3Val(1, 0))
    assert not hs_in_cone(R3Val(1, 2))
    assert hs_in_cone(R3Val(1, cmath.exp(0.7j)))


def test_hs_cut_image_member():
    assert hs_cut_image_member(R3Val(1), R3Val(0))
    assert not hs_cut_image_member(R3Val(0, 1), R3Val(0))
    assert hs_cut_image_member(R3Val(3, 1j), R3Val(3, 1j))


def test_hs_phi_residual():
    assert close(hs_phi_residual(R3Val(0.5), HPoint(1, 0), R3Val(0)), R3Val(0))
    p = HPoint(0.3 + 1j, -2 + 0.5j)
    mu_m, eps = R3Val(4, 1 + 1j), R3Val(0.5, 0)
    assert close(hs_phi_residual(mu_m, p, eps), hs_phi_residual(mu_m, hs_act(0.9, p), eps))
    assert hs_act(math.pi, p).distance(HPoint(-p.z, -p.w)) <= TOL


def test_hs_two_to_one_and_branch_locus():
    rng = np.random.default_rng(6)
    for _ in range(500):
        x = rng.standard_normal(4)
        p = HPoint(complex(x[0], x[1]), complex(x[2], x[3]))
        q = hs_partner(p)
        assert close(hs_mu(p), hs_mu(q))
        assert hs_in_cone(hs_mu(p))
        if abs(abs(p.z) - abs(p.w)) > 1e-6:
            assert not hs_same_orbit(p, q)
        on_branch = HPoint(p.z, abs(p.z) * cmath.exp(1j * x[3]))
        assert hs_same_orbit(on_branch, hs_partner(on_branch))


def test_hs_fibre_type():
    eps = R3Val(0)
    assert hs_fibre_type(R3Val(1, 2), eps) == "outside"
    assert hs_fibre_type(R3Val(0), eps) == "vertex"
    assert hs_fibre_type(R3Val(1, 1j), eps) == "boundary"
    assert hs_fibre_type(R3Val(2, 1), eps) == "interior"


# -----------------------------
# 3-Sasaki
# -----------------------------
def test_sasaki_residual_examples():
    res, unit = sasaki_residual(1.0, R3Val(0), HPoint(0, 0))
    assert close(res, R3Val(0)) and unit == 0.0
    s = 1 / math.sqrt(2)
    res, unit = sasaki_residual(s, R3Val(0.5), HPoint(s, 0))
    assert close(res, R3Val(0)) and abs(unit) <= TOL
    res, unit = sasaki_residual(1.0, R3Val(0.5), HPoint(1, 0))
    assert close(res, R3Val(0)) and unit == pytest.approx(1.0)
    with pytest.raises(ValueError):
        sasaki_residual(0.0, R3Val(0), HPoint(0, 0))


def test_sasaki_t_bound():
    assert sasaki_t_bound(0) == 1.0
    assert sasaki_t_bound(1) == pytest.approx(1 / 3)
    assert sasaki_t_bound(0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        sasaki_t_bound(-0.1)


def test_sasaki_modify_weights():
    assert sasaki_modify_weights([1, 1]) == [1, 1, -1]
    assert sasaki_modify_weights([2, 3]) == [2, 3, -1]
    with pytest.raises(WeightsNotCoprime):
        sasaki_modify_weights([2, 4])
    with pytest.raises(ZeroWeight):
        sasaki_modify_weights([1, 0])


def test_sasaki_bound_holds_on_level_samples():
    weights = (1, 1)
    K = estimate_sphere_bound(weights, 5000, seed=8)
    bound = sasaki_t_bound(K)
    for t, mu_S, p in sasaki_level_sample(weights, 300, seed=9):
        res, unit = sasaki_residual(t, mu_S, p)
        assert res.norm() <= TOL and abs(unit) <= TOL
        if mu_S.norm() <= K:
            assert t * t >= bound - 1e-12


def test_sphere_moment_of_unit_weights_is_half():
    # Gewichte (1, ..., 1): |mu| <= 1/2 auf der Einheitssphäre
    rng = np.random.default_rng(10)
    for _ in range(100):
        x = rng.standard_normal(8)
        x /= np.linalg.norm(x)
        q = (x[:2] + 1j * x[2:4], x[4:6] + 1j * x[6:])
        assert sphere_moment((1, 1), q).norm() <= 0.5 + TOL


# -----------------------------
# Konfiguration / Bericht
# -----------------------------
def test_sample_config_validation():
    with pytest.raises(ValueError):
        SampleConfig(tol=0)
    with pytest.raises(ValueError):
        SampleConfig(fd_step=-1)
    with pytest.raises(ValueError):
        SampleConfig(count=0)


def test_sample_config_from_settings():
    save_settings({"seed": 42, "lab_count": 17, "tol": 1e-8})
    cfg = SampleConfig.from_settings()
    assert (cfg.seed, cfg.count, cfg.tol) == (42, 17, 1e-8)
    assert SampleConfig.from_settings(seed=3).seed == 3


def test_run_lab_report():
    cfg = SampleConfig(count=300, sphere_samples=2000, seed=12)
    report = run_lab(cfg)
    assert report["mu_H_surjectivity"] < 1e-9
    assert report["fibre_align_error"] < 1e-9
    assert report["fibre_align_misses"] == 0
    assert report["triham_residual"] < 1e-6
    assert 3.5 <= report["triham_ratio_min"] <= report["triham_ratio_max"] <= 4.5
    assert report["hs_two_to_one"] < 1e-9
    assert report["hs_cone_violation"] < 1e-9
    assert report["hs_cone_misses"] == 0 and report["hs_cut_image_misses"] == 0
    assert report["hs_invariance"] < 1e-9
    assert report["triham_residual_fd_step"] < 1e-6
    assert report["hs_branch_same_orbit"] and report["hs_generic_distinct_orbits"]
    assert report["sasaki_level_residual"] < 1e-9
    assert report["sasaki_bound_margin"] is None or report["sasaki_bound_margin"] >= -1e-12
    assert report["sasaki_weights_modified"]


def test_run_lab_uses_configured_fd_step():
    fine = run_lab(SampleConfig(count=20, sphere_samples=200, seed=4, fd_step=1e-5))
    coarse = run_lab(SampleConfig(count=20, sphere_samples=200, seed=4, fd_step=1e-2))
    assert fine["triham_residual"] == coarse["triham_residual"]
    assert coarse["triham_residual_fd_step"] > fine["triham_residual_fd_step"]


def test_run_lab_fd_step_from_settings():
    save_settings({"fd_step": 1e-2})
    cfg = SampleConfig.from_settings(count=20, sphere_samples=200, seed=4)
    assert cfg.fd_step == 1e-2
    assert run_lab(cfg)["triham_residual_fd_step"] == run_lab(
        SampleConfig(count=20, sphere_samples=200, seed=4, fd_step=1e-2))["triham_residual_fd_step"]


def test_run_lab_cone_checks_use_tolerance():
    loose = run_lab(SampleConfig(count=30, sphere_samples=200, seed=5, tol=1e-3))
    assert loose["hs_cone_misses"] == 0 and loose["hs_cut_image_misses"] == 0


def test_run_lab_is_deterministic():
    cfg = SampleConfig(count=50, sphere_samples=500, seed=4)
    assert run_lab(cfg) == run_lab(cfg)
