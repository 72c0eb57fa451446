"""
Numerisches Labor für die expliziten Formeln auf flachen Modellen:
Momentabbildung und Kreiswirkung auf H = C + jC, Phi der Modifikation,
symplektischer Schnitt, hypersymplektische Abbildungen und die
3-Sasaki-Niveaumenge.

Konvention (H = C^2 mit Koordinaten (z, w)):
    F_I(X, v)          = -sum Im(conj(X) * v)      (über z und w)
    (F_J + i F_K)(X, v) = X_z v_w - X_w v_z
Damit gilt d mu_A(v) = F_A(xi_p, v) für mu_H und die Wirkung
(e^{i theta} z, e^{-i theta} w).
"""
import cmath
import logging
import math
from dataclasses import dataclass
from math import gcd

import numpy as np

from errors import WeightsNotCoprime, ZeroWeight
from settings import load_settings

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


# -----------------------------
# Datentypen
# -----------------------------
@dataclass(frozen=True)
class HPoint:
    z: complex
    w: complex

    def __post_init__(self):
        z, w = complex(self.z), complex(self.w)
        if not (cmath.isfinite(z) and cmath.isfinite(w)):
            raise ValueError(f"HPoint entries must be finite, got ({z}, {w})")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)

    def norm2(self) -> float:
        return abs(self.z) ** 2 + abs(self.w) ** 2

    def distance(self, other: "HPoint") -> float:
        return math.hypot(abs(self.z - other.z), abs(self.w - other.w))


@dataclass(frozen=True)
class R3Val:
    """Wert in R x C = R^3."""
    r: float
    c: complex = 0j

    def __post_init__(self):
        r, c = float(self.r), complex(self.c)
        if not (math.isfinite(r) and cmath.isfinite(c)):
            raise ValueError(f"R3Val entries must be finite, got ({r}, {c})")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "c", c)

    def __add__(self, other: "R3Val") -> "R3Val":
        return R3Val(self.r + other.r, self.c + other.c)

    def __sub__(self, other: "R3Val") -> "R3Val":
        return R3Val(self.r - other.r, self.c - other.c)

    def scaled(self, s: float) -> "R3Val":
        return R3Val(s * self.r, s * self.c)

    def norm(self) -> float:
        return math.hypot(self.r, abs(self.c))

    def component(self, axis: int) -> float:
        if axis == 1:
            return self.r
        if axis == 2:
            return self.c.real
        if axis == 3:
            return self.c.imag
        raise ValueError(f"component must be 1, 2 or 3, got {axis}")


ZERO3 = R3Val(0.0, 0j)


@dataclass(frozen=True)
class SampleConfig:
    tol: float = 1e-9
    fd_step: float = 1e-5
    seed: int = 20090101
    count: int = 10000
    sphere_samples: int = 100000

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if not self.fd_step > 0:
            raise ValueError(f"fd_step must be positive, got {self.fd_step}")
        if int(self.count) < 1 or int(self.sphere_samples) < 1:
            raise ValueError("sample counts must be at least 1")

    @classmethod
    def from_settings(cls, settings: dict | None = None, **overrides) -> "SampleConfig":
        s = load_settings() if settings is None else settings
        values = {
            "tol": float(s.get("tol", cls.tol)),
            "fd_step": float(s.get("fd_step", cls.fd_step)),
            "seed": int(s.get("seed", cls.seed)),
            "count": int(s.get("lab_count", cls.count)),
            "sphere_samples": int(s.get("sphere_samples", cls.sphere_samples)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


# -----------------------------
# H: Momentabbildung und Kreiswirkung
# -----------------------------
def mu_H(p: HPoint) -> R3Val:
    return R3Val(0.5 * (abs(p.z) ** 2 - abs(p.w) ** 2), 1j * p.z * p.w)


def act_H(theta: float, p: HPoint) -> HPoint:
    e = cmath.exp(1j * theta)
    return HPoint(e * p.z, p.w / e)


def phi_residual(mu_m: R3Val, p: HPoint, eps: R3Val) -> R3Val:
    """Null genau auf Phi^{-1}(eps)."""
    return mu_m - mu_H(p) - eps


def mu_H_preimage(v: R3Val) -> HPoint:
    """
    Expliziter Punkt mit mu_H(p) = v:
    |z|^2 = r + sqrt(r^2 + |c|^2), |w|^2 = |z|^2 - 2r, z reell, w = -i c / z.
    """
    a = v.r + math.hypot(v.r, abs(v.c))
    if a <= 0.0:
        # c = 0, r <= 0
        return HPoint(0j, complex(math.sqrt(max(-2.0 * v.r, 0.0))))
    z = math.sqrt(a)
    return HPoint(complex(z), -1j * v.c / z)


def fibre_align(p: HPoint, q: HPoint, tol: float = 1e-9) -> float | None:
    """
    theta in [0, 2 pi) mit act_H(theta, p) = q, falls p und q in derselben
    Faser über mu != 0 liegen; sonst None.
    """
    mp, mq = mu_H(p), mu_H(q)
    if (mp - mq).norm() > tol * max(1.0, mp.norm()) or mp.norm() <= tol:
        return None
    # die größere Koordinate bestimmt die Phase stabiler
    if abs(p.z) >= abs(p.w):
        theta = cmath.phase(q.z / p.z)
    else:
        theta = -cmath.phase(q.w / p.w)
    theta %= TWO_PI
    if theta >= TWO_PI:
        theta = 0.0
    if act_H(theta, p).distance(q) > math.sqrt(tol) * max(1.0, math.sqrt(p.norm2())):
        return None
    return theta


def angle_error(a: float, b: float) -> float:
    """Abstand zweier Winkel auf dem Kreis."""
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


# -----------------------------
# Tri-Hamiltonsch auf H^m (gewichtete Wirkung)
# -----------------------------
def _weighted_mu(weights, z, w) -> R3Val:
    weights = np.asarray(weights, dtype=float)
    r = 0.5 * float(np.sum(weights * (np.abs(z) ** 2 - np.abs(w) ** 2)))
    c = complex(np.sum(weights * 1j * z * w))
    return R3Val(r, c)


def act_weighted(weights, theta: float, z, w):
    a = np.asarray(weights, dtype=float)
    e = np.exp(1j * a * theta)
    return e * np.asarray(z, dtype=complex), np.asarray(w, dtype=complex) / e


def kahler_forms(X, v) -> tuple[float, float, float]:
    """(F_I, F_J, F_K)(X, v); X und v als Paare (z-Teil, w-Teil)."""
    xz, xw = (np.asarray(a, dtype=complex) for a in X)
    vz, vw = (np.asarray(a, dtype=complex) for a in v)
    f_i = -float(np.sum(np.imag(np.conj(xz) * vz) + np.imag(np.conj(xw) * vw)))
    f_jk = complex(np.sum(xz * vw - xw * vz))
    return f_i, f_jk.real, f_jk.imag


def triham_residual(weights, p, v, component: int, h: float) -> float:
    """
    |zentrale Differenz von mu_component längs v  -  F_component(xi_p, v)|,
    xi_p ebenfalls als zentrale Differenz der Wirkung mit Schritt h.
    p und v sind Paare (z, w) von Vektoren der Länge len(weights).
    """
    if not h > 0:
        raise ValueError(f"step h must be positive, got {h}")
    if component not in (1, 2, 3):
        raise ValueError(f"component must be 1, 2 or 3, got {component}")
    z, w = (np.asarray(a, dtype=complex) for a in p)
    vz, vw = (np.asarray(a, dtype=complex) for a in v)

    plus = _weighted_mu(weights, z + h * vz, w + h * vw)
    minus = _weighted_mu(weights, z - h * vz, w - h * vw)
    d_mu = (plus - minus).scaled(1.0 / (2.0 * h)).component(component)

    zp, wp = act_weighted(weights, h, z, w)
    zm, wm = act_weighted(weights, -h, z, w)
    xi = ((zp - zm) / (2.0 * h), (wp - wm) / (2.0 * h))
    return abs(d_mu - kahler_forms(xi, (vz, vw))[component - 1])


# -----------------------------
# Symplektischer Schnitt (M x C)
# -----------------------------
def cut_phi_residual(mu_m: float, z: complex, eps: float) -> float:
    return mu_m - abs(z) ** 2 - eps


def cut_section(mu_m: float, eps: float) -> float | None:
    """Schnitt s mit Phi(m, s(m)) = eps; unterhalb des Schnitts None."""
    if mu_m < eps:
        return None
    return math.sqrt(mu_m - eps)


# -----------------------------
# Hypersymplektisch
# -----------------------------
def hs_mu(p: HPoint) -> R3Val:
    return R3Val(0.5 * p.norm2(), 1j * p.z * p.w.conjugate())


def hs_act(theta: float, p: HPoint) -> HPoint:
    e = cmath.exp(-1j * theta)
    return HPoint(e * p.z, e * p.w)


def hs_in_cone(v: R3Val, tol: float = 1e-9) -> bool:
    return v.r >= abs(v.c) - tol


def hs_phi_residual(mu_m: R3Val, p: HPoint, eps: R3Val) -> R3Val:
    return mu_m - hs_mu(p) - eps


def hs_cut_image_member(mu_m: R3Val, eps: R3Val, tol: float = 1e-9) -> bool:
    return hs_in_cone(mu_m - eps, tol)


def hs_partner(p: HPoint) -> HPoint:
    """Der andere Punkt über demselben Bildpunkt."""
    return HPoint(p.w.conjugate(), p.z.conjugate())


def hs_same_orbit(p: HPoint, q: HPoint, tol: float = 1e-9) -> bool:
    n2 = p.norm2()
    if n2 <= tol * tol:
        return q.norm2() <= tol * tol
    lam = (q.z * p.z.conjugate() + q.w * p.w.conjugate()) / n2
    if abs(abs(lam) - 1.0) > tol:
        return False
    return HPoint(lam * p.z, lam * p.w).distance(q) <= tol * max(1.0, math.sqrt(n2))


def hs_fibre_type(mu_m: R3Val, eps: R3Val, tol: float = 1e-9) -> str:
    """outside / vertex / boundary / interior: leer, Punkt, ein Kreis, zwei Kreise."""
    v = mu_m - eps
    b = abs(v.c)
    if v.r < b - tol:
        return "outside"
    if v.r <= tol and b <= tol:
        return "vertex"
    if abs(v.r - b) <= tol:
        return "boundary"
    return "interior"


# -----------------------------
# 3-Sasaki
# -----------------------------
def sasaki_residual(t: float, mu_S: R3Val, p: HPoint) -> tuple[R3Val, float]:
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    t2 = t * t
    return mu_S.scaled(t2) - mu_H(p), t2 + p.norm2() - 1.0


def sasaki_t_bound(K: float) -> float:
    if K < 0:
        raise ValueError(f"K must be non-negative, got {K}")
    return 1.0 / (1.0 + 2.0 * K)


def sasaki_modify_weights(p) -> list[int]:
    p = [int(x) for x in p]
    if any(x == 0 for x in p):
        raise ZeroWeight(f"weights must be nonzero, got {p}", weights=p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if gcd(p[i], p[j]) != 1:
                raise WeightsNotCoprime(f"weights {p[i]} and {p[j]} share a factor", weights=p)
    return p + [-1]


def sphere_moment(weights, q) -> R3Val:
    """Momentabbildung der gewichteten Kreiswirkung, q = (z, w) auf der Sphäre."""
    z, w = q
    return _weighted_mu(weights, z, w)


def _sphere_point(rng, m: int):
    x = rng.standard_normal(4 * m)
    x /= np.linalg.norm(x)
    return x[:m] + 1j * x[m:2 * m], x[2 * m:3 * m] + 1j * x[3 * m:]


def estimate_sphere_bound(weights, count: int, seed: int) -> float:
    """K = max |mu_S| über `count` gleichverteilte Punkte der S^{4m-1}."""
    rng = np.random.default_rng(seed)
    m = len(weights)
    K = 0.0
    for _ in range(count):
        K = max(K, sphere_moment(weights, _sphere_point(rng, m)).norm())
    logger.debug("sphere bound for weights %s: K ~ %.6f from %d samples", list(weights), K, count)
    return K


def sasaki_level_sample(weights, count: int, seed: int) -> list[tuple[float, R3Val, HPoint]]:
    """
    Punkte der Niveaumenge: mu_S aus der Sphäre, t^2 = 1/(1 + 2|mu_S|),
    (z, w) = mu_H_preimage(t^2 mu_S). Das Residuum ist dann 0.
    """
    rng = np.random.default_rng(seed)
    m = len(weights)
    out = []
    for _ in range(count):
        mu_S = sphere_moment(weights, _sphere_point(rng, m))
        t2 = 1.0 / (1.0 + 2.0 * mu_S.norm())
        out.append((math.sqrt(t2), mu_S, mu_H_preimage(mu_S.scaled(t2))))
    return out


# -----------------------------
# Labor-Bericht
# -----------------------------
def _random_hpoint(rng, scale: float = 1.0) -> HPoint:
    x = rng.standard_normal(4) * scale
    return HPoint(complex(x[0], x[1]), complex(x[2], x[3]))


def _random_pair(rng, m: int):
    x = rng.standard_normal((4, m))
    return x[0] + 1j * x[1], x[2] + 1j * x[3]


def run_lab(config: SampleConfig) -> dict:
    """Maximale Residuen pro Eigenschaft; gleicher Seed -> gleicher Bericht."""
    rng = np.random.default_rng(config.seed)
    n = int(config.count)
    report = {}

    # Surjektivität / Invarianz / Faser
    surj = inv = fibre = 0.0
    misses = 0
    for _ in range(n):
        x = rng.standard_normal(3)
        v = R3Val(x[0], complex(x[1], x[2]))
        surj = max(surj, (mu_H(mu_H_preimage(v)) - v).norm())
        p = _random_hpoint(rng)
        theta = float(rng.uniform(0.0, TWO_PI))
        q = act_H(theta, p)
        inv = max(inv, (mu_H(q) - mu_H(p)).norm())
        found = fibre_align(p, q, config.tol)
        if found is None:
            misses += 1
        else:
            fibre = max(fibre, angle_error(found, theta))
    report["mu_H_surjectivity"] = surj
    report["mu_H_invariance"] = inv
    report["fibre_align_error"] = fibre
    report["fibre_align_misses"] = misses

    # Tri-Hamiltonsch: Residuum bei h = 1e-4 und Richardson-Quotient,
    # dazu das Residuum bei der eingestellten Schrittweite
    h = 1e-4
    worst, worst_fd, ratios = 0.0, 0.0, []
    for weights in ((1,), (1, 2)):
        for _ in range(min(n, 200)):
            p = _random_pair(rng, len(weights))
            v = _random_pair(rng, len(weights))
            for comp in (1, 2, 3):
                r1 = triham_residual(weights, p, v, comp, h)
                r2 = triham_residual(weights, p, v, comp, h / 2)
                worst = max(worst, r1)
                worst_fd = max(worst_fd, triham_residual(weights, p, v, comp, config.fd_step))
                if r2 > 1e-9:  # darunter dominiert Rundung
                    ratios.append(r1 / r2)
    report["triham_residual"] = worst
    report["triham_residual_fd_step"] = worst_fd
    report["triham_ratio_min"] = min(ratios) if ratios else None
    report["triham_ratio_max"] = max(ratios) if ratios else None

    # Hypersymplektisch
    two_to_one = cone_gap = hs_inv = 0.0
    cone_misses = cut_misses = 0
    branch_ok = generic_ok = True
    for _ in range(n):
        p = _random_hpoint(rng)
        two_to_one = max(two_to_one, (hs_mu(p) - hs_mu(hs_partner(p))).norm())
        image = hs_mu(p)
        cone_gap = max(cone_gap, abs(image.c) - image.r)
        cone_misses += not hs_in_cone(image, config.tol)
        eps = R3Val(float(rng.standard_normal()), complex(*rng.standard_normal(2)))
        cut_misses += not hs_cut_image_member(image + eps, eps, config.tol)
        hs_inv = max(hs_inv, (hs_mu(hs_act(float(rng.uniform(0.0, TWO_PI)), p)) - image).norm())
        phase = float(rng.uniform(0.0, TWO_PI))
        on_branch = HPoint(p.z, abs(p.z) * cmath.exp(1j * phase))
        branch_ok &= hs_same_orbit(on_branch, hs_partner(on_branch), config.tol)
        if abs(abs(p.z) - abs(p.w)) > 1e-6:
            generic_ok &= not hs_same_orbit(p, hs_partner(p), config.tol)
    report["hs_two_to_one"] = two_to_one
    report["hs_cone_violation"] = max(cone_gap, 0.0)
    report["hs_cone_misses"] = cone_misses
    report["hs_cut_image_misses"] = cut_misses
    report["hs_invariance"] = hs_inv
    report["hs_branch_same_orbit"] = bool(branch_ok)
    report["hs_generic_distinct_orbits"] = bool(generic_ok)

    # 3-Sasaki auf der runden Sphäre, Gewichte (1, 1)
    weights = (1, 1)
    K = estimate_sphere_bound(weights, int(config.sphere_samples), config.seed)
    bound = sasaki_t_bound(K)
    level_res, bound_gap = 0.0, None
    for t, mu_S, p in sasaki_level_sample(weights, min(n, 1000), config.seed + 1):
        res3, unit = sasaki_residual(t, mu_S, p)
        level_res = max(level_res, res3.norm(), abs(unit))
        # K ist geschätzt; Stichproben darüber liegen außerhalb der Aussage
        if mu_S.norm() <= K:
            margin = t * t - bound
            bound_gap = margin if bound_gap is None else min(bound_gap, margin)
    report["sasaki_K"] = K
    report["sasaki_level_residual"] = level_res
    report["sasaki_bound_margin"] = bound_gap
    report["sasaki_weights_modified"] = sasaki_modify_weights([1, 1]) == [1, 1, -1]

    logger.info("lab: %d samples, seed %d", n, config.seed)
    return report
