"""Constituent data, CNT grading rules and rule-of-mixtures homogenization.

Units are SI throughout (Pa, 1/K, kg/m^3, K, m).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

T_REF = 300.0

GRADING_KINDS = ("UD", "FG-V", "FG-X", "face-bottom", "face-top")


class MaterialDomainError(ValueError):
    """Raised when a property is requested outside its valid domain."""


@dataclass(frozen=True)
class CntMaterial:
    """Temperature-tabulated nanotube properties, interpolated piecewise linearly."""

    name: str
    temperatures: tuple
    E11_table: tuple
    E22_table: tuple
    G12_table: tuple
    alpha11_table: tuple
    alpha22_table: tuple
    nu12: float
    rho: float

    def _lookup(self, table, T):
        ts = self.temperatures
        if T < ts[0] - 1e-9 or T > ts[-1] + 1e-9:
            raise MaterialDomainError(
                f"temperature {T} K outside tabulated range [{ts[0]}, {ts[-1]}]"
            )
        # exact hits return the stored value bit-for-bit
        for t, v in zip(ts, table):
            if T == t:
                return v
        return float(np.interp(T, ts, table))

    def E11(self, T):
        return self._lookup(self.E11_table, T)

    def E22(self, T):
        return self._lookup(self.E22_table, T)

    def G12(self, T):
        return self._lookup(self.G12_table, T)

    def alpha11(self, T):
        return self._lookup(self.alpha11_table, T)

    def alpha22(self, T):
        return self._lookup(self.alpha22_table, T)


@dataclass(frozen=True)
class MatrixMaterial:
    """Isotropic polymer matrix; ``E(T) = E0 + E1*T``, ``alpha = a0*(1 + a1*(T - t_ref))``."""

    name: str
    E0: float
    E1: float
    nu: float
    rho: float
    alpha0: Optional[float] = None
    alpha_slope: float = 0.0
    alpha_tref: float = T_REF

    def __post_init__(self):
        if not 0.0 < self.nu < 0.5:
            raise MaterialDomainError(f"matrix Poisson ratio {self.nu} not in (0, 0.5)")

    def E(self, T):
        value = self.E0 + self.E1 * T
        if value <= 0:
            raise MaterialDomainError(f"matrix modulus non-positive at T={T}")
        return value

    def G(self, T):
        return self.E(T) / (2.0 * (1.0 + self.nu))

    def alpha(self, T):
        if self.alpha0 is None:
            raise MaterialDomainError(f"no thermal expansion data for matrix {self.name}")
        return self.alpha0 * (1.0 + self.alpha_slope * (T - self.alpha_tref))


@dataclass(frozen=True)
class CoreMaterial:
    """Isotropic homogeneous core; ``E = E0*(1 + e1*T)``, ``alpha = a0*(1 + a1*T + a2*T^2)``."""

    name: str
    E0: float
    e1: float
    nu: float
    rho: float
    alpha0: float
    alpha1: float
    alpha2: float

    def E(self, T):
        return self.E0 * (1.0 + self.e1 * T)

    def G(self, T):
        return self.E(T) / (2.0 * (1.0 + self.nu))

    def alpha(self, T):
        return self.alpha0 * (1.0 + self.alpha1 * T + self.alpha2 * T * T)

    def point(self, T) -> "MaterialPoint":
        E = self.E(T)
        G = self.G(T)
        a = self.alpha(T)
        return MaterialPoint(E, E, G, G, G, self.nu, self.nu, a, a, self.rho)


@dataclass(frozen=True)
class EfficiencyParams:
    eta1: float
    eta2: float
    eta3: float

    def __post_init__(self):
        if min(self.eta1, self.eta2, self.eta3) <= 0:
            raise MaterialDomainError("efficiency parameters must be positive")


@dataclass(frozen=True)
class GradingRule:
    """Through-thickness CNT volume fraction law for one layer.

    ``UD``, ``FG-V`` and ``FG-X`` describe a single-layer plate of thickness
    ``h`` centred on z = 0.  ``face-bottom`` and ``face-top`` describe a
    sandwich facesheet spanning ``[z_bot, z_top]`` that carries ``2*v_star``
    at the outer skin and nothing at the core interface.
    """

    kind: str
    v_star: float
    z_bot: float
    z_top: float

    def __post_init__(self):
        if self.kind not in GRADING_KINDS:
            raise ValueError(f"unknown grading kind {self.kind!r}")
        if not 0.0 <= self.v_star <= 0.5:
            raise MaterialDomainError(f"target fraction {self.v_star} must lie in [0, 0.5]")
        if self.z_top <= self.z_bot:
            raise ValueError("layer must have positive thickness")


def volume_fraction(rule: GradingRule, z: float) -> float:
    """CNT volume fraction of ``rule`` at thickness coordinate ``z``."""
    tol = 1e-12 * max(1.0, abs(rule.z_top - rule.z_bot))
    if z < rule.z_bot - tol or z > rule.z_top + tol:
        raise MaterialDomainError(f"z={z} outside layer [{rule.z_bot}, {rule.z_top}]")
    v = rule.v_star
    if rule.kind == "UD":
        return v
    if rule.kind == "FG-V":
        h = rule.z_top - rule.z_bot
        return max(1.0 + 2.0 * z / h, 0.0) * v
    if rule.kind == "FG-X":
        h = rule.z_top - rule.z_bot
        return 2.0 * (2.0 * abs(z) / h) * v
    t = rule.z_top - rule.z_bot
    if rule.kind == "face-bottom":
        frac = (rule.z_top - z) / t
    else:
        frac = (z - rule.z_bot) / t
    # z was accepted within round-off of the layer bounds
    return 2.0 * min(max(frac, 0.0), 1.0) * v


@dataclass(frozen=True)
class MaterialPoint:
    E11: float
    E22: float
    G12: float
    G13: float
    G23: float
    nu12: float
    nu21: float
    alpha11: float
    alpha22: float
    rho: float


def effective_properties(
    cnt: CntMaterial,
    matrix: MatrixMaterial,
    eta: EfficiencyParams,
    v_cn: float,
    T: float,
    v_star: Optional[float] = None,
    thermal: bool = True,
) -> MaterialPoint:
    """Rule-of-mixtures properties of the CNT/matrix composite.

    ``v_star`` is the layer's target fraction used in the Poisson mixing;
    it defaults to ``v_cn`` (uniform layers).  With ``thermal=False`` the
    expansion coefficients are reported as NaN, which lets matrices without
    expansion data serve mechanical and modal runs.
    """
    if not 0.0 <= v_cn <= 1.0:
        raise MaterialDomainError(f"volume fraction {v_cn} outside [0, 1]")
    if v_star is None:
        v_star = v_cn
    v_m = 1.0 - v_cn
    Em = matrix.E(T)
    Gm = matrix.G(T)
    E11 = eta.eta1 * v_cn * cnt.E11(T) + v_m * Em
    E22 = eta.eta2 / (v_cn / cnt.E22(T) + v_m / Em)
    G12 = eta.eta3 / (v_cn / cnt.G12(T) + v_m / Gm)
    nu12 = cnt.nu12 * v_star + matrix.nu * (1.0 - v_star)
    nu21 = nu12 * E22 / E11
    rho = cnt.rho * v_cn + matrix.rho * v_m
    if thermal:
        am = matrix.alpha(T)
        a11 = cnt.alpha11(T) * v_cn + am * v_m
        a22 = (
            (1.0 + cnt.nu12) * v_cn * cnt.alpha22(T)
            + (1.0 + matrix.nu) * v_m * am
            - nu12 * a11
        )
    else:
        a11 = a22 = float("nan")
    return MaterialPoint(E11, E22, G12, G12, 1.2 * G12, nu12, nu21, a11, a22, rho)


CLOSURES = ("reduced", "full3d")


def constitutive(mp: MaterialPoint, closure: str = "reduced") -> np.ndarray:
    """6x6 stiffness in the order (xx, yy, zz, xy, xz, yz).

    ``reduced`` keeps the plane-stress in-plane block and decouples the
    normal stress with ``Q33 = E22/(1 - nu12*nu21)``.  ``full3d`` inverts
    the orthotropic compliance taking ``nu13 = nu23 = nu12`` and ``E33 = E22``.
    """
    det = 1.0 - mp.nu12 * mp.nu21
    if det <= 0 or mp.E11 <= 0 or mp.E22 <= 0:
        raise MaterialDomainError("non-physical Poisson coupling")
    Q = np.zeros((6, 6))
    if closure == "reduced":
        Q[0, 0] = mp.E11 / det
        Q[1, 1] = mp.E22 / det
        Q[0, 1] = Q[1, 0] = mp.nu21 * mp.E11 / det
        Q[2, 2] = mp.E22 / det
    elif closure == "full3d":
        E1, E2, E3 = mp.E11, mp.E22, mp.E22
        n12 = n13 = n23 = mp.nu12
        S = np.array([
            [1 / E1, -n12 / E1, -n13 / E1],
            [-n12 / E1, 1 / E2, -n23 / E2],
            [-n13 / E1, -n23 / E2, 1 / E3],
        ])
        C = np.linalg.inv(S)
        if np.any(np.linalg.eigvalsh(C) <= 0):
            raise MaterialDomainError("orthotropic compliance not positive definite")
        Q[:3, :3] = 0.5 * (C + C.T)
    else:
        raise ValueError(f"unknown closure {closure!r}")
    Q[3, 3] = mp.G12
    Q[4, 4] = mp.G13
    Q[5, 5] = mp.G23
    return Q


@dataclass
class MaterialLibrary:
    """Named constituents and efficiency presets loaded from JSON."""

    cnt: dict = field(default_factory=dict)
    matrix: dict = field(default_factory=dict)
    core: dict = field(default_factory=dict)
    efficiency: dict = field(default_factory=dict)

    def efficiency_for(self, matrix_name: str, v_star: float) -> EfficiencyParams:
        presets = self.efficiency.get(matrix_name, {})
        for key, value in presets.items():
            if abs(float(key) - v_star) < 1e-9:
                return value
        raise KeyError(f"no efficiency preset for matrix {matrix_name!r} at V*={v_star}")

    @classmethod
    def from_dict(cls, data: dict) -> "MaterialLibrary":
        lib = cls()
        for name, d in data.get("cnt", {}).items():
            lib.cnt[name] = CntMaterial(
                name,
                tuple(d["temperatures"]),
                tuple(d["E11"]),
                tuple(d["E22"]),
                tuple(d["G12"]),
                tuple(d["alpha11"]),
                tuple(d["alpha22"]),
                d["nu12"],
                d["rho"],
            )
        for name, d in data.get("matrix", {}).items():
            alpha = d.get("alpha")
            kwargs = {}
            if alpha is not None:
                kwargs = dict(
                    alpha0=alpha["base"], alpha_slope=alpha["slope"], alpha_tref=alpha["t_ref"]
                )
            lib.matrix[name] = MatrixMaterial(
                name, d["E"]["c0"], d["E"]["c1"], d["nu"], d["rho"], **kwargs
            )
        for name, d in data.get("core", {}).items():
            a = d["alpha"]
            lib.core[name] = CoreMaterial(
                name, d["E"]["c0"], d["E"]["c1"], d["nu"], d["rho"], a["c0"], a["c1"], a["c2"]
            )
        for name, sets in data.get("efficiency", {}).items():
            lib.efficiency[name] = {k: EfficiencyParams(*v) for k, v in sets.items()}
        return lib

    @classmethod
    def load(cls, path=None) -> "MaterialLibrary":
        if path is None:
            text = resources.files("cntplate.data").joinpath("materials.json").read_text()
        else:
            with open(path) as fh:
                text = fh.read()
        return cls.from_dict(json.loads(text))


_DEFAULT = None


def default_library() -> MaterialLibrary:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = MaterialLibrary.load()
    return _DEFAULT
