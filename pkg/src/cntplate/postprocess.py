"""Field sampling, equilibrium shear recovery, scaling and thickness profiles."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import theory
from .element import gauss_2d, physical_gradients, physical_hessians
from .materials import constitutive

THERMAL_STRESS_MODES = ("subtract", "retain")
PROFILE_QUANTITIES = ("u", "v", "w", "sxx", "sxz")


class DomainError(ValueError):
    """Raised for sample points outside the plate."""


class ResultField:
    """A solved static field on a mesh, sampled at arbitrary (x, y, z).

    Parameters
    ----------
    system : GlobalSystem
        The assembled system the solution belongs to.
    delta : ndarray
        Reduced (constrained) solution vector.
    load : LoadSpec, optional
        Needed for thermal runs so the free thermal strain is known.
    thermal_stress : {"subtract", "retain"}
        ``subtract`` reports ``Q (eps - alpha*dT)``; ``retain`` reports the
        total-strain stress ``Q eps``.  Mechanical runs are unaffected.
    """

    def __init__(self, system, delta, load=None, thermal_stress="subtract"):
        if thermal_stress not in THERMAL_STRESS_MODES:
            raise ValueError(f"thermal_stress must be one of {THERMAL_STRESS_MODES}")
        self.system = system
        self.mesh = system.mesh
        self.variant = system.variant
        self.section = system.section
        self.layup = system.section.layup
        self.T = system.section.T
        self.load = load
        self.thermal_stress = thermal_stress
        self.nodal = system.nodal(system.expand(np.asarray(delta, dtype=float)))

    @property
    def _thermal(self):
        return (self.load is not None and self.load.kind == "thermal"
                and self.thermal_stress == "subtract")

    # -- mid-surface interpolation -------------------------------------
    def _locate(self, x, y):
        hits = self.mesh.find_elements(x, y)
        if not hits:
            raise DomainError(f"point ({x}, {y}) lies outside the mesh")
        return hits

    def mid_surface(self, x, y):
        """DOF values (13,) and their x- and y-gradients at (x, y)."""
        e, (xi, eta) = self._locate(x, y)[0]
        coords = self.mesh.element_coords(e)
        N, dx, dy, _ = physical_gradients(coords, xi, eta, e)
        d = self.nodal[self.mesh.elements[e]]
        return N @ d, dx @ d, dy @ d

    def generalized_strain(self, x, y):
        e, (xi, eta) = self._locate(x, y)[0]
        return self._element_strain(e, xi, eta)

    def _element_strain(self, e, xi, eta):
        coords = self.mesh.element_coords(e)
        N, dx, dy, _ = physical_gradients(coords, xi, eta, e)
        B = theory.strain_operator(N, dx, dy)
        return B @ self.nodal[self.mesh.elements[e]].ravel()

    def displacement_at(self, x, y, z, side=None):
        """(u, v, w) at a point of the plate."""
        val = self.mid_surface(x, y)[0]
        return theory.displacement_expansion(val, z, self.layup, self.variant, side=side)

    # -- stresses --------------------------------------------------------
    def _material(self, z, side):
        k = self.layup.layer_index(z, side)
        S, dS = self.layup.zigzag(z, k)
        mp = self.layup.material_point(z, self.T, k, thermal=self._thermal)
        return k, theory.strain_map(z, S, dS), constitutive(mp, self.section.closure), mp

    def _temperature(self, x, y, z, grad=False):
        load = self.load
        a, b = self.mesh.a, self.mesh.b
        scale = load.amplitude * 2.0 * z / self.layup.h
        if not grad:
            return scale * load.surface_pattern(x, y, a, b)
        px, py = np.pi / a, np.pi / b
        return (scale * px * np.cos(px * x) * np.sin(py * y),
                scale * py * np.sin(px * x) * np.cos(py * y))

    def stress_at(self, x, y, z, side=None):
        """Constitutive stress (xx, yy, zz, xy, xz, yz) at a point."""
        _, Z, Q, mp = self._material(z, side)
        eps = Z @ self.generalized_strain(x, y)
        if self._thermal:
            dT = self._temperature(x, y, z)
            eps[0] -= mp.alpha11 * dT
            eps[1] -= mp.alpha22 * dT
        return Q @ eps

    def in_plane_stress_at(self, x, y, z, side=None):
        """(sigma_xx, sigma_yy, sigma_xy); ``side`` is required on interfaces."""
        s = self.stress_at(x, y, z, side)
        return s[0], s[1], s[3]

    # -- equilibrium recovery -----------------------------------------------
    def _element_strain_gradient(self, e, xi, eta):
        coords = self.mesh.element_coords(e)
        N, g, H = physical_hessians(coords, xi, eta, e)
        d = self.nodal[self.mesh.elements[e]].ravel()
        gx = theory.strain_operator(g[:, 0], H[:, 0], H[:, 1]) @ d
        gy = theory.strain_operator(g[:, 1], H[:, 1], H[:, 2]) @ d
        return N @ coords, gx, gy

    def strain_gradient(self, x, y):
        """x- and y-derivatives of the generalized strains at (x, y).

        Derivatives are taken exactly at the 3x3 Gauss points of every
        element sharing the point, fitted by a complete quadratic over that
        patch and evaluated at the point.
        """
        hits = self._locate(x, y)
        pts, _ = gauss_2d(3)
        X, GX, GY = [], [], []
        for e, _ in hits:
            for xi, eta in pts:
                p, gx, gy = self._element_strain_gradient(e, xi, eta)
                X.append(p)
                GX.append(gx)
                GY.append(gy)
        X = np.array(X)
        c = self.mesh.element_coords(hits[0][0])
        scale = max(np.ptp(c[:, 0]), np.ptp(c[:, 1]))
        dx = (X[:, 0] - x) / scale
        dy = (X[:, 1] - y) / scale
        A = np.column_stack([np.ones_like(dx), dx, dy, dx * dx, dx * dy, dy * dy])
        coef, *_ = np.linalg.lstsq(A, np.hstack([GX, GY]), rcond=None)
        return coef[0, :theory.N_GEN_STRAIN], coef[0, theory.N_GEN_STRAIN:]

    def _shear_integrand(self, z, ex, ey, x, y, layer):
        S, dS = self.layup.zigzag(z, layer)
        Z = theory.strain_map(z, S, dS)
        mp = self.layup.material_point(z, self.T, layer, thermal=self._thermal)
        Q = constitutive(mp, self.section.closure)
        sx = Z @ ex
        sy = Z @ ey
        if self._thermal:
            tx, ty = self._temperature(x, y, z, grad=True)
            sx[0] -= mp.alpha11 * tx
            sx[1] -= mp.alpha22 * tx
            sy[0] -= mp.alpha11 * ty
            sy[1] -= mp.alpha22 * ty
        sx = Q @ sx
        sy = Q @ sy
        return -(sx[0] + sy[3]), -(sx[3] + sy[1])

    def recover_transverse_shear(self, x, y, z, n_gauss=8):
        """sigma_xz and sigma_yz at heights ``z`` from integrating equilibrium.

        Starts from a traction-free bottom face and integrates layer by
        layer with ``n_gauss`` points, so the result is continuous in z.
        """
        zq = np.atleast_1d(np.asarray(z, dtype=float))
        ex, ey = self.strain_gradient(x, y)
        xg, wg = np.polynomial.legendre.leggauss(n_gauss)
        tol = 1e-12 * self.layup.h
        out = np.zeros((zq.size, 2))
        for j, target in enumerate(zq):
            if target < self.layup.layers[0].z_bot - tol or target > self.layup.layers[-1].z_top + tol:
                raise DomainError(f"z={target} outside plate thickness")
            for k, layer in enumerate(self.layup.layers):
                hi = min(layer.z_top, target)
                if hi <= layer.z_bot:
                    break
                mid, half = 0.5 * (layer.z_bot + hi), 0.5 * (hi - layer.z_bot)
                for xi, wi in zip(xg, wg):
                    out[j] += half * wi * np.array(
                        self._shear_integrand(mid + half * xi, ex, ey, x, y, k))
        if np.ndim(z) == 0:
            return out[0, 0], out[0, 1]
        return out[:, 0], out[:, 1]


def field_from_solution(system, solution, load=None, thermal_stress="subtract"):
    return ResultField(system, solution.delta, load, thermal_stress)


# -- nondimensionalization ---------------------------------------------------
NONDIM_KINDS = ("mechanical", "thermal", "frequency")
CONVENTIONS = ("tables", "printed")


@dataclass(frozen=True)
class NondimScheme:
    """Reference values for turning raw results into dimensionless numbers.

    ``E_ref``, ``alpha_ref``, ``rho_ref`` are core properties at 300 K and
    ``amplitude`` is the load amplitude (q0 in Pa or T0 in K).

    ``convention="tables"`` uses the scalings that the reference result
    grids are consistent with; ``"printed"`` uses the literal scaling relations.
    They differ in the mechanical displacement factors (10 and 1 versus 100)
    and in the thermal deflection (``w/(alpha T0 h S^2)`` versus
    ``w/(alpha T0 h^2 S^4)``).
    """

    kind: str
    a: float
    h: float
    E_ref: Optional[float] = None
    alpha_ref: Optional[float] = None
    rho_ref: Optional[float] = None
    amplitude: Optional[float] = None
    convention: str = "tables"

    def __post_init__(self):
        if self.kind not in NONDIM_KINDS:
            raise ValueError(f"unknown nondim kind {self.kind!r}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.kind != "frequency" and not self.amplitude:
            raise ValueError("load amplitude must be non-zero")

    @property
    def S(self):
        return self.a / self.h

    def factor(self, quantity):
        """Multiplier taking a raw ``quantity`` to its dimensionless value."""
        S, h = self.S, self.h
        if self.kind == "frequency":
            if quantity != "omega":
                raise ValueError("frequency scheme only scales 'omega'")
            return self.a * self.a / h * np.sqrt(self.rho_ref / self.E_ref)
        if self.kind == "mechanical":
            q, E = self.amplitude, self.E_ref
            disp = 100.0 if self.convention == "printed" else None
            table = {
                "u": (disp or 10.0) * E / (q * h * S**3),
                "w": (disp or 1.0) * E / (q * h * S**4),
                "sxx": 1.0 / (q * S * S),
                "sxz": 1.0 / (q * S),
            }
        else:
            T0, al, E = self.amplitude, self.alpha_ref, self.E_ref
            if self.convention == "printed":
                w = 1.0 / (h * al * T0 * h * S**4)
            else:
                w = 1.0 / (al * T0 * h * S * S)
            table = {
                "u": 1.0 / (10.0 * h * al * T0 * S),
                "w": w,
                "sxx": 1.0 / (100.0 * E * al * T0),
                "sxz": 1.0 / (10.0 * E * al * T0),
            }
        table["v"] = table["u"]
        table["syy"] = table["sxx"]
        table["sxy"] = table["sxx"]
        table["syz"] = table["sxz"]
        if quantity not in table:
            raise ValueError(f"no scaling for quantity {quantity!r}")
        return table[quantity]


def nondimensionalize(raw, scheme: NondimScheme, quantity: str):
    return np.asarray(raw) * scheme.factor(quantity)


def dimensionalize(value, scheme: NondimScheme, quantity: str):
    return np.asarray(value) / scheme.factor(quantity)


# -- profiles -------------------------------------------------------------------
def profile_heights(layup, n_samples):
    """Stations per layer plus both sides of every interior interface.

    Returns a list of ``(z, side)`` pairs ordered bottom to top.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples per layer")
    rows = []
    last = layup.n_layers - 1
    for k, layer in enumerate(layup.layers):
        zs = np.linspace(layer.z_bot, layer.z_top, n_samples)
        for i, z in enumerate(zs):
            side = None
            if i == 0 and k > 0:
                side = "above"
                z = layer.z_bot
            elif i == n_samples - 1 and k < last:
                side = "below"
                z = layer.z_top
            rows.append((float(z), side))
    return rows


def thickness_profile(field: ResultField, x, y, quantity, n_samples=11, scheme=None):
    """Samples of ``quantity`` through the thickness at (x, y).

    Returns a list of ``(z, side, value)`` rows; ``value`` is scaled by
    ``scheme`` when given.
    """
    if quantity not in PROFILE_QUANTITIES:
        raise ValueError(f"quantity must be one of {PROFILE_QUANTITIES}")
    heights = profile_heights(field.layup, n_samples)
    if quantity == "sxz":
        sxz, _ = field.recover_transverse_shear(x, y, np.array([z for z, _ in heights]))
        values = list(sxz)
    else:
        values = []
        for z, side in heights:
            if quantity == "sxx":
                values.append(field.in_plane_stress_at(x, y, z, side)[0])
            else:
                values.append(field.displacement_at(x, y, z, side)["uvw".index(quantity)])
    if scheme is not None:
        f = scheme.factor(quantity)
        values = [v * f for v in values]
    return [(z, side or "", float(v)) for (z, side), v in zip(heights, values)]


def profile_csv(rows, quantity, scheme_name="raw"):
    """CSV text with a header naming the quantity and scaling."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["z", "side", f"{quantity}[{scheme_name}]"])
    for z, side, v in rows:
        w.writerow([f"{z:.9e}", side, f"{v:.9e}"])
    return buf.getvalue()
