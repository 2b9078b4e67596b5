"""Through-thickness stacking: layers, their materials, and thickness quadrature."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .materials import (
    CntMaterial,
    CoreMaterial,
    EfficiencyParams,
    GradingRule,
    MaterialDomainError,
    MatrixMaterial,
    MaterialPoint,
    constitutive,
    effective_properties,
    volume_fraction,
)

N_THICKNESS_GAUSS = 8


@dataclass(frozen=True)
class Layer:
    z_bot: float
    z_top: float
    core: Optional[CoreMaterial] = None
    grading: Optional[GradingRule] = None

    @property
    def thickness(self):
        return self.z_top - self.z_bot

    @property
    def mid(self):
        return 0.5 * (self.z_bot + self.z_top)


@dataclass(frozen=True)
class Layup:
    """Ordered bottom-to-top layers; layer k (1-based) is ``layers[k-1]``."""

    layers: tuple
    cnt: Optional[CntMaterial] = None
    matrix: Optional[MatrixMaterial] = None
    eta: Optional[EfficiencyParams] = None

    @property
    def h(self):
        return self.layers[-1].z_top - self.layers[0].z_bot

    @property
    def interfaces(self):
        return [self.layers[0].z_bot] + [layer.z_top for layer in self.layers]

    @property
    def n_layers(self):
        return len(self.layers)

    @classmethod
    def single(cls, h, kind, v_star, cnt, matrix, eta):
        rule = GradingRule(kind, v_star, -h / 2, h / 2)
        return cls((Layer(-h / 2, h / 2, grading=rule),), cnt, matrix, eta)

    @classmethod
    def sandwich(cls, h, core_to_face, v_star, cnt, matrix, eta, core, distribution="FG"):
        """Three-layer plate with ``h = h_core + 2*h_face``.

        ``distribution`` is ``"FG"`` (zero CNT at the core interface rising
        to twice the target at the skin) or ``"UD"``.
        """
        hf = h / (core_to_face + 2.0)
        t = (-h / 2, -h / 2 + hf, h / 2 - hf, h / 2)
        if distribution == "FG":
            bottom = GradingRule("face-bottom", v_star, t[0], t[1])
            top = GradingRule("face-top", v_star, t[2], t[3])
        elif distribution == "UD":
            bottom = GradingRule("UD", v_star, t[0], t[1])
            top = GradingRule("UD", v_star, t[2], t[3])
        else:
            raise ValueError(f"unknown facesheet distribution {distribution!r}")
        layers = (
            Layer(t[0], t[1], grading=bottom),
            Layer(t[1], t[2], core=core),
            Layer(t[2], t[3], grading=top),
        )
        return cls(layers, cnt, matrix, eta)

    def layer_index(self, z, side=None):
        """0-based index of the layer containing ``z``.

        At an interior interface ``side`` ("above"/"below") must be given.
        """
        h = self.h
        tol = 1e-12 * h
        if z < self.layers[0].z_bot - tol or z > self.layers[-1].z_top + tol:
            raise MaterialDomainError(f"z={z} outside plate thickness")
        for i, layer in enumerate(self.layers[:-1]):
            if abs(z - layer.z_top) <= tol:
                if side == "below":
                    return i
                if side == "above":
                    return i + 1
                raise ValueError(f"z={z} lies on an interface; pass side='above' or 'below'")
        for i, layer in enumerate(self.layers):
            if z <= layer.z_top + tol:
                return i
        return len(self.layers) - 1

    def material_point(self, z, T, layer=None, thermal=True) -> MaterialPoint:
        if layer is None:
            layer = self.layer_index(z)
        lay = self.layers[layer]
        if lay.core is not None:
            return lay.core.point(T)
        rule = lay.grading
        v = volume_fraction(rule, z)
        return effective_properties(
            self.cnt, self.matrix, self.eta, v, T, v_star=rule.v_star, thermal=thermal
        )

    def zigzag(self, z, layer=None):
        """Zig-zag function and its z-derivative at ``z``."""
        if layer is None:
            layer = self.layer_index(z)
        lay = self.layers[layer]
        k = layer + 1
        sign = 2.0 * (-1.0) ** k / lay.thickness
        return sign * (z - lay.mid), sign

    def thickness_samples(self, T, closure="reduced", n_gauss=N_THICKNESS_GAUSS, thermal=True):
        """Per-layer Gauss samples through the thickness.

        Returns a dict of arrays: ``z``, ``w`` (weights), ``layer``, ``S``,
        ``dS``, ``Q`` (n x 6 x 6), ``rho``, ``alpha`` (n x 6 thermal strain
        direction, in-plane only).
        """
        xg, wg = np.polynomial.legendre.leggauss(n_gauss)
        zs, ws, idx = [], [], []
        for i, lay in enumerate(self.layers):
            half = 0.5 * lay.thickness
            zs.append(lay.mid + half * xg)
            ws.append(half * wg)
            idx.append(np.full(n_gauss, i))
        z = np.concatenate(zs)
        w = np.concatenate(ws)
        layer = np.concatenate(idx)
        n = z.size
        S = np.empty(n)
        dS = np.empty(n)
        Q = np.empty((n, 6, 6))
        rho = np.empty(n)
        alpha = np.zeros((n, 6))
        for j in range(n):
            S[j], dS[j] = self.zigzag(z[j], layer[j])
            mp = self.material_point(z[j], T, layer[j], thermal=thermal)
            Q[j] = constitutive(mp, closure)
            rho[j] = mp.rho
            alpha[j, 0] = mp.alpha11
            alpha[j, 1] = mp.alpha22
        return dict(z=z, w=w, layer=layer, S=S, dS=dS, Q=Q, rho=rho, alpha=alpha)
