"""Thirteen-parameter plate kinematics and the six reduced theories.

Every theory shares one code path: the HSDT13 operators are built once and
a variant simply selects the active nodal DOFs.

Generalized strains ``e`` (28 entries) are ordered as five membrane/bending
4-vectors ``eps0..eps4`` (xx, yy, zz, xy) followed by four transverse shear
2-vectors ``gam0..gam3`` (xz, yz).  The 3D strain at height z is
``strain_map(z, S, dS) @ e`` in the order (xx, yy, zz, xy, xz, yz).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DOF_NAMES = (
    "u0", "v0", "w0", "theta_x", "theta_y", "w1",
    "beta_x", "beta_y", "Gamma", "phi_x", "phi_y", "psi_x", "psi_y",
)
N_DOF = 13
N_GEN_STRAIN = 28
U0, V0, W0, TX, TY, W1, BX, BY, GM, PX, PY, SX, SY = range(N_DOF)

_VARIANT_DOFS = {
    "HSDT13": DOF_NAMES,
    "HSDT11A": ("u0", "v0", "w0", "theta_x", "theta_y", "beta_x", "beta_y",
                "phi_x", "phi_y", "psi_x", "psi_y"),
    "HSDT11B": ("u0", "v0", "w0", "theta_x", "theta_y", "w1", "beta_x", "beta_y",
                "Gamma", "phi_x", "phi_y"),
    "HSDT9": ("u0", "v0", "w0", "theta_x", "theta_y", "beta_x", "beta_y", "phi_x", "phi_y"),
    "TSDT7": ("u0", "v0", "w0", "theta_x", "theta_y", "beta_x", "beta_y"),
    "FSDT5": ("u0", "v0", "w0", "theta_x", "theta_y"),
}
VARIANT_NAMES = tuple(_VARIANT_DOFS)


@dataclass(frozen=True)
class TheoryVariant:
    name: str
    mask: tuple  # 13 booleans in DOF_NAMES order

    @property
    def active(self):
        """Indices of active DOF slots."""
        return np.flatnonzero(self.mask)

    @property
    def n_active(self):
        return int(sum(self.mask))

    @property
    def has_zigzag(self):
        return bool(self.mask[SX])

    def dof_set(self):
        return {n for n, m in zip(DOF_NAMES, self.mask) if m}


def variant(name: str) -> TheoryVariant:
    try:
        dofs = _VARIANT_DOFS[name]
    except KeyError:
        raise ValueError(f"unknown theory {name!r}; expected one of {VARIANT_NAMES}") from None
    return TheoryVariant(name, tuple(n in dofs for n in DOF_NAMES))


def zigzag_value(layup, z, side=None):
    """(S, dS/dz) of the zig-zag function at ``z`` for ``layup``."""
    return layup.zigzag(z, layup.layer_index(z, side))


def displacement_map(z, S):
    """3x13 matrix taking nodal-style generalized displacements to (u, v, w) at z."""
    P = np.zeros((3, N_DOF))
    P[0, [U0, TX, BX, PX, SX]] = (1.0, z, z * z, z ** 3, S)
    P[1, [V0, TY, BY, PY, SY]] = (1.0, z, z * z, z ** 3, S)
    P[2, [W0, W1, GM]] = (1.0, z, z * z)
    return P


def displacement_expansion(dofs, z, layup, variant=None, side=None):
    """(u, v, w) at height z from the 13 mid-surface fields ``dofs``.

    Masked-off DOFs contribute nothing.
    """
    d = np.asarray(dofs, dtype=float)
    if variant is not None:
        d = np.where(variant.mask, d, 0.0)
    S, _ = zigzag_value(layup, z, side)
    return displacement_map(z, S) @ d


def strain_map(z, S, dS):
    """6x28 matrix taking generalized strains to 3D strain at height z."""
    Z = np.zeros((6, N_GEN_STRAIN))
    eye4 = np.eye(4)
    for i, f in enumerate((1.0, z, z * z, z ** 3, S)):
        Z[:4, 4 * i:4 * i + 4] = f * eye4
    eye2 = np.eye(2)
    for i, f in enumerate((1.0, z, z * z, dS)):
        Z[4:, 20 + 2 * i:22 + 2 * i] = f * eye2
    return Z


def strain_operator(N, dNdx, dNdy):
    """28 x (13*n_nodes) operator from nodal DOFs to generalized strains.

    Columns are node-major: column ``13*a + slot``.  Vectorised over a
    leading axis when ``N`` is 2-D (points x nodes).
    """
    N = np.asarray(N, dtype=float)
    dx = np.asarray(dNdx, dtype=float)
    dy = np.asarray(dNdy, dtype=float)
    lead = N.shape[:-1]
    nn = N.shape[-1]
    B = np.zeros(lead + (N_GEN_STRAIN, nn, N_DOF))
    # in-plane families: (u-slot, v-slot, row offset)
    for fam, (su, sv) in enumerate(((U0, V0), (TX, TY), (BX, BY), (PX, PY), (SX, SY))):
        r = 4 * fam
        B[..., r + 0, :, su] = dx
        B[..., r + 1, :, sv] = dy
        B[..., r + 3, :, su] = dy
        B[..., r + 3, :, sv] = dx
    B[..., 2, :, W1] = N
    B[..., 6, :, GM] = 2.0 * N
    # gam0 = theta + grad w0
    B[..., 20, :, TX] = N
    B[..., 20, :, W0] = dx
    B[..., 21, :, TY] = N
    B[..., 21, :, W0] = dy
    # gam1 = 2 beta + grad w1
    B[..., 22, :, BX] = 2.0 * N
    B[..., 22, :, W1] = dx
    B[..., 23, :, BY] = 2.0 * N
    B[..., 23, :, W1] = dy
    # gam2 = 3 phi + grad Gamma
    B[..., 24, :, PX] = 3.0 * N
    B[..., 24, :, GM] = dx
    B[..., 25, :, PY] = 3.0 * N
    B[..., 25, :, GM] = dy
    # gam3 = psi (scaled by dS/dz in strain_map)
    B[..., 26, :, SX] = N
    B[..., 27, :, SY] = N
    return B.reshape(lead + (N_GEN_STRAIN, nn * N_DOF))


def strain_operators(var: TheoryVariant, N, dNdx, dNdy):
    """Generalized-strain operator restricted to the active DOFs of ``var``."""
    B = strain_operator(N, dNdx, dNdy)
    nn = np.asarray(N).shape[-1]
    cols = active_columns(var, nn)
    return B[..., cols]


def active_columns(var: TheoryVariant, n_nodes: int):
    return (np.arange(n_nodes)[:, None] * N_DOF + var.active[None, :]).ravel()
