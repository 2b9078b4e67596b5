import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cntplate import theory
from cntplate.assembly import assemble
from cntplate.element import Section, physical_gradients, structured_mesh
from conftest import make_sandwich, make_single

EXPECTED_COUNTS = {"HSDT13": 13, "HSDT11A": 11, "HSDT11B": 11, "HSDT9": 9, "TSDT7": 7, "FSDT5": 5}


@pytest.mark.parametrize("name,count", sorted(EXPECTED_COUNTS.items()))
def test_variant_dof_counts(name, count):
    var = theory.variant(name)
    assert var.n_active == count
    assert {"u0", "v0", "w0", "theta_x", "theta_y"} <= var.dof_set()


def test_variant_membership():
    assert not theory.variant("HSDT11A").mask[theory.W1]
    assert not theory.variant("HSDT11A").mask[theory.GM]
    assert theory.variant("HSDT11A").has_zigzag
    assert not theory.variant("HSDT11B").has_zigzag
    assert theory.variant("HSDT11B").mask[theory.GM]
    assert theory.variant("HSDT9").dof_set() == theory.variant("TSDT7").dof_set() | {"phi_x", "phi_y"}
    with pytest.raises(ValueError):
        theory.variant("HSDT12")


def test_zigzag_alternates_and_is_bounded(sandwich):
    lay = sandwich
    for k, layer in enumerate(lay.layers):
        top, _ = lay.zigzag(layer.z_top, k)
        bot, _ = lay.zigzag(layer.z_bot, k)
        assert abs(top) == pytest.approx(1.0) and top == pytest.approx(-bot)
        assert lay.zigzag(layer.mid, k)[0] == pytest.approx(0.0)
    # the alternating slope keeps S continuous across an interface
    s1 = lay.zigzag(lay.layers[0].z_top, 0)[0]
    s2 = lay.zigzag(lay.layers[1].z_bot, 1)[0]
    assert s1 == pytest.approx(s2)


@settings(max_examples=50, deadline=None)
@given(z=st.floats(-0.1, 0.1), dofs=st.lists(st.floats(-1, 1), min_size=13, max_size=13),
       name=st.sampled_from(sorted(EXPECTED_COUNTS)))
def test_displacement_expansion_by_hand(z, dofs, name):
    lay = make_sandwich()
    var = theory.variant(name)
    d = np.where(var.mask, dofs, 0.0)
    k = lay.layer_index(z, "above")
    layer = lay.layers[k]
    S = 2 * (-1) ** (k + 1) * (z - layer.mid) / layer.thickness
    u = d[0] + z * d[3] + z ** 2 * d[6] + z ** 3 * d[9] + S * d[11]
    v = d[1] + z * d[4] + z ** 2 * d[7] + z ** 3 * d[10] + S * d[12]
    w = d[2] + z * d[5] + z ** 2 * d[8]
    got = theory.displacement_expansion(dofs, z, lay, var, side="above")
    assert np.allclose(got, [u, v, w], atol=1e-14)


def test_fsdt_u_affine_in_z(sandwich):
    var = theory.variant("FSDT5")
    dofs = np.arange(1.0, 14.0)
    zs = np.linspace(-0.099, 0.099, 9)
    u = [theory.displacement_expansion(dofs, z, sandwich, var)[0] for z in zs]
    assert np.allclose(np.diff(u, 2), 0.0, atol=1e-12)


def test_strain_operator_against_finite_differences(sandwich):
    """Generalized strains of a smooth field equal hand-derived ones."""
    mesh = structured_mesh(1.0, 1.0, 1, 1)
    coords = mesh.element_coords(0)
    rng = np.random.default_rng(3)
    coef = rng.normal(size=(13, 3))  # each field a + b x + c y
    nodal = np.array([[c[0] + c[1] * x + c[2] * y for c in coef] for x, y in coords])
    N, dx, dy, _ = physical_gradients(coords, 0.3, -0.2)
    x, y = N @ coords
    e = theory.strain_operator(N, dx, dy) @ nodal.ravel()
    val = coef[:, 0] + coef[:, 1] * x + coef[:, 2] * y
    gx, gy = coef[:, 1], coef[:, 2]
    uf = [theory.U0, theory.TX, theory.BX, theory.PX, theory.SX]
    vf = [theory.V0, theory.TY, theory.BY, theory.PY, theory.SY]
    for i in range(5):
        eps = e[4 * i:4 * i + 4]
        assert eps[0] == pytest.approx(gx[uf[i]])
        assert eps[1] == pytest.approx(gy[vf[i]])
        assert eps[3] == pytest.approx(gy[uf[i]] + gx[vf[i]])
    # thickness stretch: eps_zz = w1 + 2 z Gamma
    assert e[2] == pytest.approx(val[theory.W1])
    assert e[6] == pytest.approx(2 * val[theory.GM])
    assert e[10] == 0 and e[14] == 0 and e[18] == 0
    # transverse shear: gam_xz(z) = theta + w0,x + z(2 beta + w1,x) + z^2(3 phi + Gamma,x) + dS psi
    gam = e[20:].reshape(4, 2)
    assert gam[0, 0] == pytest.approx(val[theory.TX] + gx[theory.W0])
    assert gam[1, 0] == pytest.approx(2 * val[theory.BX] + gx[theory.W1])
    assert gam[2, 1] == pytest.approx(3 * val[theory.PY] + gy[theory.GM])
    assert gam[3, 1] == pytest.approx(val[theory.SY])


def test_strain_map_layout():
    Z = theory.strain_map(0.3, 0.5, 7.0)
    assert Z.shape == (6, 28)
    assert Z[0, 4] == pytest.approx(0.3)
    assert Z[3, 19] == pytest.approx(0.5)
    assert Z[4, 26] == pytest.approx(7.0)
    assert Z[5, 25] == pytest.approx(0.09)


@pytest.mark.parametrize("name", ["HSDT13", "HSDT11A"])
def test_zigzag_variant_rejected_on_single_layer(name):
    section = Section(make_single(), 300.0, thermal=False)
    with pytest.raises(ValueError, match="two layers"):
        assemble(structured_mesh(1.0, 1.0, 1, 1), theory.variant(name), section)
