import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from ttbc import (
    BiotCartesian,
    Geometry,
    OrthoCylElastic,
    ScalarWave,
    SystemCoefficients,
    build,
    build_biot,
    build_ortho_cyl,
    build_scalar_wave,
    closed_form_ortho_operator,
    derive_operator,
    operator_residuals,
    reduce_degenerate,
    validate_hyperbolicity,
)
from ttbc.errors import InvalidModuli, InvalidStiffness, MissingRadius
from ttbc.models import biot_component_names


def ortho(**kw):
    base = dict(rho=1.0, a11=4.0, a12=1.0, a13=1.0, a22=4.0, a23=1.0, a33=4.0, a44=1.0, a55=1.0, a66=1.0, r=1.0)
    base.update(kw)
    return OrthoCylElastic(**base)


class TestScalarWave:
    def test_plane(self):
        c = build_scalar_wave(ScalarWave(c=1.0))
        assert_array_equal(c.a, [[1.0]])
        assert_array_equal(c.c0, [[0.0]])
        assert c.tangential_dims == 1

    def test_circle(self):
        c = build_scalar_wave(ScalarWave(c=2.0, geometry=Geometry.CIRCLE, r=10.0))
        assert_allclose(c.a, [[4.0]])
        assert_allclose(c.c0, [[0.4]])

    def test_sphere(self):
        c = build_scalar_wave(ScalarWave(c=1.0, dim=3, geometry="sphere", r=1.0))
        assert_allclose(c.c0, [[2.0]])
        assert c.tangential_dims == 2

    def test_missing_radius(self):
        with pytest.raises(MissingRadius):
            build_scalar_wave(ScalarWave(c=1.0, geometry="circle"))

    def test_geometry_dimension_mismatch(self):
        with pytest.raises(ValueError):
            ScalarWave(c=1.0, dim=3, geometry="circle", r=1.0)

    @pytest.mark.parametrize("geometry,dim", [("circle", 2), ("sphere", 3)])
    @pytest.mark.parametrize("c", [1.0, 2.0, 340.0])
    @pytest.mark.parametrize("r", [0.5, 1.0, 10.0])
    def test_resolved_form_is_the_local_radiation_condition(self, geometry, dim, c, r):
        # u_t + c u_n + (d - 1)/2 * c/r * u = 0
        op = derive_operator(build(ScalarWave(c=c, dim=dim, geometry=geometry, r=r)))
        assert op.resolved_p1[0, 0] == pytest.approx(-c, rel=1e-12)
        assert op.resolved_p_alg[0, 0] == pytest.approx((dim - 1) / 2 * c / r, rel=1e-12)


class TestOrthoCyl:
    def test_assembly(self):
        c = build_ortho_cyl(ortho(r=2.0))
        assert_allclose(c.a, np.diag([4.0, 1.0, 1.0]))
        assert_allclose(c.c0, np.diag([2.0, 0.5, 0.5]))
        assert c.b[0][0, 1] == pytest.approx(1.0)
        assert c.b[0][1, 0] == pytest.approx(1.0)
        assert c.b[1][0, 2] == pytest.approx(2.0)

    def test_no_coupling(self):
        c = build_ortho_cyl(ortho(a12=-1.0, a13=-1.0))
        assert np.all(c.b[0] == 0) and np.all(c.b[1] == 0)

    def test_invalid(self):
        with pytest.raises(InvalidStiffness):
            ortho(a11=-1.0)
        with pytest.raises(InvalidStiffness):
            ortho(rho=0.0)
        with pytest.raises(InvalidStiffness):
            ortho(r=0.0)

    def test_vti_constraint(self):
        with pytest.raises(InvalidStiffness, match="a66"):
            ortho(vti=True)
        m = OrthoCylElastic.vti_medium(rho=2.0, a11=12.0, a12=4.0, a13=3.0, a33=9.0, a55=2.5, r=0.5)
        assert m.a66 == 4.0 and m.vti

    def test_closed_form_isotropic_degenerate(self):
        # The coupling numerators are a12 + a66 and a13 + a55; they vanish for a12 = -a66, a13 = -a55.
        op = closed_form_ortho_operator(ortho(a11=1.0, a12=-1.0, a13=-1.0, a55=1.0, a66=1.0))
        assert_allclose(op.p1, -np.eye(3))
        assert_allclose(op.p_alg, -0.5 * np.eye(3))
        assert all(np.all(q == 0) for q in op.q)

    def test_closed_form_unit_moduli_without_a12_a13(self):
        # a12 = a13 = 0 leaves the numerators at a66 = a55 = 1, so q_theta(1,2) = -1/(1 + 1).
        op = closed_form_ortho_operator(ortho(a11=1.0, a12=0.0, a13=0.0, a55=1.0, a66=1.0))
        assert_allclose(op.p1, -np.eye(3))
        assert op.q[0][0, 1] == pytest.approx(-0.5)
        assert op.q[1][0, 2] == pytest.approx(-0.5)

    def test_closed_form_entries(self):
        op = closed_form_ortho_operator(ortho())
        assert op.q[0][0, 1] == pytest.approx(-1 / 3)
        assert op.q[0][1, 0] == pytest.approx(-2 / 3)
        assert op.resolved_q[0][0, 1] == pytest.approx(2 / 3)

    @settings(max_examples=40, deadline=None)
    @given(
        st.floats(0.5, 5.0),
        st.floats(1.0, 50.0),
        st.floats(-5.0, 5.0),
        st.floats(-5.0, 5.0),
        st.floats(0.5, 20.0),
        st.floats(0.5, 20.0),
        st.floats(0.1, 10.0),
    )
    def test_pipeline_matches_closed_form(self, rho, a11, a12, a13, a55, a66, r):
        spec = ortho(rho=rho, a11=a11, a12=a12, a13=a13, a55=a55, a66=a66, r=r)
        got = derive_operator(build(spec)).matrices()
        for key, ref in closed_form_ortho_operator(spec).matrices().items():
            assert_allclose(got[key], ref, atol=1e-10 * max(1.0, np.abs(ref).max()), err_msg=key)


class TestBiot:
    spec = BiotCartesian(lam=1.0, mu=1.0, alpha=1.0, m_biot=1.0, rho=1.0, rho_f=0.5, m_eff=2.0)

    def test_normal_block(self):
        a = build_biot(self.spec).a
        assert a[0, 0] == pytest.approx(4.0)
        assert a[0, 3] == pytest.approx(-1.0) and a[3, 0] == pytest.approx(-1.0)
        assert a[3, 3] == pytest.approx(1.0)
        assert a[1, 1] == pytest.approx(1.0) and a[2, 2] == pytest.approx(1.0)
        assert_allclose(a, a.T)

    def test_decoupled_without_alpha(self):
        a = build_biot(BiotCartesian(1.0, 1.0, 0.0, 1.0, 1.0, 0.5, 2.0)).a
        assert np.all(a[:3, 3:] == 0)

    def test_mass_matrix(self):
        j = build_biot(self.spec).j
        assert np.all(np.linalg.eigvalsh(j) > 0)
        assert np.linalg.det(j[np.ix_([0, 3], [0, 3])]) == pytest.approx(1.75)

    @pytest.mark.parametrize("axis", [1, 2, 3])
    def test_reduction_drops_tangential_fluid(self, axis):
        spec = BiotCartesian(1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 2.0, normal_axis=axis)
        full = build_biot(spec)
        assert not validate_hyperbolicity(full).ok
        reduced, excluded = reduce_degenerate(full)
        names = biot_component_names()
        assert sorted(names[i] for i in excluded) == sorted(f"w{k}" for k in (1, 2, 3) if k != axis)
        assert reduced.n == 4
        rep = validate_hyperbolicity(reduced)
        assert rep.ok and min(rep.eigenvalues) > 0
        op = derive_operator(reduced)
        assert_allclose(op.p1 @ op.p1 @ reduced.effective_a(), np.eye(4), atol=1e-9)
        assert max(operator_residuals(reduced, op).values()) <= 1e-9

    def test_axis_one_excludes_w2_w3(self):
        _, excluded = reduce_degenerate(build_biot(self.spec))
        assert excluded == [4, 5]

    def test_invalid_moduli(self):
        with pytest.raises(InvalidModuli):
            BiotCartesian(1.0, -1.0, 1.0, 1.0, 1.0, 0.5, 2.0)
        with pytest.raises(InvalidModuli):
            BiotCartesian(1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0)
        with pytest.raises(InvalidModuli):
            BiotCartesian(1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 2.0, normal_axis=4)


class TestReduceDegenerate:
    def test_nondegenerate_unchanged(self):
        c = SystemCoefficients(np.eye(3))
        reduced, excluded = reduce_degenerate(c)
        assert reduced is c and excluded == []

    def test_all_zero(self):
        c = SystemCoefficients(np.zeros((2, 2)))
        reduced, excluded = reduce_degenerate(c)
        assert excluded == [0, 1] and reduced is c
        assert not validate_hyperbolicity(reduced).ok


def test_build_dispatch():
    assert build(ortho()).n == 3
    with pytest.raises(TypeError):
        build(object())
