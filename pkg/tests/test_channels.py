import numpy as np
import pytest

from cpmaps import analysis, channels
from cpmaps.linalg import DimensionError, partial_trace_env
from cpmaps.states import (
    CorrelatedClassSpec,
    OrthogonalDecomposition,
    ValidationError,
    assemble_composite,
    domain_member,
    marginal,
)

from randspecs import random_density, random_probs, random_spec, random_unitary


def _domain_points(rng, spec, count=4):
    return [domain_member(spec, random_probs(rng, spec.d)) for _ in range(count)]


def _evolve(u, rho_se, n):
    return partial_trace_env(u @ rho_se @ u.conj().T, n, rho_se.shape[0] // n)


@pytest.mark.parametrize("which", ["phi1", "phi2", "phiI"])
def test_class_one_maps_are_tp_and_exact(rng, which):
    for _ in range(25):
        spec = random_spec(rng, class_two=False)
        u = random_unitary(rng, spec.n * spec.dim_e)
        ks = channels.build_kraus(spec, u, which, t_tag=0.5)
        assert ks.tp_defect() < 1e-12 and ks.time_tag == 0.5
        truth = channels.oracle_reduced(assemble_composite(spec), u, spec.n)
        np.testing.assert_allclose(channels.apply_kraus(ks, marginal(spec)), truth, atol=1e-12)


def test_phi1_matches_assignment_a1_everywhere(rng):
    for _ in range(20):
        spec = random_spec(rng, class_two=False)
        u = random_unitary(rng, spec.n * spec.dim_e)
        ks = channels.build_phi1_kraus(spec, u)
        sigma = random_density(rng, spec.n)
        expected = _evolve(u, channels.assignment_a1(spec, sigma), spec.n)
        np.testing.assert_allclose(channels.apply_kraus(ks, sigma), expected, atol=1e-12)


def test_phi2_matches_assignment_a2_everywhere(rng):
    for _ in range(20):
        spec = random_spec(rng, class_two=False)
        u = random_unitary(rng, spec.n * spec.dim_e)
        ks = channels.build_phi2_kraus(spec, u)
        sigma = random_density(rng, spec.n)
        expected = _evolve(u, channels.assignment_a2(spec, sigma), spec.n)
        np.testing.assert_allclose(channels.apply_kraus(ks, sigma), expected, atol=1e-12)


def test_assignment_maps_are_proper_on_domain(rng):
    spec = random_spec(rng, class_two=False, n=3, d=2, dim_e=2)
    for w in _domain_points(rng, spec):
        for assign in (channels.assignment_a1, channels.assignment_a2):
            np.testing.assert_allclose(partial_trace_env(assign(spec, w), 3, 2), w, atol=1e-13)


def test_phi1_and_phi2_agree_on_domain(rng):
    for _ in range(20):
        spec = random_spec(rng, class_two=False)
        u = random_unitary(rng, spec.n * spec.dim_e)
        k1, k2 = channels.build_phi1_kraus(spec, u), channels.build_phi2_kraus(spec, u)
        for w in _domain_points(rng, spec):
            np.testing.assert_allclose(channels.apply_kraus(k1, w), channels.apply_kraus(k2, w), atol=1e-12)


def test_phiII_oracle_and_cp(rng):
    for _ in range(25):
        spec = random_spec(rng, class_two=True)
        u = random_unitary(rng, spec.n * spec.dim_e)
        ks = channels.build_phiII_kraus(spec, u)
        truth = channels.oracle_reduced(assemble_composite(spec), u, spec.n)
        np.testing.assert_allclose(channels.apply_kraus(ks, marginal(spec)), truth, atol=1e-12)
        assert analysis.cp_report(analysis.rep_from_kraus(ks)).is_cp


def test_invariant_povm_fixes_marginal(rng):
    for _ in range(25):
        spec = random_spec(rng, class_two=True)
        povm = channels.invariant_povm(spec)
        assert povm.completeness_defect() < 1e-10
        rho0 = marginal(spec)
        np.testing.assert_allclose(povm.apply(rho0), rho0, atol=1e-12)


def test_custom_extension_agrees_on_marginal(rng):
    for _ in range(15):
        spec = random_spec(rng, class_two=True)
        u = random_unitary(rng, spec.n * spec.dim_e)
        m = len(spec.w_block)
        chi = spec.w_block.vectors @ random_unitary(rng, m)
        ks = channels.build_custom_kraus(spec, u, chi)
        ref = channels.build_phiII_kraus(spec, u)
        rho0 = marginal(spec)
        np.testing.assert_allclose(channels.apply_kraus(ks, rho0), channels.apply_kraus(ref, rho0), atol=1e-12)


def test_custom_extension_rejects_bad_chi(rng):
    spec = random_spec(rng, class_two=True, n=3, d=1, r=3)
    u = random_unitary(rng, 3 * spec.dim_e)
    with pytest.raises((ValidationError, DimensionError)):
        channels.build_custom_kraus(spec, u, 2 * spec.w_block.vectors)


def test_null_block_case_is_tp():
    # W supported on a one-dimensional subspace of C^3 with no phi vectors
    w = OrthogonalDecomposition(np.array([1.0]), np.array([[0.0], [1.0], [0.0]]))
    spec = CorrelatedClassSpec(3, 1, np.array([1.0]), np.zeros((3, 0)), w, None, (), (np.eye(2) / 2,))
    assert spec.null_projector() is not None
    u = random_unitary(np.random.default_rng(0), 6)
    for which in ("phi1", "phi2"):
        assert channels.build_kraus(spec, u, which).tp_defect() < 1e-12


def test_factorized_identity_gives_identity_channel():
    spec = CorrelatedClassSpec(
        2, 2, np.array([0.3, 0.7]), np.array([[1.0], [0.0]]),
        OrthogonalDecomposition(np.array([1.0]), np.array([[0.0], [1.0]])),
        None, (np.diag([0.6, 0.4]),), (np.diag([0.6, 0.4]),))
    ks = channels.build_phi2_kraus(spec, np.eye(4))
    choi = analysis.choi_input_first(analysis.rep_from_kraus(ks))
    corner = np.zeros((4, 4))
    corner[np.ix_([0, 3], [0, 3])] = 1
    np.testing.assert_allclose(choi, corner, atol=1e-14)


def test_env_basis_does_not_matter(rng):
    spec = random_spec(rng, class_two=True, dim_e=3)
    u = random_unitary(rng, spec.n * 3)
    a = analysis.rep_from_kraus(channels.build_phiII_kraus(spec, u))
    b = analysis.rep_from_kraus(channels.build_phiII_kraus(spec, u, env_basis=random_unitary(rng, 3)))
    assert analysis.channel_distance(a, b) < 1e-12


def test_builder_errors(rng):
    one = random_spec(rng, class_two=False, n=2)
    two = random_spec(rng, class_two=True, n=2)
    u1 = random_unitary(rng, 2 * one.dim_e)
    u2 = random_unitary(rng, 2 * two.dim_e)
    with pytest.raises(ValueError):
        channels.build_phiII_kraus(one, u1)
    with pytest.raises(ValueError):
        channels.build_phi2_kraus(two, u2)
    with pytest.raises(ValueError, match="unknown map"):
        channels.build_kraus(one, u1, "phi3")
    with pytest.raises(DimensionError):
        channels.build_phi1_kraus(one, np.eye(2 * one.dim_e + 1))
    with pytest.raises(ValueError):
        channels.build_phi1_kraus(one, 2 * np.eye(2 * one.dim_e))
    with pytest.raises(ValueError):
        channels.build_phi1_kraus(one, u1, env_basis=np.ones((one.dim_e, one.dim_e)) * 2)


def test_kraus_set_validation():
    channels.identity_kraus(3)
    with pytest.raises(ValidationError, match="trace preserving"):
        channels.KrausSet((np.eye(2), np.eye(2)))
    with pytest.raises(ValidationError):
        channels.KrausSet(())
    with pytest.raises(ValueError):
        channels.KrausSet((np.eye(2),), label="bogus")
    with pytest.raises(DimensionError):
        channels.apply_kraus(channels.identity_kraus(2), np.eye(3))


def test_apply_to_state_validates_output():
    ks = channels.identity_kraus(2)
    rho = np.diag([0.25, 0.75])
    np.testing.assert_allclose(channels.apply_to_state(ks, rho), rho)
    with pytest.raises(ValidationError):
        channels.apply_to_state(ks, np.eye(2))


def test_env_sandwich_on_product_unitary(rng):
    a, b = random_unitary(rng, 2), random_unitary(rng, 3)
    g, al = np.eye(3)[0], np.eye(3)[2]
    np.testing.assert_allclose(channels.env_sandwich(np.kron(a, b), g, al), a * b[0, 2], atol=1e-14)
