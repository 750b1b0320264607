import numpy as np
import pytest

from cpmaps.linalg import partial_trace_env
from cpmaps.states import (
    CorrelatedClassSpec,
    NonOrthogonalDecomposition,
    OrthogonalDecomposition,
    ValidationError,
    assemble_composite,
    density_matrix,
    domain_member,
    ghjw_link,
    marginal,
    marginal_via_trace,
    spectral_decompose,
)

from randspecs import random_density, random_nonortho, random_spec, random_unitary


def test_density_matrix_validation():
    density_matrix(np.eye(2) / 2)
    with pytest.raises(ValidationError, match="trace"):
        density_matrix(np.eye(2))
    with pytest.raises(ValidationError):
        density_matrix(np.diag([1.5, -0.5]))


def test_orthogonal_decomposition_checks():
    e = np.eye(2)
    OrthogonalDecomposition(np.array([0.5, 0.5]), e)
    with pytest.raises(ValidationError):
        OrthogonalDecomposition(np.array([0.5, 0.5]), np.array([[1, 1], [0, 1]]) / np.sqrt([1, 2]))
    with pytest.raises(ValidationError):
        OrthogonalDecomposition(np.array([1.0, 0.0]), e)


def test_nonorthogonal_requires_normalized_vectors():
    with pytest.raises(ValidationError):
        NonOrthogonalDecomposition(np.array([1.0]), np.array([[1.0], [1.0]]))


def test_spectral_decompose_reassembles(rng):
    rho = random_density(rng, 4, rank=2)
    ortho = spectral_decompose(rho)
    assert len(ortho) == 2
    np.testing.assert_allclose(ortho.assemble(), rho, atol=1e-12)


def test_ghjw_link_properties(rng):
    for _ in range(50):
        n = int(rng.integers(1, 5))
        psi = random_nonortho(rng, random_unitary(rng, n)[:, : int(rng.integers(1, n + 1))],
                              int(rng.integers(1, 6)))
        ortho = spectral_decompose(psi.assemble())
        link = ghjw_link(ortho, psi)
        assert link.isometry_defect() < 1e-10
        assert link.link_defect(ortho, psi) < 1e-12
        assert link.column_sum_defect() < 1e-10


def test_ghjw_rejects_different_states():
    a = OrthogonalDecomposition(np.array([1.0]), np.array([[1.0], [0.0]]))
    b = NonOrthogonalDecomposition(np.array([1.0]), np.array([[0.0], [1.0]]))
    with pytest.raises(ValidationError, match="different states"):
        ghjw_link(a, b)


@pytest.mark.parametrize("class_two", [False, True])
def test_marginal_matches_partial_trace(rng, class_two):
    for _ in range(30):
        spec = random_spec(rng, class_two=class_two)
        np.testing.assert_allclose(marginal(spec), marginal_via_trace(spec), atol=1e-13)
        rho = assemble_composite(spec)
        assert np.trace(rho).real == pytest.approx(1.0)
        np.testing.assert_allclose(partial_trace_env(rho, spec.n, spec.dim_e), marginal(spec), atol=1e-13)


def test_domain_member_is_state(rng):
    spec = random_spec(rng, class_two=True, n=3, d=2)
    w = domain_member(spec, [0.0, 1.0])
    np.testing.assert_allclose(w, spec.w, atol=1e-14)
    with pytest.raises(ValidationError):
        domain_member(spec, [0.5, 0.6])
    with pytest.raises(ValidationError):
        domain_member(spec, [1.0])


def _qubit_parts():
    w = OrthogonalDecomposition(np.array([1.0]), np.array([[0.0], [1.0]]))
    return dict(n=2, d=2, p=np.array([0.5, 0.5]), phi=np.array([[1.0], [0.0]]), w_block=w,
                rho_env=(np.eye(2) / 2,), varrho_env=(np.diag([1.0, 0.0]),))


def test_spec_validation_errors():
    CorrelatedClassSpec(**_qubit_parts())
    bad = [
        dict(d=3),
        dict(p=np.array([0.7, 0.7])),
        dict(phi=np.array([[0.0], [1.0]])),  # overlaps the W support
        dict(rho_env=()),
        dict(varrho_env=(np.eye(3) / 3,)),
        dict(varrho_env=(np.eye(2) / 2, np.eye(2) / 2)),
    ]
    for change in bad:
        with pytest.raises(ValidationError):
            CorrelatedClassSpec(**{**_qubit_parts(), **change})


def test_spec_rejects_mismatched_psi_block():
    parts = _qubit_parts()
    psi = NonOrthogonalDecomposition(np.array([1.0]), np.array([[1.0], [0.0]]))
    with pytest.raises(ValidationError, match="different W"):
        CorrelatedClassSpec(**parts, psi_block=psi)


def test_null_projector_and_sibling(rng):
    spec = random_spec(rng, class_two=True, n=4, d=2)
    null = spec.null_projector()
    rank = spec.d - 1 + len(spec.w_block)
    if rank == spec.n:
        assert null is None
    else:
        assert np.trace(null).real == pytest.approx(spec.n - rank)
    sib = spec.class_one_sibling([np.eye(spec.dim_e) / spec.dim_e] * len(spec.w_block))
    assert not sib.is_class_two
    np.testing.assert_allclose(marginal(sib), marginal(spec), atol=1e-13)
