import numpy as np
import pytest
from numpy.testing import assert_allclose

from biham.dynamics import conjugate_field
from biham.errors import OutsideRealRegime, StepTooLarge, ZeroModalCoefficient
from biham.lorentzian import (
    LorentzianParams,
    SweepPath,
    initial_sweep_state,
    lorentzian_conjugate,
    lorentzian_matrix,
    lorentzian_uv,
    sweep_adiabatic,
)
from biham.spectral import (
    biorthogonal_decompose,
    biorthonormality_residual,
    completeness_residual,
)
from biham.spectral import BiorthogonalSystem


def sample_real_regime(rng, strict_margin=0.95):
    """Random (x, y, z) strictly inside the real-spectrum region, both z signs."""
    z = rng.uniform(0.5, 3.0) * (1 if rng.random() < 0.5 else -1)
    radius = abs(z) * np.sqrt(rng.uniform(0.0, strict_margin))
    angle = rng.uniform(0, 2 * np.pi)
    return LorentzianParams(x=radius * np.cos(angle), y=radius * np.sin(angle), z=z)


def closed_form_system(p):
    """BiorthogonalSystem assembled from the closed forms (branch order +E, -E)."""
    pair = lorentzian_uv(p)
    return pair, BiorthogonalSystem(
        eigenvalues=np.array([pair.E, -pair.E], dtype=complex),
        right=pair.right_vectors(),
        left=pair.left_vectors(),
        cond=1.0,
    )


class TestMatrix:
    def test_diagonal(self):
        assert_allclose(lorentzian_matrix(LorentzianParams(0, 0, 1)), np.diag([1.0, -1.0]))

    def test_antisymmetric(self):
        assert_allclose(lorentzian_matrix(LorentzianParams(1, 0, 0)), [[0, 1], [-1, 0]])

    def test_generic(self):
        assert_allclose(
            lorentzian_matrix(LorentzianParams(1, 2, 3)),
            [[3, 1 + 2j], [-1 + 2j, -3]],
        )


class TestClosedForms:
    def test_pure_z(self):
        pair = lorentzian_uv(LorentzianParams(0, 0, 1))
        assert pair.u == pytest.approx(-1.0)
        assert pair.v == pytest.approx(0.0)
        assert pair.E == pytest.approx(1.0)

    def test_reference_point(self):
        pair = lorentzian_uv(LorentzianParams(1, 0, 2))
        assert pair.E == pytest.approx(np.sqrt(3.0), abs=1e-12)
        assert abs(abs(pair.u) ** 2 - abs(pair.v) ** 2 - 1.0) <= 1e-12
        # eigen-residual pins (u, v) up to the sign convention; check both
        h = lorentzian_matrix(LorentzianParams(1, 0, 2))
        a1 = pair.right_vectors()[:, 0]
        assert np.linalg.norm(h @ a1 - pair.E * a1) <= 1e-10
        assert pair.u.real < 0 < pair.v.real

    def test_matches_independent_eigensolve(self):
        # oracle: numeric eigenvector of the sgn(z) branch (the positive-norm
        # mode), Bogoliubov-normalized and phase-rotated so u is real with
        # sign -sgn(z)
        rng = np.random.default_rng(50)
        for _ in range(25):
            p = sample_real_regime(rng)
            pair = lorentzian_uv(p)
            assert pair.E * p.z > 0
            evals, vecs = np.linalg.eig(lorentzian_matrix(p))
            idx = int(np.argmax(evals.real)) if p.z > 0 else int(np.argmin(evals.real))
            assert evals[idx].real == pytest.approx(pair.E, abs=1e-10)
            w = vecs[:, idx]
            norm_sq = abs(w[0]) ** 2 - abs(w[1]) ** 2
            assert norm_sq > 0
            w = w / np.sqrt(norm_sq)
            w = w * np.exp(-1j * np.angle(w[0]))  # u real positive
            if p.z > 0:
                w = -w
            assert_allclose([pair.u, pair.v], w, atol=1e-10)

    def test_boundary_rejected(self):
        with pytest.raises(OutsideRealRegime):
            lorentzian_uv(LorentzianParams(1, 0, 1))

    def test_complex_regime_rejected(self):
        with pytest.raises(OutsideRealRegime):
            lorentzian_uv(LorentzianParams(2, 0, 1))

    def test_zero_matrix_rejected(self):
        with pytest.raises(OutsideRealRegime):
            lorentzian_uv(LorentzianParams(0, 0, 0))

    def test_biorthonormal_and_complete(self):
        rng = np.random.default_rng(51)
        for _ in range(100):
            p = sample_real_regime(rng)
            pair, system = closed_form_system(p)
            assert abs(abs(pair.u) ** 2 - abs(pair.v) ** 2 - 1.0) <= 1e-12
            assert biorthonormality_residual(system) <= 1e-10
            assert completeness_residual(system) <= 1e-10

    def test_matches_generic_decomposition_up_to_gauge(self):
        rng = np.random.default_rng(52)
        for _ in range(20):
            p = sample_real_regime(rng)
            pair = lorentzian_uv(p)
            generic = biorthogonal_decompose(lorentzian_matrix(p))
            closed_evals = np.array([pair.E, -pair.E])
            assert_allclose(sorted(generic.eigenvalues.real), sorted(closed_evals), atol=1e-10)
            for mode in (0, 1):
                col = int(np.argmin(np.abs(generic.eigenvalues - closed_evals[mode])))
                a = pair.right_vectors()[:, mode]
                a = a / np.linalg.norm(a)
                k = np.argmax(np.abs(a) > 1e-9)
                a = a * np.exp(-1j * np.angle(a[k]))
                assert_allclose(generic.right[:, col], a, atol=1e-10)


class TestConjugate:
    def test_single_mode(self):
        p = LorentzianParams(1.0, 0.0, 2.0)
        pair = lorentzian_uv(p)
        phibar = lorentzian_conjugate(p, pair.right_vectors()[:, 0], [1.0, 0.0])
        assert_allclose(phibar, pair.left_vectors()[:, 0].conj(), atol=1e-13)

    def test_matches_generic(self):
        rng = np.random.default_rng(53)
        for _ in range(25):
            p = sample_real_regime(rng)
            pair = lorentzian_uv(p)
            coeff = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            psi = pair.right_vectors() @ coeff
            csq = np.array([rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0)])
            closed = lorentzian_conjugate(p, psi, csq)
            generic_sys = biorthogonal_decompose(lorentzian_matrix(p))
            # permute csq into the generic (ascending-eigenvalue) mode order
            closed_evals = np.array([pair.E, -pair.E])
            perm = [int(np.argmin(np.abs(closed_evals - e))) for e in generic_sys.eigenvalues]
            generic = conjugate_field(generic_sys, psi, csq[perm])
            assert_allclose(closed, generic, atol=1e-12)

    def test_missing_mode(self):
        p = LorentzianParams(1.0, 0.0, 2.0)
        pair = lorentzian_uv(p)
        psi = pair.right_vectors()[:, 1]  # no component along mode 1
        with pytest.raises(ZeroModalCoefficient):
            lorentzian_conjugate(p, psi, [1.0, 0.0])


class TestSweep:
    def test_constant_path_conserves_actions(self):
        path = SweepPath.linear((1.0, 0.0, 3.0), (1.0, 0.0, 3.0), T=20.0)
        st = initial_sweep_state(path, [1.0, 1.0])
        rec = sweep_adiabatic(path, st, dt=0.0025)
        assert rec.max_deviation() <= 1e-10

    def test_reference_path_deviation_small(self):
        path = SweepPath.linear((1.0, 0.0, 3.0), (1.0, 0.0, 5.0), T=100.0)
        st = initial_sweep_state(path, [1.0, 0.0])
        rec = sweep_adiabatic(path, st, dt=0.0025)
        assert rec.max_deviation() <= 0.05

    def test_slower_sweep_improves(self):
        devs = []
        for T in (25.0, 50.0):
            path = SweepPath.linear((1.0, 0.0, 3.0), (1.0, 0.0, 5.0), T=T)
            st = initial_sweep_state(path, [1.0, 0.0])
            devs.append(sweep_adiabatic(path, st, dt=0.0025).max_deviation())
        assert devs[1] < devs[0]

    def test_overlap_conserved_during_sweep(self):
        path = SweepPath.linear((1.0, 0.0, 3.0), (0.5, 0.5, 4.0), T=30.0)
        st = initial_sweep_state(path, [1.0, 0.5])
        rec = sweep_adiabatic(path, st, dt=0.0025)
        assert np.max(np.abs(rec.overlaps - rec.overlaps[0])) <= 1e-9

    def test_regime_exit_rejected(self):
        path = SweepPath.linear((1.0, 0.0, 2.0), (2.0, 0.0, 1.0), T=10.0)
        st = initial_sweep_state(path, [1.0, 0.0])
        with pytest.raises(OutsideRealRegime):
            sweep_adiabatic(path, st, dt=0.01)

    def test_regime_guard_can_be_disabled(self):
        path = SweepPath.linear((0.5, 0.0, 2.0), (1.1, 0.0, 1.0), T=5.0, samples=11)
        st = initial_sweep_state(path, [1.0, 0.0])
        with pytest.raises(OutsideRealRegime):
            sweep_adiabatic(path, st, dt=0.01)
        # without the guard the integration proceeds; samples past the regime
        # boundary report the closed-form breakdown as NaN actions
        rec = sweep_adiabatic(path, st, dt=0.01, require_real_spectrum=False)
        assert np.isfinite(rec.actions[0]).all()
        assert np.isnan(rec.actions[-1]).all()

    def test_step_guard_along_path(self):
        path = SweepPath.linear((1.0, 0.0, 30.0), (1.0, 0.0, 40.0), T=10.0)
        st = initial_sweep_state(path, [1.0, 0.0])
        with pytest.raises(StepTooLarge):
            sweep_adiabatic(path, st, dt=0.05)


def test_params_regime_predicate():
    assert LorentzianParams(1, 0, 2).in_real_regime
    assert LorentzianParams(1, 0, 1).in_real_regime      # boundary: real (degenerate)
    assert not LorentzianParams(2, 0, 1).in_real_regime
