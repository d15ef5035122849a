import numpy as np
import pytest
from conftest import fibonacci_sphere
from scipy import special

import dfie.scatter as sc
from dfie.harmonics import harmonic_basis
from dfie.media import make_setup
from dfie.scatter import (FieldEvaluationError, NearSingularError, PlaneWave, dfie_rhs, evaluate_field,
                          mie_coefficients, mie_cross_sections, mie_reference, relative_error, silver_muller_residual,
                          solve)

PW = PlaneWave()
PTS = np.vstack([fibonacci_sphere(12, 2.0), fibonacci_sphere(12, 0.5)])


def _multipole_field(pw, k, x, nmax):
    r = np.linalg.norm(x, axis=1)
    th, ph = np.arccos(x[:, 2] / r), np.arctan2(x[:, 1], x[:, 0])
    out = np.zeros((len(r), 3), dtype=complex)
    for n in range(1, nmax + 1):
        L = np.sqrt(n * (n + 1.0))
        j = special.spherical_jn(n, k * r)
        dj = special.spherical_jn(n, k * r, derivative=True)
        al, be = pw.multipole_coefficients(n)
        for i, m in enumerate(range(-n, n + 1)):
            B = harmonic_basis(n, m, th, ph)
            M = -L * j[:, None] * B.W
            N = (n * (n + 1) * j / (k * r))[:, None] * B.X + (L * (j / (k * r) + dj))[:, None] * B.V
            out += al[i] * M + be[i] * N
    return out


@pytest.mark.parametrize("pw", [PlaneWave(), PlaneWave((0, 1, 0), (0, 0, 1j), 2.0),
                                PlaneWave((0.6, 0, 0.8), (0, 1, 0))])
def test_plane_wave_expansion(pw):
    st = make_setup(1.0, 1.3, 1.0)
    x = fibonacci_sphere(20, 1.5)
    E, H = pw.fields(x, st)
    np.testing.assert_allclose(_multipole_field(pw, 1.0, x, 25), E, atol=1e-12)
    assert np.allclose(np.sum(H * E, axis=1), 0)


def test_plane_wave_validation():
    with pytest.raises(ValueError):
        PlaneWave((0, 0, 2), (1, 0, 0))
    with pytest.raises(ValueError):
        PlaneWave((0, 0, 1), (0, 0, 1))
    with pytest.raises(ValueError):
        PlaneWave((0, 0, 1), (1, 1, 0))


@pytest.mark.parametrize("field", ["E", "H"])
def test_divergence_row_is_exactly_zero(field):
    st = make_setup(2.0, -2 + 1j, -1 + 1j)
    for n in range(0, 6):
        b = dfie_rhs(PW, st, n, field)
        q = 2 if n >= 1 else 0
        assert np.all(b[q] == 0)


def test_electrostatic_limit():
    st = make_setup(0.0, 4.0, 1.0, n_max=6)
    res = solve("dfie", PW, st)
    fs = evaluate_field(res, np.array([[0.1, 0.2, 0.3], [0.0, 0.0, -0.6], [0.0, 0.0, 3.0]]))
    np.testing.assert_allclose(fs.E[:2], np.tile([3 / (4 + 2), 0, 0], (2, 1)), atol=1e-13)
    # exterior: dipole field with moment (eps - 1)/(eps + 2)
    p = 0.5
    np.testing.assert_allclose(fs.E[2], [-p / 27, 0, 0], atol=1e-13)
    assert fs.H is None


@pytest.mark.parametrize("formulation", ["dfie", "dfie-h", "dfie-scaled", "muller", "decoupled-cc"])
@pytest.mark.parametrize("eps,mu,w", [(1.3, 1.0, 1.0), (-3 + 1j, -2 + 0.5j, 1.5), (2 + 0.3j, 1.4, 4.0)])
def test_matches_mie(formulation, eps, mu, w):
    st = make_setup(w, eps, mu)
    fs = evaluate_field(solve(formulation, PW, st), PTS)
    ref = mie_reference(PW, st, PTS)
    assert relative_error(fs.E, ref.E) < 1e-9
    assert relative_error(fs.H, ref.H) < 1e-9


def test_cc_matches_mie_for_both_eta():
    st = make_setup(1.0, 1.3, 1.0)
    ref = mie_reference(PW, st, PTS)
    for eta in (0.0, 1.0, 1j):
        assert relative_error(evaluate_field(solve("cc", PW, st, eta=eta), PTS).E, ref.E) < 1e-9


def test_single_layer_scalar_representation():
    st = make_setup(1.0, 1.3, 1.0)
    fs = evaluate_field(solve("decoupled-cc", PW, st, representation="single-layer"), PTS)
    assert relative_error(fs.E, mie_reference(PW, st, PTS).E) < 1e-9


def test_residuals_and_condition_recorded():
    res = solve("dfie", PW, make_setup(1.0, -2 + 1j, -1 + 1j))
    assert max(res.residuals.values()) < 1e-12
    assert 1 <= res.condition < 1e3 and res.smin > 0
    assert set(res.densities) == set(range(res.nmax + 1))
    assert res.densities[3].shape == (6, 7)


def test_dng_mie_coefficients_finite():
    st = make_setup(2.0, -3 + 1j, -2 + 0.5j)
    co = mie_coefficients(PW, st)
    for n in range(1, co.nmax + 1):
        for c in (co.A[n], co.B[n], co.C[n], co.D[n]):
            assert np.all(np.isfinite(c))
    with pytest.raises(ValueError):
        mie_coefficients(PW, make_setup(0.0, 1.3, 1.0))


def test_optical_theorem():
    ext, sca = mie_cross_sections(PW, make_setup(1.0, 1.3, 1.0))
    assert abs(ext - sca) < 1e-12 * ext
    ext, sca = mie_cross_sections(PW, make_setup(1.0, 1.3 + 0.2j, 1.0))
    assert ext > sca > 0
    # Rayleigh limit: (8 pi / 3) k^4 |(eps - 1)/(eps + 2)|^2
    ext, sca = mie_cross_sections(PW, make_setup(0.01, 1.3, 1.0))
    assert sca == pytest.approx(8 * np.pi / 3 * 1e-8 * (0.3 / 3.3) ** 2, rel=1e-3)


def test_exclusion_band_and_origin():
    res = solve("dfie", PW, make_setup(1.0, 1.3, 1.0, n_max=6))
    with pytest.raises(FieldEvaluationError):
        evaluate_field(res, [[0, 0, 1.0005]])
    with pytest.raises(FieldEvaluationError):
        evaluate_field(res, [[0, 0, 0]])
    with pytest.raises(FieldEvaluationError):
        evaluate_field(res, [[0, 1.0]])
    evaluate_field(res, [[0, 0, 1.002], [0, 0, 0.998]])


def test_muller_fields_refused_at_low_frequency():
    res = solve("muller", PW, make_setup(1e-4, 1.3, 1.0, n_max=4))
    with pytest.raises(FieldEvaluationError):
        evaluate_field(res, [[0, 0, 2.0]])


def test_silver_muller_decay():
    res = solve("dfie", PW, make_setup(2.0, -2 + 1j, -1 + 1j))
    r10 = silver_muller_residual(res, 10.0)
    r100 = silver_muller_residual(res, 100.0)
    # leading terms cancel: residual ~ 1/r^2 while the field ~ 1/r
    assert r100 < r10 / 50


def test_near_singular_error(monkeypatch):
    monkeypatch.setattr(sc, "SINGULAR_RTOL", 1.0)
    with pytest.raises(NearSingularError) as e:
        solve("dfie", PW, make_setup(1.0, 1.3, 1.0, n_max=3))
    assert e.value.n == 0 and e.value.smin <= e.value.smax
    solve("dfie", PW, make_setup(1.0, 1.3, 1.0, n_max=3), check_singular=False)


def test_spectral_convergence():
    st = make_setup(3.0, 1.3, 1.0)
    ref = mie_reference(PW, st, PTS, nmax=40).E
    errs = [relative_error(evaluate_field(solve("dfie", PW, make_setup(3.0, 1.3, 1.0, n_max=nm)), PTS).E, ref)
            for nm in (4, 8, 12, 16)]
    assert all(b < a / 20 for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-9


def test_low_frequency_h_field():
    # H from the DFIE-H problem keeps its accuracy as omega -> 0 (relative to |H|)
    for w in (1e-3, 1e-6):
        st = make_setup(w, 1.3, 1.0, n_max=20)
        ref = mie_reference(PW, st, PTS)
        fs = evaluate_field(solve("dfie-h", PW, st), PTS)
        assert relative_error(fs.E, ref.E) < 1e-7
        assert relative_error(fs.H, ref.H) < 1e-6


@pytest.mark.parametrize("radius", [2.0, 10.0])
def test_far_exterior_agreement(radius):
    st = make_setup(1.0, -2 + 1j, -1 + 1j)
    x = fibonacci_sphere(16, radius)
    fs = evaluate_field(solve("dfie", PW, st), x)
    assert relative_error(fs.E, mie_reference(PW, st, x).E) < 1e-10
