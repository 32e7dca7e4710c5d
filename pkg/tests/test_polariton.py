import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarwave.errors import CurvatureTooSmall, DegenerateCoupling, OutOfRange
from polarwave.model import EV_TO_HZ, SystemParams, coupling_g, detuning_delta, photon_dispersion, photon_mass_energy
from polarwave.polariton import (
    Branch,
    branch_amplitudes,
    branch_energy,
    branch_fractions,
    effective_mass,
    hopfield,
    polariton_mass_at_resonance,
    rabi_splitting,
)

ks = st.floats(-6.2e-4, 6.2e-4)
detunings = st.floats(-5e-3, 5e-3)


def _eigh_oracle(k, p):
    """Diagonalise the 2x2 excitation-photon block directly."""
    g = complex(coupling_g(k, p))
    h = np.array([[p.e_a, np.conj(g)], [g, float(photon_dispersion(k, p))]])
    return np.linalg.eigh(h)


@given(ks, detunings)
def test_matches_direct_diagonalisation(k, det):
    p = SystemParams().with_detuning(det)
    w, vecs = _eigh_oracle(k, p)
    upper, lower = hopfield(k, p)
    assert lower.energy == pytest.approx(w[0], rel=1e-12)
    assert upper.energy == pytest.approx(w[1], rel=1e-12)
    for mode, col in ((lower, 0), (upper, 1)):
        assert abs(mode.x) ** 2 == pytest.approx(abs(vecs[0, col]) ** 2, abs=1e-9)
        assert abs(mode.y) ** 2 == pytest.approx(abs(vecs[1, col]) ** 2, abs=1e-9)


@given(ks, detunings)
def test_normalisation_orthogonality_sum_rule(k, det):
    p = SystemParams().with_detuning(det)
    upper, lower = hopfield(k, p)
    for m in (upper, lower):
        assert abs(abs(m.x) ** 2 + abs(m.y) ** 2 - 1) < 1e-12
    assert abs(upper.x * np.conj(lower.x) + upper.y * np.conj(lower.y)) < 1e-12
    assert upper.energy + lower.energy == pytest.approx(photon_dispersion(k, p) + p.e_a, abs=1e-12 * p.e_a)
    assert upper.energy > lower.energy


def test_sign_convention(chain):
    upper, lower = hopfield(0.0, chain)
    assert lower.x.real < 0 and upper.x.real > 0
    assert lower.y.imag < 0 and upper.y.imag < 0


def test_resonance_half_half(chain):
    x2, y2 = branch_fractions(0.0, chain, Branch.LOWER)
    assert (x2, y2) == (0.5, 0.5)


def test_decoupling_at_large_k(chain):
    # photon lies far above the transition at the zone edge
    k = 6e-4
    assert branch_fractions(k, chain, Branch.LOWER)[0] > 0.999
    assert branch_fractions(k, chain, Branch.UPPER)[1] > 0.999


def test_gap_identities(chain):
    k = np.linspace(-3e-4, 3e-4, 61)
    e_up = branch_energy(k, chain, Branch.UPPER)
    e_lo = branch_energy(k, chain, Branch.LOWER)
    d = np.hypot(detuning_delta(k, chain), np.abs(coupling_g(k, chain)))
    assert np.allclose(e_up - e_lo, 2 * d, rtol=1e-9, atol=0)


def test_avoided_crossing_min_gap(chain):
    k = np.linspace(-1e-5, 1e-5, 2001)
    gap = branch_energy(k, chain, Branch.UPPER) - branch_energy(k, chain, Branch.LOWER)
    assert gap.min() == pytest.approx(2 * abs(coupling_g(0.0, chain)), rel=1e-9)


def test_rabi_splitting(chain):
    s = rabi_splitting(chain)
    assert s == pytest.approx(1.518e-5, rel=1e-3)
    assert s * EV_TO_HZ / 1e9 == pytest.approx(3.67, rel=2e-3)
    detuned = chain.with_detuning(2e-5)
    assert rabi_splitting(detuned) > 2 * abs(coupling_g(0.0, detuned))
    weak = chain.with_detuning(2e-5).replace(mu=1e-9)
    assert rabi_splitting(weak) == pytest.approx(2 * abs(detuning_delta(0.0, weak)), rel=1e-6)


def test_degenerate_coupling(chain):
    with pytest.raises(DegenerateCoupling):
        hopfield(0.0, chain.replace(mu=0.0))


def test_fractions_stable_far_from_resonance():
    p = SystemParams().with_detuning(-0.3)
    x2, y2 = branch_fractions(0.0, p, Branch.LOWER)
    g2 = abs(coupling_g(0.0, p)) ** 2
    delta = float(detuning_delta(0.0, p))
    # leading order of (D - |delta|) / 2D for |delta| >> |g|
    assert x2 == pytest.approx(g2 / (4 * delta**2), rel=1e-6)
    assert x2 > 0 and y2 < 1


def test_mass_at_resonance(chain):
    m_c = photon_mass_energy(chain)
    for branch in (Branch.LOWER, Branch.UPPER):
        m = effective_mass(branch, 0.0, chain)
        assert abs(m) == pytest.approx(2 * m_c, rel=1e-3)
    assert effective_mass(Branch.LOWER, 0.0, chain) > 0
    assert effective_mass(Branch.UPPER, 0.0, chain) > 0
    # frozen closed-form curvature mass including the |g|/E_C correction
    assert polariton_mass_at_resonance(chain) == pytest.approx(8.0000607, rel=1e-8)
    assert effective_mass(Branch.LOWER, 0.0, chain) == pytest.approx(polariton_mass_at_resonance(chain), rel=1e-7)


def test_mass_photonic_limit(chain):
    p = chain.with_detuning(-0.1)
    assert effective_mass(Branch.LOWER, 0.0, p) == pytest.approx(photon_mass_energy(p), rel=1e-2)


def test_mass_errors(chain):
    with pytest.raises(OutOfRange):
        effective_mass(Branch.LOWER, chain.zone_edge, chain)
    flat = lambda *a, **k: 0.0  # noqa: E731
    import polarwave.polariton as pol

    orig = pol.branch_energy
    pol.branch_energy = flat
    try:
        with pytest.raises(CurvatureTooSmall):
            effective_mass(Branch.LOWER, 0.0, chain)
    finally:
        pol.branch_energy = orig


def test_vectorised_amplitudes_agree(chain):
    k = np.linspace(-1e-4, 1e-4, 11)
    e, x, y = branch_amplitudes(k, chain, Branch.LOWER)
    for i, q in enumerate(k):
        lower = hopfield(float(q), chain)[1]
        assert e[i] == lower.energy and x[i] == lower.x and y[i] == lower.y
