import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarwave.errors import OutOfRange
from polarwave.model import (
    BOLTZMANN,
    CONSTANTS,
    COULOMB_K,
    EV_TO_HZ,
    HBAR_C,
    ROUNDED_Q0,
    SystemParams,
    coupling_g,
    detuning_delta,
    photon_dispersion,
    photon_mass_energy,
    rabi_d,
    resonant_q0,
)
from polarwave.numerics import second_derivative


def test_constants_values():
    assert HBAR_C == 1973.269804
    assert COULOMB_K == 14.399645
    assert BOLTZMANN == 8.617333e-5
    assert EV_TO_HZ == 2.417989e14
    with pytest.raises(Exception):
        CONSTANTS.hbar_c = 1.0


def test_defaults_and_derived_lengths(chain):
    assert chain.fiber_length == 1e7
    assert SystemParams().fiber_length == 5000.0 * 2001
    assert chain.zone_edge == pytest.approx(6.28319e-4, rel=1e-5)


@pytest.mark.parametrize(
    "changes",
    [
        {"a": -1.0},
        {"e_a": 0.0},
        {"epsilon": math.nan},
        {"n_sites": 4},
        {"n_sites": 1},
        {"mu": -0.1},
        {"q0": -1e-3},
        {"l_fiber": 0.0},
        {"gamma_a": 0.0},
        {"e_d": -1.0},
    ],
)
def test_validation_rejects(changes):
    with pytest.raises(OutOfRange):
        SystemParams(**changes)


def test_resonant_q0_values():
    assert resonant_q0(SystemParams()) == pytest.approx(1.01354e-3, rel=1e-5)
    assert resonant_q0(SystemParams(epsilon=1.0)) == pytest.approx(5.0677e-4, rel=1e-4)


@given(st.floats(0.1, 5.0), st.floats(1.0, 12.0))
def test_resonant_q0_round_trip(e_a, eps):
    p = SystemParams(e_a=e_a, epsilon=eps)
    assert photon_dispersion(0.0, p) == pytest.approx(e_a, rel=1e-12)


def test_photon_dispersion_examples():
    assert photon_dispersion(0.0, SystemParams()) == pytest.approx(1.0, rel=1e-12)
    rounded = SystemParams(q0=ROUNDED_Q0)
    assert photon_dispersion(math.pi / 5000.0, rounded) == pytest.approx(1.165, abs=5e-4)
    assert photon_dispersion(0.0, rounded) == pytest.approx(0.9866, abs=1e-4)
    q = 100 * rounded.q0
    asym = HBAR_C * q / math.sqrt(rounded.epsilon)
    assert abs(photon_dispersion(q, rounded) / asym - 1) < 1e-4


@given(st.floats(0.0, 1e-2), st.floats(1e-6, 1e-3))
def test_photon_dispersion_even_and_increasing(q, dq):
    p = SystemParams()
    assert photon_dispersion(q, p) == photon_dispersion(-q, p)
    assert photon_dispersion(q + dq, p) > photon_dispersion(q, p)


def test_zone_edge_photon_above_transition(chain):
    assert photon_dispersion(chain.zone_edge, chain) > chain.e_a


def test_coupling_magnitude(chain):
    g0 = coupling_g(0.0, chain)
    assert g0.real == 0.0 and g0.imag < 0
    assert abs(g0) == pytest.approx(7.589e-6, rel=1e-3)
    assert coupling_g(0.0, chain.replace(mu=0.0)) == 0


@given(st.floats(-6e-4, 6e-4), st.sampled_from([3, 101, 2001]))
def test_coupling_is_n_independent(k, n):
    p = SystemParams(n_sites=n)
    ratio = abs(coupling_g(k, p)) ** 2 * p.a**3 / (photon_dispersion(k, p) * p.u_b**2 * p.mu**2)
    assert ratio == pytest.approx(2 * COULOMB_K, rel=1e-12)
    assert abs(coupling_g(k, p)) / abs(coupling_g(0.0, p)) == pytest.approx(
        math.sqrt(photon_dispersion(k, p) / photon_dispersion(0.0, p)), rel=1e-12
    )


def test_detuning_and_half_gap(chain):
    assert detuning_delta(0.0, chain) == 0.0
    assert rabi_d(0.0, chain) == pytest.approx(abs(coupling_g(0.0, chain)), rel=1e-15)
    k = np.linspace(-6e-4, 6e-4, 101)
    d = rabi_d(k, chain)
    assert np.all(d >= np.maximum(np.abs(detuning_delta(k, chain)), np.abs(coupling_g(k, chain))))


def test_detuning_arithmetic():
    # a cutoff placing E_C at 1.18 eV gives delta = 0.09 eV
    p = SystemParams().with_detuning(0.18)
    assert detuning_delta(0.0, p) == pytest.approx(0.09, rel=1e-12)


def test_photon_mass(chain):
    m_c = photon_mass_energy(chain)
    assert m_c == pytest.approx(4.0, rel=1e-12)
    assert photon_mass_energy(chain.replace(q0=chain.cutoff, epsilon=16.0)) == pytest.approx(2 * m_c, rel=1e-12)
    curv = second_derivative(lambda q: float(photon_dispersion(q, chain)), 0.0, 1e-6)
    assert curv == pytest.approx(HBAR_C**2 / m_c, rel=1e-6)


def test_with_detuning(chain):
    for det in (-1e-4, 0.0, 2e-3):
        p = chain.with_detuning(det, 1e-6)
        assert photon_dispersion(1e-6, p) - p.e_a == pytest.approx(det, abs=1e-15)
    with pytest.raises(OutOfRange):
        chain.with_detuning(-2.0)
