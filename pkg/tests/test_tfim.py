import math

import numpy as np
import numpy.testing as npt
import pytest

from critmet import tfim
from critmet.errors import DomainError, ValidationError


@pytest.mark.parametrize("coupling", [0.4, 1.0, 1.7])
@pytest.mark.parametrize("n", [4, 6, 8])
def test_momentum_route_matches_exact_diagonalisation(n, coupling):
    p = tfim.TfimParams(n, 1.0, coupling)
    ed = tfim.exact_observables(p, omega_prime=1.08)
    npt.assert_allclose(tfim.qfi(p), ed.qfi, rtol=1e-8)
    npt.assert_allclose(tfim.magnetization_z_signed(p), ed.magnetization_z, atol=1e-10)
    corr = np.array([tfim.two_point_zz(p, r) for r in range(1, n)])
    npt.assert_allclose(corr, ed.correlations, atol=1e-10)
    npt.assert_allclose(tfim.fidelity(p, 1.08), ed.fidelity, atol=1e-10)


@pytest.mark.parametrize("n", [4, 10, 100, 1000, 4096])
def test_critical_closed_form(n):
    npt.assert_allclose(tfim.qfi(tfim.TfimParams(n, 1.0, 1.0)), (n * n - n) / 8, rtol=1e-9)
    npt.assert_allclose(tfim.qfi(tfim.TfimParams(n, 2.0, 2.0)), tfim.qfi_critical_closed_form(n, 2.0), rtol=1e-9)


def test_frozen_values():
    p = tfim.TfimParams(64, 1.0, 1.0)
    npt.assert_allclose(tfim.collective_snr(p), 141.46504636940622, rtol=1e-10)
    npt.assert_allclose(tfim.local_snr(p), 3.7172307883949665, rtol=1e-10)
    npt.assert_allclose(tfim.magnetization_z(p), 0.6366836927259822, rtol=1e-12)


def test_qfi_is_four_times_susceptibility():
    p = tfim.TfimParams(20, 1.0, 0.8)
    npt.assert_allclose(tfim.qfi(p), 4 * tfim.fidelity_susceptibility(p), rtol=1e-12)
    # fidelity expansion 1 - chi_F d^2 / 2
    d = 1e-4
    npt.assert_allclose(1 - tfim.fidelity(p, 1.0 + d), 0.5 * tfim.fidelity_susceptibility(p) * d * d, rtol=1e-3)


def test_susceptibility_is_magnetisation_slope():
    p = tfim.TfimParams(16, 0.9, 1.1)
    fd = (tfim.magnetization_z_signed(tfim.TfimParams(16, 0.9 + 1e-6, 1.1))
          - tfim.magnetization_z_signed(tfim.TfimParams(16, 0.9 - 1e-6, 1.1))) / 2e-6
    npt.assert_allclose(tfim.susceptibility_z(p), fd, rtol=1e-7)


def test_gap_and_block_angles():
    p = tfim.TfimParams(200, 1.0, 1.0)
    npt.assert_allclose(tfim.gap(p), tfim.gap_approx(p), rtol=1e-3)
    k, theta, dhalf = tfim.block_angles(tfim.TfimParams(8, 1.0, 0.5))
    assert np.all((theta > 0) & (theta < math.pi))
    assert len(tfim.blocks(tfim.TfimParams(8, 1.0, 0.5))) == 4
    npt.assert_allclose(tfim.dispersion(p, 0.0), 0.0, atol=1e-15)


def test_adiabatic_rewrite():
    p = tfim.TfimParams(40, 1.0, 1.0)
    t = tfim.adiabatic_time(p, 0.05)
    assert t > 0
    npt.assert_allclose(tfim.adiabatic_qfi(p, 0.05), 8 * math.pi ** 2 * 0.05 ** 2 * t * t + math.pi * 0.05 * t)


def test_scaling_exponents():
    sizes, _, fit = tfim.critical_scaling([32, 64, 128, 256, 512, 1024], tfim.collective_snr)
    assert abs(fit.exponent - 4 / 3) < 0.1
    _, _, fit = tfim.critical_scaling(sizes, tfim.qfi)
    npt.assert_allclose(fit.exponent, 2.0, atol=0.02)


def test_validation():
    for n in (3, 5, 2, 6.5):
        with pytest.raises(ValidationError):
            tfim.TfimParams(n, 1.0, 1.0)
    with pytest.raises(ValidationError):
        tfim.two_point_zz(tfim.TfimParams(8, 1, 1), 8)
    with pytest.raises(ValidationError):
        tfim.dense_hamiltonian(tfim.TfimParams(14, 1, 1))
    with pytest.raises(DomainError):
        tfim.adiabatic_time(tfim.TfimParams(8, 1, 1), 0.0)
    with pytest.raises(DomainError):
        tfim.local_snr(tfim.TfimParams(8, 1.0, 0.0))
