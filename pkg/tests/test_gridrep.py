import math

import numpy as np
import pytest

from qdirac import gridrep
from qdirac.errors import IncommensurateGrid, ParameterError
from qdirac.oscillator import energy, equivalence_map
from qdirac.qalgebra import q_number


@pytest.fixture(scope="module")
def table():
    return gridrep.convergence_table(0.25, 0.75, (256, 512, 1024), 8)


def test_commutator_residual_decreases(table):
    assert np.all(np.diff(table[:, 2]) < 0)
    assert table[-1, 2] < 1e-12


def test_spacing_fixed(table):
    np.testing.assert_allclose(table[:, 1], math.sqrt(-math.log(0.75) / 2) / 8)


def test_dirac_levels_converge(table):
    assert table[-1, 3:].max() < 1e-2
    assert table[-1, 3:].max() <= table[0, 3:].max()


@pytest.mark.parametrize("q", [0.5, 0.75, 0.9])
def test_number_spectrum_is_q_ladder(q):
    g = gridrep.GridConfig(q, 1024, 8)
    w, _ = gridrep.number_spectrum(g, 6)
    np.testing.assert_allclose(w, q_number(np.arange(6), q), atol=1e-9)
    assert gridrep.vacuum_residual(g) < 1e-9


def test_sectors_are_identical_ladders():
    g = gridrep.GridConfig(0.75, 512, 4)
    spectra = [gridrep.number_spectrum(g, 4, sector=r)[0] for r in range(4)]
    for s in spectra:
        np.testing.assert_allclose(s, q_number(np.arange(4), 0.75), atol=1e-8)


def test_adjoint_exact():
    g = gridrep.GridConfig(0.75, 256, 8)
    H = gridrep.grid_hamiltonian(g, "dirac", xi=0.25, sector=0)
    assert np.array_equal(H, H.conj().T)


def test_coupling_constant():
    g = gridrep.GridConfig(0.75, 256, 8)
    assert gridrep.coupling_mismatch(0.25, g) < 1e-14
    G = gridrep.check_G_constant(0.25, 0.75)
    assert G == pytest.approx(0.5 / math.sqrt(2 * (1 - 0.75)))


def test_G_diverges_towards_q1():
    ratio = gridrep.check_G_constant(0.25, 0.999) / gridrep.check_G_constant(0.25, 0.99)
    assert ratio == pytest.approx(math.sqrt(0.01 / 0.001), rel=0.01)


def test_hermite_limit():
    g = gridrep.GridConfig(0.999, 1024, 1)
    el = gridrep.ladder_elements(g, 4)
    np.testing.assert_allclose(np.abs(el), np.sqrt(np.arange(1, 5)), rtol=2e-3)


def test_grid_dirac_levels_match_analytic():
    g = gridrep.GridConfig(0.75, 512, 8)
    lv = gridrep.dirac_levels(0.25, g, 3)
    exact = energy(np.arange(1, 4), 0.25, 0.75)
    np.testing.assert_allclose(lv, np.column_stack([exact, exact]), rtol=1e-8)


def test_ajc_grid_equals_dirac_grid():
    g = gridrep.GridConfig(0.5, 128, 4)
    hd = gridrep.grid_hamiltonian(g, "dirac", xi=0.3)
    ha = gridrep.grid_hamiltonian(g, "ajc", params=equivalence_map(0.3))
    assert np.abs(hd - ha).max() < 1e-14 * np.abs(hd).max()


def test_from_spacing():
    alpha = math.sqrt(-math.log(0.75) / 2)
    assert gridrep.GridConfig.from_spacing(0.75, alpha / 4, 256).shift_steps == 4
    with pytest.raises(IncommensurateGrid):
        gridrep.GridConfig.from_spacing(0.75, alpha / 4.5, 256)


@pytest.mark.parametrize("kwargs", [dict(q=1.0, points=256), dict(q=0.75, points=250), dict(q=0.75, points=32), dict(q=0.3, points=1024)])
def test_bad_grids(kwargs):
    with pytest.raises(ParameterError):
        gridrep.GridConfig(**kwargs)
