import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.background import Background, Mode
from artifact.diagnostics import fit_power_law, frobenius_error, group_law_residual, structure_residual
from artifact.errors import DomainError
from artifact.exact_models import rw_exact_teo
from artifact.oracle import (
    MAX_PICARD_ORDER,
    TeoMatrix,
    WeylModeState,
    evolve_oracle,
    evolve_state,
    omega_matrix,
    picard_teo,
)

from conftest import ode_teo

RW = Background(0.5, 0.5)
modes = st.tuples(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3)).filter(lambda k: abs(k[2]) > 1e-2)


def test_omega_examples():
    bg = Background(1.0, 0.4)
    assert np.all(omega_matrix(Mode(0, 0, 2), bg, 0.7) == 0)
    m0 = Mode(0.3, 0.4, 0.0)
    expect = complex(0.4, 0.3) * 0.7 ** (-0.4)
    assert omega_matrix(m0, bg, 0.7)[0, 1] == pytest.approx(expect)
    om = omega_matrix(Mode(0.3, -1.2, 2.5), bg, 1.3)
    assert np.allclose(om.conj().T, -om, atol=0)
    with pytest.raises(DomainError):
        omega_matrix(m0, bg, 0.0)


def test_teo_matrix_structure():
    k = TeoMatrix(0.6 + 0.2j, 0.1 - 0.7j, 0.0, 1.0, "x")
    m = k.matrix
    assert m[1, 0] == -np.conj(m[0, 1]) and m[1, 1] == np.conj(m[0, 0])
    assert k.unitarity_defect == pytest.approx(0.36 + 0.04 + 0.01 + 0.49 - 1)
    assert TeoMatrix.identity(1.0, "x").unitarity_defect == 0


def test_oracle_identity_at_equal_times():
    k = evolve_oracle(Mode(1, 2, 3), Background(1.0, 0.5), t_from=0.5, t_to=0.5)
    assert k.k11 == 1 and k.k12 == 0


def test_oracle_rw_example():
    m = Mode(3, 4, 5)
    o = evolve_oracle(m, RW, t_from=0.0, t_to=1.0)
    e = rw_exact_teo(m, 1.0)
    assert frobenius_error(o, e) <= 1e-8
    assert abs(o.unitarity_defect) <= 1e-8


@pytest.mark.parametrize("mu,nu", [(1.0, 0.5), (4 / 3, 2 / 3), (1.0, 0.25), (0.7, 1.2)])
def test_oracle_against_direct_t_integration(mu, nu):
    k = (0.7, -0.3, 1.6)
    o = evolve_oracle(Mode(*k), Background(mu, nu), t_from=0.2, t_to=2.5, tol=1e-11)
    ref = ode_teo(*k, mu, nu, 0.2, 2.5)
    assert abs(o.k11 - ref[0]) < 1e-8 and abs(o.k12 - ref[1]) < 1e-8


def test_oracle_rejects_singular_start():
    with pytest.raises(DomainError):
        evolve_oracle(Mode(1, 0, 1), Background(1.0, 1.2), t_from=0.0, t_to=1.0)


@settings(max_examples=15, deadline=None)
@given(modes, st.floats(0.05, 1.0), st.floats(0.1, 1.0), st.floats(0.1, 1.0))
def test_group_law(k, ta, d1, d2):
    bg = Background(1.0, 0.4)
    m = Mode(*k)
    tol = 1e-10
    res = group_law_residual(lambda a, b: evolve_oracle(m, bg, t_from=a, t_to=b, tol=tol), ta, ta + d1, ta + d1 + d2)
    assert res <= 10 * tol


@settings(max_examples=15, deadline=None)
@given(modes, st.floats(0.3, 3.0))
def test_full_propagator_structure(k, t):
    """Both columns integrated independently reproduce the symmetric structure."""
    bg = Background(4 / 3, 2 / 3)
    m = Mode(*k)
    c1 = evolve_state(m, bg, np.array([1.0, 0.0]), 0.0, [t], tol=1e-11)[0]
    c2 = evolve_state(m, bg, np.array([0.0, 1.0]), 0.0, [t], tol=1e-11)[0]
    assert structure_residual(np.column_stack([c1, c2])) <= 1e-8


@settings(max_examples=10, deadline=None)
@given(modes, st.floats(0.3, 2.0))
def test_chirality_flip(k, t):
    bg = Background(1.0, 0.3)
    m = Mode(*k)
    plus = evolve_oracle(m, bg, "plus", t_from=0.1, t_to=t + 0.1)
    # positive chirality integrated directly: k -> -k in P
    ref = ode_teo(-k[0], -k[1], -k[2], bg.mu, bg.nu, 0.1, t + 0.1)
    assert abs(plus.k11 - ref[0]) < 1e-8 and abs(plus.k12 - ref[1]) < 1e-8


@settings(max_examples=10, deadline=None)
@given(modes, st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2))
def test_partner_closure(k, a, b):
    bg = Background(1.0, 0.5)
    m = Mode(*k)
    phi = evolve_state(m, bg, np.array([a, b]), 0.2, [2.0], tol=1e-11)[0]
    part = evolve_state(m, bg, np.array([np.conj(b), -np.conj(a)]), 0.2, [2.0], tol=1e-11)[0]
    assert np.linalg.norm(part - np.array([np.conj(phi[1]), -np.conj(phi[0])])) <= 1e-8


def test_state_partner_twice_is_minus():
    from artifact.diagnostics import orthogonality_partner

    s = WeylModeState(0.3 + 1j, -0.2j)
    p2 = orthogonality_partner(orthogonality_partner(s))
    assert p2.phi1 == -s.phi1 and p2.phi2 == -s.phi2


# ---------------------------------------------------------------- Picard


def test_picard_order_zero_and_limits():
    m, bg = Mode(0.5, 0.5, 1.0), Background(1.0, 0.5)
    k0 = picard_teo(m, bg, 0.1, 1.0, order_n=0)
    assert k0.k11 == 1 and k0.k12 == 0
    with pytest.raises(DomainError):
        picard_teo(m, bg, 0.1, 1.0, order_n=MAX_PICARD_ORDER + 1)


def test_picard_converges_to_oracle():
    m, bg = Mode(0.3, 0.2, 1.5), Background(1.0, 0.5)
    o = evolve_oracle(m, bg, t_from=0.0, t_to=1.5, tol=1e-12)
    errs = [frobenius_error(picard_teo(m, bg, 0.0, 1.5, order_n=n), o) for n in range(1, 7)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    # Dyson remainder bound with theta = int |P| dt; sqrt(2) converts to Frobenius
    theta = m.kappa * 1.5**0.5 / 0.5
    for n, e in enumerate(errs, start=1):
        tail = sum(theta**j / math.factorial(j) for j in range(n + 1, 40))
        assert e <= math.sqrt(2) * tail


@pytest.mark.parametrize("order_n", [1, 2, 3])
def test_picard_short_time_order(order_n):
    m, bg = Mode(0.8, 0.6, 1.2), Background(1.0, 0.4)
    ta = 0.5
    samples = []
    for dt in np.geomspace(0.02, 0.2, 8):
        p = picard_teo(m, bg, ta, ta + dt, order_n=order_n)
        o = evolve_oracle(m, bg, t_from=ta, t_to=ta + dt, tol=1e-13)
        samples.append((dt, frobenius_error(p, o)))
    slope, _ = fit_power_law(samples)
    assert slope == pytest.approx(order_n + 1, abs=0.3)


def test_picard_hypersurface_exact():
    from artifact.exact_models import hypersurface_exact_teo

    m, bg = Mode(0.4, 0.3, 0.0), Background(1.0, 0.5)
    xi = hypersurface_exact_teo(m, bg, 0.2, 1.0).meta["xi"]
    for n in range(7):
        p = picard_teo(m, bg, 0.2, 1.0, order_n=n)
        c = sum((-1) ** (j // 2) * xi**j / math.factorial(j) for j in range(0, n + 1, 2))
        s = sum((-1) ** (j // 2) * xi**j / math.factorial(j) for j in range(1, n + 1, 2))
        assert abs(p.k11 - c) < 1e-10
        assert abs(p.k12 - complex(0.3, 0.4) / 0.5 * s) < 1e-10
