"""Independent reference implementations shared by the tests.

Nothing here imports the closed-form machinery of the package.
"""

import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import solve_ivp

ACCEPTANCE_LINES: list[str] = []


def ode_teo(k1, k2, k3, mu, nu, t_from, t_to, tol=1e-12):
    """``(K11, K12)`` by integrating the mode system in ``t`` directly (``t_from > 0``)."""
    kp = complex(k2, k1)

    def f(t, y):
        p = kp * t ** (-nu) * np.exp(-2j * k3 * t**mu / mu)
        return [p * y[1], -np.conj(p) * y[0]]

    sol = solve_ivp(f, [t_from, t_to], np.array([1.0, 0.0], complex), method="DOP853", rtol=tol, atol=tol * 1e-2)
    a, b = sol.y[:, -1]
    return complex(a), complex(-np.conj(b))


def mode_residual(state_fn, k1, k2, k3, mu, nu, t, rel_h=1e-3):
    """Relative residual of ``phi1' = P phi2, phi2' = -conj(P) phi1`` by a 5-point stencil."""
    h = rel_h * t
    v = [np.asarray(state_fn(t + j * h).as_array()) for j in (-2, -1, 1, 2)]
    d = (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h)
    p = complex(k2, k1) * t ** (-nu) * np.exp(-2j * k3 * t**mu / mu)
    phi = np.asarray(state_fn(t).as_array())
    rhs = np.array([p * phi[1], -np.conj(p) * phi[0]])
    return float(np.linalg.norm(d - rhs) / max(np.linalg.norm(rhs), np.linalg.norm(phi) / t))


def mp_closed_teo(k1, k2, k3, mu, nu, t, use_d=True, dps=30):
    """Closed-form TEO from ``t_A = 0`` with mpmath Bessel functions and quadrature."""
    with mp.workdps(dps):
        d = (1 - nu) / mu
        kap = float(np.hypot(k1, k2))
        kp = complex(k2, k1)
        s = t**mu
        tau = 2 * k3 * s / mu
        x = kap * s**d / (mu * (1 - d))
        d1 = (1 - d) / d / (np.exp(1 - d) - 1)
        d2 = 2 * float(mp.hyp1f1(1, 1 + d, 1 - d)) / (np.exp(1 - d) + 1)
        dd = d1 * d2 if use_d else 1.0
        lam = mp.mpc(0.5, tau / (2 * (1 - d)))
        xd = dd * x
        jm, jp = mp.besselj(-lam, xd), mp.besselj(lam, xd)
        z0 = jm * mp.besselj(-mp.conj(lam), xd) + jp * mp.besselj(mp.conj(lam), xd)

        def rz(z):
            big = xd * mp.e ** ((1 - d) * z)
            r = jm * mp.besselj(lam, big) - jp * mp.besselj(-lam, big)
            zz = jm * mp.besselj(-mp.conj(lam), big) + jp * mp.besselj(mp.conj(lam), big)
            return r, zz

        def v(z):
            r, _ = rz(z)
            return 1j * mp.e ** ((1 - d) * mp.conj(lam) * z) * r / z0

        def u(z):
            _, zz = rz(z)
            return mp.e ** ((1 - d) * lam * z) * zz / z0

        iv = mp.quad(lambda w: v(1 - w ** (1 / d)), [0, 1]) / d
        iu = mp.quad(lambda w: u(1 - w ** (1 / d)), [0, 1]) / d
        k11 = 1 + 1j * (1 - d) * x * iv
        k12 = kp / kap * (1 - d) * x * np.exp(-1j * tau) * iu
        return complex(k11), complex(k12)


@pytest.fixture
def record_criterion():
    def _record(line: str) -> None:
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
