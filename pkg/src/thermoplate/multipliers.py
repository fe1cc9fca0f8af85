"""Time-frequency multipliers of the thermoelastic plate problem.

Everything here is a pointwise function of ``(t, xi)`` evaluated in Fourier
space with the convention ``f_hat(xi) = int exp(-i <x, xi>) f(x) dx``.
Functions are vectorised over ``t`` and ``r`` through numpy broadcasting.

Besides the exact solution ``u_hat`` and its leading parts, the module holds
two independent oracles that integrate the transformed equations directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._dopri import STATUS_MAX_STEPS, STATUS_MIN_STEP, solve_linear
from .errors import DegenerateRoots, StepFailure
from .roots import DIFFUSION, CharacteristicRoots, characteristic_roots, imag_sixth_order_coefficient, alt_imag_coefficient

__all__ = [
    "DataSymbol",
    "MomentSet",
    "GaussianDatum",
    "roots_on",
    "sin_over",
    "u2_hat",
    "u_hat",
    "g1_hat",
    "g2_hat",
    "J0_hat",
    "J1_hat",
    "H0_hat",
    "H1_hat",
    "H_hat",
    "phi_hat",
    "phi_sim_hat",
    "psi_hat",
    "pure_plate_hat",
    "ode_oracle_system",
    "ode_oracle_third",
    "SINC_THRESHOLD",
]

SINC_THRESHOLD = 1e-4


@dataclass(frozen=True)
class DataSymbol:
    """Transformed initial data ``(u0_hat, u1_hat, theta0_hat)`` at one or many frequencies."""

    u0_hat: complex = 0.0
    u1_hat: complex = 0.0
    theta0_hat: complex = 0.0

    def __iter__(self):
        return iter((self.u0_hat, self.u1_hat, self.theta0_hat))

    def magnitude(self):
        return np.abs(self.u0_hat) + np.abs(self.u1_hat) + np.abs(self.theta0_hat)


@dataclass(frozen=True)
class MomentSet:
    """Integrals ``P`` of the three data and first moment ``M`` of ``u1``."""

    P_u0: float = 0.0
    P_u1: float = 0.0
    P_theta0: float = 0.0
    M_u1: tuple = (0.0,)

    @property
    def n(self):
        return len(self.M_u1)

    def has_first_moment(self):
        return any(m != 0 for m in self.M_u1)


@dataclass(frozen=True)
class GaussianDatum:
    """``A exp(-|x - x0|^2 / (2 w^2))`` on R^n.

    The transform is ``A (2 pi w^2)^{n/2} exp(-w^2 |xi|^2 / 2) exp(-i <x0, xi>)``.
    A zero amplitude gives the zero datum.
    """

    amplitude: float = 1.0
    width: float = 1.0
    shift: tuple = field(default=())

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("Gaussian width must be positive")

    def _shift(self, n):
        if not self.shift:
            return np.zeros(n)
        x0 = np.asarray(self.shift, dtype=float).ravel()
        if x0.size != n:
            raise ValueError(f"shift has {x0.size} components, dimension is {n}")
        return x0

    def is_radial(self):
        return not self.shift or not np.any(np.asarray(self.shift, dtype=float))

    def mass(self, n):
        """``P_f``."""
        return self.amplitude * (2 * math.pi * self.width**2) ** (n / 2)

    def first_moment(self, n):
        """``M_f = x0 P_f``."""
        return tuple(float(v) for v in self._shift(n) * self.mass(n))

    def transform_radial(self, r, n):
        """Transform as a function of ``|xi|``; only valid for radial data."""
        if not self.is_radial():
            raise ValueError("shifted Gaussian is not radial")
        r = np.asarray(r, dtype=float)
        return self.mass(n) * np.exp(-0.5 * self.width**2 * r * r)

    def transform_line(self, xi):
        """Transform on the real line (n = 1), including the shift phase."""
        xi = np.asarray(xi, dtype=float)
        x0 = self._shift(1)[0]
        return self.mass(1) * np.exp(-0.5 * self.width**2 * xi * xi) * np.exp(-1j * x0 * xi)


def moments_of(u0, u1, theta0, n):
    """MomentSet of three Gaussian data in dimension ``n``."""
    return MomentSet(u0.mass(n), u1.mass(n), theta0.mass(n), u1.first_moment(n))


def roots_on(r, sigma):
    """:class:`CharacteristicRoots` whose fields are arrays shaped like ``r``."""
    r = np.asarray(r, dtype=float)
    l1, lr, li = characteristic_roots(r, sigma)
    return CharacteristicRoots(l1, lr, li, r)


def _sinc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SINC_THRESHOLD
    safe = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)


def sin_over(freq, t):
    """``sin(freq t) / freq`` with its limit ``t`` at ``freq = 0``."""
    return t * _sinc(np.asarray(freq) * t)


def _denominator(roots):
    l1, lr, li = roots.lambda1, roots.lambdaR, roots.lambdaI
    # equals 2 lr l1 - li^2 - lr^2 - l1^2, written without cancellation
    den = -((l1 - lr) ** 2 + li**2)
    size = l1 * l1 + lr * lr + li * li
    if np.any(np.abs(den) <= 1e-14 * size):
        raise DegenerateRoots("characteristic roots are not pairwise distinct")
    return den


def u2_hat(r, data):
    """Third initial value ``-r^4 u0_hat + r^2 theta0_hat`` of the reduced equation."""
    r2 = np.asarray(r, dtype=float) ** 2
    return -r2 * r2 * data.u0_hat + r2 * data.theta0_hat


def u_hat_terms(t, r, roots, data):
    """The three weighted exponentials whose sum is ``u_hat``."""
    l1, lr, li = roots.lambda1, roots.lambdaR, roots.lambdaI
    r2 = np.asarray(r, dtype=float) ** 2
    r4 = r2 * r2
    u0, u1, th = data
    den = _denominator(roots)
    c1 = ((r4 - li**2 - lr**2) * u0 + 2 * lr * u1 - r2 * th) / den
    c2 = ((2 * lr * l1 - l1**2 - r4) * u0 - 2 * lr * u1 + r2 * th) / den
    c3 = ((l1 * (lr * l1 + li**2 - lr**2) + r4 * (lr - l1)) * u0 + (lr**2 - li**2 - l1**2) * u1 - r2 * (lr - l1) * th) / den
    er = np.exp(lr * t)
    return (
        c1 * np.exp(l1 * t),
        c2 * np.cos(li * t) * er,
        c3 * sin_over(li, t) * er,
    )


def u_hat(t, r, roots, data):
    """Exact Fourier-space displacement at time ``t``.

    Parameters
    ----------
    t : float or array
    r : float or array
        Frequency magnitude ``|xi|``.
    roots : CharacteristicRoots
        Roots at ``r`` (scalar or array fields).
    data : DataSymbol

    Raises
    ------
    DegenerateRoots
        If two roots coincide.
    """
    a, b, c = u_hat_terms(t, r, roots, data)
    return a + b + c


def g1_hat(t, r, roots, data):
    """Leading small-frequency part driven by ``u1``."""
    l1, lr, li = roots.lambda1, roots.lambdaR, roots.lambdaI
    den = _denominator(roots)
    return -(l1**2) * sin_over(li, t) * np.exp(lr * t) / den * data.u1_hat


def g2_hat(t, r, roots, data):
    """Leading small-frequency part driven by ``u0`` and ``theta0``."""
    l1, lr, li = roots.lambda1, roots.lambdaR, roots.lambdaI
    r2 = np.asarray(r, dtype=float) ** 2
    den = _denominator(roots)
    er = np.exp(lr * t)
    return -(l1**2) * np.cos(li * t) * er / den * data.u0_hat + r2 * l1 * sin_over(li, t) * er / den * data.theta0_hat


def _damping(t, r, sigma):
    if sigma <= 0:
        raise ValueError("diffusion-plate kernels need sigma > 0")
    r2 = np.asarray(r, dtype=float) ** 2
    return np.exp(-r2 * r2 * t / (2 * sigma))


def J0_hat(t, r, sigma):
    """``sin(r^2 t)/r^2 exp(-r^4 t/(2 sigma))``, equal to ``t`` at r = 0."""
    r2 = np.asarray(r, dtype=float) ** 2
    return sin_over(r2, t) * _damping(t, r, sigma)


def J1_hat(t, r, sigma):
    """``cos(r^2 t) exp(-r^4 t/(2 sigma))``."""
    r2 = np.asarray(r, dtype=float) ** 2
    return np.cos(r2 * t) * _damping(t, r, sigma)


def _phase_coefficient(sigma, literal_coefficients):
    return alt_imag_coefficient(sigma) if literal_coefficients else imag_sixth_order_coefficient(sigma)


def H0_hat(t, r, sigma, literal_coefficients=False):
    """Phase correction ``k r^4 t cos(r^2 t) exp(-r^4 t/(2 sigma))``.

    ``k`` is the r^6 coefficient of ``lambdaI``: ``3/(8 sigma^2)``, or the
    alternative ``(2 sigma + 1)/(8 sigma^2)`` with ``literal_coefficients=True``.
    """
    r2 = np.asarray(r, dtype=float) ** 2
    k = _phase_coefficient(sigma, literal_coefficients)
    return k * r2 * r2 * t * np.cos(r2 * t) * _damping(t, r, sigma)


def H1_hat(t, r, sigma):
    """Amplitude correction ``r^4 t sin(r^2 t) exp(-r^4 t/(2 sigma)) / (2 sigma^2)``."""
    r2 = np.asarray(r, dtype=float) ** 2
    return r2 * r2 * t * np.sin(r2 * t) * _damping(t, r, sigma) / (2 * sigma**2)


def H_hat(t, r, sigma, literal_coefficients=False):
    """``t/(8 sigma^2) [8 sigma^2 k cos(r^2 t) + 4 sin(r^2 t)] r^4 exp(-r^4 t/(2 sigma))``."""
    r2 = np.asarray(r, dtype=float) ** 2
    k8 = 8 * sigma**2 * _phase_coefficient(sigma, literal_coefficients)
    return t / (8 * sigma**2) * (k8 * np.cos(r2 * t) + 4 * np.sin(r2 * t)) * r2 * r2 * _damping(t, r, sigma)


def phi_hat(t, xi, sigma, moments, moment_sign=-1, literal_coefficients=False):
    """Fourier transform of the large-time profile.

    ``J0 P_u1 + s i <xi, M_u1> J0 + H P_u1 + J1 P_u0 + r^2 J0 P_theta0 / sigma``.

    ``xi`` holds frequency magnitudes when ``M_u1`` vanishes, signed
    frequencies when ``n = 1``, or vectors with a trailing axis of length n.
    The first-moment sign ``s`` defaults to -1: a translate ``f(x - x0)``
    has transform ``exp(-i <x0, xi>) f_hat``, so convolution with ``u1``
    contributes ``-<grad J0, M_u1>``.  Pass ``moment_sign=+1`` for the
    literal ``+<grad J0, M_u1>`` form.
    """
    xi = np.asarray(xi, dtype=float)
    n = moments.n
    if moments.has_first_moment() and n > 1:
        if xi.shape[-1:] != (n,):
            raise ValueError("non-radial profile in n > 1 needs frequency vectors")
        r = np.linalg.norm(xi, axis=-1)
        xm = xi @ np.asarray(moments.M_u1, dtype=float)
    else:
        r = np.abs(xi)
        xm = xi * moments.M_u1[0] if moments.has_first_moment() else 0.0
    j0 = J0_hat(t, r, sigma)
    out = (
        j0 * moments.P_u1
        + moment_sign * 1j * xm * j0
        + H_hat(t, r, sigma, literal_coefficients) * moments.P_u1
        + J1_hat(t, r, sigma) * moments.P_u0
        + r * r * j0 * moments.P_theta0 / sigma
    )
    return out


def phi_sim_hat(t, r, sigma, moments):
    """Simplest profile ``J0 P_u1``."""
    return J0_hat(t, r, sigma) * moments.P_u1


def psi_hat(t, r, u1, theta0, consts=DIFFUSION, normalized=False):
    """Profile of the sigma = 0 model, with ``u1`` and ``theta0`` the data amplitudes.

    ``r^-2 (exp(-a0 r^2 t) - cos(a2 r^2 t) exp(-a1 r^2 t)) P_Psi0
    + sin(a2 r^2 t)/(a2 r^2) exp(-a1 r^2 t) P_Psi1``.  The first kernel is
    evaluated by its series for small ``r^2 t``; at r = 0 it equals
    ``(a1 - a0) t``.  With ``normalized=True`` both kernels are divided by
    ``(a0 - a1)^2 + a2^2``, the factor that appears in the exact sigma = 0
    solution.
    """
    a0, a1, a2 = consts.a0, consts.a1, consts.a2
    r2 = np.asarray(r, dtype=float) ** 2
    x = r2 * t
    small = np.abs(x) < 1e-3
    xs = np.where(small, 1.0, x)
    direct = (np.exp(-a0 * xs) - np.cos(a2 * xs) * np.exp(-a1 * xs)) / np.where(small, 1.0, r2)
    # Taylor coefficients of (e^{-a0 x} - cos(a2 x) e^{-a1 x}) / x
    c1 = a1 - a0
    c2 = 0.5 * (a0**2 - a1**2 + a2**2)
    c3 = (-(a0**3) + a1**3 - 3 * a1 * a2**2) / 6
    c4 = (a0**4 - a1**4 + 6 * a1**2 * a2**2 - a2**4) / 24
    series = t * (c1 + x * (c2 + x * (c3 + x * c4)))
    k0 = np.where(small, series, direct)
    k1 = sin_over(a2 * r2, t) * np.exp(-a1 * x)
    psi0 = 2 * a1 * u1 + theta0
    psi1 = (a0**2 + a2**2 - a1**2) * u1 + (a0 - a1) * theta0
    out = k0 * psi0 + k1 * psi1
    if normalized:
        out = out / consts.profile_normalization
    return out


def pure_plate_hat(t, r, w0, w1):
    """Plate equation ``w_tt + r^4 w = 0`` in Fourier space."""
    r2 = np.asarray(r, dtype=float) ** 2
    return np.cos(r2 * t) * w0 + sin_over(r2, t) * w1


def _check_tol(tol):
    if not (0 < tol <= 1e-6):
        raise ValueError(f"tol must lie in (0, 1e-6], got {tol}")


def _run(A, y0, t_end, tol, weights):
    y, status, _ = solve_linear(A, y0, t_end, tol, weights)
    if status == STATUS_MIN_STEP:
        raise StepFailure(f"minimum step size reached before t = {t_end}")
    if status == STATUS_MAX_STEPS:
        raise StepFailure(f"step budget exhausted before t = {t_end}")
    return y


def ode_oracle_system(t_end, r, sigma, data, tol=1e-13):
    """Integrate the transformed first-order system.

    ``u' = v, v' = -r^4 u + r^2 theta, theta' = -(sigma + r^2) theta - r^2 v``
    from ``(u0_hat, u1_hat, theta0_hat)``.  Returns ``(u, u_t, theta)`` at ``t_end``.
    """
    _check_tol(tol)
    r2 = float(r) ** 2
    A = np.array([[0.0, 1.0, 0.0], [-r2 * r2, 0.0, r2], [0.0, -r2, -(sigma + r2)]])
    s = max(1.0, sigma + r2)
    y = _run(A, [data.u0_hat, data.u1_hat, data.theta0_hat], t_end, tol, [1.0, 1.0 / s, 1.0])
    return complex(y[0]), complex(y[1]), complex(y[2])


def ode_oracle_third(t_end, r, sigma, data, tol=1e-13):
    """Integrate the scalar third-order equation from ``(u0_hat, u1_hat, u2_hat)``."""
    _check_tol(tol)
    r2 = float(r) ** 2
    r4 = r2 * r2
    q = sigma + r2
    A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-q * r4, -2 * r4, -q]])
    s = max(1.0, q)
    y0 = [data.u0_hat, data.u1_hat, complex(u2_hat(r, data))]
    y = _run(A, y0, t_end, tol, [1.0, 1.0 / s, 1.0 / s**2])
    return complex(y[0])
