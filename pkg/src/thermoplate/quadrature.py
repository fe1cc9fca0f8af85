"""L2 norms of Fourier multipliers over R^n and the growth/decay coefficients.

Norms are computed in frequency space through Plancherel,

    ||f||_{L2}^2 = (2 pi)^{-n} ||f_hat||_{L2}^2,

which for a radial symbol reduces to a one-dimensional integral against
``r^{n-1}`` times the area of the unit sphere.

The integrands oscillate like ``sin(c r^2 t)``.  Panels are therefore laid
out uniformly in ``s = r^2`` with a width of a quarter period of the fastest
expected phase, while Gauss nodes are placed in ``r`` so that the factor
``r^{n-1}`` never produces an endpoint singularity.  Panels are processed
outward in blocks and the march stops once whole blocks contribute nothing
measurable; the integrands are nonnegative, so no cancellation is hidden
beyond the stopping point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, ToleranceNotMet

__all__ = [
    "QuadratureSpec",
    "NormResult",
    "sphere_area",
    "default_r_max",
    "integrate_radial",
    "l2_norm_radial",
    "l2_norm_line",
    "gamma_moment",
    "power_kernel_norm",
    "decay_D",
    "decay_B",
    "decay_exponent_D",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the panel quadrature.

    Attributes
    ----------
    rel_tol : float
        Target relative accuracy of the integral, in [1e-12, 1e-3].
    r_max : float or None
        Hard cutoff in ``r``; ``None`` selects :func:`default_r_max`.
    panel_rule : int
        Gauss-Legendre nodes per panel; half as many are used for the error estimate.
    oscillation_split : bool
        Align panels to the oscillation scale ``pi / (2 freq t)`` in ``s = r^2``.
    freq : float
        Largest phase velocity (in units of ``t``) the panels must resolve.
        The characteristic roots oscillate at most like ``1.31 r^2 t``.
    max_refine : int
        Number of panel halvings tried before giving up.
    min_panels : int
        Lower bound on the number of panels below ``r_max``.
    """

    rel_tol: float = 1e-9
    r_max: float | None = None
    panel_rule: int = 16
    oscillation_split: bool = True
    freq: float = 1.5
    max_refine: int = 4
    min_panels: int = 64

    def __post_init__(self):
        if not (1e-12 <= self.rel_tol <= 1e-3):
            raise ValueError(f"rel_tol must lie in [1e-12, 1e-3], got {self.rel_tol}")
        if self.r_max is not None and not self.r_max > 0:
            raise ValueError("r_max must be positive")
        if self.panel_rule < 4 or self.panel_rule % 2:
            raise ValueError("panel_rule must be an even integer >= 4")


@dataclass(frozen=True)
class NormResult:
    value: float
    est_error: float
    panels_used: int
    converged: bool = True


@lru_cache(maxsize=None)
def _gauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def sphere_area(n):
    """Surface area ``2 pi^{n/2} / Gamma(n/2)`` of the unit sphere in R^n."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def default_r_max(t, c=0.5, width=None):
    """Cutoff where a ``exp(-c r^4 t)`` or Gaussian-data tail is below 1e-18."""
    r = 8.0
    if t > 0 and c > 0:
        r = max(r, (40.0 / (c * t)) ** 0.25)
    if width is not None:
        r = max(r, math.sqrt(80.0) / width)
    return r


def _panel_edges(t, spec, r_max, level):
    s_max = r_max * r_max
    ds = s_max / spec.min_panels
    if spec.oscillation_split and t > 0:
        ds = min(ds, math.pi / (2 * spec.freq * t))
    ds /= 2**level
    count = int(math.ceil(s_max / ds))
    return ds, count


def _march(f, t, spec, r_max, level):
    ds, count = _panel_edges(t, spec, r_max, level)
    xh, wh = _gauss(spec.panel_rule)
    xl, wl = _gauss(spec.panel_rule // 2)
    total = 0.0
    err = 0.0
    done = 0
    block = 256
    quiet = 0
    while done < count:
        k = np.arange(done, min(done + block, count))
        a = np.sqrt(k * ds)
        b = np.sqrt(np.minimum((k + 1) * ds, r_max * r_max))
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        nodes_h = mid[:, None] + half[:, None] * xh[None, :]
        nodes_l = mid[:, None] + half[:, None] * xl[None, :]
        vals_h = f(nodes_h)
        vals_l = f(nodes_l)
        qh = half * (vals_h @ wh)
        ql = half * (vals_l @ wl)
        block_sum = float(np.sum(qh))
        block_err = float(np.sum(np.abs(qh - ql)))
        total += block_sum
        err += block_err
        done = int(k[-1]) + 1
        # the tail is dropped only after two consecutive blocks add nothing visible
        if total > 0 and block_sum <= 1e-4 * spec.rel_tol * total and block_err <= 1e-4 * spec.rel_tol * total:
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
        block = min(2 * block, 1 << 16)
    return total, err, done


def integrate_radial(f, t, spec=None, r_max=None):
    """Integrate a nonnegative function of ``r`` over ``[0, r_max]``.

    ``f`` takes an array of radii and returns an array of the same shape.
    ``t`` sets the oscillation scale of the panels.  Returns a
    :class:`NormResult` holding the integral (not a norm).
    """
    spec = spec or QuadratureSpec()
    r_max = r_max or spec.r_max or default_r_max(t)
    best = None
    for level in range(spec.max_refine + 1):
        total, err, panels = _march(f, t, spec, r_max, level)
        best = NormResult(total, err, panels, converged=err <= spec.rel_tol * abs(total))
        if best.converged:
            return best
    raise ToleranceNotMet(f"quadrature error {best.est_error:.3g} exceeds tolerance on {best.value:.6g}", best)


def _to_norm(integral, factor):
    value = math.sqrt(max(integral.value, 0.0) * factor)
    est = 0.5 * integral.est_error * factor / value if value > 0 else math.sqrt(integral.est_error * factor)
    return NormResult(value, est, integral.panels_used, integral.converged)


def l2_norm_radial(F, n, t, spec=None, r_max=None):
    """L2 norm over R^n of the inverse transform of a radial symbol.

    ``F(t, r)`` must accept an array of radii.  Returns
    ``(2 pi)^{-n/2} (|S^{n-1}| int_0^inf |F|^2 r^{n-1} dr)^{1/2}``.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")

    def integrand(r):
        v = F(t, r)
        return (v.real**2 + v.imag**2) * r ** (n - 1) if np.iscomplexobj(v) else v * v * r ** (n - 1)

    factor = sphere_area(n) / (2 * math.pi) ** n
    try:
        res = integrate_radial(integrand, t, spec, r_max)
    except ToleranceNotMet as exc:
        raise ToleranceNotMet(str(exc), _to_norm(exc.result, factor)) from None
    return _to_norm(res, factor)


def l2_norm_line(F, t, spec=None, r_max=None):
    """L2 norm on the real line of the inverse transform of ``F(t, xi)``, xi signed."""

    def integrand(r):
        a = F(t, r)
        b = F(t, -r)
        return np.abs(a) ** 2 + np.abs(b) ** 2

    factor = 1.0 / (2 * math.pi)
    try:
        res = integrate_radial(integrand, t, spec, r_max)
    except ToleranceNotMet as exc:
        raise ToleranceNotMet(str(exc), _to_norm(exc.result, factor)) from None
    return _to_norm(res, factor)


def gamma_moment(m, a):
    """``int_0^inf r^m exp(-a r^4) dr = Gamma((m+1)/4) / (4 a^{(m+1)/4})``."""
    p = (m + 1) / 4
    return math.gamma(p) / (4 * a**p)


def power_kernel_norm(k, n, c, t):
    """Closed-form L2 norm of the symbol ``r^k exp(-c r^4 t)`` on R^n."""
    integral = gamma_moment(2 * k + n - 1, 2 * c * t)
    return math.sqrt(sphere_area(n) / (2 * math.pi) ** n * integral)


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 1):
        raise DomainError("growth/decay coefficients are defined for t > 1")
    return t


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def decay_D(n, t):
    """Coefficient of the optimal estimate of ||u(t)||."""
    t = _check_t(t)
    if n <= 3:
        return _out(t ** (1 - n / 4))
    if n == 4:
        return _out(np.sqrt(np.log(t)))
    return _out(t ** (0.5 - n / 8))


def decay_B(n, t):
    """Coefficient of the profile estimate: ||u - phi|| = o(B_n(t))."""
    t = _check_t(t)
    if n == 1:
        return _out(t**0.25)
    if n == 2:
        return _out(np.sqrt(np.log(t)))
    return _out(t ** (0.25 - n / 8))


def decay_exponent_D(n):
    """Power of t in D_n, or ``None`` at the logarithmic dimension n = 4."""
    if n <= 3:
        return 1 - n / 4
    if n == 4:
        return None
    return 0.5 - n / 8
