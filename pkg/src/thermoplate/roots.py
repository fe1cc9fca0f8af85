"""Characteristic roots of the reduced third-order equation.

After eliminating the temperature, the Fourier transform of the vertical
displacement solves a constant-coefficient ODE in time whose characteristic
polynomial at frequency magnitude ``r = |xi|`` is

    p(lam) = lam**3 + (sigma + r**2) lam**2 + 2 r**4 lam + (sigma + r**2) r**4.

For every r > 0 the discriminant is strictly negative, so there is one real
root ``lambda1`` and a complex pair ``lambdaR +/- i lambdaI``.  This module
solves the cubic (companion-matrix eigenvalues followed by Newton polishing),
tracks the branches along a frequency grid and provides the small- and
large-frequency expansions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchJump, DegenerateFrequency, OutsideZone

__all__ = [
    "ModelParams",
    "CharacteristicRoots",
    "DiffusionConstants",
    "DIFFUSION",
    "EPS0",
    "N0",
    "LAMBDA1_QUADRATIC",
    "cubic_residual",
    "discriminant",
    "discriminant_generic",
    "characteristic_roots",
    "solve_cubic",
    "small_freq_roots",
    "large_freq_roots",
    "alt_lambda1_coefficient",
    "alt_imag_coefficient",
    "imag_sixth_order_coefficient",
    "measure_lambda1_coefficient",
    "track_branches",
    "spectral_gap",
]

# zone boundaries: |xi| <= EPS0 is "small", |xi| >= N0 is "large"
EPS0 = 0.3
N0 = 10.0

# coefficient c1 in lambda1 = -sigma + c1 r^2 + O(r^4); balancing the r^2 terms
# of the cubic gives sigma^2 (c1 + 1) = 0, confirmed by measure_lambda1_coefficient
LAMBDA1_QUADRATIC = -1.0


@dataclass(frozen=True)
class ModelParams:
    """Heat-transfer constant ``sigma`` and spatial dimension ``n``."""

    sigma: float = 1.0
    n: int = 1

    def __post_init__(self):
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be a finite nonnegative real, got {self.sigma!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")


@dataclass(frozen=True)
class CharacteristicRoots:
    """Real root and complex pair of the cubic at one frequency magnitude.

    ``lambdaI`` is always reported nonnegative.
    """

    lambda1: float
    lambdaR: float
    lambdaI: float
    r: float

    def as_complex(self):
        """The three roots ``(lambda1, lambdaR + i lambdaI, lambdaR - i lambdaI)``."""
        z = complex(self.lambdaR, self.lambdaI)
        return (complex(self.lambda1), z, z.conjugate())


@dataclass(frozen=True)
class DiffusionConstants:
    """Constants of the large-frequency expansion.

    ``-a0`` and ``-a1 +/- i a2`` are the roots of ``mu^3 + mu^2 + 2 mu + 1``,
    which is the cubic in the variable ``lam / r^2`` once sigma is dropped.
    """

    alphaPlus: float
    alphaMinus: float
    a0: float
    a1: float
    a2: float

    @classmethod
    def compute(cls):
        root69 = math.sqrt(69.0)
        p = (0.5 * (3 * root69 + 11)) ** (1 / 3)
        m = (0.5 * (3 * root69 - 11)) ** (1 / 3)
        alpha_p, alpha_m = p + m, p - m
        return cls(
            alphaPlus=alpha_p,
            alphaMinus=alpha_m,
            a0=(1 + alpha_m) / 3,
            a1=(2 - alpha_m) / 6,
            a2=math.sqrt(3) * alpha_p / 6,
        )

    def reduced_cubic(self, mu):
        return mu**3 + mu**2 + 2 * mu + 1

    @property
    def profile_normalization(self):
        """``q'(-a0) = (a0 - a1)^2 + a2^2``, the denominator of the sigma = 0 representation."""
        return (self.a0 - self.a1) ** 2 + self.a2**2


DIFFUSION = DiffusionConstants.compute()


def cubic_coefficients(r, sigma):
    """Coefficients ``(b2, b1, b0)`` of the monic cubic."""
    r2 = np.asarray(r, dtype=float) ** 2
    r4 = r2 * r2
    return sigma + r2, 2 * r4, (sigma + r2) * r4


def cubic_residual(lam, r, sigma):
    """``p(lam)`` evaluated in Horner form (accepts complex ``lam``)."""
    b2, b1, b0 = cubic_coefficients(r, sigma)
    return ((lam + b2) * lam + b1) * lam + b0


def _cubic_derivative(lam, r, sigma):
    b2, b1, _ = cubic_coefficients(r, sigma)
    return (3 * lam + 2 * b2) * lam + b1


def discriminant(r, sigma):
    """Closed-form discriminant of the cubic; negative for every r > 0."""
    r = np.asarray(r, dtype=float)
    r2 = r * r
    q = sigma + r2
    out = -4 * (q**2 * r2 - 2 * math.sqrt(2) * r2**3) ** 2 - (16 * math.sqrt(2) - 13) * q**2 * r2**4
    return out if out.ndim else float(out)


def discriminant_generic(r, sigma):
    """Textbook discriminant 18abcd - 4b^3 d + b^2c^2 - 4ac^3 - 27a^2d^2 (a = 1)."""
    b, c, d = cubic_coefficients(r, sigma)
    out = 18 * b * c * d - 4 * b**3 * d + b**2 * c**2 - 4 * c**3 - 27 * d**2
    return out if np.ndim(out) else float(out)


def _newton(z, r, sigma, steps):
    for _ in range(steps):
        dp = _cubic_derivative(z, r, sigma)
        safe = dp != 0
        z = np.where(safe, z - cubic_residual(z, r, sigma) / np.where(safe, dp, 1), z)
    return z


def characteristic_roots(r, sigma, newton_steps=1):
    """Vectorised root solve.

    Parameters
    ----------
    r : array_like
        Frequency magnitudes, all >= 0.
    sigma : float
        Heat-transfer constant, >= 0.
    newton_steps : int
        Newton polishing steps applied to each eigenvalue.

    Returns
    -------
    lambda1, lambdaR, lambdaI : ndarray
        Arrays shaped like ``r``; ``lambdaI >= 0``.
    """
    r = np.asarray(r, dtype=float)
    shape = r.shape
    rf = r.ravel()
    if np.any(rf < 0):
        raise ValueError("frequency magnitudes must be nonnegative")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    zero = rf == 0
    if sigma == 0 and np.any(zero):
        raise DegenerateFrequency("r = 0 with sigma = 0 gives a triple root at the origin")

    lam1 = np.full(rf.shape, -float(sigma))
    lamR = np.zeros(rf.shape)
    lamI = np.zeros(rf.shape)
    idx = np.nonzero(~zero)[0]
    if idx.size:
        rr = rf[idx]
        r2 = rr * rr
        r4 = r2 * r2
        scale = sigma + r2
        # lam = scale * mu turns the cubic into mu^3 + mu^2 + b mu + c
        b = 2 * r4 / scale**2
        c = r4 / scale**2
        comp = np.zeros((idx.size, 3, 3))
        comp[:, 0, 0] = -1.0
        comp[:, 0, 1] = -b
        comp[:, 0, 2] = -c
        comp[:, 1, 0] = 1.0
        comp[:, 2, 1] = 1.0
        mu = np.linalg.eigvals(comp)
        order = np.argsort(np.abs(mu.imag), axis=1)
        mu = np.take_along_axis(mu, order, axis=1)
        real_root = mu[:, 0].real * scale
        pair = np.where(mu[:, 1].imag >= 0, mu[:, 1], mu[:, 2]) * scale
        # eigvals may split a tiny pair onto the real axis; reseed from the expansion
        flat = np.abs(pair.imag) <= 1e-300
        if np.any(flat):
            s = sigma if sigma > 0 else 1.0
            seed = -r4 / (2 * s) + 1j * r2 * (1.0 if sigma > 0 else DIFFUSION.a2)
            pair = np.where(flat, seed, pair)
        real_root = _newton(real_root, rr, sigma, newton_steps)
        pair = _newton(pair, rr, sigma, newton_steps)
        lam1[idx] = real_root
        lamR[idx] = pair.real
        lamI[idx] = np.abs(pair.imag)
    return lam1.reshape(shape), lamR.reshape(shape), lamI.reshape(shape)


def solve_cubic(r, sigma):
    """Roots of the cubic at a single frequency magnitude.

    >>> roots = solve_cubic(0.0, 1.0)
    >>> (roots.lambda1, roots.lambdaR, roots.lambdaI)
    (-1.0, 0.0, 0.0)
    """
    r = float(r)
    l1, lr, li = characteristic_roots(np.array([r]), float(sigma))
    return CharacteristicRoots(float(l1[0]), float(lr[0]), float(li[0]), r)


def alt_lambda1_coefficient(sigma):
    """The alternative quadratic coefficient ``sigma / (2 - 3 sigma)`` (kept for comparison)."""
    return sigma / (2 - 3 * sigma)


def imag_sixth_order_coefficient(sigma):
    """Coefficient of r^6 in lambdaI for small r, ``3 / (8 sigma^2)``."""
    return 3.0 / (8.0 * sigma**2)


def alt_imag_coefficient(sigma):
    """The alternative coefficient ``(2 sigma + 1) / (8 sigma^2)``; equals the exact one at sigma = 1."""
    return (2 * sigma + 1) / (8.0 * sigma**2)


def small_freq_roots(r, sigma, eps0=EPS0, literal_coefficients=False):
    """Small-frequency expansion of the roots.

    ``lambda1 ~ -sigma + c1 r^2`` with the measured ``c1 = -1``,
    ``lambdaR ~ -r^4/(2 sigma) + r^6/(2 sigma^2)`` and
    ``lambdaI ~ r^2 + k r^6``.  ``k`` is ``3/(8 sigma^2)`` unless
    ``literal_coefficients`` asks for the alternative ``(2 sigma + 1)/(8 sigma^2)``.
    """
    if sigma <= 0:
        raise ValueError("small-frequency expansion needs sigma > 0")
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r > eps0:
        raise OutsideZone(f"r = {r} lies outside the small zone r <= {eps0}")
    r2 = r * r
    k = alt_imag_coefficient(sigma) if literal_coefficients else imag_sixth_order_coefficient(sigma)
    lam1 = -sigma + LAMBDA1_QUADRATIC * r2
    lamR = -(r2**2) / (2 * sigma) + r2**3 / (2 * sigma**2)
    lamI = r2 + k * r2**3
    return CharacteristicRoots(lam1, lamR, lamI, float(r))


def large_freq_roots(r, sigma, n0=N0, consts=DIFFUSION):
    """Leading large-frequency behaviour ``(-a0 r^2, -a1 r^2, a2 r^2)``."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if r < n0:
        raise OutsideZone(f"r = {r} lies outside the large zone r >= {n0}")
    r2 = r * r
    return CharacteristicRoots(-consts.a0 * r2, -consts.a1 * r2, consts.a2 * r2, float(r))


def measure_lambda1_coefficient(sigma, r_grid=None):
    """Fit ``(lambda1 + sigma) / r^2`` against ``r^2`` and return the intercept.

    The intercept is the quadratic coefficient of the real root.
    """
    if r_grid is None:
        r_grid = np.geomspace(1e-3, 3e-2, 12)
    r_grid = np.asarray(r_grid, dtype=float)
    lam1, _, _ = characteristic_roots(r_grid, sigma)
    y = (lam1 + sigma) / r_grid**2
    slope, intercept = np.polyfit(r_grid**2, y, 1)
    return float(intercept)


def _match(prev, cur):
    """Best permutation of ``cur`` onto ``prev`` plus an ambiguity flag."""
    d = np.abs(prev[:, None] - cur[None, :])
    for i in range(3):
        row = np.sort(d[i])
        best, second = row[0], row[1]
        if best > 0 and second < 2 * best:
            return None
    return np.argmin(d, axis=1)


def track_branches(r_grid, sigma):
    """Solve along an ascending grid and check branch continuity.

    Consecutive root sets are matched by nearest neighbour.  A
    :class:`BranchJump` is raised when a match is ambiguous (second-best
    distance less than twice the best) or when the matching would move a root
    off its branch (real root onto the pair or vice versa).
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.ndim != 1 or r_grid.size == 0:
        raise ValueError("r_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(r_grid) <= 0):
        raise ValueError("r_grid must be strictly ascending")
    lam1, lamR, lamI = characteristic_roots(r_grid, sigma)
    out = [CharacteristicRoots(float(a), float(b), float(c), float(r)) for a, b, c, r in zip(lam1, lamR, lamI, r_grid)]
    prev = None
    for k, roots in enumerate(out):
        cur = np.array(roots.as_complex())
        if prev is not None and roots.r > 0 and out[k - 1].r > 0:
            perm = _match(prev, cur)
            if perm is None or not np.array_equal(perm, np.arange(3)):
                raise BranchJump(f"ambiguous root matching between r = {out[k - 1].r} and r = {roots.r}")
        prev = cur
    return out


def spectral_gap(r_grid, sigma):
    """Smallest ``|Re lambda_j|`` over a grid of frequencies (all positive r)."""
    lam1, lamR, _ = characteristic_roots(np.asarray(r_grid, dtype=float), sigma)
    return float(np.min(np.minimum(-lam1, -lamR)))
