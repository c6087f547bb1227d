"""The limiting laws of the rescaled magnetization and the free energy.

All density-bearing laws here have the quartic-exponential form
exp(a u^2 - b u^4) / Z.  Normalization uses adaptive quadrature (relative
1e-10, cached); CDF and quantile come from a dense high-order cumulative
grid, so inverse-CDF sampling is a vectorized table lookup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .rng import generator, substream

_GRID_POINTS = 8193
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(7)


class LawKindError(TypeError):
    """Raised when an operation needs a density the law does not expose."""


def _domain_halfwidth(a: float, b: float, tail_log: float = 60.0) -> float:
    """L with exponent(a, b) at L below the peak exponent by tail_log."""
    peak = max(0.0, a * a / (4.0 * b))
    target = peak + tail_log
    l2 = (a + math.sqrt(a * a + 4.0 * b * target)) / (2.0 * b)
    return math.sqrt(l2)


class QuarticLaw:
    """Law with density proportional to exp(a u^2 - b u^4), b > 0."""

    def __init__(self, a: float, b: float):
        if b <= 0:
            raise ValueError("quartic coefficient must be positive")
        self.a = a
        self.b = b
        self._cache = None

    # -- lazily built numerical caches ------------------------------------
    def _built(self):
        if self._cache is None:
            a, b = self.a, self.b
            L = _domain_halfwidth(a, b)
            peak = max(0.0, a * a / (4.0 * b))

            def unnorm(u):
                return np.exp(a * u * u - b * u**4 - peak)

            crit = math.sqrt(a / (2 * b)) if a > 0 else 0.0
            pts = sorted({-crit, 0.0, crit})
            norm, err = quad(unnorm, -L, L, points=pts, limit=200,
                             epsabs=0.0, epsrel=1e-12)
            grid = np.linspace(-L, L, _GRID_POINTS)
            half = 0.5 * (grid[1] - grid[0])
            mids = 0.5 * (grid[:-1] + grid[1:])
            nodes = mids[:, None] + half * _GL_NODES[None, :]
            increments = (unnorm(nodes) * _GL_WEIGHTS[None, :]).sum(axis=1) * half
            cum = np.concatenate([[0.0], np.cumsum(increments)])
            cdf_grid = cum / cum[-1]
            log_norm = math.log(norm) + peak
            cdf_interp = PchipInterpolator(grid, cdf_grid)
            self._cache = (L, log_norm, grid, cdf_grid, cdf_interp)
        return self._cache

    @property
    def log_norm(self) -> float:
        return self._built()[1]

    @property
    def grid(self) -> np.ndarray:
        return self._built()[2]

    def density(self, u) -> np.ndarray | float:
        u = np.asarray(u, dtype=float)
        out = np.exp(self.a * u * u - self.b * u**4 - self.log_norm)
        return out if out.ndim else float(out)

    def cdf(self, u) -> np.ndarray | float:
        L, _, _, _, interp = self._built()
        u = np.asarray(u, dtype=float)
        out = np.clip(interp(np.clip(u, -L, L)), 0.0, 1.0)
        out = np.where(u <= -L, 0.0, np.where(u >= L, 1.0, out))
        return out if out.ndim else float(out)

    def quantile(self, p) -> np.ndarray | float:
        L, _, grid, cdf_grid, interp = self._built()
        p_arr = np.atleast_1d(np.asarray(p, dtype=float))
        if ((p_arr <= 0) | (p_arr >= 1)).any():
            raise ValueError("quantile needs p in (0, 1)")
        out = np.empty_like(p_arr)
        for i, pi in enumerate(p_arr):
            start = float(np.interp(pi, cdf_grid, grid))
            lo, hi = max(-L, start - 0.01), min(L, start + 0.01)
            flo, fhi = interp(lo) - pi, interp(hi) - pi
            if flo * fhi > 0:
                lo, hi = -L, L
            out[i] = brentq(lambda u: interp(u) - pi, lo, hi, xtol=1e-13)
        return out if np.ndim(p) else float(out[0])

    def sample(self, count: int, seed: int) -> np.ndarray:
        """Inverse-CDF draws on the cached grid (linear quantile lookup)."""
        if count < 1:
            raise ValueError("count must be >= 1")
        _, _, grid, cdf_grid, _ = self._built()
        u = generator(seed).random(count)
        return np.interp(u, cdf_grid, grid)

    def table_csv(self) -> str:
        grid = self.grid
        pdf = self.density(grid)
        cdf = self.cdf(grid)
        lines = ["u,pdf,cdf"]
        lines += [f"{u!r},{p!r},{c!r}" for u, p, c in zip(grid, pdf, cdf)]
        return "\n".join(lines) + "\n"


class RegLimit(QuarticLaw):
    """Rescaled-magnetization limit for random regular graphs.

    Density proportional to exp(-(d-2)(d-1)/(12 d^2) y^4); needs d >= 3
    (the exponent degenerates at d = 2).
    """

    def __init__(self, d: int):
        if d < 3:
            raise ValueError("regular limit law requires d >= 3")
        self.d = d
        super().__init__(0.0, (d - 2.0) * (d - 1.0) / (12.0 * d * d))


class MixtureComponent(QuarticLaw):
    """One conditional ER limit law: tilt x, quartic 1/(4(d-1)) + 1/12."""

    def __init__(self, d: float, x: float):
        if d <= 1:
            raise ValueError("ER limit law requires d > 1")
        self.d = d
        self.x = x
        super().__init__(x / math.sqrt(2.0 * (d - 1.0)), 1.0 / (4.0 * (d - 1.0)) + 1.0 / 12.0)


class Mixture:
    """The ER magnetization limit: a MixtureComponent with standard normal tilt.

    Random measure; only sampling is exposed (no closed density).  Sampling
    draws the tilt, then inverse-CDF samples the component via a bilinear
    (tilt, level) quantile table.
    """

    X_RANGE = 8.0
    _N_X = 161
    _N_P = 4097

    def __init__(self, d: float):
        if d <= 1:
            raise ValueError("ER limit law requires d > 1")
        self.d = d
        self._table = None

    def component(self, x: float) -> MixtureComponent:
        return MixtureComponent(self.d, x)

    def _built(self):
        if self._table is None:
            xs = np.linspace(-self.X_RANGE, self.X_RANGE, self._N_X)
            ps = np.linspace(0.0, 1.0, self._N_P)
            table = np.empty((self._N_X, self._N_P))
            for k, x in enumerate(xs):
                comp = MixtureComponent(self.d, x)
                grid, cdf_grid = comp.grid, comp.cdf(comp.grid)
                table[k] = np.interp(ps, cdf_grid, grid)
            self._table = (xs, ps, table)
        return self._table

    def sample(self, count: int, seed: int) -> np.ndarray:
        if count < 1:
            raise ValueError("count must be >= 1")
        xs, ps, table = self._built()
        rng = generator(seed)
        x = np.clip(rng.standard_normal(count), -self.X_RANGE, self.X_RANGE)
        p = rng.random(count)
        ix = np.clip(np.searchsorted(xs, x) - 1, 0, len(xs) - 2)
        jp = np.clip(np.searchsorted(ps, p) - 1, 0, len(ps) - 2)
        wx = (x - xs[ix]) / (xs[ix + 1] - xs[ix])
        wp = (p - ps[jp]) / (ps[jp + 1] - ps[jp])
        q00 = table[ix, jp]
        q01 = table[ix, jp + 1]
        q10 = table[ix + 1, jp]
        q11 = table[ix + 1, jp + 1]
        return (1 - wx) * ((1 - wp) * q00 + wp * q01) + wx * ((1 - wp) * q10 + wp * q11)


class FreeEnergyLimit:
    """Limit of the centered ER log partition function.

    A truncated independent-Poisson cycle series plus the log of the tilted
    quartic integral, the tilt shared with a standard normal.  Poisson
    terms with rate above 1e9 are replaced by their exact means (their
    fluctuation is below 1e-5 there).
    """

    _LAM_CAP = 1e9
    _X_GRID = 721
    _X_RANGE = 9.0

    def __init__(self, d: float, i_max: int = 40):
        if d <= 1:
            raise ValueError("ER free-energy law requires d > 1")
        if i_max < 3:
            raise ValueError("need i_max >= 3")
        self.d = d
        self.i_max = i_max
        self._log_integral = None

    def _log_integral_fn(self):
        if self._log_integral is None:
            b = 1.0 / 12.0 + 1.0 / (4.0 * (self.d - 1.0))
            scale = 1.0 / math.sqrt(2.0 * (self.d - 1.0))
            xs = np.linspace(-self._X_RANGE, self._X_RANGE, self._X_GRID)
            vals = np.empty_like(xs)
            for k, x in enumerate(xs):
                a = x * scale
                L = _domain_halfwidth(a, b)
                peak = max(0.0, a * a / (4.0 * b))
                val, _ = quad(
                    lambda u: np.exp(a * u * u - b * u**4 - peak),
                    -L, L, limit=200, epsabs=0.0, epsrel=1e-12,
                )
                vals[k] = math.log(val) + peak
            self._log_integral = PchipInterpolator(xs, vals)
        return self._log_integral

    def _term_stats(self, i: int) -> tuple[float, float]:
        lam = self.d**i / (2.0 * i)
        log1p_delta = math.log1p(self.d ** (-i))
        return lam, log1p_delta

    def sample(self, count: int, seed: int) -> np.ndarray:
        """Draws of the truncated series plus log-integral term.

        Substream layout: the normal tilt uses substream 0 and the cycle
        term of index i uses substream i, so enlarging i_max with the same
        seed only appends terms (common random numbers).
        """
        if count < 1:
            raise ValueError("count must be >= 1")
        out = np.zeros(count)
        for i in range(3, self.i_max + 1):
            lam, l1p = self._term_stats(i)
            centering = 1.0 / (2.0 * i)
            if lam > self._LAM_CAP:
                out += lam * l1p - centering
            else:
                draws = substream(seed, i).poisson(lam, size=count)
                out += draws * l1p - centering
        x = substream(seed, 0).standard_normal(count)
        g = self._log_integral_fn()
        out += g(np.clip(x, -self._X_RANGE, self._X_RANGE))
        return out

    def tail_estimate(self) -> float:
        """Bound on the absolute mean of the dropped terms i > i_max.

        Each term has mean lam*(log(1+delta) - delta) ~ -d^-i / 4i;
        geometric sum from i_max + 1.
        """
        i0 = self.i_max + 1
        return self.d ** (-i0) / (4.0 * i0) / (1.0 - 1.0 / self.d)


# ---------------------------------------------------------------------------
# Distances between laws and/or samples
# ---------------------------------------------------------------------------


def _eval_cdf(obj, grid: np.ndarray):
    """(value at grid points, left limit at grid points) for a law or sample set."""
    if isinstance(obj, np.ndarray):
        s = np.sort(obj)
        nn = len(s)
        at = np.searchsorted(s, grid, side="right") / nn
        left = np.searchsorted(s, grid, side="left") / nn
        return at, left
    vals = np.asarray(obj.cdf(grid))
    return vals, vals


def _support_points(obj) -> np.ndarray:
    if isinstance(obj, np.ndarray):
        if obj.size == 0:
            raise ValueError("empty sample set")
        return np.asarray(obj, dtype=float)
    return obj.grid


def distance_stats(a, b) -> tuple[float, float]:
    """(Kolmogorov-Smirnov, Wasserstein-1) between samples and/or laws.

    Samples are numpy arrays; laws are any object with .cdf and .grid
    (QuarticLaw subclasses).  KS is the exact sup over jump points and grid
    nodes; W1 integrates |CDF difference| exactly for step functions and
    piecewise-linearly for laws on their dense grids.
    """
    a = np.asarray(a, dtype=float) if not hasattr(a, "cdf") else a
    b = np.asarray(b, dtype=float) if not hasattr(b, "cdf") else b
    grid = np.unique(np.concatenate([_support_points(a), _support_points(b)]))
    fa, fa_left = _eval_cdf(a, grid)
    fb, fb_left = _eval_cdf(b, grid)
    ks = max(float(np.abs(fa - fb).max()), float(np.abs(fa_left - fb_left).max()))

    # interval k = [grid_k, grid_k+1): a step CDF holds its left value, a law
    # CDF moves linearly to its value at the right endpoint's left limit
    left_a, left_b = fa[:-1], fb[:-1]
    right_a = fa[:-1] if isinstance(a, np.ndarray) else fa_left[1:]
    right_b = fb[:-1] if isinstance(b, np.ndarray) else fb_left[1:]
    alpha = left_a - left_b
    beta = right_a - right_b
    widths = np.diff(grid)
    same_sign = alpha * beta >= 0
    denom = np.abs(alpha) + np.abs(beta)
    tri = np.where(denom > 0, (alpha**2 + beta**2) / np.maximum(denom, 1e-300), 0.0)
    piece = np.where(same_sign, 0.5 * (np.abs(alpha) + np.abs(beta)), 0.5 * tri)
    w1 = float(np.sum(piece * widths))
    return ks, w1
