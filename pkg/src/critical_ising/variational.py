"""Configuration-model counting, the entropy functionals, and their maximizers.

The chain of objects here: exact expected counts of spin configurations
with a prescribed edge-empirical distribution h; the exact finite-n first
moment of the restricted partition sum built from them; the exponential-
scale functional Phi whose maximizer h* controls the asymptotics; and
numerical verification of the Taylor expansions and the Hessian
determinant that the moment computations rest on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .exact import critical_beta
from .graphs import REGULAR


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class SpinSystem:
    """Homogeneous spin system: edge weights psi > 0, vertex weights psibar, degree d."""

    psi: np.ndarray
    psibar: np.ndarray
    d: float
    labels: tuple = ()

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=float)
        if psi.ndim != 2 or psi.shape[0] != psi.shape[1]:
            raise ValueError("psi must be a square matrix")
        if (psi <= 0).any():
            raise ValueError("psi must be strictly positive")
        if not np.allclose(psi, psi.T, rtol=1e-12):
            raise ValueError("psi must be symmetric")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "psibar", np.asarray(self.psibar, dtype=float))

    @property
    def size(self) -> int:
        return self.psi.shape[0]


def ising_system(d: int, beta: float | None = None) -> SpinSystem:
    """Ising weights on spins (+1, -1); defaults to the regular critical point."""
    if beta is None:
        beta = critical_beta(REGULAR, d)
    spins = np.array([1.0, -1.0])
    psi = np.exp(beta * np.outer(spins, spins))
    return SpinSystem(psi, np.ones(2), d, labels=(1, -1))


TWO_COPY_LABELS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def two_copy_system(d: int, beta: float | None = None) -> SpinSystem:
    """Two independent Ising copies sharing the graph: spins are +-1 pairs."""
    if beta is None:
        beta = critical_beta(REGULAR, d)
    k = len(TWO_COPY_LABELS)
    psi = np.empty((k, k))
    for i, (x, xp) in enumerate(TWO_COPY_LABELS):
        for j, (y, yp) in enumerate(TWO_COPY_LABELS):
            psi[i, j] = math.exp(beta * (x * y + xp * yp))
    return SpinSystem(psi, np.ones(k), d, labels=TWO_COPY_LABELS)


@dataclass(frozen=True)
class EdgeEmpirical:
    """Symmetric distribution on spin pairs; its marginal is the vertex law."""

    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("h must be a square matrix")
        if (h < -1e-15).any():
            raise ValueError("h must be nonnegative")
        if not np.allclose(h, h.T, atol=1e-12):
            raise ValueError("h must be symmetric")
        if abs(h.sum() - 1.0) > 1e-9:
            raise ValueError("h must sum to 1")
        object.__setattr__(self, "h", h)

    @property
    def marginal(self) -> np.ndarray:
        return self.h.sum(axis=1)


def _log_odd_double_factorial(k) -> np.ndarray:
    """log k!! for odd k >= -1, via k!! = 2^{(k+1)/2} Gamma(k/2 + 1) / sqrt(pi)."""
    k = np.asarray(k, dtype=float)
    return (k + 1) / 2 * math.log(2) + gammaln(k / 2 + 1) - 0.5 * math.log(math.pi)


def _check_integral(x, what: str, tol: float = 1e-9) -> np.ndarray:
    r = np.rint(x)
    if np.max(np.abs(np.asarray(x) - r), initial=0.0) > tol:
        raise ValueError(f"{what} must be integral (within {tol:g})")
    return r.astype(np.int64)


def log_count_spin_matchings(n: int, d: int, h: EdgeEmpirical) -> float:
    """log of the expected number of configurations with edge-empirical h.

    Exact half-edge pairing count under the d-regular configuration model:
    choose the vertex spins, choose the spins at the half-edge slots, then
    match slots admissibly (double factorials within a class, factorials
    across classes).  All in the log domain.
    """
    if (n * d) % 2:
        raise ValueError("n*d must be even")
    nh_bar = _check_integral(n * h.marginal, "n*hbar(x)")
    dnh = _check_integral(n * d * h.h, "d*n*h(x,x')")
    diag = np.diag(dnh)
    if (diag % 2).any():
        raise ValueError("d*n*h(x,x) must be even")
    dn = n * d
    total = -_log_odd_double_factorial(dn - 1)
    total += gammaln(n + 1) - gammaln(nh_bar + 1).sum()
    total += gammaln(dn * h.marginal + 1).sum() - gammaln(dnh + 1).sum()
    total += _log_odd_double_factorial(diag - 1).sum()
    off = ~np.eye(len(diag), dtype=bool)
    total += 0.5 * gammaln(dnh[off] + 1).sum()
    return float(total)


def _ising_h(a: int, b: int, c: int, dn: int) -> EdgeEmpirical:
    # a = dn h(+,+), b = dn h(-,-), c = dn h(+,-) = dn h(-,+)
    return EdgeEmpirical(np.array([[a, c], [c, b]], dtype=float) / dn)


def magnetization_edge_empiricals(n: int, d: int, m: int):
    """All feasible Ising edge-empirical distributions at magnetization m.

    Feasibility is the half-edge bookkeeping: dn h(+,+) + dn h(+,-) = d n_+,
    with even diagonal counts.  The family is one-dimensional, indexed by
    the mixed-pair count.
    """
    if (n + m) % 2 or abs(m) > n:
        raise ValueError(f"magnetization m={m} unreachable for n={n}")
    n_plus = (n + m) // 2
    n_minus = (n - m) // 2
    dn = n * d
    c_max = min(d * n_plus, d * n_minus)
    c0 = (d * n_plus) % 2
    out = []
    for c in range(c0, c_max + 1, 2):
        a = d * n_plus - c
        b = d * n_minus - c
        out.append(_ising_h(a, b, c, dn))
    return out


def exact_first_moment(n: int, d: int, beta: float, m: int) -> float:
    """log E(Z_m) for the Ising model on the d-regular configuration model.

    Exact at finite n: sums the per-h contributions
    exp(n [ <hbar, log psibar> + d/2 <h, log psi> ]) * E|A_h| over all
    feasible h with magnetization m.  At beta = 0 this telescopes to the
    binomial coefficient C(n, (n+m)/2).
    """
    sys = ising_system(d, beta)
    log_psi = np.log(sys.psi)
    terms = []
    for h in magnetization_edge_empiricals(n, d, m):
        energy = n * (d / 2.0) * float(np.sum(h.h * log_psi))
        terms.append(energy + log_count_spin_matchings(n, d, h))
    return float(logsumexp(np.array(terms)))


def _entropy(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    mask = p > 0
    return float(-(p[mask] * np.log(p[mask])).sum())


def phi(system: SpinSystem, h: EdgeEmpirical) -> float:
    """(d/2) H(h) - (d-1) H(hbar) + (d/2) <h, log psi> + <hbar, log psibar>."""
    d = system.d
    hbar = h.marginal
    return (
        d / 2.0 * _entropy(h.h)
        - (d - 1.0) * _entropy(hbar)
        + d / 2.0 * float(np.sum(h.h * np.log(system.psi)))
        + float(np.sum(hbar * np.log(system.psibar)))
    )


def phi_restricted(system: SpinSystem, h: EdgeEmpirical) -> float:
    """H(h) + <h, log psi>: the part of phi that varies at fixed marginal."""
    return _entropy(h.h) + float(np.sum(h.h * np.log(system.psi)))


def solve_h_star(
    system: SpinSystem,
    hbar: np.ndarray,
    tol: float = 1e-12,
    max_iter: int = 100_000,
) -> EdgeEmpirical:
    """Maximize H(h) + <h, log psi> over symmetric h with marginal hbar.

    The maximizer has the product form h*(x,y) ~ q(x) q(y) psi(x,y); q is
    the fixed point of the marginal-matching map, iterated with damping 1/2
    from the uniform vector.
    """
    hbar = np.asarray(hbar, dtype=float)
    if hbar.shape != (system.size,):
        raise ValueError("hbar has the wrong length")
    if (hbar <= 0).any():
        raise ValueError("hbar must be strictly positive")
    if abs(hbar.sum() - 1.0) > 1e-9:
        raise ValueError("hbar must sum to 1")
    psi = system.psi
    q = np.full(system.size, 1.0 / system.size)
    residual = math.inf
    for _ in range(max_iter):
        f = hbar / (psi @ q)
        f /= f.sum()
        new_q = 0.5 * (q + f)
        residual = float(np.abs(new_q - q).max())
        q = new_q
        if residual < tol:
            break
    else:
        raise ConvergenceError("fixed-point iteration did not converge", residual)
    h = q[:, None] * q[None, :] * psi
    h /= h.sum()
    # rescale rows/columns symmetrically so marginals land within 10*tol
    result = EdgeEmpirical(h)
    err = float(np.abs(result.marginal - hbar).max())
    if err > 10 * tol:
        raise ConvergenceError("fixed point converged but marginals are off", err)
    return result


def h_star_closed_form_ising(d: int) -> np.ndarray:
    """Critical Ising maximizer: diag d/(4(d-1)), off-diag (d-2)/(4(d-1))."""
    a = d / (4.0 * (d - 1))
    b = (d - 2.0) / (4.0 * (d - 1))
    return np.array([[a, b], [b, a]])


def phi_tilde(x: float, y: float, d: float) -> float:
    """Exponential-scale functional of the two-copy ER overlap coordinates.

    x is the magnetization density, y the rescaled copy overlap.  The
    energy part carries the quartic x^4/(2d) term of the exact pair-count
    exponent, so the Taylor expansion at the origin has x^4 coefficient
    -(1/6 - 1/(2d)).
    """
    args = ((1 + x) ** 2 + y, (1 - x) ** 2 + y, 1 - x * x - y)
    if min(args) <= 0:
        raise ValueError("(x, y) outside the domain: a log argument is nonpositive")
    a_pp, a_mm, a_pm = args
    return (
        x * x
        + y * y / (2 * d)
        + x * x * y / d
        + x**4 / (2 * d)
        - a_pp / 4 * math.log(a_pp)
        - a_mm / 4 * math.log(a_mm)
        - a_pm / 2 * math.log(a_pm)
    )


# ---------------------------------------------------------------------------
# Numerical second-order structure at the maximizer
# ---------------------------------------------------------------------------

# chart of B_hbar for the 4-spin two-copy system: the 6 off-diagonal
# unordered pairs are free; diagonals absorb the marginal constraints
_OFFDIAG_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _h_from_offdiag(u: np.ndarray, hbar: np.ndarray) -> np.ndarray:
    h = np.zeros((4, 4))
    for (x, y), val in zip(_OFFDIAG_PAIRS, u):
        h[x, y] = val
        h[y, x] = val
    for x in range(4):
        h[x, x] = hbar[x] - h[x].sum()
    return h


def _phi2_offdiag(u: np.ndarray, system: SpinSystem, hbar: np.ndarray) -> float:
    h = _h_from_offdiag(u, hbar)
    if (h < 0).any():
        raise ValueError("chart point leaves the simplex")
    d = system.d
    return d / 2.0 * (_entropy(h) + float(np.sum(h * np.log(system.psi)))) - (
        d - 1.0
    ) * _entropy(hbar)


def _fd_hessian(f, x0: np.ndarray, step: float) -> np.ndarray:
    k = len(x0)
    out = np.empty((k, k))
    f0 = f(x0)
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = step
        out[i, i] = (f(x0 + ei) - 2 * f0 + f(x0 - ei)) / step**2
        for j in range(i + 1, k):
            ej = np.zeros(k)
            ej[j] = step
            val = (
                f(x0 + ei + ej) - f(x0 + ei - ej) - f(x0 - ei + ej) + f(x0 - ei - ej)
            ) / (4 * step**2)
            out[i, j] = out[j, i] = val
    return out


def hessian_det_closed_form(d: float) -> float:
    """2^29 (d-1)^16 (d^2 - 2d + 2) / ((d-2)^8 d^4)."""
    return 2.0**29 * (d - 1) ** 16 * (d * d - 2 * d + 2) / ((d - 2) ** 8 * d**4)


@dataclass
class HessianReport:
    d: int
    numeric_det: float
    closed_form: float
    rel_err: float
    richardson_disagreement: float
    chart: str

    def to_json_dict(self) -> dict:
        return {
            "quantity": "two_copy_hessian_det",
            "numeric": self.numeric_det,
            "closed_form": self.closed_form,
            "rel_err": self.rel_err,
            "richardson_disagreement": self.richardson_disagreement,
            "chart": self.chart,
        }


def numeric_hessian_det(d: int, step: float = 1e-4) -> HessianReport:
    """Finite-difference det(-Hessian) of the two-copy functional at h*.

    The Hessian is taken in the off-diagonal chart of the fixed-marginal
    set (6 coordinates; diagonals eliminated).  The Jacobian audit: in this
    chart the determinant reproduces the closed form with factor 1.
    Richardson extrapolation over {step, step/2}; disagreement above 5%
    flags step-size degeneracy.
    """
    if d < 3:
        raise ValueError("need d >= 3")
    system = two_copy_system(d)
    hbar = np.full(4, 0.25)
    h_star = system.psi / system.psi.sum()
    u0 = np.array([h_star[x, y] for x, y in _OFFDIAG_PAIRS])
    f = lambda u: _phi2_offdiag(u, system, hbar)
    h_coarse = _fd_hessian(f, u0, step)
    h_fine = _fd_hessian(f, u0, step / 2)
    extrap = (4 * h_fine - h_coarse) / 3
    det_coarse = float(np.linalg.det(-h_coarse))
    det_fine = float(np.linalg.det(-h_fine))
    det = float(np.linalg.det(-extrap))
    disagreement = abs(det_fine - det_coarse) / abs(det)
    if disagreement > 0.05:
        raise ConvergenceError("step-size degeneracy in Hessian differences", disagreement)
    closed = hessian_det_closed_form(d)
    return HessianReport(
        d=d,
        numeric_det=det,
        closed_form=closed,
        rel_err=abs(det - closed) / closed,
        richardson_disagreement=disagreement,
        chart="offdiag-6 (diagonals eliminated by the marginal constraints)",
    )


# ---------------------------------------------------------------------------
# Taylor expansions around the maximizers
# ---------------------------------------------------------------------------


def _richardson(values_h, values_h2, order: int = 2):
    f = 2**order
    return (f * values_h2 - values_h) / (f - 1)


def _fd_second(f, x0: float, step: float) -> float:
    def d2(h):
        return (f(x0 + h) - 2 * f(x0) + f(x0 - h)) / h**2

    return float(_richardson(d2(step), d2(step / 2)))


def _fd_fourth(f, x0: float, step: float) -> float:
    def d4(h):
        return (
            f(x0 + 2 * h) - 4 * f(x0 + h) + 6 * f(x0) - 4 * f(x0 - h) + f(x0 - 2 * h)
        ) / h**4

    return float(_richardson(d4(step), d4(step / 2)))


def _fd_cross21(f2, x0: float, step: float) -> float:
    """d^3 / dx dy^2 of f2(x, y) at (x0, 0) where f2 is even in y."""

    def d3(h):
        def dy2(x):
            return (f2(x, h) - 2 * f2(x, 0.0) + f2(x, -h)) / h**2

        return (dy2(x0 + h) - dy2(x0 - h)) / (2 * h)

    return float(_richardson(d3(step), d3(step / 2)))


def ising_phi_coordinates(s: float, m: float) -> EdgeEmpirical:
    """Ising edge-empirical from (s, m) densities: diagonals (s+-m)/2, off (1-s)/2."""
    hpp = (s + m) / 2.0
    hmm = (s - m) / 2.0
    hpm = (1.0 - s) / 2.0
    return EdgeEmpirical(np.array([[hpp, hpm], [hpm, hmm]]))


def phi1_taylor_coefficients(d: int, step: float = 2e-3) -> dict:
    """Numeric expansion of the Ising functional around its maximizer.

    Returns the coefficients of (s - s*)^2, (s - s*) m^2, and m^4 in the
    expansion of phi along the (diagonal-sum, magnetization) densities.
    """
    system = ising_system(d)
    s_star = d / (2.0 * (d - 1.0))

    def f2(s, m):
        return phi(system, ising_phi_coordinates(s, m))

    s2 = _fd_second(lambda s: f2(s, 0.0), s_star, step) / 2.0
    m4 = _fd_fourth(lambda m: f2(s_star, m), 0.0, 0.04) / 24.0
    sm2 = _fd_cross21(lambda s, m: f2(s, m), s_star, 5e-3) / 2.0
    return {"s2": s2, "sm2": sm2, "m4": m4}


def phi1_taylor_closed_form(d: int) -> dict:
    return {
        "s2": -((d - 1.0) ** 2) / (d - 2.0),
        "sm2": (d - 1.0) ** 2 / d,
        "m4": -(d - 1.0) * (d - 2.0) * (3.0 * d - 2.0) / (12.0 * d * d),
    }


def _two_copy_hbar(t: float, m: float) -> np.ndarray:
    """Vertex law of the two-copy system with both magnetizations m and overlap t."""
    return np.array([(t + m) / 2.0, (1.0 - t) / 2.0, (1.0 - t) / 2.0, (t - m) / 2.0])


def phi2_profile(d: int, t: float, m: float, tol: float = 1e-14) -> float:
    """Two-copy phi maximized over h at the vertex law indexed by (t, m)."""
    system = two_copy_system(d)
    hbar = _two_copy_hbar(t, m)
    h = solve_h_star(system, hbar, tol=tol)
    return phi(system, h)


def phi2_taylor_coefficients(d: int, step: float = 2e-2) -> dict:
    """Numeric expansion of the two-copy profile around (t, m) = (1/2, 0)."""

    def f2(t, m):
        return phi2_profile(d, t, m)

    t2 = _fd_second(lambda t: f2(t, 0.0), 0.5, step) / 2.0
    m4 = _fd_fourth(lambda m: f2(0.5, m), 0.0, 5e-2) / 24.0
    tm2 = _fd_cross21(f2, 0.5, 2.5e-2) / 2.0
    return {"t2": t2, "tm2": tm2, "m4": m4}


def phi2_taylor_closed_form(d: int) -> dict:
    quad = -2.0 * (d - 1.0) * (d - 2.0) / (d * d - 2.0 * d + 2.0)
    return {
        "t2": quad,
        "tm2": -quad,
        "m4": -(d - 2.0)
        * (d - 1.0)
        * (2.0 * d * d - d + 1.0)
        / (3.0 * d * d * (d * d - 2.0 * d + 2.0)),
    }


def phi_tilde_taylor_coefficients(d: float, step: float = 2e-2) -> dict:
    y2 = _fd_second(lambda y: phi_tilde(0.0, y, d), 0.0, step) / 2.0
    x4 = _fd_fourth(lambda x: phi_tilde(x, 0.0, d), 0.0, 4e-2) / 24.0
    x2y = _fd_cross21(lambda y, x: phi_tilde(x, y, d), 0.0, step) / 2.0
    return {"y2": y2, "x4": x4, "x2y": x2y}


def phi_tilde_taylor_closed_form(d: float) -> dict:
    return {
        "y2": -(d - 1.0) / (2.0 * d),
        "x4": -(1.0 / 6.0 - 1.0 / (2.0 * d)),
        "x2y": 1.0 / d,
    }


# ---------------------------------------------------------------------------
# Asymptotic moment formulas
# ---------------------------------------------------------------------------


def log_first_moment_regular(n: int, d: int, m: float) -> float:
    """Leading-order log E(Z_m), regular model at criticality."""
    beta = critical_beta(REGULAR, d)
    log_c = (
        0.5 * math.log(2)
        + 0.5 * math.log(d - 1)
        - 0.5 * math.log(n)
        - 0.5 * math.log(math.pi * d)
        + n * (math.log(2) + d / 2.0 * math.log(math.cosh(beta)))
    )
    return log_c - (d - 1.0) * (d - 2.0) / (12.0 * d * d) * m**4 / n**3


def second_moment_ratio_regular(d: int) -> float:
    """Limit of E(Z_m^2) / E(Z_m)^2: sqrt((d-1)/(d-2))."""
    if d <= 2:
        raise ValueError("the ratio is singular at d = 2")
    return math.sqrt((d - 1.0) / (d - 2.0))


def log_first_moment_er(n: int, m: float) -> float:
    """Leading-order log E(Z~_m), ER model at criticality (d-free)."""
    return 0.5 * math.log(2.0 / (math.pi * n)) - m**4 / (12.0 * n**3) - 0.75


def cycle_tail_series(d: float, i_min: int = 3) -> float:
    """sum_{i >= i_min} d^-i / (2i), via the log series of -log(1 - 1/d)."""
    t = 1.0 / d
    partial = sum(t**i / i for i in range(1, i_min))
    return 0.5 * (-math.log1p(-t) - partial)


def second_moment_ratio_er(d: float, n: int, m: float) -> float:
    """exp(m^4 / (2(d-1) n^3) + sum_{i>=3} d^-i / 2i)."""
    if d <= 1:
        raise ValueError("need d > 1")
    return math.exp(m**4 / (2.0 * (d - 1.0) * n**3) + cycle_tail_series(d))


def asymptotic_moments(kind: str, d: float, n: int, m: float) -> tuple[float, float]:
    """(log leading-order first moment, second/first^2 ratio) for either model."""
    if kind == REGULAR:
        return log_first_moment_regular(n, int(d), m), second_moment_ratio_regular(int(d))
    return log_first_moment_er(n, m), second_moment_ratio_er(d, n, m)
