"""Double-exponential quadrature engines.

Three integral shapes cover everything in this package:

  * (0, 1) with algebraic endpoint weights x**alpha (1-x)**beta: tanh-sinh
    transform x = logistic(pi sinh t); the weights are folded into the node
    weight in log space, so alpha, beta > -1 never underflow and the smooth
    factor is evaluated only where the weight matters.
  * bounded intervals (a, b) with endpoint weights: affine map onto (0, 1).
  * (0, inf): either truncation at a cutoff A plus a fitted power-law tail
    (integrate_0inf, the default contract: the whole modeled tail magnitude
    is charged to the error estimate, so slowly decaying integrands
    honestly report non-convergence at tight tolerances), or an exp-sinh
    transform for integrands with known algebraic behavior at both ends
    (integrate_0inf_exp_sinh), which needs no tail model at all.

Levels double the node density; convergence is declared when successive
levels differ within tolerance, with a rounding floor proportional to the
accumulated |integrand| mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DomainError,
    NonIntegrableSingularityError,
    TailDivergenceError,
)

__all__ = [
    "QuadConfig",
    "EvalResult",
    "DEFAULT_QUAD",
    "integrate_01_singular",
    "integrate_interval",
    "integrate_0inf",
    "integrate_0inf_exp_sinh",
]

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and budgets for the quadrature engines.

    max_subdivisions bounds the refinement work: each refinement pass
    roughly doubles the node count, and the total node budget is about
    15 * max_subdivisions evaluations.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    semi_infinite_cutoff: float = 50.0


DEFAULT_QUAD = QuadConfig()


@dataclass(frozen=True)
class EvalResult:
    value: float
    error_estimate: float
    subdivisions_used: int
    converged: bool
    diagnostics: tuple = ()

    def require_converged(self):
        return self


_MAX_LEVELS = 14


def _de_levels(phi, tcap: float, config: QuadConfig, h0: float = 0.5):
    """Level-doubled trapezoid sum of phi over t in [-tcap, tcap].

    phi maps a node array t to already-weighted contributions. Returns
    (sum, error, levels, converged, abs_mass, diagnostics).
    """
    budget = max(64, 15 * config.max_subdivisions)
    n0 = int(math.floor(tcap / h0))
    t0 = h0 * np.arange(-n0, n0 + 1)
    vals = phi(t0)
    h = h0
    total = h * float(np.sum(vals))
    abs_mass = h * float(np.sum(np.abs(vals)))
    evals = t0.size
    prev = math.inf
    err = math.inf
    level = 0
    diagnostics = []
    while level < _MAX_LEVELS:
        level += 1
        h = h0 / 2.0**level
        t_new = h * (2.0 * np.arange(0, int(math.floor(tcap / h / 2.0)) + 1) + 1.0)
        t_new = np.concatenate([-t_new[::-1], t_new])
        vals = phi(t_new)
        evals += t_new.size
        new_sum = h * float(np.sum(vals))
        prev = total
        total = total / 2.0 + new_sum
        abs_mass = abs_mass / 2.0 + h * float(np.sum(np.abs(vals)))
        err = abs(total - prev)
        floor = 20.0 * _EPS * abs_mass
        if err <= max(config.abs_tol, config.rel_tol * abs(total)) or err <= floor:
            err = max(err, 5.0 * _EPS * abs_mass)
            break
        if evals > budget:
            diagnostics.append(f"node-budget-exhausted({evals})")
            break
    converged = err <= max(config.abs_tol, config.rel_tol * abs(total))
    return total, err, level, converged, abs_mass, tuple(diagnostics)


def _check_weights(alpha: float, beta: float):
    for name, w in (("alpha", alpha), ("beta", beta)):
        if not math.isfinite(w):
            raise DomainError(f"endpoint exponent {name} must be finite, got {w}")
        if w <= -1.0:
            raise NonIntegrableSingularityError(
                f"endpoint exponent {name}={w} <= -1: integral does not exist"
            )


def _rescaled(config: QuadConfig, amplification: float) -> QuadConfig:
    """Tighten abs_tol for an inner unit-interval pass whose result gets
    multiplied back by `amplification`; rel_tol survives rescaling as-is."""
    if amplification <= 1.0:
        return config
    # the level loop quits on its own rounding floor (20 eps of the node
    # mass), so the demand only needs a cap against degenerate requests
    return replace(config, abs_tol=max(1e-20, config.abs_tol / amplification))


def integrate_01_singular(f, alpha: float, beta: float, config: QuadConfig = DEFAULT_QUAD):
    """Integral over (0,1) of x**alpha * (1-x)**beta * f(x, 1-x).

    f receives node arrays for x and 1-x (the latter computed without
    cancellation, meaningful even when x rounds to 1.0) and must return the
    smooth factor. alpha, beta > -1.
    """
    _check_weights(alpha, beta)
    wmin = min(alpha, beta)
    tcap = math.asinh(2.0 * 790.0 / ((wmin + 1.0) * math.pi))

    def phi(t):
        u = 0.5 * math.pi * np.sinh(t)
        log_x = -np.logaddexp(0.0, -2.0 * u)
        log_omx = -np.logaddexp(0.0, 2.0 * u)
        log_w = (
            math.log(math.pi)
            + np.log(np.cosh(t))
            + (alpha + 1.0) * log_x
            + (beta + 1.0) * log_omx
        )
        out = np.zeros_like(t)
        mask = log_w > -720.0
        if np.any(mask):
            x = np.exp(log_x[mask])
            omx = np.exp(log_omx[mask])
            out[mask] = np.exp(log_w[mask]) * f(x, omx)
        return out

    total, err, levels, converged, _, diags = _de_levels(phi, tcap, config)
    return EvalResult(total, err, levels, converged, diags)


def integrate_interval(
    f, a: float, b: float, alpha: float, beta: float, config: QuadConfig = DEFAULT_QUAD
):
    """Integral over (a,b) of (u-a)**alpha * (b-u)**beta * f(u, u-a, b-u)."""
    if not (math.isfinite(a) and math.isfinite(b) and b > a):
        raise DomainError(f"need finite b > a, got a={a}, b={b}")
    width = b - a
    scale = width ** (alpha + beta + 1.0)

    def fsmooth(x, omx):
        return f(a + width * x, width * x, width * omx)

    inner = integrate_01_singular(fsmooth, alpha, beta, _rescaled(config, scale))
    return EvalResult(
        scale * inner.value,
        scale * inner.error_estimate,
        inner.subdivisions_used,
        inner.converged,
        inner.diagnostics,
    )


def integrate_0inf(
    f,
    config: QuadConfig = DEFAULT_QUAD,
    *,
    singular_exponent_at_zero: float = 0.0,
    tail_exponent: float | None = None,
):
    """Integral over (0, inf) of m**singular_exponent_at_zero * f(m).

    Splits at A = config.semi_infinite_cutoff: tanh-sinh on [0, A], then a
    power-law tail c * m**-d fitted to the full integrand at m in {A, 2A}
    (or using the supplied tail_exponent d with amplitude from the sample
    at A). The modeled tail contributes c * A**(1-d) / (d-1) to the value
    and its entire magnitude to the error estimate, so only integrands with
    genuinely negligible tails report convergence at tight tolerances.

    Raises TailDivergenceError when the samples imply d <= 1 or carry
    opposite signs while being non-negligible.
    """
    alpha = singular_exponent_at_zero
    _check_weights(alpha, 0.0)
    cutoff = config.semi_infinite_cutoff
    if not (math.isfinite(cutoff) and cutoff > 0.0):
        raise DomainError(f"semi_infinite_cutoff must be positive, got {cutoff}")

    def fsmooth(y, omy):
        return f(cutoff * y)

    amp = cutoff ** (alpha + 1.0)
    finite = integrate_01_singular(fsmooth, alpha, 0.0, _rescaled(config, amp))
    finite_value = amp * finite.value
    finite_err = amp * finite.error_estimate

    h_a = cutoff**alpha * float(f(np.array([cutoff]))[0])
    h_2a = (2.0 * cutoff) ** alpha * float(f(np.array([2.0 * cutoff]))[0])
    diags = list(finite.diagnostics)
    negligible = (
        abs(h_a) * cutoff <= 0.01 * config.abs_tol
        and abs(h_2a) * cutoff <= 0.01 * config.abs_tol
    )
    if negligible:
        tail = 0.0
        tail_err = (abs(h_a) + abs(h_2a)) * 2.0 * cutoff
        diags.append("tail-negligible")
    else:
        if h_a == 0.0 or h_2a == 0.0 or (h_a > 0.0) != (h_2a > 0.0):
            raise TailDivergenceError(
                f"tail samples f({cutoff})={h_a:.3e}, f({2 * cutoff})={h_2a:.3e} "
                "do not fit a one-signed power law"
            )
        ratio = h_a / h_2a
        if ratio <= 1.0:
            raise TailDivergenceError(
                f"tail is not decaying: f({cutoff})/f({2 * cutoff}) = {ratio:.6g}"
            )
        d_fit = math.log2(ratio)
        d = tail_exponent if tail_exponent is not None else d_fit
        if d <= 1.0:
            raise TailDivergenceError(
                f"tail exponent d={d:.4g} <= 1: integral diverges or cannot "
                "be truncated"
            )
        tail = h_a * cutoff / (d - 1.0)
        tail_err = abs(tail)
        diags.append(f"tail-exponent-fitted={d_fit:.4g}")
        if tail_exponent is not None:
            diags.append(f"tail-exponent-used={d:.4g}")
    value = finite_value + tail
    err = finite_err + tail_err
    converged = err <= max(config.abs_tol, config.rel_tol * abs(value))
    return EvalResult(
        value, err, finite.subdivisions_used, converged, tuple(diags)
    )


def integrate_0inf_exp_sinh(
    f_log,
    config: QuadConfig = DEFAULT_QUAD,
    *,
    decay_at_zero: float,
    decay_at_inf: float,
):
    """Integral over (0, inf) of g with g ~ x**(decay_at_zero - 1) at 0 and
    g ~ x**(-1 - decay_at_inf) at infinity, both exponents positive.

    f_log(x, log_x) must return (sign, log_magnitude) arrays for g; powers
    of x inside g should be assembled from log_x so the transform can reach
    x = exp(+-700) without overflow. No tail model is involved: the
    transform itself makes both ends double exponential.
    """
    s0, si = decay_at_zero, decay_at_inf
    if not (s0 > 0.0 and si > 0.0):
        raise DomainError(
            f"decay exponents must be positive, got {s0} and {si}"
        )
    smin = min(s0, si)
    ucap = min(2.0 * 790.0 / smin, 700.0)
    tcap = math.asinh(2.0 * ucap / math.pi)
    # truncating x at exp(+-700) discards at most these masses
    trunc = math.exp(-700.0 * s0) / s0 + math.exp(-700.0 * si) / si

    def phi(t):
        log_x = 0.5 * math.pi * np.sinh(t)
        keep = np.abs(log_x) <= 700.0
        out = np.zeros_like(t)
        if np.any(keep):
            lx = log_x[keep]
            x = np.exp(lx)
            sign, logmag = f_log(x, lx)
            log_jac = lx + np.log(0.5 * math.pi * np.cosh(t[keep]))
            out[keep] = sign * np.exp(np.minimum(logmag + log_jac, 700.0))
        return out

    total, err, levels, converged, _, diags = _de_levels(phi, tcap, config)
    err = err + trunc
    converged = err <= max(config.abs_tol, config.rel_tol * abs(total))
    return EvalResult(total, err, levels, converged, diags)
