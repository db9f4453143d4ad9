"""Extended gamma and beta functions built on the deformed exponential kernel.

The two central objects are

    gamma_ext(s)      = int_0^inf m**(s-1) * E(-m) dm
    beta_ext(s, t, v) = (1/k) int_0^1 m**(s/k-1) (1-m)**(t/k-1)
                            * E(-v * m**k * (1-m)**k) dm

where E is the Mittag-Leffler style kernel from `kcore` (series with
Pochhammer-k numerator and mode-selected gamma denominator).  The beta
integral runs over a compact interval with kernel arguments confined to
[-v/4**k, 0], so it is a routine weighted tanh-sinh job.  The gamma
integral is improper and its treatment depends on how E decays:

* exponential kernels (reduced power index 1, integer degree gap) get a
  cutoff placed where the integrand underflows the tolerance, after which
  the generic power-law tail check certifies the remainder as negligible;
* algebraically decaying kernels (E(-m) ~ C m**(-g), g = r/k) converge
  only for s < g.  When the kernel's large-argument expansion is usable
  the tail from the cutoff onward is integrated termwise in closed form,
  leaving a certified remainder; otherwise the crude one-term power-law
  model of `integrate_0inf` applies and the whole modeled tail is charged
  to the error estimate, which normally reports non-convergence.

`extended_gamma_closed_form_claimed` evaluates a published closed-form
expression for the gamma integral verbatim.  It disagrees with the
quadrature already in the classical sanity limit, so it exists purely as
a comparison target for the identity audit, not as an evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._mlseries import _rgamma, get_evaluator
from .errors import DomainError, KBetaError, SeriesGuardError
from .kcore import (
    DEFAULT_SERIES,
    GammaMode,
    MLParams,
    SeriesConfig,
    k_gamma_extended,
)
from .quad import (
    DEFAULT_QUAD,
    EvalResult,
    QuadConfig,
    _rescaled,
    integrate_01_singular,
    integrate_0inf,
    integrate_interval,
)

_TAIL_TERMS = 60


def _check_positive(**named) -> None:
    for name, val in named.items():
        if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0.0):
            raise DomainError(f"{name} must be a finite positive real, got {val}")


def _widened(series: SeriesConfig, abs_arg: float) -> SeriesConfig:
    # integration probes arguments the caller never passes directly, so the
    # guard and the term cap both stretch to cover the probed range
    terms = max(series.max_terms, 4000)
    if series.max_abs_argument >= abs_arg:
        return replace(series, max_terms=terms)
    return replace(series, max_abs_argument=abs_arg, max_terms=terms)


def _exp_cutoff(s: float, ev, base: float) -> float:
    """Cutoff past which m**(s-1) * E(-m) underflows for exp-type kernels."""
    red = ev.reduced
    c = red.arg_scale
    degree = max(0, int(round(red.gamma - red.beta)))
    w = 46.0
    for _ in range(3):
        w = 46.0 + degree * math.log(1.0 + w) + max(0.0, s - 1.0) * math.log(
            1.0 + w / c
        )
    return max(base, w / c)


def _tail_expansion(s: float, ev, a_cut: float):
    """Closed-form tail int_A^inf m**(s-1) E(-m) dm from the kernel's
    large-argument expansion, with a certified remainder bound.

    Returns (tail, tail_error, n_terms) or None when the expansion cannot
    certify itself (saddle correction not decaying at this cutoff).
    """
    red = ev.reduced
    g, alpha, beta = red.gamma, red.alpha, red.beta
    scale, pref = red.arg_scale, red.prefactor
    cos_f = math.cos(math.pi / alpha)
    if alpha <= 0.5 or cos_f > -0.05:
        # below 1/2 extra saddle rays appear and the single-saddle remainder
        # bound no longer covers them
        return None
    w_a = scale * a_cut
    log_wa = math.log(w_a)
    log_aa = math.log(a_cut)

    # saddle remainder: int_A^inf m**(s-1) exp(cos_f * (scale*m)**(1/alpha)) dm
    x = abs(cos_f) * w_a ** (1.0 / alpha)
    sh = alpha * s
    if x < sh + 5.0:
        return None
    log_saddle = (
        math.log(alpha)
        - s * math.log(scale)
        - sh * math.log(abs(cos_f))
        + (sh - 1.0) * math.log(x)
        - x
        + 3.0 * math.log(2.0 + x)
        + 3.0
    )
    saddle = math.exp(min(log_saddle, 700.0)) * abs(pref)

    terms = []
    ratio = 1.0  # Gamma(g+mu) / (Gamma(g) * mu!)
    for mu in range(_TAIL_TERMS):
        coeff = (-1.0) ** mu * ratio * _rgamma(beta - alpha * (g + mu))
        term = pref * coeff * math.exp(s * log_aa - (g + mu) * log_wa) / (
            g + mu - s
        )
        terms.append(term)
        ratio *= (g + mu) / (mu + 1.0)
        if not math.isfinite(ratio) or abs(ratio) > 1e280:
            break
    # the expansion's coefficients vanish wherever the reciprocal gamma
    # hits a pole, so optimal truncation must scan nonzero magnitudes only
    nz = [i for i, term in enumerate(terms) if term != 0.0]
    if not nz:
        return 0.0, saddle, 0
    cut = nz[0]
    best = abs(terms[cut])
    exhausted = True
    for i in nz[1:]:
        if abs(terms[i]) >= best:
            exhausted = False
            break
        cut = i
        best = abs(terms[i])
    omitted = best if exhausted else 0.0
    for i in nz:
        if i > cut:
            omitted = abs(terms[i])
            break
    acc = math.fsum(terms[: cut + 1])
    peak = max(abs(term) for term in terms[: cut + 1])
    err = 2.0 * omitted + saddle + len(terms) * 2.2e-16 * peak + 2e-14 * abs(acc)
    return acc, err, cut + 1


def extended_gamma_k(
    s: float,
    params: MLParams,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
    *,
    tail_exponent: float | None = None,
) -> EvalResult:
    """Mellin-type integral int_0^inf m**(s-1) E(-m) dm.

    For algebraically decaying kernels the integral converges only on the
    strip 0 < s < r/k; outside it a DomainError names the strip.  For
    kernels whose decay rate this module cannot certify (non-exponential
    with a non-decaying saddle correction), pass `tail_exponent` (the
    integrand falls like m**(s-1-r/k)) to opt into the one-term power-law
    tail model; its full magnitude is charged to the error estimate.

    Kernel evaluations use a working copy of the series guard widened to
    the integration range; term-count and precision limits still apply
    and their failures propagate.
    """
    _check_positive(s=s)
    params.validate()
    ev = get_evaluator(params)
    if ev.oscillatory():
        raise DomainError(
            "kernel's reduced power index is >= 2: no decaying large-argument "
            "regime on the negative axis, semi-infinite integral refused"
        )

    state = {"emax": 0.0}

    def run_0inf(cutoff: float, te: float | None, field=False) -> EvalResult:
        wide = _widened(series, 2.2 * cutoff)
        cfg = replace(config, semi_infinite_cutoff=cutoff)

        def f(m):
            vals, errs = ev.batch_nonpos_fielded(-np.asarray(m, dtype=float), wide)
            state["emax"] = max(state["emax"], float(np.max(errs)))
            return errs if field else vals

        return integrate_0inf(
            f, cfg, singular_exponent_at_zero=s - 1.0, tail_exponent=te
        )

    def noise_0inf(cutoff: float, te: float | None) -> float:
        """Kernel evaluation noise folded through the weight: the per-point
        error field integrated like the kernel itself, capped by the
        uniform bound emax * cutoff**s / s."""
        uniform = state["emax"] * cutoff**s / s
        try:
            res = run_0inf(cutoff, te, field=True)
            return min(uniform, abs(res.value) + res.error_estimate)
        except KBetaError:
            return uniform

    if ev.exp_type():
        cutoff = _exp_cutoff(s, ev, config.semi_infinite_cutoff)
        res = run_0inf(cutoff, None)
        err = res.error_estimate + noise_0inf(cutoff, None)
        conv = err <= max(config.abs_tol, config.rel_tol * abs(res.value))
        return EvalResult(
            res.value, err, res.subdivisions_used, conv, res.diagnostics
        )

    g = ev.algebraic_decay_exponent()
    if s >= g:
        raise DomainError(
            f"integral diverges at infinity for s={s}: the kernel falls like "
            f"m**(-{g}) so the admissible strip is 0 < s < {g}"
        )

    red = ev.reduced
    cos_f = math.cos(math.pi / red.alpha)
    if tail_exponent is None and red.alpha > 0.5 and cos_f <= -0.05:
        # accurate route: finite part on [0, A] plus closed-form tail, with
        # the cutoff pushed out until the expansion remainder certifies
        x_target = max(50.0, red.alpha * s + 6.0)
        a_cut = max(
            config.semi_infinite_cutoff,
            (x_target / abs(cos_f)) ** red.alpha / red.arg_scale,
        )
        tail_model = _tail_expansion(s, ev, a_cut)
        tries = 0
        while (
            tail_model is not None
            and tail_model[1] > 0.25 * config.abs_tol
            and tries < 7
        ):
            a_cut *= 2.0
            tail_model = _tail_expansion(s, ev, a_cut)
            tries += 1
        if tail_model is not None:
            tail, tail_err, used = tail_model
            wide = _widened(series, 1.1 * a_cut)
            scale_a = a_cut**s
            inner_cfg = _rescaled(config, scale_a)

            def f(y, omy):
                vals, errs = ev.batch_nonpos_fielded(-a_cut * y, wide)
                state["emax"] = max(state["emax"], float(np.max(errs)))
                return vals

            def f_field(y, omy):
                _, errs = ev.batch_nonpos_fielded(-a_cut * y, wide)
                return errs

            finite = integrate_01_singular(f, s - 1.0, 0.0, inner_cfg)
            value = scale_a * finite.value + tail
            field = integrate_01_singular(f_field, s - 1.0, 0.0, inner_cfg)
            noise = min(
                state["emax"] * scale_a / s,
                scale_a * (abs(field.value) + field.error_estimate),
            )
            err = scale_a * finite.error_estimate + tail_err + noise
            conv = err <= max(config.abs_tol, config.rel_tol * abs(value))
            diags = finite.diagnostics + (f"tail-expansion-terms={used}",)
            return EvalResult(value, err, finite.subdivisions_used, conv, diags)

    if tail_exponent is None:
        if params.denominator_gamma is GammaMode.CLASSICAL and params.k == 1.0:
            tail_exponent = g + 1.0 - s
        else:
            raise DomainError(
                "tail decay is not certifiable for these parameters; pass "
                f"tail_exponent (the integrand falls like m**({s - 1.0 - g})) "
                "to opt into the power-law tail model"
            )
    res = run_0inf(config.semi_infinite_cutoff, tail_exponent)
    err = res.error_estimate + noise_0inf(config.semi_infinite_cutoff, tail_exponent)
    conv = err <= max(config.abs_tol, config.rel_tol * abs(res.value))
    return EvalResult(res.value, err, res.subdivisions_used, conv, res.diagnostics)


def extended_gamma_closed_form_claimed(s: float, params: MLParams) -> float:
    """Published closed form for the gamma integral, evaluated verbatim:

        G_k(s+1) G_k(1-(s+1)) / (G_k(r-p(1+s)) G_k(q-p(1+s)))

    with G_k continued to negative arguments by its recurrence.  Already at
    k=p=q=r=1 this does not reduce to the classical gamma function, so the
    value serves as a comparison probe only.  PoleError propagates when any
    factor sits on a pole.
    """
    if not math.isfinite(s):
        raise DomainError(f"s must be finite, got {s}")
    params.validate()
    k, p, q, r = params.k, params.p, params.q, params.r
    num = k_gamma_extended(s + 1.0, k) * k_gamma_extended(-s, k)
    den = k_gamma_extended(r - p * (1.0 + s), k) * k_gamma_extended(
        q - p * (1.0 + s), k
    )
    return num / den


def _beta_weight_mass(s: float, t: float, k: float) -> float:
    """int_0^1 m**(s/k-1) (1-m)**(t/k-1) dm, for scaling kernel noise."""
    return math.exp(
        math.lgamma(s / k) + math.lgamma(t / k) - math.lgamma((s + t) / k)
    )


def _check_beta_args(s: float, t: float, v: float) -> None:
    _check_positive(s=s, t=t)
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0.0):
        raise DomainError(f"v must be a finite nonnegative real, got {v}")


@dataclass(frozen=True)
class ExtBetaArgs:
    """Argument triple (s, t, v) of the extended beta function.

    s, t are the exponent parameters (both must be positive) and v >= 0
    scales the kernel argument.  Bundling them keeps call sites that pass
    the same triple to several evaluators honest about using one binding.
    """

    s: float
    t: float
    v: float

    def validate(self) -> None:
        _check_beta_args(self.s, self.t, self.v)


def extended_beta_k(
    s: float,
    t: float,
    v: float,
    params: MLParams,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
) -> EvalResult:
    """(1/k) int_0^1 m**(s/k-1) (1-m)**(t/k-1) E(-v m**k (1-m)**k) dm.

    Kernel arguments stay in [-v/4**k, 0]; a SeriesGuardError is raised
    when v/4**k exceeds the series guard.  The kernel's own error bound is
    folded into the estimate through the weight mass.
    """
    _check_beta_args(s, t, v)
    params.validate()
    k = params.k
    peak_arg = v * 4.0**-k
    if peak_arg > series.max_abs_argument * (1.0 + 1e-12):
        raise SeriesGuardError(
            f"kernel argument reaches -{peak_arg}, beyond the series guard "
            f"{series.max_abs_argument}"
        )
    ev = get_evaluator(params)
    state = {"emax": 0.0}

    def f(m, omm):
        arg = -v * (m * omm) ** k
        vals, err = ev.batch_nonpos(arg, series)
        state["emax"] = max(state["emax"], float(err))
        return vals

    res = integrate_01_singular(f, s / k - 1.0, t / k - 1.0, config)
    value = res.value / k
    err = (res.error_estimate + state["emax"] * _beta_weight_mass(s, t, k)) / k
    conv = err <= max(config.abs_tol, config.rel_tol * abs(value))
    return EvalResult(value, err, res.subdivisions_used, conv, res.diagnostics)


def incomplete_extended_beta_k(
    y: float,
    s: float,
    t: float,
    v: float,
    params: MLParams,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
) -> EvalResult:
    """The beta integral truncated at upper limit y in [0, 1].

    Nondecreasing in y; y=1 recovers extended_beta_k.  For y past 3/4 the
    complement int_y^1 is integrated instead so the (1-u) endpoint weight
    keeps its tanh-sinh treatment.
    """
    _check_beta_args(s, t, v)
    params.validate()
    if not (isinstance(y, (int, float)) and math.isfinite(y) and 0.0 <= y <= 1.0):
        raise DomainError(f"upper limit y must lie in [0, 1], got {y}")
    if y == 0.0:
        return EvalResult(0.0, 0.0, 0, True, ())
    if y == 1.0:
        return extended_beta_k(s, t, v, params, config, series)
    k = params.k
    peak_arg = v * 4.0**-k
    if peak_arg > series.max_abs_argument * (1.0 + 1e-12):
        raise SeriesGuardError(
            f"kernel argument reaches -{peak_arg}, beyond the series guard "
            f"{series.max_abs_argument}"
        )
    ev = get_evaluator(params)
    state = {"emax": 0.0}

    if y <= 0.75:

        def f(u, ua, bu):
            arg = -v * (u * (1.0 - u)) ** k
            vals, err = ev.batch_nonpos(arg, series)
            state["emax"] = max(state["emax"], float(err))
            return vals * (1.0 - u) ** (t / k - 1.0)

        res = integrate_interval(f, 0.0, y, s / k - 1.0, 0.0, config)
        value = res.value / k
        err = res.error_estimate / k
        subdiv = res.subdivisions_used
        diags = res.diagnostics
    else:

        def f(u, ua, bu):
            # bu = 1 - u arrives cancellation-free from the quadrature
            arg = -v * (u * bu) ** k
            vals, err = ev.batch_nonpos(arg, series)
            state["emax"] = max(state["emax"], float(err))
            return vals * u ** (s / k - 1.0)

        full = extended_beta_k(s, t, v, params, config, series)
        comp = integrate_interval(f, y, 1.0, 0.0, t / k - 1.0, config)
        value = full.value - comp.value / k
        err = full.error_estimate + comp.error_estimate / k
        subdiv = max(full.subdivisions_used, comp.subdivisions_used)
        diags = comp.diagnostics
    err += state["emax"] * _beta_weight_mass(s, t, k) / k
    value = max(value, 0.0)
    conv = err <= max(config.abs_tol, config.rel_tol * abs(value))
    return EvalResult(value, err, subdiv, conv, diags)
