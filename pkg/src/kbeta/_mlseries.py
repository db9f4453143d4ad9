"""Evaluation engine for the deformed Mittag-Leffler kernel.

Both denominator-gamma flavors reduce to one scaled series

    P(g, a, b)(z) = sum_j  (g)_j * z**j / (Gamma(a*j + b) * j!)

with (g)_j the ordinary Pochhammer symbol:

    classical  : E(x) = P(r/k, p,   q  )(k * x)
    k-deformed : E(x) = k**(1 - q/k) * P(r/k, p/k, q/k)(k**(1 - p/k) * x)

All series coefficients are positive, so for z < 0 the sum cancels
catastrophically; the largest term exceeds the result by exp(2|z|) in the
exponential-kernel case and worse for a < 1. Evaluation dispatches on the
reduced parameters:

  * |z| <= 4: double-precision Horner over cached coefficients, with a
    parallel Horner over |coefficients| bounding the rounding noise.
  * exponential type (a == 1 and b - g a nonpositive integer): the kernel
    equals exp(z) times a polynomial of degree g - b whose coefficients are
    derived once from the series; exact and cheap at any z.
  * z << -4 with a in [0.7, 1): algebraic large-argument expansion
    sum_m A_m * w**(-g-m) truncated at its smallest term, accepted only
    when that term is below 5e-14 of the partial sum; the omitted term
    plus an exponentially small saddle bound goes into the error.
  * everything else: exact Horner in mpmath at working precision scaled to
    the observed term peak (cancellation-aware), with a floor check that
    retries at higher precision if the sum lands below the rounding floor.

Term counts grow like |z|**(1/a), so small a combined with large |z| is
refused via max_terms rather than silently truncated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import ConvergenceError, LogOverflowError, SeriesGuardError
from .kcore import GammaMode, MLParams, SeriesConfig

_EPS = 2.220446049250313e-16
_LN10 = math.log(10.0)
DOUBLE_SWITCH = 4.0
_DOUBLE_ACCEPT = 2e-13  # max rounding noise, relative, tolerated in double
_DPS_CAP = 420
_ASYM_MAX_TERMS = 18
_ASYM_REL = 5e-14


@dataclass(frozen=True)
class ReducedSeries:
    gamma: float
    alpha: float
    beta: float
    arg_scale: float
    prefactor: float


def reduce_params(params: MLParams) -> ReducedSeries:
    k, p, q, r = params.k, params.p, params.q, params.r
    if params.denominator_gamma is GammaMode.CLASSICAL:
        return ReducedSeries(r / k, p, q, k, 1.0)
    return ReducedSeries(
        r / k, p / k, q / k, k ** (1.0 - p / k), k ** (1.0 - q / k)
    )


def _rgamma(u: float) -> float:
    """1 / Gamma(u) for any real u (zero at nonpositive integers)."""
    if u > 0.5:
        if u > 171.0:
            return math.exp(-math.lgamma(u))
        return 1.0 / math.gamma(u)
    near = round(u)
    if near <= 0 and abs(u - near) <= 8.0 * _EPS * max(1.0, float(-near)):
        # the reflection below would turn an exact pole into sin-rounding junk
        return 0.0
    s = math.sin(math.pi * u)
    if s == 0.0:
        return 0.0
    if 1.0 - u > 171.0:
        mag = math.exp(math.lgamma(1.0 - u) - math.log(abs(s) / math.pi))
        return math.copysign(1.0, s) / mag if mag < math.inf else 0.0
    return s * math.gamma(1.0 - u) / math.pi


class _CoefficientTable:
    """Series coefficients for one parameter set.

    Double-precision coefficients come from the double-rounded reduced
    triple; extended-precision ones recompute the reduction exactly in
    mpmath from the original parameters, since a 1e-16 perturbation of the
    reduced exponents is amplified by the cancellation at negative z.
    """

    def __init__(self, params: MLParams, red: ReducedSeries):
        self.params = params
        self.gamma = red.gamma
        self.alpha = red.alpha
        self.beta = red.beta
        self._log_c = np.empty(0)
        self._c = np.empty(0)
        self._mp_coeffs: list = []
        self._mp_dps = 0

    def reduced_mp(self):
        """Exact-in-mp reduced (gamma, alpha, beta, arg_scale) at current dps."""
        prm = self.params
        k = mp.mpf(prm.k)
        g = mp.mpf(prm.r) / k
        if prm.denominator_gamma is GammaMode.CLASSICAL:
            return g, mp.mpf(prm.p), mp.mpf(prm.q), k
        a = mp.mpf(prm.p) / k
        return g, a, mp.mpf(prm.q) / k, k ** (1 - a)

    def _grow(self, n: int) -> None:
        old = len(self._log_c)
        if n <= old:
            return
        g, a, b = self.gamma, self.alpha, self.beta
        lg0 = math.lgamma(g)
        new = np.empty(n)
        new[:old] = self._log_c
        for j in range(old, n):
            new[j] = (
                math.lgamma(g + j) - lg0 - math.lgamma(a * j + b) - math.lgamma(j + 1)
            )
        self._log_c = new
        self._c = np.exp(new)

    def term_profile(self, log_absz: float, drop: float, cap: int):
        """Index J past the term-magnitude peak where terms fall `drop` nats
        below it, plus the peak log-magnitude. Raises ConvergenceError if J
        would exceed cap."""
        if log_absz == -math.inf:
            self._grow(1)
            return 0, float(self._log_c[0])
        size = 64
        while True:
            self._grow(min(size, cap + 1))
            idx = np.arange(len(self._log_c))
            m = self._log_c + idx * log_absz
            peaks = np.maximum.accumulate(m)
            hit = np.nonzero(peaks - m >= drop)[0]
            if hit.size:
                j_end = int(hit[0])
                return j_end, float(peaks[j_end])
            if len(self._log_c) > cap:
                raise ConvergenceError(
                    f"series at log|z|={log_absz:.3f} needs more than {cap} terms "
                    f"(reduced alpha={self.alpha}); raise max_terms or lower the "
                    "argument guard"
                )
            size *= 2

    def coeffs_double(self, n: int) -> np.ndarray:
        self._grow(n)
        return self._c[:n]

    def coeffs_mp(self, n: int, dps: int) -> list:
        build_dps = dps + 12
        if build_dps > self._mp_dps:
            self._mp_coeffs = []
            self._mp_dps = build_dps
        have = len(self._mp_coeffs)
        if n <= have:
            return self._mp_coeffs
        with mp.workdps(self._mp_dps):
            g, a, b, _ = self.reduced_mp()
            if have == 0:
                self._mp_coeffs = [1 / mp.gamma(b)]
                have = 1
            g_prev = mp.gamma(a * (have - 1) + b)
            c = self._mp_coeffs[have - 1]
            for j in range(have - 1, n - 1):
                g_next = mp.gamma(a * (j + 1) + b)
                c = c * (g + j) / (j + 1) * (g_prev / g_next)
                self._mp_coeffs.append(c)
                g_prev = g_next
        return self._mp_coeffs


class MLEvaluator:
    """Cached per-parameter evaluator; see module docstring for strategy."""

    def __init__(self, params: MLParams):
        params.validate()
        self.params = params
        self.reduced = reduce_params(params)
        self.table = _CoefficientTable(params, self.reduced)
        self._exp_poly: np.ndarray | None = None
        self._asym_coeffs: np.ndarray | None = None

    # -- classification helpers used by integral gating ----------------------

    def exp_type(self) -> bool:
        """True when the kernel is exp(z) times a polynomial (reduced a == 1
        and b - g a nonpositive integer), hence exponentially decaying."""
        red = self.reduced
        if abs(red.alpha - 1.0) > 1e-12:
            return False
        d = red.beta - red.gamma
        return d < 0.5 and abs(d - round(d)) < 1e-9

    def algebraic_decay_exponent(self) -> float:
        """g in E(-w) ~ C * w**(-g) as w -> inf (valid for 0 < a < 2)."""
        return self.reduced.gamma

    def oscillatory(self) -> bool:
        """Reduced a >= 2: the kernel oscillates without decay on the
        negative axis, so semi-infinite integrals with power-law tail
        handling are out of reach."""
        return self.reduced.alpha >= 2.0 - 1e-12

    def terms_feasible(self, abs_x: float, config: SeriesConfig) -> bool:
        """Whether E can be evaluated at |x| within the max_terms budget."""
        if self.exp_type():
            return True
        z = abs_x * self.reduced.arg_scale
        if z <= DOUBLE_SWITCH:
            return True
        if self._asym_usable() and self._asym_probe(z):
            return True
        try:
            _, peak = self.table.term_profile(math.log(z), 40.0, config.max_terms)
            dps = 25 + int(peak / _LN10) + 1
            if dps > _DPS_CAP:
                return False
            self.table.term_profile(
                math.log(z), _LN10 * (dps + 8), config.max_terms
            )
        except ConvergenceError:
            return False
        return True

    # -- scalar evaluation ----------------------------------------------------

    def value_at(self, x: float, config: SeriesConfig):
        red = self.reduced
        z = red.arg_scale * x
        pref = red.prefactor
        if abs(z) <= DOUBLE_SWITCH:
            vals, errs, terms = self._eval_double_batch(np.array([z]), config)
            if errs[0] <= _DOUBLE_ACCEPT * abs(vals[0]):
                return pref * float(vals[0]), pref * float(errs[0]), terms
        if self.exp_type():
            vals, errs = self._eval_exp_closed(np.array([z]))
            return pref * float(vals[0]), pref * float(errs[0]), self._exp_degree() + 1
        if z < 0.0 and self._asym_usable():
            vals, errs, ok = self._eval_asym(np.array([-z]))
            if ok[0]:
                return pref * float(vals[0]), pref * float(errs[0]), _ASYM_MAX_TERMS
        val, err, terms = self._eval_mp(x, config)
        return pref * val, pref * err, terms

    def _eval_double_batch(self, z: np.ndarray, config: SeriesConfig):
        """Double-precision Horner; per-point rounding-noise bounds come from
        a parallel Horner over |coefficients| at |z|."""
        zmax = float(np.max(np.abs(z)))
        drop = max(40.0, -math.log(max(config.rel_tol, 1e-300)) + 9.0)
        log_zmax = math.log(zmax) if zmax > 0.0 else -math.inf
        j_end, peak = self.table.term_profile(log_zmax, drop, config.max_terms)
        c = self.table.coeffs_double(j_end + 1)
        absz = np.abs(z)
        acc = np.full(z.shape, c[j_end])
        abs_sum = np.full(z.shape, c[j_end])
        for j in range(j_end - 1, -1, -1):
            acc = acc * z + c[j]
            abs_sum = abs_sum * absz + c[j]
        errs = _EPS * (2.0 * j_end + 6.0) * abs_sum + math.exp(peak - drop)
        return acc, errs, j_end + 1

    def _eval_mp(self, x: float, config: SeriesConfig):
        z = self.reduced.arg_scale * x
        absz = abs(z)
        if absz == 0.0:
            v = float(self.table.coeffs_double(1)[0])
            return v, 4.0 * _EPS * abs(v), 1
        _, peak = self.table.term_profile(math.log(absz), 40.0, config.max_terms)
        if z >= 0.0:
            dps = 22
        else:
            dps = 25 + max(0, int(peak / _LN10)) + 1
        while True:
            if dps > _DPS_CAP:
                raise ConvergenceError(
                    f"cancellation at z={z} exceeds the precision cap"
                )
            drop = _LN10 * (dps + 8)
            j_end, peak = self.table.term_profile(
                math.log(absz), drop, config.max_terms
            )
            coeffs = self.table.coeffs_mp(j_end + 1, dps)
            with mp.workdps(dps + 8):
                _, _, _, scale_mp = self.table.reduced_mp()
                zz = mp.mpf(x) * scale_mp
                acc = coeffs[j_end]
                for j in range(j_end - 1, -1, -1):
                    acc = acc * zz + coeffs[j]
                if z < 0.0 and acc != 0 and (
                    mp.log(abs(acc)) < peak - _LN10 * (dps - 6)
                ):
                    dps += 20
                    continue
                val = float(acc)
            if math.isinf(val):
                with mp.workdps(dps + 8):
                    log_val = float(mp.log(abs(acc)))
                raise LogOverflowError(
                    f"kernel value at z={z} overflows double range", log_val
                )
            break
        err = (
            math.exp(min(peak - _LN10 * dps, 700.0)) * (j_end + 2) * 1e-6
            + abs(val) * 3.0 * _EPS
            + math.exp(peak - drop)
        )
        return val, err, j_end + 1

    # -- exponential-type closed form ------------------------------------------

    def _exp_degree(self) -> int:
        return max(0, int(round(self.reduced.gamma - self.reduced.beta)))

    def _exp_poly_coeffs(self) -> np.ndarray:
        if self._exp_poly is None:
            n = self._exp_degree()
            c = self.table.coeffs_double(n + 3)
            d = np.empty(n + 3)
            for i in range(n + 3):
                d[i] = sum(
                    c[j] * (-1.0) ** (i - j) / math.factorial(i - j)
                    for j in range(i + 1)
                )
            top = max(1.0, float(np.max(np.abs(d[: n + 1]))))
            if abs(d[n + 1]) > 1e-11 * top or abs(d[n + 2]) > 1e-11 * top:
                raise ConvergenceError(
                    "exponential-type reduction failed its degree check"
                )
            self._exp_poly = d[: n + 1]
        return self._exp_poly

    def _eval_exp_closed(self, z: np.ndarray):
        d = self._exp_poly_coeffs()
        acc = np.full(z.shape, d[-1])
        absacc = np.full(z.shape, abs(d[-1]))
        for i in range(len(d) - 2, -1, -1):
            acc = acc * z + d[i]
            absacc = absacc * np.abs(z) + abs(d[i])
        ez = np.exp(z)
        vals = ez * acc
        errs = ez * absacc * (_EPS * (len(d) + 4)) + 1e-300
        return vals, errs

    # -- algebraic large-argument expansion --------------------------------------

    def _asym_usable(self) -> bool:
        # Valid for 0 < a < 2 on the negative axis; the per-point acceptance
        # test in _eval_asym carries a saddle-correction bound that only
        # becomes useful once cos(pi/a) is safely negative.
        a = self.reduced.alpha
        if self.exp_type() or not 0.5 < a <= 1.94:
            return False
        return math.cos(math.pi / a) <= -0.05

    def _asym_coefficients(self) -> np.ndarray:
        if self._asym_coeffs is None:
            g, a, b = self.reduced.gamma, self.reduced.alpha, self.reduced.beta
            lg0 = math.lgamma(g)
            out = []
            for m_i in range(_ASYM_MAX_TERMS):
                mag = math.exp(
                    math.lgamma(g + m_i) - lg0 - math.lgamma(m_i + 1)
                )
                if mag > 1e290:
                    break
                out.append((-1.0) ** m_i * mag * _rgamma(b - a * (g + m_i)))
            self._asym_coeffs = np.array(out)
        return self._asym_coeffs

    def _exp_small_log(self, w: np.ndarray) -> np.ndarray:
        """Log-magnitude bound on the saddle contribution omitted by the
        algebraic expansion; decays only when cos(pi/a) < 0."""
        g, a, b = self.reduced.gamma, self.reduced.alpha, self.reduced.beta
        cos_f = math.cos(math.pi / a)
        return cos_f * w ** (1.0 / a) + max(0.0, g - b) * np.log(w) + 2.0

    def _eval_asym(self, w: np.ndarray):
        """Values, error bounds, and acceptance flags at arguments z = -w."""
        coeff = self._asym_coefficients()
        n = len(coeff)
        logw = np.log(w)
        g = self.reduced.gamma
        # terms[m, i] = coeff[m] * w_i**(-g-m)
        powers = np.exp(-np.outer(np.arange(n) + g, logw))
        terms = coeff[:, None] * powers
        absterms = np.abs(terms)
        absterms_masked = np.where(absterms == 0.0, math.inf, absterms)
        m_star = np.argmin(absterms_masked, axis=0)
        m_star = np.maximum(m_star, 1)
        csum = np.cumsum(terms, axis=0)
        cols = np.arange(w.size)
        vals = csum[m_star - 1, cols]
        omitted = np.where(
            np.isinf(absterms_masked[m_star, cols]),
            0.0,
            absterms_masked[m_star, cols],
        )
        # rounding allowance: exponent noise (g+m)*eps*log(w) amplifies the
        # powers, plus the double-rounded reduced parameters themselves
        round_rel = 2e-14 + _EPS * (g + n) * (np.abs(logw) + 2.0)
        errs = 2.0 * omitted + np.exp(self._exp_small_log(w)) + round_rel * np.abs(vals)
        ok = errs <= 1.2e-13 * np.abs(vals)
        return vals, errs, ok

    def _asym_probe(self, zmag: float) -> bool:
        _, _, ok = self._eval_asym(np.array([zmag]))
        return bool(ok[0])

    # -- batch evaluation over nonpositive arguments -------------------------------

    def batch_nonpos_fielded(self, x: np.ndarray, config: SeriesConfig):
        """Values of E at an array of arguments x <= 0 with a per-point
        absolute error field (same shape as x)."""
        x = np.asarray(x, dtype=float)
        if x.size == 0:
            return x.copy(), x.copy()
        xmin = float(np.min(x))
        if -xmin > config.max_abs_argument * (1.0 + 1e-12):
            raise SeriesGuardError(
                f"batch argument {xmin} exceeds series guard "
                f"{config.max_abs_argument}"
            )
        red = self.reduced
        z = red.arg_scale * x
        if self.exp_type():
            vals, errs = self._eval_exp_closed(z)
            return red.prefactor * vals, red.prefactor * errs
        vals = np.empty_like(z)
        field = np.empty_like(z)
        done = np.zeros(z.shape, dtype=bool)
        near = z >= -DOUBLE_SWITCH
        if np.any(near):
            zn = z[near]
            vn, errs_n, _ = self._eval_double_batch(zn, config)
            keep = errs_n <= _DOUBLE_ACCEPT * np.abs(vn)
            out = vals[near]
            out[keep] = vn[keep]
            vals[near] = out
            fout = field[near]
            fout[keep] = errs_n[keep]
            field[near] = fout
            flag = done[near]
            flag[keep] = True
            done[near] = flag
        far = ~near
        if np.any(far) and self._asym_usable():
            zf = z[far]
            av, ae, ok = self._eval_asym(-zf)
            out = vals[far]
            out[ok] = av[ok]
            vals[far] = out
            fout = field[far]
            fout[ok] = ae[ok]
            field[far] = fout
            flag = done[far]
            flag[ok] = True
            done[far] = flag
        for i in np.nonzero(~done)[0]:
            v, e, _ = self._eval_mp(float(x.flat[i]), config)
            vals[i] = v
            field[i] = e
        return red.prefactor * vals, red.prefactor * field

    def batch_nonpos(self, x: np.ndarray, config: SeriesConfig):
        """Values of E at an array of arguments x <= 0, plus one absolute
        error bound valid for every entry."""
        vals, field = self.batch_nonpos_fielded(x, config)
        err = float(np.max(field)) if field.size else 0.0
        return vals, err


_evaluators: dict[MLParams, MLEvaluator] = {}


def get_evaluator(params: MLParams) -> MLEvaluator:
    ev = _evaluators.get(params)
    if ev is None:
        ev = MLEvaluator(params)
        _evaluators[params] = ev
    return ev
