"""Alternative integral representations of the extended beta function.

Thirteen routes to the same number: the defining unit-interval integral
(Direct) plus twelve substitutions of it onto other domains; a trig angle,
a power map, scaled and shifted intervals, rational maps, and half-line
folds.  Every route is evaluated from its own integrand, so agreement
between routes is a genuine cross-check of both the algebra and the
quadrature, not a tautology.

Two evaluators are exposed.  `eval_representation` computes the corrected
form of each representation: the exact change-of-variables result, which
reduces to the classical beta function at v=0.  `paper_literal_representation`
computes the uncorrected textual variant of the same route, misprints
intact, so an audit can quantify each misprint's numerical footprint.
Three of the uncorrected forms are not well defined for generic inputs
(a divergent endpoint, a negative base under a fractional power, an
unbound symbol); those raise DomainError naming the defect instead of
silently integrating something else.

Each evaluation reduces to weighted unit-interval quadratures whose
endpoint exponents are supplied analytically; smooth factors are written
in cancellation-free endpoint variables.  The kernel's series error bound
is charged against the representation's exact weight mass, so the
returned error estimate covers kernel noise as well as quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._mlseries import get_evaluator
from .errors import DomainError, SeriesGuardError
from .extfun import ExtBetaArgs, _beta_weight_mass, extended_beta_k
from .kcore import DEFAULT_SERIES, MLParams, SeriesConfig
from .quad import (
    DEFAULT_QUAD,
    EvalResult,
    QuadConfig,
    _rescaled,
    integrate_01_singular,
    integrate_interval,
)

_HALF_PI = math.pi / 2.0


class RepTag(Enum):
    """Names of the supported integral representations."""

    DIRECT = "Direct"
    TRIG = "Trig"
    POWER = "Power"
    SCALED_INTERVAL = "ScaledInterval"
    RATIONAL_MAP = "RationalMap"
    HALF_LINE = "HalfLine"
    SYMMETRIZED_HALF_LINE = "SymmetrizedHalfLine"
    SCALED_HALF_LINE = "ScaledHalfLine"
    TAN_SQUARED = "TanSquared"
    TWO_PARAMETER = "TwoParameter"
    SHIFTED_TWO_PARAMETER = "ShiftedTwoParameter"
    INTERVAL = "Interval"
    SYMMETRIC_INTERVAL = "SymmetricInterval"


_PAYLOAD_FIELDS: dict[RepTag, tuple[str, ...]] = {
    RepTag.DIRECT: (),
    RepTag.TRIG: (),
    RepTag.POWER: ("n",),
    RepTag.SCALED_INTERVAL: ("eta",),
    RepTag.RATIONAL_MAP: ("eta",),
    RepTag.HALF_LINE: (),
    RepTag.SYMMETRIZED_HALF_LINE: (),
    RepTag.SCALED_HALF_LINE: ("eta", "zeta"),
    RepTag.TAN_SQUARED: ("eta", "zeta"),
    RepTag.TWO_PARAMETER: ("eta", "zeta"),
    RepTag.SHIFTED_TWO_PARAMETER: ("zeta", "xi"),
    RepTag.INTERVAL: ("eta", "zeta"),
    RepTag.SYMMETRIC_INTERVAL: (),
}


@dataclass(frozen=True)
class Representation:
    """A representation tag plus the free parameters that route needs.

    Payload constraints are checked at construction: Power needs an
    integer n >= 1; ScaledInterval and RationalMap need eta > 0;
    ScaledHalfLine, TanSquared and TwoParameter need eta, zeta > 0;
    ShiftedTwoParameter needs zeta > 0 and zeta + xi > 0; Interval needs
    eta < zeta.  Parameters a tag does not use must stay unset.
    """

    tag: RepTag
    n: int | None = None
    eta: float | None = None
    zeta: float | None = None
    xi: float | None = None

    def __post_init__(self) -> None:
        wanted = _PAYLOAD_FIELDS[self.tag]
        for name in ("n", "eta", "zeta", "xi"):
            val = getattr(self, name)
            if name in wanted:
                if val is None:
                    raise DomainError(
                        f"{self.tag.value} requires parameter {name}"
                    )
            elif val is not None:
                raise DomainError(
                    f"{self.tag.value} takes no parameter {name}, got {val!r}"
                )
        if "n" in wanted and (
            isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1
        ):
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        for name in ("eta", "zeta", "xi"):
            if name in wanted:
                val = getattr(self, name)
                if isinstance(val, bool) or not (
                    isinstance(val, (int, float)) and math.isfinite(val)
                ):
                    raise DomainError(
                        f"{name} must be a finite real, got {val!r}"
                    )
        if self.tag in (RepTag.SCALED_INTERVAL, RepTag.RATIONAL_MAP):
            if self.eta <= 0.0:
                raise DomainError(
                    f"{self.tag.value} requires eta > 0, got {self.eta}"
                )
        elif self.tag in (
            RepTag.SCALED_HALF_LINE,
            RepTag.TAN_SQUARED,
            RepTag.TWO_PARAMETER,
        ):
            if self.eta <= 0.0 or self.zeta <= 0.0:
                raise DomainError(
                    f"{self.tag.value} requires eta > 0 and zeta > 0, "
                    f"got eta={self.eta}, zeta={self.zeta}"
                )
        elif self.tag is RepTag.SHIFTED_TWO_PARAMETER:
            if self.zeta <= 0.0 or self.zeta + self.xi <= 0.0:
                raise DomainError(
                    "ShiftedTwoParameter requires zeta > 0 and zeta + xi > 0, "
                    f"got zeta={self.zeta}, xi={self.xi}"
                )
        elif self.tag is RepTag.INTERVAL:
            if not self.eta < self.zeta:
                raise DomainError(
                    f"Interval requires eta < zeta, got eta={self.eta}, "
                    f"zeta={self.zeta}"
                )

    def label(self) -> str:
        """Stable display form, e.g. 'Power(n=2)' or 'ScaledHalfLine(eta=2.0, zeta=3.0)'."""
        wanted = _PAYLOAD_FIELDS[self.tag]
        if not wanted:
            return self.tag.value
        rendered = []
        for name in wanted:
            val = getattr(self, name)
            rendered.append(
                f"{name}={val}" if name == "n" else f"{name}={float(val)!r}"
            )
        return f"{self.tag.value}({', '.join(rendered)})"

    @classmethod
    def direct(cls) -> "Representation":
        return cls(RepTag.DIRECT)

    @classmethod
    def trig(cls) -> "Representation":
        return cls(RepTag.TRIG)

    @classmethod
    def power(cls, n: int) -> "Representation":
        return cls(RepTag.POWER, n=n)

    @classmethod
    def scaled_interval(cls, eta: float) -> "Representation":
        return cls(RepTag.SCALED_INTERVAL, eta=eta)

    @classmethod
    def rational_map(cls, eta: float) -> "Representation":
        return cls(RepTag.RATIONAL_MAP, eta=eta)

    @classmethod
    def half_line(cls) -> "Representation":
        return cls(RepTag.HALF_LINE)

    @classmethod
    def symmetrized_half_line(cls) -> "Representation":
        return cls(RepTag.SYMMETRIZED_HALF_LINE)

    @classmethod
    def scaled_half_line(cls, eta: float, zeta: float) -> "Representation":
        return cls(RepTag.SCALED_HALF_LINE, eta=eta, zeta=zeta)

    @classmethod
    def tan_squared(cls, eta: float, zeta: float) -> "Representation":
        return cls(RepTag.TAN_SQUARED, eta=eta, zeta=zeta)

    @classmethod
    def two_parameter(cls, eta: float, zeta: float) -> "Representation":
        return cls(RepTag.TWO_PARAMETER, eta=eta, zeta=zeta)

    @classmethod
    def shifted_two_parameter(cls, zeta: float, xi: float) -> "Representation":
        return cls(RepTag.SHIFTED_TWO_PARAMETER, zeta=zeta, xi=xi)

    @classmethod
    def interval(cls, eta: float, zeta: float) -> "Representation":
        return cls(RepTag.INTERVAL, eta=eta, zeta=zeta)

    @classmethod
    def symmetric_interval(cls) -> "Representation":
        return cls(RepTag.SYMMETRIC_INTERVAL)


#: One instance of every non-Direct representation, with the payloads used
#: by the default audit grid.
CANONICAL_REPRESENTATIONS: tuple[Representation, ...] = (
    Representation.trig(),
    Representation.power(3),
    Representation.scaled_interval(2.0),
    Representation.rational_map(1.5),
    Representation.half_line(),
    Representation.symmetrized_half_line(),
    Representation.scaled_half_line(2.0, 3.0),
    Representation.tan_squared(1.5, 2.5),
    Representation.two_parameter(2.0, 3.0),
    Representation.shifted_two_parameter(3.0, -1.0),
    Representation.interval(-1.0, 1.0),
    Representation.symmetric_interval(),
)


def _kernel(params: MLParams, series: SeriesConfig, state: dict):
    ev = get_evaluator(params)

    def E(arg):
        vals, err = ev.batch_nonpos(np.asarray(arg, dtype=float), series)
        if err > state["emax"]:
            state["emax"] = err
        return vals

    return E

def _combine(parts, noise: float, config: QuadConfig) -> EvalResult:
    value = 0.0
    err = noise
    sub = 0
    diags: list[str] = []
    for coeff, res in parts:
        value += coeff * res.value
        err += abs(coeff) * res.error_estimate
        sub = max(sub, res.subdivisions_used)
        diags.extend(res.diagnostics)
    conv = err <= max(config.abs_tol, config.rel_tol * abs(value))
    return EvalResult(value, err, sub, conv, tuple(diags))


def _geom_sum(x: np.ndarray, n: int) -> np.ndarray:
    """1 + x + ... + x**(n-1), so that 1 - x**n = (1 - x) * _geom_sum."""
    acc = np.ones_like(x)
    for _ in range(n - 1):
        acc = acc * x + 1.0
    return acc


def _trig(rep, s, t, v, k, sk, tk, E, config):
    a0 = 2.0 * tk - 1.0
    b1 = 2.0 * sk - 1.0

    def f(j, jm0, bmj):
        sinj = np.sin(jm0)
        cosj = np.sin(bmj)
        # sinc handles the 0/0 limit when a node offset underflows to 0.
        smooth = np.sinc(jm0 / math.pi) ** a0 * np.sinc(bmj / math.pi) ** b1
        return smooth * E(-v * (sinj * sinj * cosj * cosj) ** k)

    coeff = 2.0 / k
    res = integrate_interval(f, 0.0, _HALF_PI, a0, b1, _rescaled(config, coeff))
    return [(coeff, res)], _beta_weight_mass(s, t, k) / k


def _power(rep, s, t, v, k, sk, tk, E, config, literal):
    n = rep.n
    if literal:
        alpha = n * (sk - 1.0)
        if alpha <= -1.0:
            raise DomainError(
                f"literal Power(n={n}) integrand has a nonintegrable "
                f"singularity at 0: exponent n*(s/k - 1) = {alpha:.6g} <= -1"
            )
        mass = (
            math.exp(
                math.lgamma(sk - 1.0 + 1.0 / n)
                + math.lgamma(tk)
                - math.lgamma(sk - 1.0 + 1.0 / n + tk)
            )
            / k
        )
    else:
        alpha = n * sk - 1.0
        mass = _beta_weight_mass(s, t, k) / k
    e1 = tk - 1.0

    def f(x, omx):
        q = _geom_sum(x, n)
        return q**e1 * E(-v * (x**n * (omx * q)) ** k)

    coeff = n / k
    res = integrate_01_singular(f, alpha, e1, _rescaled(config, coeff))
    return [(coeff, res)], mass


def _scaled_interval(rep, s, t, v, k, sk, tk, E, config):
    eta = float(rep.eta)
    coeff = eta ** (1.0 - sk - tk) / k
    inv2 = 1.0 / (eta * eta)

    def f(u, uma, bmu):
        return E(-v * (uma * bmu * inv2) ** k)

    res = integrate_interval(
        f, 0.0, eta, sk - 1.0, tk - 1.0, _rescaled(config, abs(coeff))
    )
    return [(coeff, res)], _beta_weight_mass(s, t, k) / k


def _rational_map(rep, s, t, v, k, sk, tk, E, config, literal):
    eta = float(rep.eta)
    sig = sk + tk
    c = eta * (1.0 + eta)
    if literal:
        coeff = (
            (1.0 + eta) ** (sk - 1.0)
            * eta ** (tk - 1.0)
            * (t + eta) ** -sig
            / k
        )
        eta2 = eta * eta

        def f(x, omx):
            return E(-v * (c * x * omx / (x + eta2)) ** k)

        mass = abs(coeff) * _beta_weight_mass(s, t, k)
    else:
        coeff = (1.0 + eta) ** sk * eta**tk / k

        def f(x, omx):
            den = x + eta
            return den**-sig * E(-v * (c * x * omx / (den * den)) ** k)

        mass = _beta_weight_mass(s, t, k) / k
    res = integrate_01_singular(
        f, sk - 1.0, tk - 1.0, _rescaled(config, abs(coeff))
    )
    return [(coeff, res)], mass


def _half_line(rep, s, t, v, k, sk, tk, E, config):
    # The reciprocal substitution u -> 1/u maps [1, inf) back onto (0, 1]
    # and sends the u**(s/k-1) weight to u**(t/k-1) while fixing the rest
    # of the integrand, so the half-line splits into two unit-interval
    # pieces sharing one smooth factor.
    sig = sk + tk

    def g(x, omx):
        op = 1.0 + x
        return op**-sig * E(-v * (x / (op * op)) ** k)

    coeff = 1.0 / k
    cfg = _rescaled(config, coeff)
    r1 = integrate_01_singular(g, sk - 1.0, 0.0, cfg)
    r2 = integrate_01_singular(g, tk - 1.0, 0.0, cfg)
    return [(coeff, r1), (coeff, r2)], _beta_weight_mass(s, t, k) / k


def _scaled_half_line(rep, s, t, v, k, sk, tk, E, config):
    eta, zeta = float(rep.eta), float(rep.zeta)
    sig = sk + tk
    coeff = eta**sk * zeta**tk / k
    cz = eta * zeta

    def f1(x, omx):
        den = zeta + eta * x
        return den**-sig * E(-v * (cz * x / (den * den)) ** k)

    # u -> 1/u on [1, inf) swaps the roles of eta and zeta in the folded
    # piece and turns the endpoint exponent into t/k - 1.
    def f2(w, omw):
        den = eta + zeta * w
        return den**-sig * E(-v * (cz * w / (den * den)) ** k)

    cfg = _rescaled(config, abs(coeff))
    r1 = integrate_01_singular(f1, sk - 1.0, 0.0, cfg)
    r2 = integrate_01_singular(f2, tk - 1.0, 0.0, cfg)
    return [(coeff, r1), (coeff, r2)], _beta_weight_mass(s, t, k) / k


def _tan_squared(rep, s, t, v, k, sk, tk, E, config):
    eta, zeta = float(rep.eta), float(rep.zeta)
    sig = sk + tk
    a0 = 2.0 * sk - 1.0
    b1 = 2.0 * tk - 1.0
    coeff = 2.0 * eta**sk * zeta**tk / k
    cz = eta * zeta

    def f(j, jm0, bmj):
        sinj = np.sin(jm0)
        cosj = np.sin(bmj)
        s2 = sinj * sinj
        c2 = cosj * cosj
        den = zeta * c2 + eta * s2
        # sinc handles the 0/0 limit when a node offset underflows to 0.
        smooth = np.sinc(jm0 / math.pi) ** a0 * np.sinc(bmj / math.pi) ** b1
        return smooth * den**-sig * E(-v * (cz * s2 * c2 / (den * den)) ** k)

    res = integrate_interval(
        f, 0.0, _HALF_PI, a0, b1, _rescaled(config, abs(coeff))
    )
    return [(coeff, res)], _beta_weight_mass(s, t, k) / k


def _two_parameter(rep, s, t, v, k, sk, tk, E, config, literal):
    eta, zeta = float(rep.eta), float(rep.zeta)
    sig = sk + tk
    coeff = zeta**sk * eta**tk / k
    cz = eta * zeta
    # The literal variant keeps the same prefactor but runs the
    # denominator from zeta to eta instead of eta to zeta.
    lo, d = (zeta, eta - zeta) if literal else (eta, zeta - eta)

    def f(x, omx):
        den = lo + d * x
        return den**-sig * E(-v * (cz * x * omx / (den * den)) ** k)

    res = integrate_01_singular(
        f, sk - 1.0, tk - 1.0, _rescaled(config, abs(coeff))
    )
    if literal:
        mass = abs(coeff) * min(eta, zeta) ** -sig * _beta_weight_mass(s, t, k)
    else:
        mass = _beta_weight_mass(s, t, k) / k
    return [(coeff, res)], mass


def _shifted_two_parameter(rep, s, t, v, k, sk, tk, E, config, literal):
    zeta, xi = float(rep.zeta), float(rep.xi)
    top = zeta + xi
    sig = sk + tk
    coeff = top**sk * zeta**tk / (1.0 if literal else k)
    cz = top * zeta

    if literal:
        # Denominator of the kernel argument printed as (eta - xi*u)**2
        # with eta left unbound; completing eta := zeta + xi makes it
        # (zeta + xi*(1-u))**2.
        def f(x, omx):
            den = zeta + xi * x
            dml = zeta + xi * omx
            return den**-sig * E(-v * (cz * x * omx / (dml * dml)) ** k)

        mass = abs(coeff) * min(zeta, top) ** -sig * _beta_weight_mass(s, t, k)
    else:

        def f(x, omx):
            den = zeta + xi * x
            return den**-sig * E(-v * (cz * x * omx / (den * den)) ** k)

        mass = _beta_weight_mass(s, t, k) / k
    res = integrate_01_singular(
        f, sk - 1.0, tk - 1.0, _rescaled(config, abs(coeff))
    )
    return [(coeff, res)], mass


def _interval(rep, s, t, v, k, sk, tk, E, config, literal):
    eta, zeta = float(rep.eta), float(rep.zeta)
    width = zeta - eta
    inv2 = 1.0 / (width * width)

    def f(u, uma, bmu):
        return E(-v * (uma * bmu * inv2) ** k)

    if literal:
        e = tk - 1.0
        er = round(e)
        if abs(e - er) > 1e-12:
            raise DomainError(
                "literal Interval integrand contains (eta - u)**(t/k - 1) "
                "with eta - u < 0 on the interior and noninteger exponent "
                f"t/k - 1 = {e:.6g}; it is undefined as stated"
            )
        alpha = sk + tk - 2.0
        if alpha <= -1.0:
            raise DomainError(
                "literal Interval integrand has a nonintegrable singularity "
                f"at eta: exponent s/k + t/k - 2 = {alpha:.6g} <= -1"
            )
        sign = -1.0 if er % 2 else 1.0
        coeff = sign * width ** (1.0 - sk - tk)
        res = integrate_interval(
            f, eta, zeta, alpha, 0.0, _rescaled(config, abs(coeff))
        )
        mass = abs(coeff) * width ** (alpha + 1.0) / (alpha + 1.0)
        return [(coeff, res)], mass
    coeff = width ** (1.0 - sk - tk) / k
    res = integrate_interval(
        f, eta, zeta, sk - 1.0, tk - 1.0, _rescaled(config, abs(coeff))
    )
    return [(coeff, res)], _beta_weight_mass(s, t, k) / k


def _symmetric_interval(rep, s, t, v, k, sk, tk, E, config, literal):
    coeff = 2.0 ** (1.0 - sk - tk) / (1.0 if literal else k)

    def f(u, uma, bmu):
        return E(-v * (uma * bmu * 0.25) ** k)

    res = integrate_interval(
        f, -1.0, 1.0, sk - 1.0, tk - 1.0, _rescaled(config, abs(coeff))
    )
    mass = _beta_weight_mass(s, t, k) / (1.0 if literal else k)
    return [(coeff, res)], mass


def _evaluate(
    rep: Representation,
    args: ExtBetaArgs,
    params: MLParams,
    config: QuadConfig,
    series: SeriesConfig,
    literal: bool,
) -> EvalResult:
    if not isinstance(rep, Representation):
        raise DomainError(f"rep must be a Representation, got {rep!r}")
    args.validate()
    params.validate()
    if rep.tag is RepTag.DIRECT:
        return extended_beta_k(args.s, args.t, args.v, params, config, series)
    if literal and rep.tag is RepTag.TAN_SQUARED:
        raise DomainError(
            "literal TanSquared form contains an unbound symbol u inside "
            "its kernel argument; it cannot be evaluated as stated"
        )
    s, t, v = args.s, args.t, args.v
    k = params.k
    sk, tk = s / k, t / k
    if not literal:
        # Every corrected route keeps kernel arguments in [-v/4**k, 0].
        peak_arg = v * 4.0**-k
        if peak_arg > series.max_abs_argument * (1.0 + 1e-12):
            raise SeriesGuardError(
                f"kernel argument reaches -{peak_arg}, beyond the series "
                f"guard {series.max_abs_argument}"
            )
    state = {"emax": 0.0}
    E = _kernel(params, series, state)
    tag = rep.tag
    if tag is RepTag.TRIG:
        parts, mass = _trig(rep, s, t, v, k, sk, tk, E, config)
    elif tag is RepTag.POWER:
        parts, mass = _power(rep, s, t, v, k, sk, tk, E, config, literal)
    elif tag is RepTag.SCALED_INTERVAL:
        parts, mass = _scaled_interval(rep, s, t, v, k, sk, tk, E, config)
    elif tag is RepTag.RATIONAL_MAP:
        parts, mass = _rational_map(rep, s, t, v, k, sk, tk, E, config, literal)
    elif tag in (RepTag.HALF_LINE, RepTag.SYMMETRIZED_HALF_LINE):
        # The symmetrized integrand folds onto the same two unit pieces:
        # each power term contributes both pieces, and the doubled sum
        # cancels the halved prefactor exactly.
        parts, mass = _half_line(rep, s, t, v, k, sk, tk, E, config)
    elif tag is RepTag.SCALED_HALF_LINE:
        parts, mass = _scaled_half_line(rep, s, t, v, k, sk, tk, E, config)
    elif tag is RepTag.TAN_SQUARED:
        parts, mass = _tan_squared(rep, s, t, v, k, sk, tk, E, config)
    elif tag is RepTag.TWO_PARAMETER:
        parts, mass = _two_parameter(rep, s, t, v, k, sk, tk, E, config, literal)
    elif tag is RepTag.SHIFTED_TWO_PARAMETER:
        parts, mass = _shifted_two_parameter(
            rep, s, t, v, k, sk, tk, E, config, literal
        )
    elif tag is RepTag.INTERVAL:
        parts, mass = _interval(rep, s, t, v, k, sk, tk, E, config, literal)
    elif tag is RepTag.SYMMETRIC_INTERVAL:
        parts, mass = _symmetric_interval(
            rep, s, t, v, k, sk, tk, E, config, literal
        )
    else:  # pragma: no cover
        raise DomainError(f"unhandled representation tag {tag!r}")
    return _combine(parts, state["emax"] * mass, config)


def eval_representation(
    rep: Representation,
    args: ExtBetaArgs,
    params: MLParams,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
) -> EvalResult:
    """Evaluate the corrected form of a representation.

    All tags agree with Direct up to quadrature error; at v=0 each reduces
    to the classical beta value.  Payload validity is enforced by the
    Representation itself; argument validity by args.validate().
    """
    return _evaluate(rep, args, params, config, series, literal=False)


def paper_literal_representation(
    rep: Representation,
    args: ExtBetaArgs,
    params: MLParams,
    config: QuadConfig = DEFAULT_QUAD,
    series: SeriesConfig = DEFAULT_SERIES,
) -> EvalResult:
    """Evaluate the uncorrected textual form of a representation.

    Forms whose misprint leaves them well defined are integrated as
    stated, so the audit can measure the deviation from Direct.  Forms
    that are not well defined raise DomainError naming the defect:
    TanSquared (unbound symbol in the kernel argument), Interval with
    noninteger t/k - 1 (negative base under a fractional power) or with
    s/k + t/k <= 1 (divergent endpoint), and Power with n*(s/k - 1) <= -1
    (divergent endpoint).  Direct has no separate literal variant.
    """
    return _evaluate(rep, args, params, config, series, literal=True)
