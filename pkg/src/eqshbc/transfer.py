"""Closed-form channel transfer functions and their sensitivities.

Two families live here. The divider approximations (``tf_ntgm``,
``tf_tgm``, ``channel_loss_*``) assume the return-path impedances dominate
the body and load impedances; they are tagged ``"approximate"``. The
floating-metal forms (``tf_ntfm``, ``tf_tfm``) eliminate the KCL system
exactly and are tagged ``"exact"``; they must match :mod:`eqshbc.nodal`.
"""

import cmath
import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .exceptions import SingularConfigurationError, ValidationError
from .model import (
    EffectiveCaps,
    Interaction,
    ScenarioKind,
    TerminationKind,
    derive_effective,
)

APPROXIMATE = "approximate"
EXACT = "exact"
ORACLE = "oracle"


@dataclass(frozen=True)
class ComplexTransfer:
    """Voltage transfer V_Rx / V_Tx at one frequency."""

    value: complex
    f: float
    variant: str = APPROXIMATE

    @property
    def magnitude(self):
        return abs(self.value)

    @property
    def mag_db(self):
        mag = abs(self.value)
        return 20 * math.log10(mag) if mag > 0 else -math.inf

    @property
    def loss_db(self):
        return -self.mag_db

    @property
    def phase_deg(self):
        return math.degrees(cmath.phase(self.value))


def _s(f):
    return 2j * math.pi * f


def body_potential_open(profile, v_tx):
    """Induced body potential in open space, (c_x_tx / c_b) * v_tx."""
    if profile.c_b <= 0:
        raise ValidationError("c_b must be > 0")
    return profile.c_x_tx / profile.c_b * v_tx


def _loss_db(ratio):
    if ratio <= 0:
        return math.inf
    return -20 * math.log10(ratio)


def _coupled_ratio(c_ret_tx, c_ret_rx, c_body, c_l_eff, c_c=0.0):
    denom = c_c + c_l_eff
    if c_body <= 0 or denom <= 0:
        raise SingularConfigurationError("c_body and c_c + c_l_eff must be > 0")
    return (c_c + c_ret_tx * c_ret_rx / c_body) / denom


def channel_loss_open(profile):
    """Open-space channel loss in dB (20 log10 of the voltage ratio).

    The ratio (c_x_tx / c_b)(c_x_rx / c_l_eff) is evaluated in the same
    operation order as :func:`grounded_ratio`, so the grounded loss reduces
    to this one bit for bit when every metal coupling is zero.
    """
    c_l_eff = profile.c_gb_rx + profile.c_l
    return _loss_db(_coupled_ratio(profile.c_x_tx, profile.c_x_rx, profile.c_b, c_l_eff))


def grounded_ratio(effective, c_c=0.0):
    """Voltage ratio behind :func:`channel_loss_grounded`, including C_C."""
    e = effective
    return _coupled_ratio(e.c_ret_tx, e.c_ret_rx, e.c_body, e.c_l_eff, c_c)


def channel_loss_grounded(effective, profile):
    """Channel loss near grounded metal in dB, with inter-device coupling."""
    return _loss_db(grounded_ratio(effective, profile.c_c))


def tf_ntgm(effective, f):
    """Proximity to grounded metal: flat-band capacitive divider product."""
    if effective.c_body <= 0 or effective.c_l_eff <= 0:
        raise SingularConfigurationError("c_body and c_l_eff must be > 0")
    value = (effective.c_ret_tx / effective.c_body) * (effective.c_ret_rx / effective.c_l_eff)
    return ComplexTransfer(complex(value, 0.0), f, APPROXIMATE)


def tf_tgm(effective, contact, f):
    """Touching grounded metal: first-order high-pass through R_con || C_BM.

    Returns a zero transfer at f = 0 (the contact resistance shorts the body
    to earth at DC).
    """
    if f < 0:
        raise ValidationError(f"frequency must be >= 0, got {f!r}")
    if f == 0:
        return ComplexTransfer(0j, f, APPROXIMATE)
    s = _s(f)
    leak = 0.0 if math.isinf(contact.r_con) else effective.c_l_eff / (s * contact.r_con)
    denom = effective.c_l_eff * contact.c_bm_touch + leak
    return ComplexTransfer(effective.c_ret_tx * effective.c_ret_rx / denom, f, APPROXIMATE)


def cutoff_frequency(contact):
    """Corner frequency 1 / (2 pi R_con C_BM) of the touch high-pass, in Hz."""
    return 1 / (2 * math.pi * contact.r_con * contact.c_bm_touch)


def tgm_asymptote(effective, contact):
    """High-frequency limit of |tf_tgm|."""
    return effective.c_ret_tx * effective.c_ret_rx / (effective.c_l_eff * contact.c_bm_touch)


def metal_potential(profile, v_b, v_r, v_t):
    """Induced potential of a floating metal from body and device grounds."""
    c_a = profile.c_mg + profile.c_gm_rx + profile.c_gm_tx + profile.c_bm
    if c_a <= 0:
        raise SingularConfigurationError("c_a must be > 0")
    return (profile.c_bm * v_b + profile.c_gm_rx * v_r + profile.c_gm_tx * v_t) / c_a


@dataclass(frozen=True)
class FloatingCoefficients:
    """Elimination coefficients of the floating-metal KCL system.

    With V_B, V_T, V_R, V_M the body, Tx-ground, Rx-ground and metal
    potentials::

        A V_B = D V_M + F V_R        (metal node, V_T eliminated)
        V_M   = S V_B + R V_R        (Rx ground node)
        V_Tx  = U V_B + T V_R        (source, earth balance without C_MG)

    ``w = c_mg / c_x_tx`` and ``d_leak = s Z_BM c_gm_tx w`` carry the current
    that the metal returns to earth through C_MG. Dropping them reproduces
    the commonly quoted reduced form, which is only exact when C_MG V_M is
    negligible.
    """

    a: complex
    d_coef: complex
    f_coef: complex
    s_coef: float
    r_coef: float
    u: float
    t: float
    w: float = 0.0
    d_leak: complex = 0j

    def ratio(self, metal_earth_current=True):
        """V_R / V_B."""
        d = self.d_coef + self.d_leak if metal_earth_current else self.d_coef
        denom = d * self.r_coef + self.f_coef
        if denom == 0:
            raise SingularConfigurationError("D R + F = 0: singular floating configuration")
        return (self.a - d * self.s_coef) / denom

    def transfer(self, metal_earth_current=True):
        """V_Rx / V_Tx = (V_B - V_R) / (V_B - V_T)."""
        k = self.ratio(metal_earth_current)
        u, t = self.u, self.t
        if metal_earth_current:
            u = u + self.w * self.s_coef
            t = t + self.w * self.r_coef
        denom = u + t * k
        if denom == 0:
            raise SingularConfigurationError("source-side denominator vanished")
        return (1 - k) / denom


def floating_coefficients(profile, z_bm, f, sign_convention="derived"):
    """Coefficients of the floating-metal elimination at s = j 2 pi f.

    ``sign_convention="derived"`` uses S < 0 and R > 0, the signs that follow
    from the Rx-ground KCL. ``"flipped"`` negates both; it disagrees with the
    nodal solution and exists only so that comparison can be shown.
    """
    if profile.c_x_tx <= 0:
        raise SingularConfigurationError("c_x_tx must be > 0 for the floating closed form")
    if profile.c_gm_rx <= 0:
        raise SingularConfigurationError(
            "c_gm_rx = 0 makes S and R undefined; use the nodal solver instead"
        )
    s = _s(f)
    c_l_eff = profile.c_gb_rx + profile.c_l
    a = 1 - s * profile.c_gm_tx * z_bm * profile.c_b / profile.c_x_tx
    f_coef = (s * profile.c_gm_tx * profile.c_x_rx / profile.c_x_tx - s * profile.c_gm_rx) * z_bm
    d_coef = 1 + s * (profile.c_gm_rx + profile.c_gm_tx + profile.c_mg) * z_bm
    s_coef = -c_l_eff / profile.c_gm_rx
    r_coef = (profile.c_x_rx + c_l_eff + profile.c_gm_rx) / profile.c_gm_rx
    if sign_convention == "flipped":
        s_coef, r_coef = -s_coef, -r_coef
    elif sign_convention != "derived":
        raise ValueError(f"unknown sign convention {sign_convention!r}")
    w = profile.c_mg / profile.c_x_tx
    return FloatingCoefficients(
        a=a,
        d_coef=d_coef,
        f_coef=f_coef,
        s_coef=s_coef,
        r_coef=r_coef,
        u=1 + profile.c_b / profile.c_x_tx,
        t=profile.c_x_rx / profile.c_x_tx,
        w=w,
        d_leak=s * z_bm * profile.c_gm_tx * w,
    )


def floating_polynomials(profile, c_bm_eff):
    """Numerator and denominator of the exact floating-metal transfer.

    Expanding the coefficient elimination and clearing denominators leaves
    two polynomials in the capacitances whose terms are all positive
    products, so they are evaluated without subtractive cancellation.
    ``c_bm_eff`` is the body-metal admittance divided by s: ``c_bm`` in
    proximity, ``c_bm_touch + 1 / (s R_con)`` for a touch. With
    x, y, g, h, b, m, l = c_x_tx, c_x_rx, c_gm_tx, c_gm_rx, c_b, c_mg, c_l_eff
    and c = c_bm_eff::

        num = c x y + g (h (b + m + x + y) + y (m + x)) + x (h y + m (h + y))
        den = c ((b + m)(h + l + y) + P) + b ((g + m)(h + l + y) + h l + h y)
              + g (m (h + l + y) + P) + h l (x + y) + h x y
              + m (h l + h x + l x + l y + x y)

    where P = (h + l)(x + y) + x y. The transfer is num / den.
    """
    x, y = profile.c_x_tx, profile.c_x_rx
    g, h = profile.c_gm_tx, profile.c_gm_rx
    b, m = profile.c_b, profile.c_mg
    l_ = profile.c_gb_rx + profile.c_l
    c = c_bm_eff
    hly = h + l_ + y
    p = (h + l_) * (x + y) + x * y
    num = c * x * y + g * (h * (b + m + x + y) + y * (m + x)) + x * (h * y + m * (h + y))
    den = (
        c * ((b + m) * hly + p)
        + b * ((g + m) * hly + h * l_ + h * y)
        + g * (m * hly + p)
        + h * l_ * (x + y)
        + h * x * y
        + m * (h * l_ + h * x + l_ * x + l_ * y + x * y)
    )
    return num, den


def _floating_transfer(profile, c_bm_eff, f, metal_earth_current, sign_convention):
    if f <= 0:
        raise ValidationError("floating-metal closed form needs f > 0")
    if profile.c_c != 0:
        raise SingularConfigurationError(
            "floating closed form assumes c_c = 0; use the nodal solver"
        )
    if metal_earth_current and sign_convention == "derived":
        num, den = floating_polynomials(profile, c_bm_eff)
        if den == 0:
            raise SingularConfigurationError("floating network has no return path")
        return ComplexTransfer(complex(num / den), f, EXACT)
    coefs = floating_coefficients(profile, 1 / (_s(f) * c_bm_eff), f, sign_convention)
    return ComplexTransfer(complex(coefs.transfer(metal_earth_current)), f, APPROXIMATE)


def tf_ntfm(profile, f, metal_earth_current=True, sign_convention="derived"):
    """Proximity to floating metal, Z_BM = 1 / (s c_bm). Exact by default.

    The default evaluates :func:`floating_polynomials`. The other options go
    through :func:`floating_coefficients` and are tagged approximate.
    """
    if profile.c_bm <= 0:
        raise SingularConfigurationError("c_bm must be > 0 for the floating closed form")
    return _floating_transfer(profile, profile.c_bm, f, metal_earth_current, sign_convention)


def tf_tfm(profile, contact, f, metal_earth_current=True, sign_convention="derived"):
    """Touching floating metal: Z_BM replaced by the contact impedance."""
    if f <= 0:
        raise ValidationError("floating-metal closed form needs f > 0")
    c_eff = complex(contact.c_bm_touch)
    if not math.isinf(contact.r_con):
        c_eff += 1 / (_s(f) * contact.r_con)
    return _floating_transfer(profile, c_eff, f, metal_earth_current, sign_convention)


def body_potential_touching_metal(c_x_tx, c_btm, v_tx):
    """Body potential while touching metal, with c_btm the body+metal to earth."""
    if c_btm <= 0:
        raise ValidationError("c_btm must be > 0")
    return c_x_tx / c_btm * v_tx


def divider_transfer(effective):
    """Series-divider channel gain used for the sensitivity analysis.

    T = c_ret_tx / (c_ret_tx + c_body) * c_ret_rx / (c_ret_rx + c_l_eff)
    """
    return _tx_stage(effective) * _rx_stage(effective)


def _tx_stage(e):
    return e.c_ret_tx / (e.c_ret_tx + e.c_body)


def _rx_stage(e):
    return e.c_ret_rx / (e.c_ret_rx + e.c_l_eff)


SENSITIVITY_TARGETS = ("c_ret_tx", "c_body", "c_ret_rx", "c_l_eff")


@dataclass(frozen=True)
class SensitivityReport:
    """Relative sensitivities (C/T) dT/dC and plain partials dT/dC (1/F)."""

    s_ret_tx: float
    s_body: float
    s_ret_rx: float
    s_l_eff: float
    d_ret_tx: float
    d_body: float
    d_ret_rx: float
    d_l_eff: float

    def relative(self, which):
        return getattr(self, "s_" + which.removeprefix("c_"))

    def partial(self, which):
        return getattr(self, "d_" + which.removeprefix("c_"))


def sensitivities(effective):
    """Analytic sensitivities of :func:`divider_transfer`.

    The Tx pair and the Rx pair are equal and opposite because each stage is
    a ratio of capacitances (scale invariant).
    """
    e = effective
    if min(e.c_ret_tx, e.c_body, e.c_ret_rx, e.c_l_eff) <= 0:
        raise ValidationError("all effective capacitances must be > 0")
    tx_sum = e.c_ret_tx + e.c_body
    rx_sum = e.c_ret_rx + e.c_l_eff
    s_ret_tx = e.c_body / tx_sum
    s_ret_rx = e.c_l_eff / rx_sum
    tx, rx = _tx_stage(e), _rx_stage(e)
    return SensitivityReport(
        s_ret_tx=s_ret_tx,
        s_body=-s_ret_tx,
        s_ret_rx=s_ret_rx,
        s_l_eff=-s_ret_rx,
        d_ret_tx=rx * e.c_body / tx_sum**2,
        d_body=-rx * e.c_ret_tx / tx_sum**2,
        d_ret_rx=tx * e.c_l_eff / rx_sum**2,
        d_l_eff=-tx * e.c_ret_rx / rx_sum**2,
    )


def finite_difference_sensitivity(effective, which, rel_step=1e-6, exact=True):
    """Central-difference estimate of (C/T) dT/dC on :func:`divider_transfer`.

    With ``exact`` the difference quotient is evaluated in rational
    arithmetic, so only the O(rel_step^2) truncation error remains. In
    floating point the cancellation error grows like eps / (rel_step * S)
    and swamps small sensitivities S.
    """
    if which not in SENSITIVITY_TARGETS:
        raise ValueError(f"which must be one of {SENSITIVITY_TARGETS}, got {which!r}")
    if not 0 < rel_step <= 1e-2:
        raise ValueError("rel_step must be in (0, 1e-2]")
    if exact:
        effective = EffectiveCaps(**{k: Fraction(v) for k, v in vars(effective).items()})
        rel_step = Fraction(rel_step)
    c0 = getattr(effective, which)
    h = c0 * rel_step
    up = divider_transfer(replace(effective, **{which: c0 + h}))
    down = divider_transfer(replace(effective, **{which: c0 - h}))
    return float(c0 / divider_transfer(effective) * (up - down) / (2 * h))


def closed_form_transfer(scenario, f):
    """Closed-form transfer for a scenario, dispatched on kind and interaction.

    Open space and grounded proximity include the inter-device coupling
    ``c_c``. Resistive termination has no closed form here.
    """
    if scenario.termination.kind is TerminationKind.RESISTIVE:
        raise ValidationError(
            "closed forms assume capacitive termination; use --model oracle"
        )
    profile = scenario.profile
    if scenario.kind is ScenarioKind.FLOATING_METAL:
        if scenario.interaction is Interaction.TOUCH:
            return tf_tfm(profile, scenario.contact, f)
        return tf_ntfm(profile, f)
    effective = derive_effective(profile)
    if scenario.interaction is Interaction.TOUCH:
        return tf_tgm(effective, scenario.contact, f)
    value = grounded_ratio(effective, profile.c_c)
    return ComplexTransfer(complex(value, 0.0), f, APPROXIMATE)
