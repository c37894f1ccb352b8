"""Domain types and contact-interface physics.

All quantities are SI (farads, ohms, metres, hertz, volts). Scenario files
may use scaled units; conversion happens in :mod:`eqshbc.scenario_io`.
"""

import enum
import math
from dataclasses import dataclass, fields
from typing import Optional

from .exceptions import ValidationError

#: Vacuum permittivity as used by the parallel-plate and critical-distance
#: estimates (F/m). Deliberately the rounded value, not CODATA.
EPS0 = 8.85e-12

#: Illustrative specific contact resistivity (ohm m^2): 1 cm^2 of skin contact
#: gives 1 kOhm. Not a measured value; override per study.
DEFAULT_RHO_C = 0.1

#: Signal-plate to ground-plate capacitance of a 2.5 cm radius disc wearable (F).
C_PP = 2.2e-12
#: Fringe capacitance range for the same device, position dependent (F).
C_F_RANGE = (0.65e-12, 0.85e-12)
#: Device ground to body capacitance on the transmit side, C_PP + C_F (F).
#: Only documented: the source resistance drop it would cause is neglected.
C_GB_TX_TYPICAL = 3e-12


class ScenarioKind(str, enum.Enum):
    OPEN_SPACE = "open-space"
    GROUNDED_METAL = "grounded-metal"
    FLOATING_METAL = "floating-metal"


class Interaction(str, enum.Enum):
    PROXIMITY = "proximity"
    TOUCH = "touch"


class TerminationKind(str, enum.Enum):
    CAPACITIVE = "capacitive"
    RESISTIVE = "resistive"


class ContactRegime(str, enum.Enum):
    TOUCH = "touch"
    NEAR_TOUCH = "near-touch"


def _check_nonnegative(name, value):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"{name} must be a real number, got {value!r}")
    if math.isnan(value) or value < 0:
        raise ValidationError(f"{name} must be >= 0, got {value!r}")


def _check_positive(name, value, allow_inf=False):
    _check_nonnegative(name, value)
    if value == 0 or (math.isinf(value) and not allow_inf):
        raise ValidationError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class CapacitanceProfile:
    """Raw lumped couplings of one physical situation (farads).

    ``c_x_tx``/``c_x_rx`` are the device return paths in open space,
    ``c_gm_tx``/``c_gm_rx``/``c_bm`` couple Tx ground, Rx ground and body to
    a nearby metal, ``c_mg`` couples that metal to earth, ``c_b`` is the
    body-to-earth capacitance, ``c_gb_rx`` the Rx ground to body (shadowing)
    term, ``c_l`` the receiver input load and ``c_c`` the direct Tx-Rx ground
    coupling.
    """

    c_x_tx: float = 0.0
    c_x_rx: float = 0.0
    c_gm_tx: float = 0.0
    c_gm_rx: float = 0.0
    c_b: float = 0.0
    c_bm: float = 0.0
    c_mg: float = 0.0
    c_gb_rx: float = 0.0
    c_l: float = 0.0
    c_c: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            _check_nonnegative(f.name, getattr(self, f.name))

    @property
    def metal_couplings(self):
        return (self.c_gm_tx, self.c_gm_rx, self.c_bm, self.c_mg)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


CAPACITANCE_NAMES = tuple(f.name for f in fields(CapacitanceProfile))


@dataclass(frozen=True)
class EffectiveCaps:
    """Net capacitances after folding metal couplings into each path."""

    c_ret_tx: float
    c_ret_rx: float
    c_body: float
    c_l_eff: float
    c_a: float


def derive_effective(profile):
    """Fold metal couplings into net return-path, body and load capacitances.

    Each field is a single sum of raw couplings::

        c_ret_tx = c_x_tx + c_gm_tx        c_body  = c_b + c_bm
        c_ret_rx = c_x_rx + c_gm_rx        c_l_eff = c_gb_rx + c_l
        c_a = c_mg + c_gm_rx + c_gm_tx + c_bm
    """
    if profile.c_b == 0 and profile.c_bm == 0:
        raise ValidationError("degenerate body: c_b and c_bm are both zero")
    return EffectiveCaps(
        c_ret_tx=profile.c_x_tx + profile.c_gm_tx,
        c_ret_rx=profile.c_x_rx + profile.c_gm_rx,
        c_body=profile.c_b + profile.c_bm,
        c_l_eff=profile.c_gb_rx + profile.c_l,
        c_a=profile.c_mg + profile.c_gm_rx + profile.c_gm_tx + profile.c_bm,
    )


def parallel_plate_cbm(d, area, eps_r=1.0):
    """Body-to-metal capacitance as a parallel plate (no fringing), in F."""
    if d <= 0:
        raise ValidationError(
            "plate distance must be > 0; model d = 0 as a touch with a ContactInterface"
        )
    if area <= 0:
        raise ValidationError(f"area must be > 0, got {area!r}")
    if eps_r < 1:
        raise ValidationError(f"eps_r must be >= 1, got {eps_r!r}")
    return EPS0 * eps_r * area / d


def contact_resistance(a_con, rho_c=DEFAULT_RHO_C):
    """Skin-metal contact resistance, inversely proportional to contact area."""
    _check_positive("a_con", a_con)
    _check_positive("rho_c", rho_c, allow_inf=True)
    return rho_c / a_con


@dataclass(frozen=True)
class ContactInterface:
    """Touch geometry and the resulting lumped contact elements.

    ``r_con`` must equal ``rho_c / a_con``; use :meth:`from_area` rather than
    filling it by hand. ``rho_c = inf`` models an ideal insulating touch
    (purely capacitive contact).
    """

    a_con: float
    rho_c: float
    r_con: float
    c_bm_touch: float

    def __post_init__(self):
        _check_positive("a_con", self.a_con)
        _check_positive("rho_c", self.rho_c, allow_inf=True)
        _check_positive("r_con", self.r_con, allow_inf=True)
        _check_positive("c_bm_touch", self.c_bm_touch)
        expected = self.rho_c / self.a_con
        if not math.isclose(self.r_con, expected, rel_tol=1e-9):
            raise ValidationError(
                f"r_con={self.r_con!r} inconsistent with rho_c/a_con={expected!r}"
            )

    @classmethod
    def from_area(cls, a_con, c_bm_touch, rho_c=DEFAULT_RHO_C):
        return cls(a_con, rho_c, contact_resistance(a_con, rho_c), c_bm_touch)

    @classmethod
    def from_resistance(cls, r_con, c_bm_touch, a_con=1e-4):
        """Build from a known contact resistance; rho_c is back-computed."""
        _check_positive("r_con", r_con, allow_inf=True)
        return cls(a_con, r_con * a_con, r_con, c_bm_touch)

    def with_area(self, a_con):
        """Same skin and gap, different area: R scales as 1/A, C as A."""
        scale = a_con / self.a_con
        return ContactInterface.from_area(a_con, self.c_bm_touch * scale, self.rho_c)


def contact_impedance(contact, f):
    """Complex impedance of the contact resistance in parallel with C_BM."""
    if f < 0:
        raise ValidationError(f"frequency must be >= 0, got {f!r}")
    omega = 2 * math.pi * f
    if math.isinf(contact.r_con):
        if f == 0:
            return complex(math.inf, 0.0)
        return 1 / (1j * omega * contact.c_bm_touch)
    return contact.r_con / (1 + 1j * omega * contact.r_con * contact.c_bm_touch)


def critical_distance(f, area, eps_r, r_con):
    """Gap at which the capacitive body-metal impedance equals R_con (m)."""
    for name, value in (("f", f), ("area", area), ("eps_r", eps_r), ("r_con", r_con)):
        _check_positive(name, value)
    return 2 * math.pi * f * EPS0 * eps_r * area * r_con


def classify_interaction(d, f, area, eps_r, r_con):
    """Touch when the gap is at or inside the critical distance."""
    if d < 0:
        raise ValidationError(f"distance must be >= 0, got {d!r}")
    if d <= critical_distance(f, area, eps_r, r_con):
        return ContactRegime.TOUCH
    return ContactRegime.NEAR_TOUCH


@dataclass(frozen=True)
class TerminationModel:
    """Receiver termination.

    Capacitive (high-impedance) termination uses the profile's ``c_l``;
    resistive termination replaces ``c_l`` with ``r_l`` in the network.
    """

    kind: TerminationKind = TerminationKind.CAPACITIVE
    r_l: Optional[float] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", TerminationKind(self.kind))
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        if self.kind is TerminationKind.RESISTIVE:
            if self.r_l is None:
                raise ValidationError("resistive termination needs r_l")
            _check_positive("r_l", self.r_l)
        elif self.r_l is not None:
            raise ValidationError("r_l is only valid for resistive termination")

    @classmethod
    def capacitive(cls):
        return cls(TerminationKind.CAPACITIVE)

    @classmethod
    def resistive(cls, r_l=50.0):
        return cls(TerminationKind.RESISTIVE, r_l)


@dataclass(frozen=True)
class Scenario:
    """One physical situation: metal kind, interaction, couplings, load."""

    kind: ScenarioKind
    interaction: Interaction
    profile: CapacitanceProfile
    contact: Optional[ContactInterface] = None
    termination: TerminationModel = TerminationModel()
    v_tx: float = 1.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", ScenarioKind(self.kind))
            object.__setattr__(self, "interaction", Interaction(self.interaction))
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        p = self.profile
        if p.c_b <= 0:
            raise ValidationError("c_b must be > 0: a body is always present")
        _check_nonnegative("v_tx", self.v_tx)
        if self.kind is ScenarioKind.OPEN_SPACE:
            if any(c != 0 for c in p.metal_couplings):
                raise ValidationError(
                    "open-space scenario requires c_gm_tx = c_gm_rx = c_bm = c_mg = 0"
                )
            if self.interaction is Interaction.TOUCH:
                raise ValidationError("touch needs a metal object; open space has none")
        if self.interaction is Interaction.TOUCH and self.contact is None:
            raise ValidationError("touch interaction requires a contact block")
        if self.interaction is Interaction.PROXIMITY and self.contact is not None:
            raise ValidationError("contact block is only valid for touch interaction")
        if self.termination.kind is TerminationKind.CAPACITIVE and p.c_gb_rx + p.c_l <= 0:
            raise ValidationError("capacitive termination needs c_gb_rx + c_l > 0")
