"""Link-level performance: SNR, Shannon capacity, Eb/N0 and ideal BER."""

import math
import re
from dataclasses import dataclass

from .exceptions import ValidationError

#: Receiver input noise density (5 nV/sqrt(Hz))^2 in V^2/Hz.
DEFAULT_N0 = (5e-9) ** 2
DEFAULT_BANDWIDTH = 5e6

PROVENANCE_COMPUTED = "computed-from-transfer"
PROVENANCE_STATED = "stated-snr"


@dataclass(frozen=True)
class Modulation:
    """OOK, QPSK or square M-QAM (``order`` only used for M-QAM)."""

    kind: str
    order: int = 2

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        if kind == "OOK":
            object.__setattr__(self, "order", 2)
        elif kind == "QPSK":
            object.__setattr__(self, "order", 4)
        elif kind == "MQAM":
            root = math.isqrt(self.order)
            if self.order < 4 or root * root != self.order:
                raise ValidationError(
                    f"M-QAM order must be a perfect square >= 4, got {self.order}"
                )
        else:
            raise ValidationError(f"unsupported modulation {self.kind!r}")

    @classmethod
    def parse(cls, text):
        """Accept 'OOK', 'QPSK', '16-QAM', '16QAM' or 'MQAM16'."""
        t = text.strip().upper()
        if t in ("OOK", "QPSK"):
            return cls(t)
        m = re.fullmatch(r"(\d+)-?QAM|MQAM-?(\d+)", t)
        if not m:
            raise ValidationError(f"unsupported modulation {text!r}")
        return cls("MQAM", int(m.group(1) or m.group(2)))

    def __str__(self):
        return f"{self.order}-QAM" if self.kind == "MQAM" else self.kind


OOK = Modulation("OOK")
QPSK = Modulation("QPSK")


@dataclass(frozen=True)
class LinkBudget:
    v_tx: float = 1.0
    n0: float = DEFAULT_N0
    bandwidth: float = DEFAULT_BANDWIDTH
    bit_rate: float = DEFAULT_BANDWIDTH
    modulation: Modulation = OOK

    def __post_init__(self):
        for name in ("v_tx", "n0", "bandwidth", "bit_rate"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValidationError(f"{name} must be finite and > 0, got {value!r}")
        if isinstance(self.modulation, str):
            object.__setattr__(self, "modulation", Modulation.parse(self.modulation))


@dataclass(frozen=True)
class LinkReport:
    snr_linear: float
    snr_db: float
    capacity: float
    gamma: float
    ber: float
    provenance: str = PROVENANCE_COMPUTED


def to_db(x):
    return 10 * math.log10(x) if x > 0 else -math.inf


def from_db(x_db):
    return 10 ** (x_db / 10)


def snr(transfer_magnitude, budget):
    """Received signal power |T V_tx|^2 over noise power N0 B."""
    return (transfer_magnitude * budget.v_tx) ** 2 / (budget.n0 * budget.bandwidth)


def capacity(snr_linear, bandwidth):
    """Shannon capacity in bits/s."""
    if snr_linear < 0:
        raise ValidationError("snr must be >= 0")
    return bandwidth * math.log2(1 + snr_linear)


def gamma(snr_linear, bandwidth, bit_rate):
    """Eb/N0 from SNR for a bit rate over the noise bandwidth."""
    if bit_rate <= 0:
        raise ValidationError("bit_rate must be > 0")
    return snr_linear * bandwidth / bit_rate


def q_function(x):
    """Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt(2))."""
    return 0.5 * math.erfc(x / math.sqrt(2))


def ber(modulation, gamma_):
    """Ideal coherent bit error rate at Eb/N0 = ``gamma_`` (linear)."""
    if gamma_ < 0:
        raise ValidationError("gamma must be >= 0")
    if isinstance(modulation, str):
        modulation = Modulation.parse(modulation)
    if modulation.kind == "OOK":
        return q_function(math.sqrt(gamma_))
    if modulation.kind == "QPSK":
        return q_function(math.sqrt(2 * gamma_))
    m = modulation.order
    k = math.log2(m)
    root = math.sqrt(m)
    return 4 * (root - 1) / (root * k) * q_function(math.sqrt(3 * gamma_ * k / (m - 1)))


def link_report(transfer_magnitude, budget, snr_db=None):
    """Compose SNR, capacity, Eb/N0 and BER.

    With ``snr_db`` given, the transfer magnitude is ignored and the stated
    SNR drives the rest of the chain (provenance ``stated-snr``).
    """
    if snr_db is None:
        snr_lin = snr(transfer_magnitude, budget)
        provenance = PROVENANCE_COMPUTED
    else:
        snr_lin = from_db(snr_db)
        provenance = PROVENANCE_STATED
    g = gamma(snr_lin, budget.bandwidth, budget.bit_rate)
    return LinkReport(
        snr_linear=snr_lin,
        snr_db=to_db(snr_lin),
        capacity=capacity(snr_lin, budget.bandwidth),
        gamma=g,
        ber=ber(budget.modulation, g),
        provenance=provenance,
    )
