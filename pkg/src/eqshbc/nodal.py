"""Brute-force complex nodal analysis of the lumped body-channel network.

Every closed form in :mod:`eqshbc.transfer` can be checked against
:func:`solve`, which stamps the admittance matrix of a small netlist plus one
floating voltage source (modified nodal analysis) and solves it directly.
"""

import math
from collections import defaultdict
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import DegenerateNetworkError, ValidationError
from .model import Interaction, ScenarioKind, TerminationKind
from .transfer import ORACLE, ComplexTransfer

EARTH = "earth"
BODY = "body"
TX_GROUND = "tx-ground"
RX_GROUND = "rx-ground"
METAL = "metal"

CAPACITOR = "C"
RESISTOR = "R"

TX_PORT = (BODY, TX_GROUND)
RX_PORT = (BODY, RX_GROUND)

#: Allowed KCL imbalance relative to the largest branch current.
KCL_REL_TOL = 1e-12

#: Extended precision used for residuals (80-bit on x86; double elsewhere).
EXT = np.clongdouble


@dataclass(frozen=True)
class Branch:
    a: str
    b: str
    kind: str
    value: float
    name: str = ""

    def admittance(self, f):
        if self.kind == CAPACITOR:
            return 2j * math.pi * f * self.value
        return complex(1 / self.value)


@dataclass(frozen=True)
class Source:
    """Ideal voltage source: V(pos) - V(neg) = amplitude."""

    pos: str
    neg: str
    amplitude: float = 1.0


@dataclass(frozen=True)
class Netlist:
    nodes: tuple
    branches: tuple
    source: Source
    reference: str = EARTH

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "branches", tuple(self.branches))
        names = set(self.nodes)
        if len(names) != len(self.nodes):
            raise ValidationError("duplicate node names")
        if self.reference not in names:
            raise ValidationError(f"reference node {self.reference!r} not in netlist")
        for br in self.branches:
            if br.a not in names or br.b not in names:
                raise ValidationError(f"branch {br.name or br} references an unknown node")
            if br.a == br.b:
                raise ValidationError(f"branch {br.name or br} is a self loop")
            if br.kind not in (CAPACITOR, RESISTOR):
                raise ValidationError(f"unknown element kind {br.kind!r}")
            if not br.value > 0:
                raise ValidationError(f"branch {br.name or br} must have a value > 0")
        src = self.source
        if src.pos not in names or src.neg not in names or src.pos == src.neg:
            raise ValidationError("source must connect two distinct known nodes")
        isolated = _unreachable(self, lambda br: True)
        if isolated:
            raise DegenerateNetworkError(
                f"nodes not connected to {self.reference!r}: {sorted(isolated)}", isolated
            )

    def incident(self, node):
        return [br for br in self.branches if node in (br.a, br.b)]

    def with_source(self, pos, neg, amplitude=None):
        amp = self.source.amplitude if amplitude is None else amplitude
        return replace(self, source=Source(pos, neg, amp))


def _unreachable(netlist, keep):
    """Nodes with no path to the reference through kept branches or the source."""
    adj = defaultdict(set)
    for br in netlist.branches:
        if keep(br):
            adj[br.a].add(br.b)
            adj[br.b].add(br.a)
    adj[netlist.source.pos].add(netlist.source.neg)
    adj[netlist.source.neg].add(netlist.source.pos)
    seen = {netlist.reference}
    stack = [netlist.reference]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return set(netlist.nodes) - seen


def _parallel_contact(a, b, scenario):
    contact = scenario.contact
    out = [Branch(a, b, CAPACITOR, contact.c_bm_touch, "C_BM")]
    if not math.isinf(contact.r_con):
        out.append(Branch(a, b, RESISTOR, contact.r_con, "R_con"))
    return out


def build_netlist(scenario):
    """Fixed-topology netlist for a scenario.

    Nodes are earth, body, tx-ground, rx-ground and, for floating metal,
    metal. The transmitter drives body against tx-ground; the receiver reads
    body against rx-ground. Grounded metal is merged with earth. Zero-valued
    couplings are left out.
    """
    p = scenario.profile
    nodes = [EARTH, BODY, TX_GROUND, RX_GROUND]
    branches = []

    def cap(a, b, value, name):
        if value > 0:
            branches.append(Branch(a, b, CAPACITOR, value, name))

    cap(TX_GROUND, EARTH, p.c_x_tx, "C_xTx")
    cap(RX_GROUND, EARTH, p.c_x_rx, "C_xRx")
    cap(BODY, EARTH, p.c_b, "C_B")
    cap(BODY, RX_GROUND, p.c_gb_rx, "C_GBRx")
    if scenario.termination.kind is TerminationKind.RESISTIVE:
        branches.append(Branch(BODY, RX_GROUND, RESISTOR, scenario.termination.r_l, "R_L"))
    else:
        cap(BODY, RX_GROUND, p.c_l, "C_L")
    cap(TX_GROUND, RX_GROUND, p.c_c, "C_C")

    if scenario.kind is not ScenarioKind.OPEN_SPACE:
        metal = EARTH
        if scenario.kind is ScenarioKind.FLOATING_METAL:
            metal = METAL
            nodes.append(METAL)
            cap(METAL, EARTH, p.c_mg, "C_MG")
        cap(TX_GROUND, metal, p.c_gm_tx, "C_GMTx")
        cap(RX_GROUND, metal, p.c_gm_rx, "C_GMRx")
        if scenario.interaction is Interaction.TOUCH:
            branches.extend(_parallel_contact(BODY, metal, scenario))
        else:
            cap(BODY, metal, p.c_bm, "C_BM")

    source = Source(BODY, TX_GROUND, scenario.v_tx if scenario.v_tx > 0 else 1.0)
    return Netlist(tuple(nodes), tuple(branches), source, EARTH)


@dataclass(frozen=True)
class NodalSolution:
    voltages: dict
    f: float
    source_current: complex
    kcl_residual: float
    max_branch_current: float

    @property
    def kcl_relative(self):
        if self.max_branch_current == 0:
            return self.kcl_residual
        return self.kcl_residual / self.max_branch_current

    def v(self, a, b=None):
        return self.voltages[a] - (self.voltages[b] if b is not None else 0)


def _unknown_index(netlist):
    return {n: i for i, n in enumerate(n for n in netlist.nodes if n != netlist.reference)}


def _stamp(netlist, f, idx, size, dtype=complex):
    ys = [br.admittance(f) for br in netlist.branches]
    scale = max((abs(y) for y in ys), default=1.0) or 1.0
    mat = np.zeros((size, size), dtype=dtype)
    for br, y in zip(netlist.branches, ys):
        y = dtype(y) / dtype(scale)
        ia, ib = idx.get(br.a), idx.get(br.b)
        if ia is not None:
            mat[ia, ia] += y
        if ib is not None:
            mat[ib, ib] += y
        if ia is not None and ib is not None:
            mat[ia, ib] -= y
            mat[ib, ia] -= y
    return mat, ys, scale


def _refined_solve(mat, mat_ext, rhs, what):
    """LU solve plus one refinement step with an extended-precision residual.

    Admittances spanning many decades leave the small branch currents with
    only eps * (largest current) absolute accuracy after a plain solve; the
    refinement step recovers them. Where ``longdouble`` is plain double the
    step is harmless.
    """
    try:
        x = np.linalg.solve(mat, rhs).astype(EXT)
        r = rhs.astype(EXT) - mat_ext @ x
        x = x + np.linalg.solve(mat, r.astype(complex))
    except np.linalg.LinAlgError:
        raise DegenerateNetworkError(f"singular {what}") from None
    if not np.all(np.isfinite(x)):
        raise DegenerateNetworkError(f"non-finite solution of {what}")
    return x


def _check_dc(netlist, f):
    if f < 0:
        raise ValidationError(f"frequency must be >= 0, got {f!r}")
    if f == 0:
        isolated = _unreachable(netlist, lambda br: br.kind == RESISTOR)
        if isolated:
            raise DegenerateNetworkError(
                f"no DC path to {netlist.reference!r} from {sorted(isolated)}; "
                "capacitor-only networks need f > 0",
                isolated,
            )


def solve(netlist, f):
    """Solve node voltages at frequency ``f`` (Hz).

    Admittances are normalized by the largest branch admittance before the
    dense LU solve (partial pivoting); one step of iterative refinement with
    an extended-precision residual follows. The KCL residual is evaluated
    in the same extended precision.
    """
    _check_dc(netlist, f)
    idx = _unknown_index(netlist)
    n = len(idx)
    mat, ys, scale = _stamp(netlist, f, idx, n + 1)
    mat_ext, _, _ = _stamp(netlist, f, idx, n + 1, EXT)
    src = netlist.source
    rhs = np.zeros(n + 1, dtype=complex)
    for node, sign in ((src.pos, 1), (src.neg, -1)):
        i = idx.get(node)
        if i is not None:
            mat[i, n] += sign
            mat[n, i] += sign
            mat_ext[i, n] += sign
            mat_ext[n, i] += sign
    rhs[n] = src.amplitude
    x = _refined_solve(mat, mat_ext, rhs, f"nodal matrix at f={f!r} Hz")

    volts = {netlist.reference: EXT(0)}
    volts.update({node: x[i] for node, i in idx.items()})
    i_src = x[n] * EXT(scale)

    # KCL: current leaving each node through branches plus the source branch
    imbalance = defaultdict(EXT)
    max_branch = 0.0
    for br, y in zip(netlist.branches, ys):
        i_br = EXT(y) * (volts[br.a] - volts[br.b])
        imbalance[br.a] += i_br
        imbalance[br.b] -= i_br
        max_branch = max(max_branch, float(abs(i_br)))
    imbalance[src.pos] += i_src
    imbalance[src.neg] -= i_src
    residual = max((float(abs(v)) for v in imbalance.values()), default=0.0)
    return NodalSolution(
        {k: complex(v) for k, v in volts.items()}, f, complex(i_src), residual, max_branch
    )


def transfer(netlist, f, output=RX_PORT):
    """Voltage across ``output`` divided by the source amplitude."""
    sol = solve(netlist, f)
    return ComplexTransfer(sol.v(*output) / netlist.source.amplitude, f, ORACLE)


def scenario_transfer(scenario, f):
    """Oracle transfer for a scenario at the receiver port."""
    return transfer(build_netlist(scenario), f, RX_PORT)


def transimpedance(netlist, f, drive, sense):
    """Open-circuit voltage at ``sense`` per unit current injected at ``drive``.

    The voltage source is removed (shorted ports would change the network);
    only the passive branches remain.
    """
    _check_dc(netlist, f)
    idx = _unknown_index(netlist)
    n = len(idx)
    mat, _, scale = _stamp(netlist, f, idx, n)
    mat_ext, _, _ = _stamp(netlist, f, idx, n, EXT)
    rhs = np.zeros(n, dtype=complex)
    for node, sign in ((drive[0], 1), (drive[1], -1)):
        if node in idx:
            rhs[idx[node]] += sign
    x = (_refined_solve(mat, mat_ext, rhs, f"passive network at f={f!r} Hz") / EXT(scale)).astype(complex)
    volts = {netlist.reference: 0j}
    volts.update({node: complex(x[i]) for node, i in idx.items()})
    return volts[sense[0]] - volts[sense[1]]


def reciprocity_check(netlist, f, port1=None, port2=RX_PORT):
    """Transimpedance asymmetry |Z21 - Z12| between two ports, made relative.

    The scale is max(|Z21|, sqrt(|Z11 Z22|)); the self-impedance term keeps
    the ratio meaningful when the ports are nearly decoupled (Z21 ~ 0).
    """
    if port1 is None:
        port1 = (netlist.source.pos, netlist.source.neg)
    z21 = transimpedance(netlist, f, port1, port2)
    z12 = transimpedance(netlist, f, port2, port1)
    z11 = transimpedance(netlist, f, port1, port1)
    z22 = transimpedance(netlist, f, port2, port2)
    scale = max(abs(z21), math.sqrt(abs(z11) * abs(z22)))
    return abs(z21 - z12) / scale


def voltage_transfers(netlist, f, rx_port=RX_PORT):
    """Forward and reverse voltage transfer between the source port and ``rx_port``.

    Forward drives the source port and reads ``rx_port``; reverse moves the
    source onto ``rx_port`` and reads the original source port. Unequal
    terminations make these differ even though the network is reciprocal.
    """
    tx_port = (netlist.source.pos, netlist.source.neg)
    forward = transfer(netlist, f, rx_port)
    reverse = transfer(netlist.with_source(*rx_port), f, tx_port)
    return forward, reverse
