"""Lowering of the typed gate set to single-qubit gates plus CNOT.

All rules are exact: no global phase is introduced, so a lowered circuit can be
wrapped in a control and lowered again without changing its meaning.

* SWAP becomes three CNOTs.
* A center-switch becomes its palindromic chain of multi-controlled X gates.
* Empty-dot controls are conjugated with X.
* Toffoli uses the standard six-CNOT construction with T and T-dagger.
* X with three or more controls is H, a multi-controlled phase of pi, H; the phase is
  expanded recursively without ancillas.
* A controlled gate is lowered by first lowering its inner gate and then controlling
  each basis gate.
"""

import math
from typing import List, Sequence, Tuple

import structlog

from tridiag_vqls.circuits import Circuit
from tridiag_vqls.gates import (
    RY,
    CenterSwitch,
    Controlled,
    Gate,
    GateDefinitionError,
    Hadamard,
    MultiControlledX,
    PauliGate,
    Phase,
    Swap,
    UnknownGateError,
    cx,
)

logger = structlog.get_logger()


def center_switch_path(span: int) -> List[int]:
    """Bitstrings from ``011...1`` to ``100...0`` changing one bit per step.

    Bits ``span-2`` down to ``0`` are cleared first, then bit ``span-1`` is set.
    """
    if span < 2:
        raise GateDefinitionError(f"Center-switch span must be at least 2, got {span}")
    state = (1 << (span - 1)) - 1
    path = [state]
    for bit in reversed(range(span - 1)):
        state &= ~(1 << bit)
        path.append(state)
    path.append(state | (1 << (span - 1)))
    return path


def _transposition_gate(a: int, b: int, span: int, low: int) -> MultiControlledX:
    changed = (a ^ b).bit_length() - 1
    controls = tuple(
        (low + bit, (a >> bit) & 1)
        for bit in range(span)
        if bit != changed
    )
    return MultiControlledX(controls=controls, target=low + changed)


def lower_center_switch(span: int, low: int = 0) -> Circuit:
    """The center-switch on qubits ``low .. low+span-1`` as ``2*span - 1`` multi-controlled X gates.

    Each gate is one transposition between neighbouring bitstrings of
    :func:`center_switch_path`; the chain runs out to ``100...0`` and back.
    """
    path = center_switch_path(span)
    steps = [_transposition_gate(a, b, span, low) for a, b in zip(path, path[1:])]
    gates = steps + steps[-2::-1]
    return Circuit(n=low + span, gates=tuple(gates))


def _toffoli(a: int, b: int, target: int) -> List[Gate]:
    t = math.pi / 4
    return [
        Hadamard(qubit=target),
        cx(b, target),
        Phase(qubit=target, angle=-t),
        cx(a, target),
        Phase(qubit=target, angle=t),
        cx(b, target),
        Phase(qubit=target, angle=-t),
        cx(a, target),
        Phase(qubit=b, angle=t),
        Phase(qubit=target, angle=t),
        Hadamard(qubit=target),
        cx(a, b),
        Phase(qubit=a, angle=t),
        Phase(qubit=b, angle=-t),
        cx(a, b),
    ]


def _cphase(control: int, target: int, angle: float) -> List[Gate]:
    return [
        Phase(qubit=control, angle=angle / 2),
        cx(control, target),
        Phase(qubit=target, angle=-angle / 2),
        cx(control, target),
        Phase(qubit=target, angle=angle / 2),
    ]


def _mcphase(controls: Sequence[int], target: int, angle: float) -> List[Gate]:
    if len(controls) == 1:
        return _cphase(controls[0], target, angle)
    *rest, last = controls
    rest_to_last = _lower_positive_mcx(rest, last)
    return (
        _cphase(last, target, angle / 2)
        + rest_to_last
        + _cphase(last, target, -angle / 2)
        + rest_to_last
        + _mcphase(rest, target, angle / 2)
    )


def _lower_positive_mcx(controls: Sequence[int], target: int) -> List[Gate]:
    if len(controls) == 1:
        return [cx(controls[0], target)]
    if len(controls) == 2:
        return _toffoli(controls[0], controls[1], target)
    return [Hadamard(qubit=target)] + _mcphase(controls, target, math.pi) + [Hadamard(qubit=target)]


def _lower_mcx(gate: MultiControlledX) -> List[Gate]:
    flips = [PauliGate(letter="X", qubit=q) for q, polarity in gate.controls if polarity == 0]
    return flips + _lower_positive_mcx(gate.control_qubits, gate.target) + flips


def _control_basis_gate(control: int, gate: Gate) -> List[Gate]:
    match gate:
        case PauliGate(letter="I"):
            return []
        case PauliGate(letter="X", qubit=q):
            return [cx(control, q)]
        case PauliGate(letter="Y", qubit=q):
            return [Phase(qubit=q, angle=-math.pi / 2), cx(control, q), Phase(qubit=q, angle=math.pi / 2)]
        case PauliGate(letter="Z", qubit=q):
            return [Hadamard(qubit=q), cx(control, q), Hadamard(qubit=q)]
        case Hadamard(qubit=q):
            return (
                [RY(qubit=q, angle=-math.pi / 4)]
                + _control_basis_gate(control, PauliGate(letter="Z", qubit=q))
                + [RY(qubit=q, angle=math.pi / 4)]
            )
        case RY(qubit=q, angle=angle):
            return [RY(qubit=q, angle=angle / 2), cx(control, q), RY(qubit=q, angle=-angle / 2), cx(control, q)]
        case Phase(qubit=q, angle=angle):
            return _cphase(control, q, angle)
        case MultiControlledX(controls=((inner_control, 1),), target=q):
            return _toffoli(control, inner_control, q)
    raise UnknownGateError(f"No controlled rule for basis gate '{gate.describe()}'")


def _lower_gate(gate: Gate) -> List[Gate]:
    match gate:
        case PauliGate(letter="I"):
            return []
        case PauliGate() | Hadamard() | RY() | Phase():
            return [gate]
        case Swap(qubit_a=a, qubit_b=b):
            return [cx(a, b), cx(b, a), cx(a, b)]
        case CenterSwitch(low=low, span=span):
            chain = lower_center_switch(span, low)
            return [basis for step in chain.gates for basis in _lower_gate(step)]
        case MultiControlledX():
            return _lower_mcx(gate)
        case Controlled(control=control, inner=inner):
            return [
                controlled_gate
                for basis in _lower_gate(inner)
                for controlled_gate in _control_basis_gate(control, basis)
            ]
    raise UnknownGateError(f"No lowering rule for gate '{gate.describe()}'")


def is_basis_gate(gate: Gate) -> bool:
    """True for single-qubit gates and positively, singly controlled X."""
    if isinstance(gate, MultiControlledX):
        return len(gate.controls) == 1 and gate.polarities == (1,)
    return isinstance(gate, (PauliGate, Hadamard, RY, Phase))


def lower_to_basis(circuit: Circuit) -> Circuit:
    """Rewrite ``circuit`` using only single-qubit gates and CNOT, with the same unitary."""
    gates: Tuple[Gate, ...] = tuple(basis for gate in circuit.gates for basis in _lower_gate(gate))
    logger.debug("Lowered circuit", n=circuit.n, gates_in=len(circuit.gates), gates_out=len(gates))
    return Circuit(n=circuit.n, gates=gates)
