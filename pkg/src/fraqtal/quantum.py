"""Dense statevector simulation of small circuits.

Basis index ``i`` stores qubit 0 in its least-significant bit; bitstrings
shown to users are written most-significant qubit first, so qubit 0 is the
rightmost character.
"""
from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .rng import CIRCUIT_CONST, SplitMix64

MAX_QUBITS = 16
MAX_DEPTH = 64
DEFAULT_SHOTS = 2048


class GateKind(str, enum.Enum):
    H = "H"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CP = "CP"
    CNOT = "CNOT"
    ORACLE = "ORACLE"
    DIFFUSION = "DIFFUSION"


ROTATIONS = (GateKind.RX, GateKind.RY, GateKind.RZ)
# applied as direct statevector transforms, not hardware gates
NATIVE_KINDS = (GateKind.ORACLE, GateKind.DIFFUSION)


class Family(str, enum.Enum):
    GHZ = "ghz"
    GROVER_LIKE = "grover"
    QFT = "qft"


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    target: int = 0
    control: Optional[int] = None
    angle: Optional[float] = None
    marked: Optional[int] = None

    def __post_init__(self):
        if self.target < 0 or (self.control is not None and self.control < 0):
            raise ValueError(f"negative qubit index in {self!r}")
        if self.control is not None and self.control == self.target:
            raise ValueError(f"control equals target in {self!r}")
        if self.kind in (GateKind.CNOT, GateKind.CP) and self.control is None:
            raise ValueError(f"{self.kind.value} needs a control qubit")
        if self.kind in ROTATIONS or self.kind is GateKind.CP:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind.value} needs a finite angle")
        if self.kind is GateKind.ORACLE and (self.marked is None or self.marked < 0):
            raise ValueError("ORACLE needs a non-negative marked index")

    @property
    def native(self) -> bool:
        return self.kind in NATIVE_KINDS

    def describe(self) -> str:
        """One debug-dump line: ``<kind> q<target>[, q<control>][, angle=<rad>]``."""
        out = f"{self.kind.value} q{self.target}"
        if self.control is not None:
            out += f", q{self.control}"
        if self.angle is not None:
            out += f", angle={self.angle:.6f}"
        if self.marked is not None:
            out += f", marked={self.marked}"
        if self.native:
            out += " (simulator-native)"
        return out


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]
    depth: int = 0
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}")
        dim = 1 << self.num_qubits
        for g in self.gates:
            used = [g.target] if g.control is None else [g.target, g.control]
            if max(used) >= self.num_qubits:
                raise ValueError(f"gate {g.describe()} outside {self.num_qubits} qubits")
            if g.marked is not None and g.marked >= dim:
                raise ValueError(f"marked index {g.marked} >= 2^{self.num_qubits}")

    def dump(self) -> str:
        return "\n".join(g.describe() for g in self.gates)


@dataclass(frozen=True, eq=False)
class Statevector:
    num_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        if self.amps.shape != (1 << self.num_qubits,):
            raise ValueError(f"expected {1 << self.num_qubits} amplitudes, got {self.amps.shape}")
        self.amps.setflags(write=False)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)


@dataclass(frozen=True)
class ShotHistogram:
    num_qubits: int
    shots: int
    counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.shots <= 0:
            raise ValueError("shots must be positive")
        for key, value in self.counts.items():
            if len(key) != self.num_qubits or set(key) - {"0", "1"}:
                raise ValueError(f"bad bitstring {key!r} for {self.num_qubits} qubits")
            if value < 0:
                raise ValueError(f"negative count for {key!r}")
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to shots")


def bitstring(index: int, num_qubits: int) -> str:
    return format(index, f"0{num_qubits}b")


def check_norm(amps, tol: float = 1e-10) -> float:
    """Return the squared norm of ``amps``; raise if it is not 1 within ``tol``."""
    total = float(np.sum(np.abs(np.asarray(amps, dtype=complex)) ** 2))
    if abs(total - 1.0) > tol:
        raise ValueError(f"statevector norm^2 {total!r} differs from 1 by more than {tol}")
    return total


# ---------------------------------------------------------------- circuits

def build_random_circuit(seed: int, num_qubits: int, depth: int) -> Circuit:
    """Layered random circuit over H/RX/RY/RZ plus one random CNOT per layer."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")
    if not 0 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must be in [0, {MAX_DEPTH}], got {depth}")
    rng = SplitMix64(seed ^ CIRCUIT_CONST)
    choices = (GateKind.H, GateKind.RX, GateKind.RY, GateKind.RZ)
    gates = []
    for _ in range(depth):
        for q in range(num_qubits):
            kind = choices[rng.randbelow(4)]
            if kind is GateKind.H:
                gates.append(Gate(kind, q))
            else:
                gates.append(Gate(kind, q, angle=2.0 * math.pi * rng.random()))
        if num_qubits >= 2:
            # ordered pair: control uniform, target uniform among the rest
            c = rng.randbelow(num_qubits)
            t = rng.randbelow(num_qubits - 1)
            if t >= c:
                t += 1
            gates.append(Gate(GateKind.CNOT, t, control=c))
    return Circuit(num_qubits, tuple(gates), depth=depth, seed=seed)


def preset_circuit(family, num_qubits: int, iterations: int = 1, marked: int = 0) -> Circuit:
    family = Family(family)
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")
    n = num_qubits
    gates: list[Gate] = []
    if family is Family.GHZ:
        gates.append(Gate(GateKind.H, 0))
        gates.extend(Gate(GateKind.CNOT, q + 1, control=q) for q in range(n - 1))
        depth = n
    elif family is Family.GROVER_LIKE:
        if not 0 <= marked < (1 << n):
            raise ValueError(f"marked must be in [0, 2^{n}), got {marked}")
        if iterations < 0:
            raise ValueError("iterations must be >= 0")
        gates.extend(Gate(GateKind.H, q) for q in range(n))
        for _ in range(iterations):
            gates.append(Gate(GateKind.ORACLE, 0, marked=marked))
            gates.append(Gate(GateKind.DIFFUSION, 0))
        depth = 1 + 2 * iterations
    else:
        for q in range(n - 1, -1, -1):
            gates.append(Gate(GateKind.H, q))
            for j in range(q - 1, -1, -1):
                gates.append(Gate(GateKind.CP, q, control=j, angle=math.pi / 2 ** (q - j)))
        for a in range(n // 2):
            b = n - 1 - a
            gates += [Gate(GateKind.CNOT, b, control=a),
                      Gate(GateKind.CNOT, a, control=b),
                      Gate(GateKind.CNOT, b, control=a)]
        depth = n
    return Circuit(n, tuple(gates), depth=depth)


def optimal_grover_iterations(num_qubits: int) -> int:
    return max(0, int(math.floor(math.pi / 4 * math.sqrt(1 << num_qubits))))


# -------------------------------------------------------------- simulation

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2


def gate_matrix(kind: GateKind, angle: float | None = None) -> np.ndarray:
    """2x2 matrix for the single-qubit kinds."""
    if kind is GateKind.H:
        return _H
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.array([[complex(c, -s), 0], [0, complex(c, s)]], dtype=complex)
    raise ValueError(f"{kind.value} is not a single-qubit gate")


def _apply_1q(psi: np.ndarray, m: np.ndarray, q: int, n: int) -> np.ndarray:
    view = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
    return np.einsum("ab,ibj->iaj", m, view).reshape(-1)


def apply_gate(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Return a new amplitude array with ``gate`` applied."""
    kind = gate.kind
    if kind is GateKind.H or kind in ROTATIONS:
        return _apply_1q(psi, gate_matrix(kind, gate.angle), gate.target, n)
    out = psi.copy()
    if kind is GateKind.CNOT:
        idx = np.arange(psi.size)
        sel = idx[((idx >> gate.control) & 1 == 1) & ((idx >> gate.target) & 1 == 0)]
        flip = sel | (1 << gate.target)
        out[sel], out[flip] = psi[flip], psi[sel]
    elif kind is GateKind.CP:
        idx = np.arange(psi.size)
        both = ((idx >> gate.control) & 1 == 1) & ((idx >> gate.target) & 1 == 1)
        out[both] *= complex(math.cos(gate.angle), math.sin(gate.angle))
    elif kind is GateKind.ORACLE:
        out[gate.marked] = -out[gate.marked]
    elif kind is GateKind.DIFFUSION:
        # 2|s><s| - I with |s> the uniform superposition
        out = 2.0 * psi.mean() - psi
    else:  # pragma: no cover
        raise ValueError(f"unknown gate kind {kind}")
    return out


def simulate(circuit: Circuit, initial: np.ndarray | None = None) -> Statevector:
    n = circuit.num_qubits
    if initial is None:
        psi = np.zeros(1 << n, dtype=complex)
        psi[0] = 1.0
    else:
        psi = np.array(initial, dtype=complex)
    for g in circuit.gates:
        psi = apply_gate(psi, g, n)
    check_norm(psi)
    return Statevector(n, psi)


def probabilities(sv: Statevector) -> np.ndarray:
    return np.abs(sv.amps) ** 2


def sample_shots(sv: Statevector, shots: int = DEFAULT_SHOTS, seed: int = 0) -> ShotHistogram:
    """Draw ``shots`` basis-state samples by inverse CDF over the exact probabilities."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    cdf = np.cumsum(probabilities(sv))
    total = cdf[-1]
    if not total > 0:
        raise RuntimeError("cannot sample from a zero-norm statevector")
    u = SplitMix64(seed).random_array(shots) * total
    idx = np.searchsorted(cdf, u, side="right")
    np.minimum(idx, cdf.size - 1, out=idx)
    hits = np.bincount(idx, minlength=cdf.size)
    counts = {bitstring(i, sv.num_qubits): int(c) for i, c in enumerate(hits) if c}
    return ShotHistogram(sv.num_qubits, shots, counts)


def probs_digest(hist: ShotHistogram) -> str:
    """SHA-1 of the canonical histogram text ``shots=N;b:c;b:c;...``."""
    parts = [f"shots={hist.shots};"]
    parts += [f"{k}:{v};" for k, v in sorted(hist.counts.items()) if v]
    return hashlib.sha1("".join(parts).encode("utf-8")).hexdigest()


def density_matrix(sv: Statevector) -> np.ndarray:
    return np.outer(sv.amps, sv.amps.conj())


def reduced_density_matrix(sv: Statevector, qubit: int) -> np.ndarray:
    n = sv.num_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    view = sv.amps.reshape(1 << (n - 1 - qubit), 2, 1 << qubit)
    return np.einsum("iaj,ibj->ab", view, view.conj())


def bloch_vector(sv: Statevector, qubit: int) -> tuple[float, float, float]:
    rho = reduced_density_matrix(sv, qubit)
    x = 2.0 * rho[0, 1].real
    y = -2.0 * rho[0, 1].imag
    z = (rho[0, 0] - rho[1, 1]).real
    return float(x), float(y), float(z)
