"""Phase-tracked Pauli operators in symplectic form, plus Clifford conjugation.

An operator is ``i**phase * prod_q X_q**x[q] Z_q**z[q]`` with the per-qubit
factors taken in ascending qubit order and X before Z on each qubit.  The
phase is an exponent of i kept mod 4, so products distinguish -1 from +-i.
Under this convention X*Z equals -i Y on one qubit, and Y itself is the
operator (x=1, z=1, phase=1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"+": 0, "+i": 1, "-": 2, "-i": 3, "": 0, "i": 1, "-1": 2}
_LETTER_XZ = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}

GATE_NAMES = ("H", "S", "CX", "CZ", "X", "Z")


class PauliOp:
    """An n-qubit Pauli with exact phase.  Immutable; share freely."""

    __slots__ = ("n", "x", "z", "phase")

    def __init__(self, n: int, x, z, phase: int = 0):
        x = np.asarray(x, dtype=np.uint8) & 1
        z = np.asarray(z, dtype=np.uint8) & 1
        if x.shape != (n,) or z.shape != (n,):
            raise ValueError("x and z must have length n")
        x = np.ascontiguousarray(x)
        z = np.ascontiguousarray(z)
        x.flags.writeable = False
        z.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase", int(phase) % 4)

    def __setattr__(self, name, value):
        raise AttributeError("PauliOp is immutable")

    @classmethod
    def identity(cls, n: int) -> "PauliOp":
        return cls(n, np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8), 0)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str, phase: int = 0) -> "PauliOp":
        xb, zb = _LETTER_XZ[letter]
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        x[qubit], z[qubit] = xb, zb
        # Y is i*XZ, so the letter carries one unit of i.
        extra = 1 if letter == "Y" else 0
        return cls(n, x, z, phase + extra)

    @classmethod
    def from_letters(cls, n: int, letters: dict, phase: int = 0) -> "PauliOp":
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        extra = 0
        for q, letter in letters.items():
            xb, zb = _LETTER_XZ[letter]
            x[q], z[q] = xb, zb
            if letter == "Y":
                extra += 1
        return cls(n, x, z, phase + extra)

    @classmethod
    def from_string(cls, text: str) -> "PauliOp":
        """Parse e.g. '+XIZ' or '-iYZI'; prefix in {+, -, +i, -i} optional."""
        s = text.strip()
        prefix = ""
        while s and s[0] in "+-i":
            prefix += s[0]
            s = s[1:]
        if prefix not in ("", "+", "-", "+i", "-i", "i"):
            raise ValueError(f"bad phase prefix in {text!r}")
        phase = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}[prefix]
        letters = {}
        for q, ch in enumerate(s):
            if ch not in _LETTER_XZ:
                raise ValueError(f"bad Pauli letter {ch!r} in {text!r}")
            letters[q] = ch
        return cls.from_letters(len(s), letters, phase)

    def to_string(self) -> str:
        ys = int(np.count_nonzero(self.x & self.z))
        prefix = _PHASE_PREFIX[(self.phase - ys) % 4]
        body = []
        for xb, zb in zip(self.x, self.z):
            body.append({(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[(int(xb), int(zb))])
        return prefix + "".join(body)

    def phase_factor(self) -> complex:
        return (1j) ** self.phase

    def support(self) -> np.ndarray:
        return np.nonzero(self.x | self.z)[0]

    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def is_identity(self) -> bool:
        return self.weight() == 0

    def is_hermitian(self) -> bool:
        return (self.phase - int(np.dot(self.x.astype(np.int64), self.z.astype(np.int64)))) % 2 == 0

    def symplectic(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    def embed(self, n_total: int, offset: int = 0) -> "PauliOp":
        """Place this operator on qubits [offset, offset+n) of a larger register."""
        if offset + self.n > n_total:
            raise ValueError("embedding exceeds target register")
        x = np.zeros(n_total, dtype=np.uint8)
        z = np.zeros(n_total, dtype=np.uint8)
        x[offset:offset + self.n] = self.x
        z[offset:offset + self.n] = self.z
        return PauliOp(n_total, x, z, self.phase)

    def adjoint(self) -> "PauliOp":
        xz = int(np.dot(self.x.astype(np.int64), self.z.astype(np.int64)))
        return PauliOp(self.n, self.x, self.z, -self.phase + 2 * xz)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliOp)
            and self.n == other.n
            and self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self):
        return hash((self.n, self.phase, self.x.tobytes(), self.z.tobytes()))

    def __repr__(self):
        return f"PauliOp({self.to_string()!r})"


def multiply(a: PauliOp, b: PauliOp) -> PauliOp:
    """Exact operator product a*b."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")
    # Moving b's X factors left past a's Z factors costs (-1) per collision.
    cross = int(np.dot(a.z.astype(np.int64), b.x.astype(np.int64)))
    return PauliOp(a.n, a.x ^ b.x, a.z ^ b.z, a.phase + b.phase + 2 * cross)


def symplectic_product(a: PauliOp, b: PauliOp) -> int:
    """0 when a and b commute, 1 when they anticommute."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")
    s = int(np.dot(a.x.astype(np.int64), b.z.astype(np.int64)))
    s += int(np.dot(a.z.astype(np.int64), b.x.astype(np.int64)))
    return s % 2


def commutes(a: PauliOp, b: PauliOp) -> int:
    """+1 if a and b commute, -1 otherwise."""
    return 1 - 2 * symplectic_product(a, b)


def restrict(a: PauliOp, region: Iterable[int]) -> PauliOp:
    """Tensor factors of a on region, identity elsewhere, phase reset to 0."""
    mask = np.zeros(a.n, dtype=np.uint8)
    idx = np.fromiter(region, dtype=np.int64) if not isinstance(region, np.ndarray) else region
    if len(idx):
        mask[idx] = 1
    return PauliOp(a.n, a.x & mask, a.z & mask, 0)


@dataclass(frozen=True)
class CliffordCircuit:
    """Ordered gate list from {H, S, CX, CZ, X, Z}; first gate acts first."""

    n: int
    gates: tuple

    def __post_init__(self):
        for name, qubits in self.gates:
            if name not in GATE_NAMES:
                raise ValueError(f"unknown gate {name!r}")
            want = 2 if name in ("CX", "CZ") else 1
            if len(qubits) != want:
                raise ValueError(f"gate {name} expects {want} qubit(s), got {qubits}")
            if any(q < 0 or q >= self.n for q in qubits):
                raise ValueError(f"qubit index out of range in {name}{qubits}")
            if want == 2 and qubits[0] == qubits[1]:
                raise ValueError(f"two-qubit gate {name} needs distinct targets")

    @classmethod
    def from_gates(cls, n: int, gates: Sequence) -> "CliffordCircuit":
        return cls(n, tuple((name, tuple(qs)) for name, qs in gates))


def _image(n: int, name: str, qubits, kind: str, inverse: bool) -> PauliOp:
    """Image of one symplectic generator (X or Z on one of the gate's qubits)."""
    if name == "H":
        (q,) = qubits
        return PauliOp.single(n, q, "Z" if kind == "X0" else "X")
    if name == "S":
        (q,) = qubits
        if kind == "Z0":
            return PauliOp.single(n, q, "Z")
        return PauliOp.single(n, q, "Y", phase=2 if inverse else 0)
    if name == "X":
        (q,) = qubits
        if kind == "X0":
            return PauliOp.single(n, q, "X")
        return PauliOp.single(n, q, "Z", phase=2)
    if name == "Z":
        (q,) = qubits
        if kind == "Z0":
            return PauliOp.single(n, q, "Z")
        return PauliOp.single(n, q, "X", phase=2)
    c, t = qubits
    if name == "CX":
        table = {
            "X0": {c: "X", t: "X"},
            "Z0": {c: "Z"},
            "X1": {t: "X"},
            "Z1": {c: "Z", t: "Z"},
        }
    else:  # CZ
        table = {
            "X0": {c: "X", t: "Z"},
            "Z0": {c: "Z"},
            "X1": {c: "Z", t: "X"},
            "Z1": {t: "Z"},
        }
    return PauliOp.from_letters(n, table[kind])


def _conjugate_gate(op: PauliOp, name: str, qubits, inverse: bool) -> PauliOp:
    x = op.x.copy()
    z = op.z.copy()
    factors = []
    for role, q in enumerate(qubits):
        if x[q]:
            factors.append((f"X{role}", q))
        if z[q]:
            factors.append((f"Z{role}", q))
    if not factors:
        return op
    # Factors on other qubits commute with the images (disjoint support), so
    # pulling the affected factors to the right is exact.
    factors.sort(key=lambda item: (item[1], item[0]))
    for q in qubits:
        x[q] = 0
        z[q] = 0
    out = PauliOp(op.n, x, z, op.phase)
    for kind, _q in factors:
        out = multiply(out, _image(op.n, name, qubits, kind, inverse))
    return out


def conjugate_by_circuit(a: PauliOp, c: CliffordCircuit, direction: str = "forward") -> PauliOp:
    """Exact phased image of a under conjugation by the circuit unitary U.

    direction 'forward' computes U a U^dagger; 'inverse' computes
    U^dagger a U.
    """
    if a.n != c.n:
        raise ValueError(f"size mismatch: operator on {a.n}, circuit on {c.n}")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be forward or inverse, got {direction!r}")
    out = a
    if direction == "forward":
        for name, qubits in c.gates:
            out = _conjugate_gate(out, name, qubits, inverse=False)
    else:
        for name, qubits in reversed(c.gates):
            out = _conjugate_gate(out, name, qubits, inverse=True)
    return out


__all__ = [
    "PauliOp",
    "CliffordCircuit",
    "multiply",
    "commutes",
    "symplectic_product",
    "restrict",
    "conjugate_by_circuit",
]
