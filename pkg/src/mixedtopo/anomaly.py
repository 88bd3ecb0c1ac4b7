"""One-form symmetry strings: braiding and exchange phases, symmetry pullback
through Clifford dilations, topological memory classification, and the
entanglement witness built from a strong loop and a weak open string.

String conventions on the square lattice: the e string is X along a direct
path, the m string is Z along a dual path, and the f string dresses each
direct edge with the Z of its (-1/2, +1/2) partner.  Braiding of two strings
that cross once is the commutation sign of their restrictions to a disc
around the crossing; exchange statistics come from the exact phase ratio of
the two orderings of a hopping triple.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .lattice import Lattice, Path, Partition, horizontal_loop, vertical_loop
from .pauli import (
    CliffordCircuit,
    PauliOp,
    commutes,
    conjugate_by_circuit,
    multiply,
    restrict,
)
from .stabmix import (
    StabilizerMixedState,
    SymmetryStatus,
    canonical_signed_form,
    composite_operator,
    conjugated_state,
    entropy_region,
    plaquette_operator,
    reduced_state,
    star_operator,
    symmetry_status,
)

ANYONS = ("e", "m", "f")
DEFAULT_CROSSING_RADIUS = 2


@dataclass(frozen=True)
class StringOperator:
    anyon: str
    path: Path
    operator: PauliOp

    def __post_init__(self):
        if self.anyon not in ANYONS:
            raise ValueError(f"unknown anyon label {self.anyon!r}")


def _hermitian_phase(x: np.ndarray, z: np.ndarray) -> int:
    return int(np.dot(x.astype(np.int64), z.astype(np.int64))) % 2


def string_operator(anyon: str, path: Path, lat: Lattice) -> StringOperator:
    """Assemble the string operator of an anyon along a path.

    The phase is normalized so the operator is Hermitian; concatenation then
    holds up to that sign convention.
    """
    if anyon == "e":
        if path.kind != "direct":
            raise ValueError("e strings live on direct paths")
        op = PauliOp.from_letters(lat.n, {e: "X" for e in path.qubits})
    elif anyon == "m":
        if path.kind != "dual":
            raise ValueError("m strings live on dual paths")
        op = PauliOp.from_letters(lat.n, {e: "Z" for e in path.qubits})
    elif anyon == "f":
        if path.kind != "direct":
            raise ValueError("f strings live on direct paths")
        op = PauliOp.identity(lat.n)
        for e in path.qubits:
            partner = lat.delta_partner(e)
            if partner is None:
                raise ValueError(f"edge {e} has no shifted partner on this lattice")
            op = multiply(op, PauliOp.from_letters(lat.n, {e: "X", partner: "Z"}))
        op = PauliOp(lat.n, op.x, op.z, _hermitian_phase(op.x, op.z))
    else:
        raise ValueError(f"unknown anyon label {anyon!r}")
    return StringOperator(anyon, path, op)


# ---------------------------------------------------------------------------
# path crossings
# ---------------------------------------------------------------------------


def _point_steps(path: Path) -> List[Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]]]:
    """(point, incoming step, outgoing step) for every interior node."""
    pts = list(path.points)
    dirs = list(path.directions)
    out = []
    if path.closed:
        for i, p in enumerate(pts):
            out.append((p, dirs[i - 1], dirs[i]))
    else:
        for i in range(1, len(pts) - 1):
            out.append((pts[i], dirs[i - 1], dirs[i]))
    return out


def _transversal(din_a, dout_a, din_b, dout_b) -> bool:
    """Do the two in/out direction pairs interleave around the node?"""
    def axis(d):
        return 0 if d[1] == 0 else 1

    # a passes straight through horizontally/vertically while b crosses it
    return {axis(din_a), axis(dout_a)} != {axis(din_b), axis(dout_b)} and (
        axis(din_a) == axis(dout_a) and axis(din_b) == axis(dout_b)
    )


def path_crossings(pa: Path, pb: Path, lat: Lattice) -> List[Tuple[int, int]]:
    """Transversal intersection points (doubled coords) of two paths."""
    crossings: List[Tuple[int, int]] = []
    if pa.kind != pb.kind:
        # a dual step crosses exactly the direct edge it shares
        shared = set(pa.qubits) & set(pb.qubits)
        crossings.extend(lat.edge_mid(e) for e in sorted(shared))
        return crossings
    nodes_b = {p: (din, dout) for p, din, dout in _point_steps(pb)}
    for p, din, dout in _point_steps(pa):
        if p in nodes_b:
            din_b, dout_b = nodes_b[p]
            if _transversal(din, dout, din_b, dout_b):
                crossings.append(p)
    return crossings


def crossing_disc(lat: Lattice, center: Tuple[int, int], radius: int = DEFAULT_CROSSING_RADIUS):
    """Edges whose midpoints lie within Chebyshev distance radius of center."""
    cx, cy = center
    per_x = 2 * lat.Lx
    per_y = 2 * lat.Ly if lat.boundary == "torus" else None
    out = set()
    for e in range(lat.n):
        mx, my = lat.edge_mid(e)
        dx = (mx - cx) % per_x
        dx = min(dx, per_x - dx)
        if per_y is None:
            dy = abs(my - cy)
        else:
            dy = (my - cy) % per_y
            dy = min(dy, per_y - dy)
        if max(dx, dy) <= 2 * radius:
            out.add(e)
    return frozenset(out)


def braiding_phase(
    wa: StringOperator,
    wb: StringOperator,
    crossing_region: Iterable[int],
    lat: Optional[Lattice] = None,
) -> int:
    """Commutation sign of the two strings restricted to the crossing region.

    The paths must intersect exactly once, inside the region; zero or
    multiple crossings raise.
    """
    region = frozenset(crossing_region)
    if lat is not None:
        crossings = path_crossings(wa.path, wb.path, lat)
        if len(crossings) != 1:
            raise ValueError(f"paths cross {len(crossings)} times; need exactly one")
        disc = crossing_disc(lat, crossings[0], radius=1)
        if not disc <= region:
            raise ValueError("the crossing does not lie inside crossing_region")
    return commutes(restrict(wa.operator, region), restrict(wb.operator, region))


def braiding_table(lat: Lattice, radius: int = DEFAULT_CROSSING_RADIUS) -> Dict[str, Dict[str, int]]:
    """Full mutual-braiding table from standard one-crossing loop pairs."""
    y0, x0 = lat.Ly // 2, lat.Lx // 2
    table: Dict[str, Dict[str, int]] = {}
    for a in ANYONS:
        table[a] = {}
        for b in ANYONS:
            pa = horizontal_loop(lat, y0, dual=(a == "m"))
            pb = vertical_loop(lat, x0, dual=(b == "m"))
            wa = string_operator(a, pa, lat)
            wb = string_operator(b, pb, lat)
            crossings = path_crossings(pa, pb, lat)
            disc = crossing_disc(lat, crossings[0], radius)
            table[a][b] = braiding_phase(wa, wb, disc, lat)
    return table


# ---------------------------------------------------------------------------
# self-statistics
# ---------------------------------------------------------------------------


def _hop(anyon: str, lat: Lattice, frm: Tuple[int, int], to: Tuple[int, int]) -> PauliOp:
    from .lattice import open_string

    path = open_string(lat, frm, to, dual=(anyon == "m"))
    return string_operator(anyon, path, lat).operator


def self_statistics(anyon: str, lat: Lattice) -> complex:
    """Exchange phase from the hopping-triple relation.

    Three hops into and out of a meeting point p are multiplied in the two
    inequivalent orders; the exact phase ratio is the statistics.
    """
    if lat.kind != "square-edges" or lat.boundary != "torus":
        raise ValueError("statistics layout is defined on square-edge tori")
    if lat.Lx < 4 or lat.Ly < 4:
        raise ValueError("statistics layout needs at least a 4x4 torus")
    cx, cy = lat.Lx // 2, lat.Ly // 2
    # q east, r north, s west of the meeting point
    t_pq = _hop(anyon, lat, (cx + 1, cy), (cx, cy))
    t_pr = _hop(anyon, lat, (cx, cy + 1), (cx, cy))
    t_sp = _hop(anyon, lat, (cx, cy), (cx - 1, cy))
    lhs = multiply(t_pr, multiply(t_sp, t_pq))
    rhs = multiply(t_pq, multiply(t_sp, t_pr))
    if not (np.array_equal(lhs.x, rhs.x) and np.array_equal(lhs.z, rhs.z)):
        raise AssertionError("hopping triple orderings disagree beyond a phase")
    return complex((1j) ** ((lhs.phase - rhs.phase) % 4))


# ---------------------------------------------------------------------------
# symmetry pullback
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DilatedChannel:
    """Stinespring dilation of a maximal dephasing channel.

    The circuit acts on system qubits [0, n_sys) and one ancilla per dephased
    edge; ancillas start in |+> (their stabilizers are listed)."""

    kind: str
    n_sys: int
    ancilla: Tuple[int, ...]
    circuit: CliffordCircuit
    ancilla_gens: Tuple[PauliOp, ...]


def dilate_max_dephasing(lat: Lattice, kind: str) -> DilatedChannel:
    """Clifford dilation of maximal X, Z, or ZX dephasing on every edge."""
    n = lat.n
    gates = []
    ancilla = []
    if kind in ("x", "z"):
        edges = list(range(n))
    elif kind == "zx":
        edges = [e for e in range(n) if lat.delta_partner(e) is not None]
    else:
        raise ValueError("dilations are provided for maximal x, z, and zx dephasing only")
    n_total = n + len(edges)
    for j, e in enumerate(edges):
        a = n + j
        ancilla.append(a)
        if kind == "z":
            gates.append(("CZ", (e, a)))
        elif kind == "x":
            gates.append(("CX", (a, e)))
        else:
            gates.append(("CZ", (e, a)))
            gates.append(("CX", (a, lat.delta_partner(e))))
    circuit = CliffordCircuit.from_gates(n_total, gates)
    anc_gens = tuple(PauliOp.single(n_total, a, "X") for a in ancilla)
    return DilatedChannel(kind, n, tuple(ancilla), circuit, anc_gens)


def pullback(g: PauliOp, dilation: CliffordCircuit, ancilla: Iterable[int]) -> PauliOp:
    """Dress an output-state symmetry into an input-state symmetry.

    Computes the conjugation of g (extended by identity on the ancilla) by
    the inverse dilation unitary.  g must not touch the ancilla.
    """
    ancilla = sorted(ancilla)
    if g.n == dilation.n:
        full = g
    elif g.n == dilation.n - len(ancilla):
        full = g.embed(dilation.n)
    else:
        raise ValueError("operator size matches neither the system nor the dilation")
    if any(full.x[a] or full.z[a] for a in ancilla):
        raise ValueError("operator support overlaps the ancilla")
    return conjugate_by_circuit(full, dilation, direction="inverse")


def extended_state(s: StabilizerMixedState, channel: DilatedChannel) -> StabilizerMixedState:
    """input state tensor the ancilla product state, on the dilation register."""
    n_total = channel.circuit.n
    gens = [g.embed(n_total) for g in s.generators]
    gens += list(channel.ancilla_gens)
    return StabilizerMixedState(n_total, tuple(gens))


# ---------------------------------------------------------------------------
# memory classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MemoryClass:
    kind: str  # 'quantum' | 'classical' | 'trivial'
    k: int
    one_form: Dict[str, str] = field(default_factory=dict)
    noncontractible: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("quantum", "classical", "trivial"):
            raise ValueError(f"bad memory kind {self.kind!r}")
        if self.kind != "trivial" and self.k < 1:
            raise ValueError("nontrivial memory needs k >= 1")


def _one_form_status(s: StabilizerMixedState, lat: Lattice, anyon: str) -> str:
    """Status over all contractible loops, via the elementary generators."""
    if anyon == "e":
        ops = [plaquette_operator(lat, x, y) for (x, y) in lat.plaquettes()]
    elif anyon == "m":
        ops = [star_operator(lat, x, y) for (x, y) in lat.vertices()]
    else:
        ops = [op for op in (composite_operator(lat, x, y) for (x, y) in lat.vertices()) if op is not None]
    statuses = [symmetry_status(s, op) for op in ops]
    if all(st.kind == "strong" for st in statuses):
        return "strong"
    if all(st.kind in ("strong", "weak") for st in statuses):
        return "weak"
    return "none"


def noncontractible_loops(lat: Lattice) -> Dict[str, StringOperator]:
    """The winding loops W_a(l_h), W_a(l_v) for each anyon label."""
    out = {}
    for a in ANYONS:
        ph = horizontal_loop(lat, 0, dual=(a == "m"))
        pv = vertical_loop(lat, 0, dual=(a == "m"))
        out[f"{a}_h"] = string_operator(a, ph, lat)
        out[f"{a}_v"] = string_operator(a, pv, lat)
    return out


def classify_memory(s: StabilizerMixedState, lat: Lattice) -> MemoryClass:
    """Quantum/classical/trivial topological memory on the torus.

    Strong one-form symmetries with mutual braiding -1 give a quantum
    memory; a strong symmetry braiding nontrivially with a merely weak one
    gives a classical memory; otherwise trivial.  k counts the logical pairs
    carried by the two winding directions.
    """
    if lat.boundary != "torus":
        raise ValueError("memory classification is defined on the torus")
    one_form = {a: _one_form_status(s, lat, a) for a in ANYONS}
    braid = braiding_table(lat)
    strong = [a for a in ANYONS if one_form[a] == "strong"]
    weakish = [a for a in ANYONS if one_form[a] in ("strong", "weak")]
    loops = noncontractible_loops(lat)
    noncontractible = {
        name: symmetry_status(s, w.operator).kind for name, w in loops.items()
    }
    quantum = any(
        braid[a][b] == -1 for a in strong for b in strong
    )
    if quantum:
        return MemoryClass("quantum", 2, one_form, noncontractible)
    classical = any(
        braid[a][b] == -1 for a in strong for b in weakish
    )
    if classical:
        return MemoryClass("classical", 2, one_form, noncontractible)
    return MemoryClass("trivial", 0, one_form, noncontractible)


# ---------------------------------------------------------------------------
# witness checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessReport:
    charge_matches_braiding: bool
    locally_indistinguishable: bool
    homentropic: bool
    charge: complex
    expected_braiding: int

    def to_json(self) -> dict:
        return {
            "charge_matches_braiding": self.charge_matches_braiding,
            "locally_indistinguishable": self.locally_indistinguishable,
            "homentropic": self.homentropic,
            "charge": [self.charge.real, self.charge.imag],
            "expected_braiding": self.expected_braiding,
        }

    def all_true(self) -> bool:
        return self.charge_matches_braiding and self.locally_indistinguishable and self.homentropic


def tee_witness_check(
    s: StabilizerMixedState,
    strong_loop: StringOperator,
    weak_string: StringOperator,
    p: Partition,
    lat: Lattice,
) -> WitnessReport:
    """The three witness properties behind the entanglement lower bound.

    strong_loop must wind around the annulus hole (so it is supported inside
    A|B|C); weak_string must be an open string ending inside the hole.  The
    disturbed state is the weak string applied by conjugation.
    """
    annulus = p.union("ABC")
    loop_support = set(int(q) for q in strong_loop.operator.support())
    if not loop_support <= set(annulus):
        raise ValueError("strong loop must be supported inside the annulus")
    if weak_string.path.closed:
        raise ValueError("weak string must be open")
    hole = set(p.meta.get("hole", ()))
    if hole and not (set(weak_string.path.qubits) & hole):
        raise ValueError("weak string must terminate inside the hole")
    st = symmetry_status(s, strong_loop.operator)
    if st.kind != "strong":
        return WitnessReport(False, False, False, 0j, _expected_braiding(strong_loop, weak_string))

    disturbed = conjugated_state(s, weak_string.operator)
    expected = _expected_braiding(strong_loop, weak_string)
    st_b = symmetry_status(disturbed, strong_loop.operator)
    charge = st_b.charge if st_b.kind == "strong" else 0j
    charge_ok = st_b.kind == "strong" and abs(charge - expected * st.charge) < 1e-12

    local_ok = True
    for name in ("A", "C"):
        if name not in p.regions:
            continue
        region = sorted(p.region(name))
        if canonical_signed_form(reduced_state(s, region)) != canonical_signed_form(
            reduced_state(disturbed, region)
        ):
            local_ok = False
    ann = sorted(annulus)
    homent = abs(entropy_region(s, ann) - entropy_region(disturbed, ann)) < 1e-12
    return WitnessReport(charge_ok, local_ok, homent, complex(charge), expected)


def _expected_braiding(strong_loop: StringOperator, weak_string: StringOperator) -> int:
    """Global commutation sign: one crossing means the string sees the loop."""
    return commutes(strong_loop.operator, weak_string.operator)


__all__ = [
    "StringOperator",
    "DilatedChannel",
    "MemoryClass",
    "WitnessReport",
    "ANYONS",
    "string_operator",
    "path_crossings",
    "crossing_disc",
    "braiding_phase",
    "braiding_table",
    "self_statistics",
    "dilate_max_dephasing",
    "pullback",
    "extended_state",
    "noncontractible_loops",
    "classify_memory",
    "tee_witness_check",
]
