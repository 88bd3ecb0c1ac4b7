"""Stabilizer mixed states: canonical generators, exact subregion entropies,
strong/weak Pauli symmetry classification, maximal dephasing, and the model
states used everywhere else.

A state is rho ~ prod_i (1 + S_i)/2 for independent commuting Hermitian Pauli
generators S_i with signs +-1.  Entropies come out in bits, so a k-fold
degenerate stabilizer group on n qubits has global entropy n - m exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import gf2linalg as gf2
from .lattice import (
    Lattice,
    horizontal_loop,
    vertical_loop,
)
from .pauli import PauliOp, commutes, multiply, restrict, symplectic_product


class StabilizerMixedState:
    """Immutable stabilizer mixed state; generators kept as constructed."""

    __slots__ = ("n", "generators", "_xz")

    def __init__(self, n: int, generators: Tuple[PauliOp, ...]):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "generators", tuple(generators))
        xz = np.zeros((len(generators), 2 * n), dtype=np.uint8)
        for i, g in enumerate(generators):
            xz[i, :n] = g.x
            xz[i, n:] = g.z
        xz.flags.writeable = False
        object.__setattr__(self, "_xz", xz)

    def __setattr__(self, name, value):
        raise AttributeError("StabilizerMixedState is immutable")

    @property
    def m(self) -> int:
        return len(self.generators)

    def symplectic_rows(self) -> np.ndarray:
        return self._xz

    def global_entropy(self) -> float:
        return float(self.n - self.m)

    def __repr__(self):
        return f"StabilizerMixedState(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class SymmetryStatus:
    kind: str  # 'strong' | 'weak' | 'none'
    charge: Optional[complex] = None

    def __post_init__(self):
        if (self.kind == "strong") != (self.charge is not None):
            raise ValueError("charge is present exactly for strong symmetries")


def _validate_generator(g: PauliOp):
    if not g.is_hermitian():
        raise ValueError(f"generator {g.to_string()} has an imaginary sign")


def canonicalize(gens: Sequence[PauliOp], n: Optional[int] = None) -> StabilizerMixedState:
    """Reduce a commuting Hermitian generator list to an independent one.

    Generators are kept verbatim in input order; dependent entries are
    dropped after checking their sign against the recombination, so an
    inconsistent list (the group would contain -1) raises.  Anticommuting
    pairs raise as well.
    """
    gens = list(gens)
    if n is None:
        if not gens:
            raise ValueError("empty generator list needs an explicit qubit count")
        n = gens[0].n
    for g in gens:
        if g.n != n:
            raise ValueError("generators act on different qubit counts")
        _validate_generator(g)
    if gens:
        xs = np.stack([g.x for g in gens]).astype(np.int64)
        zs = np.stack([g.z for g in gens]).astype(np.int64)
        sym = (xs @ zs.T + zs @ xs.T) % 2
        if sym.any():
            i, j = np.argwhere(sym)[0]
            raise ValueError(
                f"generators {int(i)} and {int(j)} anticommute; not a valid stabilizer group"
            )
    kept: List[PauliOp] = []
    echelon: List[Tuple[int, np.ndarray, PauliOp]] = []  # (pivot, reduced row, reduced op)
    for g in gens:
        row = np.concatenate([g.x, g.z]).astype(np.uint8)
        op = g
        for pivot, prow, pop in echelon:
            if row[pivot]:
                row ^= prow
                op = multiply(op, pop)
        hits = np.nonzero(row)[0]
        if hits.size == 0:
            # dependent: op is the residual sign of g against the kept span
            if op.phase % 4 != 0:
                raise ValueError("inconsistent generator signs: the group would contain -1")
            continue
        pivot = int(hits[0])
        echelon.append((pivot, row, op))
        echelon.sort(key=lambda item: item[0])
        kept.append(g)
    return StabilizerMixedState(n, tuple(kept))


def canonical_signed_form(s: StabilizerMixedState) -> Tuple[Tuple[int, bytes, int], ...]:
    """Order-independent fingerprint of the signed group (RREF with signs)."""
    entries: List[Tuple[int, np.ndarray, PauliOp]] = []
    for g in s.generators:
        row = np.concatenate([g.x, g.z]).astype(np.uint8)
        op = g
        for pivot, prow, pop in entries:
            if row[pivot]:
                row = row ^ prow
                op = multiply(op, pop)
        hits = np.nonzero(row)[0]
        if hits.size == 0:
            continue
        entries.append((int(hits[0]), row, op))
        entries.sort(key=lambda item: item[0])
    for k in range(len(entries) - 1, -1, -1):
        pk, rk, ok = entries[k]
        for j in range(k):
            pj, rj, oj = entries[j]
            if rj[pk]:
                entries[j] = (pj, rj ^ rk, multiply(oj, ok))
    return tuple((p, r.tobytes(), o.phase) for p, r, o in entries)


def _region_mask(n: int, region: Iterable[int]) -> np.ndarray:
    mask = np.zeros(n, dtype=np.uint8)
    idx = np.fromiter(region, dtype=np.int64)
    if idx.size:
        if idx.min() < 0 or idx.max() >= n:
            raise ValueError("region leaves the qubit range")
        mask[idx] = 1
    return mask


def _restricted_rank(s: StabilizerMixedState, mask: np.ndarray) -> int:
    """GF(2) rank of the generators' symplectic restriction to mask==1."""
    cols = np.concatenate([mask, mask]).astype(bool)
    sub = s.symplectic_rows()[:, cols]
    return gf2.rank(gf2.BitMatrix.from_dense(sub))


def region_group_size(s: StabilizerMixedState, region: Iterable[int]) -> int:
    """Number of independent group elements supported inside the region."""
    mask = _region_mask(s.n, region)
    return s.m - _restricted_rank(s, 1 - mask)


def entropy_region(s: StabilizerMixedState, region: Iterable[int]) -> float:
    """S_A = |A| - log2 |G_A| in bits, exact."""
    mask = _region_mask(s.n, region)
    size = int(mask.sum())
    inside = s.m - _restricted_rank(s, 1 - mask)
    return float(size - inside)


def cmi(s: StabilizerMixedState, p) -> float:
    """I(A:C|B) = S_AB + S_BC - S_B - S_ABC in bits."""
    a = p.region("A")
    b = p.region("B") if "B" in p.regions else frozenset()
    c = p.region("C") if "C" in p.regions else frozenset()
    return (
        entropy_region(s, a | b)
        + entropy_region(s, b | c)
        - entropy_region(s, b)
        - entropy_region(s, a | b | c)
    )


def region_subgroup_generators(s: StabilizerMixedState, region: Iterable[int]) -> List[PauliOp]:
    """Generators of the subgroup supported inside the region, signs included."""
    mask = _region_mask(s.n, region)
    cols = np.concatenate([1 - mask, 1 - mask]).astype(bool)
    outside = s.symplectic_rows()[:, cols]
    coeffs = gf2.nullspace(gf2.BitMatrix.from_dense(outside).transpose())
    out = []
    for cvec in coeffs:
        op = PauliOp.identity(s.n)
        for i in np.nonzero(cvec)[0]:
            op = multiply(op, s.generators[int(i)])
        out.append(op)
    return out


def reduced_state(s: StabilizerMixedState, region: Iterable[int]) -> StabilizerMixedState:
    """The reduced density matrix on the region, as a stabilizer state there."""
    mask = _region_mask(s.n, region)
    keep = np.nonzero(mask)[0]
    gens = []
    for op in region_subgroup_generators(s, keep):
        gens.append(PauliOp(len(keep), op.x[keep], op.z[keep], op.phase))
    return canonicalize(gens, n=len(keep))


def symmetry_status(s: StabilizerMixedState, g: PauliOp) -> SymmetryStatus:
    """Strong when +-g (up to phase) lies in the signed group; weak when g
    merely centralizes it; none otherwise."""
    if g.n != s.n:
        raise ValueError("operator and state sizes differ")
    if s.m:
        xs = s.symplectic_rows()[:, : s.n].astype(np.int64)
        zs = s.symplectic_rows()[:, s.n :].astype(np.int64)
        anti = (xs @ g.z.astype(np.int64) + zs @ g.x.astype(np.int64)) % 2
        if anti.any():
            return SymmetryStatus("none")
    rows = gf2.BitMatrix.from_dense(s.symplectic_rows())
    coeff = gf2.in_span(rows, np.concatenate([g.x, g.z]))
    if coeff is None:
        return SymmetryStatus("weak")
    h = PauliOp.identity(s.n)
    for i in np.nonzero(coeff)[0]:
        h = multiply(h, s.generators[int(i)])
    charge = (1j) ** ((g.phase - h.phase) % 4)
    return SymmetryStatus("strong", complex(charge))


def apply_max_dephasing(
    s: StabilizerMixedState, noise_ops: Sequence[PauliOp]
) -> StabilizerMixedState:
    """State after fully dephasing against each Hermitian Pauli noise op.

    The surviving group is the centralizer of the noise ops inside the
    original group: per op, one anticommuting generator is dropped after
    multiplying it into the other anticommuting generators.
    """
    gens = list(s.generators)
    for noise in noise_ops:
        if noise.n != s.n:
            raise ValueError("noise op size mismatch")
        _validate_generator(noise)
        anti = [i for i, g in enumerate(gens) if symplectic_product(g, noise)]
        if not anti:
            continue
        pivot = anti[0]
        gp = gens[pivot]
        for i in anti[1:]:
            gens[i] = multiply(gens[i], gp)
        del gens[pivot]
    return StabilizerMixedState(s.n, tuple(gens))


def conjugated_state(s: StabilizerMixedState, p: PauliOp) -> StabilizerMixedState:
    """P rho P^dagger: generator signs flip where they anticommute with P."""
    gens = []
    for g in s.generators:
        if symplectic_product(g, p):
            gens.append(PauliOp(g.n, g.x, g.z, g.phase + 2))
        else:
            gens.append(g)
    return StabilizerMixedState(s.n, tuple(gens))


def state_with_sign_pattern(s: StabilizerMixedState, flips) -> StabilizerMixedState:
    """Sign sector: flip the sign of generator i where flips[i] is set."""
    flips = np.asarray(flips, dtype=np.uint8)
    gens = []
    for i, g in enumerate(s.generators):
        gens.append(PauliOp(g.n, g.x, g.z, g.phase + 2 * int(flips[i])))
    return StabilizerMixedState(s.n, tuple(gens))


# ---------------------------------------------------------------------------
# model states
# ---------------------------------------------------------------------------


def star_operator(lat: Lattice, x: int, y: int) -> PauliOp:
    """Z on the edges meeting vertex (x, y)."""
    return PauliOp.from_letters(lat.n, {e: "Z" for e in lat.star_edges(x, y)})


def plaquette_operator(lat: Lattice, x: int, y: int) -> PauliOp:
    """X on the edges of plaquette (x, y)."""
    return PauliOp.from_letters(lat.n, {e: "X" for e in lat.plaquette_edges(x, y)})


def composite_operator(lat: Lattice, x: int, y: int) -> Optional[PauliOp]:
    """Star at (x, y) times the plaquette shifted by (+1/2, -1/2)."""
    if lat.boundary == "cylinder" and not (1 <= y <= lat.Ly):
        return None
    star = star_operator(lat, x, y)
    plaq = plaquette_operator(lat, x, y - 1)
    return multiply(star, plaq)


def hexagon_flux_operator(lat: Lattice, x: int, y: int) -> PauliOp:
    sites = lat.hexagon_sites(x, y)
    return PauliOp.from_letters(lat.n, dict(zip(sites, lat.HEX_PATTERN)))


def z_noise_ops(lat: Lattice) -> List[PauliOp]:
    return [PauliOp.single(lat.n, e, "Z") for e in range(lat.n)]


def x_noise_ops(lat: Lattice) -> List[PauliOp]:
    return [PauliOp.single(lat.n, e, "X") for e in range(lat.n)]


def zx_noise_ops(lat: Lattice) -> List[PauliOp]:
    """Two-body ops Z_e X_{e+delta}; edges without a partner are skipped."""
    out = []
    for e in range(lat.n):
        partner = lat.delta_partner(e)
        if partner is None:
            continue
        out.append(PauliOp.from_letters(lat.n, {e: "Z", partner: "X"}))
    return out


MODEL_KINDS = (
    "toric-code",
    "loop-soup",
    "zx-dephased-max",
    "honeycomb-flux",
    "maximally-mixed",
    "product-z",
)


def model_state(kind: str, lat: Lattice) -> StabilizerMixedState:
    """Model stabilizer states on the given lattice."""
    if kind == "toric-code":
        if lat.kind != "square-edges":
            raise ValueError("toric-code needs a square-edges lattice")
        gens = [star_operator(lat, x, y) for (x, y) in lat.vertices()]
        gens += [plaquette_operator(lat, x, y) for (x, y) in lat.plaquettes()]
        return canonicalize(gens, n=lat.n)
    if kind == "loop-soup":
        # fully Z-dephased toric-code ground state of the trivial winding
        # sector: stars plus the two winding-parity dual Z loops
        if lat.kind != "square-edges" or lat.boundary != "torus":
            raise ValueError("loop-soup needs a square-edges torus")
        gens = [star_operator(lat, x, y) for (x, y) in lat.vertices()]
        hall = horizontal_loop(lat, 0, dual=True)
        vall = vertical_loop(lat, 0, dual=True)
        gens.append(PauliOp.from_letters(lat.n, {e: "Z" for e in hall.qubits}))
        gens.append(PauliOp.from_letters(lat.n, {e: "Z" for e in vall.qubits}))
        return canonicalize(gens, n=lat.n)
    if kind == "zx-dephased-max":
        if lat.kind != "square-edges":
            raise ValueError("zx-dephased-max needs a square-edges lattice")
        gens = []
        for (x, y) in lat.vertices():
            op = composite_operator(lat, x, y)
            if op is not None:
                gens.append(op)
        return canonicalize(gens, n=lat.n)
    if kind == "honeycomb-flux":
        if lat.kind != "honeycomb-vertices":
            raise ValueError("honeycomb-flux needs a honeycomb lattice")
        gens = [hexagon_flux_operator(lat, x, y) for (x, y) in lat.hexagons()]
        return canonicalize(gens, n=lat.n)
    if kind == "maximally-mixed":
        return StabilizerMixedState(lat.n, ())
    if kind == "product-z":
        return canonicalize([PauliOp.single(lat.n, q, "Z") for q in range(lat.n)], n=lat.n)
    raise ValueError(f"unknown model kind {kind!r}")


def state_to_json(s: StabilizerMixedState, lattice_doc: Optional[dict] = None) -> dict:
    doc = {"n": s.n, "generators": [g.to_string() for g in s.generators]}
    if lattice_doc is not None:
        doc["lattice"] = lattice_doc
    return doc


def state_from_json(doc: dict) -> StabilizerMixedState:
    n = int(doc["n"])
    gens = [PauliOp.from_string(text) for text in doc["generators"]]
    return canonicalize(gens, n=n)


__all__ = [
    "StabilizerMixedState",
    "SymmetryStatus",
    "canonicalize",
    "canonical_signed_form",
    "entropy_region",
    "cmi",
    "region_group_size",
    "region_subgroup_generators",
    "reduced_state",
    "symmetry_status",
    "apply_max_dephasing",
    "conjugated_state",
    "state_with_sign_pattern",
    "model_state",
    "star_operator",
    "plaquette_operator",
    "composite_operator",
    "hexagon_flux_operator",
    "z_noise_ops",
    "x_noise_ops",
    "zx_noise_ops",
    "state_to_json",
    "state_from_json",
]
