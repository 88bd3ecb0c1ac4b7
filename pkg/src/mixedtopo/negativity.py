"""Entanglement negativity of stabilizer mixed states.

The logarithmic negativity across a cut is rank(M)/2 bits, where M is the
GF(2) commutation matrix of the generators restricted to one side.  Only
generators straddling the cut can contribute; interior ones give zero rows,
so they are pruned before building M.  A brute-force spectrum oracle and the
loop-constrained bitstring enumeration for the CZ-model maximally mixed
state live here too.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import gf2linalg as gf2
from .errors import BudgetError
from .lattice import Lattice
from .pauli import PauliOp
from .stabmix import StabilizerMixedState

SPECTRUM_BUDGET = 20
CZ_ENUM_BUDGET = 24


def straddling_generators(s: StabilizerMixedState, region: Iterable[int]) -> List[int]:
    """Indices of generators with support on both sides of the cut."""
    region = frozenset(region)
    out = []
    for i, g in enumerate(s.generators):
        sup = set(int(q) for q in g.support())
        if sup & region and sup - region:
            out.append(i)
    return out


def commutation_matrix(
    s: StabilizerMixedState,
    region: Iterable[int],
    generator_indices: Optional[Sequence[int]] = None,
) -> gf2.BitMatrix:
    """M_ij = 1 iff the region restrictions of generators i and j anticommute."""
    region = sorted(set(region))
    if not region:
        raise ValueError("region must be nonempty")
    if generator_indices is None:
        generator_indices = straddling_generators(s, region)
    idx = np.asarray(region, dtype=np.int64)
    xs = np.stack([s.generators[i].x[idx] for i in generator_indices]) if generator_indices else np.zeros((0, len(region)), dtype=np.uint8)
    zs = np.stack([s.generators[i].z[idx] for i in generator_indices]) if generator_indices else np.zeros((0, len(region)), dtype=np.uint8)
    m = (xs.astype(np.int64) @ zs.astype(np.int64).T + zs.astype(np.int64) @ xs.astype(np.int64).T) % 2
    return gf2.BitMatrix.from_dense(m.astype(np.uint8))


@dataclass(frozen=True)
class NegativityReport:
    boundary_count: int
    rank: int
    negativity_bits: float
    cut_length: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "boundary_count": self.boundary_count,
            "rank": self.rank,
            "negativity_bits": self.negativity_bits,
            "cut_length": self.cut_length,
        }


def stabilizer_negativity(
    s: StabilizerMixedState,
    region: Iterable[int],
    cut_length: Optional[int] = None,
) -> NegativityReport:
    """E_N = rank(M)/2 in bits across the given region."""
    region = sorted(set(region))
    idxs = straddling_generators(s, region)
    m = commutation_matrix(s, region, idxs)
    r = gf2.rank(m)
    return NegativityReport(len(idxs), r, r / 2.0, cut_length)


def leading_subleading(reports: Sequence[NegativityReport]) -> Tuple[float, float]:
    """(slope, offset) of E_N = slope*L - offset from two or more cut lengths."""
    pts = [(rep.cut_length, rep.negativity_bits) for rep in reports if rep.cut_length is not None]
    if len(pts) < 2:
        raise ValueError("need at least two cut lengths to split the linear form")
    ls = np.array([p[0] for p in pts], dtype=float)
    es = np.array([p[1] for p in pts], dtype=float)
    slope, intercept = np.polyfit(ls, es, 1)
    return float(slope), float(-intercept)


@dataclass(frozen=True)
class SpectrumSummary:
    boundary_count: int
    trace_norm: float
    negativity_bits: float
    distinct_magnitudes: Tuple[Tuple[float, int], ...]


def negativity_spectrum_oracle(
    s: StabilizerMixedState,
    region: Iterable[int],
    budget: int = SPECTRUM_BUDGET,
) -> SpectrumSummary:
    """Enumerate all 2^N sign assignments of the fictitious-state overlaps.

    The trace norm of the partial transpose is the total absolute overlap
    weight, which must come out as 2^{rank(M)/2}.
    """
    region = sorted(set(region))
    idxs = straddling_generators(s, region)
    n = len(idxs)
    if n > budget:
        raise BudgetError(f"spectrum oracle needs 2^{n} terms, over the 2^{budget} budget")
    m = commutation_matrix(s, region, idxs).to_dense()
    size = 1 << n
    signs = np.zeros(size, dtype=np.int8)
    for i in range(n):
        for j in range(i + 1, n):
            if m[i, j]:
                sigma = np.arange(size)
                both = ((sigma >> i) & 1) & ((sigma >> j) & 1)
                signs ^= both.astype(np.int8)
    f = 1.0 - 2.0 * signs.astype(np.float64)
    # amplitudes <+| prod Z^t |psi> over all t: a Walsh-Hadamard transform
    h = f.copy()
    step = 1
    while step < size:
        h = h.reshape(-1, 2 * step)
        left = h[:, :step].copy()
        right = h[:, step:].copy()
        h[:, :step] = left + right
        h[:, step:] = left - right
        h = h.reshape(size)
        step *= 2
    amps = h / size
    trace_norm = float(np.abs(amps).sum())
    mags, counts = np.unique(np.round(np.abs(amps), 12), return_counts=True)
    distinct = tuple((float(v), int(c)) for v, c in zip(mags, counts) if v > 0)
    return SpectrumSummary(n, trace_norm, float(np.log2(trace_norm)), distinct)


# ---------------------------------------------------------------------------
# CZ-model maximally mixed state
# ---------------------------------------------------------------------------


def _hexagon_parities(lat: Lattice, values: np.ndarray) -> np.ndarray:
    """Per-bitstring parity of adjacent (1,1) pairs, one row per hexagon."""
    total_ok = np.ones(values.shape[0], dtype=bool)
    for (hx, hy) in lat.hexagons():
        sites = lat.hexagon_sites(hx, hy)
        par = np.zeros(values.shape[0], dtype=np.uint8)
        for a, b in zip(sites, sites[1:] + sites[:1]):
            par ^= (values[:, a] & values[:, b])
        total_ok &= par == 0
    return total_ok


def cz_constraint_mask(lat: Lattice) -> np.ndarray:
    """Boolean mask over all 2^n bitstrings satisfying every hexagon constraint.

    The constraint is an even number of adjacent (1,1) pairs around each
    hexagon, i.e. every hexagonal loop of CZ gates acts with +1.
    """
    n = lat.n
    if n > CZ_ENUM_BUDGET:
        raise BudgetError(f"CZ enumeration needs 2^{n} bitstrings, over the 2^{CZ_ENUM_BUDGET} budget")
    idx = np.arange(1 << n, dtype=np.uint32)
    bits = ((idx[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1).astype(np.uint8)
    return _hexagon_parities(lat, bits)


def mms_cz_negativity(lat: Lattice, region_a: Iterable[int]) -> float:
    """Negativity of the joint-flip-symmetric CZ-model maximally mixed state.

    Equals half the probability that flipping the region-A bits of a
    uniformly random constraint-satisfying bitstring leaves the constraint
    set.  Empty regions give 0; growing regions approach 1/2.
    """
    region_a = sorted(set(region_a))
    if any(q < 0 or q >= lat.n for q in region_a):
        raise ValueError("region leaves the lattice")
    mask = 0
    for q in region_a:
        mask |= 1 << q
    ok = cz_constraint_mask(lat)
    members = np.nonzero(ok)[0].astype(np.uint32)
    if members.size == 0:
        raise AssertionError("constraint set is empty")
    if mask == 0:
        return 0.0
    flipped = members ^ np.uint32(mask)
    stays = ok[flipped]
    return 0.5 * float(1.0 - stays.mean())


def mms_cz_dense(lat: Lattice):
    """Dense maximally mixed state with the joint flip and hexagon symmetries.

    Oracle-side construction: the projector onto {global X = +1, every
    hexagon CZ loop = +1}, normalized.  Kept real; returns a DenseState.
    """
    from .convexroof import DenseState

    n = lat.n
    if n > 12:
        raise BudgetError("dense CZ-model state is capped at 12 qubits")
    ok = cz_constraint_mask(lat).astype(np.float64)
    dim = 1 << n
    # bit-reversal: dense kron ordering puts qubit 0 leftmost
    weights = np.zeros(dim)
    for v in range(dim):
        rev = int(f"{v:0{n}b}"[::-1], 2)
        weights[rev] = ok[v]
    diag = np.diag(weights)
    flip = np.zeros((dim, dim))
    for v in range(dim):
        flip[dim - 1 - v, v] = 1.0
    rho = diag + flip @ diag
    rho = rho / np.trace(rho)
    rho = (rho + rho.T) / 2
    return DenseState(n, rho.astype(complex))


__all__ = [
    "NegativityReport",
    "SpectrumSummary",
    "straddling_generators",
    "commutation_matrix",
    "stabilizer_negativity",
    "leading_subleading",
    "negativity_spectrum_oracle",
    "cz_constraint_mask",
    "mms_cz_negativity",
    "mms_cz_dense",
    "SPECTRUM_BUDGET",
    "CZ_ENUM_BUDGET",
]
