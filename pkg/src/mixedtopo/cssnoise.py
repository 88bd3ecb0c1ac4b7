"""Exact entropies of Pauli-dephased stabilizer states at any noise strength.

A product of independent single- or two-qubit Pauli error sources maps the
clean state to a mixture of sign sectors.  Sectors are mutually orthogonal
and share the clean entropy, so

    S(rho_noisy) = H(syndrome distribution) + S(rho_clean),

where the syndrome of an error is the pattern of generator signs it flips.
The distribution is the XOR-convolution of the per-source pushforwards; a
Walsh-Hadamard fast path kicks in once the syndrome space is large.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BudgetError
from .lattice import Lattice
from .pauli import PauliOp, restrict, symplectic_product
from .stabmix import (
    StabilizerMixedState,
    entropy_region,
    region_subgroup_generators,
    zx_noise_ops,
)

DEFAULT_SYNDROME_BUDGET = 24
_WHT_THRESHOLD = 1 << 10


@dataclass(frozen=True)
class ErrorSource:
    """One independent error event: apply ops[j] with probability probs[j]."""

    ops: Tuple[PauliOp, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        if len(self.ops) != len(self.probs):
            raise ValueError("ops and probs must pair up")
        if any(p < 0 or p > 1 for p in self.probs):
            raise ValueError("probabilities must lie in [0, 1]")
        if sum(self.probs) > 1 + 1e-12:
            raise ValueError("probabilities exceed 1")
        for op in self.ops:
            if not op.is_hermitian():
                raise ValueError("noise ops must be Hermitian Paulis")

    @property
    def identity_prob(self) -> float:
        return max(0.0, 1.0 - sum(self.probs))


@dataclass(frozen=True)
class NoiseSpec:
    """Independent error sources on a fixed register."""

    n: int
    sources: Tuple[ErrorSource, ...]

    def restricted(self, region: Iterable[int]) -> "NoiseSpec":
        """Noise as seen by the reduced state on region.

        Ops are cut to their region factors; sources that restrict to the
        identity are dropped (they can no longer flip anything).
        """
        region = list(region)
        out = []
        for src in self.sources:
            ops, probs = [], []
            for op, p in zip(src.ops, src.probs):
                cut = restrict(op, region)
                if cut.weight():
                    ops.append(cut)
                    probs.append(p)
            if ops:
                out.append(ErrorSource(tuple(ops), tuple(probs)))
        return NoiseSpec(self.n, tuple(out))


def pauli_noise(lat_or_n, p_x: float = 0.0, p_z: float = 0.0) -> NoiseSpec:
    """Independent per-qubit X and Z dephasing sources."""
    n = lat_or_n.n if isinstance(lat_or_n, Lattice) else int(lat_or_n)
    sources = []
    for q in range(n):
        if p_z > 0:
            sources.append(ErrorSource((PauliOp.single(n, q, "Z"),), (float(p_z),)))
        if p_x > 0:
            sources.append(ErrorSource((PauliOp.single(n, q, "X"),), (float(p_x),)))
    return NoiseSpec(n, tuple(sources))


def zx_noise(lat: Lattice, p: float) -> NoiseSpec:
    """Two-body Z_e X_{e+delta} dephasing on every edge with a partner."""
    sources = tuple(ErrorSource((op,), (float(p),)) for op in zx_noise_ops(lat) if p > 0)
    return NoiseSpec(lat.n, sources)


def noise_from_table(n: int, table: Sequence[Sequence[Tuple[str, float]]]) -> NoiseSpec:
    """Per-qubit error tables [(letter, prob), ...], one entry per qubit."""
    if len(table) != n:
        raise ValueError("table needs one row per qubit")
    sources = []
    for q, row in enumerate(table):
        ops = tuple(PauliOp.single(n, q, letter) for letter, _ in row)
        probs = tuple(float(p) for _, p in row)
        if ops:
            sources.append(ErrorSource(ops, probs))
    return NoiseSpec(n, tuple(sources))


@dataclass(frozen=True)
class SyndromeDistribution:
    """Probabilities over GF(2)^k sign-flip patterns."""

    k: int
    probs: np.ndarray

    def __post_init__(self):
        if self.probs.shape != (1 << self.k,):
            raise ValueError("probability vector length must be 2^k")
        if self.probs.min() < -1e-12:
            raise ValueError("negative probability")
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")
        self.probs.flags.writeable = False

    def entropy_bits(self) -> float:
        p = self.probs[self.probs > 1e-300]
        return float(-(p * np.log2(p)).sum())


def _walsh_hadamard(values: np.ndarray) -> np.ndarray:
    out = values.copy()
    h = 1
    size = out.size
    while h < size:
        out = out.reshape(-1, 2 * h)
        left = out[:, :h].copy()
        right = out[:, h:].copy()
        out[:, :h] = left + right
        out[:, h:] = left - right
        out = out.reshape(size)
        h *= 2
    return out


def _source_vectors(source: ErrorSource, gens: Sequence[PauliOp]) -> List[int]:
    """Syndrome (as an int) each op of the source imprints on the generators."""
    vecs = []
    for op in source.ops:
        v = 0
        for j, g in enumerate(gens):
            if symplectic_product(op, g):
                v |= 1 << j
        vecs.append(v)
    return vecs


def syndrome_distribution(
    s: StabilizerMixedState,
    noise: NoiseSpec,
    region: Optional[Iterable[int]] = None,
    budget: int = DEFAULT_SYNDROME_BUDGET,
) -> SyndromeDistribution:
    """Pushforward of the error distribution through the commutation map.

    The syndrome space is indexed by the generators of the subgroup living
    inside the region (the whole register when region is None).
    """
    if noise.n != s.n:
        raise ValueError("noise and state sizes differ")
    if region is None:
        region = range(s.n)
        gens = list(s.generators)
        spec = noise
    else:
        region = list(region)
        gens = region_subgroup_generators(s, region)
        spec = noise.restricted(region)
    k = len(gens)
    if k > budget:
        raise BudgetError(
            f"syndrome space needs 2^{k} entries, over the budget of 2^{budget}"
        )
    size = 1 << k
    per_source = []
    for src in spec.sources:
        vecs = _source_vectors(src, gens)
        entries = [(0, src.identity_prob)]
        entries += list(zip(vecs, src.probs))
        per_source.append(entries)

    if size > _WHT_THRESHOLD and per_source:
        # spectral product: each source transforms to sum_t p_t (-1)^{w.t}
        idx = np.arange(size, dtype=np.uint64)
        spectrum = np.ones(size)
        for entries in per_source:
            fac = np.zeros(size)
            for vec, p in entries:
                if vec == 0:
                    fac += p
                    continue
                masked = idx & np.uint64(vec)
                parity = np.zeros(size, dtype=np.uint64)
                m = masked.copy()
                while m.any():
                    parity ^= m & np.uint64(1)
                    m >>= np.uint64(1)
                fac += p * (1.0 - 2.0 * parity.astype(np.float64))
            spectrum *= fac
        probs = _walsh_hadamard(spectrum) / size
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
    else:
        probs = np.zeros(size)
        probs[0] = 1.0
        for entries in per_source:
            nxt = np.zeros(size)
            for vec, p in entries:
                if p == 0:
                    continue
                if vec == 0:
                    nxt += p * probs
                else:
                    nxt += p * probs[np.arange(size) ^ vec]
            probs = nxt
    return SyndromeDistribution(k, probs)


def noisy_entropy_region(
    s: StabilizerMixedState,
    noise: NoiseSpec,
    region: Optional[Iterable[int]] = None,
    budget: int = DEFAULT_SYNDROME_BUDGET,
) -> float:
    """Shannon entropy of the syndrome pushforward plus the clean entropy."""
    region = list(region) if region is not None else list(range(s.n))
    dist = syndrome_distribution(s, noise, region, budget=budget)
    return dist.entropy_bits() + entropy_region(s, region)


def noisy_cmi(
    s: StabilizerMixedState,
    noise: NoiseSpec,
    p,
    budget: int = DEFAULT_SYNDROME_BUDGET,
) -> float:
    a = p.region("A")
    b = p.regions.get("B", frozenset())
    c = p.regions.get("C", frozenset())
    return (
        noisy_entropy_region(s, noise, a | b, budget=budget)
        + noisy_entropy_region(s, noise, b | c, budget=budget)
        - noisy_entropy_region(s, noise, b, budget=budget)
        - noisy_entropy_region(s, noise, a | b | c, budget=budget)
    )


def syndrome_entropy_sampled(
    s: StabilizerMixedState,
    noise: NoiseSpec,
    region: Iterable[int],
    samples: int,
    seed: int = 0,
) -> float:
    """Plug-in estimate of the syndrome entropy from Monte Carlo samples.

    Opt-in approximation for syndrome spaces over budget; returns the
    empirical-distribution entropy plus the clean term.
    """
    region = list(region)
    gens = region_subgroup_generators(s, region)
    spec = noise.restricted(region)
    rng = np.random.default_rng(seed)
    source_vecs = []
    for src in spec.sources:
        vecs = _source_vectors(src, gens)
        source_vecs.append((np.array([0] + list(vecs), dtype=np.int64),
                            np.array([src.identity_prob] + list(src.probs))))
    counts: dict = {}
    for _ in range(samples):
        synd = 0
        for vecs, probs in source_vecs:
            synd ^= int(rng.choice(vecs, p=probs / probs.sum()))
        counts[synd] = counts.get(synd, 0) + 1
    freqs = np.array(list(counts.values()), dtype=np.float64) / samples
    h = float(-(freqs * np.log2(freqs)).sum())
    return h + entropy_region(s, region)


__all__ = [
    "ErrorSource",
    "NoiseSpec",
    "SyndromeDistribution",
    "pauli_noise",
    "zx_noise",
    "noise_from_table",
    "syndrome_distribution",
    "noisy_entropy_region",
    "noisy_cmi",
    "syndrome_entropy_sampled",
    "DEFAULT_SYNDROME_BUDGET",
]
