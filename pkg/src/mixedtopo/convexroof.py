"""Dense few-qubit micro-lab: exact density matrices as the independent
oracle for the stabilizer fast paths, plus convex-roof minimization of the
conditional mutual information over state decompositions.

Everything here is explicit 2^n x 2^n linear algebra, so qubit counts are
capped hard.  Entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .errors import BudgetError
from .pauli import PauliOp
from .stabmix import StabilizerMixedState

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_XZ = _X @ _Z

_DENSIFY_CAP = 14
_NEGATIVITY_CAP = 12
_ROOF_CAP = 10
_EIG_FLOOR = 1e-12


def pauli_to_dense(op: PauliOp) -> np.ndarray:
    """Exact matrix of a phased Pauli, qubit 0 as the leftmost tensor factor."""
    out = np.array([[op.phase_factor()]], dtype=complex)
    for xb, zb in zip(op.x, op.z):
        factor = (_I2, _X, _Z, _XZ)[int(xb) + 2 * int(zb)]
        out = np.kron(out, factor)
    return out


@dataclass(frozen=True)
class DenseState:
    """Explicit density matrix, validated Hermitian/PSD/unit-trace."""

    n: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        dim = 2 ** self.n
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.matrix.shape} is not 2^{self.n} square")
        if np.abs(self.matrix - self.matrix.conj().T).max() > 1e-10:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(self.matrix).real - 1.0) > 1e-10:
            raise ValueError("matrix trace is not 1")
        if np.linalg.eigvalsh(self.matrix).min() < -1e-10:
            raise ValueError("matrix has a negative eigenvalue")
        self.matrix.flags.writeable = False


def densify(s: StabilizerMixedState) -> DenseState:
    """Materialize rho = prod (1 + S_i)/2, normalized."""
    if s.n > _DENSIFY_CAP:
        raise BudgetError(f"densify is capped at {_DENSIFY_CAP} qubits, got {s.n}")
    dim = 2 ** s.n
    rho = np.eye(dim, dtype=complex)
    for g in s.generators:
        rho = (rho + pauli_to_dense(g) @ rho) / 2.0
    rho /= np.trace(rho).real
    return DenseState(s.n, rho)


def partial_trace(matrix: np.ndarray, n: int, keep: Sequence[int]) -> np.ndarray:
    """Trace out every qubit not in keep; keep order is ascending."""
    keep = sorted(keep)
    drop = [q for q in range(n) if q not in keep]
    tensor = matrix.reshape((2,) * (2 * n))
    # move kept row/col axes to the front, dropped axes to the back
    perm = keep + drop + [n + q for q in keep] + [n + q for q in drop]
    tensor = tensor.transpose(perm)
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    tensor = tensor.reshape(dk, dd, dk, dd)
    return np.einsum("ijkj->ik", tensor)


def entropy_bits(matrix: np.ndarray) -> float:
    vals = np.linalg.eigvalsh(matrix)
    vals = vals[vals > _EIG_FLOOR]
    return float(-(vals * np.log2(vals)).sum())


def entropy_region_dense(rho: DenseState, region: Sequence[int]) -> float:
    region = sorted(region)
    if not region:
        return 0.0
    return entropy_bits(partial_trace(rho.matrix, rho.n, region))


def cmi_dense(rho: DenseState, p) -> float:
    """I(A:C|B) in bits; qubits outside A,B,C are traced out."""
    a = sorted(p.region("A"))
    b = sorted(p.regions.get("B", frozenset()))
    c = sorted(p.regions.get("C", frozenset()))
    return (
        entropy_region_dense(rho, a + b)
        + entropy_region_dense(rho, b + c)
        - entropy_region_dense(rho, b)
        - entropy_region_dense(rho, a + b + c)
    )


def partial_transpose(matrix: np.ndarray, n: int, region: Sequence[int]) -> np.ndarray:
    tensor = matrix.reshape((2,) * (2 * n))
    perm = list(range(2 * n))
    for q in region:
        perm[q], perm[n + q] = perm[n + q], perm[q]
    return tensor.transpose(perm).reshape(matrix.shape)


def negativity_dense(rho: DenseState, region: Sequence[int]) -> float:
    """log2 of the partial-transpose trace norm."""
    if rho.n > _NEGATIVITY_CAP:
        raise BudgetError(f"negativity_dense is capped at {_NEGATIVITY_CAP} qubits")
    pt = partial_transpose(rho.matrix, rho.n, sorted(region))
    return float(np.log2(np.abs(np.linalg.eigvalsh(pt)).sum()))


def ghz_mixture(p: float) -> DenseState:
    """p |GHZ+><GHZ+| + (1-p) |GHZ-><GHZ-| on three qubits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    plus = np.zeros(8, dtype=complex)
    minus = np.zeros(8, dtype=complex)
    plus[0] = plus[7] = 1 / np.sqrt(2)
    minus[0] = 1 / np.sqrt(2)
    minus[7] = -1 / np.sqrt(2)
    rho = p * np.outer(plus, plus.conj()) + (1 - p) * np.outer(minus, minus.conj())
    return DenseState(3, rho)


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """Weighted member states recombining to the target."""

    weights: Tuple[float, ...]
    members: Tuple[np.ndarray, ...]
    pure_only: bool

    def recombined(self) -> np.ndarray:
        out = np.zeros_like(self.members[0])
        for w, m in zip(self.weights, self.members):
            out = out + w * m
        return out


def _eig_factors(rho: DenseState) -> Tuple[np.ndarray, np.ndarray]:
    """Rank-trimmed spectral factors: columns sqrt(lam_k) |k>."""
    vals, vecs = np.linalg.eigh(rho.matrix)
    keep = vals > 1e-10
    return vals[keep], vecs[:, keep]


def rank_of(rho: DenseState) -> int:
    vals = np.linalg.eigvalsh(rho.matrix)
    return int((vals > 1e-10).sum())


def members_from_isometry(rho: DenseState, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Subnormalized pure members |psi_i> = sum_k V_ik sqrt(lam_k) |k>.

    Returns (weights, states); any member with negligible weight is kept with
    weight zero and an arbitrary normalized state so shapes stay stable.
    """
    vals, vecs = _eig_factors(rho)
    r = vals.size
    if v.shape[1] != r:
        raise ValueError(f"isometry needs {r} columns, got {v.shape[1]}")
    if np.abs(v.conj().T @ v - np.eye(r)).max() > 1e-8:
        raise ValueError("columns are not orthonormal")
    amps = vecs * np.sqrt(vals)  # dim x r
    psis = amps @ v.T  # dim x m
    weights = np.einsum("di,di->i", psis.conj(), psis).real
    states = np.zeros_like(psis)
    for i in range(psis.shape[1]):
        if weights[i] > 1e-14:
            states[:, i] = psis[:, i] / np.sqrt(weights[i])
        else:
            states[0, i] = 1.0
    return weights, states


def sample_decomposition(
    rho: DenseState,
    m: int,
    isometry: Optional[np.ndarray] = None,
    groups: Optional[Sequence[Sequence[int]]] = None,
    rng: Optional[np.random.Generator] = None,
) -> Decomposition:
    """A decomposition of rho with m pure members, optionally grouped.

    With isometry=None a Haar-ish random one is drawn from rng (default
    seeded generator).  Grouping member indices yields mixed members; the
    trivial single group recovers rho itself.
    """
    r = rank_of(rho)
    if m < r:
        raise ValueError(f"need at least rank={r} members, got {m}")
    if isometry is None:
        if rng is None:
            rng = np.random.default_rng(0)
        raw = rng.normal(size=(m, r)) + 1j * rng.normal(size=(m, r))
        isometry, _ = np.linalg.qr(raw)
        isometry = isometry[:, :r]
    weights, states = members_from_isometry(rho, isometry)
    if groups is None:
        members = tuple(np.outer(states[:, i], states[:, i].conj()) for i in range(m))
        dec = Decomposition(tuple(float(w) for w in weights), members, pure_only=True)
    else:
        flat = sorted(i for g in groups for i in g)
        if flat != list(range(m)):
            raise ValueError("groups must partition the member indices")
        gw, gm = [], []
        for g in groups:
            w = float(sum(weights[i] for i in g))
            mat = np.zeros_like(rho.matrix)
            for i in g:
                mat = mat + weights[i] * np.outer(states[:, i], states[:, i].conj())
            gw.append(w)
            gm.append(mat / w if w > 1e-14 else np.eye(mat.shape[0], dtype=complex) / mat.shape[0])
        dec = Decomposition(tuple(gw), tuple(gm), pure_only=False)
    err = np.abs(dec.recombined() - rho.matrix).max()
    if err > 1e-8:
        raise AssertionError(f"decomposition failed to recombine ({err:.2e})")
    return dec


# ---------------------------------------------------------------------------
# convex-roof minimization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoofBudget:
    members: Optional[int] = None  # default: rank^2, capped
    restarts: int = 16
    max_iter: int = 400
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iter < 1 or self.tol <= 0:
            raise ValueError("invalid roof budget")
        if self.members is not None and self.members < 1:
            raise ValueError("invalid roof budget: members must be >= 1")


@dataclass(frozen=True)
class RoofResult:
    value: float
    decomposition: Decomposition
    mode: str
    trace: Tuple[dict, ...]


def _unitary_from_angles(m: int, params: np.ndarray) -> np.ndarray:
    """Unitary from Givens rotations over all index pairs plus column phases."""
    u = np.eye(m, dtype=complex)
    k = 0
    for i in range(m):
        for j in range(i + 1, m):
            theta, phi = params[k], params[k + 1]
            k += 2
            g = np.eye(m, dtype=complex)
            g[i, i] = np.cos(theta)
            g[j, j] = np.cos(theta)
            g[i, j] = -np.sin(theta) * np.exp(1j * phi)
            g[j, i] = np.sin(theta) * np.exp(-1j * phi)
            u = g @ u
    phases = params[k : k + m]
    return u * np.exp(1j * phases)[np.newaxis, :]


def n_roof_params(m: int) -> int:
    return m * (m - 1) + m


def _roof_objective(rho, part, m, r, groups):
    dim_cache = {}

    def objective(params: np.ndarray) -> float:
        v = _unitary_from_angles(m, params)[:, :r]
        weights, states = members_from_isometry(rho, v)
        total = 0.0
        if groups is None:
            for i in range(m):
                if weights[i] < 1e-12:
                    continue
                member = DenseState.__new__(DenseState)
                object.__setattr__(member, "n", rho.n)
                object.__setattr__(member, "matrix", np.outer(states[:, i], states[:, i].conj()))
                total += weights[i] * cmi_dense(member, part)
        else:
            for g in groups:
                w = float(sum(weights[i] for i in g))
                if w < 1e-12:
                    continue
                mat = np.zeros_like(rho.matrix)
                for i in g:
                    mat = mat + weights[i] * np.outer(states[:, i], states[:, i].conj())
                member = DenseState.__new__(DenseState)
                object.__setattr__(member, "n", rho.n)
                object.__setattr__(member, "matrix", mat / w)
                total += w * cmi_dense(member, part)
        return total

    return objective


def convex_roof_minimize(
    rho: DenseState,
    part,
    mode: str = "pure",
    budget: Optional[RoofBudget] = None,
) -> RoofResult:
    """Minimize the decomposition-averaged CMI of rho.

    mode 'pure' searches pure-member decompositions; 'mixed' additionally
    tries grouped (mixed-member) decompositions and the trivial one, so its
    value never exceeds the plain CMI.  The value is an upper bound on the
    true roof and is nonincreasing over restarts; fixed seeds reproduce.
    """
    if rho.n > _ROOF_CAP:
        raise BudgetError(f"convex roof is capped at {_ROOF_CAP} qubits")
    if mode not in ("pure", "mixed"):
        raise ValueError("mode must be 'pure' or 'mixed'")
    budget = budget or RoofBudget()
    r = rank_of(rho)
    m = budget.members if budget.members is not None else min(r * r, 8)
    if m < r:
        raise ValueError(f"budget allows {m} members but rank is {r}")
    rng = np.random.default_rng(budget.seed)
    nparams = n_roof_params(m)

    candidates: List[Tuple[str, Optional[Tuple[Tuple[int, ...], ...]]]] = [("pure", None)]
    if mode == "mixed":
        candidates.append(("trivial", (tuple(range(m)),)))
        pairs = tuple((i, (i + 1) % m) for i in range(0, m - 1, 2))
        if m > 2:
            candidates.append(("paired", pairs + tuple((i,) for i in range(m) if not any(i in p for p in pairs))))

    best_value = np.inf
    best_params = None
    best_grouping = None
    trace: List[dict] = []

    for label, groups in candidates:
        if label == "trivial":
            value = cmi_dense(rho, part)
            trace.append({"candidate": label, "restart": 0, "value": float(value)})
            if value < best_value - 0:
                best_value = value
                best_params = np.zeros(nparams)
                best_grouping = groups
            continue
        objective = _roof_objective(rho, part, m, r, groups)
        for restart in range(budget.restarts):
            x0 = np.zeros(nparams) if restart == 0 else rng.uniform(0, 2 * np.pi, nparams)
            res = minimize(
                objective,
                x0,
                method="Nelder-Mead",
                options={
                    "maxiter": budget.max_iter,
                    "xatol": budget.tol,
                    "fatol": budget.tol,
                    "disp": False,
                },
            )
            value = float(res.fun)
            trace.append({"candidate": label, "restart": restart, "value": value})
            if value < best_value:
                best_value = value
                best_params = res.x.copy()
                best_grouping = groups

    if best_grouping == (tuple(range(m)),):
        dec = Decomposition((1.0,), (rho.matrix,), pure_only=False)
    else:
        v = _unitary_from_angles(m, best_params)[:, :r]
        dec = sample_decomposition(rho, m, isometry=v, groups=best_grouping)
    return RoofResult(float(best_value), dec, mode, tuple(trace))


__all__ = [
    "DenseState",
    "Decomposition",
    "RoofBudget",
    "RoofResult",
    "pauli_to_dense",
    "densify",
    "partial_trace",
    "partial_transpose",
    "entropy_bits",
    "entropy_region_dense",
    "cmi_dense",
    "negativity_dense",
    "ghz_mixture",
    "rank_of",
    "members_from_isometry",
    "sample_decomposition",
    "convex_roof_minimize",
    "n_roof_params",
]
