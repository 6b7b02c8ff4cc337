"""Reduced density matrices, partial transposes and entanglement measures.

A ``DensityMatrix`` keeps an explicit ``kept`` edge ordering: kept edge
``kept[k]`` is bit ``k`` of the matrix index, mirroring the state convention.

Two routes to the spectrum of ``rho_AB^{T_A}`` exist. The dense route
(``reduce`` + ``partial_transpose``) builds the ``2^k x 2^k`` matrix for at most
13 kept qubits. ``state_pt_spectrum`` works directly from a sparse state: it
projects onto the supports of ``rho_A`` and ``rho_B`` first, which leaves the
nonzero spectrum of the partial transpose unchanged and keeps the matrix small.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, ResourceLimitError
from .groundstate import StateVector
from .lattice import Region

DENSE_MAX_KEPT = 13
COMPRESSED_MAX_DIM = 4096
EIG_ZERO = 1e-12

EdgeSet = Union[Region, Iterable[int]]


def _edges(r: EdgeSet) -> List[int]:
    if isinstance(r, Region):
        return r.sorted()
    if isinstance(r, DensityMatrix):
        raise TypeError("expected an edge set")
    return list(dict.fromkeys(int(e) for e in r))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    kept: Tuple[int, ...]
    matrix: np.ndarray

    @property
    def k(self) -> int:
        return len(self.kept)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def _axis(self, e: int) -> int:
        # C-order reshape puts the most significant bit first
        return self.k - 1 - self.kept.index(e)

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        """``self (x) other`` with ``other``'s edges appended as higher bits."""
        if set(self.kept) & set(other.kept):
            raise DomainError("tensor factors share edges")
        return DensityMatrix(self.kept + other.kept, np.kron(other.matrix, self.matrix))

    def reorder(self, kept: Sequence[int]) -> "DensityMatrix":
        """Same operator with a different kept-edge ordering."""
        kept = tuple(kept)
        if sorted(kept) != sorted(self.kept):
            raise DomainError("reorder needs a permutation of the kept edges")
        k = self.k
        t = self.matrix.reshape((2,) * (2 * k))
        src = [self._axis(e) for e in reversed(kept)]
        t = t.transpose(src + [a + k for a in src])
        return DensityMatrix(kept, t.reshape(1 << k, 1 << k))

    @classmethod
    def from_pure(cls, psi: StateVector, kept: Sequence[int] = None) -> "DensityMatrix":
        return reduce(psi, range(psi.n) if kept is None else kept)

    def __repr__(self):
        return f"DensityMatrix(k={self.k}, kept={list(self.kept)})"


# ---------------------------------------------------------------- reduce / transpose


def _reduce_state(psi: StateVector, keep: List[int]) -> np.ndarray:
    rest = [e for e in range(psi.n) if e not in set(keep)]
    a_cfg = psi.bits(keep)
    ua, ia = np.unique(a_cfg, return_inverse=True)
    ub, ib = np.unique(psi.bits(rest), return_inverse=True)
    M = sp.csr_matrix((psi.values, (ia, ib)), shape=(len(ua), len(ub)))
    small = (M @ M.conj().T).toarray()
    out = np.zeros((1 << len(keep), 1 << len(keep)), dtype=complex)
    out[np.ix_(ua, ua)] = small
    return out


def reduce(obj: Union[StateVector, DensityMatrix], keep: EdgeSet, max_kept: int = DENSE_MAX_KEPT) -> DensityMatrix:
    """Partial trace onto ``keep`` (order preserved; a ``Region`` is taken sorted)."""
    keep = _edges(keep)
    if len(keep) > max_kept:
        raise ResourceLimitError(f"{len(keep)} kept qubits exceeds the dense cap of {max_kept}")
    if isinstance(obj, StateVector):
        if any(e < 0 or e >= obj.n for e in keep):
            raise DomainError("kept edges out of range")
        return DensityMatrix(tuple(keep), _reduce_state(obj, keep))
    missing = set(keep) - set(obj.kept)
    if missing:
        raise DomainError(f"edges {sorted(missing)} were already traced out")
    k = obj.k
    trace = [e for e in obj.kept if e not in set(keep)]
    order = [obj._axis(e) for e in reversed(keep)] + [obj._axis(e) for e in trace]
    t = obj.matrix.reshape((2,) * (2 * k)).transpose(order + [a + k for a in order])
    dk, dt = 1 << len(keep), 1 << len(trace)
    t = t.reshape(dk, dt, dk, dt)
    return DensityMatrix(tuple(keep), np.einsum("ajbj->ab", t))


def partial_transpose(rho: DensityMatrix, A_sub: EdgeSet) -> np.ndarray:
    """Transpose the row and column indices of the ``A_sub`` qubits."""
    A = _edges(A_sub)
    missing = set(A) - set(rho.kept)
    if missing:
        raise DomainError(f"edges {sorted(missing)} are not kept")
    k = rho.k
    perm = list(range(2 * k))
    for e in A:
        ax = rho._axis(e)
        perm[ax], perm[ax + k] = ax + k, ax
    t = rho.matrix.reshape((2,) * (2 * k)).transpose(perm)
    return t.reshape(1 << k, 1 << k)


def pt_spectrum(rho: DensityMatrix, A_sub: EdgeSet) -> np.ndarray:
    return np.linalg.eigvalsh(partial_transpose(rho, A_sub))


def _log_neg_from_spectrum(lam: np.ndarray) -> float:
    return float(np.log2(np.sum(np.abs(lam))))


def log_negativity(rho: Union[DensityMatrix, np.ndarray], A_sub: EdgeSet = None) -> float:
    """``log2 tr |rho^{T_A}|`` in bits.

    ``rho`` may also be an already computed spectrum of ``rho^{T_A}``.
    """
    lam = rho if isinstance(rho, np.ndarray) and rho.ndim == 1 else pt_spectrum(rho, A_sub)
    return _log_neg_from_spectrum(lam)


def negativity(rho: Union[DensityMatrix, np.ndarray], A_sub: EdgeSet = None) -> float:
    """Sum of the magnitudes of the negative eigenvalues of ``rho^{T_A}``."""
    lam = rho if isinstance(rho, np.ndarray) and rho.ndim == 1 else pt_spectrum(rho, A_sub)
    return float(-np.sum(lam[lam < 0]))


# ---------------------------------------------------------------- entropies


def _probs(rho_or_p) -> np.ndarray:
    if isinstance(rho_or_p, DensityMatrix):
        lam = rho_or_p.eigenvalues()
        dim = len(lam)
    else:
        lam = np.asarray(rho_or_p, dtype=float)
        dim = max(len(lam), 1)
    return lam[lam > EIG_ZERO * dim]


def von_neumann(rho) -> float:
    p = _probs(rho)
    return float(-np.sum(p * np.log2(p)))


def renyi(rho, q: float) -> float:
    """``log2 tr rho^q / (1 - q)``; ``q = 1`` is the von Neumann entropy."""
    if q <= 0:
        raise DomainError("Renyi index must be positive")
    if q == 1:
        return von_neumann(rho)
    p = _probs(rho)
    return float(np.log2(np.sum(p ** q)) / (1 - q))


def _nonzero(lam: np.ndarray) -> np.ndarray:
    return lam[np.abs(lam) > EIG_ZERO * max(len(lam), 1)]


def extended_negativity_plus(rho, A_sub: EdgeSet = None, alpha: float = 0.5) -> float:
    """``log2 tr |rho^{T_A}|^{2 alpha} / (2 (1 - alpha))``; ``alpha = 1/2`` is ``E_N``."""
    if alpha == 1:
        raise DomainError("N+ is undefined at alpha = 1")
    lam = rho if isinstance(rho, np.ndarray) and rho.ndim == 1 else pt_spectrum(rho, A_sub)
    lam = _nonzero(lam)
    return float(np.log2(np.sum(np.abs(lam) ** (2 * alpha))) / (2 * (1 - alpha)))


def extended_negativity_minus(rho, A_sub: EdgeSet = None, alpha: float = 1.0) -> float:
    """``log2 tr[sign(rho^{T_A}) |rho^{T_A}|^{2 alpha}] / (1 - 2 alpha)``."""
    if alpha == 0.5:
        raise DomainError("N- is undefined at alpha = 1/2")
    lam = rho if isinstance(rho, np.ndarray) and rho.ndim == 1 else pt_spectrum(rho, A_sub)
    lam = _nonzero(lam)
    total = float(np.sum(np.sign(lam) * np.abs(lam) ** (2 * alpha)))
    if total <= 0:
        raise DomainError("tr[sign |rho^T|^{2 alpha}] is not positive")
    return float(np.log2(total) / (1 - 2 * alpha))


def mutual_information(rho_AB: DensityMatrix, A_sub: EdgeSet) -> float:
    A = _edges(A_sub)
    B = [e for e in rho_AB.kept if e not in set(A)]
    return von_neumann(reduce(rho_AB, A)) + von_neumann(reduce(rho_AB, B)) - von_neumann(rho_AB)


def state_entropy(psi: StateVector, region: EdgeSet, q: float = 1.0) -> float:
    """Renyi-``q`` entropy of a region of a pure state, from its Schmidt spectrum."""
    from .groundstate import schmidt_spectrum
    edges = _edges(region)
    if not edges or len(edges) == psi.n:
        return 0.0
    return schmidt_spectrum(psi, edges).renyi(q)


def state_mutual_information(psi: StateVector, A: EdgeSet, B: EdgeSet) -> float:
    """``S(A) + S(B) - S(AB)`` for regions of a pure state, with ``S(AB) = S(rest)``."""
    A, B = _edges(A), _edges(B)
    return state_entropy(psi, A) + state_entropy(psi, B) - state_entropy(psi, A + B)


# ---------------------------------------------------------------- compressed state route


def _range_basis(ia: np.ndarray, jb: np.ndarray, vals: np.ndarray, shape: Tuple[int, int], tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (as dense ``shape[0] x r``) of the column space of a sparse matrix."""
    M = sp.csr_matrix((vals, (ia, jb)), shape=shape)
    if shape[0] <= shape[1]:
        G = (M @ M.conj().T).toarray()
        w, V = np.linalg.eigh(G)
        keep = w > tol * max(w.max(), 1e-300)
        return V[:, keep]
    G = (M.conj().T @ M).toarray()
    w, V = np.linalg.eigh(G)
    keep = w > tol * max(w.max(), 1e-300)
    Q = M @ V[:, keep] / np.sqrt(w[keep])
    return np.asarray(Q)


def state_pt_spectrum(psi: StateVector, A: EdgeSet, B: EdgeSet, max_dim: int = COMPRESSED_MAX_DIM) -> np.ndarray:
    """Nonzero spectrum of ``(tr_C |psi><psi|)^{T_A}`` with ``C`` the remaining edges."""
    A, B = _edges(A), _edges(B)
    if set(A) & set(B):
        raise DomainError("A and B overlap")
    C = [e for e in range(psi.n) if e not in set(A) | set(B)]
    ua, ia = np.unique(psi.bits(A), return_inverse=True)
    ub, ib = np.unique(psi.bits(B), return_inverse=True)
    uc, ic = np.unique(psi.bits(C), return_inverse=True)
    na, nb, nc = len(ua), len(ub), len(uc)
    vals = psi.values

    _, ibc = np.unique(ib * nc + ic, return_inverse=True)
    QA = _range_basis(ia, ibc, vals, (na, int(ibc.max()) + 1))
    _, iac = np.unique(ia * nc + ic, return_inverse=True)
    QB = _range_basis(ib, iac, vals, (nb, int(iac.max()) + 1))
    rA, rB = QA.shape[1], QB.shape[1]
    if rA * rB > max_dim:
        raise ResourceLimitError(f"compressed dimension {rA}x{rB} exceeds {max_dim}")

    cQA, cQB = QA.conj(), QB.conj()
    order = np.argsort(ic, kind="stable")
    starts = np.flatnonzero(np.r_[True, np.diff(ic[order]) != 0])
    ends = np.r_[starts[1:], len(order)]
    Phi = np.empty((len(starts), rA * rB), dtype=complex)
    for row, (s, e) in enumerate(zip(starts, ends)):
        sel = order[s:e]
        Phi[row] = (cQA[ia[sel]].T @ (vals[sel, None] * cQB[ib[sel]])).reshape(-1)
    M = Phi.T @ Phi.conj()
    T = M.reshape(rA, rB, rA, rB).transpose(2, 1, 0, 3).reshape(rA * rB, rA * rB)
    return np.linalg.eigvalsh(T)


def pure_pt_spectrum(p: np.ndarray) -> np.ndarray:
    """Spectrum of ``|psi><psi|^{T_A}`` from Schmidt probabilities ``p``.

    The eigenvalues are ``p_a`` and ``+-sqrt(p_a p_b)`` for ``a < b``.
    """
    p = np.asarray(p, dtype=float)
    iu = np.triu_indices(len(p), k=1)
    off = np.sqrt(p[iu[0]] * p[iu[1]])
    return np.sort(np.concatenate([p, off, -off]))


def state_log_negativity(psi: StateVector, A: EdgeSet, B: EdgeSet = None, max_dim: int = COMPRESSED_MAX_DIM) -> float:
    """``E_N(A|B)`` of ``tr_C |psi><psi|``; ``B = None`` means the full complement of ``A``."""
    A = _edges(A)
    if B is None or len(set(A) | set(_edges(B))) == psi.n:
        from .groundstate import schmidt_spectrum
        return schmidt_spectrum(psi, A).log_negativity
    return log_negativity(state_pt_spectrum(psi, A, B, max_dim))


# ---------------------------------------------------------------- reports


@dataclass
class EntanglementReport:
    log_negativity: float
    negativity: float
    renyi: Dict[float, float]
    von_neumann: float
    pt_spectrum: Optional[List[float]] = None
    kept: Optional[List[int]] = None
    A: Optional[List[int]] = None
    extras: Dict[str, float] = field(default_factory=dict)

    @property
    def min_pt_eigenvalue(self) -> Optional[float]:
        return min(self.pt_spectrum) if self.pt_spectrum else None

    def to_dict(self) -> Dict:
        return {
            "log_negativity": self.log_negativity,
            "negativity": self.negativity,
            "renyi": {repr(float(q)): v for q, v in self.renyi.items()},
            "von_neumann": self.von_neumann,
            "pt_spectrum": self.pt_spectrum,
            "kept": self.kept,
            "A": self.A,
            "extras": self.extras,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def entanglement_report(rho: DensityMatrix, A_sub: EdgeSet, renyi_orders: Sequence[float] = (0.5, 2.0)) -> EntanglementReport:
    """All measures of a dense ``rho_AB`` with the transpose on ``A_sub``; entropies are of ``rho_A``."""
    A = _edges(A_sub)
    lam = pt_spectrum(rho, A)
    rho_A = reduce(rho, A)
    pA = _probs(rho_A)
    return EntanglementReport(
        log_negativity=_log_neg_from_spectrum(lam),
        negativity=float(-np.sum(lam[lam < 0])),
        renyi={float(q): renyi(pA, q) for q in renyi_orders},
        von_neumann=von_neumann(pA),
        pt_spectrum=[float(x) for x in lam],
        kept=list(rho.kept),
        A=A,
    )


def state_entanglement_report(psi: StateVector, A: EdgeSet, B: EdgeSet = None,
                              renyi_orders: Sequence[float] = (0.5, 2.0), max_dim: int = COMPRESSED_MAX_DIM,
                              max_spectrum: int = 1 << 16) -> EntanglementReport:
    """Report for ``tr_C |psi><psi|`` computed without dense ``2^k`` matrices.

    Entropies are of ``rho_A``; the spectrum list is omitted beyond ``max_spectrum`` values.
    """
    from .groundstate import schmidt_spectrum

    A = _edges(A)
    pA = schmidt_spectrum(psi, A).probabilities
    if B is None:
        B = [e for e in range(psi.n) if e not in set(A)]
    B = _edges(B)
    if len(A) + len(B) == psi.n:
        n_vals = len(pA) ** 2
        lam = pure_pt_spectrum(pA) if n_vals <= max_spectrum else None
        e_n = float(2 * np.log2(np.sum(np.sqrt(pA))))
        neg = (2 ** e_n - 1) / 2
    else:
        lam = state_pt_spectrum(psi, A, B, max_dim)
        e_n = _log_neg_from_spectrum(lam)
        neg = float(-np.sum(lam[lam < 0]))
    return EntanglementReport(
        log_negativity=e_n,
        negativity=neg,
        renyi={float(q): renyi(pA, q) for q in renyi_orders},
        von_neumann=von_neumann(pA),
        pt_spectrum=None if lam is None else [float(x) for x in lam],
        kept=sorted(A + B),
        A=A,
    )


# ---------------------------------------------------------------- classical structure


@dataclass
class ClassicalStructureReport:
    setting: str
    reconstruction_deviation: float
    overlap_deviation: float
    flux_product_deviation: float
    product_deviation: float
    c_independence_deviation: float

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


def _max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m), initial=0.0))


def check_classical_structure(lat, A: EdgeSet, B: EdgeSet, c, axis: str = "vertical",
                              basis: Dict[str, StateVector] = None) -> ClassicalStructureReport:
    """Test ``rho_AB = sum_i |c_i|^2 rho_A^(i) (x) rho_B^(i)`` for a no-shared-boundary setting.

    Deviations reported (all max-entry norms):
    ``reconstruction`` against the flux mixture; ``overlap`` of
    ``tr(rho_A^(i) rho_A^(j))`` (and B) away from ``delta_ij tr(rho^(i))^2``;
    ``flux_product`` of each ``rho_AB^(i)`` from ``rho_A^(i) (x) rho_B^(i)``;
    ``product`` of ``rho_AB`` from ``rho_A (x) rho_B``; ``c_independence`` of
    ``rho_AB`` from the single-flux ``rho_AB^(I)``.
    Raises ``UnsupportedSettingError`` for any other setting class.
    """
    from .closedform import SettingClass, classify
    from .errors import UnsupportedSettingError
    from .groundstate import FLUX_LABELS, FluxCoefficients, flux_basis, generic_state

    A, B = Region(_edges(A), "A"), Region(_edges(B), "B")
    C = Region((e for e in range(lat.n) if e not in A.edges | B.edges), "C")
    setting = classify(lat, A, B, C)
    if setting.cls not in (SettingClass.NO_SHARED_BOUNDARY_CLASSICAL, SettingClass.NO_SHARED_BOUNDARY_PRODUCT):
        raise UnsupportedSettingError(
            f"classical-structure check needs a no-shared-boundary setting, got {setting.cls.value}", setting)
    if not isinstance(c, FluxCoefficients):
        c = FluxCoefficients(c)
    basis = basis or flux_basis(lat, axis)
    kept = A.sorted() + B.sorted()
    rho = reduce(generic_state(lat, c, basis=basis), kept)
    rhos = {k: reduce(basis[k], kept) for k in FLUX_LABELS}
    rA = {k: reduce(rhos[k], A.sorted()) for k in FLUX_LABELS}
    rB = {k: reduce(rhos[k], B.sorted()) for k in FLUX_LABELS}

    mix = sum(abs(c[k]) ** 2 * rA[k].tensor(rB[k]).matrix for k in FLUX_LABELS)
    recon = _max_abs(rho.matrix - mix)
    flux_prod = max(_max_abs(rhos[k].matrix - rA[k].tensor(rB[k]).matrix) for k in FLUX_LABELS)
    overlap = 0.0
    for side in (rA, rB):
        purities = {k: np.trace(side[k].matrix @ side[k].matrix).real for k in FLUX_LABELS}
        for i in FLUX_LABELS:
            for j in FLUX_LABELS:
                ov = np.trace(side[i].matrix @ side[j].matrix).real
                target = purities[i] if i == j else 0.0
                overlap = max(overlap, abs(ov - target))
    rho_A, rho_B = reduce(rho, A.sorted()), reduce(rho, B.sorted())
    prod = _max_abs(rho.matrix - rho_A.tensor(rho_B).matrix)
    indep = _max_abs(rho.matrix - rhos["I"].matrix)
    return ClassicalStructureReport(setting.cls.value, recon, overlap, flux_prod, prod, indep)
