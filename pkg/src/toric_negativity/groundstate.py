"""Exact toric-code ground states in the sigma^z edge basis.

Edge ``k`` is bit ``k`` of a basis index, bit value 1 meaning ``|1>``. Ground
states have support on a small subset of the ``2^n`` basis states (a coset of
the star group), so a ``StateVector`` stores only the nonzero amplitudes:
``support`` (sorted int64 indices) and ``values``. ``amplitudes`` rebuilds the
full array when it is needed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, InvalidLatticeError, ResourceLimitError
from .lattice import HORIZONTAL, VERTICAL, Lattice, Region, Topology
from .pauli import (
    X_DUAL,
    Z_DIRECT,
    PauliString,
    loop_operator,
    plaquette_operator,
    star_operator,
    stabilizers,
)

FLUX_LABELS = ("I", "e", "m", "em")
DEFAULT_MAX_QUBITS = 24
DENSE_MAX_QUBITS = 22
SCHMIDT_CUTOFF = 1e-12
_DROP = 1e-13


def _check_cap(n: int, max_qubits: int) -> None:
    if n > max_qubits:
        raise ResourceLimitError(f"{n} qubits exceeds the state-vector cap of {max_qubits}")


def _popcount_parity(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a) & 1


def _merge(indices: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    uniq, inv = np.unique(indices, return_inverse=True)
    re = np.bincount(inv, weights=values.real, minlength=len(uniq))
    im = np.bincount(inv, weights=values.imag, minlength=len(uniq))
    vals = re + 1j * im
    keep = np.abs(vals) > _DROP
    return uniq[keep], vals[keep]


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    support: np.ndarray
    values: np.ndarray

    @classmethod
    def basis(cls, n: int, index: int = 0) -> "StateVector":
        return cls(n, np.array([index], dtype=np.int64), np.array([1.0 + 0j]))

    @classmethod
    def from_dense(cls, amplitudes: np.ndarray, atol: float = 0.0) -> "StateVector":
        amplitudes = np.asarray(amplitudes, dtype=complex)
        n = int(np.log2(len(amplitudes)))
        if 1 << n != len(amplitudes):
            raise ValueError("length is not a power of two")
        idx = np.flatnonzero(np.abs(amplitudes) > atol)
        return cls(n, idx.astype(np.int64), amplitudes[idx].copy())

    @property
    def nnz(self) -> int:
        return len(self.support)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    @property
    def amplitudes(self) -> np.ndarray:
        """Full length-``2^n`` amplitude array."""
        _check_cap(self.n, DENSE_MAX_QUBITS)
        out = np.zeros(1 << self.n, dtype=complex)
        out[self.support] = self.values
        return out

    def normalized(self) -> "StateVector":
        nrm = self.norm
        if nrm == 0:
            raise DomainError("cannot normalize the zero vector")
        return StateVector(self.n, self.support, self.values / nrm)

    def scaled(self, factor: complex) -> "StateVector":
        return StateVector(self.n, self.support, self.values * factor)

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        common, i, j = np.intersect1d(self.support, other.support, assume_unique=True, return_indices=True)
        return complex(np.vdot(self.values[i], other.values[j]))

    def __add__(self, other: "StateVector") -> "StateVector":
        if other.n != self.n:
            raise ValueError("qubit count mismatch")
        idx, vals = _merge(np.concatenate([self.support, other.support]),
                           np.concatenate([self.values, other.values]))
        return StateVector(self.n, idx, vals)

    def bits(self, edges: Sequence[int]) -> np.ndarray:
        """Configuration of ``edges`` in each support state, packed as ints (edge ``edges[k]`` -> bit k)."""
        out = np.zeros(len(self.support), dtype=np.int64)
        for k, e in enumerate(edges):
            out |= ((self.support >> e) & 1) << k
        return out

    def __repr__(self):
        return f"StateVector(n={self.n}, nnz={self.nnz}, norm={self.norm:.12g})"


def combine(states: Sequence[StateVector], coeffs: Sequence[complex]) -> StateVector:
    n = states[0].n
    idx = np.concatenate([s.support for s in states])
    vals = np.concatenate([c * s.values for s, c in zip(states, coeffs)])
    idx, vals = _merge(idx, vals)
    return StateVector(n, idx, vals)


def apply_pauli(psi: StateVector, P: PauliString) -> StateVector:
    """Exact action: X flips bits, Z multiplies by -1 per occupied edge in its support."""
    if P.n != psi.n:
        raise ValueError(f"length mismatch: state has {psi.n} qubits, operator {P.n}")
    signs = 1 - 2 * _popcount_parity(psi.support & np.int64(P.z)).astype(float)
    idx = psi.support ^ np.int64(P.x)
    vals = psi.values * signs * P.sign
    order = np.argsort(idx)
    return StateVector(psi.n, idx[order], vals[order])


def apply_projector(psi: StateVector, P: PauliString) -> StateVector:
    """``(1 + P)/2 |psi>`` for a Hermitian Pauli ``P``."""
    q = apply_pauli(psi, P)
    idx, vals = _merge(np.concatenate([psi.support, q.support]), np.concatenate([psi.values, q.values]) / 2)
    return StateVector(psi.n, idx, vals)


def expectation(psi: StateVector, P: PauliString) -> complex:
    return psi.inner(apply_pauli(psi, P))


# ---------------------------------------------------------------- coefficients and spectra


@dataclass(frozen=True)
class FluxCoefficients:
    c: Tuple[complex, complex, complex, complex]

    def __init__(self, c: Union[Sequence[complex], Mapping[str, complex]], atol: float = 1e-12):
        if isinstance(c, Mapping):
            c = [c.get(k, 0) for k in FLUX_LABELS]
        c = tuple(complex(x) for x in c)
        if len(c) != 4:
            raise DomainError("need four flux coefficients (I, e, m, em)")
        total = sum(abs(x) ** 2 for x in c)
        if abs(total - 1) > atol:
            raise DomainError(f"flux coefficients not normalized: sum |c_i|^2 = {total!r}")
        object.__setattr__(self, "c", c)

    @classmethod
    def basis(cls, label: str) -> "FluxCoefficients":
        return cls([1.0 if k == label else 0.0 for k in FLUX_LABELS])

    @classmethod
    def uniform(cls) -> "FluxCoefficients":
        return cls([0.5] * 4)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "FluxCoefficients":
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        return cls(v / np.linalg.norm(v))

    @classmethod
    def normalize(cls, c: Sequence[complex]) -> "FluxCoefficients":
        v = np.asarray(c, dtype=complex)
        return cls(v / np.linalg.norm(v))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.c)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.array) ** 2

    def to_json(self) -> List[List[float]]:
        return [[x.real, x.imag] for x in self.c]

    @classmethod
    def from_json(cls, doc) -> "FluxCoefficients":
        if isinstance(doc, Mapping):
            return cls({k: _as_complex(v) for k, v in doc.items()})
        return cls([_as_complex(v) for v in doc])

    def __getitem__(self, label: str) -> complex:
        return self.c[FLUX_LABELS.index(label)]


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1] if len(v) > 1 else 0.0)
    return complex(v)


@dataclass(frozen=True)
class SchmidtSpectrum:
    probabilities: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.probabilities)

    def multiplicities(self, rtol: float = 1e-9) -> List[Tuple[float, int]]:
        """Distinct values (descending) with their counts."""
        out: List[Tuple[float, int]] = []
        for p in self.probabilities:
            if out and abs(out[-1][0] - p) <= rtol * out[-1][0]:
                out[-1] = (out[-1][0], out[-1][1] + 1)
            else:
                out.append((float(p), 1))
        return out

    def is_flat(self, rtol: float = 1e-9) -> bool:
        p = self.probabilities
        return len(p) > 0 and (p.max() - p.min()) <= rtol * p.max()

    def renyi(self, q: float) -> float:
        p = self.probabilities
        if q == 1:
            return float(-np.sum(p * np.log2(p)))
        return float(np.log2(np.sum(p ** q)) / (1 - q))

    @property
    def log_negativity(self) -> float:
        """``2 log2 sum sqrt(p)``, the logarithmic negativity of the pure state."""
        return float(2 * np.log2(np.sum(np.sqrt(self.probabilities))))


def _split_matrix(psi: StateVector, A: Sequence[int]) -> np.ndarray:
    """Dense amplitude matrix between distinct A-configurations and B-configurations of the support."""
    A = sorted(A)
    B = [e for e in range(psi.n) if e not in set(A)]
    a_cfg = psi.bits(A)
    b_cfg = psi.bits(B)
    ua, ia = np.unique(a_cfg, return_inverse=True)
    ub, ib = np.unique(b_cfg, return_inverse=True)
    M = np.zeros((len(ua), len(ub)), dtype=complex)
    M[ia, ib] = psi.values
    return M


def schmidt_spectrum(psi: StateVector, A: Union[Region, Iterable[int]], cutoff: float = SCHMIDT_CUTOFF) -> SchmidtSpectrum:
    """Squared singular values of the amplitude matrix split by ``A`` versus the rest."""
    edges = A.sorted() if isinstance(A, Region) else sorted(set(A))
    if any(e < 0 or e >= psi.n for e in edges):
        raise DomainError("region edges out of range")
    M = _split_matrix(psi, edges)
    if min(M.shape) > 512:
        G = M @ M.conj().T if M.shape[0] <= M.shape[1] else M.conj().T @ M
        p = np.linalg.eigvalsh(G)
    else:
        p = np.linalg.svd(M, compute_uv=False) ** 2
    p = np.sort(p[p > cutoff])[::-1]
    return SchmidtSpectrum(p / p.sum())


# ---------------------------------------------------------------- constructions


def _require_torus(lat: Lattice) -> None:
    if lat.topology is not Topology.TORUS:
        raise InvalidLatticeError("flux states need a torus")


def _project_all(psi: StateVector, ops: Iterable[PauliString]) -> StateVector:
    for P in ops:
        psi = apply_projector(psi, P)
    return psi


def psi0(lat: Lattice, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Equal-weight superposition of all closed sigma^z loop configurations.

    Built as ``prod_s (1 + A_s)/2 |0...0>``; this is the +1 eigenstate of every
    stabilizer and of the z-type loop operators.
    """
    _check_cap(lat.n, max_qubits)
    psi = _project_all(StateVector.basis(lat.n), (star_operator(lat, s) for s in range(lat.n_vertices)))
    return psi.normalized()


def walsh_hadamard(amplitudes: np.ndarray) -> np.ndarray:
    """Apply the Hadamard gate to every qubit of a dense amplitude array."""
    a = np.array(amplitudes, dtype=complex)
    n = int(np.log2(len(a)))
    t = a.reshape((2,) * n)
    for axis in range(n):
        lo = np.take(t, 0, axis=axis)
        hi = np.take(t, 1, axis=axis)
        t = np.stack([lo + hi, lo - hi], axis=axis) / np.sqrt(2)
    return t.reshape(-1)


def psi0_plus_form(lat: Lattice, max_qubits: int = 20) -> StateVector:
    """``N prod_p (1+B_p)/2 prod_i (1+W^z_i)/2 |+...+>``, converted to the z basis.

    Built in the sigma^x basis, where every factor is a bit flip, then mapped
    back with a full Walsh-Hadamard transform. Independent of ``psi0``.
    """
    _check_cap(lat.n, max_qubits)
    ops = [plaquette_operator(lat, p) for p in range(lat.n_faces)]
    if lat.topology is Topology.TORUS:
        ops += [loop_operator(lat, Z_DIRECT, VERTICAL), loop_operator(lat, Z_DIRECT, HORIZONTAL)]
    # in the x basis a Z string flips bits; |+...+> is the all-zero string
    flips = [PauliString(P.z, 0, lat.n) for P in ops]
    psi_x = _project_all(StateVector.basis(lat.n), flips)
    return StateVector.from_dense(walsh_hadamard(psi_x.amplitudes), atol=1e-12).normalized()


def _axes(axis: str) -> Tuple[str, str]:
    if axis == VERTICAL:
        return VERTICAL, HORIZONTAL
    if axis == HORIZONTAL:
        return HORIZONTAL, VERTICAL
    raise ValueError(f"axis must be {VERTICAL!r} or {HORIZONTAL!r}")


def flux_loops(lat: Lattice, axis: str = VERTICAL) -> Dict[str, PauliString]:
    """``W^z_1, W^x_1, W^z_2, W^x_2`` with direction 1 along ``axis``."""
    _require_torus(lat)
    d1, d2 = _axes(axis)
    return {
        "Wz1": loop_operator(lat, Z_DIRECT, d1),
        "Wx1": loop_operator(lat, X_DUAL, d1),
        "Wz2": loop_operator(lat, Z_DIRECT, d2),
        "Wx2": loop_operator(lat, X_DUAL, d2),
    }


def flux_state(lat: Lattice, label: str, axis: str = VERTICAL, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Definite-flux ground state ``|psi_label>``.

    ``|psi_I>`` is the +1 eigenstate of ``W^z_1`` and ``W^x_1``; the others are
    ``W^x_2|psi_I>``, ``W^z_2|psi_I>`` and ``W^x_2 W^z_2|psi_I>``.
    """
    if label not in FLUX_LABELS:
        raise DomainError(f"flux label must be one of {FLUX_LABELS}")
    _require_torus(lat)
    _check_cap(lat.n, max_qubits)
    W = flux_loops(lat, axis)
    psi = apply_projector(StateVector.basis(lat.n), W["Wx1"])
    psi = _project_all(psi, (star_operator(lat, s) for s in range(lat.n_vertices))).normalized()
    if label in ("m", "em"):
        psi = apply_pauli(psi, W["Wz2"])
    if label in ("e", "em"):
        psi = apply_pauli(psi, W["Wx2"])
    return psi


def flux_basis(lat: Lattice, axis: str = VERTICAL, max_qubits: int = DEFAULT_MAX_QUBITS) -> Dict[str, StateVector]:
    return {k: flux_state(lat, k, axis, max_qubits) for k in FLUX_LABELS}


def generic_state(lat: Lattice, c: Union[FluxCoefficients, Sequence[complex]], axis: str = VERTICAL,
                  max_qubits: int = DEFAULT_MAX_QUBITS, basis: Mapping[str, StateVector] = None) -> StateVector:
    """``sum_i c_i |psi_i>`` over the flux basis."""
    if not isinstance(c, FluxCoefficients):
        c = FluxCoefficients(c)
    basis = basis or flux_basis(lat, axis, max_qubits)
    return combine([basis[k] for k in FLUX_LABELS], c.c)


def flux_stabilizers(lat: Lattice, label: str, axis: str = VERTICAL) -> List[PauliString]:
    """Signed generators of the stabilizer group of ``|psi_label>`` (overcomplete)."""
    W = flux_loops(lat, axis)
    wz1 = W["Wz1"] if label in ("I", "m") else -W["Wz1"]
    wx1 = W["Wx1"] if label in ("I", "e") else -W["Wx1"]
    return stabilizers(lat) + [wz1, wx1]


def psi0_stabilizers(lat: Lattice) -> List[PauliString]:
    W = flux_loops(lat)
    return stabilizers(lat) + [W["Wz1"], W["Wz2"]]


# ---------------------------------------------------------------- checks and export


def stabilizer_residual(psi: StateVector, ops: Iterable[PauliString]) -> float:
    """Largest ``|| P psi - psi ||`` over ``ops``."""
    worst = 0.0
    for P in ops:
        diff = apply_pauli(psi, P) + psi.scaled(-1)
        worst = max(worst, diff.norm)
    return worst


def energy(psi: StateVector, lat: Lattice, U: float = 1.0, J: float = 1.0) -> float:
    """``<psi| -U sum_s A_s - J sum_p B_p |psi>``."""
    e = 0.0
    for s in range(lat.n_vertices):
        e -= U * expectation(psi, star_operator(lat, s)).real
    for p in range(lat.n_faces):
        e -= J * expectation(psi, plaquette_operator(lat, p)).real
    return e


def dump_state(psi: StateVector, path: Union[str, Path]) -> Path:
    """Write nonzero amplitudes as ``index, re, im`` to ``.csv`` or ``.json``."""
    path = Path(path)
    rows = [(int(i), float(v.real), float(v.imag)) for i, v in zip(psi.support, psi.values)]
    if path.suffix == ".csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "re", "im"])
            w.writerows(rows)
    else:
        path.write_text(json.dumps({"n": psi.n, "amplitudes": [list(r) for r in rows]}, indent=1))
    return path


def load_state(path: Union[str, Path], n: int = None) -> StateVector:
    """Read a dump written by ``dump_state``; CSV dumps carry no qubit count, so pass ``n``."""
    path = Path(path)
    if path.suffix == ".csv":
        if n is None:
            raise DomainError("CSV dumps need the qubit count n")
        with path.open() as fh:
            rows = list(csv.DictReader(fh))
        idx = np.array([int(r["index"]) for r in rows], dtype=np.int64)
        vals = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        return StateVector(n, idx, vals)
    doc = json.loads(path.read_text())
    idx = np.array([r[0] for r in doc["amplitudes"]], dtype=np.int64)
    vals = np.array([complex(r[1], r[2]) for r in doc["amplitudes"]])
    return StateVector(doc["n"], idx, vals)
