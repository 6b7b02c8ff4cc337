"""Closed-form entanglement predictions from lattice combinatorics.

``classify`` maps a configuration (regions ``A``, ``B`` and a traced region
``C``) onto the setting taxonomy and records the combinatorial witnesses the
formulas need: the plaquette count of every surviving ``A|B`` boundary
component, contractibility of ``A`` and ``B``, and the winding of ``C``.
The predictions then follow

    E_N = sum_m (n^(m) - 1) + [long-range] * 2 log2 sum_i |c_i|

where the long-range term is present only for two non-contractible regions
that still share a boundary while ``C`` closes no loop along the flux axis.

The boundary count is only valid for regions whose boundary plaquettes are
independent apart from one relation per boundary curve. ``classify`` checks
this with a GF(2) computation of the fixed-flux negativity and refuses the
configuration when the two disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, UnsupportedSettingError
from .groundstate import FluxCoefficients, SchmidtSpectrum, flux_stabilizers
from .lattice import (
    VERTICAL,
    BoundaryComponent,
    BoundaryReport,
    Lattice,
    Region,
    Topology,
    boundary_report,
    check_partition,
    connected_parts,
    is_contractible,
)
from .pauli import stabilizer_log_negativity, stabilizers


class SettingClass(str, Enum):
    PURE_CONTRACTIBLE = "PureContractible"
    REFINED_CONTRACTIBLE = "RefinedContractible"
    PURE_NON_CONTRACTIBLE = "PureNonContractible"
    TRACE_ONE_SIDE = "TraceOneSide"
    TRACE_BOTH_SIDES = "TraceBothSides"
    NO_SHARED_BOUNDARY_CLASSICAL = "NoSharedBoundaryClassical"
    NO_SHARED_BOUNDARY_PRODUCT = "NoSharedBoundaryProduct"


_ZERO_CLASSES = (
    SettingClass.TRACE_BOTH_SIDES,
    SettingClass.NO_SHARED_BOUNDARY_CLASSICAL,
    SettingClass.NO_SHARED_BOUNDARY_PRODUCT,
)


@dataclass(frozen=True)
class Setting:
    """Result of ``classify``: the class plus its witnesses."""

    cls: SettingClass
    surviving: Tuple[BoundaryComponent, ...]
    destroyed: Tuple[BoundaryComponent, ...]
    a_contractible: bool
    b_contractible: bool
    c_windings: frozenset
    long_range: bool
    axis: str = VERTICAL
    fixed_flux_check: Optional[float] = None
    boundary: Optional[BoundaryReport] = field(default=None, repr=False, compare=False)

    @property
    def counts(self) -> List[int]:
        """Plaquette counts n^(m) of the surviving A|B boundary components."""
        return [c.plaquette_count for c in self.surviving]

    @property
    def boundary_term(self) -> int:
        return sum(n - 1 for n in self.counts)

    def witnesses(self) -> Dict:
        return {
            "class": self.cls.value,
            "surviving_counts": self.counts,
            "destroyed_counts": [c.plaquette_count for c in self.destroyed],
            "a_contractible": self.a_contractible,
            "b_contractible": self.b_contractible,
            "c_windings": sorted(self.c_windings),
            "long_range": self.long_range,
            "axis": self.axis,
        }


def _as_region(r, label: str) -> Region:
    if isinstance(r, Region):
        return Region(r.edges, r.label or label)
    return Region(r, label)


def _winds_along(report, axis: str) -> bool:
    return report.direct_windings == {axis} and report.dual_windings == {axis}


def _reject(msg: str, **witness) -> UnsupportedSettingError:
    return UnsupportedSettingError(msg, witness)


def classify(lat: Lattice, A, B, C=None, axis: str = VERTICAL, check_regularity: bool = True) -> Setting:
    """Place ``(A, B, C)`` in the setting taxonomy.

    ``C`` is the traced region: ``None``/empty, a single region, or a sequence
    of traced parts (for example ``[A2, B2]``). Passing parts matters in one
    place: two non-contractible regions without a shared boundary are
    ``TraceBothSides`` when ``C`` is given as parts of a refined partition and
    ``NoSharedBoundaryClassical`` otherwise; both predict zero.

    Raises ``UnsupportedSettingError`` (with a witness dict) for anything the
    closed forms do not cover: violations of the two-region rule, annuli not
    winding along ``axis`` on both the direct and dual lattice, a traced
    region that winds on only one of the two lattices, mixed contractible and
    non-contractible pieces, or a boundary whose plaquettes carry extra GF(2)
    relations.
    """
    A = _as_region(A, "A")
    B = _as_region(B, "B")
    if C is None:
        parts: List[Region] = []
        given_as_parts = False
    elif isinstance(C, (Region, set, frozenset)) or (isinstance(C, (list, tuple)) and C and isinstance(C[0], (int, np.integer))):
        parts = [_as_region(C, "C")]
        given_as_parts = False
    else:
        parts = [_as_region(p, f"C{k + 1}") for k, p in enumerate(C)]
        given_as_parts = len(parts) > 1
    parts = [p for p in parts if p.edges]
    if not A.edges or not B.edges:
        raise _reject("A and B must be nonempty")
    partition = [A, B] + parts
    check_partition(lat, partition)

    report = boundary_report(lat, partition)
    if report.violations:
        raise _reject("two-region rule violated", violations=[(v.kind, v.index, v.labels) for v in report.violations])

    c_edges = frozenset().union(*(p.edges for p in parts)) if parts else frozenset()
    ca, cb = is_contractible(lat, A), is_contractible(lat, B)
    cc = is_contractible(lat, c_edges) if c_edges else None

    for r, rep in ((A, ca), (B, cb)):
        pieces = connected_parts(lat, r)
        kinds = {bool(is_contractible(lat, p)) for p in pieces}
        if len(kinds) > 1:
            raise _reject(f"region {r.label} mixes contractible and non-contractible pieces", region=r.label)
        if not rep.contractible and lat.topology is Topology.TORUS:
            if not (_winds_along(rep, axis) or (rep.direct_windings >= {"horizontal", "vertical"}
                                                  and rep.dual_windings >= {"horizontal", "vertical"})):
                raise _reject(f"region {r.label} winds as {sorted(rep.direct_windings)} (direct) / "
                              f"{sorted(rep.dual_windings)} (dual); expected an annulus along {axis}",
                              region=r.label)

    surviving = report.components(A.label, B.label)
    parent = boundary_report(lat, [A, Region(B.edges | c_edges, "rest")])
    kept_faces = {f for comp in surviving for f in comp.faces}
    destroyed = tuple(comp for comp in parent.components() if not kept_faces & set(comp.faces))

    c_windings = cc.windings if cc is not None else frozenset()
    noncontractible_pair = not ca.contractible and not cb.contractible
    if noncontractible_pair and not (_winds_along(ca, axis) and _winds_along(cb, axis)):
        raise _reject("non-contractible A and B must both be annuli along the flux axis", axis=axis)

    if not surviving:
        if noncontractible_pair:
            cls = SettingClass.TRACE_BOTH_SIDES if given_as_parts else SettingClass.NO_SHARED_BOUNDARY_CLASSICAL
        else:
            cls = SettingClass.NO_SHARED_BOUNDARY_PRODUCT
        return Setting(cls, (), destroyed, ca.contractible, cb.contractible, c_windings, False, axis,
                       boundary=report)

    long_range = False
    if noncontractible_pair:
        direct = cc is not None and axis in cc.direct_windings
        dual = cc is not None and axis in cc.dual_windings
        if direct != dual:
            raise _reject("traced region winds on only one of the direct and dual lattices",
                          c_direct=sorted(cc.direct_windings), c_dual=sorted(cc.dual_windings))
        long_range = not direct
        if not parts:
            cls = SettingClass.PURE_NON_CONTRACTIBLE
        else:
            cls = SettingClass.TRACE_ONE_SIDE
    else:
        cls = SettingClass.PURE_CONTRACTIBLE if not parts else SettingClass.REFINED_CONTRACTIBLE

    setting = Setting(cls, surviving, destroyed, ca.contractible, cb.contractible, c_windings, long_range, axis,
                      boundary=report)
    if check_regularity and lat.topology is Topology.TORUS:
        e_fixed = stabilizer_log_negativity(flux_stabilizers(lat, "I", axis), A.edges, B.edges)
        if abs(e_fixed - setting.boundary_term) > 1e-9:
            raise _reject(f"boundary plaquettes are not independent: GF(2) fixed-flux negativity {e_fixed} "
                          f"differs from sum_m (n^(m) - 1) = {setting.boundary_term}",
                          counts=setting.counts, gf2_value=e_fixed)
        setting = Setting(cls, surviving, destroyed, ca.contractible, cb.contractible, c_windings, long_range,
                          axis, e_fixed, boundary=report)
    elif check_regularity:
        e_fixed = stabilizer_log_negativity(stabilizers(lat), A.edges, B.edges) if _full_rank_planar(lat) else None
        if e_fixed is not None and abs(e_fixed - setting.boundary_term) > 1e-9:
            raise _reject("boundary plaquettes are not independent", counts=setting.counts, gf2_value=e_fixed)
    return setting


def _full_rank_planar(lat: Lattice) -> bool:
    from .gf2 import gf2_rank
    return gf2_rank([g.symplectic for g in stabilizers(lat)]) == lat.n


# ---------------------------------------------------------------- predictions


def predict_long_range_term(c: Union[FluxCoefficients, Sequence[complex]]) -> float:
    """``2 log2 sum_i |c_i|``, checked against the Renyi-1/2 entropy of ``|c_i|^2``."""
    if not isinstance(c, FluxCoefficients):
        c = FluxCoefficients(c)
    mags = np.abs(c.array)
    direct = 2 * math.log2(float(mags.sum()))
    p = mags ** 2
    p = p[p > 0]
    s_half = 2 * math.log2(float(np.sum(np.sqrt(p))))
    if abs(direct - s_half) > 1e-12:
        raise AssertionError("long-range term disagrees with S_1/2 of the flux weights")
    return direct


def predict_log_negativity(setting: Setting, boundary: Optional[Sequence[int]] = None,
                           c: Union[FluxCoefficients, Sequence[complex], None] = None) -> float:
    """Predicted ``E_N(A|B)`` in bits.

    ``boundary`` overrides the surviving component counts n^(m); ``c`` is
    required whenever the setting carries a long-range term.
    """
    if setting.cls in _ZERO_CLASSES:
        return 0.0
    counts = setting.counts if boundary is None else list(boundary)
    total = float(sum(n - 1 for n in counts))
    if setting.long_range:
        if c is None:
            raise DomainError(f"{setting.cls.value} needs flux coefficients c")
        total += predict_long_range_term(c)
    return total


def predict_decomposition(setting: Setting, c=None) -> Dict[str, float]:
    """Boundary and long-range parts of the prediction, per component."""
    out = {f"boundary_{k + 1}": float(n - 1) for k, n in enumerate(setting.counts)}
    out["long_range"] = predict_long_range_term(c) if setting.long_range and c is not None else 0.0
    return out


def predict_schmidt(setting: Setting, boundary: Optional[Sequence[int]] = None,
                    c: Union[FluxCoefficients, Sequence[complex], None] = None) -> SchmidtSpectrum:
    """Predicted entanglement spectrum of a pure bipartition.

    Fixed flux (or a contractible region) gives ``2^(sum_m (n^(m)-1))`` equal
    values. A flux superposition on a non-contractible bipartition splits into
    blocks of that size weighted by ``|c_i|^2``.
    """
    if setting.cls not in (SettingClass.PURE_CONTRACTIBLE, SettingClass.PURE_NON_CONTRACTIBLE):
        raise UnsupportedSettingError(f"no proven Schmidt decomposition for {setting.cls.value}", setting.witnesses())
    counts = setting.counts if boundary is None else list(boundary)
    size = 1 << sum(n - 1 for n in counts)
    weights = np.array([1.0])
    if setting.cls is SettingClass.PURE_NON_CONTRACTIBLE and c is not None:
        if not isinstance(c, FluxCoefficients):
            c = FluxCoefficients(c)
        weights = c.probabilities[c.probabilities > 1e-15]
    p = np.sort(np.repeat(weights / size, size))[::-1]
    return SchmidtSpectrum(p)


def predict_entropy(setting: Setting, q: float = 1.0, c=None) -> float:
    """Renyi entropy of ``rho_A`` for a pure bipartition."""
    spec = predict_schmidt(setting, c=c)
    return spec.renyi(q)


# ---------------------------------------------------------------- generic anyon models


@dataclass(frozen=True)
class AnyonModel:
    d: Tuple[float, ...]
    name: str = "custom"

    def __post_init__(self):
        if not self.d or any(x < 1 for x in self.d):
            raise DomainError("quantum dimensions must be >= 1")

    @classmethod
    def toric_code(cls) -> "AnyonModel":
        return cls((1.0, 1.0, 1.0, 1.0), "toric_code")

    @classmethod
    def fibonacci(cls) -> "AnyonModel":
        return cls((1.0, (1 + math.sqrt(5)) / 2), "fibonacci")

    @property
    def N(self) -> int:
        return len(self.d)

    @property
    def D(self) -> float:
        return math.sqrt(sum(x * x for x in self.d))

    @property
    def gammas(self) -> np.ndarray:
        return np.log2(self.D / np.asarray(self.d))

    @property
    def gamma(self) -> float:
        return math.log2(self.D)

    @property
    def abelian(self) -> bool:
        return all(x == 1 for x in self.d)


@dataclass(frozen=True)
class AnyonResult:
    entropy: float
    gamma_bar: float
    fixed_flux_negativity: Tuple[float, ...]
    renyi_half_negativity: Optional[float]
    renyi_q: Optional[float]


def _shannon(p: np.ndarray, q: float = 1.0) -> float:
    p = p[p > 0]
    if q == 1:
        return float(-np.sum(p * np.log2(p)))
    return float(np.log2(np.sum(p ** q)) / (1 - q))


def anyon_entropy(model: AnyonModel, probabilities: Sequence[float], boundaries: Sequence[float],
                  a: float = 1.0, a_prime: float = 1.0, q: Optional[float] = None,
                  renyi_half: Optional[bool] = None) -> AnyonResult:
    """Entropy and negativity of a non-contractible bipartition for a generic anyon model.

    ``probabilities`` are ``|c_i|^2``; ``boundaries`` the sizes ``|Gamma_m|``.
    ``a`` and ``a_prime`` are non-universal constants; their default of 1 is
    arbitrary. Returns the von Neumann entropy ``sum_m (a|Gamma_m| - gamma_bar)
    + S(|c_i|^2)``, the fixed-flux negativity ``sum_m (a'|Gamma_m| - gamma_i)``
    for every flux ``i``, and for abelian models the generic-state negativity
    ``sum_m (a'|Gamma_m| - gamma) + S_1/2(|c_i|^2)`` (and its Renyi-``q``
    analogue when ``q`` is given). ``renyi_half=True`` demands the last value
    and raises for non-abelian models, where the flux sectors have different
    spectra and the additivity argument behind it fails.
    """
    p = np.asarray(probabilities, dtype=float)
    if len(p) != model.N:
        raise DomainError(f"need {model.N} flux probabilities, got {len(p)}")
    if np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
        raise DomainError("flux probabilities must be nonnegative and sum to 1")
    gam = model.gammas
    gbar = float(np.dot(p, gam))
    bsum = float(sum(boundaries))
    m = len(boundaries)
    entropy = a * bsum - m * gbar + _shannon(p)
    fixed = tuple(float(a_prime * bsum - m * g) for g in gam)
    if renyi_half and not model.abelian:
        raise UnsupportedSettingError(
            "generic-state negativity needs flux-independent spectra of rho_A^(i), "
            "which requires an abelian model (all d_i = 1)",
            {"model": model.name, "d": list(model.d)},
        )
    half = qval = None
    if model.abelian:
        base = a_prime * bsum - m * model.gamma
        half = base + _shannon(p, 0.5)
        if q is not None:
            qval = base + _shannon(p, q)
    return AnyonResult(entropy, gbar, fixed, half, qval)
