"""Configuration sweeps comparing the exact oracle with the closed forms.

A sweep config is a JSON document::

    {
      "schema_version": 1,
      "name": "fig6-torus-4x2",
      "lattice": {"topology": "torus", "Lx": 4, "Ly": 2},
      "axis": "vertical",
      "settings": [{"id": "a"}, {"id": "mine", "regions": {"A": [...], "B": [...], "C": [...]}}],
      "states": [{"id": "uniform", "c": [0.5, 0.5, 0.5, 0.5]}, {"id": "rand", "random": 3}],
      "quantities": ["log_negativity", "negativity", "mutual_information", "classical_structure"],
      "tolerance": 1e-8,
      "max_qubits": 24,
      "seed": 0
    }

A setting given only by an ``id`` in ``a``..``g`` is generated on the lattice.
Flux coefficients are complex numbers written as ``x`` or ``[re, im]``.
"""

from __future__ import annotations

import copy
import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .closedform import SettingClass, classify, predict_log_negativity
from .entanglement import (
    check_classical_structure,
    state_mutual_information,
    state_entanglement_report,
    state_pt_spectrum,
)
from .errors import DomainError, InvalidLatticeError, InvalidPartitionError, ResourceLimitError, UnsupportedSettingError
from .groundstate import DEFAULT_MAX_QUBITS, FluxCoefficients, flux_basis, generic_state
from .lattice import VERTICAL, Lattice, Region, Topology, lattice_from_spec

SCHEMA_VERSION = 1
SETTING_IDS = ("a", "b", "c", "d", "e", "f", "g")
DEFAULT_TOLERANCE = 1e-8
KNOWN_QUANTITIES = ("log_negativity", "negativity", "renyi", "schmidt", "mutual_information", "classical_structure")
CSV_COLUMNS = (
    "setting", "state", "class", "mode", "predicted", "oracle", "abs_diff", "pass",
    "boundary_counts", "c_winds", "long_range", "boundary_oracle", "long_range_oracle", "negativity",
    "mutual_information",
)

EXPECTED_CLASS = {
    "a": SettingClass.PURE_NON_CONTRACTIBLE,
    "b": SettingClass.TRACE_ONE_SIDE,
    "c": SettingClass.TRACE_ONE_SIDE,
    "d": SettingClass.TRACE_ONE_SIDE,
    "e": SettingClass.TRACE_ONE_SIDE,
    "f": SettingClass.NO_SHARED_BOUNDARY_CLASSICAL,
    "g": SettingClass.NO_SHARED_BOUNDARY_PRODUCT,
}


# ---------------------------------------------------------------- settings


def _column(lat: Lattice, x: int) -> List[int]:
    return [lat.h(x, y) for y in range(lat.Ly)] + [lat.v(x, y) for y in range(lat.Ly)]


def _columns(lat: Lattice, xs) -> List[int]:
    return sorted(e for x in xs for e in _column(lat, x))


def generate_setting(lat: Lattice, setting_id: str, axis: str = VERTICAL) -> Tuple[Region, Region, Region]:
    """Canonical ``(A, B, C)`` for panels (a)-(g) of the partition sequence.

    Columns ``x`` (all edges leaving vertices in column ``x``) are annuli
    winding vertically. ``A`` is column 0 throughout (a)-(f):

    (a) ``B`` = the other columns, nothing traced.
    (b) one edge deep inside ``B`` traced (contractible ``C``).
    (c) column 2 traced: winds, but touches neither boundary.
    (d) column 1 traced: destroys one boundary.
    (e) columns 1-2 traced: also destroys one boundary, ``B`` thinner.
    (f) ``B`` = column 2, columns 1 and 3.. traced: no shared boundary.
    (g) two separated three-edge patches, everything else traced.
    """
    if lat.topology is not Topology.TORUS:
        raise InvalidLatticeError("settings (a)-(g) need a torus")
    if axis != VERTICAL:
        raise DomainError("canonical settings are built with vertical annuli")
    if lat.Lx < 4:
        raise InvalidLatticeError(f"settings need Lx >= 4 to fit the annulus sequence, got Lx={lat.Lx}")
    if setting_id not in SETTING_IDS:
        raise DomainError(f"unknown setting {setting_id!r}; expected one of {SETTING_IDS}")
    everything = set(range(lat.n))
    rest = range(1, lat.Lx)
    A = _column(lat, 0)
    if setting_id == "a":
        B, C = _columns(lat, rest), []
    elif setting_id == "b":
        C = [lat.v(2, 0)]
        B = [e for e in _columns(lat, rest) if e not in C]
    elif setting_id == "c":
        C = _column(lat, 2)
        B = _columns(lat, [x for x in rest if x != 2])
    elif setting_id == "d":
        C = _column(lat, 1)
        B = _columns(lat, range(2, lat.Lx))
    elif setting_id == "e":
        C = _columns(lat, [1, 2])
        B = _columns(lat, range(3, lat.Lx))
    elif setting_id == "f":
        B = _column(lat, 2)
        C = _columns(lat, [1] + list(range(3, lat.Lx)))
    else:
        A = [lat.h(0, 0), lat.h(lat.Lx - 1, 0), lat.v(0, 0)]
        B = [lat.h(2, 1), lat.h(1, 1), lat.v(2, 0)]
        C = sorted(everything - set(A) - set(B))
    regions = (Region(A, "A"), Region(B, "B"), Region(C, "C"))
    got = classify(lat, *regions, axis=axis).cls
    if got is not EXPECTED_CLASS[setting_id]:
        raise InvalidLatticeError(f"setting ({setting_id}) classifies as {got.value} on {lat}")
    return regions


# ---------------------------------------------------------------- config


@dataclass
class StateSpec:
    id: str
    c: FluxCoefficients


@dataclass
class SettingSpec:
    id: str
    A: Region
    B: Region
    C: Region


@dataclass
class SweepConfig:
    name: str
    lattice: Dict
    settings: List[Dict]
    states: List[Dict]
    axis: str = VERTICAL
    quantities: List[str] = field(default_factory=lambda: ["log_negativity", "negativity"])
    renyi_orders: List[float] = field(default_factory=lambda: [0.5, 2.0])
    tolerance: float = DEFAULT_TOLERANCE
    max_qubits: int = DEFAULT_MAX_QUBITS
    seed: int = 0
    output: Dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "SweepConfig":
        version = doc.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise DomainError(f"unsupported config schema_version {version}")
        for key in ("lattice", "settings", "states"):
            if key not in doc:
                raise DomainError(f"config is missing {key!r}")
        cfg = cls(
            name=doc.get("name", "sweep"),
            lattice=dict(doc["lattice"]),
            settings=[dict(s) for s in doc["settings"]],
            states=[dict(s) for s in doc["states"]],
            axis=doc.get("axis", VERTICAL),
            quantities=list(doc.get("quantities", ["log_negativity", "negativity"])),
            renyi_orders=[float(q) for q in doc.get("renyi_orders", [0.5, 2.0])],
            tolerance=float(doc.get("tolerance", DEFAULT_TOLERANCE)),
            max_qubits=int(doc.get("max_qubits", DEFAULT_MAX_QUBITS)),
            seed=int(doc.get("seed", 0)),
            output=dict(doc.get("output", {})),
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, source: Union[str, Path, Mapping]) -> "SweepConfig":
        """From a mapping, a JSON file path, or the name of a bundled config."""
        if isinstance(source, Mapping):
            return cls.from_dict(source)
        path = Path(source)
        if not path.exists():
            bundled = resources.files("toric_negativity") / "data" / f"{source}.json"
            if not bundled.is_file():
                raise FileNotFoundError(f"no config file or bundled config named {source!r}")
            return cls.from_dict(json.loads(bundled.read_text()))
        return cls.from_dict(json.loads(path.read_text()))

    def to_dict(self) -> Dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "lattice": self.lattice,
            "axis": self.axis,
            "settings": self.settings,
            "states": self.states,
            "quantities": self.quantities,
            "renyi_orders": self.renyi_orders,
            "tolerance": self.tolerance,
            "max_qubits": self.max_qubits,
            "seed": self.seed,
            "output": self.output,
        }

    def validate(self) -> None:
        unknown = set(self.quantities) - set(KNOWN_QUANTITIES)
        if unknown:
            raise DomainError(f"unknown quantities {sorted(unknown)}")
        if self.tolerance <= 0:
            raise DomainError("tolerance must be positive")
        lat = self.build_lattice()
        ids = [s.get("id") for s in self.settings]
        if len(set(ids)) != len(ids) or None in ids:
            raise DomainError("every setting needs a unique id")
        for s in self.settings:
            if "regions" in s:
                regs = s["regions"]
                for k in ("A", "B"):
                    if k not in regs:
                        raise InvalidPartitionError(f"setting {s['id']!r} lacks region {k}")
                for k, edges in regs.items():
                    if any(not 0 <= int(e) < lat.n for e in edges):
                        raise InvalidPartitionError(f"setting {s['id']!r}: region {k} has edges out of range")
            elif s["id"] not in SETTING_IDS:
                raise DomainError(f"setting {s['id']!r} needs explicit regions")
        self.resolve_states()

    def build_lattice(self) -> Lattice:
        return lattice_from_spec(self.lattice)

    def resolve_states(self) -> List[StateSpec]:
        rng = np.random.default_rng(self.seed)
        out = []
        for s in self.states:
            sid = s.get("id")
            if sid is None:
                raise DomainError("every state needs an id")
            if "random" in s:
                for k in range(int(s["random"])):
                    out.append(StateSpec(f"{sid}{k}", FluxCoefficients.random(rng)))
            elif "flux" in s:
                out.append(StateSpec(sid, FluxCoefficients.basis(s["flux"])))
            elif "c" in s:
                out.append(StateSpec(sid, FluxCoefficients.from_json(s["c"])))
            else:
                raise DomainError(f"state {sid!r} needs 'c', 'flux' or 'random'")
        return out

    def resolve_settings(self, lat: Lattice) -> List[SettingSpec]:
        out = []
        for s in self.settings:
            if "regions" in s:
                regs = s["regions"]
                A, B = Region(regs["A"], "A"), Region(regs["B"], "B")
                C = regs.get("C")
                if C is None:
                    C = [e for e in range(lat.n) if e not in A.edges | B.edges]
                out.append(SettingSpec(s["id"], A, B, Region(C, "C")))
            else:
                A, B, C = generate_setting(lat, s["id"], self.axis)
                out.append(SettingSpec(s["id"], A, B, C))
        return out


# ---------------------------------------------------------------- rows


@dataclass
class ComparisonRow:
    setting: str
    state: str
    setting_class: str
    mode: str  # "full", "prediction-only" or "oracle-only"
    predicted: Optional[float]
    oracle: Optional[float]
    tolerance: float
    witnesses: Dict
    quantities: Dict = field(default_factory=dict)
    provenance: Dict = field(default_factory=dict)
    note: str = ""

    @property
    def abs_diff(self) -> Optional[float]:
        if self.predicted is None or self.oracle is None:
            return None
        return abs(self.predicted - self.oracle)

    @property
    def passed(self) -> Optional[bool]:
        d = self.abs_diff
        return None if d is None else bool(d <= self.tolerance)

    def to_dict(self) -> Dict:
        return {
            "setting": self.setting,
            "state": self.state,
            "class": self.setting_class,
            "mode": self.mode,
            "predicted": self.predicted,
            "oracle": self.oracle,
            "abs_diff": self.abs_diff,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "witnesses": self.witnesses,
            "quantities": self.quantities,
            "provenance": self.provenance,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ComparisonRow":
        return cls(d["setting"], d["state"], d["class"], d["mode"], d["predicted"], d["oracle"], d["tolerance"],
                   d.get("witnesses", {}), d.get("quantities", {}), d.get("provenance", {}), d.get("note", ""))


class _StateCache:
    def __init__(self, lat, axis, max_qubits):
        self.lat, self.axis, self.max_qubits = lat, axis, max_qubits
        self._basis = None

    @property
    def basis(self):
        if self._basis is None:
            self._basis = flux_basis(self.lat, self.axis, self.max_qubits)
        return self._basis

    def state(self, c):
        return generic_state(self.lat, c, basis=self.basis)


def _oracle_log_negativity(psi, A: Region, B: Region) -> float:
    lam = None
    if len(A) + len(B) == psi.n:
        from .groundstate import schmidt_spectrum
        return schmidt_spectrum(psi, A).log_negativity
    lam = state_pt_spectrum(psi, A, B)
    return float(np.log2(np.sum(np.abs(lam))))


def evaluate(lat: Lattice, spec: SettingSpec, state: StateSpec, cfg: SweepConfig,
             cache: Optional[_StateCache] = None) -> ComparisonRow:
    """One comparison row; the oracle is skipped (prediction-only) when caps forbid it."""
    provenance = {
        "lattice": {"topology": lat.topology.value, "Lx": lat.Lx, "Ly": lat.Ly},
        "axis": cfg.axis,
        "regions": {"A": spec.A.sorted(), "B": spec.B.sorted(), "C": spec.C.sorted()},
        "c": state.c.to_json(),
    }
    try:
        setting = classify(lat, spec.A, spec.B, spec.C, axis=cfg.axis)
    except UnsupportedSettingError as err:
        return ComparisonRow(spec.id, state.id, "unsupported", "oracle-only", None, None, cfg.tolerance,
                             {"error": str(err)}, provenance=provenance, note=str(err))
    predicted = predict_log_negativity(setting, c=state.c)
    witnesses = setting.witnesses()
    witnesses["c_winds"] = cfg.axis in setting.c_windings
    if lat.n > cfg.max_qubits:
        return ComparisonRow(spec.id, state.id, setting.cls.value, "prediction-only", predicted, None, cfg.tolerance,
                             witnesses, provenance=provenance,
                             note=f"refused: {lat.n} qubits exceeds max_qubits={cfg.max_qubits}")
    cache = cache or _StateCache(lat, cfg.axis, cfg.max_qubits)
    try:
        psi = cache.state(state.c)
        oracle = _oracle_log_negativity(psi, spec.A, spec.B)
        fixed = _oracle_log_negativity(cache.basis["I"], spec.A, spec.B)
    except ResourceLimitError as err:
        return ComparisonRow(spec.id, state.id, setting.cls.value, "prediction-only", predicted, None, cfg.tolerance,
                             witnesses, provenance=provenance, note=f"refused: {err}")
    witnesses["boundary_oracle"] = fixed
    witnesses["long_range_oracle"] = oracle - fixed
    quantities: Dict = {}
    q = set(cfg.quantities)
    if "negativity" in q:
        quantities["negativity"] = (2 ** oracle - 1) / 2
    if "renyi" in q or "schmidt" in q:
        rep = state_entanglement_report(psi, spec.A, spec.B if len(spec.C) else None, cfg.renyi_orders,
                                        max_spectrum=0)
        if "renyi" in q:
            quantities["renyi_A"] = {repr(k): v for k, v in rep.renyi.items()}
            quantities["von_neumann_A"] = rep.von_neumann
    if "mutual_information" in q:
        quantities["mutual_information"] = state_mutual_information(psi, spec.A, spec.B)
    if "classical_structure" in q and setting.cls in (SettingClass.NO_SHARED_BOUNDARY_CLASSICAL,
                                                      SettingClass.NO_SHARED_BOUNDARY_PRODUCT):
        if len(spec.A) + len(spec.B) <= 13:
            quantities["classical_structure"] = check_classical_structure(
                lat, spec.A, spec.B, state.c, cfg.axis, basis=cache.basis).to_dict()
    return ComparisonRow(spec.id, state.id, setting.cls.value, "full", predicted, oracle, cfg.tolerance,
                         witnesses, quantities, provenance)


# ---------------------------------------------------------------- sweeps and reports


def _qualitative_checks(rows: Sequence[ComparisonRow], tol: float) -> Dict[str, Optional[bool]]:
    """Machine-checked version of the partition-sequence table."""
    full = [r for r in rows if r.mode == "full"]
    if not full:
        return {}
    checks: Dict[str, Optional[bool]] = {}
    boundary_ok = True
    long_ok = True
    zero_ok = True
    for r in full:
        w = r.witnesses
        counts = w.get("surviving_counts", [])
        if r.setting in ("a", "b", "c", "d", "e"):
            boundary_ok &= abs(w["boundary_oracle"] - sum(n - 1 for n in counts)) <= tol and len(counts) > 0
        has_long = w["long_range_oracle"] > tol
        expect_long = w["long_range"] and not w["c_winds"]
        predicted_long = (r.predicted or 0.0) - sum(n - 1 for n in counts) if r.predicted is not None else 0.0
        if expect_long and predicted_long <= tol:
            expect_long = False  # a single-flux state has no long-range term to lose
        long_ok &= has_long == expect_long
        if r.setting in ("f", "g"):
            zero_ok &= abs(r.oracle) <= tol
    by_id = {r.setting: r for r in full}
    if "a" in by_id:
        ref = by_id["a"].witnesses["boundary_oracle"]
        for s in ("b", "c"):
            if s in by_id:
                boundary_ok &= abs(by_id[s].witnesses["boundary_oracle"] - ref) <= tol
    checks["boundary_terms_persist"] = bool(boundary_ok)
    checks["long_range_drops_iff_c_winds"] = bool(long_ok)
    checks["no_shared_boundary_unentangled"] = bool(zero_ok) if any(r.setting in ("f", "g") for r in full) else None
    return checks


def run_sweep(cfg: Union[SweepConfig, Mapping, str, Path], out_dir: Union[str, Path, None] = None) -> Dict:
    """Evaluate every (setting x state) row in config order and return the report document.

    When ``out_dir`` is given, ``<name>.json`` and ``<name>.csv`` are written there.
    """
    if not isinstance(cfg, SweepConfig):
        cfg = SweepConfig.load(cfg)
    lat = cfg.build_lattice()
    states = cfg.resolve_states()
    specs = cfg.resolve_settings(lat)
    cache = _StateCache(lat, cfg.axis, cfg.max_qubits)
    rows = [evaluate(lat, spec, st, cfg, cache) for spec in specs for st in states]
    failed = [r for r in rows if r.passed is False]
    report = {
        "schema_version": SCHEMA_VERSION,
        "name": cfg.name,
        "config": cfg.to_dict(),
        "rows": [r.to_dict() for r in rows],
        "checks": _qualitative_checks(rows, cfg.tolerance),
        "summary": {
            "rows": len(rows),
            "passed": sum(1 for r in rows if r.passed),
            "failed": len(failed),
            "prediction_only": sum(1 for r in rows if r.mode == "prediction-only"),
            "oracle_only": sum(1 for r in rows if r.mode == "oracle-only"),
        },
    }
    report["ok"] = not failed and all(v is not False for v in report["checks"].values())
    if out_dir is not None:
        write_report(report, out_dir)
    return report


def predict_only(cfg: Union[SweepConfig, Mapping, str, Path]) -> Dict:
    """Closed-form rows with no oracle and no qubit cap."""
    if not isinstance(cfg, SweepConfig):
        cfg = SweepConfig.load(cfg)
    cfg = copy.copy(cfg)
    cfg.max_qubits = -1
    lat = cfg.build_lattice()
    rows = [evaluate(lat, spec, st, cfg) for spec in cfg.resolve_settings(lat) for st in cfg.resolve_states()]
    for r in rows:
        if r.mode == "prediction-only":
            r.note = "closed form only"
    return {
        "schema_version": SCHEMA_VERSION,
        "name": cfg.name,
        "config": cfg.to_dict(),
        "rows": [r.to_dict() for r in rows],
        "checks": {},
        "summary": {"rows": len(rows), "passed": 0, "failed": 0, "prediction_only": len(rows), "oracle_only": 0},
        "ok": True,
    }


def format_float(x: Optional[float]) -> str:
    """12 significant digits; ``-0`` is written as ``0``."""
    if x is None:
        return ""
    if x == 0:
        x = 0.0
    return format(float(x), ".12g")


def report_to_csv(report: Mapping) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report["rows"]:
        wit = r.get("witnesses", {})
        q = r.get("quantities", {})
        w.writerow([
            r["setting"], r["state"], r["class"], r["mode"],
            format_float(r["predicted"]), format_float(r["oracle"]), format_float(r["abs_diff"]),
            "" if r["pass"] is None else ("pass" if r["pass"] else "FAIL"),
            ";".join(str(n) for n in wit.get("surviving_counts", [])),
            "" if "c_winds" not in wit else str(bool(wit["c_winds"])).lower(),
            "" if "long_range" not in wit else str(bool(wit["long_range"])).lower(),
            format_float(wit.get("boundary_oracle")), format_float(wit.get("long_range_oracle")),
            format_float(q.get("negativity")), format_float(q.get("mutual_information")),
        ])
    return buf.getvalue()


def write_report(report: Mapping, out_dir: Union[str, Path]) -> Tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = report.get("name", "report")
    jpath, cpath = out / f"{stem}.json", out / f"{stem}.csv"
    jpath.write_text(json.dumps(report, indent=1, default=_json_default) + "\n")
    cpath.write_text(report_to_csv(report))
    return jpath, cpath


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not serializable: {type(o)}")


def rerun_row(row: Mapping, tolerance: Optional[float] = None) -> ComparisonRow:
    """Recompute a row from its embedded provenance."""
    prov = row["provenance"]
    cfg = SweepConfig(
        name="rerun", lattice=prov["lattice"], axis=prov.get("axis", VERTICAL),
        settings=[{"id": row["setting"], "regions": prov["regions"]}],
        states=[{"id": row["state"], "c": prov["c"]}],
        tolerance=tolerance if tolerance is not None else row.get("tolerance", DEFAULT_TOLERANCE),
    )
    lat = cfg.build_lattice()
    spec = cfg.resolve_settings(lat)[0]
    st = cfg.resolve_states()[0]
    return evaluate(lat, spec, st, cfg)
