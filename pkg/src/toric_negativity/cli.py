"""Command-line entry point: ``compute``, ``sweep``, ``predict``, ``anyon-calc`` and ``report``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .closedform import AnyonModel, anyon_entropy
from .errors import ToricNegativityError
from .harness import (
    SweepConfig,
    predict_only,
    report_to_csv,
    run_sweep,
    write_report,
)


def _load_config(args) -> SweepConfig:
    cfg = SweepConfig.load(args.config)
    if args.tolerance is not None:
        cfg.tolerance = args.tolerance
    if args.max_qubits is not None:
        cfg.max_qubits = args.max_qubits
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _emit(report, args) -> None:
    if args.out:
        jpath, cpath = write_report(report, args.out)
        print(f"wrote {jpath} and {cpath}")
    else:
        sys.stdout.write(report_to_csv(report))
    for name, ok in report.get("checks", {}).items():
        if ok is not None:
            print(f"check {name}: {'pass' if ok else 'FAIL'}", file=sys.stderr)


def cmd_sweep(args) -> int:
    report = run_sweep(_load_config(args))
    _emit(report, args)
    return 0 if report["ok"] else 1


def cmd_compute(args) -> int:
    cfg = _load_config(args)
    if args.setting:
        cfg.settings = [s for s in cfg.settings if s["id"] == args.setting]
    if len(cfg.settings) != 1:
        print("compute needs exactly one setting; pass --setting ID", file=sys.stderr)
        return 2
    report = run_sweep(cfg)
    _emit(report, args)
    return 0 if report["ok"] else 1


def cmd_predict(args) -> int:
    report = predict_only(_load_config(args))
    _emit(report, args)
    return 0


def cmd_report(args) -> int:
    report = json.loads(Path(args.config).read_text())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{report.get('name', 'report')}.csv"
        path.write_text(report_to_csv(report))
        print(f"wrote {path}")
    else:
        sys.stdout.write(report_to_csv(report))
    return 0


def _floats(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_anyon(args) -> int:
    if args.d:
        model = AnyonModel(tuple(_floats(args.d)))
    elif args.model == "fibonacci":
        model = AnyonModel.fibonacci()
    else:
        model = AnyonModel.toric_code()
    probs = _floats(args.probs) if args.probs else [1.0] + [0.0] * (model.N - 1)
    res = anyon_entropy(model, probs, _floats(args.boundaries), args.a, args.a_prime, args.q,
                        renyi_half=args.renyi_half or None)
    doc = {
        "schema_version": 1,
        "model": {"name": model.name, "d": list(model.d), "D": model.D, "abelian": model.abelian},
        "entropy": res.entropy,
        "gamma_bar": res.gamma_bar,
        "fixed_flux_negativity": list(res.fixed_flux_negativity),
        "renyi_half_negativity": res.renyi_half_negativity,
        "renyi_q": res.renyi_q,
    }
    text = json.dumps(doc, indent=1)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "anyon.json").write_text(text + "\n")
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toric-negativity", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required,
                        help="config JSON path or bundled config name (e.g. fig6-torus-4x2)")
        sp.add_argument("--out", help="output directory (default: CSV to stdout)")
        sp.add_argument("--tolerance", type=float)
        sp.add_argument("--max-qubits", type=int)
        sp.add_argument("--seed", type=int, help="seed for randomly sampled flux coefficients")

    sp = sub.add_parser("compute", help="evaluate one setting")
    common(sp)
    sp.add_argument("--setting", help="setting id to pick from the config")
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("sweep", help="evaluate every setting x state of a config")
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("predict", help="closed-form predictions only, no size caps")
    common(sp)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("report", help="re-render a JSON report as CSV")
    common(sp)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("anyon-calc", help="entropy/negativity calculator for generic anyon models")
    common(sp, config_required=False)
    sp.add_argument("--model", choices=["toric_code", "fibonacci"], default="toric_code")
    sp.add_argument("--d", help="comma-separated quantum dimensions (overrides --model)")
    sp.add_argument("--probs", help="comma-separated |c_i|^2")
    sp.add_argument("--boundaries", required=True, help="comma-separated boundary sizes |Gamma_m|")
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--a-prime", type=float, default=1.0)
    sp.add_argument("--q", type=float)
    sp.add_argument("--renyi-half", action="store_true", help="require the generic-state negativity")
    sp.set_defaults(func=cmd_anyon)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ToricNegativityError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
