"""
The partition sequence (a)-(g) as a sweep
=========================================

The bundled config runs seven settings on torus(4,2) and machine-checks the
qualitative table. The same run is available as
``toric-negativity sweep --config fig6-torus-4x2``.
"""

import sys

from toric_negativity.harness import report_to_csv, run_sweep

report = run_sweep("fig6-torus-4x2")
sys.stdout.write(report_to_csv(report))
for name, ok in report["checks"].items():
    print(f"{name}: {ok}")
print("all rows pass:", report["ok"])
