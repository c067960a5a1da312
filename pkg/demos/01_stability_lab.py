"""How safely do point samples stand in for a polynomial's sup norm?

For each node family and oversampling rule we compute, exactly by linear
programming, the smallest C with ``max |p| <= C * max_i |p(x_i)|`` over all
polynomials of order M.  Run:  python3 demos/01_stability_lab.py [out_dir]
"""
import sys
import time
from pathlib import Path

import numpy as np

from reskit.stability import lab_csv, stability_lab

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

regimes = [
    ("chebyshev", "none", [5, 10, 20, 40]),
    ("equidistant", "none", [5, 10, 15, 20]),
    ("chebyshev", "pi", [5, 10, 20, 40, 50]),
    ("equidistant", "msquared", [5, 10, 15, 20]),
]

all_reports = []
for family, rule, orders in regimes:
    t0 = time.perf_counter()
    reports = stability_lab(family, orders, rule)
    all_reports += reports
    print(f"\n{family} nodes, N rule '{rule}'  ({time.perf_counter() - t0:.1f}s)")
    for r in reports:
        print(f"  M={r.M:3d}  N={r.N:4d}  C={r.C:12.4f}  LPs={r.lp_solves}")

# With as many nodes as coefficients, Chebyshev nodes give slow growth in M;
# a least-squares line against ln M makes that visible.
cheb = [r for r in all_reports if r.family == "chebyshev" and r.oversampling == "none"]
slope, _ = np.polyfit(np.log([r.M for r in cheb]), [r.C for r in cheb], 1)
print(f"\nChebyshev, N = M: C grows like {slope:.3f} * ln M (2/pi = {2 / np.pi:.3f})")

(out / "stability_lab.csv").write_text(lab_csv(all_reports))
print(f"table written to {out / 'stability_lab.csv'}")
