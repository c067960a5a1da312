"""Growing a small sample set on which sampled sup norms are trustworthy.

Starting from one point, the greedy loop finds the polynomial that is
largest relative to its samples and adds the point where it peaks, until
the stability constant drops below 2.
"""
import numpy as np

from reskit.basis import harmonic_basis
from reskit.geometry import UnitDisk, boundary_points
from reskit.stability import greedy_norming_set

disk = UnitDisk()
candidates = boundary_points(disk, 512)

for K in (2, 4, 6, 8, 10):
    space = harmonic_basis(K)
    res = greedy_norming_set(space, candidates, target_C=2.0, budget=8 * space.dim)
    angles = np.sort(np.degrees(np.arctan2(res.points.y, res.points.x)) % 360)
    gaps = np.diff(np.r_[angles, angles[0] + 360])
    print(f"K={K:2d}  dim={space.dim:2d}  points={len(res.indices):3d}  C={res.report.C:.3f}"
          f"  largest angular gap={gaps.max():5.1f} deg  flags={res.flags or '-'}")
