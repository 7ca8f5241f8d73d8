"""
Strichartz norms of concentrated data
=====================================

For admissible ``(q, r)`` the free flow of ``P_lam f`` satisfies
``||S(t) P_lam f||_{L^q_t L^r_x} <~ lam^{(3d/8)(1-2/r)} ||P_lam f||_2``.
We measure the 1d ``(4, inf)`` norm for three frequencies on a long horizon.
"""

import math

from whitham_lab.dispersion import strichartz_scaling

results, slope = strichartz_scaling(1, 4.0, math.inf, [8.0, 32.0, 128.0], T=354.0,
                                    n_times=129)
for res in results:
    print(f"lam = {res.spec.lam:>5g}  norm = {res.norm:.5f}  ratio = {res.ratio:.4f}"
          f"  time-refinement change = {res.refinement_change:.1e}")
ratios = [res.ratio for res in results]
print(f"\nratio variation {max(ratios) / min(ratios):.3f}; fitted exponent {slope:.3f}"
      f" (predicted {results[0].spec.loss_exponent})")
