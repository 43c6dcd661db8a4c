"""Local density of the wedge symmetral along rays through a point on r = 1.5.

The profile falls from 1 inside the symmetral to 1/2 on its boundary
(gamma = pi/6 for the default wedge) and to 0 outside.

    python3 demos/density_profile.py [n_samples]
"""

import math
import sys

from symmlab import GridSpec, build_F_mu, density_profile, distribution, generate

GAMMAS = [0.0, math.pi / 12, math.pi / 6 - 0.01, math.pi / 6, math.pi / 6 + 0.01, math.pi / 2, math.pi]


def main(n=100_000):
    mu = distribution(generate("wedge"), GridSpec(((0.0, 2.5),), (1000,)))
    prof = density_profile(build_F_mu(mu), 1.5, None, GAMMAS, [0.1, 0.02, 0.004], n, seed=0)
    print("gamma      " + "  ".join(f"rho={r:<6g}" for r in prof.rhos))
    for g, est, se in zip(prof.gammas, prof.estimates, prof.stderr):
        print(f"{g:8.5f}  " + "  ".join(f"{e:.4f}+-{s:.4f}" for e, s in zip(est, se)))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 100_000)
