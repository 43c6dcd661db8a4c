"""Write SVG pictures of a set and of its circular symmetral.

    python3 demos/render_pair.py drifted_wedge out_dir
"""

import sys
from pathlib import Path

from symmlab import ArcFamilySet, GridSpec, build_F_mu, distribution, generate
from symmlab.diagnostics import exact_symmetral
from symmlab.render import render_svg

RADII = (1.25, 1.5, 1.75)


def main(name="drifted_wedge", out="."):
    S = generate(name)
    F = exact_symmetral(S) if isinstance(S, ArcFamilySet) else build_F_mu(distribution(S, GridSpec(((0.0, 2.5),), (500,))))
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{name}.svg").write_text(render_svg(S, RADII, title=name))
    (out / f"{name}_symmetral.svg").write_text(render_svg(F, RADII, title=f"{name} symmetral"))
    print(f"wrote {out / name}.svg and {out / name}_symmetral.svg")


if __name__ == "__main__":
    main(*sys.argv[1:])
