"""Inequality and equality verdicts for the built-in fixtures.

    python3 demos/equality_cases.py
"""

import warnings

from symmlab import Box, generate, steiner_verify, verify_inequality
from symmlab.bv import FullSliceWarning

CIRCULAR = [
    ("rotated_wedge", "r:[1,2]"),
    ("half_disk", "r:[0,2]"),
    ("unit_square", "r:[0,1.5]"),
    ("drifted_wedge", "r:[1,2]"),
    ("twisted_band", "r:(1,2),z:(0,1)"),
    ("split_wedge", "r:[1,2]"),
]
STEINER = ["unit_square", "sheared_square", "stacked_squares"]


def row(name, mode, rep):
    a, b = rep.condition_a.passed, rep.condition_b.passed
    print(f"{name:16s} {mode:9s} {rep.p_set:9.5f} {rep.p_symmetral:9.5f} {rep.gap:9.5f}  "
          f"{'yes' if a else 'no':3s} {'yes' if b else 'no':3s} {'equality' if rep.equality else 'strict'}")


def main():
    warnings.simplefilter("ignore", FullSliceWarning)
    print(f"{'set':16s} {'mode':9s} {'P(E)':>9s} {'P(F)':>9s} {'gap':>9s}  a   b   verdict")
    for name, region in CIRCULAR:
        row(name, "circular", verify_inequality(generate(name), Box.parse(region, ("r", "z"))))
    for name in STEINER:
        row(name, "steiner", steiner_verify(generate(name), Box(((-1.0, 2.0),))))


if __name__ == "__main__":
    main()
