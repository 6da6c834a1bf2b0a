"""Classify the built-in presets and follow the traveling-wave spectrum in c_s.

Run: python3 demos/structure_and_spectrum.py
"""
import numpy as np

from bousms import travel
from bousms.coeffs import PRESETS, classify_structure, classify_wellposedness


def main():
    print(f"{'preset':14s} {'MS':>5s} {'sympl':>6s}  linear  nonlinear  violated")
    for name, s in PRESETS.items():
        r, w = classify_structure(s), classify_wellposedness(s)
        print(f"{name:14s} {str(r.is_multisymplectic):>5s} {str(r.is_symplectic):>6s}  "
              f"{str(w.linear_case):6s}  {w.nonlinear_case:9s}  {', '.join(r.violated_conditions) or '-'}")

    # the spectrum of the linearized profile equations changes character at c_s = 1
    for name in ("figure2", "kdvkdv"):
        print(f"\n{name}: eigenvalues of the traveling-wave linearization")
        for c_s in (0.9, 1.01, 1.2):
            rep = travel.eigen_classify(travel.TravelingWaveSetup(PRESETS[name], c_s))
            lam = ", ".join(f"{z.real:+.3f}{z.imag:+.3f}i" for z in rep.eigenvalues)
            print(f"  c_s={c_s:<5} {rep.classification:7s} [{lam}]")


if __name__ == "__main__":
    np.set_printoptions(precision=4)
    main()
