"""Drift of conserved quantities under the pseudo-spectral RK4 integrator.

A Gaussian pulse pair is evolved for three systems. The multi-symplectic
ones keep their quadratic invariant or Hamiltonian to roundoff; the control
system (b = d but outside the Hamiltonian family) does not.

Run: python3 demos/conservation.py
"""
import numpy as np

from bousms import sim
from bousms import spectralkit as sk
from bousms.coeffs import preset


def run(name, key, T=10.0, dt=1e-3):
    g = sk.PeriodicGrid(40.0, 512)
    x = g.x
    state = sim.FieldState(g, 0.3 * np.exp(-(x / 2) ** 2), 0.2 * np.exp(-((x - 3) / 2) ** 2))
    rec = []
    sim.integrate(preset(name), state, T, dt, rec.append, observe_every=1000)
    v = np.array([getattr(d, key) for d in rec])
    m = np.array([d.mass_eta for d in rec])
    print(f"{name:12s} {key:12s} rel drift {np.max(np.abs(v - v[0])) / abs(v[0]):.2e}   "
          f"mass drift {np.max(np.abs(m - m[0])):.1e}")


def main():
    run("symmetric", "l2")
    run("ms-modified", "hamiltonian")
    run("ms-modified", "impulse")
    run("figure2", "l2_weighted")
    run("figure2", "hamiltonian")


if __name__ == "__main__":
    main()
