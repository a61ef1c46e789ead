#!/usr/bin/env python3
"""Sweep the mean-energy condition on a qubit and compare with closed forms.

For H = diag(0, 1) and the condition <H> = t, the entropy maximizer is the
Gibbs state diag(1-t, t) with multiplier ln((1-t)/t), so every solver output
can be checked analytically.
"""

import argparse

import numpy as np

from gmaxent import MaxEntProblem, Quantum, VonNeumann, region_from_mean, solve_dual, spectral_observable


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=19)
    args = parser.parse_args()

    model = Quantum(2)
    hamiltonian = spectral_observable(model, np.diag([0.0, 1.0]).astype(complex))
    print(f"{'target':>8} {'lambda1':>12} {'lambda1*':>12} {'entropy':>12} {'entropy*':>12} {'iters':>6}")
    worst = 0.0
    for t in np.linspace(0.05, 0.95, args.steps):
        problem = MaxEntProblem(model, region_from_mean(hamiltonian, float(t)), VonNeumann())
        sol = solve_dual(problem)
        lam_exact = np.log((1.0 - t) / t)
        ent_exact = -(t * np.log(t) + (1.0 - t) * np.log(1.0 - t))
        worst = max(worst, abs(sol.multipliers[0] - lam_exact), abs(sol.entropy - ent_exact))
        print(
            f"{t:8.3f} {sol.multipliers[0]:12.8f} {lam_exact:12.8f} "
            f"{sol.entropy:12.8f} {ent_exact:12.8f} {sol.iterations:6d}"
        )
    print(f"\nworst deviation from closed form: {worst:.3e}")


if __name__ == "__main__":
    main()
