#!/usr/bin/env python3
"""Random-problem cross-check: dual solver against the brute-force grid.

Draws random constrained problems on small classical and qubit models, solves
each with the exponential-family dual, and reports the worst entropy gap
against the grid oracle. The solver should never fall more than twice the
grid resolution below the oracle.
"""

import argparse
import sys
import time

import numpy as np

from gmaxent import (
    Classical,
    ConvexRegion,
    MaxEntProblem,
    Quantum,
    Shannon,
    SolveStatus,
    VonNeumann,
    oracle_maxent,
    solve_dual,
)
from gmaxent.regions import LinearConstraint


def random_classical(rng, d, n_constraints):
    model = Classical(d)
    anchor = np.exp(rng.standard_normal(d)) + 0.2
    anchor /= anchor.sum()
    constraints = tuple(
        LinearConstraint(model, f, float(f @ anchor))
        for f in rng.uniform(-1.0, 1.0, (n_constraints, d))
    )
    return MaxEntProblem(model, ConvexRegion(model, constraints), Shannon())


def random_qubit(rng, n_constraints):
    model = Quantum(2)
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    anchor = g @ g.conj().T + 0.4 * np.eye(2)
    anchor /= anchor.trace().real
    constraints = []
    for _ in range(n_constraints):
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        op = (g + g.conj().T) / 2.0
        constraints.append(
            LinearConstraint(model, model.matrix_to_coords(op), float(np.trace(anchor @ op).real))
        )
    return MaxEntProblem(model, ConvexRegion(model, tuple(constraints)), VonNeumann())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=20)
    parser.add_argument("--resolution", type=float, default=2e-3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    worst_gap = -np.inf
    worst_residual = 0.0
    start = time.perf_counter()
    for i in range(args.count):
        if i % 2 == 0:
            d = int(rng.integers(2, 5))
            problem = random_classical(rng, d, 1 if d < 4 else 2)
        else:
            problem = random_qubit(rng, int(rng.integers(1, 3)))
        sol = solve_dual(problem)
        assert sol.status == SolveStatus.CONVERGED, sol.status
        oracle = oracle_maxent(problem, args.resolution)
        gap = oracle.entropy - sol.entropy  # positive iff the oracle beat the solver
        worst_gap = max(worst_gap, gap)
        worst_residual = max(worst_residual, float(np.max(sol.residuals)))
        kind = problem.model.kind
        print(f"[{i:3d}] {kind:9s} entropy={sol.entropy:.8f} oracle={oracle.entropy:.8f} gap={gap:+.2e}")
    elapsed = time.perf_counter() - start
    print(f"\nworst oracle-minus-solver gap: {worst_gap:+.3e} (bound {2 * args.resolution:.1e})")
    print(f"worst constraint residual:     {worst_residual:.3e}")
    print(f"elapsed: {elapsed:.1f} s")
    if worst_gap > 2 * args.resolution:
        sys.exit(1)


if __name__ == "__main__":
    main()
