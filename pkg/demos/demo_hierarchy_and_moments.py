"""Walk through the node hierarchy, surpluses, and analytic moments.

Builds small 1-D surrogates of f(x) = exp(x) level by level, prints the
nested node sets, and compares the analytic mean/variance extracted from the
hierarchical surpluses against the closed-form values.
"""

import math

import numpy as np

from sgsurrogate import (
    ModelFunction,
    NodeIndex1D,
    children_1d,
    coord_1d,
    moments,
    run_csc,
)

# the nested 1-D hierarchy: one midpoint, the boundary pair, then dyadic fill
print("levels of the nested 1-D grid")
for level in range(1, 5):
    count = 1 if level == 1 else (2 if level == 2 else 2 ** (level - 2))
    coords = [coord_1d(NodeIndex1D(level, j)) for j in range(count)]
    print(f"  level {level}: {coords}")

root = NodeIndex1D(1, 0)
print("\nsons of the root:", [coord_1d(c) for c in children_1d(root)])
print("sons of the node at 0.25:",
      [coord_1d(c) for c in children_1d(NodeIndex1D(3, 0))])

# surrogate of exp(x), refined conventionally
print("\nconvergence of the analytic moments for f(x) = exp(x)")
true_mean = math.e - 1.0
true_var = (math.e ** 2 - 1.0) / 2.0 - true_mean ** 2
print(f"  closed form: mean = {true_mean:.10f}, variance = {true_var:.10f}")
for level in (2, 4, 6, 8):
    f = ModelFunction(lambda x: math.exp(x[0]), 1, "exp")
    result = run_csc(f, 1, level)
    est = moments(result.model)
    print(f"  level {level}: nodes = {len(result.model):4d}  "
          f"mean err = {abs(est.mean - true_mean):.2e}  "
          f"variance err = {abs(est.variance - true_var):.2e}")

# the surrogate interpolates its own samples exactly
result = run_csc(ModelFunction(lambda x: math.exp(x[0]), 1, "exp"), 1, 6)
model = result.model
worst = max(
    abs(model.interpolate(n.point.coordinate()) - n.output) for n in model.nodes()
)
print(f"\nworst node reproduction error at level 6: {worst:.2e}")

x = np.linspace(0, 1, 7)
print("surrogate vs exp on a few points:")
for xi in x:
    print(f"  x = {xi:.3f}: surrogate = {model.interpolate([xi]):.8f}, "
          f"exp = {math.exp(xi):.8f}")
