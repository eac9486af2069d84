"""From an edge-list file to a rank estimate, by hand and through the CLI.

A directed graph is written to disk, read back, made undirected, reduced to
its largest connected component and tested.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from rirs import (
    ModelSpec, bipartite_double, estimate_k, largest_connected_component, read_edgelist, strip_selfloops,
)
from rirs.cli import main

# a sparse two-community graph, with each undirected edge given a random direction
A = ModelSpec("sbm", n=500, K=2, rho=0.1, r=0.9).generate(seed=8).entries
i, j = np.nonzero(np.triu(A, 1))
flip = np.random.default_rng(0).random(i.size) < 0.5
src, dst = np.where(flip, j, i), np.where(flip, i, j)

tmp = Path(tempfile.mkdtemp())
path = tmp / "graph.edges"
path.write_text("# src dst\n" + "".join(f"{a + 1} {b + 1}\n" for a, b in zip(src, dst)))

edges = read_edgelist(path)
X = strip_selfloops(edges.to_symmatrix())  # ignore directions
X, mapping = largest_connected_component(X)
print(f"{edges.n} nodes read, largest component keeps {X.n}")
print("estimated K:", estimate_k(X, k_max=6, seed=1).k_hat)

# the doubled matrix [[0, X], [X^T, 0]] has twice the rank
D, _ = largest_connected_component(bipartite_double(edges.to_dense()))
k2 = estimate_k(D, k_max=8, seed=1).k_hat
print(f"doubled matrix ({D.n} nodes) gives {k2}, i.e. K = {k2 / 2:g}")

# same pipeline through the command line; the summary halves the doubled estimate
out = tmp / "est.json"
main(["estimate", "--input", str(path), "--transform", "double", "--seed", "1", "--k-max", "8", "--out", str(out)])
print(json.loads(out.read_text())["note"])
