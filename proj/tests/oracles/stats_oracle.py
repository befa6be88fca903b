"""Frozen reference values for the statistics tests: Kruskal-Wallis from
scipy, Dunn's test from rankdata plus the normal survival function."""
import itertools
import numpy as np
from scipy.stats import kruskal, norm, rankdata

datasets = {
    "ties": [[1, 2, 2, 3], [2, 3, 3, 4, 5], [5, 5, 6], [1, 1, 7, 8]],
    "mixed": [[0.31, 0.12, 0.55], [0.9, 0.87, 0.45, 0.66], [0.12, 0.2], [0.75, 0.3, 0.31]],
    "three": [[2.5, 3.1, 4.0, 2.2], [3.3, 3.9, 5.1], [6.0, 5.5, 5.9, 7.1, 6.6]],
}

for name, groups in datasets.items():
    h, p = kruskal(*groups)
    print(f"// {name}: H={float(h)!r} p={float(p)!r}")
    pooled = np.concatenate([np.asarray(g, float) for g in groups])
    ranks = rankdata(pooled)
    n = len(pooled)
    _, counts = np.unique(pooled, return_counts=True)
    ties = float(np.sum(counts ** 3 - counts))
    offs = np.cumsum([0] + [len(g) for g in groups])
    means = [ranks[offs[i]:offs[i + 1]].mean() for i in range(len(groups))]
    m = len(groups) * (len(groups) - 1) / 2
    for a, b in itertools.combinations(range(len(groups)), 2):
        se = np.sqrt((n * (n + 1) / 12 - ties / (12 * (n - 1))) * (1 / len(groups[a]) + 1 / len(groups[b])))
        z = (means[a] - means[b]) / se
        praw = 2 * norm.sf(abs(z))
        print(f"//   {a}-{b}: z={float(z)!r} p_raw={float(praw)!r} p_adj={float(min(1.0, m * praw))!r}")
