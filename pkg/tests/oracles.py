"""Independent reference computations shared by the unit and acceptance tests.

Nothing here calls into the package's enumeration or metric code.
"""
import itertools

import numpy as np


def representations(weights, n_codes):
    """All selection vectors per codeword, by plain product enumeration."""
    sets = {x: [] for x in range(n_codes)}
    for bits in itertools.product((0, 1), repeat=len(weights)):
        total = sum(b * w for b, w in zip(bits, weights))
        if total < n_codes:
            sets[total].append(bits)
    return sets


def metric_of_rows(rows, weights, probs):
    """sum_i E[W_i](1 - E[W_i]) w_i for an explicit list of rows."""
    bits = np.array(rows, dtype=float)
    means = np.asarray(probs) @ bits
    return float(np.sum(means * (1 - means) * np.asarray(weights, dtype=float)))


def brute_force_optimum(weights, probs):
    """Global minimum of the metric over every full mapping."""
    sets = representations(weights, len(probs))
    best = np.inf
    for rows in itertools.product(*(sets[x] for x in range(len(probs)))):
        best = min(best, metric_of_rows(rows, weights, probs))
    return best
