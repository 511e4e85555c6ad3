"""Brute-force reference implementations, independent of fuselab.metrics."""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def auroc_pairs(labels, scores) -> float:
    """Mann-Whitney by enumerating every (positive, negative) pair."""
    y = np.asarray(labels)
    s = np.asarray(scores, dtype=float)
    pos, neg = s[y == 1], s[y == 0]
    diff = np.sign(pos[:, None] - neg[None, :]).astype(np.int64)
    # sign + 1 counts a win as 2, a tie as 1, a loss as 0
    doubled = int((diff + 1).sum())
    return doubled / (2 * pos.size * neg.size)


def ap_prefixes(labels, scores) -> float:
    """Average precision by enumerating every score threshold.

    For each distinct threshold t the prediction set is ``score >= t``;
    recall gained between consecutive thresholds is weighted by precision
    at the lower one.
    """
    y = np.asarray(labels)
    s = np.asarray(scores, dtype=float)
    thresholds = np.array(sorted(set(s.tolist()), reverse=True))
    predicted = s[None, :] >= thresholds[:, None]
    tp = (predicted & (y[None, :] == 1)).sum(axis=1)
    pp = predicted.sum(axis=1)
    n_pos = int(y.sum())
    total, prev = 0.0, 0
    for t, p in zip(tp.tolist(), pp.tolist()):
        total += (t - prev) / n_pos * (t / p)
        prev = t
    return total


def ap_prefixes_exact(labels, scores) -> Fraction:
    """Same enumeration in rational arithmetic, for small hand examples."""
    pairs = list(zip(labels, scores))
    n_pos = sum(1 for l, _ in pairs if l == 1)
    total, prev = Fraction(0), 0
    for t in sorted({s for _, s in pairs}, reverse=True):
        tp = sum(1 for l, s in pairs if s >= t and l == 1)
        pp = sum(1 for _, s in pairs if s >= t)
        total += Fraction(tp - prev, n_pos) * Fraction(tp, pp)
        prev = tp
    return total


def random_instance(rng: np.random.Generator, max_n: int = 200, dup_prob: float = 0.3):
    """Labels and scores with both classes and injected duplicate scores."""
    n = int(rng.integers(2, max_n + 1))
    labels = rng.integers(0, 2, n)
    labels[rng.choice(n, 2, replace=False)] = (1, 0)
    scores = rng.random(n)
    dup = rng.random(n) < dup_prob
    scores[dup] = scores[rng.integers(0, n, int(dup.sum()))]
    return labels, scores
