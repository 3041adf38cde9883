"""Tests of the blossom matching engine against independent oracles."""

import itertools

import numpy as np
import pytest

from sscsim.matching import (
    matching_weight,
    max_weight_matching,
    min_weight_perfect_matching,
)

try:
    import networkx as nx
except ImportError:  # pragma: no cover
    nx = None


def brute_force_min_perfect(dist: np.ndarray) -> float:
    """Exhaustive minimum over all perfect matchings (n <= 12)."""
    n = dist.shape[0]

    def rec(nodes: tuple) -> float:
        if not nodes:
            return 0.0
        a = nodes[0]
        best = np.inf
        for i in range(1, len(nodes)):
            b = nodes[i]
            rest = nodes[1:i] + nodes[i + 1 :]
            best = min(best, dist[a, b] + rec(rest))
        return best

    return rec(tuple(range(n)))


def test_perfect_matching_matches_bruteforce_randomized():
    rng = np.random.default_rng(2)
    for _ in range(400):
        n = int(rng.integers(1, 6)) * 2
        d = rng.random((n, n)) * 10
        d = (d + d.T) / 2
        np.fill_diagonal(d, 0)
        mate = min_weight_perfect_matching(d, k_neighbors=None)
        assert (mate >= 0).all() and (mate[mate] == np.arange(n)).all()
        w = matching_weight(d, mate)
        assert w == pytest.approx(brute_force_min_perfect(d), abs=1e-9)


def test_perfect_matching_beats_greedy():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(3, 12)) * 2
        d = rng.random((n, n)) * 5
        d = (d + d.T) / 2
        np.fill_diagonal(d, 0)
        mate = min_weight_perfect_matching(d, k_neighbors=None)
        w = matching_weight(d, mate)
        # greedy pairing: repeatedly match the globally closest free pair
        free = set(range(n))
        greedy = 0.0
        while free:
            pairs = [(d[a, b], a, b) for a in free for b in free if a < b]
            wmin, a, b = min(pairs)
            greedy += wmin
            free -= {a, b}
        assert w <= greedy + 1e-12


@pytest.mark.skipif(nx is None, reason="networkx unavailable")
def test_max_weight_matching_against_networkx():
    rng = np.random.default_rng(4)
    for _ in range(150):
        n = int(rng.integers(2, 18))
        maxm = n * (n - 1) // 2
        m = int(rng.integers(1, maxm + 1))
        iu, iv = np.triu_indices(n, k=1)
        pick = rng.choice(maxm, size=m, replace=False)
        eu, ev = iu[pick], iv[pick]
        # integer weights force heavy ties and deep blossom nesting
        ew = rng.integers(1, 6, m).astype(float)
        maxcard = bool(rng.random() < 0.5)
        mate, _, _ = max_weight_matching(n, eu, ev, ew, maxcard)
        wl = {(int(a), int(b)): w for a, b, w in zip(eu, ev, ew)}
        mine = 0.0
        card = 0
        for v in range(n):
            if mate[v] > v:
                mine += wl.get((v, int(mate[v])), wl.get((int(mate[v]), v)))
                card += 1
        G = nx.Graph()
        G.add_nodes_from(range(n))
        for a, b, w in zip(eu, ev, ew):
            G.add_edge(int(a), int(b), weight=float(w))
        M = nx.max_weight_matching(G, maxcardinality=maxcard)
        ref = sum(G[a][b]["weight"] for a, b in M)
        assert mine == pytest.approx(ref, abs=1e-8)
        if maxcard:
            assert card == len(M)


def test_knn_certificate_path_equals_dense():
    rng = np.random.default_rng(5)
    for _ in range(40):
        n = int(rng.integers(15, 50)) * 2
        pts = rng.random((n, 3)) * [8.0, 8.0, 4.0]
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        m1 = min_weight_perfect_matching(d, k_neighbors=6)
        m2 = min_weight_perfect_matching(d, k_neighbors=None)
        assert matching_weight(d, m1) == pytest.approx(
            matching_weight(d, m2), abs=1e-9
        )


def test_odd_inputs_are_rejected():
    with pytest.raises(ValueError):
        min_weight_perfect_matching(np.zeros((3, 3)))


def test_empty_matching():
    assert len(min_weight_perfect_matching(np.zeros((0, 0)))) == 0


def test_deterministic_ties():
    d = np.ones((6, 6))
    np.fill_diagonal(d, 0)
    a = min_weight_perfect_matching(d, k_neighbors=None)
    b = min_weight_perfect_matching(d, k_neighbors=None)
    assert np.array_equal(a, b)
