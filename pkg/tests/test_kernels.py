import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from walklab import kernels
from walklab.graph import sample_gnp
from walklab.kernels import _pure

compiled = pytest.importorskip("walklab.kernels._core")


def test_splitmix_reference_values():
    # first outputs of SplitMix64 seeded with 0 (reference sequence)
    s = 0
    outs = []
    for _ in range(3):
        s = (s + 0x9E3779B97F4A7C15) & ((1 << 64) - 1)
        z = s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & ((1 << 64) - 1)
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & ((1 << 64) - 1)
        outs.append(z ^ (z >> 31))
    assert outs[0] == 0xE220A8397B1DCDAF
    assert kernels.splitmix64(0) == outs[0]


@given(st.integers(1, 80), st.floats(0, 1), st.integers(0, 2 ** 64 - 1))
def test_gnp_backends_agree(n, p, key):
    a = _pure.gnp_edges(n, p, key)
    b = compiled.gnp_edges(n, p, key)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@given(st.integers(2, 60), st.floats(0.02, 0.5), st.integers(0, 2 ** 63), st.data())
def test_search_backends_agree(n, p, seed, data):
    g = sample_gnp(n, p, seed)
    src = data.draw(st.integers(0, n - 1))
    for depth in (-1, 2):
        assert np.array_equal(_pure.bfs_distances(g.indptr, g.indices, src, depth),
                              compiled.bfs_distances(g.indptr, g.indices, src, depth))
    other = data.draw(st.integers(0, n - 1).filter(lambda x: x != src))
    roots = np.array([src, other], dtype=np.int64)
    for clash in (True, False):
        a = _pure.mbfs(g.indptr, g.indices, roots, clash)
        b = compiled.mbfs(g.indptr, g.indices, roots, clash)
        for x, y in zip(a[:4], b[:4]):
            assert np.array_equal(x, y)
        assert a[4] == b[4]


def test_backend_flag():
    assert kernels.BACKEND in ("compiled", "pure")


def test_pure_fallback_selected_by_environment():
    import os
    import subprocess
    import sys

    code = ("import walklab, walklab.graph as G; "
            "print(walklab.BACKEND, G.sample_gnp(200, 0.05, 9).m)")
    env = {**os.environ, "WALKLAB_PURE": "1"}
    pure = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                          text=True, check=True).stdout.split()
    env["WALKLAB_PURE"] = "0"
    comp = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                          text=True, check=True).stdout.split()
    assert pure[0] == "pure" and comp[0] == "compiled"
    assert pure[1] == comp[1]
