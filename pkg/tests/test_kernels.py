"""Compiled extension vs pure-Python fallback agreement."""

import numpy as np
import pytest

from interdict import _pykernels
from interdict.graph import SuccessFunction

from _corpus import corpus

try:
    from interdict import _core
except ImportError:
    _core = None

needs_ext = pytest.mark.skipif(_core is None,
                               reason="compiled extension not built")


def _csr_inputs(g):
    indptr, src, eids = g._rev_csr
    return g.n, indptr, src, eids, g.index_of(g.da)


@needs_ext
def test_backends_agree_on_distances():
    import random
    rng = random.Random(99)
    for g, _ in corpus(25, seed0=66):
        n, indptr, src, eids, da = _csr_inputs(g)
        cands = list(g.blockable_edges)
        blocks = rng.sample(cands, rng.randint(0, len(cands))) if cands else []
        mask = g.blocked_mask(blocks)
        fast = _core.hop_distances(n, indptr, src, eids, da, mask)
        slow = _pykernels.hop_distances(n, indptr, src, eids, da, mask)
        assert np.array_equal(fast, slow)


@needs_ext
def test_backends_agree_on_rates():
    import random
    rng = random.Random(17)
    f = SuccessFunction()
    for g, _ in corpus(25, seed0=88):
        n, indptr, src, eids, da = _csr_inputs(g)
        ftable = f.table(max(n, 1))
        entries = g._entry_idx
        cands = list(g.blockable_edges)
        blocks = rng.sample(cands, rng.randint(0, len(cands))) if cands else []
        mask = g.blocked_mask(blocks)
        fast = _core.blocked_rate(n, indptr, src, eids, da, mask, entries,
                                  ftable)
        slow = _pykernels.blocked_rate(n, indptr, src, eids, da, mask,
                                       entries, ftable)
        assert fast == pytest.approx(slow, abs=1e-15)


def test_pure_backend_selected_by_env(tmp_path):
    import subprocess
    import sys
    out = subprocess.run(
        [sys.executable, "-c",
         "from interdict import kernels; print(kernels.BACKEND)"],
        env={"INTERDICT_PURE": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True, text=True)
    assert out.stdout.strip() == "pure"
