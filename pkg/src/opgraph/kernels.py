"""Kernel selection: compiled extension when importable, pure twin otherwise.

OPGRAPH_PURE=1 forces the pure-Python twin; tests and the benchmark use that
to compare both implementations in one process.
"""

import os

from . import _pykernels

if os.environ.get("OPGRAPH_PURE") == "1":
    _impl = _pykernels
    COMPILED = False
else:
    try:
        from . import _speedups as _impl

        COMPILED = True
    except ImportError:
        _impl = _pykernels
        COMPILED = False

UNREACHED = _pykernels.UNREACHED
CUTOFF = _pykernels.CUTOFF

bfs_distances = _impl.bfs_distances
bfs_count = _impl.bfs_count
bfs_parents = _impl.bfs_parents
bfs_multi = _impl.bfs_multi
bfs_masked = _impl.bfs_masked
bfs_target_masked = _impl.bfs_target_masked
