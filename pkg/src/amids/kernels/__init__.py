"""Hot loops of the learners and of batch-independent inference.

Each kernel has a numba and a numpy implementation with the same contract;
``amids._accel`` picks one at import time.
"""
from .. import _accel
from . import _numpy

if _accel.USE_NUMBA:
    from . import _numba as _impl
else:
    _impl = _numpy

BACKEND = _accel.BACKEND

best_split = _impl.best_split
tree_apply = _impl.tree_apply
dense_affine = _impl.dense_affine
smo_solve = _impl.smo_solve
adam_update = _impl.adam_update


def implementations():
    """Mapping backend name -> kernel module, for cross-checks and benchmarks."""
    impls = {"numpy": _numpy}
    if _accel.HAVE_NUMBA:
        from . import _numba
        impls["numba"] = _numba
    return impls
