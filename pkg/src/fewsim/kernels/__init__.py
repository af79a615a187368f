"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

Backend selection: FEWSIM_NUMBA=0 forces the numpy path; anything else
uses numba when it is importable. ``BACKEND`` reports which one is live.
Both backends are exercised by the benchmark in benchmarks/bench_kernels.py.
"""

import os

from . import _numpy as _np_impl

_flag = os.environ.get("FEWSIM_NUMBA", "auto")

if _flag == "0":
    _impl = _np_impl
    BACKEND = "numpy"
else:
    try:
        from . import _numba as _impl  # noqa: F401
        BACKEND = "numba"
    except ImportError:
        _impl = _np_impl
        BACKEND = "numpy"

softmax_shares_batch = _impl.softmax_shares_batch
fmlm_loglik = _impl.fmlm_loglik
fmlm_loglik_grad = _impl.fmlm_loglik_grad


def get_backends():
    """All importable backends, for benchmarking."""
    out = {"numpy": _np_impl}
    try:
        from . import _numba
        out["numba"] = _numba
    except ImportError:
        pass
    return out
