"""Hot loops for BPE merging and byte n-gram scoring.

The compiled extension is used when it is importable; otherwise the
pure-Python versions are used. Set ``TOKFAIR_PURE_PYTHON=1`` to force the
fallback.
"""

import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("TOKFAIR_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

merge_ids = _impl.merge_ids
BPETable = _impl.BPETable
ngram_count = _impl.ngram_count
ngram_nll = _impl.ngram_nll
ctx_key = _impl.ctx_key
CTX_ORDER_MAX = _pykernels.CTX_ORDER_MAX

__all__ = ["BACKEND", "BPETable", "CTX_ORDER_MAX", "ctx_key", "merge_ids", "ngram_count", "ngram_nll"]
