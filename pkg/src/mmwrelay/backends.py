"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set MMWRELAY_BACKEND=pure or =compiled to force a choice (the latter raises
if the extension was not built).
"""

import os

_forced = os.environ.get("MMWRELAY_BACKEND", "").strip().lower()

if _forced == "pure":
    from mmwrelay import _mbpure as _impl

    BACKEND = "pure-python"
elif _forced == "compiled":
    from mmwrelay import _mbkernel as _impl  # raises if not built

    BACKEND = "compiled"
else:
    try:
        from mmwrelay import _mbkernel as _impl

        BACKEND = "compiled"
    except ImportError:
        from mmwrelay import _mbpure as _impl

        BACKEND = "pure-python"

clgamma = _impl.clgamma
mb_line_sum = _impl.mb_line_sum
