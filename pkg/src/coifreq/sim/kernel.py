"""Integration-kernel backend selection.

Prefers the compiled extension; falls back to the pure-numpy kernel when the
extension is unavailable. Set COIFREQ_FORCE_PY=1 to force the fallback
(used by the benchmark and the backend-agreement tests).
"""

import os

if os.environ.get("COIFREQ_FORCE_PY"):
    from ._swing_py import BACKEND_NAME, INSTABILITY_HZ, integrate_swing
else:
    try:
        from ._swing_cy import BACKEND_NAME, INSTABILITY_HZ, integrate_swing
    except ImportError:
        from ._swing_py import BACKEND_NAME, INSTABILITY_HZ, integrate_swing

__all__ = ["BACKEND_NAME", "INSTABILITY_HZ", "integrate_swing"]
