"""Python bindings for the qwalk quantum-walk engine."""

try:
    from ._qwalk import *  # noqa: F401,F403
except ImportError:  # pragma: no cover - build-tree layout without a package dir
    from _qwalk import *  # noqa: F401,F403
