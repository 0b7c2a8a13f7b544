"""Layout planning toolkit: layout DSL, corpora, metrics, and planners.

The compiled extension carries the implementation; this package just
re-exports it whether the module was installed as a wheel or built in-tree.
"""

try:
    from ._layoutkit import *  # noqa: F401,F403  (installed layout)
    from ._layoutkit import __version__  # noqa: F401
except ImportError:  # build-tree layout: extension directly on sys.path
    from _layoutkit import *  # noqa: F401,F403
    from _layoutkit import __version__  # noqa: F401
