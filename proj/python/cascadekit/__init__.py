"""Cascade topology statistics, propagation simulation and corpus comparison."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, corpus_summary_json as _corpus_summary_json


def corpus_summary(corpus):
    """Counts and size/depth ranges per label, as a dict."""
    return _json.loads(_corpus_summary_json(corpus))
