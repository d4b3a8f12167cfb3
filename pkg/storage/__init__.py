"""
Storage package for the relaxation lab.

This package persists run outputs: JSON, CSV, binary snapshots and manifests.
"""

from storage.results_store import (
    ResultsStore,
    ResultsStoreError,
    load_snapshot,
    package_versions
)

__all__ = [
    'ResultsStore',
    'ResultsStoreError',
    'load_snapshot',
    'package_versions'
]
