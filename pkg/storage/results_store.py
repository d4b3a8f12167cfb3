"""
Persistence of run outputs: JSON documents, plot-ready CSV, binary state
snapshots with JSON headers, and the run manifest.

Every run writes into its own output directory.
"""

import csv
import json
import logging
import os
import platform
from importlib import metadata
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from diagnostics.linear import LinearState
from models.state import PhaseState
from reformulation.system import ReformState
from spectral.fields import Field, VectorField
from spectral.grid import GridSpec
from utils.errors import LabError
from utils.file_utils import canonical_hash, ensure_directory, read_json_file

logger = logging.getLogger(__name__)

SNAPSHOT_DTYPE = "<f8"
STATE_TYPES = {cls.__name__: cls for cls in (PhaseState, ReformState, LinearState)}
VERSIONED_PACKAGES = ("numpy", "scipy", "pydantic", "fastapi", "python-dotenv")


class ResultsStoreError(LabError):
    """Raised when outputs cannot be written or a snapshot cannot be read."""
    code = "STORAGE_ERROR"


def _format(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def package_versions() -> Dict[str, str]:
    versions = {"python": platform.python_version()}
    for name in VERSIONED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


class ResultsStore:
    """Writer bound to one output directory; records every file it writes."""

    def __init__(self, output_dir: str):
        self.output_dir = ensure_directory(output_dir)
        self.outputs: List[str] = []

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def _record(self, name: str) -> str:
        if name not in self.outputs:
            self.outputs.append(name)
        return self.path(name)

    def write_json(self, name: str, document: Dict[str, Any]) -> str:
        """
        Write a JSON document with sorted keys.

        Args:
            name: File name inside the output directory
            document: JSON-serializable mapping

        Returns:
            Path of the written file

        Raises:
            ResultsStoreError: If the file cannot be written
        """
        target = self._record(name)
        try:
            with open(target, "w", encoding="utf-8") as handle:
                json.dump(document, handle, indent=2, sort_keys=True)
                handle.write("\n")
        except (OSError, TypeError, ValueError) as e:
            logger.error(f"Error writing {target}: {e}")
            raise ResultsStoreError(f"Failed to write '{target}': {e}")
        return target

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        """Write rows with full float precision; returns the file path."""
        target = self._record(name)
        try:
            with open(target, "w", encoding="utf-8", newline="") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([_format(value) for value in row])
        except OSError as e:
            logger.error(f"Error writing {target}: {e}")
            raise ResultsStoreError(f"Failed to write '{target}': {e}")
        return target

    def save_snapshot(self, name: str, state, time: float, params: Optional[Dict[str, Any]] = None) -> str:
        """
        Store a state as flat little-endian float64 plus a JSON header.

        Args:
            name: Base name; writes <name>.bin and <name>.json
            state: PhaseState, ReformState or LinearState
            time: Simulation time of the snapshot
            params: Parameters recorded in the header

        Returns:
            Path of the binary file
        """
        type_name = type(state).__name__
        if type_name not in STATE_TYPES:
            raise ResultsStoreError(f"Cannot snapshot a {type_name}")
        grid = state.grid
        data = np.stack([f.samples for f in state.fields()]).astype(SNAPSHOT_DTYPE)
        binary = self._record(f"{name}.bin")
        try:
            data.tofile(binary)
        except OSError as e:
            logger.error(f"Error writing {binary}: {e}")
            raise ResultsStoreError(f"Failed to write '{binary}': {e}")
        self.write_json(f"{name}.json", {
            "state_type": type_name,
            "grid": grid.model_dump(),
            "params": params or {},
            "time": time,
            "fields": list(type(state).field_names(grid.dim)),
            "dtype": SNAPSHOT_DTYPE,
            "shape": list(data.shape),
        })
        return binary

    def write_manifest(self, subcommand: str, config: Dict[str, Any], seeds: Sequence[int],
                       extra: Optional[Dict[str, Any]] = None) -> str:
        """Manifest with config hash, package versions, seeds and output list."""
        outputs = list(self.outputs)
        document = {
            "subcommand": subcommand,
            "config_hash": canonical_hash(config),
            "config": config,
            "versions": package_versions(),
            "seeds": list(seeds),
            "outputs": outputs,
        }
        if extra:
            document.update(extra)
        target = self.write_json("manifest.json", document)
        logger.info(f"Wrote manifest for '{subcommand}' with {len(outputs)} outputs to {self.output_dir}")
        return target


def load_snapshot(path: str) -> Tuple[Any, Dict[str, Any]]:
    """
    Restore a state written by ResultsStore.save_snapshot.

    Args:
        path: Path of the .bin file or of its .json header

    Returns:
        (state, header)

    Raises:
        ResultsStoreError: If the header or binary is missing or inconsistent
    """
    base, _ = os.path.splitext(path)
    try:
        header = read_json_file(f"{base}.json")
        data = np.fromfile(f"{base}.bin", dtype=header["dtype"])
        shape = tuple(header["shape"])
        data = data.reshape(shape)
        grid = GridSpec.model_validate(header["grid"])
        cls = STATE_TYPES[header["state_type"]]
    except (LabError, OSError, KeyError, ValueError) as e:
        logger.error(f"Error loading snapshot {base}: {e}")
        raise ResultsStoreError(f"Failed to load snapshot '{base}': {e}")

    fields = [Field(grid, np.array(values, dtype=np.float64)) for values in data]
    n_scalars = len(fields) - grid.dim
    state = cls(*fields[:n_scalars], VectorField(tuple(fields[n_scalars:])))
    return state, header
