"""Run manifests, delimited output and figure files.

Every CSV written by the command-line layer starts with a block of
``#``-prefixed header lines.  One of them carries the full invocation as
a single JSON object (command, parameters, grid, seed, tool version), so
a file can always be traced back to, and regenerated from, the run that
produced it.  The creation timestamp lives on its own header line and is
deliberately kept out of that JSON: re-running the same invocation must
reproduce the manifest line and the body byte for byte.

Floats are serialized with 17 significant digits, which round-trips
64-bit values exactly.  Files are written to a temporary sibling and
renamed into place, so readers never observe a half-written file.
"""

from __future__ import annotations

import datetime
import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .errors import DomainError

_FLOAT_FMT = "%.17g"


def format_number(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return _FLOAT_FMT % float(value)


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc) \
        .strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class RunManifest:
    """Reproducible description of one CLI invocation."""

    command: str
    params: Dict[str, object]
    grid: Optional[Dict[str, object]] = None
    seed: Optional[int] = None
    version: str = __version__
    created: str = field(default_factory=_utc_now)

    def payload(self) -> Dict[str, object]:
        return {
            "command": self.command,
            "params": self.params,
            "grid": self.grid,
            "seed": self.seed,
            "version": self.version,
        }

    def header_lines(self) -> List[str]:
        return [
            f"# susyfp {self.command}",
            f"# version: {self.version}",
            f"# created: {self.created}",
            "# manifest: " + json.dumps(self.payload(), sort_keys=True,
                                        separators=(",", ":")),
        ]


def render_csv(manifest: RunManifest, columns: Sequence[str],
               rows: Sequence[Sequence[object]]) -> str:
    lines = manifest.header_lines()
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise DomainError(
                f"row width {len(row)} does not match {len(columns)} columns")
        lines.append(",".join(format_number(v) if not isinstance(v, str)
                              else v for v in row))
    return "\n".join(lines) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(text.encode("utf-8"))
        os.chmod(tmp_path, 0o644)  # mkstemp defaults to 0600
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def split_header(text: str) -> Tuple[List[str], str]:
    """Separate leading '#' header lines from the CSV body."""
    lines = text.split("\n")
    header = []
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            return header, "\n".join(lines[i:])
        header.append(line)
    return header, ""


def read_manifest(path: str) -> Dict[str, object]:
    """Recover the manifest JSON embedded in a written file."""
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if line.startswith("# manifest: "):
                return json.loads(line[len("# manifest: "):])
            if not line.startswith("#"):
                break
    raise DomainError(f"no manifest header found in {path!r}")


def manifest_argv(manifest: Dict[str, object]) -> List[str]:
    """Rebuild the command-line invocation recorded in a manifest.

    The output path is not part of the manifest; append your own
    ``--out`` before replaying.
    """
    argv: List[str] = [str(manifest["command"])]
    params = manifest.get("params") or {}
    for key in sorted(params):
        value = params[key]
        flag = "--" + str(key)
        if value is None:
            continue
        if isinstance(value, bool):
            argv.append(flag if value else "--no-" + str(key))
        elif isinstance(value, (list, tuple)):
            for item in value:
                argv.extend([flag, format_number(item)])
        elif isinstance(value, str):
            argv.extend([flag, value])
        else:
            argv.extend([flag, format_number(value)])
    grid = manifest.get("grid")
    if grid:
        argv.extend(["--xmin", format_number(grid["xmin"]),
                     "--xmax", format_number(grid["xmax"]),
                     "--points", format_number(grid["points"])])
    if manifest.get("seed") is not None:
        argv.extend(["--seed", format_number(manifest["seed"])])
    return argv


def render_figure(path: str,
                  series: Sequence[Tuple[np.ndarray, np.ndarray, str]],
                  xlabel: str, ylabel: str,
                  marks: Sequence[Tuple[float, float]] = (),
                  title: Optional[str] = None) -> None:
    """Write a PNG with one line per series and optional point marks."""
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for x, y, label in series:
        ax.plot(x, y, label=label, linewidth=1.2)
    if marks:
        mx, my = zip(*marks)
        ax.plot(mx, my, "ko", markersize=4, zorder=5)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if series and any(label for _, _, label in series):
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
