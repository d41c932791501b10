"""Deterministic file emitters: CSV series/matrices, PGM heatmaps, manifests.

Numbers are serialised with 17 significant digits so that re-reading loses
nothing and identical runs produce byte-identical files.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_series_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> Path:
    """Column-oriented CSV with a header row."""
    lengths = {len(c) for c in columns}
    if len(lengths) != 1:
        raise ValueError(f"columns must share a length, got {sorted(lengths)}")
    if len(header) != len(columns):
        raise ValueError("one header entry per column required")
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_matrix_csv(
    path: Path, thetas: np.ndarray, phis: np.ndarray, matrix: np.ndarray
) -> Path:
    """Grid CSV: rows are theta values, columns phi values."""
    if matrix.shape != (len(thetas), len(phis)):
        raise ValueError(f"matrix shape {matrix.shape} does not match the grid")
    header = ["theta"] + [f"phi={fmt(p)}" for p in phis]
    lines = [",".join(header)]
    for i, th in enumerate(thetas):
        lines.append(",".join([fmt(th)] + [fmt(v) for v in matrix[i]]))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_pgm(path: Path, matrix: np.ndarray) -> tuple[Path, Path]:
    """8-bit binary PGM (row = theta, column = phi) plus a scale sidecar.

    Grey levels map linearly onto [min, max] of the emitted matrix; the
    sidecar records that range so the image remains quantitative.
    """
    lo = float(matrix.min())
    hi = float(matrix.max())
    span = hi - lo
    if span > 0:
        levels = np.round(255.0 * (matrix - lo) / span).astype(np.uint8)
    else:
        levels = np.zeros(matrix.shape, dtype=np.uint8)
    rows, cols = matrix.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(levels.tobytes())
    sidecar = path.with_suffix(path.suffix + ".scale.txt")
    sidecar.write_text(
        f"min = {fmt(lo)}\nmax = {fmt(hi)}\nrows_theta = {rows}\ncols_phi = {cols}\n"
    )
    return path, sidecar


def sha256_of(path: Path) -> tuple[str, int]:
    digest = hashlib.sha256()
    data = path.read_bytes()
    digest.update(data)
    return digest.hexdigest(), len(data)


def write_manifest(
    path: Path,
    files: list[Path],
    base: Path,
    config_lines: list[str],
    version: str,
    wall_clock: float,
) -> Path:
    """Plain-text manifest: commented metadata, then ``path sha256 bytes`` lines."""
    lines = [
        "# scrambletop run manifest",
        f"# version: {version}",
        f"# wall_clock_seconds: {wall_clock:.3f}",
        "# config:",
    ]
    lines += [f"#   {line}" for line in config_lines]
    for f in sorted(files):
        digest, size = sha256_of(f)
        lines.append(f"{f.relative_to(base).as_posix()} {digest} {size}")
    path.write_text("\n".join(lines) + "\n")
    return path


def verify_manifest(path: Path) -> list[str]:
    """Re-hash every file listed in a manifest; returns mismatch descriptions."""
    base = path.parent
    problems = []
    for raw in path.read_text().splitlines():
        if not raw or raw.startswith("#"):
            continue
        name, digest, size = raw.rsplit(" ", 2)
        target = base / name
        if not target.exists():
            problems.append(f"missing file {name}")
            continue
        actual, actual_size = sha256_of(target)
        if actual != digest or str(actual_size) != size:
            problems.append(f"checksum mismatch for {name}")
    return problems
