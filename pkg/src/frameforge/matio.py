"""Matrix and system file formats shared across the project.

Two interchangeable matrix encodings:

* CSV: N rows by N columns, complex entries written as ``re+imj`` (real
  matrices write plain floats).  Entries round-trip exactly through the
  shortest-repr float format.
* Binary: 16-byte header (magic ``FFMX``, little-endian u32 N, u32 flags,
  4 reserved bytes) followed by row-major little-endian float64 data;
  flag bit 0 marks complex data stored as interleaved (re, im) pairs.

Either file may carry a JSON sidecar at ``<file>.json`` holding
``{"n", "margin", "dtype"}`` plus, for frame systems, ``{"label",
"reference"}``.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .envelopes import TruncatedMatrix
from .frames import FrameSystem, PerturbationSpec

__all__ = [
    "load_frame_system",
    "load_matrix",
    "parse_perturbation_spec",
    "save_frame_system",
    "save_matrix",
    "sidecar_path",
]

MAGIC = b"FFMX"
_FLAG_COMPLEX = 1


def sidecar_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".json")


def _format_entry(z, complex_entries: bool) -> str:
    if complex_entries:
        z = complex(z)
        sign = "+" if z.imag >= 0 else "-"
        return f"{z.real!r}{sign}{abs(z.imag)!r}j"
    return repr(float(z))


def _write_sidecar(path, n: int, margin: int, complex_entries: bool, extra=None):
    meta = {"n": n, "margin": margin, "dtype": "c128" if complex_entries else "f64"}
    if extra:
        meta.update(extra)
    sidecar_path(path).write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def save_matrix(path, a: TruncatedMatrix, binary: bool = False, extra_meta=None):
    """Write a matrix in the project format, with its JSON sidecar."""
    path = Path(path)
    complex_entries = bool(np.iscomplexobj(a.entries))
    if binary:
        flags = _FLAG_COMPLEX if complex_entries else 0
        header = struct.pack("<4sII4x", MAGIC, a.n, flags)
        if complex_entries:
            data = np.empty((a.n, a.n, 2))
            data[..., 0] = a.entries.real
            data[..., 1] = a.entries.imag
        else:
            data = np.asarray(a.entries, dtype=float)
        path.write_bytes(header + data.astype("<f8").tobytes())
    else:
        rows = []
        for row in a.entries:
            rows.append(",".join(_format_entry(z, complex_entries) for z in row))
        path.write_text("\n".join(rows) + "\n")
    _write_sidecar(path, a.n, a.margin, complex_entries, extra_meta)


def _load_sidecar(path) -> dict:
    sp = sidecar_path(path)
    if sp.exists():
        return json.loads(sp.read_text())
    return {}


def _parse_csv(text: str):
    rows = []
    complex_seen = False
    for line in text.strip().splitlines():
        cells = []
        for cell in line.split(","):
            cell = cell.strip()
            if "j" in cell:
                complex_seen = True
            cells.append(complex(cell))
        rows.append(cells)
    arr = np.asarray(rows, dtype=complex)
    return arr if complex_seen else arr.real.copy()


def _parse_binary(blob: bytes):
    if len(blob) < 16 or blob[:4] != MAGIC:
        raise ValueError("not a FFMX binary matrix file")
    _, n, flags = struct.unpack("<4sII", blob[:12])
    complex_entries = bool(flags & _FLAG_COMPLEX)
    count = n * n * (2 if complex_entries else 1)
    data = np.frombuffer(blob, dtype="<f8", offset=16, count=count)
    if complex_entries:
        data = data.reshape(n, n, 2)
        return data[..., 0] + 1j * data[..., 1]
    return data.reshape(n, n).copy()


def load_matrix(path) -> TruncatedMatrix:
    """Read a matrix written by :func:`save_matrix` (either encoding)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    blob = path.read_bytes()
    if blob[:4] == MAGIC:
        arr = _parse_binary(blob)
    else:
        try:
            arr = _parse_csv(blob.decode("utf-8"))
        except (UnicodeDecodeError, ValueError) as err:
            raise ValueError(f"cannot parse matrix file {path}: {err}") from err
    meta = _load_sidecar(path)
    if "n" in meta and meta["n"] != arr.shape[0]:
        raise ValueError("sidecar size disagrees with the matrix file")
    if meta.get("dtype") == "f64" and np.iscomplexobj(arr):
        arr = arr.real.copy()
    margin = int(meta.get("margin", -1))
    return TruncatedMatrix(arr, margin=margin)


def save_frame_system(path, system: FrameSystem, binary: bool = False):
    save_matrix(
        path,
        system.coeffs,
        binary=binary,
        extra_meta={"label": system.label, "reference": "hermite"},
    )


def load_frame_system(path) -> FrameSystem:
    mat = load_matrix(path)
    meta = _load_sidecar(path)
    return FrameSystem(mat, label=meta.get("label", ""))


def parse_perturbation_spec(d: dict, n: int) -> PerturbationSpec:
    """Build a PerturbationSpec from its JSON form.

    ``a`` may be explicit rows (lists of reals or [re, im] pairs) or
    ``{"constant": v}`` / ``{"constant": [v1, .., vr]}``, expanded to
    length-n constant sequences.
    """
    if "r" not in d or "eps" not in d or "a" not in d:
        raise ValueError("perturbation spec needs fields r, eps, a")
    r = int(d["r"])
    eps = tuple(float(x) for x in d["eps"])
    a_field = d["a"]
    if isinstance(a_field, dict):
        vals = np.atleast_1d(np.asarray(a_field["constant"], dtype=float))
        if vals.size == 1:
            vals = np.repeat(vals, r)
        if vals.size != r:
            raise ValueError("constant list length must equal r")
        a = np.repeat(vals[:, None], n, axis=1)
    else:
        rows = []
        for row in a_field:
            arr = np.asarray(row)
            if arr.ndim == 2 and arr.shape[1] == 2:
                arr = arr[:, 0] + 1j * arr[:, 1]
            rows.append(arr)
        width = max(len(row) for row in rows)
        a = np.zeros((r, width), dtype=complex if any(np.iscomplexobj(x) for x in rows) else float)
        for i, row in enumerate(rows):
            a[i, : len(row)] = row
    return PerturbationSpec(r=r, a=a, eps=eps)
