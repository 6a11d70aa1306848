"""On-disk container: a JSON header next to one raw little-endian binary blob.

Layout: <path>.json holds metadata plus, per array, its name, shape, dtype,
and byte offset/length into <path>.bin; arrays are stored C-contiguous in
little-endian byte order, concatenated in header order.
"""

import json
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


def _le(dtype):
    dt = np.dtype(dtype)
    return dt.newbyteorder("<") if dt.byteorder == ">" else dt


def save_container(path, arrays, meta=None):
    """Write named arrays + metadata; returns the JSON header path."""
    path = Path(path)
    header = {
        "format_version": FORMAT_VERSION,
        "endianness": "little",
        "meta": meta or {},
        "arrays": [],
    }
    offset = 0
    blobs = []
    for name, arr in arrays.items():
        arr = np.ascontiguousarray(arr)
        arr = arr.astype(_le(arr.dtype), copy=False)
        raw = arr.tobytes()
        header["arrays"].append({
            "name": name,
            "shape": list(arr.shape),
            "dtype": arr.dtype.name,
            "offset": offset,
            "nbytes": len(raw),
        })
        blobs.append(raw)
        offset += len(raw)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path.with_suffix(".bin"), "wb") as fh:
        for raw in blobs:
            fh.write(raw)
    with open(path.with_suffix(".json"), "w") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path.with_suffix(".json")


def load_container(path):
    """Read back (arrays, meta) written by save_container."""
    path = Path(path)
    with open(path.with_suffix(".json")) as fh:
        header = json.load(fh)
    if header.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported container version in {path}")
    blob = path.with_suffix(".bin").read_bytes()
    arrays = {}
    for spec in header["arrays"]:
        raw = blob[spec["offset"]:spec["offset"] + spec["nbytes"]]
        arr = np.frombuffer(raw, dtype=np.dtype(spec["dtype"]).newbyteorder("<"))
        arrays[spec["name"]] = arr.reshape(spec["shape"]).copy()
    return arrays, header["meta"]
