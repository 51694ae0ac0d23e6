"""Binary snapshots with a self-describing header and checksummed payload.

Layout of a snapshot file::

    magic     8 bytes  b"EMWSNAP\\0"
    hlen      4 bytes  little-endian uint32, length of the header JSON
    header    hlen bytes of UTF-8 JSON
    payload   concatenated raw arrays, one per header["fields"] entry
    crc       4 bytes  little-endian uint32, CRC-32 of the payload

The header records the format version, the grid (half-width L, points
per axis n, ghost width), the time, the field list with shapes, the
dtype, and an endianness marker.  Every array is written as little-endian
64-bit floats with x varying fastest, so files are byte-identical across
platforms and round trips are bit exact.  Readers reject files whose
magic, version, length, or checksum does not match.
"""

import json
import struct
import zlib

import numpy as np

from .errors import SnapshotError
from .evolution import EvolutionState, Grid
from .initialdata import DataSet

MAGIC = b"EMWSNAP\0"
VERSION = 1

_STATE_FIELDS = ("u", "v")
_DATASET_FIELDS = ("gbar", "K", "Aspace", "A0", "E", "N")


def _to_bytes(arr):
    """Little-endian float64 bytes with the x axis varying fastest."""
    a = np.asarray(arr, dtype="<f8")
    # trailing axes are (x, y, z); reverse them so x is contiguous
    a = np.moveaxis(a, (-3, -2, -1), (-1, -2, -3))
    return np.ascontiguousarray(a).tobytes()


def _from_bytes(buf, shape):
    a = np.frombuffer(buf, dtype="<f8").copy()
    rev = shape[:-3] + (shape[-1], shape[-2], shape[-3])
    a = a.reshape(rev)
    return np.moveaxis(a, (-3, -2, -1), (-1, -2, -3)).copy()


def _write(path, kind, grid, t, arrays):
    fields = []
    payload = bytearray()
    for name, arr in arrays:
        fields.append({"name": name, "shape": list(np.shape(arr))})
        payload += _to_bytes(arr)
    header = {
        "version": VERSION,
        "kind": kind,
        "grid": grid.describe(),
        "t": float(t),
        "fields": fields,
        "dtype": "float64",
        "endian": "little",
        "layout": "x-fastest",
    }
    hjson = json.dumps(header, sort_keys=True).encode()
    crc = zlib.crc32(bytes(payload)) & 0xFFFFFFFF
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(hjson)))
        fh.write(hjson)
        fh.write(payload)
        fh.write(struct.pack("<I", crc))


def _read(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise SnapshotError(f"cannot read snapshot {path}: {exc}")
    if len(raw) < len(MAGIC) + 8 or raw[:len(MAGIC)] != MAGIC:
        raise SnapshotError(f"{path}: not a snapshot file")
    off = len(MAGIC)
    (hlen,) = struct.unpack_from("<I", raw, off)
    off += 4
    if off + hlen + 4 > len(raw):
        raise SnapshotError(f"{path}: truncated header")
    try:
        header = json.loads(raw[off:off + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SnapshotError(f"{path}: corrupt header: {exc}")
    off += hlen
    if header.get("version") != VERSION:
        raise SnapshotError(
            f"{path}: unsupported snapshot version {header.get('version')!r}"
            f" (this reader handles version {VERSION})")
    payload = raw[off:-4]
    (crc_stored,) = struct.unpack_from("<I", raw, len(raw) - 4)
    if zlib.crc32(payload) & 0xFFFFFFFF != crc_stored:
        raise SnapshotError(f"{path}: payload checksum mismatch")
    arrays = {}
    pos = 0
    for f in header["fields"]:
        shape = tuple(f["shape"])
        nbytes = 8 * int(np.prod(shape))
        if pos + nbytes > len(payload):
            raise SnapshotError(f"{path}: truncated payload at {f['name']!r}")
        arrays[f["name"]] = _from_bytes(payload[pos:pos + nbytes], shape)
        pos += nbytes
    if pos != len(payload):
        raise SnapshotError(f"{path}: trailing bytes in payload")
    return header, arrays


def save_state(path, state, grid):
    """Write an evolution state (both first-order fields) to disk."""
    _write(path, "state", grid, state.t,
           [("u", state.u), ("v", state.v)])


def load_state(path, grid=None):
    """Read an evolution state; returns (state, grid).

    When a grid is supplied it must match the stored geometry; otherwise
    the grid is reconstructed from the header.
    """
    header, arrays = _read(path)
    if header["kind"] != "state":
        raise SnapshotError(f"{path}: holds {header['kind']!r}, not a state")
    g = header["grid"]
    if grid is None:
        grid = Grid(g["L"], g["n"], g["ghost"])
    elif grid.describe() != g:
        raise SnapshotError(
            f"{path}: grid {g} does not match the requested "
            f"{grid.describe()}")
    missing = [n for n in _STATE_FIELDS if n not in arrays]
    if missing:
        raise SnapshotError(f"{path}: missing fields {missing}")
    return EvolutionState(arrays["u"], arrays["v"], header["t"]), grid


def save_dataset(path, data, grid):
    """Write a geometric initial-data set to disk."""
    _write(path, "dataset", grid, 0.0,
           [(name, getattr(data, name)) for name in _DATASET_FIELDS])


def load_dataset(path, grid=None):
    """Read an initial-data set; returns (data, grid)."""
    header, arrays = _read(path)
    if header["kind"] != "dataset":
        raise SnapshotError(f"{path}: holds {header['kind']!r}, not a dataset")
    g = header["grid"]
    if grid is None:
        grid = Grid(g["L"], g["n"], g["ghost"])
    elif grid.describe() != g:
        raise SnapshotError(
            f"{path}: grid {g} does not match the requested "
            f"{grid.describe()}")
    missing = [n for n in _DATASET_FIELDS if n not in arrays]
    if missing:
        raise SnapshotError(f"{path}: missing fields {missing}")
    return DataSet(**{n: arrays[n] for n in _DATASET_FIELDS}), grid
