"""Binary container formats for tensors and feature matrices.

Two little-endian formats share the same checksum convention (zlib CRC32 of
everything between the 4-byte magic and the trailing CRC):

``LPWT`` tensor container
    magic ``LPWT``, version u32, entry count u32; per entry: name length u16,
    UTF-8 name, rank u8, dims u32 each, raw IEEE-754 f32 values.

``LPFM`` feature matrix
    magic ``LPFM``, version u32, n u32, d u32, tap index u16, layer-name
    length u16 + UTF-8 name, labels u32 x n, data f32 x n*d.
"""

import struct
import zlib

import numpy as np

LPWT_MAGIC = b"LPWT"
LPFM_MAGIC = b"LPFM"
FORMAT_VERSION = 1


class FormatError(ValueError):
    """Bad magic, version, or corrupted payload."""


def save_tensors(path, entries):
    """Write an ordered dict of name -> ndarray as an LPWT file."""
    payload = bytearray()
    payload += struct.pack("<I", FORMAT_VERSION)
    payload += struct.pack("<I", len(entries))
    for name, arr in entries.items():
        arr = np.ascontiguousarray(arr, dtype=np.float32)
        name_b = name.encode("utf-8")
        payload += struct.pack("<H", len(name_b))
        payload += name_b
        payload += struct.pack("<B", arr.ndim)
        for dim in arr.shape:
            payload += struct.pack("<I", dim)
        payload += arr.tobytes()
    crc = zlib.crc32(bytes(payload))
    with open(path, "wb") as f:
        f.write(LPWT_MAGIC)
        f.write(payload)
        f.write(struct.pack("<I", crc))


def load_tensors(path):
    """Read an LPWT file back into an ordered dict of name -> float32 ndarray."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 12 or blob[:4] != LPWT_MAGIC:
        raise FormatError(f"{path}: not an LPWT file")
    payload, crc_stored = blob[4:-4], struct.unpack("<I", blob[-4:])[0]
    if zlib.crc32(payload) != crc_stored:
        raise FormatError(f"{path}: CRC mismatch")
    off = 0

    def take(fmt):
        nonlocal off
        size = struct.calcsize(fmt)
        if off + size > len(payload):
            raise FormatError(f"{path}: truncated payload")
        vals = struct.unpack_from(fmt, payload, off)
        off += size
        return vals if len(vals) > 1 else vals[0]

    version = take("<I")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    count = take("<I")
    entries = {}
    for _ in range(count):
        name_len = take("<H")
        if off + name_len > len(payload):
            raise FormatError(f"{path}: truncated entry name")
        name = payload[off:off + name_len].decode("utf-8")
        off += name_len
        rank = take("<B")
        dims = tuple(take("<I") for _ in range(rank))
        n_vals = int(np.prod(dims)) if dims else 1
        nbytes = 4 * n_vals
        if off + nbytes > len(payload):
            raise FormatError(f"{path}: truncated data for entry '{name}'")
        arr = np.frombuffer(payload, dtype="<f4", count=n_vals, offset=off)
        off += nbytes
        entries[name] = arr.reshape(dims).astype(np.float32)
    if off != len(payload):
        raise FormatError(f"{path}: {len(payload) - off} trailing bytes")
    return entries


def save_feature_matrix(path, fm):
    """Write a FeatureMatrix (duck-typed: data, labels, tap, layer_name)."""
    data = np.ascontiguousarray(fm.data, dtype=np.float32)
    labels = np.ascontiguousarray(fm.labels, dtype=np.uint32)
    n, d = data.shape
    name_b = fm.layer_name.encode("utf-8")
    payload = bytearray()
    payload += struct.pack("<IIIH", FORMAT_VERSION, n, d, fm.tap)
    payload += struct.pack("<H", len(name_b))
    payload += name_b
    payload += labels.astype("<u4").tobytes()
    payload += data.astype("<f4").tobytes()
    crc = zlib.crc32(bytes(payload))
    with open(path, "wb") as f:
        f.write(LPFM_MAGIC)
        f.write(payload)
        f.write(struct.pack("<I", crc))


def load_feature_matrix(path):
    """Read an LPFM file; returns (data, labels, tap, layer_name)."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 12 or blob[:4] != LPFM_MAGIC:
        raise FormatError(f"{path}: not an LPFM file")
    payload, crc_stored = blob[4:-4], struct.unpack("<I", blob[-4:])[0]
    if zlib.crc32(payload) != crc_stored:
        raise FormatError(f"{path}: CRC mismatch")
    version, n, d, tap = struct.unpack_from("<IIIH", payload, 0)
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    off = struct.calcsize("<IIIH")
    (name_len,) = struct.unpack_from("<H", payload, off)
    off += 2
    layer_name = payload[off:off + name_len].decode("utf-8")
    off += name_len
    expected = off + 4 * n + 4 * n * d
    if len(payload) != expected:
        raise FormatError(f"{path}: payload size mismatch")
    labels = np.frombuffer(payload, dtype="<u4", count=n, offset=off).astype(np.int64)
    off += 4 * n
    data = np.frombuffer(payload, dtype="<f4", count=n * d, offset=off)
    return data.reshape(n, d).astype(np.float32), labels, tap, layer_name
