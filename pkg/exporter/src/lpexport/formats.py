"""Writers for the LPWT / LPFM interchange formats.

Implemented from the format definition (not shared with the consuming
engine): little-endian throughout, zlib CRC32 of everything between the
4-byte magic and the trailing checksum.

LPWT: magic ``LPWT``, version u32, entry count u32; per entry name length
u16 + UTF-8 name, rank u8, dims u32 each, raw f32 values.

LPFM: magic ``LPFM``, version u32, n u32, d u32, tap u16, layer-name length
u16 + UTF-8 name, labels u32 x n, data f32 x n*d.
"""

import struct
import zlib

import numpy as np

LPWT_MAGIC = b"LPWT"
LPFM_MAGIC = b"LPFM"
FORMAT_VERSION = 1


def _finish(path, magic, payload):
    with open(path, "wb") as f:
        f.write(magic)
        f.write(payload)
        f.write(struct.pack("<I", zlib.crc32(bytes(payload))))


def write_lpwt(path, entries):
    """Write an ordered dict of name -> array as an LPWT tensor container."""
    payload = bytearray()
    payload += struct.pack("<II", FORMAT_VERSION, len(entries))
    for name, arr in entries.items():
        arr = np.ascontiguousarray(arr, dtype="<f4")
        name_b = name.encode("utf-8")
        payload += struct.pack("<H", len(name_b))
        payload += name_b
        payload += struct.pack("<B", arr.ndim)
        for dim in arr.shape:
            payload += struct.pack("<I", dim)
        payload += arr.tobytes()
    _finish(path, LPWT_MAGIC, payload)


def write_lpfm(path, data, labels, tap, layer_name):
    """Write an n x d float32 matrix with labels as an LPFM file."""
    data = np.ascontiguousarray(data, dtype="<f4")
    labels = np.ascontiguousarray(labels, dtype="<u4")
    n, d = data.shape
    name_b = layer_name.encode("utf-8")
    payload = bytearray()
    payload += struct.pack("<IIIH", FORMAT_VERSION, n, d, tap)
    payload += struct.pack("<H", len(name_b))
    payload += name_b
    payload += labels.tobytes()
    payload += data.tobytes()
    _finish(path, LPFM_MAGIC, payload)
