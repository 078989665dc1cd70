"""Dataset container and image export.

Dataset file layout (all integers little-endian):

    magic   4 bytes  "CINE"
    version u16      currently 1
    count   u32      number of sequences
    per sequence:
        T, H, W     u32 each
        label       u8   (0 good, 1 artefact)
        origin      u8   (0 real, 1 synthetic_corruption, 2 translated)
        payload     T*H*W float32
    checksum u32     CRC32 of everything between the header and the checksum

Intensities are stored as float32 in [0, 1]; reading returns float64 arrays
whose values are exactly the stored float32s, so write -> read -> write is
byte-identical.
"""

import struct
import zlib

import numpy as np

from .augment import LabeledSample
from .errors import DatasetFormatError

DATASET_MAGIC = b"CINE"
DATASET_VERSION = 1


def write_dataset(path, samples):
    records = bytearray()
    for s in samples:
        seq = np.asarray(s.seq, dtype=np.float64)
        if seq.ndim != 3:
            raise DatasetFormatError(f"sample must be (T, H, W), got shape {seq.shape}")
        if seq.min() < 0.0 or seq.max() > 1.0:
            raise DatasetFormatError("sample intensities must lie in [0, 1]")
        T, H, W = seq.shape
        records += struct.pack("<IIIBB", T, H, W, int(s.label), int(s.origin))
        records += np.ascontiguousarray(seq, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(DATASET_MAGIC)
        fh.write(struct.pack("<H", DATASET_VERSION))
        fh.write(struct.pack("<I", len(samples)))
        fh.write(records)
        fh.write(struct.pack("<I", zlib.crc32(bytes(records))))


def read_dataset(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 14 or blob[:4] != DATASET_MAGIC:
        raise DatasetFormatError(f"{path}: not a CINE dataset file")
    (version,) = struct.unpack_from("<H", blob, 4)
    if version != DATASET_VERSION:
        raise DatasetFormatError(f"{path}: unsupported version {version}")
    (count,) = struct.unpack_from("<I", blob, 6)
    records = blob[10:-4]
    (stored_crc,) = struct.unpack_from("<I", blob, len(blob) - 4)
    if zlib.crc32(records) != stored_crc:
        raise DatasetFormatError(f"{path}: payload checksum mismatch")

    samples = []
    offset = 0
    for _ in range(count):
        if offset + 14 > len(records):
            raise DatasetFormatError(f"{path}: truncated record header")
        T, H, W, label, origin = struct.unpack_from("<IIIBB", records, offset)
        offset += 14
        n = T * H * W
        if offset + 4 * n > len(records):
            raise DatasetFormatError(f"{path}: truncated payload")
        seq = np.frombuffer(records, dtype="<f4", count=n, offset=offset).astype(np.float64)
        offset += 4 * n
        seq = seq.reshape(T, H, W)
        if seq.min() < 0.0 or seq.max() > 1.0:
            raise DatasetFormatError(f"{path}: intensities outside [0, 1]")
        samples.append(LabeledSample(seq=seq, label=int(label), origin=int(origin)))
    if offset != len(records):
        raise DatasetFormatError(f"{path}: {len(records) - offset} trailing record bytes")
    return samples


def write_pgm(path, image):
    """Binary P5 PGM, [0, 1] mapped linearly to [0, 255]."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise DatasetFormatError(f"PGM export needs a 2D image, got shape {img.shape}")
    lo, hi = img.min(), img.max()
    scaled = (img - lo) / (hi - lo) if hi > lo else np.zeros_like(img)
    data = np.rint(scaled * 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(data.tobytes())
