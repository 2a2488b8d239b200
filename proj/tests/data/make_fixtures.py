#!/usr/bin/env python3
"""Writes the NIfTI-1 fixture files used by the tests.

Built with struct from the nifti1.h field layout, independently of the C++
writer, so the reader is checked against files it did not produce.
"""
import gzip
import struct
from pathlib import Path

HERE = Path(__file__).resolve().parent


def header(dims, datatype, bitpix, pixdim, *, endian="<", magic=b"n+1\0",
           vox_offset=352.0, slope=1.0, inter=0.0, qform=1, sform=1,
           origin=(0.0, 0.0, 0.0), sizeof_hdr=348):
    h = bytearray(348)
    struct.pack_into(endian + "i", h, 0, sizeof_hdr)
    dim = [3] + list(dims) + [1] * (7 - len(dims))
    struct.pack_into(endian + "8h", h, 40, *dim)
    struct.pack_into(endian + "h", h, 70, datatype)
    struct.pack_into(endian + "h", h, 72, bitpix)
    pd = [1.0] + list(pixdim) + [0.0] * (7 - len(pixdim))
    struct.pack_into(endian + "8f", h, 76, *pd)
    struct.pack_into(endian + "f", h, 108, vox_offset)
    struct.pack_into(endian + "f", h, 112, slope)
    struct.pack_into(endian + "f", h, 116, inter)
    h[123] = 10  # mm + sec
    h[148:148 + 8] = b"fixture\0"
    struct.pack_into(endian + "h", h, 252, qform)
    struct.pack_into(endian + "h", h, 254, sform)
    struct.pack_into(endian + "3f", h, 268, *origin)
    for r in range(3):
        row = [0.0, 0.0, 0.0, origin[r]]
        row[r] = pixdim[r]
        struct.pack_into(endian + "4f", h, 280 + 16 * r, *row)
    h[344:348] = magic
    return bytes(h) + b"\0\0\0\0"


def write(name, data):
    (HERE / name).write_bytes(data)


def main():
    # 4x3x2 uint8 label map, value at (x,y,z) chosen from {0,1,2,4}.
    labels = [[0, 1, 2, 4][(x + 2 * y + 3 * z) % 4] for z in range(2) for y in range(3) for x in range(4)]
    write("labels_4x3x2_u8.nii",
          header((4, 3, 2), 2, 8, (1.0, 1.0, 1.0)) + bytes(labels))

    # 5x4x3 int16 volume, anisotropic spacing, sform origin.
    vals = [x - 2 * y + 100 * z - 7 for z in range(3) for y in range(4) for x in range(5)]
    write("t1_5x4x3_i16.nii",
          header((5, 4, 3), 4, 16, (0.9375, 0.9375, 1.5), origin=(-120.0, -120.0, -60.0))
          + struct.pack("<%dh" % len(vals), *vals))

    # 3x3x3 float32 volume, qform-only origin, scl_slope 0 (means unscaled).
    fvals = [0.25 * i - 1.0 for i in range(27)]
    write("flair_3x3x3_f32.nii",
          header((3, 3, 3), 16, 32, (1.0, 2.0, 3.0), slope=0.0, sform=0, origin=(1.5, -2.5, 4.0))
          + struct.pack("<27f", *fvals))

    # 1x1x1 float32 with value 0.
    write("single_f32.nii", header((1, 1, 1), 16, 32, (1.0, 1.0, 1.0)) + struct.pack("<f", 0.0))

    # Error cases.
    write("bad_label_3.nii", header((2, 1, 1), 2, 8, (1.0, 1.0, 1.0)) + bytes([1, 3]))
    write("big_endian.nii",
          header((2, 1, 1), 2, 8, (1.0, 1.0, 1.0), endian=">") + bytes([0, 1]))
    write("two_file_magic.nii",
          header((2, 1, 1), 2, 8, (1.0, 1.0, 1.0), magic=b"ni1\0") + bytes([0, 1]))
    write("float64.nii", header((1, 1, 1), 64, 64, (1.0, 1.0, 1.0)) + struct.pack("<d", 1.0))
    write("truncated.nii", header((4, 4, 4), 2, 8, (1.0, 1.0, 1.0)) + bytes(10))
    write("gzipped.nii.gz",
          gzip.compress(header((1, 1, 1), 2, 8, (1.0, 1.0, 1.0)) + bytes([0]), mtime=0))


if __name__ == "__main__":
    main()
