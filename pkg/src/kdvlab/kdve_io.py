"""Binary persistence of weighted ensembles (the .kdve format).

Layout, little-endian throughout:

    magic   4 bytes  b"KDVE"
    version u32      1
    M       u32      modes per sample
    n       u64      sample count
    flags   u8       bit 0: ensemble was multinomially resampled
    then per sample: f64 weight, then M pairs (f64 re, f64 im) of u_hat(k),
    k = 1..M.

The byte layout is normative; writers must not insert padding.
"""

from __future__ import annotations

import struct

import numpy as np

from .measures import WeightedEnsemble

MAGIC = b"KDVE"
VERSION = 1
_HEADER = struct.Struct("<4sIIQB")

FLAG_RESAMPLED = 0x01


class KdveFormatError(RuntimeError):
    """File does not follow the ensemble binary layout."""


def write_ensemble(path, ens: WeightedEnsemble) -> None:
    flags = FLAG_RESAMPLED if ens.provenance.get("resampled") else 0
    record = np.empty((ens.n, 1 + 2 * ens.n_modes), dtype="<f8")
    record[:, 0] = ens.weights
    record[:, 1::2] = ens.coeffs.real
    record[:, 2::2] = ens.coeffs.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, ens.n_modes, ens.n, flags))
        fh.write(record.tobytes())


def read_ensemble(path, s: float = 0.25, p: float = 2.0) -> WeightedEnsemble:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise KdveFormatError("truncated header")
        magic, version, m, n, flags = _HEADER.unpack(head)
        if magic != MAGIC:
            raise KdveFormatError("bad magic; not an ensemble file")
        if version != VERSION:
            raise KdveFormatError(f"unsupported version {version}")
        body = fh.read()
    expected = n * (1 + 2 * m) * 8
    if len(body) != expected:
        raise KdveFormatError(
            f"body has {len(body)} bytes, expected {expected} for n={n}, M={m}"
        )
    record = np.frombuffer(body, dtype="<f8").reshape(n, 1 + 2 * m)
    weights = record[:, 0].copy()
    coeffs = record[:, 1::2] + 1j * record[:, 2::2]
    prov = {"kind": "file", "resampled": bool(flags & FLAG_RESAMPLED)}
    return WeightedEnsemble(coeffs, weights, s, p, prov)
