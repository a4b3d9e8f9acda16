"""Seeding.

Every random draw in the package goes through ``numpy.random.Generator``
backed by the PCG64 bit generator, which produces the same stream on every
platform for a given seed.  Components never share a generator; each derives
its own seed from the master seed with :func:`derive_seed`, so running stages
concurrently or in a different order leaves every result unchanged.
"""
import hashlib

import numpy as np


def derive_seed(master, label, index=0):
    """Sub-seed for ``(master, label, index)``.

    The first 8 bytes (big endian) of ``sha256(f"{master}:{label}:{index}")``.
    """
    digest = hashlib.sha256(f"{int(master)}:{label}:{int(index)}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))
