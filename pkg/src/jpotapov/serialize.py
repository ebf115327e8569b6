"""JSON encoding of complex matrices.

Complex numbers are two-element lists ``[re, im]`` and matrices are row-major
nested lists. Python's float repr is the shortest string that round-trips, so
emitting and re-parsing reproduces every matrix bitwise.
"""

import json

import numpy as np

from .matkernel import SignatureMatrix

__all__ = [
    "complex_to_json",
    "complex_from_json",
    "matrix_to_json",
    "matrix_from_json",
    "signature_to_json",
    "signature_from_json",
    "dumps",
]


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise ValueError(f"cannot parse complex number from {v!r}")


def matrix_to_json(M):
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return [[complex_to_json(z) for z in row] for row in M]


def matrix_from_json(v):
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise ValueError("matrix must be a nonempty list of rows")
    rows = [[complex_from_json(z) for z in row] for row in v]
    if len({len(r) for r in rows}) != 1 or not rows[0]:
        raise ValueError("matrix rows must have equal nonzero length")
    return np.array(rows, dtype=complex)


def signature_to_json(J):
    Jm = np.asarray(J)
    d = np.diag(Jm)
    if np.array_equal(np.diag(d), Jm) and np.all(d.imag == 0):
        return {"diag": [int(x) if x in (1.0, -1.0) else float(x) for x in d.real]}
    return {"matrix": matrix_to_json(Jm)}


def signature_from_json(v):
    if not isinstance(v, dict):
        raise ValueError("J must be an object with key 'diag' or 'matrix'")
    if "diag" in v:
        d = v["diag"]
        if not isinstance(d, list) or not d:
            raise ValueError("J.diag must be a nonempty list")
        return SignatureMatrix(np.diag([float(x) for x in d]))
    if "matrix" in v:
        return SignatureMatrix(matrix_from_json(v["matrix"]))
    raise ValueError("J must have key 'diag' or 'matrix'")


def dumps(obj, **kw):
    """JSON text with non-finite floats rejected."""
    return json.dumps(obj, allow_nan=False, **kw)
