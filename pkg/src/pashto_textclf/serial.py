"""Exact, deterministic JSON encoding of numpy arrays."""

from __future__ import annotations

import base64
import hashlib
import json

import numpy as np

from .errors import FormatError

_DTYPES = {"f8": np.float64, "i8": np.int64}


def encode_array(a: np.ndarray) -> dict:
    a = np.asarray(a)
    if a.dtype.kind == "f":
        code, a = "f8", a.astype("<f8", copy=False)
    elif a.dtype.kind in "iub":
        code, a = "i8", a.astype("<i8", copy=False)
    else:
        raise FormatError(f"cannot encode dtype {a.dtype}")
    data = base64.b64encode(np.ascontiguousarray(a).tobytes()).decode("ascii")
    return {"dtype": code, "shape": list(a.shape), "data": data}


def decode_array(obj: dict) -> np.ndarray:
    try:
        dtype = np.dtype(_DTYPES[obj["dtype"]]).newbyteorder("<")
        raw = base64.b64decode(obj["data"])
        arr = np.frombuffer(raw, dtype=dtype).reshape(obj["shape"])
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"malformed array record: {exc}") from None
    return arr.astype(dtype.newbyteorder("="), copy=True)


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, no whitespace variance."""
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
