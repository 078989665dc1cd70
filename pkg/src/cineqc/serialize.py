"""Canonical JSON: sorted keys, fixed float formatting, byte-reproducible output.

Reports and checkpoints are compared byte-for-byte across runs, so the stdlib
encoder (whose float repr varies with value) is replaced by a tiny serializer
that renders every float with 9 significant digits.
"""

import json

import numpy as np


def _render(obj):
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: kv[0])
        body = ",".join(f"{json.dumps(str(k))}:{_render(v)}" for k, v in items)
        return "{" + body + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_render(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            raise ValueError(f"non-finite float {obj} not representable in canonical JSON")
        return format(float(obj), ".9g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    raise TypeError(f"cannot canonicalize {type(obj)}")


def canonical_json(obj) -> str:
    return _render(obj)


def canonical_json_bytes(obj) -> bytes:
    return _render(obj).encode("utf-8")
