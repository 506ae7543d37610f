# utils/digest.py
import hashlib
import hmac
from typing import Any

import orjson


def canonical_bytes(obj: Any) -> bytes:
    """Sorted-key orjson dump; numpy arrays and pydantic dumps are accepted."""
    return orjson.dumps(obj, option=orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY)


def config_digest(obj: Any) -> str:
    return hashlib.sha256(canonical_bytes(obj)).hexdigest()


def verify_digest(obj: Any, digest: str) -> bool:
    if not isinstance(digest, str):
        return False
    return hmac.compare_digest(config_digest(obj), digest)
