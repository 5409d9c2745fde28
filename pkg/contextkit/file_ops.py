"""
File operations and input parsing helpers
"""

import csv
import hashlib
import io
import json
import os
import tempfile
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InputError

Number = Union[Fraction, float]

# Characteristic top-level keys for files without an explicit "kind"
_KIND_KEYS = (
    ("model", ("num_ontic_states",)),
    ("empirical", ("tables",)),
    ("graph", ("vertices", "hyperedges")),
    ("counterfactual", ("targets",)),
    ("marble", ("dimension",)),
    ("box", ("output",)),
    ("phenomenon", ("conditionals",)),
    ("scenario", ("measurements", "contexts")),
)


def read_file(path: str) -> bytes:
    """Read a file as bytes, mapping OS failures to input errors."""
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read file ({e.strerror})", source=path) from e


def load_json(path: str) -> Tuple[Dict[str, Any], str]:
    """
    Load a JSON object from disk.
    Returns (document, sha256 digest of the raw bytes).
    """
    raw = read_file(path)
    return parse_json(raw, source=path), content_digest(raw)


def parse_json(raw: Union[bytes, str], source: Optional[str] = None) -> Dict[str, Any]:
    try:
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    except UnicodeDecodeError as e:
        raise InputError(f"file is not valid UTF-8 (byte {e.start})", source=source) from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON: {e.msg}", source=source, line=e.lineno, column=e.colno) from e
    if not isinstance(doc, dict):
        raise InputError("top-level JSON value must be an object", source=source)
    return doc


def content_digest(raw: Union[bytes, str]) -> str:
    data = raw.encode("utf-8") if isinstance(raw, str) else raw
    return "sha256:" + hashlib.sha256(data).hexdigest()


def detect_kind(doc: Dict[str, Any]) -> str:
    """Explicit "kind" wins; otherwise infer from characteristic keys."""
    kind = doc.get("kind")
    if isinstance(kind, str):
        return kind
    for name, keys in _KIND_KEYS:
        if all(k in doc for k in keys):
            return name
    raise InputError("cannot determine file kind; add a \"kind\" field")


def join_path(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def require(doc: Dict[str, Any], key: str, path: str = "", kind: type = object) -> Any:
    """Fetch a required field, raising an input error naming the field path."""
    where = join_path(path, key)
    if not isinstance(doc, dict) or key not in doc:
        raise InputError("missing required field", field_path=where)
    value = doc[key]
    if kind is not object and not isinstance(value, kind):
        raise InputError(f"expected {kind.__name__}, got {type(value).__name__}", field_path=where)
    return value


def parse_number(value: Any, field_path: str = "") -> Number:
    """
    Parse a numeric literal.
    Integers and "p/q" strings become exact Fractions; floats stay floats.
    """
    if isinstance(value, bool):
        raise InputError("boolean is not a number", field_path=field_path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"bad number literal {value!r}", field_path=field_path) from e
    raise InputError(f"expected a number, got {type(value).__name__}", field_path=field_path)


def parse_int(value: Any, field_path: str = "", minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"expected an integer, got {type(value).__name__}", field_path=field_path)
    if minimum is not None and value < minimum:
        raise InputError(f"must be at least {minimum}, got {value}", field_path=field_path)
    return value


def parse_array(values: Any, field_path: str = "", ndim: Optional[int] = None) -> np.ndarray:
    """Nested lists of numbers as a float array; ragged or non-numeric input is an input error."""
    try:
        arr = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise InputError("expected a rectangular array of numbers", field_path=field_path) from e
    if ndim is not None and arr.ndim != ndim:
        raise InputError(f"expected {ndim} levels of nesting, got {arr.ndim}", field_path=field_path)
    return arr


def parse_vector(values: Any, field_path: str = "") -> List[Number]:
    if not isinstance(values, list):
        raise InputError("expected a list of numbers", field_path=field_path)
    return [parse_number(v, f"{field_path}[{i}]") for i, v in enumerate(values)]


def parse_complex(value: Any, field_path: str = "") -> complex:
    """Parse "re,im" strings, [re, im] pairs or plain reals."""
    try:
        if isinstance(value, str):
            parts = value.split(",")
            if len(parts) == 1:
                return complex(float(parts[0]), 0.0)
            re_part, im_part = parts
            return complex(float(re_part), float(im_part))
        if isinstance(value, list) and len(value) == 2:
            return complex(float(value[0]), float(value[1]))
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return complex(float(value), 0.0)
    except ValueError as e:
        raise InputError(f"bad complex literal {value!r}", field_path=field_path) from e
    raise InputError(f"bad complex literal {value!r}", field_path=field_path)


def number_to_json(x: Any) -> Any:
    """Exact values serialize as "p/q" strings (integers as ints)."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, complex):
        return f"{x.real!r},{x.imag!r}"
    if hasattr(x, "item"):
        return x.item()
    return x


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return to_jsonable(obj.tolist())
    return number_to_json(obj)


def dumps_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def csv_str(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([number_to_json(v) for v in row])
    return buf.getvalue()


def write_file_atomic(path: str, content: str):
    """Atomically write a local file through a temp file in the same directory."""
    dirn = os.path.dirname(os.path.abspath(path))
    os.makedirs(dirn, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".contextkit.", dir=dirn)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
