"""Polynomial JSON files and the on-disk polynomial cache.

Schema: {"vars": [...], "terms": [{"e": [i, j], "c": "<decimal>"}, ...],
"meta": {"kind", "n", "c_n"?, "fit_order", "checksum"}}. Terms are kept in
canonical order (exponent vectors lexicographic) and the checksum is the
sha256 of the canonical vars+terms serialization, so round-trips are
bit-exact and any corruption is detected on load.
"""

import hashlib
import json
import os
import tempfile

from gmpy2 import mpq

POLY_VARS = ["X", "Y"]
CACHE_ENV = "THETA_CACHE_DIR"
CACHE_DEFAULT = ".theta-cache"


class PolyFileError(ValueError):
    pass


def canonical_terms(terms):
    """Sorted [{e, c}] list; coefficients as decimal strings, zeros dropped."""
    out = []
    for expo in sorted(terms):
        c = terms[expo]
        if c == 0:
            continue
        out.append({"e": [int(e) for e in expo], "c": str(c)})
    return out


def checksum_of(term_list, poly_vars=POLY_VARS):
    payload = json.dumps({"vars": list(poly_vars), "terms": term_list},
                         separators=(",", ":"), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def poly_doc(terms, meta, poly_vars=POLY_VARS) -> dict:
    tl = canonical_terms(terms)
    m = dict(meta)
    m["checksum"] = checksum_of(tl, poly_vars)
    return {"vars": list(poly_vars), "terms": tl, "meta": m}


def parse_poly_doc(doc):
    """(terms, meta) from a schema dict; checksum and shape are enforced."""
    try:
        poly_vars = list(doc["vars"])
        raw_terms = doc["terms"]
        meta = dict(doc["meta"])
    except (KeyError, TypeError) as exc:
        raise PolyFileError(f"malformed polynomial document: {exc}") from exc
    terms = {}
    canon = []
    for item in raw_terms:
        try:
            expo = tuple(int(e) for e in item["e"])
            coeff = mpq(item["c"])
        except (KeyError, TypeError, ValueError) as exc:
            raise PolyFileError(f"malformed term {item!r}") from exc
        if len(expo) != len(poly_vars):
            raise PolyFileError(f"exponent arity {expo} != vars {poly_vars}")
        if coeff == 0:
            raise PolyFileError("stored zero coefficient")
        if expo in terms:
            raise PolyFileError(f"duplicate exponent {expo}")
        terms[expo] = coeff
        canon.append({"e": list(expo), "c": str(coeff)})
    canon.sort(key=lambda t: t["e"])
    expected = meta.get("checksum")
    actual = checksum_of(canon, poly_vars)
    if expected != actual:
        raise PolyFileError(f"checksum mismatch: stored {expected}, computed {actual}")
    return terms, meta


def write_poly_file(path, terms, meta, poly_vars=POLY_VARS):
    """Atomic write: temp file in the target directory, then rename."""
    doc = poly_doc(terms, meta, poly_vars)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, separators=(",", ":"), sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return doc["meta"]["checksum"]


def read_poly_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise PolyFileError(f"cannot read polynomial file {path}: {exc}") from exc
    return parse_poly_doc(doc)


def cache_dir() -> str:
    return os.environ.get(CACHE_ENV) or CACHE_DEFAULT


def cache_path(kind: str, n: int, directory=None) -> str:
    kind = str(kind).upper()
    if kind not in ("P", "Q"):
        raise ValueError("only P and Q polynomials are cached")
    base = directory if directory is not None else cache_dir()
    return os.path.join(base, f"{kind.lower()}_{int(n)}.json")
