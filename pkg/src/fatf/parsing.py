"""Text grammars for words, group elements, and extension elements.

Words multiply with ``*`` and exponents with ``^`` (``x1*x2^-1``, ``1``
for the identity).  An element is a whitespace-separated mix of word
chunks and abelian chunks ``t^(a1,...,am)``; the abelian letters are
central, so chunks commute into the normal form with all t-exponents
summed.  An extension element reads ``x^i <element> x^-j`` with a
leading nonnegative and a trailing nonpositive stable-letter power.
Formatting inverts every parser, and parsing a formatted value gives
back an equal value.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

from .elements import FatfElement, GroupSignature
from .endos import Endomorphism, TypeIEndo, TypeIIEndo, classify
from .hnn import HnnElement
from .intlinalg import IntMatrix
from .words import Word


class ParseError(ValueError):
    """Malformed input text; the message carries the character position."""


_FACTOR = re.compile(r"^x([1-9][0-9]*)(?:\^(-?[0-9]+))?$")
_ABELIAN = re.compile(r"^t\^\((.*)\)$")
_STABLE = re.compile(r"^x(?:\^(-?[0-9]+))?$")


def _fail(text: str, pos: int, reason: str) -> ParseError:
    return ParseError(f"at position {pos}: {reason} in {text!r}")


def parse_word(text: str, rank: int, offset: int = 0) -> Word:
    """Read a ``*``-separated product of powered generators."""
    text = text.strip()
    if not text:
        raise _fail(text, offset, "empty word")
    letters: list[int] = []
    pos = offset
    for factor in text.split("*"):
        if factor == "1":
            pos += len(factor) + 1
            continue
        match = _FACTOR.match(factor)
        if match is None:
            raise _fail(factor, pos, "expected a generator like x1 or x2^-1")
        index = int(match.group(1))
        if index > rank:
            raise _fail(factor, pos,
                        f"generator index {index} exceeds free rank {rank}")
        exponent = 1 if match.group(2) is None else int(match.group(2))
        step = index if exponent > 0 else -index
        letters.extend([step] * abs(exponent))
        pos += len(factor) + 1
    return Word(rank, tuple(letters))


def parse_vector(text: str, length: Optional[int] = None,
                 offset: int = 0) -> tuple[int, ...]:
    """Read a parenthesized integer tuple like ``(2,-3)`` or ``()``."""
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise _fail(text, offset, "expected a parenthesized tuple")
    inner = text[1:-1].strip()
    if not inner:
        values: tuple[int, ...] = ()
    else:
        parts = inner.split(",")
        try:
            values = tuple(int(part.strip()) for part in parts)
        except ValueError:
            raise _fail(text, offset, "tuple entries must be integers") from None
    if length is not None and len(values) != length:
        raise _fail(text, offset,
                    f"expected {length} entries, found {len(values)}")
    return values


def parse_element(text: str, signature: GroupSignature) -> FatfElement:
    """Read an element, commuting interleaved abelian chunks together."""
    if not text.strip():
        raise _fail(text, 0, "empty element")
    word = Word.identity(signature.free_rank)
    abelian = [0] * signature.abelian_rank
    pos = 0
    for token in text.split():
        start = text.index(token, pos)
        abelian_match = _ABELIAN.match(token)
        if abelian_match is not None:
            values = parse_vector(token[2:], signature.abelian_rank, start + 2)
            for i, value in enumerate(values):
                abelian[i] += value
        else:
            word = word * parse_word(token, signature.free_rank, start)
        pos = start + len(token)
    return FatfElement(word, tuple(abelian))


def parse_matrix(text: str, n_rows: Optional[int] = None,
                 n_cols: Optional[int] = None) -> IntMatrix:
    """Read a row-major bracket literal like ``[[0,1],[-1,0]]``."""
    import json

    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise _fail(text, err.pos, "not a bracketed integer matrix") from None
    return matrix_from_rows(data, n_rows, n_cols, context=text)


def matrix_from_rows(data: object, n_rows: Optional[int] = None,
                     n_cols: Optional[int] = None,
                     context: str = "matrix") -> IntMatrix:
    """Validate a row-major list of lists and build the exact matrix.

    A bare empty list is accepted as shorthand whenever the expected
    shape has no entries (zero rows, or the requested rows are empty).
    """
    if not isinstance(data, list):
        raise _fail(str(context), 0, "matrix must be a list of rows")
    if data == [] and n_rows not in (None, 0) and n_cols == 0:
        data = [[] for _ in range(n_rows)]
    rows: list[list[int]] = []
    for row in data:
        if not isinstance(row, list):
            raise _fail(str(context), 0, "matrix rows must be lists")
        for value in row:
            if isinstance(value, bool) or not isinstance(value, int):
                raise _fail(str(context), 0, "matrix entries must be integers")
        rows.append(list(row))
    widths = {len(row) for row in rows}
    if len(widths) > 1:
        raise _fail(str(context), 0, "matrix rows have unequal lengths")
    width = widths.pop() if widths else (n_cols if n_cols is not None else 0)
    if n_rows is not None and len(rows) != n_rows:
        raise _fail(str(context), 0,
                    f"expected {n_rows} rows, found {len(rows)}")
    if n_cols is not None and width != n_cols:
        raise _fail(str(context), 0,
                    f"expected {n_cols} columns, found {width}")
    return IntMatrix.from_rows(rows, width)


def parse_hnn(text: str, signature: GroupSignature) -> HnnElement:
    """Read ``x^i <element> x^-j`` into an (unreduced) extension element."""
    tokens = text.split()
    if not tokens:
        raise _fail(text, 0, "empty extension element")
    i = j = 0
    if _STABLE.match(tokens[0]):
        exponent = _stable_exponent(tokens[0])
        if exponent < 0:
            if len(tokens) > 1:
                raise _fail(tokens[0], 0,
                            "negative stable-letter power must come last")
            return HnnElement(0, signature.identity(), -exponent)
        i = exponent
        tokens = tokens[1:]
    if tokens and _STABLE.match(tokens[-1]):
        exponent = _stable_exponent(tokens[-1])
        if exponent > 0:
            raise _fail(tokens[-1], 0,
                        "trailing stable-letter power must be negative")
        j = -exponent
        tokens = tokens[:-1]
    for token in tokens:
        if _STABLE.match(token):
            raise _fail(token, 0, "stable-letter powers may only frame the "
                                  "element")
    if tokens:
        g = parse_element(" ".join(tokens), signature)
    else:
        g = signature.identity()
    return HnnElement(i, g, j)


def _stable_exponent(token: str) -> int:
    match = _STABLE.match(token)
    assert match is not None
    return 1 if match.group(1) is None else int(match.group(1))


def format_word(word: Word) -> str:
    if word.is_identity():
        return "1"
    factors: list[str] = []
    letters = word.letters
    start = 0
    while start < len(letters):
        end = start
        while end < len(letters) and letters[end] == letters[start]:
            end += 1
        index = abs(letters[start])
        exponent = (end - start) * (1 if letters[start] > 0 else -1)
        factors.append(f"x{index}" if exponent == 1 else f"x{index}^{exponent}")
        start = end
    return "*".join(factors)


def format_vector(values: Sequence[int]) -> str:
    return "(" + ",".join(str(v) for v in values) + ")"


def format_element(g: FatfElement) -> str:
    if not g.abelian:
        return format_word(g.word)
    return f"{format_word(g.word)} t^{format_vector(g.abelian)}"


def format_hnn(e: HnnElement) -> str:
    parts: list[str] = []
    if e.i > 0:
        parts.append(f"x^{e.i}")
    if not e.g.is_identity() or (e.i == 0 and e.j == 0):
        parts.append(format_element(e.g))
    if e.j > 0:
        parts.append(f"x^-{e.j}")
    return " ".join(parts)


def endo_from_document(doc: object) -> Endomorphism:
    """Build an endomorphism from a decoded JSON document.

    The document carries ``type`` ("I", "II", or "images"), the ranks
    ``n`` and ``m``, and then the type's own fields: word images plus
    the two matrices, the distinguished root with its exponent vectors,
    or raw generator images handed to the classifier.
    """
    if not isinstance(doc, dict):
        raise ParseError("endomorphism document must be an object")
    kind = doc.get("type")
    n, m = _rank_fields(doc)
    signature = GroupSignature(n, m)
    if kind == "I":
        phi = _string_list(doc, "phi", n)
        images = tuple(parse_word(s, n) for s in phi)
        return TypeIEndo(images, _doc_matrix(doc, "Q", m, m),
                         _doc_matrix(doc, "P", n, m))
    if kind == "II":
        w = parse_word(_string_field(doc, "w"), n)
        r = _doc_vector(doc, "r", m)
        s = _doc_vector(doc, "s", n)
        return TypeIIEndo(w, r, s, _doc_matrix(doc, "Q", m, m),
                          _doc_matrix(doc, "P", n, m))
    if kind == "images":
        x_images = [parse_element(s, signature)
                    for s in _string_list(doc, "x_images", n)]
        t_images = [parse_element(s, signature)
                    for s in _string_list(doc, "t_images", m)]
        return classify(x_images, t_images)
    raise ParseError(f"unknown endomorphism type {kind!r}")


def endo_to_document(endo: Endomorphism) -> dict:
    """Serialize an endomorphism to the document shape the loader reads."""
    signature = endo.signature
    doc: dict = {"n": signature.free_rank, "m": signature.abelian_rank}
    if isinstance(endo, TypeIEndo):
        doc["type"] = "I"
        doc["phi"] = [format_word(image) for image in endo.images]
    else:
        doc["type"] = "II"
        doc["w"] = format_word(endo.w)
        doc["r"] = list(endo.r)
        doc["s"] = list(endo.s)
    doc["Q"] = [list(row) for row in endo.q.rows]
    doc["P"] = [list(row) for row in endo.p.rows]
    return doc


def _rank_fields(doc: dict) -> tuple[int, int]:
    ranks = []
    for key in ("n", "m"):
        value = doc.get(key)
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise ParseError(f"field {key!r} must be a nonnegative integer")
        ranks.append(value)
    return ranks[0], ranks[1]


def _string_field(doc: dict, key: str) -> str:
    value = doc.get(key)
    if not isinstance(value, str):
        raise ParseError(f"field {key!r} must be a string")
    return value


def _string_list(doc: dict, key: str, length: int) -> list[str]:
    value = doc.get(key)
    if (not isinstance(value, list)
            or any(not isinstance(item, str) for item in value)):
        raise ParseError(f"field {key!r} must be a list of strings")
    if len(value) != length:
        raise ParseError(f"field {key!r} must list {length} entries, "
                         f"found {len(value)}")
    return value


def _doc_vector(doc: dict, key: str, length: int) -> tuple[int, ...]:
    value = doc.get(key)
    if (not isinstance(value, list)
            or any(isinstance(v, bool) or not isinstance(v, int)
                   for v in value)):
        raise ParseError(f"field {key!r} must be a list of integers")
    if len(value) != length:
        raise ParseError(f"field {key!r} must have {length} entries, "
                         f"found {len(value)}")
    return tuple(value)


def _doc_matrix(doc: dict, key: str, n_rows: int, n_cols: int) -> IntMatrix:
    value = doc.get(key)
    if value is None:
        raise ParseError(f"field {key!r} is missing")
    try:
        return matrix_from_rows(value, n_rows, n_cols, context=key)
    except ParseError as err:
        raise ParseError(f"field {key!r}: {err}") from None
