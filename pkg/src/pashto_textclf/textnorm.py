"""Pashto text normalization, word tokenization and fixed-length sequences.

Normalization keeps the letters of the Arabic block (which covers the
Pashto-specific letters), combining marks, the zero-width non-joiner and
whitespace. Everything else is classified as digit, Latin letter or
symbol and removed according to :class:`NormalizationConfig`.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import asdict, dataclass
from functools import lru_cache

ZWNJ = "‌"
TATWEEL = "ـ"

# Letters that distinguish Pashto from Arabic/Persian.
PASHTO_SPECIFIC = frozenset("ټډړږښګڼڅځېۍئ")

# Full alphabet as laid out in the standard Pashto letter chart.
PASHTO_ALPHABET = (
    "ا", "ب", "پ", "ت", "ټ", "ث", "ج", "چ",
    "ځ", "څ", "ح", "خ", "د", "ډ", "ذ", "ر",
    "ړ", "ز", "ژ", "ږ", "س", "ش", "ښ", "ص",
    "ض", "ط", "ظ", "ع", "غ", "ف", "ق", "ک",
    "ګ", "ل", "م", "ن", "ڼ", "و", "ه", "ی",
    "ي", "ې", "ۍ", "ئ",
)

_URL_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9+.\-]*://|www\.)\S*", re.IGNORECASE)

_PRESENTATION_RANGES = ((0xFB50, 0xFDFF), (0xFE70, 0xFEFF))


def _build_kept() -> frozenset[str]:
    kept = set()
    for cp in range(0x0600, 0x0700):
        ch = chr(cp)
        if ch == TATWEEL:
            continue
        if unicodedata.category(ch) in ("Lo", "Mn"):
            kept.add(ch)
    kept.update(PASHTO_ALPHABET)
    kept.update(PASHTO_SPECIFIC)
    kept.add(ZWNJ)
    kept.add(" ")
    return frozenset(kept)


#: Code points that survive normalization unconditionally.
KEPT_CHARS = _build_kept()


@dataclass(frozen=True)
class NormalizationConfig:
    strip_urls: bool = True
    strip_digits: bool = True
    strip_latin: bool = True
    strip_symbols: bool = True
    collapse_whitespace: bool = True
    strip_zwnj: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizationConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown normalization options: {sorted(unknown)}")
        return cls(**{k: bool(v) for k, v in data.items()})


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]
    fixed_length: int | None = None
    pad_token: str = ""

    def __len__(self) -> int:
        return len(self.tokens)


# character classes used by normalize()
_KEEP, _SPACE, _DIGIT, _LATIN, _SYMBOL, _ZWNJ, _DROP = range(7)


@lru_cache(maxsize=4096)
def _char_class(ch: str) -> int:
    if ch == ZWNJ:
        return _ZWNJ
    if ch in KEPT_CHARS:
        return _KEEP
    if ch.isspace():
        return _SPACE
    cat = unicodedata.category(ch)
    if cat == "Nd":
        return _DIGIT
    if cat.startswith("L") and "LATIN" in unicodedata.name(ch, ""):
        return _LATIN
    if ch == TATWEEL or cat in ("Mn", "Me", "Cf"):
        # in-word marks: deleting them must not split a word
        return _DROP
    return _SYMBOL


def _fold_presentation_forms(text: str) -> str:
    out = []
    for ch in text:
        cp = ord(ch)
        if any(lo <= cp <= hi for lo, hi in _PRESENTATION_RANGES):
            out.append(unicodedata.normalize("NFKC", ch))
        else:
            out.append(ch)
    return "".join(out)


def normalize(text: str, config: NormalizationConfig | None = None) -> str:
    """Strip URLs, digits, Latin letters and symbols; collapse whitespace.

    Removed characters are replaced by a space so that words glued by
    punctuation stay separate; in-word marks (tatweel, format controls)
    are deleted outright.
    """
    cfg = config or NormalizationConfig()
    if not text:
        return ""
    if cfg.strip_urls:
        text = _URL_RE.sub(" ", text)
    text = _fold_presentation_forms(text)

    out = []
    for ch in text:
        cls = _char_class(ch)
        if cls == _KEEP:
            out.append(ch)
        elif cls == _SPACE:
            out.append(" " if cfg.collapse_whitespace else ch)
        elif cls == _ZWNJ:
            if not cfg.strip_zwnj:
                out.append(ch)
        elif cls == _DIGIT:
            out.append(" " if cfg.strip_digits else ch)
        elif cls == _LATIN:
            out.append(" " if cfg.strip_latin else ch)
        elif cls == _DROP:
            if not cfg.strip_symbols:
                out.append(ch)
        else:
            out.append(" " if cfg.strip_symbols else ch)
    result = "".join(out)
    if cfg.collapse_whitespace:
        result = " ".join(result.split())
    return result.strip()


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def tokenize(text: str) -> list[str]:
    """Split on whitespace and detach punctuation into single-char tokens."""
    tokens: list[str] = []
    for chunk in text.split():
        word = []
        for ch in chunk:
            if _is_punct(ch):
                if word:
                    tokens.append("".join(word))
                    word = []
                tokens.append(ch)
            else:
                word.append(ch)
        if word:
            tokens.append("".join(word))
    return tokens


def pad_truncate(tokens: list[str], max_len: int, pad_token: str = "") -> TokenSequence:
    """Cut ``tokens`` to ``max_len`` or right-pad them with ``pad_token``."""
    if max_len < 1:
        raise ValueError(f"max_len must be positive, got {max_len}")
    kept = list(tokens[:max_len])
    kept.extend([pad_token] * (max_len - len(kept)))
    return TokenSequence(tuple(kept), fixed_length=max_len, pad_token=pad_token)


def word_count(text: str, config: NormalizationConfig | None = None) -> int:
    return len(tokenize(normalize(text, config)))
