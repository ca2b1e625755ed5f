"""Symbol interning and multicharacter-aware tokenization.

All text enters through NFC normalization so that combining-mark and
precomposed spellings of the same grapheme intern to one id.  A '%' in
source text escapes the next code point; the canonical text of a symbol
keeps the escaped spelling, while longest-match tokenization runs over
the unescaped content.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from .errors import SymbolError, UnknownSymbolError

EPSILON_ID = 0
EPSILON_TEXT = "@0@"


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def unescape(text: str) -> str:
    """Strip '%' escapes, keeping the escaped code points literally."""
    return "".join(ch for ch, _ in _scan(text))


def _scan(text: str) -> list[tuple[str, bool]]:
    """Split into (code point, was_escaped) pairs, honoring '%'."""
    out = []
    i = 0
    while i < len(text):
        if text[i] == "%":
            if i + 1 >= len(text):
                raise SymbolError(f"dangling '%' escape at end of {text!r}")
            out.append((text[i + 1], True))
            i += 2
        else:
            out.append((text[i], False))
            i += 1
    return out


@dataclass(frozen=True)
class Symbol:
    id: int
    text: str

    def __str__(self):
        return self.text


class SymbolTable:
    """Interned alphabet shared by every transducer of one pipeline.

    Mutable while compiling (single writer); freeze() before sharing.
    Id 0 is reserved for epsilon.
    """

    def __init__(self):
        eps = Symbol(EPSILON_ID, EPSILON_TEXT)
        self._symbols = [eps]
        self._index = {EPSILON_TEXT: EPSILON_ID}
        self._multichar_ids = set()
        # unescaped content -> id, for longest-match tokenization
        self._contents = {}
        self._pair_parts = {}  # pair-symbol id -> (upper id, lower id)
        self._frozen = False

    # -- interning ---------------------------------------------------------

    def intern(self, text: str, multichar: bool = False) -> Symbol:
        if not text:
            raise SymbolError("cannot intern empty symbol text")
        if not isinstance(text, str):
            raise SymbolError(f"symbol text must be str, got {type(text)!r}")
        text = nfc(text)
        sid = self._index.get(text)
        if sid is None:
            if self._frozen:
                raise SymbolError(f"symbol table is frozen; cannot intern {text!r}")
            sid = len(self._symbols)
            sym = Symbol(sid, text)
            self._symbols.append(sym)
            self._index[text] = sid
        if multichar or len(unescape(text)) > 1:
            self._multichar_ids.add(sid)
        return self._symbols[sid]

    def declare_multichar(self, text: str) -> Symbol:
        """Intern a multicharacter symbol and register it for tokenization.

        Escaped and unescaped spellings of one symbol ("%^V2VV", "^V2VV")
        share a content key and resolve to the first-declared id.
        """
        content = unescape(nfc(text))
        if not content:
            raise SymbolError(f"multichar symbol {text!r} has empty content")
        existing = self._contents.get(content)
        if existing is not None:
            return self._symbols[existing]
        sym = self.intern(text, multichar=True)
        self._contents[content] = sym.id
        return sym

    def content_id(self, text: str):
        """Id of the symbol with this unescaped content, or None."""
        content = unescape(nfc(text))
        if len(content) == 1 and content in self._index:
            return self._index[content]
        return self._contents.get(content)

    def symbol_for(self, text: str) -> Symbol:
        """Resolve a whitespace-delimited source token to one symbol,
        unifying escaped/unescaped spellings by content."""
        content = unescape(nfc(text))
        if not content:
            raise SymbolError(f"empty symbol token {text!r}")
        existing = self._contents.get(content)
        if existing is not None:
            return self._symbols[existing]
        if len(content) == 1:
            return self.intern(content)
        return self.declare_multichar(text)

    def resolve(self, sid: int) -> str:
        if not isinstance(sid, int) or sid < 0 or sid >= len(self._symbols):
            raise SymbolError(f"unknown symbol id {sid!r}")
        return self._symbols[sid].text

    def __len__(self):
        return len(self._symbols)

    def __contains__(self, text):
        return nfc(text) in self._index

    def id_of(self, text: str) -> int:
        text = nfc(text)
        sid = self._index.get(text)
        if sid is None:
            raise UnknownSymbolError(f"symbol {text!r} not in table")
        return sid

    def symbols(self):
        return list(self._symbols)

    def is_multichar(self, sid: int) -> bool:
        return sid in self._multichar_ids

    def freeze(self):
        self._frozen = True

    @property
    def frozen(self):
        return self._frozen

    # -- tokenization ------------------------------------------------------

    def tokenize(self, text: str, intern_new: bool = True) -> list[Symbol]:
        """Longest-match tokenization of NFC text against declared multichars.

        A lone unescaped "0" denotes epsilon (empty token sequence).
        With intern_new=False, characters outside the table raise
        UnknownSymbolError instead of interning fresh symbols.
        """
        chars = _scan(nfc(text))
        if len(chars) == 1 and chars[0] == ("0", False):
            return []
        content = "".join(ch for ch, _ in chars)
        out = []
        i = 0
        n = len(content)
        max_len = max((len(c) for c in self._contents), default=1)
        while i < n:
            match_id = None
            for length in range(min(max_len, n - i), 1, -1):
                cand = self._contents.get(content[i : i + length])
                if cand is not None:
                    match_id = cand
                    i += length
                    break
            if match_id is None:
                ch = content[i]
                single = self._contents.get(ch)
                if single is not None:
                    match_id = single
                elif ch in self._index:
                    match_id = self._index[ch]
                elif intern_new:
                    match_id = self.intern(ch).id
                else:
                    raise UnknownSymbolError(f"character {ch!r} not in alphabet")
                i += 1
            out.append(self._symbols[match_id])
        return out

    # -- pair symbols ------------------------------------------------------

    def pair_symbol(self, upper: int, lower: int) -> Symbol:
        """Intern the composite "upper:lower" symbol (epsilon spelled "0")."""
        up = "0" if upper == EPSILON_ID else self.resolve(upper)
        lo = "0" if lower == EPSILON_ID else self.resolve(lower)
        sym = self.intern(f"{up}:{lo}", multichar=True)
        self._pair_parts[sym.id] = (upper, lower)
        return sym

    def pair_parts(self, sid: int) -> tuple[int, int]:
        try:
            return self._pair_parts[sid]
        except KeyError:
            raise SymbolError(
                f"symbol {self.resolve(sid)!r} is not a pair symbol"
            ) from None

    def is_pair_symbol(self, sid: int) -> bool:
        return sid in self._pair_parts

    def render(self, ids) -> str:
        """Concatenated text of a symbol-id sequence (epsilons dropped)."""
        return "".join(self.resolve(i) for i in ids if i != EPSILON_ID)
