"""Controlled-language intent grammar.

An intent sentence has the shape

    <users> is <permission> to access to <scope-kind> <spot> [at <timeframes>]

where <users> and <timeframes> are lists joined by ",", "and", or ", and",
<permission> is a phrase from the permission vocabulary ("allowed",
"blocked", "not allowed", ...), <scope-kind> is one of organization / realm /
domain, <spot> names a hierarchy node, and each timeframe is a work shift
(morning / late / night). The trailing "at" clause may be omitted, which
means the intent applies to all three shifts.

Parsing is recursive descent over lowercased tokens; every surface phrase is
normalized to a canonical token through a Vocabulary, so the accepted
language can be enriched at runtime without touching the parser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .model import ScopeKind

IDENTIFIER_RE = re.compile(r"^[a-z0-9-]+$")

SLOT_PERMISSION = "permission"
SLOT_SCOPE_KIND = "scope_kind"
SLOT_SHIFT = "shift"
SLOT_CONJUNCTION = "list-conjunction"
SLOT_COPULA = "copula"

VOCABULARY_SLOTS = (
    SLOT_PERMISSION,
    SLOT_SCOPE_KIND,
    SLOT_SHIFT,
    SLOT_CONJUNCTION,
    SLOT_COPULA,
)


class Permission(str, Enum):
    ALLOW = "allow"
    BLOCK = "block"


class Shift(str, Enum):
    MORNING = "morning"
    LATE = "late"
    NIGHT = "night"

    @property
    def windows(self) -> tuple[tuple[int, int], ...]:
        return SHIFT_WINDOWS[self]


# Inclusive minute-of-day windows; the night shift wraps midnight.
SHIFT_WINDOWS: dict[Shift, tuple[tuple[int, int], ...]] = {
    Shift.MORNING: ((360, 839),),
    Shift.LATE: ((840, 1319),),
    Shift.NIGHT: ((1320, 1439), (0, 359)),
}

SHIFT_ORDER: tuple[Shift, ...] = (Shift.MORNING, Shift.LATE, Shift.NIGHT)
ALL_SHIFTS: frozenset[Shift] = frozenset(Shift)


def shift_of(minute: int) -> Shift:
    """Map a minute of day (0..1439) to the shift whose window contains it."""
    if not 0 <= minute <= 1439:
        raise ValueError(f"minute of day out of range: {minute}")
    for shift in SHIFT_ORDER:
        for lo, hi in SHIFT_WINDOWS[shift]:
            if lo <= minute <= hi:
                return shift
    raise AssertionError("shift windows do not cover the day")  # unreachable


def sorted_shifts(shifts: frozenset[Shift]) -> list[Shift]:
    """Shifts in canonical morning/late/night order."""
    return [s for s in SHIFT_ORDER if s in shifts]


class ParseError(Exception):
    """Input text does not match the intent grammar.

    ``position`` is a character offset into the original text (``len(text)``
    when the sentence ended too early), ``expected`` names the grammar slot,
    ``found`` is the offending token text.
    """

    def __init__(self, position: int, expected: str, found: str):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(f"expected {expected} at position {position}, found {found!r}")


class VocabularyError(Exception):
    """Vocabulary document malformed or a synonym is already bound elsewhere."""


@dataclass(frozen=True)
class Token:
    text: str
    start: int


def tokenize(text: str) -> list[Token]:
    """Lowercase and split on whitespace; commas become their own tokens."""
    return [
        Token(m.group(), m.start())
        for m in re.finditer(r"[^\s,]+|,", text.lower())
    ]


class Vocabulary:
    """Synonym table: slot -> canonical token -> accepted surface phrases.

    Phrases are matched against the token stream longest-first, so multi-word
    synonyms like "not allowed" win over their prefixes.
    """

    def __init__(self, slots: dict[str, dict[str, list[str]]]):
        self.slots = slots
        self._compiled: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        self._recompile()

    def _recompile(self) -> None:
        for slot, entries in self.slots.items():
            phrases: dict[tuple[str, ...], str] = {}
            for canonical, synonyms in entries.items():
                for phrase in synonyms:
                    key = tuple(t.text for t in tokenize(phrase))
                    if not key:
                        raise VocabularyError(
                            f"empty synonym for '{canonical}' in slot '{slot}'"
                        )
                    bound = phrases.get(key)
                    if bound is not None and bound != canonical:
                        raise VocabularyError(
                            f"synonym '{phrase}' in slot '{slot}' is bound to both "
                            f"'{bound}' and '{canonical}'"
                        )
                    phrases[key] = canonical
            self._compiled[slot] = sorted(
                phrases.items(), key=lambda item: len(item[0]), reverse=True
            )

    def match(self, slot: str, tokens: list[Token], pos: int) -> tuple[str, int] | None:
        """Longest-match lookup at ``tokens[pos:]``; (canonical, consumed) or None."""
        for phrase, canonical in self._compiled.get(slot, []):
            end = pos + len(phrase)
            if end <= len(tokens) and tuple(t.text for t in tokens[pos:end]) == phrase:
                return canonical, len(phrase)
        return None

    def add_synonym(self, slot: str, canonical: str, synonym: str) -> bool:
        """Bind a synonym phrase; returns False if it was already bound.

        Raises VocabularyError when the phrase maps to a different canonical
        token within the same slot.
        """
        entries = self.slots.setdefault(slot, {})
        key = tuple(t.text for t in tokenize(synonym))
        if not key:
            raise VocabularyError(f"empty synonym for '{canonical}' in slot '{slot}'")
        for other_canonical, synonyms in entries.items():
            for phrase in synonyms:
                if tuple(t.text for t in tokenize(phrase)) == key:
                    if other_canonical == canonical:
                        return False
                    raise VocabularyError(
                        f"synonym '{synonym}' in slot '{slot}' already maps to "
                        f"'{other_canonical}'"
                    )
        entries.setdefault(canonical, []).append(synonym)
        self._recompile()
        return True

    def reserved_words(self) -> frozenset[str]:
        """Single tokens that cannot be user or spot identifiers."""
        words = {"at"}
        for slot in (SLOT_COPULA, SLOT_CONJUNCTION):
            for phrase, _ in self._compiled.get(slot, []):
                words.update(t for t in phrase if t != ",")
        return frozenset(words)

    @classmethod
    def from_document(cls, document: Any) -> Vocabulary:
        if not isinstance(document, dict):
            raise VocabularyError("intent-store document must be a JSON object")
        unknown = set(document) - {"slots"}
        if unknown:
            raise VocabularyError(f"unknown intent-store fields: {sorted(unknown)}")
        slots_doc = document.get("slots")
        if not isinstance(slots_doc, dict):
            raise VocabularyError("'slots' must be an object")
        slots: dict[str, dict[str, list[str]]] = {}
        for slot, entries in slots_doc.items():
            if not isinstance(entries, dict):
                raise VocabularyError(f"slot '{slot}' must map canonicals to lists")
            slots[slot] = {}
            for canonical, synonyms in entries.items():
                if not isinstance(synonyms, list) or not all(
                    isinstance(s, str) for s in synonyms
                ):
                    raise VocabularyError(
                        f"synonyms of '{canonical}' in slot '{slot}' must be strings"
                    )
                slots[slot][canonical] = list(synonyms)
        return cls(slots)

    def to_document(self) -> dict[str, Any]:
        return {
            "slots": {
                slot: {canonical: list(synonyms) for canonical, synonyms in entries.items()}
                for slot, entries in self.slots.items()
            }
        }


def default_vocabulary() -> Vocabulary:
    return Vocabulary(
        {
            SLOT_PERMISSION: {
                Permission.ALLOW.value: ["allowed"],
                Permission.BLOCK.value: ["blocked", "not allowed"],
            },
            SLOT_SCOPE_KIND: {
                ScopeKind.ORGANIZATION.value: ["organization"],
                ScopeKind.REALM.value: ["realm"],
                ScopeKind.DOMAIN.value: ["domain"],
            },
            SLOT_SHIFT: {
                Shift.MORNING.value: ["morning shift", "morning"],
                Shift.LATE.value: ["late shift", "late"],
                Shift.NIGHT.value: ["night shift", "night"],
            },
            SLOT_CONJUNCTION: {"and": [", and", "and", ","]},
            SLOT_COPULA: {"is": ["is", "are"]},
        }
    )


@dataclass
class IntentSpec:
    """Structured form of one parsed intent sentence.

    ``raw_text`` is excluded from equality so that a re-parse of the
    canonical rendering compares equal to the original spec.
    """

    users: tuple[str, ...]
    permission: Permission
    scope_kind: ScopeKind
    spot: str
    timeframes: frozenset[Shift]
    raw_text: str = field(default="", compare=False)

    def to_document(self) -> dict[str, Any]:
        return {
            "users": list(self.users),
            "permission": self.permission.value,
            "scope_kind": self.scope_kind.value,
            "spot": self.spot,
            "timeframes": [s.value for s in sorted_shifts(self.timeframes)],
            "raw_text": self.raw_text,
        }


def expand_synonyms(
    vocab: Vocabulary, tokens: list[Token], slot: str, pos: int = 0
) -> tuple[str, int] | None:
    """Longest-match a phrase prefix against one vocabulary slot."""
    return vocab.match(slot, tokens, pos)


class _Parser:
    def __init__(self, text: str, vocab: Vocabulary):
        self.text = text
        self.vocab = vocab
        self.tokens = tokenize(text)
        self.pos = 0
        self.reserved = vocab.reserved_words()

    def fail(self, expected: str) -> ParseError:
        if self.pos < len(self.tokens):
            token = self.tokens[self.pos]
            return ParseError(token.start, expected, token.text)
        return ParseError(len(self.text), expected, "end of input")

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def match_slot(self, slot: str) -> str | None:
        hit = self.vocab.match(slot, self.tokens, self.pos)
        if hit is None:
            return None
        canonical, consumed = hit
        self.pos += consumed
        return canonical

    def expect_slot(self, slot: str, expected: str) -> str:
        canonical = self.match_slot(slot)
        if canonical is None:
            raise self.fail(expected)
        return canonical

    def expect_keyword(self, word: str) -> None:
        token = self.peek()
        if token is None or token.text != word:
            raise self.fail(f"keyword '{word}'")
        self.pos += 1

    def expect_identifier(self, expected: str) -> str:
        token = self.peek()
        if (
            token is None
            or not IDENTIFIER_RE.match(token.text)
            or token.text in self.reserved
        ):
            raise self.fail(expected)
        self.pos += 1
        return token.text

    def parse_users(self) -> tuple[str, ...]:
        users = [self.expect_identifier("user identifier")]
        while self.match_slot(SLOT_CONJUNCTION) is not None:
            users.append(self.expect_identifier("user identifier"))
        # duplicates collapse; first occurrence wins
        return tuple(dict.fromkeys(users))

    def parse_timeframes(self) -> frozenset[Shift]:
        shifts = [Shift(self.expect_slot(SLOT_SHIFT, "timeframe"))]
        while self.match_slot(SLOT_CONJUNCTION) is not None:
            shifts.append(Shift(self.expect_slot(SLOT_SHIFT, "timeframe")))
        return frozenset(shifts)

    def parse(self) -> IntentSpec:
        users = self.parse_users()
        self.expect_slot(SLOT_COPULA, "copula ('is')")
        permission = Permission(self.expect_slot(SLOT_PERMISSION, "permission"))
        self.expect_keyword("to")
        self.expect_keyword("access")
        self.expect_keyword("to")
        scope_kind = ScopeKind(self.expect_slot(SLOT_SCOPE_KIND, "scope kind"))
        spot = self.expect_identifier("spot identifier")
        token = self.peek()
        if token is not None and token.text == "at":
            self.pos += 1
            timeframes = self.parse_timeframes()
        else:
            timeframes = ALL_SHIFTS
        if not self.at_end():
            raise self.fail("end of input")
        return IntentSpec(
            users=users,
            permission=permission,
            scope_kind=scope_kind,
            spot=spot,
            timeframes=timeframes,
            raw_text=self.text,
        )


def parse_intent(text: str, vocab: Vocabulary) -> IntentSpec:
    """Parse one intent sentence; raises ParseError at the first bad slot."""
    return _Parser(text, vocab).parse()


def render_intent(spec: IntentSpec) -> str:
    """Canonical sentence for a spec; parse(render(s)) == s for valid s."""
    users = ", and ".join(spec.users)
    permission = "allowed" if spec.permission is Permission.ALLOW else "blocked"
    shifts = ", and ".join(f"{s.value} shift" for s in sorted_shifts(spec.timeframes))
    return (
        f"{users} is {permission} to access to "
        f"{spec.scope_kind.value} {spec.spot} at {shifts}"
    )
