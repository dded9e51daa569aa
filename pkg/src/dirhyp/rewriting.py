"""String rewriting normal forms for finitely presented monoids and semigroups."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

DEFAULT_BUDGET = 10_000

Word = tuple[int, ...]


class RewriteBudgetExceeded(RuntimeError):
    def __init__(self, word: str, budget: int):
        super().__init__(f"rewriting {word!r} did not terminate within {budget} steps")
        self.word = word
        self.budget = budget


@dataclass(frozen=True)
class Presentation:
    """Generators plus an ordered list of rules ``lhs -> rhs``.

    The rules are trusted to be a complete (terminating, confluent) system;
    only termination is policed, through a per-word step budget.
    """

    generators: tuple[str, ...]
    rules: tuple[tuple[Word, Word], ...]
    kind: str = "monoid"

    def __post_init__(self):
        if self.kind not in ("monoid", "semigroup"):
            raise ValueError("kind must be 'monoid' or 'semigroup'")
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("duplicate generator names")

    @property
    def _sep(self) -> str:
        return "" if all(len(g) == 1 for g in self.generators) else "."

    def parse_word(self, text: str) -> Word:
        text = text.strip()
        if text in ("", "1", "e"):
            return ()
        if self._sep:
            parts = text.split(self._sep)
        else:
            parts = list(text)
        try:
            return tuple(self.generators.index(p) for p in parts)
        except ValueError:
            raise ValueError(f"word {text!r} uses an unknown generator") from None

    def show(self, word: Sequence[int]) -> str:
        if not word:
            return "1"
        return self._sep.join(self.generators[i] for i in word)

    def normal_form(self, word: Sequence[int], budget: int = DEFAULT_BUDGET) -> Word:
        """Rewrite until no rule applies.

        At each step the redex ending leftmost is replaced; ties go to the
        earlier rule.
        """
        w = list(word)
        steps = 0
        rules = self.rules
        while True:
            hit = None
            for end in range(1, len(w) + 1):
                for lhs, rhs in rules:
                    k = len(lhs)
                    if k <= end and tuple(w[end - k:end]) == lhs:
                        hit = (end - k, end, rhs)
                        break
                if hit:
                    break
            if hit is None:
                return tuple(w)
            steps += 1
            if steps > budget:
                raise RewriteBudgetExceeded(self.show(word), budget)
            a, b, rhs = hit
            w[a:b] = rhs

    def multiply(self, x: Word, y: Word, budget: int = DEFAULT_BUDGET) -> Word:
        return self.normal_form(tuple(x) + tuple(y), budget)


def parse_presentation(text: str, kind: str | None = None) -> Presentation:
    """Line 1: generators separated by spaces.  Then ``lhs -> rhs`` per line.

    A line ``kind monoid`` or ``kind semigroup`` sets the kind unless the
    ``kind`` argument overrides it.  ``1`` denotes the empty word.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [(i + 1, ln) for i, ln in enumerate(lines) if ln]
    if not lines:
        raise ValueError("line 1: empty presentation")
    gens = tuple(lines[0][1].split())
    file_kind = "monoid"
    rules_text = []
    for lineno, ln in lines[1:]:
        if ln.startswith("kind"):
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'kind monoid|semigroup'")
            file_kind = parts[1]
            continue
        if "->" not in ln:
            raise ValueError(f"line {lineno}: expected 'lhs -> rhs', got {ln!r}")
        lhs, rhs = (s.strip() for s in ln.split("->", 1))
        rules_text.append((lineno, lhs, rhs))
    base = Presentation(gens, (), kind or file_kind)
    rules = []
    for lineno, lhs, rhs in rules_text:
        try:
            lw, rw = base.parse_word(lhs), base.parse_word(rhs)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if not lw:
            raise ValueError(f"line {lineno}: empty left-hand side")
        rules.append((lw, rw))
    return Presentation(gens, tuple(rules), kind or file_kind)


BUILTIN_PRESENTATIONS = {
    # <a, b | a^2 = b^2, ab = ba>, oriented so normal forms are a^i and a^i b
    "ex16_5": "a b\nba -> ab\nbb -> aa\n",
    "nat": "a\n",
    "free2": "a b\n",
    "free3": "a b c\n",
    # bicyclic monoid <p, q | pq = 1>
    "bicyclic": "p q\npq -> 1\n",
}


def builtin_presentation(name: str) -> Presentation:
    try:
        return parse_presentation(BUILTIN_PRESENTATIONS[name])
    except KeyError:
        raise KeyError(f"unknown built-in presentation {name!r}; "
                       f"choose from {sorted(BUILTIN_PRESENTATIONS)}") from None
