"""SCAN navigation commands: parsing, interpretation, enumeration.

Grammar (no recursion, finite language):

    C   -> S 'and' S | S 'after' S | S
    S   -> V 'twice' | V 'thrice' | V
    V   -> U 'opposite' D | U 'around' D | 'turn' 'opposite' D
         | 'turn' 'around' D | U D | 'turn' D | U
    U   -> 'walk' | 'look' | 'run' | 'jump'
    D   -> 'left' | 'right'

'x1 after x2' executes x2 before x1; 'around' walks a full circle in four
quarter turns, each followed by the action; 'opposite' is a half turn.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

PRIMITIVES = {
    "walk": "I_WALK",
    "look": "I_LOOK",
    "run": "I_RUN",
    "jump": "I_JUMP",
}
TURNS = {
    "left": "I_TURN_LEFT",
    "right": "I_TURN_RIGHT",
}
COMMAND_WORDS = (
    "walk", "look", "run", "jump", "turn",
    "left", "right", "opposite", "around",
    "twice", "thrice", "and", "after",
)
ACTION_SYMBOLS = (
    "I_WALK", "I_LOOK", "I_RUN", "I_JUMP", "I_TURN_LEFT", "I_TURN_RIGHT",
)

MAX_COMMAND_LEN = 9
MAX_ACTION_LEN = 48


class ScanParseError(ValueError):
    """Token sequence not generated by the SCAN grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at token {position})")
        self.position = position


@dataclass(frozen=True)
class Example:
    """A command and the action sequence it denotes."""

    command: tuple[str, ...]
    actions: tuple[str, ...]


def _parse_verb(tokens: tuple[str, ...], offset: int) -> tuple:
    """Parse one V phrase; returns an AST tuple."""
    n = len(tokens)
    if n == 0:
        raise ScanParseError("empty verb phrase", offset)
    head = tokens[0]
    if n == 1:
        if head in PRIMITIVES:
            return ("prim", head)
        raise ScanParseError(f"expected a primitive, got {head!r}", offset)
    if head != "turn" and head not in PRIMITIVES:
        raise ScanParseError(f"expected 'turn' or a primitive, got {head!r}", offset)
    if n == 2:
        direction = tokens[1]
        if direction not in TURNS:
            raise ScanParseError(f"expected a direction, got {direction!r}", offset + 1)
        return ("turn_dir", direction) if head == "turn" else ("prim_dir", head, direction)
    if n == 3:
        mode, direction = tokens[1], tokens[2]
        if mode not in ("opposite", "around"):
            raise ScanParseError(f"expected 'opposite' or 'around', got {mode!r}", offset + 1)
        if direction not in TURNS:
            raise ScanParseError(f"expected a direction, got {direction!r}", offset + 2)
        if head == "turn":
            return ("turn_mode", mode, direction)
        return ("prim_mode", head, mode, direction)
    raise ScanParseError("verb phrase too long", offset + 3)


def _parse_scope(tokens: tuple[str, ...], offset: int) -> tuple:
    """Parse one S phrase (verb with optional repetition)."""
    if tokens and tokens[-1] in ("twice", "thrice"):
        count = 2 if tokens[-1] == "twice" else 3
        return ("repeat", count, _parse_verb(tokens[:-1], offset))
    return _parse_verb(tokens, offset)


def parse(command) -> tuple:
    """Parse a full command into an AST; raises ScanParseError otherwise."""
    tokens = tuple(command)
    for pos, tok in enumerate(tokens):
        if tok not in COMMAND_WORDS:
            raise ScanParseError(f"unknown word {tok!r}", pos)
    for conj in ("and", "after"):
        if conj in tokens:
            i = tokens.index(conj)
            left = _parse_scope(tokens[:i], 0)
            right = _parse_scope(tokens[i + 1 :], i + 1)
            return (conj, left, right)
    return _parse_scope(tokens, 0)


def _eval(node: tuple) -> tuple[str, ...]:
    kind = node[0]
    if kind == "prim":
        return (PRIMITIVES[node[1]],)
    if kind == "turn_dir":
        return (TURNS[node[1]],)
    if kind == "prim_dir":
        return (TURNS[node[2]], PRIMITIVES[node[1]])
    if kind == "turn_mode":
        mode, direction = node[1], node[2]
        turn = TURNS[direction]
        return (turn,) * 2 if mode == "opposite" else (turn,) * 4
    if kind == "prim_mode":
        head, mode, direction = node[1], node[2], node[3]
        turn, act = TURNS[direction], PRIMITIVES[head]
        if mode == "opposite":
            return (turn, turn, act)
        return (turn, act) * 4
    if kind == "repeat":
        return _eval(node[2]) * node[1]
    if kind == "and":
        return _eval(node[1]) + _eval(node[2])
    if kind == "after":
        return _eval(node[2]) + _eval(node[1])
    raise AssertionError(f"unreachable AST node {kind}")


def interpret(command) -> tuple[str, ...]:
    """Action sequence denoted by a command; raises ScanParseError if malformed."""
    return _eval(parse(command))


def _verb_phrases() -> Iterator[tuple[str, ...]]:
    for u in PRIMITIVES:
        yield (u,)
    for d in TURNS:
        yield ("turn", d)
        for u in PRIMITIVES:
            yield (u, d)
        for mode in ("opposite", "around"):
            yield ("turn", mode, d)
            for u in PRIMITIVES:
                yield (u, mode, d)


def _scope_phrases() -> list[tuple[str, ...]]:
    out = []
    for v in _verb_phrases():
        out.append(v)
        out.append(v + ("twice",))
        out.append(v + ("thrice",))
    return out


@lru_cache(maxsize=1)
def _all_commands() -> tuple[tuple[str, ...], ...]:
    scopes = _scope_phrases()
    commands = list(scopes)
    for conj in ("and", "after"):
        for a in scopes:
            for b in scopes:
                commands.append(a + (conj,) + b)
    commands.sort()
    return tuple(commands)


def enumerate_all() -> list[Example]:
    """Every command the grammar generates, lexicographic, with actions."""
    return [Example(cmd, interpret(cmd)) for cmd in _all_commands()]
