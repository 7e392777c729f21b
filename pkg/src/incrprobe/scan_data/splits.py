"""Train/test splits over the enumerated command set."""

from __future__ import annotations

from dataclasses import dataclass

from ..numcore import Rng
from .grammar import Example

SPLIT_KINDS = ("add_prim_jump", "add_prim_turn_left", "random")


class SplitError(ValueError):
    """Unknown or inconsistent split specification."""


@dataclass(frozen=True)
class SplitSpec:
    """Which split to build; add_prim_* hold out composites of one primitive."""

    kind: str = "add_prim_jump"

    def __post_init__(self):
        if self.kind not in SPLIT_KINDS:
            raise SplitError(f"unknown split kind {self.kind!r}; expected one of {SPLIT_KINDS}")


def _uses_jump(example: Example) -> bool:
    return "jump" in example.command

def _uses_turn_left(example: Example) -> bool:
    cmd = example.command
    return any(a == "turn" and b == "left" for a, b in zip(cmd, cmd[1:]))


def make_split(examples: list[Example], spec: SplitSpec, rng: Rng) -> tuple[list[Example], list[Example]]:
    """Split the corpus; the held-out primitive stays in train in bare form only."""
    if spec.kind == "random":
        perm = rng.permutation(len(examples))
        cut = int(0.8 * len(examples))
        train = [examples[i] for i in perm[:cut]]
        test = [examples[i] for i in perm[cut:]]
        return train, test

    if spec.kind == "add_prim_jump":
        uses, primitive = _uses_jump, ("jump",)
    else:
        uses, primitive = _uses_turn_left, ("turn", "left")

    train = [e for e in examples if not uses(e)]
    held = [e for e in examples if uses(e)]
    prim = [e for e in held if e.command == primitive]
    if len(prim) != 1:
        raise SplitError(f"expected exactly one bare {primitive} command, found {len(prim)}")
    train.extend(prim)
    test = [e for e in held if e.command != primitive]
    return train, test
