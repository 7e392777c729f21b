"""Reading and writing the plain-text example format.

One example per line: `IN: <command words> OUT: <action symbols>`,
single spaces, newline-terminated.
"""

from __future__ import annotations

from pathlib import Path

from .grammar import Example


class DataFormatError(ValueError):
    """Malformed example line."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def format_example(example: Example) -> str:
    return f"IN: {' '.join(example.command)} OUT: {' '.join(example.actions)}"


def save(examples, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="ascii") as fh:
        for e in examples:
            fh.write(format_example(e) + "\n")


def load_official(path) -> list[Example]:
    """Parse a file of `IN: ... OUT: ...` lines into examples."""
    examples = []
    with Path(path).open("r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if not line.startswith("IN: ") or " OUT: " not in line:
                raise DataFormatError(f"expected 'IN: ... OUT: ...', got {line!r}", lineno)
            command_part, actions_part = line[len("IN: ") :].split(" OUT: ", 1)
            command = tuple(command_part.split())
            actions = tuple(actions_part.split())
            if not command or not actions:
                raise DataFormatError("empty command or action sequence", lineno)
            examples.append(Example(command, actions))
    return examples
