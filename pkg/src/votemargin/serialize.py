"""Line-oriented text serialization for hypothesis classes and samples.

Hypothesis class format: a header line ``domain <|X|>`` followed by one line
per hypothesis of space-separated ``+1``/``-1`` entries in domain order.
Sample format: one ``<point-index> <label>`` pair per line, indices referring
to domain order.  Round-trips are exact; loading reconstructs the domain as
the integer positions 0..|X|−1.
"""

from __future__ import annotations

import numpy as np

from .core import DiscreteDomain, HypothesisClass, LabeledSample

__all__ = [
    "dump_hypothesis_class",
    "load_hypothesis_class",
    "dump_sample",
    "load_sample",
]

_ENTRY = {1: "+1", -1: "-1"}


def dump_hypothesis_class(H: HypothesisClass) -> str:
    lines = [f"domain {len(H.domain)}"]
    for row in H.matrix:
        lines.append(" ".join(_ENTRY[int(v)] for v in row))
    return "\n".join(lines) + "\n"


def load_hypothesis_class(text: str) -> HypothesisClass:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty hypothesis-class text")
    header = lines[0].split()
    if len(header) != 2 or header[0] != "domain":
        raise ValueError(f"line 1: expected header 'domain <size>', got {lines[0]!r}")
    try:
        size = int(header[1])
    except ValueError:
        raise ValueError(f"line 1: domain size {header[1]!r} is not an integer") from None
    if size < 1:
        raise ValueError(f"line 1: domain size must be >= 1, got {size}")
    if len(lines) < 2:
        raise ValueError("hypothesis class must contain at least one hypothesis line")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        entries = line.split()
        if len(entries) != size:
            raise ValueError(
                f"line {lineno}: expected {size} entries, got {len(entries)}"
            )
        row = np.empty(size, dtype=np.int8)
        for k, e in enumerate(entries):
            if e == "+1":
                row[k] = 1
            elif e == "-1":
                row[k] = -1
            else:
                raise ValueError(f"line {lineno}: entry {e!r} is not '+1' or '-1'")
        rows.append(row)
    domain = DiscreteDomain(range(size))
    return HypothesisClass(domain, np.vstack(rows))


def dump_sample(S: LabeledSample, domain: DiscreteDomain) -> str:
    lines = []
    for point, label in S:
        lines.append(f"{domain.position(point)} {_ENTRY[label]}")
    return "\n".join(lines) + "\n"


def load_sample(text: str, domain: DiscreteDomain | None = None) -> LabeledSample:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty sample text")
    items = []
    for lineno, line in enumerate(lines, start=1):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(
                f"line {lineno}: expected 'point-index label', got {line!r}"
            )
        try:
            idx = int(parts[0])
        except ValueError:
            raise ValueError(
                f"line {lineno}: point index {parts[0]!r} is not an integer"
            ) from None
        if parts[1] == "+1":
            label = 1
        elif parts[1] == "-1":
            label = -1
        else:
            raise ValueError(f"line {lineno}: label {parts[1]!r} is not '+1' or '-1'")
        if domain is not None:
            if not 0 <= idx < len(domain):
                raise ValueError(f"line {lineno}: point index {idx} out of range")
            items.append((domain.points[idx], label))
        else:
            items.append((idx, label))
    return LabeledSample(items)
