"""Reader/writer for the alist sparse parity-check matrix format.

Layout: line 1 is "n m"; line 2 the maximum column/row degrees; lines 3
and 4 the per-column and per-row degrees; then n lines of 1-indexed check
positions per column and m lines of variable positions per row.  Position
lists are padded with zeros up to the maximum degree on write; zero
entries are ignored on parse.  write -> parse is the identity.
"""

from __future__ import annotations

import numpy as np

from .errors import DegreeMismatch, MalformedAlist
from .gf2 import BitMatrix


def _int_fields(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise MalformedAlist(f"non-integer token in {line!r}", line=lineno) from None


def parse_alist(text: str) -> BitMatrix:
    """Parse alist text into a dense binary matrix.

    Raises:
        MalformedAlist: structural problems, with the offending line.
        DegreeMismatch: degree lines that contradict the position lists.
    """
    lines = [ln for ln in text.splitlines()]
    if len(lines) < 4:
        raise MalformedAlist("need at least 4 header lines", line=len(lines))
    head = _int_fields(lines[0], 1)
    if len(head) != 2:
        raise MalformedAlist(f"expected 'n m', got {lines[0]!r}", line=1)
    n, m = head
    if n < 1 or m < 1:
        raise MalformedAlist(f"non-positive dimensions {n}x{m}", line=1)
    maxdeg = _int_fields(lines[1], 2)
    if len(maxdeg) != 2:
        raise MalformedAlist("expected max column and row degree", line=2)
    col_deg = _int_fields(lines[2], 3)
    row_deg = _int_fields(lines[3], 4)
    if len(col_deg) != n:
        raise DegreeMismatch(f"{len(col_deg)} column degrees for n={n}", line=3)
    if len(row_deg) != m:
        raise DegreeMismatch(f"{len(row_deg)} row degrees for m={m}", line=4)
    if max(col_deg, default=0) != maxdeg[0] or max(row_deg, default=0) != maxdeg[1]:
        raise DegreeMismatch("max degree line disagrees with degree lists", line=2)
    if len(lines) < 4 + n + m:
        raise MalformedAlist(f"expected {4 + n + m} lines, got {len(lines)}", line=len(lines))

    h = np.zeros((m, n), dtype=np.uint8)
    for col in range(n):
        lineno = 5 + col
        entries = [e for e in _int_fields(lines[4 + col], lineno) if e != 0]
        if len(entries) != col_deg[col]:
            raise DegreeMismatch(
                f"column {col + 1} lists {len(entries)} checks, degree says {col_deg[col]}",
                line=lineno)
        for e in entries:
            if not 1 <= e <= m:
                raise MalformedAlist(f"check index {e} out of range 1..{m}", line=lineno)
            h[e - 1, col] = 1
    for row in range(m):
        lineno = 5 + n + row
        entries = [e for e in _int_fields(lines[4 + n + row], lineno) if e != 0]
        if sorted(entries) != [i + 1 for i in range(n) if h[row, i]]:
            raise DegreeMismatch(
                f"row {row + 1} positions disagree with the column lists", line=lineno)
    return BitMatrix(h)


def write_alist(h: BitMatrix) -> str:
    """Serialize a binary matrix as alist text (zero-padded position lists)."""
    m, n = h.shape
    a = h.a
    col_deg = a.sum(axis=0)
    row_deg = a.sum(axis=1)
    cmax = int(col_deg.max())
    rmax = int(row_deg.max())
    lines = [f"{n} {m}", f"{cmax} {rmax}"]
    lines.append(" ".join(str(int(d)) for d in col_deg))
    lines.append(" ".join(str(int(d)) for d in row_deg))
    for col in range(n):
        pos = [str(r + 1) for r in np.nonzero(a[:, col])[0]]
        pos += ["0"] * (cmax - len(pos))
        lines.append(" ".join(pos))
    for row in range(m):
        pos = [str(c + 1) for c in np.nonzero(a[row])[0]]
        pos += ["0"] * (rmax - len(pos))
        lines.append(" ".join(pos))
    return "\n".join(lines) + "\n"


def load_alist(path) -> BitMatrix:
    with open(path) as fh:
        return parse_alist(fh.read())


def save_alist(path, h: BitMatrix) -> None:
    with open(path, "w") as fh:
        fh.write(write_alist(h))
