"""Bundled example parity-check matrices in alist form.

Available codes:

* ``hamming_7_4``: the (7, 4) Hamming code, distance 3.
* ``ldpc_32_16``: a (4, 8)-regular (32, 16) LDPC with distance 4,
  178 4-cycles, 2090 6-cycles and density 0.250; generated by a seeded
  search (scripts/generate_fixtures.py) and frozen here.
* ``ldpc_128_64``: a (4, 8)-regular (128, 64) LDPC, full rank, same
  generator script.
* ``repetition_3``: the length-3 repetition code.
"""

from __future__ import annotations

from importlib import resources

from ..alist import parse_alist
from ..gf2 import BitMatrix

NAMES = ("hamming_7_4", "ldpc_32_16", "ldpc_128_64", "repetition_3")


def load(name: str) -> BitMatrix:
    """Load a bundled matrix by name (see NAMES)."""
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {NAMES}")
    text = resources.files(__package__).joinpath(f"{name}.alist").read_text()
    return parse_alist(text)
