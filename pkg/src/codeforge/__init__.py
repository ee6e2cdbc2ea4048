"""codeforge: design, decode and evaluate short binary linear block codes.

Subpackages cover exact GF(2) algebra, Tanner-graph analysis, an AWGN
BER harness, reference decoders (belief propagation, exhaustive ML), a
small self-contained neural kernel, an edge-weighted message-passing
decoder, a reinforcement-learning matrix designer, and the iterative
code/decoder co-training loop that ties the last two together.
"""

__version__ = "0.1.0"
