"""BPSK over AWGN: modulation, noise, LLRs, and the Monte-Carlo BER harness.

SNR convention: SNR = 1/sigma^2 with no rate normalization, so
sigma^2 = 10^(-snr_db/10).  LLR sequences are plain float64 arrays
(natural log, 2y/sigma^2 for BPSK/AWGN).

Randomness is keyed by (master seed, block index) through a splittable
generator, in fixed-size frame blocks: serial and parallel runs visit
identical noise realizations, and a run is bit-identical given the seed.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DecoderFailure
from .gf2 import SystematicPair, encode

#: frames per simulation block; fixed so worker count cannot affect results
BLOCK_FRAMES = 2048


@dataclass(frozen=True)
class SnrPoint:
    """One operating point; sigma2 is derived from snr_db on construction."""

    snr_db: float

    @property
    def sigma2(self) -> float:
        return 10.0 ** (-self.snr_db / 10.0)

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.sigma2))


@dataclass(frozen=True)
class StopRule:
    """Stop after min_errors bit errors, or max_frames frames, whichever first."""

    min_errors: int = 10_000
    max_frames: int = 100_000_000

    def validate(self) -> None:
        problems = []
        if self.min_errors < 1:
            problems.append(f"min_errors must be >= 1, got {self.min_errors}")
        if self.max_frames < 1:
            problems.append(f"max_frames must be >= 1, got {self.max_frames}")
        if problems:
            raise ConfigError(problems)


@dataclass(frozen=True)
class BerEstimate:
    """Outcome of one Monte-Carlo run at a single SNR point."""

    bit_errors: int
    bits_simulated: int
    frames: int
    snr_db: float
    decoder: str
    code_id: str
    seed: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_simulated

    @property
    def std_error(self) -> float:
        """Standard error of the BER estimate (binomial approximation)."""
        p = self.ber
        return float(np.sqrt(max(p * (1.0 - p), 0.0) / self.bits_simulated))

    def csv_row(self) -> str:
        return (
            f"{self.snr_db:g},{self.frames},{self.bit_errors},"
            f"{self.bits_simulated},{self.ber:.8e},{self.decoder},{self.code_id},{self.seed}"
        )


CSV_HEADER = "snr_db,frames,bit_errors,bits,ber,decoder,code,seed"


def modulate(c: np.ndarray) -> np.ndarray:
    """BPSK map x = 1 - 2c; bit 0 -> +1, bit 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(c, dtype=np.float64)


def transmit(x: np.ndarray, snr: SnrPoint, rng: np.random.Generator) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise of variance snr.sigma2."""
    return x + snr.sigma * rng.standard_normal(x.shape)


def llr(y: np.ndarray, snr: SnrPoint) -> np.ndarray:
    """Channel LLRs for BPSK/AWGN: 2 y / sigma^2."""
    return 2.0 * np.asarray(y, dtype=np.float64) / snr.sigma2


def block_rng(master_seed: int, block_index: int) -> np.random.Generator:
    """Deterministic per-block generator keyed by (master seed, block index)."""
    return np.random.default_rng((int(master_seed), int(block_index)))


def _simulate_block(code: SystematicPair, decoder, snr: SnrPoint, seed: int,
                    block: int, frames: int) -> tuple[int, int]:
    """One block: draw messages + noise, decode, count message-bit errors."""
    k, n = code.k, code.n
    rng = block_rng(seed, block)
    msgs = rng.integers(0, 2, size=(frames, k), dtype=np.uint8)
    noise = rng.standard_normal((frames, n))
    cw = encode(code.g_std, msgs)
    y = modulate(cw) + snr.sigma * noise
    llrs = 2.0 * y / snr.sigma2
    try:
        decided = decoder.decode_block(llrs)
    except Exception as exc:  # propagate with reproduction info
        raise DecoderFailure(
            f"decoder {getattr(decoder, 'decoder_id', decoder)!r} failed on block {block} "
            f"(seed {seed}): {exc}",
            seed=seed,
            block=block,
        ) from exc
    errors = int((decided[:, :k] != msgs).sum())
    return errors, frames * k


def estimate_ber(code: SystematicPair, decoder, snr: SnrPoint, stop: StopRule,
                 seed: int, workers: int = 1, code_id: str = "code") -> BerEstimate:
    """Monte-Carlo BER of (code, decoder) at one SNR point.

    Frames are simulated in fixed blocks of BLOCK_FRAMES; the run stops at
    the first block boundary where the error budget is met, or when
    max_frames is exhausted.  Errors are counted on the k message bits
    (the first k codeword bits, since the generator is systematic).
    Results are independent of ``workers``.
    """
    stop.validate()

    plan = []
    remaining = stop.max_frames
    b = 0
    while remaining > 0:
        take = min(BLOCK_FRAMES, remaining)
        plan.append((b, take))
        remaining -= take
        b += 1

    total_err = 0
    total_bits = 0
    total_frames = 0

    def consume(block_frames: int, result: tuple[int, int]) -> bool:
        nonlocal total_err, total_bits, total_frames
        err, bits = result
        total_err += err
        total_bits += bits
        total_frames += block_frames
        return total_err >= stop.min_errors

    if workers <= 1:
        for b, take in plan:
            if consume(take, _simulate_block(code, decoder, snr, seed, b, take)):
                break
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pending = []
            it = iter(plan)
            done = False
            while not done:
                while len(pending) < 2 * workers:
                    nxt = next(it, None)
                    if nxt is None:
                        break
                    bidx, take = nxt
                    pending.append((take, pool.submit(
                        _simulate_block, code, decoder, snr, seed, bidx, take)))
                if not pending:
                    break
                take, fut = pending.pop(0)
                done = consume(take, fut.result())
            for take, fut in pending:
                fut.cancel()

    return BerEstimate(
        bit_errors=total_err,
        bits_simulated=total_bits,
        frames=total_frames,
        snr_db=snr.snr_db,
        decoder=getattr(decoder, "decoder_id", "decoder"),
        code_id=code_id,
        seed=seed,
    )
