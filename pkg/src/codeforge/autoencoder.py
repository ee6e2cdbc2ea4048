"""Iterative co-training of the matrix designer and the trained decoder.

Round 1 runs the designer with a BER reward measured by plain BP and
then fits the edge-weighted decoder to the winning matrix.  Every later
round scores candidate matrices with the previous round's trained
decoder, re-designs, and fine-tunes the decoder on the new matrix
(warm start, reduced epoch budget).  The two trainers are never merged
into one optimization; they simply alternate.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import ewgnn, nn, tanner
from .alist import save_alist
from .decoders import BpDecoder
from .designer import DesignerConfig, RewardConfig, ddpg_train, LOG_HEADER
from .errors import ConfigError, Divergence, RankDeficient
from .gf2 import BitMatrix, rank
from .tanner import CodeProperties, code_properties

#: BP iteration count used for the round-1 reward decoder
REWARD_BP_ITERS = 8

SUMMARY_HEADER = "iteration,mhd,cycles4,cycles6,girth,density,best_reward"


@dataclass
class IterationResult:
    """Artifacts of one designer/decoder round."""

    index: int
    h_star: BitMatrix
    decoder_params: nn.MlpParams
    reward: float
    properties: CodeProperties


@dataclass
class AutoencoderRun:
    iterations: list[IterationResult]
    tau: int

    @property
    def final(self) -> IterationResult:
        return self.iterations[-1]


def run(init_h: BitMatrix, tau: int, designer_cfg: DesignerConfig,
        ewgnn_cfg: ewgnn.EwgnnConfig, seed: int, out_dir: str | Path | None = None,
        fine_tune_divisor: int = 10, cold_start: bool = False,
        reward_cfg: RewardConfig | None = None) -> AutoencoderRun:
    """Alternate designer and decoder training for ``tau`` rounds.

    Each round i >= 2 initializes the designer state from round i-1's
    best matrix and scores candidates with the round i-1 decoder; the
    decoder is warm-started from the previous checkpoint with the epoch
    budget divided by ``fine_tune_divisor`` (unless ``cold_start``).

    When ``out_dir`` is given, every round writes a subdirectory with the
    matrix (alist), decoder checkpoint, manifest, designer log, plus a
    run-level summary CSV of code properties.

    Raises:
        ConfigError: tau < 1.
        RankDeficient: init_h does not have full row rank.
        Divergence: propagated from either trainer, tagged with the round.
    """
    if tau < 1:
        raise ConfigError([f"tau must be >= 1, got {tau}"])
    if rank(init_h) < init_h.rows:
        raise RankDeficient("initial matrix must have full row rank")
    ewgnn_cfg.validate()
    if reward_cfg is None:
        reward_cfg = RewardConfig(mode="decoding_ber")

    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    iterations: list[IterationResult] = []
    state = init_h
    prev_params: nn.MlpParams | None = None

    for i in range(1, tau + 1):
        if prev_params is None:
            factory = lambda graph: BpDecoder(graph, t_max=REWARD_BP_ITERS)
        else:
            frozen = prev_params.copy()
            factory = lambda graph, p=frozen: ewgnn.EwgnnDecoder(
                graph, p, t_iters=ewgnn_cfg.t_train, alpha=ewgnn_cfg.clip_alpha)
        round_reward = dataclasses.replace(reward_cfg, mode="decoding_ber",
                                           decoder_factory=factory)

        try:
            design = ddpg_train(state, designer_cfg, round_reward, seed=(seed * 1000 + i))
        except Divergence as exc:
            raise Divergence(f"designer diverged in round {i}: {exc}",
                             seed=seed, where=i) from exc
        h_star = design.best_matrix
        pair_graph = tanner.build_graph(h_star)

        cfg_i = ewgnn_cfg
        init_params = None
        if prev_params is not None and not cold_start:
            init_params = prev_params
            cfg_i = dataclasses.replace(
                ewgnn_cfg, epochs=max(1, ewgnn_cfg.epochs // fine_tune_divisor))
        from .gf2 import to_systematic
        pair = to_systematic(h_star)
        try:
            trained = ewgnn.train(pair, cfg_i, seed=(seed * 1000 + 500 + i),
                                  init_params=init_params)
        except Divergence as exc:
            raise Divergence(f"decoder training diverged in round {i}: {exc}",
                             seed=seed, where=i) from exc

        props = code_properties(h_star)
        result = IterationResult(index=i, h_star=h_star,
                                 decoder_params=trained.params,
                                 reward=design.best_reward, properties=props)
        iterations.append(result)
        if out is not None:
            _write_round(out, result, design, trained, ewgnn_cfg, seed)

        state = h_star
        prev_params = trained.params

    run_result = AutoencoderRun(iterations=iterations, tau=tau)
    if out is not None:
        _write_summary(out, run_result)
    return run_result


def _write_round(out: Path, result: IterationResult, design, trained,
                 ewgnn_cfg: ewgnn.EwgnnConfig, seed: int) -> None:
    d = out / f"iteration_{result.index:02d}"
    d.mkdir(exist_ok=True)
    save_alist(d / "h_star.alist", result.h_star)
    ewgnn.save_decoder(d / "decoder.ckpt", result.decoder_params, meta={
        "alpha": ewgnn_cfg.clip_alpha,
        "t_train": ewgnn_cfg.t_train,
        "snr_db_range": list(ewgnn_cfg.snr_db_range),
        "code": f"h_star_iter{result.index}",
        "seed": seed,
        "best_epoch": trained.best_epoch,
        "lr_schedule": [[e, lr] for e, lr in trained.lr_schedule],
    })
    with open(d / "designer_log.csv", "w") as fh:
        fh.write(LOG_HEADER + "\n")
        for row in design.log:
            fh.write(row.csv_row() + "\n")
    with open(d / "manifest.json", "w") as fh:
        json.dump({
            "iteration": result.index,
            "reward": result.reward,
            "seed": seed,
            "properties": dataclasses.asdict(result.properties),
        }, fh, indent=2, default=float)
        fh.write("\n")


def _write_summary(out: Path, run_result: AutoencoderRun) -> None:
    with open(out / "summary.csv", "w") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for it in run_result.iterations:
            p = it.properties
            girth_txt = "inf" if np.isinf(p.girth) else str(int(p.girth))
            fh.write(f"{it.index},{p.mhd},{p.cycles4},{p.cycles6},{girth_txt},"
                     f"{p.density:.6f},{it.reward:.8g}\n")
