"""Three-case comparison of learned and classical reconstructions.

Every method of a case is trained under the same budget on the case's
training pool, selected on its validation split and scored on the separate
test pool. Outputs per run directory::

    report.csv            method, case, ssim_mean, ssim_std, psnr_mean, psnr_std, seconds
    scores.csv            per-sample ssim and psnr
    panels/case-<c>.pgm   phantom followed by one reconstruction per method
    losses/<method>-<c>.csv
    checkpoints/<method>-<c>.patc
"""

import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from patkit.bench.dataset import Dataset, Split, make_dataset
from patkit.bench.metrics import psnr, ssim
from patkit.classical.variational import proximal_gradient_tv
from patkit.config.bench import BenchConfig, CaseSpec
from patkit.config.solver import VariationalConfig
from patkit.config.train import Architecture, resolve_architecture
from patkit.core.io import write_csv, write_pgm
from patkit.exceptions import ConfigError, TrainingError
from patkit.forward.matrix import ForwardMatrix
from patkit.learned.architectures import build_recon_net
from patkit.learned.storage import save_recon_net
from patkit.learned.training import PairSet, TrainLog, train_greedy, train_supervised
from patkit.tracer import annotate, stage, trace_case, trace_method

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ['method', 'case', 'ssim_mean', 'ssim_std', 'psnr_mean', 'psnr_std', 'seconds']
GREEDY_SUFFIX = "-greedy"
BASELINE = "pgd-tv"
PANEL_GAP = 2

# Reference means and standard deviations at full data scale.
REFERENCE_SCORES = pd.DataFrame(
    [
        ("fl", "i", 0.624, 0.181, 13.34, 3.54),
        ("unet", "i", 0.946, 0.042, 21.57, 5.85),
        ("lgd", "i", 0.983, 0.025, 28.76, 8.10),
        ("fl", "ii", 0.491, 0.182, 16.00, 2.19),
        ("unet", "ii", 0.570, 0.185, 16.56, 2.23),
        ("lgd", "ii", 0.679, 0.165, 18.28, 2.35),
        ("fl", "iii", 0.592, 0.170, 17.34, 3.95),
        ("unet", "iii", 0.902, 0.133, 23.22, 5.07),
        ("lgd", "iii", 0.949, 0.089, 28.04, 5.82),
    ],
    columns=['method', 'case', 'ssim_mean', 'ssim_std', 'psnr_mean', 'psnr_std'],
)

DEFAULT_BASELINE = VariationalConfig(alpha=1e-3, n_iter=100)


@dataclass
class MetricReport:
    """Per-sample scores and runtimes of every method of one or more cases."""

    scores: pd.DataFrame
    seconds: dict[tuple[str, str], float] = field(default_factory=dict)
    predictions: dict[tuple[str, str], np.ndarray] = field(default_factory=dict, repr=False)

    def summary(self) -> pd.DataFrame:
        grouped = self.scores.groupby(['method', 'case'], sort=False)
        frame = grouped.agg(
            ssim_mean=('ssim', 'mean'),
            ssim_std=('ssim', 'std'),
            psnr_mean=('psnr', 'mean'),
            psnr_std=('psnr', 'std'),
        ).reset_index()
        frame['seconds'] = [self.seconds.get((m, c), float('nan')) for m, c in zip(frame['method'], frame['case'])]
        return frame[REPORT_COLUMNS]

    def mean_ssim(self, method: str, case: str) -> float:
        rows = self.scores[(self.scores['method'] == method) & (self.scores['case'] == case)]
        return float(rows['ssim'].mean())

    def save(self, out_dir: str | os.PathLike) -> None:
        out_dir = Path(out_dir)
        write_csv(out_dir / 'report.csv', self.summary())
        write_csv(out_dir / 'scores.csv', self.scores)

    @classmethod
    def combine(cls, reports: list['MetricReport']) -> 'MetricReport':
        combined = cls(pd.concat([r.scores for r in reports], ignore_index=True))
        for report in reports:
            combined.seconds.update(report.seconds)
            combined.predictions.update(report.predictions)
        return combined


def score_predictions(method: str, case: str, predictions: np.ndarray, truths: np.ndarray) -> pd.DataFrame:
    rows = [
        {'method': method, 'case': case, 'sample': i, 'ssim': ssim(p, t), 'psnr': psnr(p, t)}
        for i, (p, t) in enumerate(zip(predictions, truths))
    ]
    return pd.DataFrame(rows, columns=['method', 'case', 'sample', 'ssim', 'psnr'])


def _baseline(A: ForwardMatrix, test: Dataset, solver: VariationalConfig) -> np.ndarray:
    return np.stack([proximal_gradient_tv(A, g, solver).data for g in test.g])


@trace_method(name_arg="method")
def run_method(method: str, case: str, A: ForwardMatrix, dataset: Dataset, bench: BenchConfig,
               solver: VariationalConfig | None = None, out_dir: Path | None = None) -> np.ndarray:
    """Train (when learned) and evaluate one method; returns its test-set reconstructions."""
    test = dataset.split(Split.Test)
    if method == BASELINE:
        return _baseline(A, test, solver or DEFAULT_BASELINE)

    greedy = method.endswith(GREEDY_SUFFIX)
    arch = resolve_architecture(method.removesuffix(GREEDY_SUFFIX))
    if greedy and arch != Architecture.LearnedGD:
        raise ConfigError(f"Greedy training applies to learned-gd only, got {method}")
    tcfg = bench.effective_train()
    net = build_recon_net(arch, bench.network, A.config, A)
    train = PairSet.from_dataset(dataset.split(Split.Train), net)
    val = PairSet.from_dataset(dataset.split(Split.Val), net)
    log = TrainLog()
    try:
        with stage("train", steps=tcfg.n_steps, greedy=greedy):
            (train_greedy if greedy else train_supervised)(net, train, tcfg, val if len(val) else None, log)
    except TrainingError as e:
        raise e.with_context(method=method, case=case) from e
    if out_dir is not None:
        log.save(out_dir / 'losses' / f'{method}-{case}.csv')
        save_recon_net(out_dir / 'checkpoints' / f'{method}-{case}.patc', net)
    losses = log.column('train_loss')
    if len(losses):
        annotate('final_train_loss', float(losses.iloc[-1]))
    with stage("evaluate", samples=len(test)):
        return net.predict(test.inputs(net.input_domain))


def write_panel(path: str | os.PathLike, phantom: np.ndarray, reconstructions: list[np.ndarray]) -> None:
    """Phantom followed by the reconstructions, side by side on a shared [0, 1] scale."""
    m = phantom.shape[0]
    gap = np.ones((m, PANEL_GAP))
    tiles = [phantom]
    for image in reconstructions:
        tiles += [gap, image]
    write_pgm(path, np.hstack(tiles), 0.0, 1.0)


@trace_case(name_arg="spec", label=lambda spec: f"case-{spec.case}")
def run_case(spec: CaseSpec, A: ForwardMatrix, bench: BenchConfig | None = None,
             out_dir: str | os.PathLike | None = None, solver: VariationalConfig | None = None,
             dataset: Dataset | None = None) -> MetricReport:
    """Train every configured method on the case and score it on the test pool."""
    bench = bench or BenchConfig()
    out = Path(out_dir) if out_dir is not None else None
    if dataset is None:
        with stage("simulate"):
            dataset = make_dataset(spec, A, bench)
    test = dataset.split(Split.Test)
    if len(test) == 0:
        raise ConfigError(f"Case {spec.case} has no test samples")

    seconds, predictions, frames = {}, {}, []
    for method in bench.methods:
        start = time.perf_counter()
        key = (method, spec.case)
        predictions[key] = run_method(method, spec.case, A, dataset, bench, solver, out)
        seconds[key] = time.perf_counter() - start
        frames.append(score_predictions(method, spec.case, predictions[key], test.f))
        logger.info("Case %s, %s: mean SSIM %.3f, mean PSNR %.2f", spec.case, method,
                    frames[-1]['ssim'].mean(), frames[-1]['psnr'].mean())
    report = MetricReport(pd.concat(frames, ignore_index=True), seconds, predictions)
    annotate('summary', report.summary().to_dict(orient='records'))

    if out is not None:
        index = min(bench.panel_index, len(test) - 1)
        write_panel(out / 'panels' / f'case-{spec.case}.pgm', test.f[index],
                    [report.predictions[(m, spec.case)][index] for m in bench.methods])
        report.save(out)
    return report


def run_cases(cases: list[str], A: ForwardMatrix, bench: BenchConfig | None = None,
              out_dir: str | os.PathLike | None = None, solver: VariationalConfig | None = None,
              seed: int = 7, noise_level: float = 0.01) -> MetricReport:
    """Run several cases into one report; each case writes to its own sub-directory."""
    bench = bench or BenchConfig()
    reports = []
    for case in cases:
        spec = CaseSpec.standard(case, full_scale=bench.full_scale, seed=seed, noise_level=noise_level)
        case_dir = Path(out_dir) / f'case-{case}' if out_dir is not None else None
        reports.append(run_case(spec, A, bench, case_dir, solver))
    report = MetricReport.combine(reports)
    if out_dir is not None:
        report.save(out_dir)
    return report
