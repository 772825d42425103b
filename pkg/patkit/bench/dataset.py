"""Simulated training and test sets.

A dataset directory holds ``g.patt`` (N, n_det, n_t), ``f0.patt`` and
``f.patt`` (N, m, m), ``samples.csv`` with one row per sample and
``meta.yaml`` with the geometry fingerprint and noise level.
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from patkit.config.bench import BenchConfig, CaseSpec
from patkit.core.io import read_tensor, write_csv, write_pgm, write_tensor
from patkit.core.rng import RngStream
from patkit.exceptions import DatasetError, GeometryError
from patkit.forward.matrix import ForwardMatrix, to_sensor_data
from patkit.forward.noise import add_noise
from patkit.bench.phantoms import phantom_source

logger = logging.getLogger(__name__)


class Split:
    Train = "train"
    Val = "val"
    Holdout = "holdout"
    Test = "test"


TRAIN_FRACTION = 0.8
VAL_FRACTION = 0.1
_POOL_KEYS = {"train": 0, "test": 1}


@dataclass
class Dataset:
    g: np.ndarray
    f0: np.ndarray
    f: np.ndarray
    samples: pd.DataFrame
    fingerprint: str | None = None
    noise_level: float = 0.0

    def __post_init__(self):
        n = len(self.samples)
        if not (len(self.g) == len(self.f0) == len(self.f) == n):
            raise DatasetError(
                f"Inconsistent dataset sizes: g {len(self.g)}, f0 {len(self.f0)}, f {len(self.f)}, rows {n}"
            )

    def __len__(self) -> int:
        return len(self.samples)

    def split(self, name: str) -> 'Dataset':
        mask = (self.samples['split'] == name).to_numpy()
        return Dataset(self.g[mask], self.f0[mask], self.f[mask],
                       self.samples[mask].reset_index(drop=True), self.fingerprint, self.noise_level)

    def inputs(self, domain: str) -> np.ndarray:
        """Network inputs: sensor data for the data domain, f0 for the image domain."""
        return self.g if domain == "data" else self.f0


def _split_labels(n: int) -> list[str]:
    n_val = int(round(VAL_FRACTION * n))
    n_holdout = int(round((1 - TRAIN_FRACTION - VAL_FRACTION) * n))
    n_train = n - n_val - n_holdout
    return [Split.Train] * n_train + [Split.Val] * n_val + [Split.Holdout] * n_holdout


def _simulate_pool(A: ForwardMatrix, families: tuple[str, ...], n: int, pool: str,
                   spec: CaseSpec, bench: BenchConfig) -> Dataset:
    base = RngStream(spec.seed).child(_POOL_KEYS[pool] << 32)
    sources = {kind: phantom_source(bench.family(kind), A.m, bench.image_dirs.get(kind)) for kind in families}
    f = np.empty((n, A.m, A.m))
    g = np.empty((n,) + A.data_shape)
    rows = []
    for i in range(n):
        kind = families[i % len(families)]
        stream = 2 * i
        f[i] = sources[kind](base.child(stream)).data
        clean = to_sensor_data(A, A.entries @ f[i].reshape(-1))
        g[i] = add_noise(clean, spec.noise_level, base.child(stream + 1)).data
        rows.append({'index': i, 'family': kind, 'seed': base.seed ^ stream})
    f0 = A.adjoint_batch(g.reshape(n, -1)).reshape(n, A.m, A.m)
    samples = pd.DataFrame(rows)
    samples.insert(1, 'split', _split_labels(n) if pool == "train" else [Split.Test] * n)
    return Dataset(g, f0, f, samples, A.fingerprint, spec.noise_level)


def make_dataset(spec: CaseSpec, A: ForwardMatrix, bench: BenchConfig | None = None) -> Dataset:
    """Training pool (train / val / holdout) and a separately drawn test pool."""
    bench = bench or BenchConfig()
    train = _simulate_pool(A, tuple(spec.train_families), spec.n_train, "train", spec, bench)
    test = _simulate_pool(A, tuple(spec.test_families), spec.n_test, "test", spec, bench)
    test.samples['index'] += len(train)
    logger.info("Simulated case %s: %d training-pool and %d test samples", spec.case, len(train), len(test))
    return concat([train, test])


def concat(parts: list[Dataset]) -> Dataset:
    fingerprints = {p.fingerprint for p in parts}
    if len(fingerprints) > 1:
        raise GeometryError(*sorted(str(fp) for fp in fingerprints)[:2])
    return Dataset(
        np.concatenate([p.g for p in parts]),
        np.concatenate([p.f0 for p in parts]),
        np.concatenate([p.f for p in parts]),
        pd.concat([p.samples for p in parts], ignore_index=True),
        parts[0].fingerprint,
        parts[0].noise_level,
    )


def save_dataset(dataset: Dataset, directory: str | os.PathLike, previews: int = 0) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_tensor(directory / 'g.patt', dataset.g)
    write_tensor(directory / 'f0.patt', dataset.f0)
    write_tensor(directory / 'f.patt', dataset.f)
    write_csv(directory / 'samples.csv', dataset.samples)
    meta = {'fingerprint': dataset.fingerprint, 'noise_level': dataset.noise_level, 'count': len(dataset)}
    (directory / 'meta.yaml').write_text(yaml.safe_dump(meta, sort_keys=True), encoding='utf-8')
    for i in range(min(previews, len(dataset))):
        write_pgm(directory / 'preview' / f'{i:04d}_f.pgm', dataset.f[i], 0.0, 1.0)
        write_pgm(directory / 'preview' / f'{i:04d}_f0.pgm', dataset.f0[i])
    logger.info("Saved %d samples to %s", len(dataset), directory)


def load_dataset(directory: str | os.PathLike, A: ForwardMatrix | None = None) -> Dataset:
    directory = Path(directory)
    missing = [name for name in ('g.patt', 'f0.patt', 'f.patt', 'samples.csv') if not (directory / name).exists()]
    if missing:
        raise DatasetError(f"Dataset directory {directory} is missing {', '.join(missing)}")
    meta = {}
    if (directory / 'meta.yaml').exists():
        meta = yaml.safe_load((directory / 'meta.yaml').read_text(encoding='utf-8')) or {}
    dataset = Dataset(
        read_tensor(directory / 'g.patt'),
        read_tensor(directory / 'f0.patt'),
        read_tensor(directory / 'f.patt'),
        pd.read_csv(directory / 'samples.csv'),
        meta.get('fingerprint'),
        float(meta.get('noise_level', 0.0)),
    )
    if A is not None and dataset.fingerprint is not None and dataset.fingerprint != A.fingerprint:
        raise GeometryError(A.fingerprint, dataset.fingerprint)
    return dataset
