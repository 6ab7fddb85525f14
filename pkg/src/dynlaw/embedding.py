"""Delay embedding of scalar time series.

A window of order ``n`` collects the current sample together with its
``n`` predecessors at a fixed lag, most recent value first::

    Y[k, i] = y(t_k - i * stride)        i = 0 .. n

with the window anchors ``t_k`` sliding densely at the lag spacing.
The row matrix ``Y`` is the raw material for every law extraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidMask, SeriesTooShort

__all__ = ["TimeSeries", "EmbeddingConfig", "EmbeddedDataset", "embed"]


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real-valued signal.

    ``samples`` may be empty (a zero-length recording is a legal
    container, e.g. when round-tripping empty audio); operations that
    need data reject it with :class:`SeriesTooShort` themselves.
    """

    samples: np.ndarray
    sample_rate: float = 1.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", arr)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        if not (self.sample_rate > 0):
            raise ValueError("sample_rate must be positive")

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class EmbeddingConfig:
    """Window geometry: order ``n``, lag ``stride`` (in samples), first
    usable sample index ``start_offset``, and a 0/1 lag mask of length
    ``n + 1`` whose zeros force the matching window column to zero."""

    n: int
    stride: int = 1
    start_offset: int = 0
    mask: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("order n must be >= 1")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.start_offset < 0:
            raise ValueError("start_offset must be >= 0")
        mask = tuple(int(b) for b in self.mask) if self.mask else (1,) * (self.n + 1)
        object.__setattr__(self, "mask", mask)
        if len(mask) != self.n + 1 or any(b not in (0, 1) for b in mask):
            raise InvalidMask("mask must hold n + 1 bits in {0, 1}")
        if mask[0] != 1:
            raise InvalidMask("mask[0] must stay active: column 0 is the current sample")
        if sum(mask) < 2:
            raise InvalidMask("a law needs at least two active lags")


@dataclass(frozen=True)
class EmbeddedDataset:
    """Window rows plus the geometry that produced them."""

    rows: np.ndarray
    config: EmbeddingConfig
    sample_rate: float = 1.0

    @property
    def window_count(self) -> int:
        return int(self.rows.shape[0])


def embed(series: TimeSeries, config: EmbeddingConfig) -> EmbeddedDataset:
    """Slide a delay window over the series and stack the rows.

    Parameters
    ----------
    series : TimeSeries
        Input signal; must hold at least ``start_offset + stride*n + 1``
        samples so one complete window fits.
    config : EmbeddingConfig
        Window geometry and lag mask.

    Returns
    -------
    EmbeddedDataset
        Row matrix of shape ``(K, n + 1)`` with
        ``rows[k, i] = samples[start_offset + stride*(n + k) - stride*i]``
        and ``K = (len(series) - 1 - start_offset - stride*n)//stride + 1``.
        Masked columns are zeroed.

    Raises
    ------
    SeriesTooShort
        If not even one window fits.
    """
    y = series.samples
    n, s, off = config.n, config.stride, config.start_offset
    need = off + s * n + 1
    if len(y) < need:
        raise SeriesTooShort(
            f"need {need} samples for one window (n={n}, stride={s}, "
            f"start_offset={off}), got {len(y)}"
        )
    count = (len(y) - 1 - off - s * n) // s + 1
    anchors = off + s * (n + np.arange(count))
    idx = anchors[:, None] - s * np.arange(n + 1)[None, :]
    rows = y[idx] * np.asarray(config.mask, dtype=np.float64)
    return EmbeddedDataset(rows=rows, config=config, sample_rate=series.sample_rate)
