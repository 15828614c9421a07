"""IF-OFDM modem for the ARoF signals: Gray QAM, real IF waveform synthesis,
ideal-timing demodulation with training-based one-tap equalization, and EVM."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .signal import SampledSignal, resample

__all__ = [
    "OfdmConfig",
    "OfdmFrame",
    "EvmReport",
    "NyquistError",
    "qam_constellation",
    "qam_map",
    "qam_demap",
    "modulate",
    "demodulate",
    "compute_evm",
    "SUPPORTED_QAM",
    "DEFAULT_SC_SPACING",
    "EVM_LIMIT_64QAM",
]

SUPPORTED_QAM = (4, 16, 64)
DEFAULT_SC_SPACING = 1.5625e6
EVM_LIMIT_64QAM = 8.0
# smallest EVM (percent) reported; exact matches fall below it
EVM_FLOOR = 1e-9


class NyquistError(ValueError):
    """The IF band does not fit below half the waveform sample rate."""


def _bits_per_axis(order: int) -> int:
    if order not in SUPPORTED_QAM:
        raise ValueError(f"unsupported QAM order {order}; use one of {SUPPORTED_QAM}")
    return int(np.log2(order)) // 2


def qam_constellation(order: int) -> np.ndarray:
    """All ``order`` points, indexed by the integer formed from the symbol's bits
    (MSB first), with unit average power."""
    k = _bits_per_axis(order)
    idx = np.arange(order)
    bits = (idx[:, None] >> np.arange(2 * k - 1, -1, -1)) & 1
    return qam_map(bits.ravel(), order)


def _axis_levels(bits: np.ndarray, k: int) -> np.ndarray:
    # bits (n, k) MSB first, read as a Gray word; decode to its binary rank
    word = np.zeros(bits.shape[0], dtype=np.int64)
    for j in range(k):
        word = (word << 1) | bits[:, j]
    rank = word.copy()
    shift = word >> 1
    while np.any(shift):
        rank ^= shift
        shift >>= 1
    # rank 0 (all-zero bits) maps to the most positive level
    return (2 ** k - 1) - 2 * rank


def qam_map(bits, order: int) -> np.ndarray:
    """Gray-mapped square QAM with unit average power.

    Each symbol takes ``log2(order)`` bits: the first half selects the in-phase
    level and the second half the quadrature level, each as a Gray word where
    all-zero bits give the most positive level. For QPSK, bits ``00`` map to
    ``(1 + 1j) / sqrt(2)``.
    """
    k = _bits_per_axis(order)
    b = np.asarray(bits, dtype=np.int64).ravel()
    if b.size % (2 * k):
        raise ValueError(f"bit count {b.size} is not a multiple of {2 * k}")
    b = b.reshape(-1, 2 * k)
    i = _axis_levels(b[:, :k], k)
    q = _axis_levels(b[:, k:], k)
    norm = np.sqrt(2.0 * (order - 1) / 3.0)
    return (i + 1j * q) / norm


def qam_demap(symbols, order: int) -> np.ndarray:
    """Hard-decision inverse of :func:`qam_map`."""
    k = _bits_per_axis(order)
    m = 2 ** k
    norm = np.sqrt(2.0 * (order - 1) / 3.0)
    s = np.asarray(symbols).ravel() * norm

    def axis_bits(v):
        rank = np.clip(np.round(((m - 1) - v) / 2.0), 0, m - 1).astype(np.int64)
        word = rank ^ (rank >> 1)
        return (word[:, None] >> np.arange(k - 1, -1, -1)) & 1

    return np.hstack([axis_bits(s.real), axis_bits(s.imag)]).ravel()


@dataclass(frozen=True)
class OfdmConfig:
    """OFDM numerology for one IF-OFDM ARoF signal.

    ``fft_size`` is the transform length at the waveform sample rate, which is
    therefore ``fft_size * sc_spacing``; the IF itself must sit on a subcarrier
    bin. Data occupies ``n_data_sc`` bins centered on the IF, with the IF bin
    left empty.
    """

    fft_size: int = 4096
    n_data_sc: int = 128
    sc_spacing: float = DEFAULT_SC_SPACING
    cp_fraction: float = 1 / 16
    qam_order: int = 64
    if_freq: float = 2e9
    n_symbols: int = 16
    n_training_symbols: int = 4
    seed: int = 0

    def __post_init__(self):
        _bits_per_axis(self.qam_order)
        if self.n_data_sc < 2 or self.n_data_sc % 2:
            raise ValueError("n_data_sc must be an even count >= 2")
        if self.n_data_sc > self.fft_size - 1:
            raise ValueError("n_data_sc must leave the DC bin empty")
        if self.if_freq - self.bandwidth / 2 <= 0:
            raise ValueError("IF band folds over 0 Hz")
        if_bin = self.if_freq / self.sc_spacing
        if abs(if_bin - round(if_bin)) > 1e-9:
            raise ValueError("if_freq must be a whole number of subcarrier spacings")
        cp = self.fft_size * self.cp_fraction
        if abs(cp - round(cp)) > 1e-9:
            raise ValueError("fft_size * cp_fraction must be an integer")
        if self.n_symbols < 1 or self.n_training_symbols < 1:
            raise ValueError("need at least one data and one training symbol")
        if self.if_freq + self.bandwidth / 2 >= self.sample_rate / 2:
            raise NyquistError(
                f"IF band edge {(self.if_freq + self.bandwidth / 2) / 1e9:g} GHz exceeds "
                f"Nyquist {self.sample_rate / 2e9:g} GHz")

    @classmethod
    def for_bandwidth(cls, bandwidth: float, sample_rate: float, **kw) -> "OfdmConfig":
        """Numerology for a target bandwidth at a given waveform rate."""
        spacing = kw.pop("sc_spacing", DEFAULT_SC_SPACING)
        n = bandwidth / spacing
        fft = sample_rate / spacing
        if abs(n - round(n)) > 1e-9 or abs(fft - round(fft)) > 1e-9:
            raise ValueError("bandwidth and sample_rate must be multiples of sc_spacing")
        return cls(fft_size=int(round(fft)), n_data_sc=int(round(n)), sc_spacing=spacing, **kw)

    @property
    def sample_rate(self) -> float:
        return self.fft_size * self.sc_spacing

    @property
    def bandwidth(self) -> float:
        return self.n_data_sc * self.sc_spacing

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.qam_order))

    @property
    def raw_bit_rate(self) -> float:
        return self.n_data_sc * self.sc_spacing * self.bits_per_symbol

    @property
    def net_bit_rate(self) -> float:
        """Raw rate less cyclic-prefix and training overhead."""
        frame = self.n_symbols + self.n_training_symbols
        return self.raw_bit_rate / (1 + self.cp_fraction) * self.n_symbols / frame

    @property
    def cp_len(self) -> int:
        return int(round(self.fft_size * self.cp_fraction))

    @property
    def symbol_len(self) -> int:
        return self.fft_size + self.cp_len

    @property
    def frame_len(self) -> int:
        return self.symbol_len * (self.n_symbols + self.n_training_symbols)

    @property
    def subcarrier_offsets(self) -> np.ndarray:
        """Data subcarrier indices relative to the IF bin."""
        h = self.n_data_sc // 2
        return np.concatenate([np.arange(-h, 0), np.arange(1, h + 1)])

    @property
    def subcarrier_bins(self) -> np.ndarray:
        return int(round(self.if_freq / self.sc_spacing)) + self.subcarrier_offsets


@dataclass(frozen=True, eq=False)
class OfdmFrame:
    tx_waveform: SampledSignal
    reference_symbols: np.ndarray
    training_symbols: np.ndarray
    config: OfdmConfig
    bits: np.ndarray = field(repr=False)


def modulate(config: OfdmConfig) -> OfdmFrame:
    """Build one frame: QPSK training symbols, then QAM data symbols, each with a
    cyclic prefix, synthesized directly as a real IF waveform with unit mean power.

    Deterministic in ``config.seed``.
    """
    rng = np.random.default_rng(config.seed)
    m = config.bits_per_symbol
    n_sc = config.n_data_sc
    # constant-modulus (QPSK) training keeps the channel estimate free of
    # noise enhancement on low-amplitude points
    train_bits = rng.integers(0, 2, size=config.n_training_symbols * n_sc * 2)
    data_bits = rng.integers(0, 2, size=config.n_symbols * n_sc * m)
    training = qam_map(train_bits, 4).reshape(config.n_training_symbols, n_sc)
    reference = qam_map(data_bits, config.qam_order).reshape(config.n_symbols, n_sc)

    grid = np.vstack([training, reference])
    spec = np.zeros((grid.shape[0], config.fft_size // 2 + 1), dtype=np.complex128)
    spec[:, config.subcarrier_bins] = grid
    body = np.fft.irfft(spec, n=config.fft_size, axis=1)
    with_cp = np.hstack([body[:, -config.cp_len:], body]) if config.cp_len else body
    wave = with_cp.ravel()
    wave = wave / np.sqrt(np.mean(wave**2))
    tx = SampledSignal(wave.astype(np.complex128), config.sample_rate)
    return OfdmFrame(tx, reference, training, config, data_bits)


def _smooth(h: np.ndarray, width: int) -> np.ndarray:
    if width <= 1:
        return h
    kernel = np.ones(width)
    num = np.convolve(h, kernel, mode="same")
    den = np.convolve(np.ones_like(h.real), kernel, mode="same")
    return num / den


def demodulate(rx: SampledSignal, frame: OfdmFrame, eq_smoothing: int = 9,
               timing_backoff: int | None = None) -> np.ndarray:
    """Recover the equalized data grid (n_symbols x n_data_sc).

    Timing is ideal: the frame starts at sample 0 of ``rx``. Each symbol's
    cyclic prefix is dropped and the data bins are read from its DFT, which is
    the same as mixing the IF down to baseband and taking the baseband bins.
    The per-subcarrier channel is the training-symbol average, smoothed over
    ``eq_smoothing`` neighboring subcarriers.

    The DFT window opens ``timing_backoff`` samples (default a quarter of the
    cyclic prefix) before the end of the prefix, so the IF waveform may arrive
    early as well as late without inter-symbol interference. Dispersion
    advances the IF on one side of the optical channel and delays it on the
    other. The known phase ramp of the backoff is removed before equalizing.
    """
    cfg = frame.config
    if rx.n_tracks != 1:
        raise ValueError("demodulate expects a single-track electrical signal")
    if rx.sample_rate != cfg.sample_rate:
        rx = resample(rx, cfg.sample_rate)
    if rx.n_samples < cfg.frame_len:
        raise ValueError(f"received record ({rx.n_samples} samples) is shorter than "
                         f"the frame ({cfg.frame_len})")
    backoff = cfg.cp_len // 4 if timing_backoff is None else int(timing_backoff)
    if not 0 <= backoff <= cfg.cp_len:
        raise ValueError(f"timing_backoff must lie in [0, {cfg.cp_len}]")
    n_total = cfg.n_symbols + cfg.n_training_symbols
    start = cfg.cp_len - backoff
    blocks = rx.samples[: cfg.frame_len].reshape(n_total, cfg.symbol_len)
    blocks = blocks[:, start:start + cfg.fft_size]
    bins = np.asarray(cfg.subcarrier_bins)
    Y = np.fft.fft(blocks, axis=1)[:, bins] * np.exp(2j * np.pi * bins * backoff / cfg.fft_size)
    n_tr = cfg.n_training_symbols
    h = np.mean(Y[:n_tr] / frame.training_symbols, axis=0)
    h = _smooth(h, eq_smoothing)
    return Y[n_tr:] / h


@dataclass(frozen=True)
class EvmReport:
    evm_rms: float
    per_subcarrier_evm: np.ndarray = field(repr=False)
    snr_equivalent: float
    limit: float = EVM_LIMIT_64QAM
    below_floor: bool = False

    @property
    def passed(self) -> bool:
        return self.evm_rms <= self.limit


def compute_evm(equalized, reference, limit: float = EVM_LIMIT_64QAM) -> EvmReport:
    """RMS EVM in percent, normalized to the reference power."""
    r = np.asarray(equalized)
    s = np.asarray(reference)
    if r.shape != s.shape:
        raise ValueError(f"grid shapes differ: {r.shape} vs {s.shape}")
    if r.size == 0:
        raise ValueError("empty symbol grid")
    r2 = np.atleast_2d(r)
    s2 = np.atleast_2d(s)
    ref_power = np.mean(np.abs(s2) ** 2)
    err = np.abs(r2 - s2) ** 2
    evm = 100.0 * np.sqrt(np.mean(err) / ref_power)
    per_sc = 100.0 * np.sqrt(np.mean(err, axis=0) / ref_power)
    below = evm < EVM_FLOOR
    evm = max(evm, EVM_FLOOR)
    return EvmReport(float(evm), per_sc, float(-20.0 * np.log10(evm / 100.0)), limit, bool(below))


