"""PAPR CCDF of every waveform on the default 256-point grid.

Run: python3 demos/papr_ccdf.py [frames]
"""
import sys

import numpy as np

from chirpwave import WaveformConfig, WaveformKind, ccdf
from chirpwave.metrics import papr_at_ccdf
from chirpwave.scenarios import papr_samples

frames = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
cfg = WaveformConfig()  # N=256, M=128, QPSK, OTFS grid 128 x 2
thresholds = np.arange(0, 12.5, 1.0)

print(f"{'waveform':<20}" + "".join(f"{t:>7.0f}" for t in thresholds) + "   PAPR@1e-2")
for kind in WaveformKind:
    if kind is WaveformKind.FMCW or kind is WaveformKind.DFT_S_OFDM_CM:
        continue
    samples = papr_samples(cfg.replace(waveform=kind), frames, np.random.default_rng(1))
    curve = ccdf(samples, thresholds, kind.value)
    print(f"{kind.value:<20}" + "".join(f"{p:>7.3f}" for p in curve.y) + f"   {papr_at_ccdf(samples, 1e-2):6.2f} dB")

print("\nOTFS with a taller Doppler axis (same N):")
for n_otfs in (2, 4, 8, 16):
    c = cfg.replace(waveform=WaveformKind.OTFS, N_otfs=n_otfs, M_otfs=cfg.N // n_otfs)
    lam = papr_at_ccdf(papr_samples(c, frames, np.random.default_rng(2)), 1e-2)
    print(f"  N_otfs={n_otfs:<3d} PAPR@1e-2 = {lam:5.2f} dB")
