"""BER of unchirped, chirped and chirp-modulated DFT-s-OFDM over a 3-tap
Rayleigh channel with exhaustive ML detection.

Run: python3 demos/ber_diversity.py [frames]
"""
import sys

from chirpwave.config import DEFAULTS, SCENARIO_II, ExperimentSpec, Sweep
from chirpwave.experiments import run

frames = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
curves = [
    {"label": "unchirped", "waveform": "DFT_S_OFDM"},
    {"label": "chirped", "waveform": "CHIRPED_DFT_S_OFDM"},
    {"label": "cm_P4", "waveform": "DFT_S_OFDM_CM", "P": 4},
]
params = {**DEFAULTS["ber_vs_snr"].params, "curves": curves}
spec = ExperimentSpec("ber_vs_snr", SCENARIO_II, Sweep("snr_db", tuple(range(0, 32, 4))), frames,
                      seed=7, params=params, workers=4)
result = run(spec)

print(" SNR dB " + "".join(f"{c['label']:>12}" for c in curves))
for row in result.rows:
    print(f"{row[0]:7.0f} " + "".join(f"{v:12.2e}" for v in row[1:]))
print()
for c in curves:
    label = c["label"]
    print(f"{label:<10} diversity {result.summary['diversity_' + label]:5.2f}   "
          f"spectral efficiency {result.summary['spectral_efficiency_' + label]:.3f} b/s/Hz")
