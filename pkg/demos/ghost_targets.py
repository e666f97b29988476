"""Beat-frequency ranging with a second emitter on the air.

Own echo at 10 samples (30 m), the other radar's burst arriving at 20 samples.
FMCW shows the interferer as a ghost of similar height; the mixed
chirped DFT-s-OFDM profile carries the data autocorrelation instead of a tone.

Run: python3 demos/ghost_targets.py
"""
import numpy as np

from chirpwave import WaveformConfig, WaveformKind, pmsr
from chirpwave.scenarios import GhostScenario, ghost_trial

scene = GhostScenario()
cfg = WaveformConfig()
for kind in (WaveformKind.FMCW, WaveformKind.CHIRPED_DFT_S_OFDM):
    rng = np.random.default_rng(3)
    power = np.mean([ghost_trial(cfg.replace(waveform=kind), scene, rng).magnitudes ** 2 for _ in range(50)], axis=0)
    db = 10 * np.log10(power / power.max())
    top = np.argsort(db)[::-1][:4]
    print(f"{kind.value}: strongest bins " + ", ".join(f"{b} ({db[b]:.1f} dB)" for b in top))
    print(f"  target bin {scene.target_delay}: {db[scene.target_delay]:.1f} dB, "
          f"interferer bin {scene.interferer_delay}: {db[scene.interferer_delay]:.1f} dB, "
          f"PMSR at target {pmsr(np.sqrt(power), peak=scene.target_delay):.2f} dB")
