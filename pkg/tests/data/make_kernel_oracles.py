"""Regenerate kernel_oracles.json: 60-digit matrix exponentials of the ladder generator.

Run from the tests directory: ``python3 data/make_kernel_oracles.py``.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))
from oracles import ladder_expm_mp  # noqa: E402

CASES = [(60, 0.9), (60, 0.5), (45, 1.5), (30, 1.0)]

out = []
for N, g in CASES:
    s = ladder_expm_mp(N, g, dps=60)
    out.append({"N": N, "g": g, "re": s.real.ravel().tolist(), "im": s.imag.ravel().tolist()})
Path(__file__).with_name("kernel_oracles.json").write_text(json.dumps(out))
