"""
Scenario files and the command line
===================================

Scenarios are YAML with explicit units. The same file drives the `arofsim`
command, which writes CSV/JSON reports and a manifest with checksums.
"""

import json
import tempfile
from pathlib import Path

from arofsim.cli import main
from arofsim.config import dump_config, parse_config

cfg = parse_config({"scenario": "400G-topoB-800MHz",
                    "plant": {"laser_power": "4 dBm", "attenuation": "0.2 dB/km"},
                    "ofdm": {"n_symbols": 8}})
print(dump_config(cfg)[:400], "...")
print("config hash", cfg.config_hash()[:16])

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "scenario.yaml"
    path.write_text(dump_config(cfg))
    main(["run", "--config", str(path), "--out", str(Path(tmp) / "run")])
    manifest = json.loads((Path(tmp) / "run" / "manifest.json").read_text())
    for f in manifest["files"]:
        print(f"  {f['path']:28s} {f['sha256'][:12]}")
