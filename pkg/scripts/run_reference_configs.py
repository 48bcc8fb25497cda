#!/usr/bin/env python3
"""Run every shipped reference config; artifacts land in ./out/.

Usage: python scripts/run_reference_configs.py [config-dir]
"""

import sys
import time
from pathlib import Path

from scqsim.cli import main as cli_main


def run_all(config_dir: Path) -> int:
    configs = sorted(config_dir.glob("*.cfg"))
    if not configs:
        print(f"no .cfg files under {config_dir}", file=sys.stderr)
        return 1
    failures = 0
    for cfg in configs:
        start = time.perf_counter()
        rc = cli_main(["--config", str(cfg)])
        elapsed = time.perf_counter() - start
        status = "ok" if rc == 0 else f"FAILED (exit {rc})"
        print(f"{cfg.name:32s} {status:>12s}  {elapsed:6.2f}s")
        failures += rc != 0
    return 1 if failures else 0


if __name__ == "__main__":
    base = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "configs"
    sys.exit(run_all(base))
