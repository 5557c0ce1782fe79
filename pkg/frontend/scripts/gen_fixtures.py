#!/usr/bin/env python3
"""Build the parity fixture set by invoking the primary CLI.

Every entry is the raw schedule JSON the CLI emits, so the TypeScript
package consumes the primary only through its published interface.
Grid: m <= 20, s <= 10, stages <= 3, both variants.
"""
import json
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor


def one(args):
    m, s, ell, variant = args
    cmd = ["ckpsched", "schedule", "-m", str(m), "-u", str(s), "--stages", str(ell),
           "--variant", variant, "--format", "json"]
    if variant == "cams-sa":
        cmd.append("--stiffly-accurate")
    out = subprocess.run(cmd, capture_output=True, text=True)
    if out.returncode != 0:
        return None
    return {"m": m, "s": s, "l": ell, "variant": variant,
            "schedule": json.loads(out.stdout)}


def main():
    grid = [
        (m, s, ell, variant)
        for variant in ("cams-sa", "cams-gen")
        for ell in (1, 2, 3)
        for s in range(1, 11)
        for m in range(1, 21)
    ]
    with ThreadPoolExecutor(max_workers=16) as pool:
        entries = [e for e in pool.map(one, grid) if e is not None]
    with open(sys.argv[1] if len(sys.argv) > 1 else "fixtures/schedules.json", "w") as fh:
        json.dump(entries, fh)
    print(f"wrote {len(entries)} schedule fixtures")


if __name__ == "__main__":
    main()
