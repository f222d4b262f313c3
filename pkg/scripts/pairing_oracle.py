"""Rerun the pairing-selection oracle and write its transcript.

    python3 scripts/pairing_oracle.py [--check]

With --check the committed transcript is compared against a fresh run
instead of being overwritten.
"""

import argparse
import json
import pathlib
import sys

from cliffsheaf.finsler import ORACLE_PAIRING, frozen_pairing_matches, run_pairing_oracle

TRANSCRIPT = pathlib.Path(__file__).with_name("pairing_oracle_transcript.json")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    t = run_pairing_oracle()
    for branch, info in t["branches"].items():
        print(f"{branch}:")
        for row in info["candidates"]:
            mark = "*" if row["matches"] else " "
            print(f"  {mark} {row['prefactor']:+.2f} Tr({row['pairing']})  "
                  f"max rel residual {row['max_rel_residual']:.3e}")
        print(f"  selected: {info['selected']}")
    print("frozen table:", ORACLE_PAIRING, "matches" if frozen_pairing_matches(t) else "DIFFERS")
    if args.check:
        stored = json.loads(TRANSCRIPT.read_text())
        same = all(stored["branches"][b]["selected"] == t["branches"][b]["selected"]
                   for b in t["branches"])
        print("committed transcript", "agrees" if same else "DISAGREES")
        return 0 if same and frozen_pairing_matches(t) else 1
    TRANSCRIPT.write_text(json.dumps(t, indent=2) + "\n")
    print(f"wrote {TRANSCRIPT}")
    return 0 if frozen_pairing_matches(t) else 1


if __name__ == "__main__":
    sys.exit(main())
