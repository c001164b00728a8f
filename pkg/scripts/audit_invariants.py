#!/usr/bin/env python3
"""
Invariant Audit Script
Runs every selftest suite and prints a per-suite summary table.
"""

import logging
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import pandas as pd
import typer

from src.core.config import DEFAULT_SEED, LOG_FORMAT
from src.services.selftest import run_suites, to_frame

# Setup logging
logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)


def audit_invariants(seed: int = DEFAULT_SEED) -> int:
    """Run all suites and print the summary. Returns the number of failed suites."""

    print("=" * 70)
    print(" INVARIANT AUDIT")
    print("=" * 70)
    print(f"  Seed: {seed}")

    frame = to_frame(run_suites(seed))

    print("\n📋 SUITE RESULTS")
    print("-" * 70)
    with pd.option_context("display.width", 120, "display.max_colwidth", 60):
        print(frame[["pass", "cases", "max_deviation", "failures"]].to_string())

    failed = frame[~frame["pass"]]

    # ========== SUMMARY ==========
    print("\n\n" + "=" * 70)
    print(" AUDIT SUMMARY")
    print("=" * 70)

    if len(failed):
        print(f"\n❌ {len(failed)} of {len(frame)} suites failed:")
        for i, (name, row) in enumerate(failed.iterrows(), 1):
            print(f"{i}. {name}: {row['detail']}")
    else:
        print(f"\n✅ ALL {len(frame)} SUITES PASS")
        print(f"   {int(frame['cases'].sum())} cases, worst deviation {frame['max_deviation'].max():.3e}")

    print("\n" + "=" * 70)

    return len(failed)


def main(seed: int = typer.Option(DEFAULT_SEED, "--seed", help="Seed for every suite.")):
    """Run every selftest suite and print a per-suite summary table."""
    failed_count = audit_invariants(seed)
    raise typer.Exit(0 if failed_count == 0 else 1)


if __name__ == "__main__":
    typer.run(main)
