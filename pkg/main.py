#!/usr/bin/env python3
"""
Main entry point for the LogSpace toolkit.
Runs the command-line application.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from src.core.app import app


def main():
    """Launch the command-line application."""
    app(prog_name="logspace")


if __name__ == "__main__":
    main()
