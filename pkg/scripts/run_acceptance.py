#!/usr/bin/env python3
"""
Run the acceptance suite (quick profile unless arguments say otherwise).

    python scripts/run_acceptance.py [--profile full] [--output-dir reports]
"""
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from app.main import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if not any(a == "--profile" or a.startswith("--profile=") for a in args):
        args = ["--profile", "quick"] + args
    sys.exit(main(["accept"] + args))
