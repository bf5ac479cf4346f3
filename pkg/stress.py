#!/usr/bin/env python3
"""
Carbon stress CLI entry point.

Usage:
    python stress.py <command> [arguments]

Examples:
    # Generate a synthetic instance
    python stress.py generate --config gen.yaml --output_dir data/

    # Estimate emissions from fuel purchases
    python stress.py estimate_emissions --firms data/firms.csv --edges data/edges.csv

    # Run a price sweep with flag overrides
    python stress.py sweep --config run.yaml --prices 10,45,100 --fn GL

    # Systemic risk index of selected firms
    python stress.py esri --config run.yaml --firms 0,1,2 --output esri.csv

    # Golden fixtures
    python stress.py toy --price 20
    python stress.py toy --fixture core --price 90,100 --verbose
"""

import sys
from pathlib import Path

# Make the engine and stresscli packages importable from a checkout
current_dir = Path(__file__).parent
sys.path.insert(0, str(current_dir))

try:
    from stresscli.src.cli import main
except ImportError as e:
    print(f"Error importing required modules: {e}")
    print("Please ensure you have installed the required dependencies:")
    print("  pip install -e .")
    sys.exit(1)


if __name__ == "__main__":
    main()
