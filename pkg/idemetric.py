"""
Command-line entry point for the idempotent Kantorovich metric toolkit.

Examples:
    python idemetric.py dist space.json mu1.json mu2.json --oracle
    python idemetric.py converge space.json sequence.json limit.json --eps 0.1 --format csv
    python idemetric.py dequantize 3 5 1,0.1,0.01
"""

import os
import sys
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from src.cli import main

if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
