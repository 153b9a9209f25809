#!/usr/bin/env python3
"""
GNN power allocation and transferability checks

Usage:
    python scripts/gnntransfer.py --help
    python scripts/gnntransfer.py transfer --config samples/configs/desk_transfer.yaml --seed 1
    python scripts/gnntransfer.py bounds --config samples/configs/bounds_suite.yaml --out output/bounds
    python scripts/gnntransfer.py alpha --out output/alpha
"""

import sys
from pathlib import Path

# =============================================================================
# PATHS
# =============================================================================

BASE_PATH = Path(__file__).parent.parent.resolve()

if __name__ == "__main__":
    sys.path.insert(0, str(BASE_PATH))
    from src.cli import app

    app()
