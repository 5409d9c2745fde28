#!/usr/bin/env python3
"""
contextkit - contextuality analysis toolkit

Quickstart:
  pip install -r requirements.txt
  python3 contextkit.py fixtures list
  python3 contextkit.py counterfactual
  python3 contextkit.py fixtures extract pr-box kcbs-cycle --dir fixtures
  python3 contextkit.py classify fixtures/pr-box.json
  python3 contextkit.py graph fixtures/kcbs-cycle.json --dot kcbs.dot
  python3 contextkit.py validate model.json --format csv
"""

from contextkit.cli import main

if __name__ == "__main__":
    main()
