#!/usr/bin/env python3
"""Print the bundled benchmark reconstruction.

Walks the shipped contingency tables through error rates, loss and
usefulness, and compares the derived relative-usefulness column with the
published one (equivalent to `riskrank evaluate --table2-fixture`).
"""

import sys

from riskrank.benchmarks import fixture_report

if __name__ == "__main__":
    lines, ok = fixture_report()
    for line in lines:
        print(line)
    print("all rows behave as documented" if ok else "RECONSTRUCTION FAILED")
    sys.exit(0 if ok else 1)
