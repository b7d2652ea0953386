"""Run every verification suite with the default config and print a one-line summary per suite."""

import sys
import time

from thoma_lab.config import SUITES, ExperimentConfig
from thoma_lab.suites import run_suite


def main():
    config = ExperimentConfig()
    failures = 0
    for name in SUITES:
        start = time.perf_counter()
        report = run_suite(name, config)
        bad = [r for r in report.records if not r.passed]
        failures += bool(bad)
        status = "pass" if report.passed else "FAIL"
        print(f"{name:<30} {status}  {len(report.records):4d} records  {time.perf_counter() - start:6.2f}s")
        for record in bad[:5]:
            print(f"    {record.identity}: lhs={record.lhs} rhs={record.rhs}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
