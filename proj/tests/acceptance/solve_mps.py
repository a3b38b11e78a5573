#!/usr/bin/env python3
"""Solve an MPS file with HiGHS and print "<status> <objective>"."""

import sys

import highspy


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: solve_mps.py FILE.mps", file=sys.stderr)
        return 2
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if h.readModel(sys.argv[1]) != highspy.HighsStatus.kOk:
        print("read_error 0")
        return 1
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kOptimal:
        print(f"optimal {h.getInfo().objective_function_value:.17g}")
    elif status == highspy.HighsModelStatus.kInfeasible:
        print("infeasible 0")
    elif status in (highspy.HighsModelStatus.kUnbounded, highspy.HighsModelStatus.kUnboundedOrInfeasible):
        print("unbounded 0")
    else:
        print("other 0")
    return 0


if __name__ == "__main__":
    sys.exit(main())
