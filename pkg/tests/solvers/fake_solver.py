"""Misbehaving solvers for the bridge's error paths; the first argument picks one."""
import sys

kind = sys.argv[1]
if kind == "silent":
    print("c thinking hard")
elif kind == "all-false":
    print("o 0")
    print("s OPTIMUM FOUND")
    print("v " + "0" * 5000)
elif kind == "unknown":
    print("s UNKNOWN")
elif kind == "unsat":
    print("s UNSATISFIABLE")
