"""Smoke test for the polysym_py extension.

Build and run from the repository root:

    cargo build -p polysym-py --features extension-module --release
    python3 python/smoke_test.py

If the module is not importable, the script loads the freshly built
shared library from target/.
"""

import importlib.util
import pathlib
import sys


def load():
    try:
        import polysym_py

        return polysym_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libpolysym_py.so"
        if lib.exists():
            spec = importlib.util.spec_from_file_location("polysym_py", lib)
            mod = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(mod)
            return mod
    sys.exit("polysym_py not built; see the module docstring")


def main():
    ps = load()
    assert ps.count_dissections(5) == 55
    assert ps.count_dissections(6) == 273
    assert len(ps.table2()) == 39

    s = ps.symbol("Li2(x)")
    assert "x" in s, s
    assert ps.same_symbol("Li2(x)", "-Li2(1-x) - log(x)*log(1-x)")
    assert not ps.same_symbol("Li2(x)", "Li2(-x)")

    red = ps.hpl_reduce([0, 0, 1, 1])
    assert "Li4(x)" in red and "zeta3" in red, red

    val = float(ps.evaluate("Li2(1/2) + log(2)^2/2 - pi^2/12", ["0"], 30).split()[0])
    assert abs(val) < 1e-25, val
    print("smoke test passed")


if __name__ == "__main__":
    main()
