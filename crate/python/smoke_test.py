"""Smoke test for the simstab_py extension.

Build and install first:
    pip install --no-build-isolation ./crates/py
then run:
    python python/smoke_test.py
"""

import math
from pathlib import Path

import simstab_py as ss

ROOT = Path(__file__).resolve().parent.parent
EX1 = (ROOT / "crates/core/configs/example1.json").read_text()
EX2 = (ROOT / "crates/core/configs/example2.json").read_text()


def close(x, y, tol):
    return abs(x - y) <= tol * max(1.0, abs(y))


def test_poly_types():
    p = ss.RealPoly.from_roots([1.0, -2.0])
    assert p.coeffs == [1.0, 1.0, -2.0]
    assert sorted(round(z.real, 12) for z, _ in p.roots()) == [-2.0, 1.0]
    r = ss.RatFun.from_zpk([2.0], [-1.0, -3.0])
    assert close(r(0).real, -2.0 / 3.0, 1e-15)
    assert r.is_proper
    j = ss.Jet(0.5, [4.0, 1.0]).sqrt()
    assert close(j.coeffs[0].real, 2.0, 1e-15) and close(j.coeffs[1].real, 0.25, 1e-15)


def test_analyze():
    a = ss.analyze(EX1)
    zeros = sorted(z["s"]["re"] for z in a["eta_zeros"])
    assert close(zeros[0], 4.4520018239914, 1e-12) and close(zeros[1], 19.206044271102, 1e-12)
    assert a["pick"]["solvable"]
    b = ss.analyze(EX2)
    assert [z["multiplicity"] for z in b["eta_zeros"]] == [2, 1]


def test_synthesize_and_verify():
    d = ss.synthesize(EX1)
    r = d["r"]
    lead = r["den"][0]
    assert close(r["num"][0] / lead, 19.871, 2e-2)
    assert d["closed_loop"]["all_stable"]
    k = ss.RatFun(d["k"]["num"], d["k"]["den"])
    v = ss.verify(EX1, k)
    assert v["all_stable"]
    zero = ss.verify(EX1, ss.RatFun([0.0]))
    assert not zero["all_stable"]
    try:
        ss.synthesize(EX2, sigma_zeros=[0.1])
    except ss.InputError as e:
        assert "n = 2" in str(e)
    else:
        raise AssertionError("degree mismatch accepted")


def test_sweep():
    s = ss.sweep(EX1, [0.0, 0.5, 1.0])
    assert [d["status"] for d in s["designs"]] == ["ok", "ok"]
    assert s["skipped"] == [1.0]
    assert s["pairs_distinct"]


def test_interpolation():
    # f(z) = (1 + 0.3 z) / (2 (1 - 0.2 z)) sampled at 0 and 0.4
    f = lambda z: (1 + 0.3 * z) / (2 * (1 - 0.2 * z))
    nodes = [(0.0, [0.5]), (0.4, [f(0.4)])]
    assert ss.pick_test(nodes)[0]
    sol = ss.solve_interpolation(nodes)
    a, b = sol["a"], sol["b"]
    g = lambda z: (1 + b[1] * z) / (2 * (1 + a[1] * z))
    assert close(g(0.4), f(0.4), 1e-12)
    assert not ss.pick_test([(0.0, [0.5]), (0.1, [5.0])])[0]


def test_cli():
    code, out, _ = ss.run_cli(["analyze", str(ROOT / "crates/core/configs/example2.json")])
    assert code == 0 and "multiplicity 2" in out


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok {name}")
    print("smoke test passed")
