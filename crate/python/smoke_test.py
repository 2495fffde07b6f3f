#!/usr/bin/env python3
"""Smoke test for the regfall_py extension module.

Build the module first:

    cargo build --release -p regfall-py

then run this script from the repository root (or anywhere):

    python3 python/smoke_test.py
"""

import math
import shutil
import sys
from pathlib import Path


def locate_module() -> Path:
    root = Path(__file__).resolve().parents[1]
    candidates = [
        root / "target" / "release" / "libregfall_py.so",
        root / "target" / "debug" / "libregfall_py.so",
        root / "target" / "release" / "regfall_py.dll",
        root / "target" / "release" / "libregfall_py.dylib",
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit("regfall_py not built; run: cargo build --release -p regfall-py")


def import_module():
    built = locate_module()
    here = Path(__file__).resolve().parent
    suffix = ".so" if built.suffix in (".so", ".dylib") else ".pyd"
    target = here / ("regfall_py" + suffix)
    if not target.exists() or built.stat().st_mtime > target.stat().st_mtime:
        shutil.copyfile(built, target)
    sys.path.insert(0, str(here))
    import regfall_py

    return regfall_py


def main() -> None:
    rf = import_module()

    # trig polynomial basics
    f = rf.TrigPoly(constant=1.0, cos=[1.0], sin=[])
    assert abs(f.eval(0.0) - 2.0) < 1e-14
    assert abs(f.eval(0.5)) < 1e-14
    d = f.derivative()
    assert abs(d.sin[0] + 2.0 * math.pi) < 1e-14
    assert abs(rf.TrigPoly.cosine(2, 1.0).norm_sq() - 0.5) < 1e-14

    # the critical family and its action value
    cp = rf.critical_point(1)
    assert abs(cp["c_k"] - 2.0 ** (-1 / 6) * math.pi ** (-1 / 3)) < 1e-12
    assert cp["morse_index"] == 1
    b = rf.action_b(cp["x"])
    want = 3.0 * 2.0 ** (1 / 3) * math.pi ** (2 / 3)
    assert abs(b - want) < 1e-12 * want
    assert abs(cp["critical_value"] - want) < 1e-12 * want
    assert rf.grad_b(cp["x"]).norm_sq() < 1e-20

    # numeric and closed-form Morse indices agree
    for k in (1, 2, 3):
        assert rf.morse_index(k) == 2 * k - 1
        assert rf.morse_index(k, numeric=True, modes=4 * k) == 2 * k - 1

    # the index theorem
    r = rf.cz_index(3)
    assert r["cz_can"] == r["morse"] == 5
    assert r["alpha"] == -3 and r["parity"] == 1 and r["cz"] == -5

    # spectra
    lag = rf.lag_spectrum(1, 3)
    hat = [e for e in lag if e["label"] == "mu_hat_k"]
    assert len(hat) == 1 and abs(hat[0]["lambda"] - 48.0 * math.pi**2) < 1e-9
    ham = rf.ham_spectrum(1, 2)
    kernel = [e for e in ham if abs(e["lambda"]) < 1e-9]
    assert len(kernel) == 1 and kernel[0]["winding"] == -1

    # disjointness of the eigenvalue families
    assert rf.disjointness_gap(1, 10) > 1e-6

    # physical trajectory of the first critical loop: two collisions and
    # the Legendre momentum with |y|^2 = 4
    orbit = rf.rescale_square(cp["x"], 512)
    assert len(orbit["collision_times"]) == 2
    assert all(q >= 0.0 for q in orbit["q"])
    y = rf.legendre_fiber(cp["x"])
    assert abs(y.norm_sq() - 4.0) < 1e-12

    print("regfall_py smoke test: all checks passed")


if __name__ == "__main__":
    main()
