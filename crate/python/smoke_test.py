"""Smoke test for the quadtomo Python extension.

Build the extension first:

    cargo build --release -p quadtomo-py --features extension-module

then run `python3 python/smoke_test.py [path/to/libquadtomo_py.so]`.
"""

import importlib.machinery
import importlib.util
import json
import math
import pathlib
import sys

import numpy as np
from scipy.special import dawsn

ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_extension(path=None):
    candidates = [pathlib.Path(path)] if path else [
        ROOT / "target" / "release" / "libquadtomo_py.so",
        ROOT / "target" / "debug" / "libquadtomo_py.so",
    ]
    for lib in candidates:
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("quadtomo_py", str(lib))
            spec = importlib.util.spec_from_file_location("quadtomo_py", str(lib), loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("extension not found; build it with "
             "`cargo build --release -p quadtomo-py --features extension-module`")


def check(name, ok, detail=""):
    print(f"{'ok  ' if ok else 'FAIL'} {name} {detail}")
    return ok


def main():
    qt = load_extension(sys.argv[1] if len(sys.argv) > 1 else None)
    results = []

    xs = np.linspace(-8.0, 8.0, 161)
    err = max(abs(qt.dawson(x) - dawsn(x)) for x in xs)
    results.append(check("dawson vs scipy", err < 1e-13, f"{err:.1e}"))

    # f(x) = 2 daw'(x) = 2 (1 - 2x daw(x))
    err = max(abs(qt.pattern_function(0, x) - 2.0 * (1.0 - 2.0 * x * dawsn(x))) for x in xs)
    results.append(check("pattern function", err < 1e-12, f"{err:.1e}"))

    vac = qt.DensityMatrix.fock(0, 4)
    grid = list(np.linspace(-6, 6, 241))
    p = np.array(qt.quadrature_pdf(vac, 0.3, grid))
    err = np.max(np.abs(p - np.exp(-np.square(grid)) / math.sqrt(math.pi)))
    results.append(check("vacuum quadrature density", err < 1e-14, f"{err:.1e}"))

    rho = qt.DensityMatrix.state("random:5,11", 5)
    rec = qt.reconstruct_exact(rho)
    re_hat, im_hat = rec.rho_hat
    re, im = rho.to_lists()
    err = np.max(np.abs(np.array(re_hat) - re) + np.abs(np.array(im_hat) - im))
    results.append(check("exact reconstruction", err < 1e-7, f"{err:.1e}"))

    cat = qt.DensityMatrix.state("cat:1.5", 4, projected=True)
    thetas = qt.uniform_angles(4, 64)
    samples = qt.sample_quadratures(cat, thetas, 20000, 3)
    rec = qt.reconstruct_samples(thetas, samples, 4, seed=3)
    td = rec.rho_phys.trace_distance(cat)
    results.append(check("sampled reconstruction", td < 0.05, f"trace distance {td:.3e}"))
    again = qt.sample_quadratures(cat, thetas[:2], 1000, 3)
    results.append(check("seeded sampling is deterministic", again[0] == samples[0][:1000] and again[1] == samples[1][:1000]))

    one = qt.DensityMatrix.fock(1, 4)
    w = qt.wigner(one, [0.0], [0.0])[0][0]
    results.append(check("one-photon Wigner origin", abs(w + 1 / math.pi) < 1e-14, f"{w:.6f}"))
    axis = list(np.linspace(-7, 7, 141))
    h = np.array(qt.husimi(vac, axis, axis))
    integral = np.trapezoid(np.trapezoid(h, axis), axis) / 2.0
    results.append(check("Husimi normalization", abs(integral - 1) < 1e-3, f"{integral:.6f}"))
    axis, fbp = qt.wigner_back_projection(one, grid_points=41)
    centre = fbp[20][20]
    results.append(check("back-projected negativity", centre < -0.2, f"{centre:.4f}"))

    try:
        qt.DensityMatrix.state("coherent:3", 4)
        results.append(check("truncation rejected", False))
    except qt.ValidationError as e:
        results.append(check("truncation rejected", "truncation-edge" in str(e)))

    report = json.loads(qt.verify_suites(dual_states=3))
    names = {s["name"]: s["passed"] for s in report["suites"]}
    results.append(check("verification suites run", names.get("kronecker") and names.get("triangular"),
                         ", ".join(f"{k}={'pass' if v else 'fail'}" for k, v in names.items())))

    print(f"{sum(results)}/{len(results)} checks passed")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
