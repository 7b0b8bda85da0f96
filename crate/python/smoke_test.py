"""Smoke test for the resultant_forge extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`.
"""

import os
import sys
import tempfile

import resultant_forge as rf


def close(a, b, tol=1e-8):
    return abs(a - b) < tol


def main():
    # univariate: roots 1, 2, 3
    tpl = rf.generate(rf.cubic())
    assert tpl.summary == "template: inv 1×1, eig 3×3", tpl.summary
    roots = tpl.solve([1.0, -6.0, 11.0, -6.0])
    xs = sorted(r.x[0].real for r in roots)
    assert all(close(x, w) for x, w in zip(xs, [1, 2, 3])), xs

    # S1: x² + y² − 5, xy − 2
    sys1 = rf.s1()
    tpl = rf.generate(sys1, seed=0)
    assert tpl.eigen_size == 4
    roots = tpl.solve([1.0, 1.0, -5.0, 1.0, -2.0])
    got = sorted((round(r.x[0].real, 9), round(r.x[1].real, 9)) for r in roots)
    assert got == [(-2, -1), (-1, -2), (1, 2), (2, 1)], got
    assert all(r.is_real and r.residual < 1e-10 for r in roots)

    # oracles agree
    f, g = sys1.instantiate([1.0, 1.0, -5.0, 1.0, -2.0])
    oracle = sorted((round(x.real, 9), round(y.real, 9)) for x, y in rf.sylvester_roots(f, g))
    assert oracle == got
    assert rf.bkk_2d(*sys1.supports()) == 4
    ims = sorted(z.imag for z in rf.companion_roots([1, 0, 1]))
    assert close(ims[0], -1) and close(ims[1], 1), ims
    base, parasitic = rf.gep_baseline(sys1, 1, [1.0, 1.0, -5.0, 1.0, -2.0])
    assert len(base) == 4 and parasitic >= 0

    # complex roots are filtered on request
    quad = rf.PolySystem.from_json('{"n_vars": 1, "polys": [[{"exp": [2], "slot": 0}, {"exp": [0], "slot": 1}]]}')
    qt = rf.generate(quad)
    assert len(qt.solve([1.0, 1.0])) == 2
    assert len(qt.solve([1.0, 1.0], all_complex=False)) == 0

    # stability harness
    rep = tpl.stability(n=500, seed=1)
    assert rep.n_instances == 500
    assert rep.mean_log10_residual <= -8 and rep.fail_fraction < 0.01, rep

    # oracle cross-checks
    checks = tpl.verify(sys1)
    assert all(ok for _, ok, _ in checks), checks

    # file round trip and determinism
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "s1.json")
        tpl.save(path)
        back = rf.Template.load(path)
        assert back.to_json() == tpl.to_json()
    assert rf.generate(sys1, seed=0).to_json() == tpl.to_json()

    # errors surface as ResultantForgeError
    under = rf.PolySystem.from_json('{"n_vars": 2, "polys": [[{"exp": [1, 0], "slot": 0}, {"exp": [0, 0], "slot": 1}]]}')
    try:
        rf.generate(under)
    except rf.ResultantForgeError as e:
        assert "m >= n" in str(e)
    else:
        raise AssertionError("underdetermined system accepted")

    print(rep)
    print("python smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
