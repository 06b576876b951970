"""Smoke test for the pytwistlab extension module.

Build and install first:
    maturin develop --release -m crates/python/Cargo.toml
"""

import sys

import pytwistlab as tl


def main() -> int:
    e = tl.BohrSet.golden_arc()
    assert e.measure() == "3/10", e.measure()
    assert [0] in e and e.classify([1]) == "out"
    count, size, ratio = e.density(1000)
    assert size == 2001 and abs(ratio - 0.3) < 0.02

    # (u, v, w) with u^2 + v^2 - w^2 = n
    for n in range(-200, 201):
        u, v, w = tl.represent_q3(n)
        assert u * u + v * v - w * w == n

    assert tl.galois_label([1, 0, -3, 1]) == "C3"
    assert tl.galois_label([1, 0, 0, -2]) == "S3"

    q = tl.InvariantMap.q3()
    assert q.eval([3, 4, 5]) == "0"
    cube = tl.BohrSet.golden_cube()
    for n, wit in q.surjectivity(cube, -5, 5):
        assert wit is not None and wit in cube
        assert int(q.eval(wit)) == n

    re, im = tl.bq_limit_predict(["1/2", "0"], [1, 0])
    assert abs(re + 1 / 3) < 1e-12 and abs(im) < 1e-12
    re, im, err = tl.mc_cesaro(["sqrt2", "sqrt3"], [1, 0], 200, 2000, 1)
    assert abs(complex(re, im)) < 0.1

    words, shifts, measure, ok = tl.twisted_recurrence(tl.BohrSet.two_frequency_arc(), [[1, 0], [0, 1]])
    assert ok, (words, measure)

    print(f"pytwistlab {tl.__version__}: smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
