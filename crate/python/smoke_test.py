"""Smoke test for the `mapbayes` extension module.

Build and install first, e.g.

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/mapbayes-*.whl

then run `python python/smoke_test.py`.
"""

import json
import math

import mapbayes

TRIANGLE = json.dumps(
    {
        "pieces": [
            {"lo": -1, "hi": 0, "kind": "affine", "params": {"a": 1, "b": 1}},
            {"lo": 0, "hi": 1, "kind": "affine", "params": {"a": 1, "b": -1}},
        ]
    }
)


def main():
    tri = mapbayes.Density.from_json(TRIANGLE)
    assert tri.dim == 1
    assert tri.evaluate(0.0) == 1.0
    assert abs(tri.integrate(-1.0, 1.0) - 1.0) < 1e-15
    assert abs(mapbayes.ball_integral(tri, 0.0, 0.5) - 0.75) < 1e-15

    mode = mapbayes.map_estimate(tri, -2.0, 2.0)
    assert mode["canonical"] == [0.0] and mode["sup_value"] == 1.0

    bayes = mapbayes.bayes_estimate(tri, 10.0, -2.0, 2.0)
    assert abs(bayes["canonical"][0]) < 1e-12

    moll = mapbayes.mollified_sup(tri, 2.0, -2.0, 2.0)
    assert abs(moll["sup_value"] - 0.75) < 1e-12

    cond = mapbayes.check_conditions(tri, [0.25, 0.5, 0.75])
    assert cond["level_set_condition"] and cond["quasiconcave"] and cond["log_concave"]

    ce = mapbayes.Density.counterexample(20)
    assert ce.evaluate(1.0) == 0.5
    assert abs(mapbayes.objective_at_origin(1) - 1.0 / 6.0) < 1e-15
    assert mapbayes.plateau_bound(1) == 0.17578125

    trace = mapbayes.sweep(ce, -1.0, 13.0)
    assert trace["verdict"] == "diverges_from_map"
    assert all(abs(row["canonical"][0]) >= 0.5 for row in trace["rows"])

    report = mapbayes.verify_nonconvergence(4)
    assert report["map_at_origin"] and all(report["outside_center"])

    gap = mapbayes.approx_gap(ce, 2.0 * 4.0**6, 0.0, -1.0, 13.0)
    assert 0.0 < gap < 1e-3

    hypo = mapbayes.hypo_diagnostic(tri, [1.0, 10.0], [(-0.5, 0.5)], [(-1.0, 1.0)])
    assert hypo["violations"] == 0

    grid = mapbayes.Density.grid([0.0, 0.0], [1.0, 1.0], [2, 2], [1.0, 2.0, 3.0, 4.0], normalize=True)
    g_mode = mapbayes.map_estimate(grid, [0.0, 0.0], [2.0, 2.0])
    assert g_mode["canonical"] == [1.0, 1.0]

    spiky = mapbayes.Density.from_json(
        json.dumps(
            {
                "pieces": [{"lo": 0, "hi": 1, "kind": "constant", "params": {"k": 1}}],
                "unbounded_at": [0.5],
            }
        )
    )
    s_mode = mapbayes.map_estimate(spiky, 0.0, 1.0)
    assert s_mode["sup_infinite"] and math.isinf(s_mode["sup_value"])

    try:
        mapbayes.map_estimate(tri, 1.0, -1.0)
    except mapbayes.MapBayesError:
        pass
    else:
        raise AssertionError("empty search box was accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
