"""Smoke test of the densenet_py extension.

Build and install first, e.g. ``maturin develop -m crates/py/Cargo.toml``
or ``pip install --no-build-isolation crates/py``, then run
``python3 python/smoke_test.py``.
"""

import json
import math

import densenet_py as dn


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    # Full-load homogeneous rate: a fixed reference value.
    s = dn.Scenario.homogeneous(1.0, 1.0)
    full = dn.average_rate(s, full_load=True)
    assert close(full["rate"], 2.1481550620504, 1e-9), full["rate"]
    assert close(dn.rate_alpha4(1.0), full["rate"], 1e-9)

    # Load-aware rate exceeds the full-load one and matches the single-tier form.
    r = dn.average_rate(s)
    phi = r["activity_prob"][0]
    assert close(phi, 1.0 - math.exp(-1.0), 1e-12)
    assert close(r["rate"], dn.rate_alpha4(phi), 1e-6)
    lo, hi = dn.closed_form_rate_bounds(phi)
    assert lo <= r["rate"] <= hi

    # Single-tier optimum sits inside the closed-form bracket and scales with load.
    sol = dn.optimize(s, 2.4)
    bounds = dn.closed_form_density_bounds(1.0, 2.4)
    assert bounds["lower"] <= sol["densities"][0] <= bounds["upper"]
    doubled = dn.optimize(s.with_ue_density(2.0), 2.4)
    assert close(doubled["densities"][0], 2.0 * sol["densities"][0], 1e-6)

    try:
        dn.optimize(s, 1000.0)
    except dn.InfeasibleError:
        pass
    else:
        raise AssertionError("expected InfeasibleError")

    try:
        dn.Scenario.from_json("{}")
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    # JSON round trip and the dense-urban preset.
    pico = dn.Scenario.dense_urban(["pico"])
    again = dn.Scenario.from_json(pico.to_json())
    assert again.tier_names == ["pico"] and again.ue_density == pico.ue_density

    savings = dn.daily_savings(pico, 2.4)
    assert 0.08 <= savings["daily_relative_saving"] <= 0.16, savings["daily_relative_saving"]

    # Monte Carlo is deterministic for a fixed seed.
    a = dn.simulate(dn.Scenario.homogeneous(1.0, 1.0), 200, seed=3)
    b = dn.simulate(dn.Scenario.homogeneous(1.0, 1.0), 200, seed=3)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["rate"]["trials"] == 200

    print("smoke test passed:", repr(s), "rate", round(r["rate"], 6))


if __name__ == "__main__":
    main()
