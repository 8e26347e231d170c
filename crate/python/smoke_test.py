"""Smoke test for the pykdsim extension: quick calls into every exposed area."""

import json
import math
import tempfile
from pathlib import Path

import pykdsim as kd


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    p = kd.LaserPulse(1e18)
    d = p.derived()
    assert close(d["omega"], 2 * math.pi * 299792458.0 / 1.064e-6, 1e-12)
    assert close(d["b0"], d["k"] * d["a0"], 1e-12)

    sc = kd.Scenario()
    assert len(sc.pulses) == 2 and len(sc.hash()) == 64
    assert kd.Scenario(sc.to_json()).hash() == sc.hash()
    try:
        kd.Scenario('{"solver": {"tolerence": 1e-9}}')
        raise AssertionError("unknown key accepted")
    except ValueError:
        pass

    assert close(kd.scaling_probability("skd", 1e18, 1e7, 1.064e-6, 1e-10), 0.00128, 0.01)

    a = kd.perturbative_amplitude("regular_kd", 1e10, tau=1e-12)
    assert isinstance(a["amplitude"], complex) and close(a["probability"], abs(a["amplitude"]) ** 2, 1e-12)

    pt = kd.perturbative_amplitude("skd", 1e17, tau=1e-12, polarization="linear_y")["probability"]
    se = kd.ladder_probability("skd", 1e17, tau=1e-12, ladder_max=8)
    assert close(se, pt, 1e-2), (se, pt)

    rows = kd.momentum_distribution(1e17, n_show=3, tau=1e-12, ladder_max=8)
    assert [r[0] for r in rows] == list(range(-3, 4))
    assert rows[5][1] > 0.99

    rep = kd.classical_run(json.dumps({"lead_time": 100.0, "t_end": 200.0, "dt_divisor": 50.0}))
    assert len(rep["trajectories"]) == 9 and rep["reflections"] == 0

    r = kd.spurious_ratios(1e19, 1e7, 1.064e-6)
    assert r["first_to_second_order"] > 1.0
    assert kd.larmor_probability(1e19, 800e-9, 10e-12) > 0.0

    with tempfile.TemporaryDirectory() as t:
        assert kd.run_cli(["table1", "--out-dir", t]) == 0
        assert (Path(t) / "table1.csv").read_text().startswith("process,I,v")
        assert kd.run_cli(["table1", str(Path(t) / "missing.json"), "--out-dir", str(Path(t) / "x")]) == 2

    print("pykdsim smoke test passed")


if __name__ == "__main__":
    main()
