"""Smoke test for the susy_damp_py extension module.

Build and install with `pip install --no-build-isolation -e crates/python`,
then run `python python/smoke_test.py`.
"""

import math

import susy_damp_py as sd


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    under = sd.DampingParams.from_omega0_sq(0.1, 1.01)
    assert under.regime == "underdamped", under.regime
    assert sd.DampingParams(1.0, 1.0).regime == "critical"
    over = sd.DampingParams.from_omega0_sq(1.0, 24.0 / 25.0)
    assert over.regime == "overdamped"
    assert close(over.alpha_sq, 0.04)

    seed = sd.Mode(under, amp=1.0, phase=0.0)
    assert seed.eval(0.0)[0] == 1.0
    for gamma in (1.0, 0.5, 0.1):
        tilde = sd.Mode(under, gamma, amp=1.0, phase=0.0)
        assert close(tilde.eval(0.0)[0], -gamma), gamma
        assert abs(tilde.residual(3.0)) < 1e-11

    critical = sd.Mode(sd.DampingParams(1.0, 1.0), 5.0, a=1.0, b=1.0)
    assert close(critical.eval(0.0)[0], -4.96)

    assert close(sd.tilde_pm(over, 1.0, True, 0.0)[0], -0.8)

    assert sd.blow_up_time(2.0) == -0.5
    assert sd.blow_up_time(-0.25) == 4.0
    try:
        sd.Mode(under, 0.5, amp=1.0).eval(-2.0)
    except sd.SingularTimeError:
        pass
    else:
        raise AssertionError("evaluation at the blow-up instant must raise")
    try:
        sd.RiccatiParam(0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("gamma = 0 must be rejected")

    grid = [i / 10 for i in range(101)]
    ys, dys = sd.integrate(sd.DampingParams(1.0, 1.0), None, 0.0, 1.0, 0.0, 10.0, grid)
    worst = max(abs(y - math.exp(-t) * (1 + t)) for t, y in zip(grid, ys))
    assert worst < 1e-8, worst

    csv = sd.figure_csv(1)
    rows = [line for line in csv.splitlines() if not line.startswith("#")]
    assert rows[1] == "0,1,-1,-0.5,-0.1", rows[1]

    reports = sd.run_suite("all", 0)
    failed = [r for r in reports if not r.passed]
    assert not failed, failed
    print(f"ok: {len(reports)} checks passed, oracle error {worst:.1e}")


if __name__ == "__main__":
    main()
