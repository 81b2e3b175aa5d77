"""Smoke test for the csrk Python extension.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`.
"""

import math

import csrk


def main():
    t = csrk.Tableau.avf_collocation(2)
    assert t.degree == 2 and t.is_energy_preserving()
    assert t.order() == 4
    report = t.audit(6)
    assert report["algebraic_order"] == 4

    p4 = csrk.Tableau.parallel4("1")
    assert p4.spectrum()["real_distinct"]
    assert not csrk.Tableau.parallel4("1/2").spectrum()["real_distinct"]

    custom = csrk.Tableau([["1"]], name="avf")
    assert custom.order() == 2
    assert not csrk.Tableau.nonsymmetric_control().is_energy_preserving()

    run = csrk.integrate_problem(t, "pendulum", 0.1, 200)
    assert len(run["states"]) == 201
    assert run["max_energy_drift"] < 1e-12, run["max_energy_drift"]

    def hamiltonian(y):
        q, p = y
        return 0.5 * p * p + 1.0 - math.cos(q)

    def gradient(y):
        q, p = y
        return [math.sin(q), p]

    own = csrk.integrate_system(t, hamiltonian, gradient, [1.0, 0.0], 0.1, 200)
    diff = max(abs(a - b) for a, b in zip(own["states"][-1], run["states"][-1]))
    assert diff < 1e-10, diff

    try:
        csrk.integrate_problem(t, "nope", 0.1, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("unknown problem accepted")

    print("csrk smoke test passed:", t, "drift", run["max_energy_drift"])


if __name__ == "__main__":
    main()
