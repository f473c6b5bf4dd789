"""Partial-swap basics: one step, its closed form, and 1/n convergence.

Evolving a target under e^{-i rho t} without knowing rho: consume n
copies of rho, partial-swap each one into the target for a short angle
t/n, and the deviation from the exact conjugation shrinks like 1/n.
"""

import math

import numpy as np

from dmexp import (
    LmrConfig,
    ideal_conjugation,
    lmr_simulate,
    lmr_step,
    random_state,
    sample_budget,
    substream,
    trace_distance,
)


def main():
    rng = substream(1, "demo-swap")

    print("== one step against the closed form ==")
    sigma = random_state(2, 2, rng)
    rho = random_state(2, 2, rng)
    delta = 0.3
    c, s = math.cos(delta), math.sin(delta)
    closed = c * c * sigma - 1j * s * c * (rho @ sigma - sigma @ rho) + s * s * rho
    got = lmr_step(sigma, rho, delta)
    print(f"max deviation from c^2 sigma - isc[rho,sigma] + s^2 rho: "
          f"{np.max(np.abs(got - closed)):.2e}")

    print()
    print("== convergence to the exact conjugation ==")
    t = math.pi
    ideal = ideal_conjugation(rho, t, sigma)
    print(f"{'n':>6}  {'trace distance':>14}")
    errs, ns = [], []
    for p in range(4, 11):
        n = 2**p
        out, _ = lmr_simulate(sigma, rho, LmrConfig(t=t, delta=0.5, n_override=n))
        err = trace_distance(out, ideal)
        ns.append(n)
        errs.append(err)
        print(f"{n:>6}  {err:>14.3e}")
    slope = np.polyfit(np.log(ns), np.log(errs), 1)[0]
    print(f"fitted log-log slope: {slope:.3f}  (first-order protocol: -1)")

    print()
    print("== the 4 t^2 / delta budget rule ==")
    for delta_target in (0.1, 0.01):
        cfg = LmrConfig(t=t, delta=delta_target)
        n = sample_budget(cfg)
        out, _ = lmr_simulate(sigma, rho, cfg)
        err = trace_distance(out, ideal)
        print(f"delta={delta_target:<5}  n={n:<5}  achieved error={err:.3e}")


if __name__ == "__main__":
    main()
