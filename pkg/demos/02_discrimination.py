"""Why evolving under a state beats measuring it: the discrimination gap.

Telling rho(x) = diag(x, 1-x) from rho(x + eps) by direct measurement
needs about 1/eps^2 copies.  Running e^{-i rho t} on |+> for t chosen
so the two hypotheses differ by a half-turn makes one coherent
experiment decisive, at roughly t^2 ~ 1/eps^2 copies consumed inside
the protocol; the point is the mechanism, not the count: measurement
statistics concentrate slowly, phases separate linearly in t.
"""

import math

from dmexp import (
    DiscriminationTask,
    LmrConfig,
    binomial_tv,
    discriminate,
    discrimination_rates,
    tomography_bound,
)


def main():
    x, eps = 0.5, 0.1

    print("== outcome rates under each hypothesis ==")
    for protocol, budget in (("ideal", None), ("lmr", LmrConfig(t=1.0, delta=1 / 3))):
        p_a, p_b = discrimination_rates(x, eps, protocol, budget)
        print(f"{protocol:>5}: P(+X | rho(x)) = {p_a:.4f}   P(+X | rho(x+eps)) = {p_b:.4f}")

    print()
    print("== seeded trials ==")
    task = DiscriminationTask(x=x, epsilon=eps, eta=0.2, trials=1000, seed=7)
    print(f"ideal success over {task.trials} trials: {discriminate(task, 'ideal'):.3f}")
    lmr_rate = discriminate(task, "lmr", LmrConfig(t=1.0, delta=1 / 3))
    print(f"lmr (delta=1/3) success:                {lmr_rate:.3f}  (guarantee: >= 2/3)")

    print()
    print("== what direct measurement can do with n copies ==")
    print(f"{'n':>5}  {'best distinguishing bias':>24}")
    for n in (1, 10, 100):
        print(f"{n:>5}  {binomial_tv(n, x, eps):>24.4f}")

    print()
    print("== copies: protocol budget vs full tomography ==")
    t = (math.pi / 2) / eps
    print(f"{'delta':>7}  {'lmr budget':>10}  {'tomography bound':>16}")
    for delta in (0.1, 0.01):
        lmr_n = math.ceil(4 * t * t / delta)
        tomo = tomography_bound(2, 1, t, delta)
        print(f"{delta:>7}  {lmr_n:>10}  {tomo:>16.3g}")


if __name__ == "__main__":
    main()
