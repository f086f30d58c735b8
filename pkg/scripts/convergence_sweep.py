"""Remainder sup norms and fitted orders over an eps ladder.

Usage: python3 scripts/convergence_sweep.py [sigma ...]
"""
import sys

from ionsoliton.analysis import convergence_campaign

LADDER = (0.1, 0.05, 0.025, 0.0125, 0.00625)


def report(sigma):
    rep = convergence_campaign(sigma, 1.0, LADDER)
    print(f"sigma={sigma:g}")
    print("  eps        " + "  ".join(f"{k:>11s}" for k in ("n_R", "u_R", "phi_R", "weighted")))
    k0 = rep.sup_norms["k0"]
    for i, e in enumerate(rep.epsilons):
        print(f"  {e:<9g}  " + "  ".join(f"{k0[k][i]:11.4e}" for k in ("n_R", "u_R", "phi_R", "weighted")))
    for k, orders in rep.fitted_order_by_k.items():
        print(f"  order {k}: " + ", ".join(f"{n}={v:.3f}" for n, v in orders.items()))
    for f in rep.failures:
        print(f"  failed eps={f['epsilon']}: {f['error']}")


if __name__ == "__main__":
    for s in (sys.argv[1:] or ["0", "2"]):
        report(float(s))
