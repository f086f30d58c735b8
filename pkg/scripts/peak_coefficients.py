"""Second-order peak coefficients: (n_star - 1 - 3 gamma eps/V)/eps^2 as eps -> 0.

Shows the limits that the peak error per eps^2 settles to, down to eps = 1e-4.
"""
from ionsoliton import ModelParams
from ionsoliton.analysis import peak_check

for sigma in (0.0, 2.0):
    print(f"sigma={sigma:g}")
    for k in range(0, 11):
        eps = 0.1 / 2 ** k
        pc = peak_check(ModelParams(sigma, 1.0, eps))
        signed = (pc.n_star - pc.predicted[0], pc.u_star - pc.predicted[1],
                  pc.phi_star - pc.predicted[2])
        print(f"  eps={eps:<11.4e} " + "  ".join(f"{v / eps ** 2:9.5f}" for v in signed))
