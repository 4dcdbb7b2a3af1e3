"""Wedge of k rays: K_1 is free of rank k - 1, K_0 vanishes.

The finite wedges are exact; the countable wedge is realized as a
truncation sweep whose odd-degree answer keeps growing with the cap, so
each report carries the truncation marking.
"""

from coarsek.assembly import run_mv, truncation_sweep
from coarsek.coarse import wedge_mv_input

if __name__ == "__main__":
    print("finite wedges")
    print(f"{'k':>3} {'K_0':>5} {'K_1':>6}")
    for k in range(2, 11):
        _, report = run_mv(wedge_mv_input(k))
        print(f"{k:>3} {str(report.degree(0).assembled):>5} "
              f"{str(report.degree(1).assembled):>6}")

    print("\ncountable wedge, truncated")
    sweep = truncation_sweep(lambda c: wedge_mv_input(c, truncated=True), caps=range(1, 9))
    for cap in sweep.caps:
        rep = sweep.reports[cap]
        print(f"cap {cap}: K_1 = {rep.degree(1).assembled} (truncated at {rep.truncated_at})")
    k1 = sweep.assembled_stable_at[1]
    print("K_1 stable within sweep:" , "no (column keeps growing)" if k1 is None else f"from cap {k1}")
