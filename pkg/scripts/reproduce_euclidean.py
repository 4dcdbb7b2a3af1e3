"""K-theory of the Roe algebra of R^n from its block cover, n = 1..6.

Expected: Z exactly in degrees of the same parity as n, collapse on the
first page (a single nonzero column).
"""

from coarsek.assembly import run_mv
from coarsek.coarse import rn_mv_input

if __name__ == "__main__":
    print(f"{'n':>2} {'K_0':>6} {'K_1':>6} {'stable at':>10}")
    for n in range(1, 7):
        run, report = run_mv(rn_mv_input(n))
        k0 = report.degree(0).assembled
        k1 = report.degree(1).assembled
        print(f"{n:>2} {str(k0):>6} {str(k1):>6} {report.stabilized_at:>10}")
