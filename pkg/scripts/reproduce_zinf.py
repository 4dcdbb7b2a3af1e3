"""The block family on the infinite lattice: trivial K-theory at every cap.

Every finite intersection keeps a nonpositive half-ray factor and is
flasque, so the whole first page vanishes regardless of the truncation
prefix m or the index-set cap.
"""

from coarsek.assembly import run_mv
from coarsek.coarse import zinf_mv_input

if __name__ == "__main__":
    print(f"{'m':>2} {'cap':>4} {'K_0':>4} {'K_1':>4} {'nonzero E1 cells':>18}")
    for m in range(2, 9):
        for cap in range(1, 5):
            run, report = run_mv(zinf_mv_input(m, cap))
            cells = sum(1 for _ in run.first_page.cells)
            print(f"{m:>2} {cap:>4} {str(report.degree(0).assembled):>4} "
                  f"{str(report.degree(1).assembled):>4} {cells:>18}")
