"""Table of phi(tau) / (q tau^(n-1) / (n-1)!) for a few (p, n)."""
import argparse

from aqengine.series import asymptotic_check


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--tau", type=float, nargs="+", default=[4, 6, 8, 10, 12, 14])
    args = ap.parse_args()
    print("p  n  " + "  ".join(f"tau={t:<6g}" for t in args.tau))
    for p in args.p:
        for n in args.n:
            rep = asymptotic_check(p, 1, n, args.tau)
            print(f"{p}  {n}  " + "  ".join(f"{r:<10.5f}" for r in rep.ratios)
                  + ("  increasing" if rep.increasing else ""))


if __name__ == "__main__":
    main()
