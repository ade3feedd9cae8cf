"""Compare the admissible-word series with chain computations over a grid."""
import argparse
import time

from aqengine.series import cartan_theta, sphere_theta_from_chains


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--T", type=int, default=10)
    ap.add_argument("--p", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--q", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()
    bad = 0
    for p in args.p:
        for q in args.q:
            for n in args.n:
                t0 = time.perf_counter()
                a = cartan_theta(p, q, n, args.T)
                b = sphere_theta_from_chains(p, q, n, args.T)
                ok = a == b
                bad += not ok
                print(f"p={p} q={q} n={n}  {'match' if ok else 'MISMATCH'}  {list(a.coeffs)}"
                      + ("" if ok else f" vs {list(b.coeffs)}") + f"  ({time.perf_counter() - t0:.1f}s)")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
