"""Random monomial-ideal and binomial presentations: oracle vs engine on H^Q_0..2."""
import argparse
import warnings

import numpy as np

from aqengine.oracles import hq01, hq2_ls, minimalize
from aqengine.presentation import Presentation, monomials_of_weight
from aqengine.resolutions import aq_homology, resolve


def random_presentation(rng, p, nvars, nrels, maxdeg):
    weights = [1] * nvars
    rels = []
    for _ in range(nrels):
        d = int(rng.integers(2, maxdeg + 1))
        monos = monomials_of_weight(weights, d)
        k = int(rng.integers(1, 3))
        pick = rng.choice(len(monos), size=min(k, len(monos)), replace=False)
        rels.append({monos[i]: int(rng.integers(1, p)) for i in pick})
    names = "xyzw"[:nvars]
    return Presentation(p, [(c, 1) for c in names], rels)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--W", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    disagree = 0
    for k in range(args.count):
        p = int(rng.choice([2, 3, 5]))
        P = random_presentation(rng, p, int(rng.integers(1, 3)), int(rng.integers(1, 4)), 3)
        MP = minimalize(P)
        h0, h1 = hq01(MP, args.W)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            h2 = hq2_ls(MP, args.W)
        hq = aq_homology(resolve(P, 3, args.W))
        ok = (hq.by_weight(0), hq.by_weight(1), hq.by_weight(2)) == (h0, h1, h2)
        disagree += not ok
        print(f"{k:3d} p={p} {P.format():40s} H^Q_2={h2}  {'agree' if ok else 'DISAGREE'}")
    print(f"{args.count - disagree}/{args.count} agree")
    raise SystemExit(1 if disagree else 0)


if __name__ == "__main__":
    main()
