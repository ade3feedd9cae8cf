"""Command line front end: ``aq <command> --input FILE [options]``.

Input format (one statement per line or separated by ';', '#' starts a comment):

    p=2
    vars: x:1, y:1
    rels: x^2 + x*y, y^3
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field

from .presentation import Presentation, PresentationError

__all__ = ["parse_presentation", "ParseError", "JobConfig", "run", "main", "emit_json"]

SCHEMA = 1
COMMANDS = ("homology", "ci-check", "envelope", "em-series", "phi", "suspend")


class ParseError(PresentationError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line, self.col = line, col


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(\^|\*|\+|-|\(|\)))")


def _statements(text: str):
    """Yield (line, col, statement) with comments stripped."""
    for ln, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        start = 0
        for part in body.split(";"):
            col = start + 1 + (len(part) - len(part.lstrip()))
            if part.strip():
                yield ln, col, part.strip()
            start += len(part) + 1


def _split_commas(s: str, base_col: int):
    pos = 0
    for piece in s.split(","):
        lead = len(piece) - len(piece.lstrip())
        yield base_col + pos + lead, piece.strip()
        pos += len(piece) + 1


def _parse_poly(src: str, names: list, p: int, line: int, col: int) -> dict:
    """Sum of terms c*x^a*y^b...; returns {exponent tuple: coef mod p}."""
    toks = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos:].strip()[0]!r}", line, col + pos)
        tcol = col + m.start(m.lastindex)
        toks.append((m.group(m.lastindex), m.lastindex, tcol))
        pos = m.end()
    if not toks:
        raise ParseError("empty polynomial", line, col)
    k = len(names)
    index = {n: i for i, n in enumerate(names)}
    out: dict = {}
    i = 0

    def expect_int():
        nonlocal i
        if i >= len(toks) or toks[i][1] != 1:
            c = toks[i][2] if i < len(toks) else col + len(src)
            raise ParseError("expected an integer exponent", line, c)
        v = int(toks[i][0])
        i += 1
        return v

    while i < len(toks):
        sign = 1
        while i < len(toks) and toks[i][0] in "+-" and toks[i][1] == 3:
            if toks[i][0] == "-":
                sign = -sign
            i += 1
        coef, mono = sign, [0] * k
        need_factor = True
        while i < len(toks) and need_factor:
            tok, kind, tcol = toks[i]
            if kind == 1:
                coef *= int(tok)
                i += 1
            elif kind == 2:
                if tok not in index:
                    raise ParseError(f"unknown variable {tok!r}", line, tcol)
                i += 1
                e = 1
                if i < len(toks) and toks[i][0] == "^":
                    i += 1
                    e = expect_int()
                mono[index[tok]] += e
            else:
                raise ParseError(f"unexpected {tok!r}", line, tcol)
            if i < len(toks) and toks[i][0] == "*":
                i += 1
            else:
                need_factor = False
        if need_factor:
            raise ParseError("dangling '*'", line, col + len(src))
        if i < len(toks) and toks[i][0] not in "+-":
            raise ParseError(f"unexpected {toks[i][0]!r}", line, toks[i][2])
        m = tuple(mono)
        out[m] = (out.get(m, 0) + coef) % p
    return {m: c for m, c in out.items() if c}


def parse_presentation(text: str) -> Presentation:
    p = None
    variables, rel_src = [], []
    for line, col, st in _statements(text):
        if st.startswith("p") and "=" in st and st.split("=", 1)[0].strip() == "p":
            val = st.split("=", 1)[1].strip()
            if not val.isdigit():
                raise ParseError("p must be a positive integer", line, col)
            p = int(val)
        elif st.startswith("vars:"):
            body = st[5:]
            for c, item in _split_commas(body, col + 5):
                if not item:
                    continue
                m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(\d+)", item)
                if not m:
                    raise ParseError(f"bad variable declaration {item!r} (want name:weight)", line, c)
                variables.append((m.group(1), int(m.group(2))))
        elif st.startswith("rels:"):
            for c, item in _split_commas(st[5:], col + 5):
                if item:
                    rel_src.append((line, c, item))
        else:
            raise ParseError(f"unrecognised statement {st[:20]!r}", line, col)
    if p is None:
        raise ParseError("missing 'p=<prime>'", 1, 1)
    try:
        P0 = Presentation(p, variables, [])
    except PresentationError as e:
        raise PresentationError(str(e)) from None
    names = P0.names
    rels = []
    for line, c, item in rel_src:
        r = _parse_poly(item, names, p, line, c)
        if tuple([0] * len(names)) in r:
            raise ParseError("relation has nonzero constant term", line, c)
        if not r:
            continue
        if len({P0.mono_weight(m) for m in r}) > 1:
            raise ParseError("relation is not weight-homogeneous", line, c)
        rels.append(r)
    return Presentation(p, variables, rels)


# -- reports -------------------------------------------------------------------

@dataclass
class JobConfig:
    command: str
    input: str | None = None
    p: int | None = None
    q: int = 1
    n: int | None = None
    N: int = 4
    W: int = 12
    T: int = 10
    tau: list = field(default_factory=lambda: [6.0, 8.0, 10.0, 12.0])
    format: str = "text"
    out: str | None = None
    seed: int = 0
    verify: bool = False
    selfcheck: bool = True


def _table(gd, smax=None) -> dict:
    smax = gd.N if smax is None else smax
    return {str(s): {str(w): v for w, v in sorted(gd.by_weight(s).items())} for s in range(smax + 1)}


def _wtable(d: dict) -> dict:
    return {str(w): v for w, v in sorted(d.items())}


def _range(N: int, W: int) -> dict:
    return {"N": N, "W": W, "certified_degrees": list(range(N)), "uncertain_degrees": [N],
            "weight_complete": True}


def _self_check(X, L: int, wmax: int) -> None:
    """Simplicial identities on explicit small blocks, plus d^2 = 0."""
    from .algebra import indecomposables
    from .simplicial import check_simplicial_identities, normalized_complex

    for w in range(1, wmax + 1):
        check_simplicial_identities(X.level_matrices(L, w))
    normalized_complex(indecomposables(X, L), check=True)


def _load(cfg: JobConfig) -> Presentation:
    if cfg.input is None:
        raise PresentationError(f"{cfg.command} needs --input")
    with open(cfg.input) as fh:
        P = parse_presentation(fh.read())
    if cfg.p is not None and cfg.p != P.p:
        raise PresentationError(f"--p {cfg.p} disagrees with the input's p={P.p}")
    return P


def _run_homology(cfg, P):
    from .oracles import hq01, hq2_ls, minimalize
    from .resolutions import aq_homology, resolve

    R = resolve(P, cfg.N, cfg.W)
    if cfg.selfcheck:
        _self_check(R.X, min(cfg.N, 3), min(cfg.W, 3))
    hq = aq_homology(R)
    MP = minimalize(P)
    h0, h1 = hq01(MP, cfg.W)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        h2 = hq2_ls(MP, cfg.W)
    oracle = {"0": _wtable(h0), "1": _wtable(h1), "2": _wtable(h2)}
    top = min(cfg.N - 1, 2)
    agree = all(_table(hq)[str(s)] == oracle[str(s)] for s in range(top + 1))
    return {
        "presentation": P.format(),
        "generators": [[g.name, g.degree, g.weight] for g in R.X.generators],
        "pi": _table(R.homotopy()),
        "hq": _table(hq),
        "oracle": oracle,
        "oracle_agrees": agree,
    }


def _run_ci(cfg, P):
    from .oracles import ci_check

    v = ci_check(P, cfg.N, cfg.W)
    return {
        "presentation": P.format(),
        "ci": v.ci,
        "agree": v.agree,
        "witness": list(v.witness) if v.witness else None,
        "simplicial_dimension": v.simplicial_dimension,
        "oracle": {str(s): _wtable(d) for s, d in v.oracle.items()},
        "engine": {str(s): _wtable(d) for s, d in v.engine.items()},
        "eliminated": [list(e) for e in v.eliminated],
        "notes": v.notes,
    }


def _run_envelope(cfg, P):
    from .resolutions import postnikov_envelope, recognize_sphere, resolve
    from .series import serre_inequality_check

    R = resolve(P, cfg.N, cfg.W)
    stages = []
    cur = R
    for n in range(0, cfg.N - 1):
        st = postnikov_envelope(cur, n)
        les = st.record.les_exactness()
        if not les.holds:
            from .resolutions import InvariantViolation
            raise InvariantViolation(f"transitivity sequence not exact: {les.first_failure()}")
        T = min(cfg.T, cfg.N - 1)
        serre = serre_inequality_check(st.record, T)
        verdict = recognize_sphere(st.next)
        stages.append({
            "n": n,
            "fn_dim": st.fn.hq_dim,
            "hurewicz_rank": st.fn.hurewicz_rank,
            "pi": _table(st.next.homotopy()),
            "hq": _table(st.next.X.aq_dims()),
            "connected_through_n": st.connectivity_ok,
            "hq_shift_ok": st.hq_shift_ok,
            "les_exact": les.holds,
            "serre": {"T": serre.T, "lhs": serre.lhs, "rhs": serre.rhs, "equal": serre.equal},
            "recognition": {"concentrated": verdict.concentrated, "n": verdict.n, "dim": verdict.dim,
                            "matches": verdict.matches, "detail": verdict.detail},
        })
        cur = st.next
        # a recognized sphere S(V, m) has A(m+1) = F, and F is the end of the tower
        if verdict.concentrated and verdict.matches or not any(cur.X.aq_dims().dims.values()):
            break
    return {"presentation": P.format(), "stages": stages,
            "note": "completion is the identity in the weight-complete range"}


def _run_em_series(cfg):
    from .series import cartan_theta, sphere_theta_from_chains

    p = 2 if cfg.p is None else cfg.p
    n = 2 if cfg.n is None else cfg.n
    th = cartan_theta(p, cfg.q, n, cfg.T)
    out = {"p": p, "q": cfg.q, "n": n, "T": cfg.T, "coefficients": list(th.coeffs)}
    if cfg.verify:
        ch = sphere_theta_from_chains(p, cfg.q, n, cfg.T)
        out["chains"] = list(ch.coeffs)
        out["cross_checked"] = list(ch.coeffs) == list(th.coeffs)
        if not out["cross_checked"]:
            from .resolutions import InvariantViolation
            raise InvariantViolation("Cartan product disagrees with chains")
    if p != 2:
        out["status"] = "cross-checked against chains" if out.get("cross_checked") else \
            "extrapolated per Cartan basis"
    return out


def _run_phi(cfg):
    from .series import asymptotic_check

    p = 2 if cfg.p is None else cfg.p
    n = 2 if cfg.n is None else cfg.n
    rep = asymptotic_check(p, cfg.q, n, list(cfg.tau))
    return {"p": p, "q": cfg.q, "n": n, "report": _plain(asdict(rep))}


def _run_suspend(cfg, P):
    from .resolutions import aq_homology, resolve, suspension

    R = resolve(P, cfg.N, cfg.W)
    S, rec = suspension(R)
    les = rec.les_exactness()
    if not les.holds:
        from .resolutions import InvariantViolation
        raise InvariantViolation(f"transitivity sequence not exact: {les.first_failure()}")
    ha, hs = aq_homology(R), S.X.aq_dims()
    shift = all(hs.get(s, w) == ha.get(s - 1, w) for s in range(1, cfg.N) for w in range(cfg.W + 1))
    return {"presentation": P.format(), "pi": _table(S.homotopy()), "hq": _table(hs),
            "hq_of_input": _table(ha), "hq_shift_ok": shift, "les_exact": les.holds}


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if hasattr(x, "item"):
        return x.item()
    return x


def run(cfg: JobConfig) -> dict:
    if cfg.command not in COMMANDS:
        raise PresentationError(f"unknown command {cfg.command}")
    if cfg.N < 1 or cfg.W < 0 or cfg.T < 0:
        raise PresentationError("ranges must be non-negative (N >= 1)")
    body: dict
    if cfg.command == "em-series":
        body = _run_em_series(cfg)
    elif cfg.command == "phi":
        body = _run_phi(cfg)
    else:
        P = _load(cfg)
        if cfg.command == "ci-check" and cfg.N < 2:
            raise PresentationError("ci-check needs N >= 2")
        fn = {"homology": _run_homology, "ci-check": _run_ci, "envelope": _run_envelope,
              "suspend": _run_suspend}[cfg.command]
        body = fn(cfg, P)
    cfg_echo = {k: v for k, v in asdict(cfg).items() if k not in ("out", "format")}
    rng = {"T": cfg.T} if cfg.command in ("em-series", "phi") else _range(cfg.N, cfg.W)
    return _plain({"schema": SCHEMA, "command": cfg.command, "config": cfg_echo,
                   "range": rng, "result": body})


def emit_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def emit_text(report: dict, elapsed: float | None = None) -> str:
    lines = [f"aq {report['command']}  (schema {report['schema']})"]
    rng = report["range"]
    if "N" in rng:
        lines.append(f"certified range: degrees < {rng['N']}, weight <= {rng['W']} (weight-complete)")
    else:
        lines.append(f"series order: T = {rng['T']}")
    res = report["result"]

    def table(name, t):
        lines.append(f"{name}:")
        for s, row in t.items():
            cells = ", ".join(f"w{w}:{v}" for w, v in row.items()) or "0"
            lines.append(f"  s={s}: {cells}")

    for key, val in res.items():
        if key in ("pi", "hq", "hq_of_input", "oracle", "engine") and isinstance(val, dict):
            table(key, val)
        elif key == "stages":
            for st in val:
                lines.append(f"stage n={st['n']}: f_n on {st['fn_dim']} classes, "
                             f"recognition: {st['recognition']['detail']}")
                table("  pi(A(n+1))", st["pi"])
                table("  H^Q(A(n+1))", st["hq"])
        else:
            lines.append(f"{key}: {json.dumps(val, sort_keys=True)}")
    if elapsed is not None:
        lines.append(f"time: {elapsed:.2f}s")
    return "\n".join(lines) + "\n"


def _tau_list(s: str) -> list:
    try:
        return [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("--tau wants a comma separated list of numbers")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aq", description="Andre-Quillen homology engine")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input")
    ap.add_argument("--p", type=int)
    ap.add_argument("--q", type=int, default=1)
    ap.add_argument("--n", type=int)
    ap.add_argument("--N", type=int, default=4)
    ap.add_argument("--W", type=int, default=12)
    ap.add_argument("--T", type=int, default=10)
    ap.add_argument("--tau", type=_tau_list, default=[6.0, 8.0, 10.0, 12.0])
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--out")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--verify", action="store_true", help="cross-check series against chains")
    ap.add_argument("--no-selfcheck", dest="selfcheck", action="store_false")
    return ap


def main(argv=None) -> int:
    from .simplicial import SimplicialIdentityError

    threads = os.environ.get("AQ_THREADS")
    if threads and threads.isdigit():
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # usage errors are domain errors; exit code 2 stays reserved for invariants
        return 0 if e.code in (0, None) else 1
    cfg = JobConfig(**vars(args))
    t0 = time.perf_counter()
    try:
        report = run(cfg)
    except (AssertionError, SimplicialIdentityError) as e:
        print(f"aq: invariant violation: {e}", file=sys.stderr)
        return 2
    except (PresentationError, ValueError, OSError) as e:
        print(f"aq: error: {e}", file=sys.stderr)
        return 1
    text = emit_json(report) if cfg.format == "json" else emit_text(report, time.perf_counter() - t0)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
