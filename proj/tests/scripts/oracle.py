#!/usr/bin/env python3
"""Reference implementation used to freeze the golden corpus expectations.

Reads a bug directory with nothing but the stdlib and recomputes every
ranking from the definitions. Shares no code with the C++ library.
"""

import math
import re
import sys
from pathlib import Path

TECHNIQUES = ["OCHIAI", "STACKTRACE", "SB_ONLY", "SBEST"]
X_DEFAULT, M_DEFAULT = 15, 5
FRAME = re.compile(r"^\s*at\s+(\S+?)\(")


def coarse(mid):
    return mid.split("(", 1)[0]


def read_bug(bug_dir):
    bug_dir = Path(bug_dir)
    tests = []
    for line in (bug_dir / "tests.csv").read_text().splitlines()[1:]:
        if line.strip():
            name, outcome = line.split(",")[:2]
            tests.append((name, outcome == "FAIL"))
    columns = []
    for line in (bug_dir / "spectra.csv").read_text().splitlines():
        if not line.strip() or line == "name":
            continue
        ident, _, _ = line.rpartition(":")
        columns.append(ident if "#" in ident else None)
    rows = []
    for line in (bug_dir / "matrix.txt").read_text().splitlines():
        cells = [c for c in line.split() if c not in ("+", "-")]
        rows.append([int(c) for c in cells])
    cfg = {}
    for line in (bug_dir / "bug.cfg").read_text().splitlines():
        if "=" in line and not line.lstrip().startswith("#"):
            k, v = line.split("=", 1)
            cfg[k.strip()] = v.strip()
    prefixes = [p.strip() for p in cfg.get("internal_prefixes", "").split(",") if p.strip()]
    frames = []
    for line in (bug_dir / "stacktrace.txt").read_text().splitlines():
        m = FRAME.match(line)
        if m:
            qualified = m.group(1).split("/")[-1]
            cls, _, meth = qualified.rpartition(".")
            frames.append((cls, meth))
    truth = [l.strip() for l in (bug_dir / "buggy_methods.txt").read_text().splitlines()
             if l.strip() and not l.startswith("#")]
    return tests, columns, rows, prefixes, frames, truth


def internal_methods(frames, prefixes):
    def inside(cls):
        return any(cls == p or cls.startswith(p if p.endswith(".") else p + ".") for p in prefixes)

    out = []
    for cls, meth in frames:
        if not inside(cls):
            continue
        pkg, _, simple = cls.rpartition(".")
        mid = f"{pkg}${simple}#{meth}"
        if mid not in out:
            out.append(mid)
    return out


def spectra_methods(columns):
    seen = []
    for c in columns:
        if c is not None and c not in seen:
            seen.append(c)
    return seen


def covered(rows, columns, method, t):
    return any(rows[t][c] for c, owner in enumerate(columns) if owner == method)


def ochiai_scores(tests, columns, rows, failing):
    scores = {}
    for m in spectra_methods(columns):
        n11 = n10 = n01 = 0
        for t in range(len(tests)):
            cov = covered(rows, columns, m, t)
            f = t in failing
            n11 += cov and f
            n10 += cov and not f
            n01 += (not cov) and f
        denom = math.sqrt(float(n11 + n01) * float(n11 + n10))
        scores[m] = 0.0 if denom == 0.0 else n11 / denom
    return scores


def ordered(scores):
    return sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))


def position(trace, method):
    for i, t in enumerate(trace, 1):
        if t == coarse(method) or t == method:
            return i
    return None


def universe(columns, trace):
    meths = spectra_methods(columns)
    extra = [t for t in trace if not any(coarse(m) == t for m in meths)]
    return meths, extra


def proxies(tests, columns, rows, trace, x, m):
    top = trace[:m]
    per_test = []
    for t in range(len(tests)):
        n = 0
        for c, owner in enumerate(columns):
            if owner is not None and coarse(owner) in top and rows[t][c]:
                n += 1
        per_test.append(n)
    cands = sorted((t for t in range(len(tests)) if per_test[t] > 0),
                   key=lambda t: (-per_test[t], tests[t][0]))
    return cands[:x], per_test


def st(trace, method):
    p = position(trace, method)
    if p is None:
        return 0.0
    return 1.0 / p if p <= 10 else 0.1


def rankings(bug_dir, x=X_DEFAULT, m=M_DEFAULT):
    tests, columns, rows, prefixes, frames, _ = read_bug(bug_dir)
    trace = internal_methods(frames, prefixes)
    out = {}
    observed = {t for t, (_, failed) in enumerate(tests) if failed}
    out["OCHIAI"] = ordered(ochiai_scores(tests, columns, rows, observed))

    meths, extra = universe(columns, trace)
    stack = {u: (1.0 / position(trace, u) if position(trace, u) else 0.0) for u in meths + extra}
    out["STACKTRACE"] = ordered(stack)

    selected, _ = proxies(tests, columns, rows, trace, x, m)
    sb = ochiai_scores(tests, columns, rows, set(selected)) if selected else {k: 0.0 for k in meths}
    sb.update({e: 0.0 for e in extra})
    out["SB_ONLY"] = ordered({k: v + 0.0 for k, v in sb.items()})
    out["SBEST"] = ordered({k: v + st(trace, k) for k, v in sb.items()})
    return out


def first_rank(ranked, truth):
    for i, (mid, _) in enumerate(ranked, 1):
        if mid in truth or coarse(mid) in truth:
            return i
    return None


def average_precision(ranked, truth):
    credited, hits, total = set(), 0, 0.0
    for k, (mid, _) in enumerate(ranked, 1):
        match = next((t for t in truth if t not in credited and (t == mid or t == coarse(mid))), None)
        if match is not None:
            credited.add(match)
            hits += 1
            total += hits / k
    return total / len(truth)


def main(argv):
    for bug in argv[1:]:
        for tech, ranked in rankings(bug).items():
            print(bug, tech, [mid for mid, _ in ranked])


if __name__ == "__main__":
    main(sys.argv)
