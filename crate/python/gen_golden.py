"""Regenerates the golden diagram corpus under crates/core/data/golden.

Built directly from the definitions (Bourbaki Dynkin trees, the extended
Dynkin trees, unit-weight cycles, crowns and T-diagrams), without the Rust
library, so the acceptance suite can use it as an independent oracle.
"""

import itertools
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "data" / "golden"


def chain(m):
    return [(i, i + 1, 1) for i in range(m - 1)]


def dynkin(letter, n):
    if letter == "A":
        return chain(n)
    if letter == "B":
        e = chain(n)
        e[-1] = (n - 2, n - 1, 2)
        return e
    if letter == "D":
        return chain(n - 1) + [(n - 3, n - 1, 1)]
    if letter == "E":
        return [(0, 2, 1), (1, 3, 1)] + [(i, i + 1, 1) for i in range(2, n - 1)]
    if letter == "F":
        return [(0, 1, 1), (1, 2, 2), (2, 3, 1)]
    if letter == "G":
        return [(0, 1, 3)]
    raise ValueError(letter)


def automorphisms(n, edges):
    und = {frozenset((a, b)): w for a, b, w in edges}
    out = []
    for p in itertools.permutations(range(n)):
        if all(und.get(frozenset((p[a], p[b]))) == w for a, b, w in edges):
            out.append(p)
    return out


def oriented(edges, bits):
    return [(a, b, w) if not bits >> i & 1 else (b, a, w) for i, (a, b, w) in enumerate(edges)]


def key(edges):
    return tuple(sorted(edges))


def orientation_classes(n, edges, limit=None):
    """One representative per orbit of orientations under the automorphisms."""
    auts = automorphisms(n, edges) if n <= 8 else [tuple(range(n))]
    seen = set()
    reps = []
    for bits in range(2 ** len(edges)):
        e = oriented(edges, bits)
        k = min(key([(p[a], p[b], w) for a, b, w in e]) for p in auts)
        if k not in seen:
            seen.add(k)
            reps.append(e)
        if limit and len(reps) >= limit:
            break
    return reps


def diagram(n, edges):
    return {"n": n, "edges": [{"tail": a + 1, "head": b + 1, "w": w} for a, b, w in edges]}


def dynkin_corpus():
    entries = []
    kinds = [("A", n) for n in range(1, 9)] + [("B", n) for n in range(2, 9)]
    kinds += [("D", n) for n in range(4, 9)] + [("E", n) for n in (6, 7, 8)] + [("F", 4), ("G", 2)]
    for letter, n in kinds:
        for e in orientation_classes(n, dynkin(letter, n)):
            entries.append({"type": f"{letter}{n}", "diagram": diagram(n, e)})
    return entries


def extended_trees():
    """Undirected extended Dynkin trees with at most 9 vertices."""
    out = []
    for n in range(3, 9):
        # fork of two leaves at the left end, double edge at the right
        e = [(0, 2, 1), (1, 2, 1)] + [(i, i + 1, 1) for i in range(2, n)]
        e[-1] = (n - 1, n, 2)
        out.append((f"B{n}^(1)", n + 1, e))
    for n in range(2, 9):
        e = chain(n + 1)
        e[0] = (0, 1, 2)
        e[-1] = (n - 1, n, 2)
        out.append((f"C{n}^(1)", n + 1, e))
    for n in range(4, 9):
        m = n - 3
        e = [(i, i + 1, 1) for i in range(m - 1)]
        e += [(0, m, 1), (0, m + 1, 1), (m - 1, m + 2, 1), (m - 1, m + 3, 1)]
        out.append((f"D{n}^(1)", n + 1, e))
    out.append(("E6^(1)", 7, chain(5) + [(2, 5, 1), (5, 6, 1)]))
    out.append(("E7^(1)", 8, chain(7) + [(3, 7, 1)]))
    out.append(("E8^(1)", 9, chain(8) + [(2, 8, 1)]))
    out.append(("F4^(1)", 5, [(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 4, 1)]))
    for a in (1, 2, 3):
        out.append((f"G2^(1) a={a}", 3, [(0, 1, 3), (1, 2, a)]))
    return out


def extended_corpus():
    entries = []
    for name, n, e in extended_trees():
        limit = None if len(e) <= 6 else 6
        for o in orientation_classes(n, e, limit):
            entries.append({"name": name, "diagram": diagram(n, o)})
    return entries


def cycle_corpus():
    """Unit-weight cycles of length 3..8 that are not cyclically oriented."""
    entries = []
    for m in range(3, 9):
        edges = [(i, (i + 1) % m, 1) for i in range(m)]
        seen = set()
        for bits in range(1, 2 ** m - 1):
            e = oriented(edges, bits)
            k = min(
                key([(p[a], p[b], w) for a, b, w in e])
                for p in [tuple((s * i + r) % m for i in range(m)) for r in range(m) for s in (1, -1)]
            )
            if k not in seen:
                seen.add(k)
                entries.append({"length": m, "diagram": diagram(m, e)})
    return entries


def t_diagram(p, q, r):
    e = []
    nxt = 1
    for length in (p, q, r):
        prev = 0
        for _ in range(length):
            e.append((prev, nxt, 1))
            prev = nxt
            nxt += 1
    return nxt, e


def crown(p, q, r, s):
    """S^s_{p,q,r}: branches with p-1, q-1, r-1 vertices at three
    consecutive vertices of a cyclically oriented (s+3)-cycle. The r branch
    points into the cycle and the p branch away from it, so that without the
    q branch all edges follow one direction."""
    c = s + 3
    e = [(i, (i + 1) % c, 1) for i in range(c)]
    nxt = c
    for root, length, inward in ((0, p - 1, False), (1, q - 1, False), (2, r - 1, True)):
        prev = root
        for _ in range(length):
            e.append((nxt, prev, 1) if inward else (prev, nxt, 1))
            prev = nxt
            nxt += 1
    return nxt, e


def crown_corpus():
    entries = []
    for p, q, r in itertools.product(range(1, 9), repeat=3):
        for s in range(0, 9):
            if p + q + r + s > 9:
                continue
            n, e = crown(p, q, r, s)
            tn, te = t_diagram(p + r - 1, q, s)
            assert n == tn == p + q + r + s
            entries.append({"p": p, "q": q, "r": r, "s": s, "crown": diagram(n, e), "tree": diagram(tn, te)})
    return entries


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, data in [
        ("dynkin", dynkin_corpus()),
        ("extended", extended_corpus()),
        ("cycles", cycle_corpus()),
        ("crowns", crown_corpus()),
    ]:
        (OUT / f"{name}.json").write_text(json.dumps(data, separators=(",", ":")) + "\n")
        print(name, len(data))


if __name__ == "__main__":
    main()
