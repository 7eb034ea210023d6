"""Regenerate crates/core/data/groups.txt.

Wallpaper groups are written by hand below. Space groups are taken from the
spglib Hall-symbol database in the default (ITA standard) setting for each
number; generator sets are reduced greedily, keeping centering translations
as explicit generators.

    pip install spglib && python3 tools/gen_groups.py > crates/core/data/groups.txt
"""
from fractions import Fraction

import numpy as np
import spglib

WALLPAPER = [
    (1, "p1", []),
    (2, "p2", ["-x,-y"]),
    (3, "pm", ["-x,y"]),
    (4, "pg", ["-x,y+1/2"]),
    (5, "cm", ["x+1/2,y+1/2", "-x,y"]),
    (6, "pmm", ["-x,-y", "-x,y"]),
    (7, "pmg", ["-x,-y", "-x+1/2,y"]),
    (8, "pgg", ["-x,-y", "-x+1/2,y+1/2"]),
    (9, "cmm", ["x+1/2,y+1/2", "-x,-y", "-x,y"]),
    (10, "p4", ["-y,x"]),
    (11, "p4m", ["-y,x", "-x,y"]),
    (12, "p4g", ["-y,x", "-x+1/2,y+1/2"]),
    (13, "p3", ["-y,x-y"]),
    (14, "p3m1", ["-y,x-y", "-y,-x"]),
    (15, "p31m", ["-y,x-y", "y,x"]),
    (16, "p6", ["x-y,x"]),
    (17, "p6m", ["x-y,x", "-y,-x"]),
]


def key(rot, trans):
    return (tuple(int(v) for v in rot.flatten()), tuple(trans))


def frac(v):
    f = Fraction(v).limit_denominator(12) % 1
    return f


def compose(a, b):
    ra, ta = a
    rb, tb = b
    r = ra @ rb
    t = tuple((sum(int(ra[i, j]) * tb[j] for j in range(3)) + ta[i]) % 1 for i in range(3))
    return (r, t)


def closure(gens):
    ident = (np.eye(3, dtype=int), (Fraction(0),) * 3)
    elems = {key(*ident): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = compose(g, a)
                k = key(*c)
                if k not in elems:
                    elems[k] = c
                    nxt.append(c)
        frontier = nxt
    return elems


def fmt_op(rot, trans):
    parts = []
    for i in range(3):
        s = ""
        for j, ax in enumerate("xyz"):
            c = int(rot[i, j])
            if c == 1:
                s += ("+" if s else "") + ax
            elif c == -1:
                s += "-" + ax
            elif c != 0:
                raise ValueError(rot)
        t = trans[i]
        if t != 0:
            s += "+" + str(t)
        parts.append(s)
    return ",".join(parts)


def default_hall_numbers():
    seen = {}
    for hall in range(1, 531):
        sg = spglib.get_spacegroup_type(hall)
        seen.setdefault(sg.number, (hall, sg))
    return [seen[n] for n in range(1, 231)]


def main():
    print("# dim number symbol generators (';'-separated, fractional triplet notation)")
    for number, symbol, gens in WALLPAPER:
        print(f"2 {number} {symbol} {';'.join(gens)}".rstrip())
    for hall, sg in default_hall_numbers():
        db = spglib.get_symmetry_from_database(hall)
        ops = []
        for r, t in zip(db["rotations"], db["translations"]):
            ops.append((np.array(r, dtype=int), tuple(frac(v) for v in t)))
        full = {key(*o): o for o in ops}
        centering = [o for o in ops if (o[0] == np.eye(3, dtype=int)).all() and any(o[1])]
        gens = []
        for o in centering + [o for o in ops if not (o[0] == np.eye(3, dtype=int)).all()]:
            if key(*o) not in closure(gens):
                gens.append(o)
        # drop redundant generators
        for o in list(gens):
            if any(o is c for c in centering):
                continue
            trial = [g for g in gens if g is not o]
            if len(closure(trial)) == len(full):
                gens = trial
        got = closure(gens)
        assert set(got) == set(full), sg.number
        symbol = sg.international_short.replace(" ", "")
        line = f"3 {sg.number} {symbol} {';'.join(fmt_op(*g) for g in gens)}"
        print(line.rstrip())


if __name__ == "__main__":
    main()
