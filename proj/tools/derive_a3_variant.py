#!/usr/bin/env python3
"""Solve Phi(a) f(a) = Phi(b) f(b) over all weight classes of a small graph.

Reads the class table from `qgraph expand`, builds the equations in sympy for
every pair of zero patterns with equal delta' zero counts, and prints the
nontrivial solution families. Used to pin the delta'-delta-delta' chain.

    tools/derive_a3_variant.py build/qgraph tests/corpus/a3_pdp.graph
"""

import argparse
import itertools
import json
import subprocess
from fractions import Fraction

import sympy as sp


def read_graph(path):
    types, degree = {}, {}
    for line in open(path):
        t = line.split("#", 1)[0].split()
        if not t:
            continue
        if t[0] == "vertex":
            types[t[1]] = t[2]
            degree[t[1]] = 0
        elif t[0] == "edge":
            degree[t[2]] += 1
            degree[t[3]] += 1
    return types, degree


def class_polys(table, symbols):
    out = []
    for c in table["classes"]:
        f = 0
        for term in c["f"]:
            m = sp.Rational(Fraction(term["value"]))
            for v in term["vars"]:
                m *= symbols[v]
            f += m
        out.append((c["weight_text"], f))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("qgraph", help="path to the qgraph executable")
    ap.add_argument("graph", help="graph file")
    args = ap.parse_args()

    types, degree = read_graph(args.graph)
    ids = list(types)
    table = json.loads(subprocess.run([args.qgraph, "expand", args.graph], check=True, capture_output=True,
                                      text=True).stdout)
    xs = {v: sp.Symbol("x_" + v) for v in ids}
    ys = {v: sp.Symbol("y_" + v) for v in ids}
    primes = [v for v in ids if types[v] == "delta'"]

    def phi(values):
        p = sp.Integer(1)
        for v in primes:
            if values[v] != 0:
                p *= sp.Integer(degree[v]) / values[v]
        return p

    seen = set()
    for za in itertools.product([False, True], repeat=len(ids)):
        for zb in itertools.product([False, True], repeat=len(ids)):
            if sum(za[ids.index(v)] for v in primes) != sum(zb[ids.index(v)] for v in primes):
                continue
            a = {v: 0 if z else xs[v] for v, z in zip(ids, za)}
            b = {v: 0 if z else ys[v] for v, z in zip(ids, zb)}
            fa = class_polys(table, a)
            fb = class_polys(table, b)
            pa, pb = phi(a), phi(b)
            eqs = [sp.numer(sp.together(pa * f - pb * g)) for (_, f), (_, g) in zip(fa, fb)]
            unknowns = sorted({s for s in list(a.values()) + list(b.values()) if s != 0}, key=str)
            for sol in sp.solve(eqs, unknowns, dict=True):
                aa = tuple(sp.simplify(sp.sympify(a[v]).subs(sol)) for v in ids)
                bb = tuple(sp.simplify(sp.sympify(b[v]).subs(sol)) for v in ids)
                if aa == bb:
                    continue
                if any(z is False and val == 0 for z, val in zip(za + zb, aa + bb)):
                    continue
                key = (aa, bb)
                if key in seen or (bb, aa) in seen:
                    continue
                seen.add(key)
                print(f"{list(aa)}  ~  {list(bb)}")


if __name__ == "__main__":
    main()
