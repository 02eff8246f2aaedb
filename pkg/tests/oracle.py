"""Independent evaluation of the permutation-sum formula with sympy.

Only for covers whose charts share one coordinate system through identity
changes, so no pullbacks are needed.
"""
from itertools import permutations
from math import factorial

import sympy as sp

from tcocycle.ratfunc import to_expression


def to_sympy(f, symbols):
    return sp.sympify(to_expression(f).replace("^", "**"), locals=symbols)


def _matrix(m, symbols):
    return sp.Matrix([[to_sympy(e, symbols) for e in row] for row in m.entries])


def _wedge(a, b):
    out = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            if set(ka) & set(kb):
                continue
            key = ka + kb
            sign = 1
            lst = list(key)
            for i in range(len(lst)):
                for j in range(i + 1, len(lst)):
                    if lst[i] > lst[j]:
                        sign = -sign
            key = tuple(sorted(key))
            out[key] = out.get(key, 0) + sign * ca * cb
    return out


def _mat_wedge(A, B):
    n = len(A)
    return [[_sum_forms([_wedge(A[i][l], B[l][j]) for l in range(n)]) for j in range(n)] for i in range(n)]


def _sum_forms(forms):
    out = {}
    for f in forms:
        for k, c in f.items():
            out[k] = out.get(k, 0) + c
    return out


def maurer_cartan(g, names):
    syms = [sp.Symbol(n) for n in names]
    inv = g.adjugate() / g.det()
    n = g.shape[0]
    return [
        [{(v,): sp.cancel(sum(inv[i, l] * sp.diff(g[l, j], syms[v]) for l in range(n))) for v in range(len(syms))}
         for j in range(n)]
        for i in range(n)
    ]


def t_component(bundle, t, names):
    """``1/(k+1)! sum sgn(s) tr prod_l A_{s(l) s(k)}`` evaluated symbolically."""
    symbols = {n: sp.Symbol(n) for n in names}
    k = len(t) - 1
    g = {}
    for i in t:
        for j in t:
            if i != j:
                g[(i, j)] = _matrix(bundle.transition(i, j), symbols) if i < j else None
    for (i, j) in list(g):
        if i > j:
            g[(i, j)] = (g[(j, i)].adjugate() / g[(j, i)].det()).applyfunc(sp.cancel)
    A = {pair: maurer_cartan(m, names) for pair, m in g.items()}
    total = {}
    for perm in permutations(range(k + 1)):
        sign = 1
        for a in range(k + 1):
            for b in range(a + 1, k + 1):
                if perm[a] > perm[b]:
                    sign = -sign
        last = t[perm[k]]
        prod = None
        for l in range(k):
            factor = A[(t[perm[l]], last)]
            prod = factor if prod is None else _mat_wedge(prod, factor)
        tr = _sum_forms([prod[i][i] for i in range(len(prod))])
        for key, c in tr.items():
            total[key] = total.get(key, 0) + sign * c
    out = {}
    for key, c in total.items():
        c = sp.cancel(c / factorial(k + 1))
        if c != 0:
            out[key] = c
    return out


def form_to_sympy(w, names):
    symbols = {n: sp.Symbol(n) for n in names}
    return {key: to_sympy(c, symbols) for key, c in w.components.items()}


def forms_equal(a, b):
    keys = set(a) | set(b)
    return all(sp.cancel(a.get(k, 0) - b.get(k, 0)) == 0 for k in keys)
