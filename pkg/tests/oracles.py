"""Independent reference computations in sympy, for f = 1 rings only.

Series over Z/p^N[[z]] are converted to plain polynomials in X, Y, z with
integer (or rational) coefficients; truncation and reduction are applied
after the fact, so none of the library's sparse machinery is involved.
"""
import sympy

X, Y, Z, z = sympy.symbols("X Y Z z")
VARS = (X, Y, Z)


def to_expr(series):
    """Integer-coefficient polynomial from a series over an f = 1 ring."""
    nv = series.nvars
    expr = sympy.Integer(0)
    for key, raw in series.terms.items():
        mono = sympy.Integer(raw[0]) * z ** key[-1]
        for v, e in zip(VARS[:nv], key[:nv]):
            mono *= v**e
        expr += mono
    return expr


def base_to_expr(s):
    return sum((sympy.Integer(raw[0]) * z**k for k, raw in s.terms.items()), sympy.Integer(0))


def truncate(expr, nv, D, M, modulus):
    """Drop total X-degree > D and z-degree > M, reduce integer coefficients."""
    poly = sympy.Poly(sympy.expand(expr), *VARS[:nv], z)
    out = {}
    for mono, c in poly.terms():
        if sum(mono[:nv]) > D or mono[nv] > M:
            continue
        c = sympy.Rational(c)
        if modulus is not None:
            # raises ValueError when the denominator is not invertible
            c = int(c.p * pow(int(c.q), -1, modulus)) % modulus
        if c:
            out[mono] = c
    return out


def series_dict(series):
    """The library series as {(exps..., zdeg): int} for comparison."""
    return {key: raw[0] for key, raw in series.terms.items() if raw[0]}


def honda_log_expr(p, v_expr, D):
    """f = sum_i c_i X^(p^i) with c_0 = 1, c_(i+1) = v(z) c_i(z^p) / p, over Q[z]."""
    c = sympy.Integer(1)
    f = X
    i = 1
    while p**i <= D:
        c = sympy.expand(v_expr * c.subs(z, z**p) / p)
        f += c * X ** (p**i)
        i += 1
    return f


def _cut(expr, D, M):
    poly = sympy.Poly(sympy.expand(expr), X, Y, z)
    return sympy.Add(*[c * X**i * Y**j * z**k for (i, j, k), c in poly.terms() if i + j <= D and k <= M])


def _compose_log(log, F, D, M):
    """log(F) truncated, by Horner-free repeated multiplication with cutting."""
    poly = sympy.Poly(log, X)
    out, power, deg = sympy.Integer(0), sympy.Integer(1), 0
    for (i,), c in sorted(poly.terms()):
        while deg < i:
            power = _cut(power * F, D, M)
            deg += 1
        out += c * power
    return _cut(out, D, M)


def fgl_from_log_expr(log, D, M):
    """F = log^-1(log X + log Y) by undetermined coefficients over Q[z], to degree D.

    Since log = X + higher terms, the degree-n part of the residual
    log X + log Y - log(F) is exactly the missing degree-n part of F.
    """
    F = X + Y
    target = _cut(log + log.subs(X, Y), D, M)
    for n in range(2, D + 1):
        residual = sympy.Poly(sympy.expand(target - _compose_log(log, F, D, M)), X, Y, z)
        F = F + sympy.Add(*[c * X**i * Y**j * z**k for (i, j, k), c in residual.terms() if i + j == n])
    return _cut(F, D, M)
