#!/usr/bin/env python3
"""Independent brute-force oracle for breakpoint recursions.

Computes, with plain scalar arithmetic and no shared code with the C++
library, the first terms of the conservative breakpoint recursion

    a[0] = 0,  a[j+1] = a[j] + max(1, exp(R(ginv(a[j]))))

for a handful of (target risk R, gauge g) settings.  The printed values
are frozen into the C++ test sources; rerun this script to regenerate.
"""

import math


def minimal_sequence(risk, ginv, count):
    seq = [0.0]
    for _ in range(count - 1):
        a = seq[-1]
        y = ginv(a)
        r = 0.0 if y == -math.inf else risk(y)
        seq.append(a + max(1.0, math.exp(r)))
    return seq


def exp_risk(alpha):
    return lambda x: alpha * x if x > 0 else 0.0


def poly_risk(alpha):
    return lambda x: alpha * math.log1p(x) if x > 0 else 0.0


def exp_gauge_inv(beta):
    # g(x) = exp(beta*x); g(x) >= t for all x when t <= 0
    return lambda t: -math.inf if t <= 0.0 else math.log(t) / beta


def identity_plus_inv():
    # g(x) = max(x, 0); g >= t everywhere when t <= 0
    return lambda t: -math.inf if t <= 0.0 else t


def power_gauge_inv(beta):
    # g(x) = x^beta on x >= 0, 0 for x < 0
    return lambda t: -math.inf if t <= 0.0 else t ** (1.0 / beta)


def show(name, seq):
    print(name)
    for i, a in enumerate(seq):
        print(f"  a[{i}] = {a!r}")


show("exponential(1) with exp-gauge(0.5), 6 terms:",
     minimal_sequence(exp_risk(1.0), exp_gauge_inv(0.5), 6))

show("exponential(1) with identity-plus gauge, 5 terms:",
     minimal_sequence(exp_risk(1.0), identity_plus_inv(), 5))

show("polynomial(3) with power-gauge(1), 6 terms:",
     minimal_sequence(poly_risk(3.0), power_gauge_inv(1.0), 6))

show("exponential(2) with exp-gauge(1), 6 terms:",
     minimal_sequence(exp_risk(2.0), exp_gauge_inv(1.0), 6))
