"""Closed-form targets frozen into the C++ tests.

Run: python3 tests/oracles/derive_values.py
"""
import sympy as sp

t1, t2, x, T, x0 = sp.symbols("theta1 theta2 x T x0", positive=True)

# Ornstein-Uhlenbeck dX = -theta1 X dt + theta2 dB, reward g = x^2.
ou_second_moment = x**2 * sp.exp(-2 * t1 * T) + t2**2 * (1 - sp.exp(-2 * t1 * T)) / (2 * t1)
ou_at = {t1: 1, t2: sp.Rational(1, 2), x: 1, T: 1}
print("ou v(0,1)        =", sp.N(ou_second_moment.subs(ou_at), 17))
print("ou d/dtheta1     =", sp.N(sp.diff(ou_second_moment, t1).subs(ou_at), 17))
print("ou d/dtheta2     =", sp.N(sp.diff(ou_second_moment, t2).subs(ou_at), 17))
print("ou d/dx          =", sp.N(sp.diff(ou_second_moment, x).subs(ou_at), 17))

# Birth-death: births at rate theta1, deaths at rate theta2 * x, g = x.
bd_mean = x0 * sp.exp(-t2 * T) + (t1 / t2) * (1 - sp.exp(-t2 * T))
bd_at = {t1: 10, t2: 1, x0: 0, T: 2}
print("bd mean          =", sp.N(bd_mean.subs(bd_at), 17))
print("bd d/dtheta1     =", sp.N(sp.diff(bd_mean, t1).subs(bd_at), 17))
print("bd d/dtheta2     =", sp.N(sp.diff(bd_mean, t2).subs(bd_at), 17))

# Euler-Maruyama GBM with g = x: E[X_N] = x0 (1 + theta1 dt)^N exactly on the grid.
N = sp.Integer(256)
gbm_mean = x0 * (1 + t1 * T / N) ** N
gbm_at = {t1: sp.Rational(1, 10), x0: 1, T: 1}
print("gbm grid d/dth1  =", sp.N(sp.diff(gbm_mean, t1).subs(gbm_at), 17))
