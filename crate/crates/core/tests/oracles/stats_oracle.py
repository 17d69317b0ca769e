"""Exact-rational oracle for the OLS and Pearson fixtures in tests/stats_fixture.rs."""
from fractions import Fraction as Fr
import mpmath as mp

mp.mp.dps = 50

def ols(xs, ys):
    xs = [Fr(x) for x in xs]; ys = [Fr(y) for y in ys]
    n = len(xs)
    sx, sy = sum(xs), sum(ys)
    sxx = sum(x * x for x in xs); sxy = sum(x * y for x, y in zip(xs, ys))
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
    icpt = (sy - slope * sx) / n
    ybar = sy / n
    sse = sum((y - slope * x - icpt) ** 2 for x, y in zip(xs, ys))
    sst = sum((y - ybar) ** 2 for y in ys)
    return slope, icpt, 1 - sse / sst

def pearson(xs, ys):
    xs = [Fr(x) for x in xs]; ys = [Fr(y) for y in ys]
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = sum((x - mx) ** 2 for x in xs); vy = sum((y - my) ** 2 for y in ys)
    return mp.mpf(cov.numerator) / cov.denominator / mp.sqrt(mp.mpf(vx.numerator) / vx.denominator * mp.mpf(vy.numerator) / vy.denominator)

x = ["1", "2", "3", "4", "5", "6"]
y = ["3.1", "4.9", "7.2", "8.8", "11.1", "12.9"]
for v in ols(x, y):
    print(mp.nstr(mp.mpf(v.numerator) / v.denominator, 20))
print(mp.nstr(pearson(["1", "2", "3", "4", "5"], ["2", "4", "5", "4", "5"]), 20))
