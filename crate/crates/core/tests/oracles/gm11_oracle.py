"""Independent GM(1,1) oracle used to freeze the fixture values in tests/gm11_fixture.rs.

Follows the reference MATLAB routine line for line in 60-digit arithmetic:
explicit matrix inverse of B*B', exponential time response, first differences,
and the mean relative residual.
"""
import mpmath as mp

mp.mp.dps = 60

A = [mp.mpf(s) for s in "36.3 36.8 33.9 34.6 34.4 34.8 37.3 37.4 38.6 39.5".split()]
n = len(A)
B = [sum(A[: i + 1]) for i in range(n)]
C = [(B[i] + B[i - 1]) / 2 for i in range(1, n)]
Bm = mp.matrix(2, n - 1)
for j, c in enumerate(C):
    Bm[0, j] = -c
    Bm[1, j] = 1
Y = mp.matrix([A[i] for i in range(1, n)])
c = mp.inverse(Bm * Bm.T) * Bm * Y
a, b = c[0], c[1]
F = [A[0]] + [(A[0] - b / a) / mp.exp(a * (i - 1)) + b / a for i in range(2, n + 11)]
G = [A[0]] + [F[i] - F[i - 1] for i in range(1, n + 10)]
H = G[:n]
delta = [abs((A[i] - H[i]) / A[i]) for i in range(n)]
Q = sum(delta) / n

fmt = lambda v: mp.nstr(v, 20)
print("a =", fmt(a))
print("u =", fmt(b))
print("fitted =", [fmt(v) for v in H])
print("forecast =", [fmt(v) for v in G[n:]])
print("q =", fmt(Q))
