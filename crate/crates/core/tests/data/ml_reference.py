"""Reference values of E^gamma_{k,alpha,mu}(z) by direct summation at 60 digits.

Parameters are taken as the exact binary doubles the Rust tests use.
Run: python3 ml_reference.py            > ml_reference.csv
     python3 ml_reference.py --stress   > ml_stress.csv
"""
import sys

from mpmath import mp, mpf, gamma, rf, factorial, nstr

mp.dps = 60

COMBOS = [
    (1.0, 1.0, 1.0, 1.0),
    (1.0, 0.5, 1.0, 1.0),
    (2.0, 1.5, 2.0, 1.0),
    (1.5, 0.8, 0.6, 0.4),
    (0.5, 0.7, 1.3, 2.5),
    (1.0, 2.0, 1.0, 1.0),
    (1.0, 1.0, 2.0, -0.5),
    (3.0, 2.5, 1.2, 0.7),
    (0.8, 1.2, 0.3, 1.7),
    (2.5, 1.5, 4.0, 3.0),
    (1.2, 0.6, 0.5, 0.2),
    (1.0, 1.0, 0.5, -1.5),
]

# Sum of |terms| exceeds |E| by up to ~1e21 at z = -5.
STRESS = [(2.0, 1.0, 2.0, 1.0)]


def k_gamma(x, k):
    return k ** (x / k - 1) * gamma(x / k)


def k_poch(g, n, k):
    # (g)_{n,k} = k^n (g/k)_n
    return k ** n * rf(g / k, n)


def ml(z, k, a, m, g):
    z, k, a, m, g = map(mpf, (z, k, a, m, g))
    s = mpf(0)
    n = 0
    small = 0
    while True:
        t = k_poch(g, n, k) * z ** n / (factorial(n) * k_gamma(a * n + m, k))
        s += t
        if abs(t) < mpf(10) ** -45 * max(abs(s), mpf(10) ** -30):
            small += 1
            if small > 3:
                return s
        else:
            small = 0
        n += 1


print("k,alpha,mu,gamma,z,value")
for k, a, m, g in STRESS if "--stress" in sys.argv else COMBOS:
    for i in range(41):
        z = -5.0 + 0.25 * i
        print(f"{k!r},{a!r},{m!r},{g!r},{z!r},{nstr(ml(z, k, a, m, g), 25)}")
