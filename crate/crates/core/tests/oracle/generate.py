"""Multiprecision reference values for the special-function tests.

Run with `python3 generate.py` and paste the printed tables into the Rust
tests. Series values use exact binomial weights and 60-digit arithmetic;
values outside the reach of the series use mpmath's Talbot inversion of the
Laplace transform s^(b-rho) / (s^b - x s^(b-a) - y), which shares no code
path with the branch-cut quadrature in the library.
"""
import mpmath as mp

mp.mp.dps = 60


def ml2_series(a, b, rho, x, y, n_max=600):
    a, b, rho, x, y = map(mp.mpf, (a, b, rho, x, y))
    total = mp.mpf(0)
    for n in range(n_max):
        row = mp.mpf(0)
        for i in range(n + 1):
            row += mp.binomial(n, i) * x**i * y**(n - i) / mp.gamma(rho + b * n - (b - a) * i)
        total += row
        if n > 20 and abs(row) < mp.mpf(10) ** -45:
            return total
    raise RuntimeError("series did not converge")


def ml2_talbot(a, b, rho, x, y):
    a, b, rho, x, y = map(mp.mpf, (a, b, rho, x, y))
    with mp.workdps(50):
        return mp.invertlaplace(lambda s: s**(b - rho) / (s**b - x * s**(b - a) - y), 1, method="talbot")


def ml1(alpha, rho, z):
    return ml2_series(alpha, alpha, rho, 0, z) if abs(z) < 4 else ml2_talbot(alpha, alpha, rho, 0, z)


def emit(name, rows):
    print(f"// {name}")
    for r in rows:
        print("    (" + ", ".join(mp.nstr(v, 20, min_fixed=-30, max_fixed=30) if not isinstance(v, int) else str(v) for v in r) + "),")
    print()


# Gamma at scattered points across (0, 170].
pts = [0.001, 0.1, 0.3, 0.75, 1.3, 1.4616321449683623, 2.5, 3.7, 7.25, 11.1, 23.9, 57.3, 99.5, 140.2, 169.9]
emit("gamma", [(mp.mpf(p), mp.gamma(mp.mpf(p))) for p in pts])

# Univariate values: the series regime plus large negative arguments.
uni = [(0.5, 1.0, -1.0), (0.5, 1.0, -5.0), (0.8, 0.8, -3.0), (0.7, 1.7, -20.0), (0.7, 1.7, -7.5),
       (0.3, 1.7, -20.0), (0.3, 1.7, -2.0), (0.8, 1.8, -50.0), (0.8, 1.8, 2.0), (0.5, 1.5, 3.0)]
emit("ml_univariate (alpha, rho, z, value)", [(mp.mpf(a), mp.mpf(r), mp.mpf(z), ml1(a, r, z)) for a, r, z in uni])

# Bivariate values.
biv = [(0.3, 0.7, 1.7, -0.5, -2.0, "s"), (0.4, 0.8, 0.8, -0.5, -2.0, "s"), (0.4, 0.8, 1.8, -1.0, -3.0, "s"),
       (0.3, 0.7, 1.7, 0.5, 1.0, "s"), (0.4, 0.8, 0.8, -0.5, -2500.0, "t"), (0.4, 0.8, 1.8, -0.5, -2500.0, "t"),
       (0.1, 0.5, 1.5, -3.0, -200.0, "t"), (0.3, 0.5, 0.5, -10.0, -40.0, "t"), (0.45, 0.95, 0.95, -1.0, -100.0, "t")]
emit("ml_bivariate (a, b, rho, x, y, value)",
     [(mp.mpf(a), mp.mpf(b), mp.mpf(r), mp.mpf(x), mp.mpf(y), ml2_series(a, b, r, x, y) if m == "s" else ml2_talbot(a, b, r, x, y))
      for a, b, r, x, y, m in biv])

# Kernel z^(a1-1) E_{(a1-a2,a1),a1}(-mu z^(a1-a2), -(k pi)^2 z^a1) for orders (0.8, 0.4, mu=0.5).
a1, a2, mu = mp.mpf("0.8"), mp.mpf("0.4"), mp.mpf("0.5")
rows = []
for k, z in [(1, 0.5), (1, 1.0), (3, 0.25), (10, 1.0)]:
    z = mp.mpf(z)
    x, y = -mu * z**(a1 - a2), -(k * mp.pi) ** 2 * z**a1
    e = ml2_series(a1 - a2, a1, a1, x, y) if abs(y) < 12 else ml2_talbot(a1 - a2, a1, a1, x, y)
    rows.append((k, z, z**(a1 - 1) * e))
emit("kernel (k, z, value), orders a1=0.8 a2=0.4 mu=0.5", rows)

# Step response T^a1 E_{(.),a1+1}(-mu T^(a1-a2), -(k pi)^2 T^a1) at T = 1 and T = 0.5.
rows = []
for k, T in [(1, 1.0), (2, 1.0), (10, 1.0), (1, 0.5), (10, 0.5)]:
    T = mp.mpf(T)
    x, y = -mu * T**(a1 - a2), -(k * mp.pi) ** 2 * T**a1
    e = ml2_series(a1 - a2, a1, a1 + 1, x, y) if abs(y) < 12 else ml2_talbot(a1 - a2, a1, a1 + 1, x, y)
    rows.append((k, T, T**a1 * e))
emit("step response (k, T, value), orders a1=0.8 a2=0.4 mu=0.5", rows)
