"""Independent symbolic oracles for the frozen expected values in the C++ tests.

Run with `python3 tests/oracles/sympy_oracles.py`; every printed value is
copied verbatim into the corresponding doctest case. Nothing here imports
or mirrors the C++ recursion: the series solutions are obtained by plugging
an undetermined-coefficient ansatz into the PDE system and solving.
"""
import sympy as sp

x, y, x1, y1, x2, y2, t = sp.symbols("x y x1 y1 x2 y2 t", real=True)


def lap(f, xs, ys):
    return sum(sp.diff(f, a, 2) + sp.diff(f, b, 2) for a, b in zip(xs, ys))


def header(s):
    print(f"\n== {s}")


header("Fubini-Study chart n=1 scale 1: Taylor coefficients of (1+x^2+y^2)^-2")
fs = sp.series(sp.series((1 + x**2 + y**2) ** -2, x, 0, 7).removeO(), y, 0, 7).removeO()
poly = sp.Poly(sp.expand(fs), x, y)
for (a, b), c in sorted(poly.terms()):
    if a + b <= 6:
        print(f"x^{a} y^{b}: {c}")

header("Ricci form of FS chart: rho = -d dbar log h, ratio rho/h")
h = (1 + x**2 + y**2) ** -2
rho = -sp.Rational(1, 4) * lap(sp.log(h), [x], [y])
print("rho/h =", sp.simplify(rho / h))

header("Mixed Hessian 4 d_z1 d_zbar2 of |z1|^2 |z2|^2")
z1, z2 = x1 + sp.I * y1, x2 + sp.I * y2
f = (x1**2 + y1**2) * (x2**2 + y2**2)
dz = lambda g, a, b: (sp.diff(g, a) - sp.I * sp.diff(g, b)) / 2
dzb = lambda g, a, b: (sp.diff(g, a) + sp.I * sp.diff(g, b)) / 2
H12 = sp.expand(4 * dz(dzb(f, x2, y2), x1, y1))
print("H12 =", H12, "  equals 4*conj(z1)*z2:", sp.expand(H12 - 4 * sp.conjugate(z1) * z2) == 0)


def series_solve(h_mat, xs, ys, c, order, deg):
    """Undetermined coefficients in t for v and g; spatial parts kept exact.

    Unknowns v_k(x), g_k(x) are solved order by order from
        t v_t + 1 - c exp(-v) det g = 0,   Lap-form of 4 d dbar v + c g_t = 0
    using sympy's own series expansion of exp and det.
    """
    n = len(xs)
    vk = [sp.log(c * h_mat.det())]
    gk = [h_mat]
    for m in range(order):
        # t^m coefficient of 4 v_{z_i zbar_j} + c g_t, solved for g_{m+1}
        G = sp.zeros(n, n)
        for i in range(n):
            for j in range(n):
                hij = 4 * dz(dzb(vk[m], xs[j], ys[j]), xs[i], ys[i])
                G[i, j] = sp.simplify(-hij / (c * (m + 1)))
        gk.append(G)
        vn = sp.Symbol("vn")
        V = sum(vk[k] * t**k for k in range(m + 1)) + vn * t ** (m + 1)
        Gt = sum((gk[k] * t**k for k in range(m + 2)), sp.zeros(n, n))
        expr = t * sp.diff(V, t) + 1 - c * sp.exp(-V) * Gt.det()
        coeff = sp.series(expr, t, 0, m + 2).removeO().coeff(t, m + 1)
        sol = sp.solve(sp.Eq(coeff, 0), vn)[0]
        vk.append(sp.simplify(sol))
    return vk, gk


header("h = 1 + x, c = 1: first orders")
vk, gk = series_solve(sp.Matrix([[1 + x]]), [x], [y], 1, 2, 6)
for k in range(3):
    print(f"v{k} =", sp.factor(vk[k]), f"   g{k} =", sp.factor(gk[k][0, 0]))
for name, fexpr in [("g1", gk[1][0, 0]), ("v1", vk[1]), ("g2", gk[2][0, 0]), ("v2", vk[2])]:
    s = sp.series(fexpr, x, 0, 6).removeO()
    print(name, "x-coeffs deg0..5:", [sp.nsimplify(s.coeff(x, k)) for k in range(6)])

header("h = diag(1+x1, 1), c = 1: v1 and g1_11 (n = 2)")
vk2, gk2 = series_solve(sp.Matrix([[1 + x1, 0], [0, 1]]), [x1, x2], [y1, y2], 1, 1, 4)
print("v1 =", sp.factor(vk2[1]), "g1_11 =", sp.factor(gk2[1][0, 0]), "g1_22 =", gk2[1][1, 1])

header("FS chart c=1: series solution v - log h and w_inv")
hfs = sp.Matrix([[(1 + x**2 + y**2) ** -2]])
vk3, gk3 = series_solve(hfs, [x], [y], 1, 4, 4)
print("g1/h =", sp.simplify(gk3[1][0, 0] / hfs[0, 0]), " g2 =", sp.simplify(gk3[2][0, 0]))
print("v_k (k>=1):", [sp.simplify(vk3[k]) for k in range(1, 5)])
V = sum(vk3[k] * t**k for k in range(5))
winv = sp.series(t / (1 + t * sp.diff(V, t)), t, 0, 6).removeO()
print("w_inv coeffs:", [sp.simplify(winv.coeff(t, k)) for k in range(6)])
print("closed (t+4t^2)/(1+8t):", [sp.series((t + 4 * t**2) / (1 + 8 * t), t, 0, 6).removeO().coeff(t, k) for k in range(6)])

header("closed form n=1, lambda=1: w_inv = (t + t^2/2)/(1+t)")
P = 1 + t
W = sp.integrate(P, (t, 0, t)) / P
print("series:", [sp.series(W, t, 0, 8).removeO().coeff(t, k) for k in range(8)])
print("(W P)' - P =", sp.simplify(sp.diff(W * P, t) - P))
P2 = sp.expand((1 + t) * (1 + 2 * t))
print("P for (1,2):", P2, " integral:", sp.integrate(P2, (t, 0, t)))

header("CP^1 class integral: F|_X = -g1 dx dy, normalized by 4 pi")
r, th = sp.symbols("r theta", positive=True)
g1 = 8 / (1 + r**2) ** 2
val = sp.integrate(sp.integrate(-g1 * r, (r, 0, sp.oo)), (th, 0, 2 * sp.pi)) / (4 * sp.pi)
print("integral =", val)

header("majorant C_2 hand evaluation: single Z^2 bound a, sigma = 1")
a, A, R = sp.symbols("a A R", positive=True)
# term t^0 Z^2 with weight R^(0+2-2) = 1 -> C_2 = a * C_1^2
print("C_2 =", a * A**2)
# single Y-linear term (|beta| = 1): weight R^(2-2) * 4 e^2 M, t-shift 1 -> C_2 = A_b * 4 e^2 M * A
Ab, M = sp.symbols("A_b M", positive=True)
print("C_2 (beta term) =", Ab * 4 * sp.E**2 * M * A)
