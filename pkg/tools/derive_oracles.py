"""Independent symbolic derivation of the reference values frozen in tests/.

Run with ``python3 tools/derive_oracles.py``; needs sympy (the ``oracle``
extra). Nothing in the package imports this file. Each block prints the
quantity it derives, and the printed values are the ones hard-coded in the
test suite.
"""

import sympy as sp

u, v = sp.symbols("u v", real=True)
I = sp.I
w = u + I * v
ETA = sp.diag(-1, 1, 1, 1)


def dot(a, b):
    return sp.simplify((a.T * ETA * b)[0, 0])


def W(x, y):
    yb = sp.conjugate(y)
    return sp.Matrix([1 + x * yb, x + yb, -I * (x - yb), -1 + x * yb])


def L(x):
    r2 = x * sp.conjugate(x)
    return sp.Matrix([1 + r2, x + sp.conjugate(x), -I * (x - sp.conjugate(x)), r2 - 1])


def block(title):
    print(f"\n== {title}")


block("lorentz / lightcone examples")
print("<(2,2,0,0),(2,0,2,0)> =", dot(sp.Matrix([2, 2, 0, 0]), sp.Matrix([2, 0, 2, 0])))
Lv = sp.Matrix([sp.sqrt(2), 1, 1, 0])
print("st(sqrt2,1,1,0) =", sp.nsimplify((Lv[1] + I * Lv[2]) / (Lv[0] - Lv[3])), "| <L,L> =", dot(Lv, Lv))
print("L(1) =", list(L(sp.Integer(1))), " L(i) =", list(sp.simplify(L(I))))
W1i = sp.simplify(W(sp.Integer(1), I))
print("W(1,i) =", list(W1i), " <W,conj W> =", sp.simplify(dot(W1i, W1i.conjugate())))
T = L(sp.Integer(0)) + I * L(sp.Integer(1))
print("T = L(0) + i L(1): <T,T> =", sp.simplify(dot(T, T)), " <T,conj T> =", sp.simplify(dot(T, T.conjugate())))

block("Example 6.4 from generators")
x = sp.exp((1 + I) * w)
y = -x
mu = sp.sqrt(2) * (1 + I) / 4 * sp.exp(v - u)
muW = (mu * W(x, y)).applyfunc(lambda e: sp.expand_complex(sp.expand(e)))
f = muW.applyfunc(lambda e: sp.simplify(sp.re(e)))
nu = muW.applyfunc(lambda e: sp.simplify(sp.im(e)))
print("f  =", list(f))
print("nu =", list(nu))
fu, fv = f.diff(u), f.diff(v)
a, b, c = dot(f.diff(u, 2), nu), dot(f.diff(u, v), nu), dot(f.diff(v, 2), nu)
F = dot(fu, fv)
print("a, b, c, F =", sp.simplify(a), sp.simplify(b), sp.simplify(c), sp.simplify(F))
print("f_uu - nu =", list(sp.simplify(f.diff(u, 2) - nu)), " f_uv + f =", list(sp.simplify(f.diff(u, v) + f)))
alpha = sp.simplify(sp.re(sp.expand_complex(mu * sp.conjugate(y.diff(u)) / sp.conjugate(x - y))))
beta = sp.simplify(-sp.re(sp.expand_complex(mu * x.diff(v) / (x - y))))
print("alpha =", alpha, " beta =", beta)
nuu, nuv = nu.diff(u), nu.diff(v)
print("nu_u + f_v =", list(sp.simplify(nuu + fv)), " F_hat =", sp.simplify(dot(nuu, nuv)))
print("theta = arg mu =", sp.arg(sp.Rational(1, 4) * sp.sqrt(2) * (1 + I)))
print("f(0,0) =", list(f.subs({u: 0, v: 0})), " nu(0,0) =", list(nu.subs({u: 0, v: 0})))

block("minimal PDE x_uv = 2 x_u x_v/(x-y)")
for xx, yy, label in ((x, y, "x = e^{(1+i)w}, y = -x"), (w ** 2, w, "x = w^2, y = w")):
    d = sp.simplify(xx.diff(u, v) - 2 * xx.diff(u) * xx.diff(v) / (xx - yy))
    print(label, "-> defect", d, " at w = 0.5+0.5i:", sp.N(d.subs({u: 0.5, v: 0.5})))

block("Clifford-type curvature")
s, q = sp.symbols("s q", real=True)
X = sp.Matrix([sp.cos(s) * sp.sinh(q), sp.sin(s) * sp.cos(q), sp.sin(s) * sp.sin(q), sp.cos(s) * sp.cosh(q)])
N = sp.Matrix([sp.sin(s) * sp.cosh(q), -sp.cos(s) * sp.sin(q), sp.cos(s) * sp.cos(q), sp.sin(s) * sp.sinh(q)])
N = N / sp.sqrt(sp.cos(2 * s))
sp_ = sp.sqrt(sp.cos(2 * s))  # ds/dp
dp = lambda e: sp_ * e.diff(s)  # noqa: E731
Xp, Xq = dp(X), X.diff(q)
Xpp, Xpq, Xqq = dp(Xp), dp(Xq), Xq.diff(q)
Xuu, Xuv, Xvv = (Xpp + 2 * Xpq + Xqq) / 4, (Xpp - Xqq) / 4, (Xpp - 2 * Xpq + Xqq) / 4
Xu, Xv = (Xp + Xq) / 2, (Xp - Xq) / 2
aa, bb, cc = (sp.simplify(dot(m, N)) for m in (Xuu, Xuv, Xvv))
FF = sp.simplify(dot(Xu, Xv))
print("E, G =", sp.simplify(dot(Xu, Xu)), sp.simplify(dot(Xv, Xv)), " a, b, c, F =", aa, bb, cc, FF)
K = sp.simplify(1 - (aa * cc - bb ** 2) / FF ** 2)
print("K =", K, " = 1 + sec^2 2s ?", sp.simplify(K - 1 - 1 / sp.cos(2 * s) ** 2) == 0, " K(0) =", K.subs(s, 0))

block("tilted sphere")
th = sp.symbols("theta", positive=True)
D = v - u
Xs = sp.Matrix([1 + u * v, u + v, u * v - 1, 0]) / D
e4 = sp.Matrix([0, 0, 0, 1])
ft = sp.sin(th) * e4 + sp.cos(th) * Xs
nt = sp.cos(th) * e4 - sp.sin(th) * Xs
at, bt, ct = (sp.simplify(dot(m, nt)) for m in (ft.diff(u, 2), ft.diff(u, v), ft.diff(v, 2)))
Ft = sp.simplify(dot(ft.diff(u), ft.diff(v)))
Kf = sp.simplify(-(1 / Ft) * (Ft.diff(u) / Ft).diff(v))
Fh = sp.simplify(dot(nt.diff(u), nt.diff(v)))
Kn = sp.simplify(-(1 / Fh) * (Fh.diff(u) / Fh).diff(v))
print("a, b, c, F =", at, bt, ct, Ft, " K_f =", Kf, " K_nu =", Kn)
print("nu + tan(theta) f =", list(sp.simplify(nt + sp.tan(th) * ft)))

block("tangent family of the holomorphic ODE")
z = sp.symbols("z")
K_, phi, cc_ = sp.symbols("K phi c")
S = K_ * z + phi
xp = 1 / (cc_ * sp.sin(S / 2) ** 2)
yp = 1 / (cc_ * sp.cos(S / 2) ** 2)
dxy = -4 / (cc_ * K_ * sp.sin(S))
print("(x-y)' - (x'-y') =", sp.simplify(dxy.diff(z) - (xp - yp)))
print("x'' - 2x'^2/(x-y) =", sp.simplify(xp.diff(z) - 2 * xp ** 2 / dxy))
print("y'' + 2y'^2/(x-y) =", sp.simplify(yp.diff(z) + 2 * yp ** 2 / dxy))
print("1/x' + 1/y' =", sp.simplify(1 / xp + 1 / yp))
print("(i/2)(x'+y')/(x-y) =", sp.simplify(sp.I / 2 * (xp + yp) / dxy))

block("Mobius reconstruction, c = 2, x = e^w")
yy = sp.log(2 * sp.exp(z) - 1) / 2
print("y' - M_2(x') =", sp.simplify(yy.diff(z) - sp.exp(z) / (2 * sp.exp(z) - 1)))

block("quasi-holomorphic example")
Psi = u ** 2 - v ** 4 + 2 * I * u * v ** 2
print("sigma = -i Psi_v / Psi_u =", sp.simplify(-I * Psi.diff(v) / Psi.diff(u)))
