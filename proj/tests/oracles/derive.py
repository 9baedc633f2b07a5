"""Reference values for the unit tests, computed at 50 digits with mpmath.

Run: python3 tests/oracles/derive.py
"""
from mpmath import mp, mpf, exp, log, quad, findroot, expm1, sin, pi, asin

mp.dps = 50


def frank_tau(xi):
    d1 = quad(lambda t: t / expm1(t), [0, xi]) / xi
    return 1 - 4 / xi * (1 - d1)


def frank_xi(tau):
    return findroot(lambda x: frank_tau(x) - tau, mpf(2))


def frank_C(xi, u, v):
    return -1 / xi * log(1 + expm1(-xi * u) * expm1(-xi * v) / expm1(-xi))


def frank_h1(xi, u, v):
    # dC/du
    num = exp(-xi * u) * expm1(-xi * v)
    den = expm1(-xi) + expm1(-xi * u) * expm1(-xi * v)
    return num / den


def frank_h2(xi, u, v):
    return frank_h1(xi, v, u)


# complier parameters of the low-dependence design
alpha, beta = mpf("-0.6"), [mpf(1), mpf("0.9")]
eta, nu = [mpf("1.5"), mpf("-0.8"), mpf(-2), mpf("0.9")], mpf("1.2")
z, x = 1, [mpf(1), mpf("0.5")]
lp = z * alpha + beta[0] * x[0] + beta[1] * x[1]
loc = eta[0] + eta[1] * z + eta[2] * x[0] + eta[3] * x[1]
xi = frank_xi(mpf("0.25"))
print("frank xi(0.25) =", mp.nstr(xi, 20))

# ph_cdf at t=2 with Lambda = 0.5 t^0.75
print("ph_cdf =", mp.nstr(1 - exp(-mpf("0.5") * mpf(2) ** mpf("0.75") * exp(lp)), 20))


def margins(lam, y):
    ft = 1 - exp(-lam * exp(lp))
    s = (log(y) - loc) / nu
    fc = 1 - exp(-exp(s))
    return ft, fc, s


# psi at y=1, lam=0.5
ft, fc, s = margins(mpf("0.5"), mpf(1))
S = 1 - ft - fc + frank_C(xi, ft, fc)
psi = lp - mpf("0.5") * exp(lp) - log(S) + log(1 - frank_h1(xi, ft, fc))
print("psi =", mp.nstr(psi, 20))

# log-likelihood contributions at y=1.3, Lambda(y)=0.8, jump 0.01
y, lam, jump = mpf("1.3"), mpf("0.8"), mpf("0.01")
ft, fc, s = margins(lam, y)
l1 = log(jump) + lp - lam * exp(lp) + log(1 - frank_h1(xi, ft, fc))
log_fc = s - exp(s) - log(nu) - log(y)
l2 = log_fc + log(1 - frank_h2(xi, ft, fc))
l0 = log(1 - ft - fc + frank_C(xi, ft, fc))
print("contrib d1 =", mp.nstr(l1, 20))
print("contrib d2 =", mp.nstr(l2, 20))
print("contrib d0 =", mp.nstr(l0, 20))

# clayton180 and gaussian inverse Kendall maps
print("clayton180 xi(0.25) =", mp.nstr(2 * mpf("0.25") / (1 - mpf("0.25")), 20))
print("gaussian rho(0.5) =", mp.nstr(sin(pi * mpf("0.5") / 2), 20))
