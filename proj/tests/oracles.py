"""Independent oracles for the frozen constants in the C++ tests.

Every value is a direct convolution integral of the generalized-Gamma and
pointing-error densities (no H-function involved). Run with mpmath to
regenerate; output is pasted into the test sources.
"""
import mpmath as mp

mp.mp.dps = 30

ST = ((1.8621, 0.5, 1.5074), (1.0, 1.8, 0.928))
MT = ((2.169, 0.55, 1.5793), (1.0, 2.35, 0.9671))
RF = ((1.5, 1.5, 1.5793), (1.0, 1.5, 0.9671))
PE_END = (0.02, 6.0)


def gg_pdf(p, x):
    a, b, w = map(mp.mpf, p)
    return a * x ** (a * b - 1) / ((w / b) ** b * mp.gamma(b)) * mp.exp(-(b / w) * x ** a)


def gg_cdf(p, x):
    a, b, w = map(mp.mpf, p)
    return mp.gammainc(b, 0, (b / w) * x ** a, regularized=True)


def dgg_pdf(d, x):
    f1, f2 = d
    return mp.quad(lambda y: gg_pdf(f1, x / y) * gg_pdf(f2, y) / y, [0, 0.5, 1, 2, 5, mp.inf])


def dgg_cdf(d, x):
    f1, f2 = d
    return mp.quad(lambda y: gg_cdf(f1, x / y) * gg_pdf(f2, y), [0, 0.5, 1, 2, 5, mp.inf])


def hop_cdf(d, pe, x):
    a0, r2 = map(mp.mpf, pe)
    return mp.quad(lambda i: dgg_cdf(d, x / i) * r2 / a0 ** r2 * i ** (r2 - 1), [0, a0 / 2, a0])


def hop_pdf(d, pe, x):
    a0, r2 = map(mp.mpf, pe)
    return mp.quad(lambda i: dgg_pdf(d, x / i) / i * r2 / a0 ** r2 * i ** (r2 - 1), [0, a0 / 2, a0])


if __name__ == "__main__":
    mp.mp.dps = 20
    print("unit dgg pdf(1) = 2 K0(2) =", mp.nstr(2 * mp.besselk(0, 2), 17))
    print("ST dgg pdf(1)   =", mp.nstr(dgg_pdf(ST, 1), 17))
    print("MT dgg pdf(0.3) =", mp.nstr(dgg_pdf(MT, 0.3), 17))
    print("RF dgg cdf(1)   =", mp.nstr(dgg_cdf(RF, 1), 17))
    mp.mp.dps = 15
    print("ST+PE cdf(0.01) =", mp.nstr(hop_cdf(ST, PE_END, 0.01), 14))
    print("MT+PE pdf(0.02) =", mp.nstr(hop_pdf(MT, PE_END, 0.02), 14))
