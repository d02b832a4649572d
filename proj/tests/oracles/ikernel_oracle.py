"""Line-integral value of I(y) for the zeta instance on a wide weight.

I(y) = (1/2 pi i) int_{(c)} G(s) phi^(1 - s) y^{1 - s} ds with
G(s) = Gamma(s/2) / Gamma((1 - s)/2), c = 3/2, |Im s| <= 1000, and the weight
phi(u) = phi0((u - 1) L) with L = 2. Independent of the C++ code: scipy
log-gamma, numpy Gauss-Legendre.
"""
import numpy as np
from scipy.special import loggamma

L = 2.0
C = 1.5
T = 1000.0

def mellin_one_minus(s, nodes=2000):
    x, w = np.polynomial.legendre.leggauss(nodes)
    u = 1.0 + x / L
    t = x
    with np.errstate(divide="ignore", over="ignore"):
        phi = np.where(np.abs(t) < 1, np.exp(1.0 - 1.0 / (1.0 - t * t)), 0.0)
    wphi = w * phi / L
    # phi^(1 - s) = int phi(u) u^{-s} du
    return np.exp(-np.outer(s, np.log(u))) @ wphi

def kernel_line(y, panels=4000, per=16):
    x, w = np.polynomial.legendre.leggauss(per)
    edges = np.linspace(-T, T, panels + 1)
    total = 0.0 + 0.0j
    for chunk in range(0, panels, 200):
        a = edges[chunk:chunk + 200][:, None]
        b = edges[chunk + 1:chunk + 201][:, None]
        t = (0.5 * (a + b) + 0.5 * (b - a) * x[None, :]).ravel()
        ww = (0.5 * (b - a) * w[None, :]).ravel()
        s = C + 1j * t
        g = np.exp(loggamma(s / 2) - loggamma((1 - s) / 2))
        f = g * mellin_one_minus(s) * np.exp((1 - s) * np.log(y))
        total += np.sum(ww * f)
    return total / (2 * np.pi)

if __name__ == "__main__":
    for x in (10.0, 25.0):
        y = np.sqrt(np.pi) * x
        v = kernel_line(y)
        print("x=%g y=%.17g I=%.17g %+.3e i" % (x, y, v.real, v.imag))
