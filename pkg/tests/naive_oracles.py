"""Slow direct-sum reference implementations for brute-force equivalence tests.

Everything here is plain Python loops over cmath/math.  The only thing shared
with the library is the set of integration nodes on the half line; one-sided
values at jumps are obtained by probing just left and right of each node.
"""

import cmath
import math

PROBE = 1e-9


def ecf(xs, u):
    return sum(cmath.exp(1j * u * z) for z in xs) / len(xs)


def ecf_deriv(xs, u):
    return sum(1j * z * cmath.exp(1j * u * z) for z in xs) / len(xs)


def weight(u, delta):
    return math.log(math.e + abs(u)) ** (-0.5 - delta)


def sinc_ft(v):
    return 1.0 if abs(v) <= math.pi else 0.0


def taper_ft(p):
    def ft(v):
        return 1.0 - (abs(v) / math.pi) ** p if abs(v) <= math.pi else 0.0
    return ft


def kdiff(ft, m, k, u):
    # F K(u/k) - F K(u/m), with F K(u/0) := 0 off the origin
    lo = 0.0 if m == 0 else ft(u / m)
    return ft(u / k) - lo


def one_sided(fn, x, probe):
    """Limit of fn at x from the probe's side: fn(x) unless fn jumps there."""
    at, near = fn(x), fn(probe)
    return near if abs(near - at) > 1e-6 else at


def full_line(half_points):
    """Mirror the half-line node set (which starts at 0) onto the whole line."""
    neg = [-p for p in reversed(half_points[1:])]
    return neg + list(half_points)


def trapezoid_one_sided(xs, value):
    """sum over cells of (b - a)/2 (value just right of a + value just left of b)."""
    total = 0.0
    for a, b in zip(xs[:-1], xs[1:]):
        total += (b - a) / 2.0 * (value(a, +1) + value(b, -1))
    return total


def estimate(xs_ecf, xs_deriv, delta, ff, ft, m, variant, kappa, wdelta, half_points):
    """Re (1/2pi) int F f(-u) F K(u/m) (1/delta) phi'(u) / (i inv(u)) du."""
    n = len(xs_ecf)

    def threshold(u):
        if variant == "neumann":
            return (delta * n) ** -0.5
        return kappa * math.sqrt(math.log(n)) / weight(u, wdelta) / math.sqrt(n)

    def value(u, side):
        probe = u + side * PROBE * max(1.0, abs(u))
        keep = abs(ecf(xs_ecf, probe)) >= threshold(probe)
        phi = ecf(xs_ecf, u)
        dphi = ecf_deriv(xs_deriv, u)
        if keep:
            inv = phi
        elif variant == "neumann":
            return 0.0
        else:
            inv = threshold(u)
        g = dphi / delta / (1j * inv)
        return ff(-u) * one_sided(lambda v: ft(v / m), u, probe) * g

    total = trapezoid_one_sided(full_line(half_points), value)
    return (total / (2 * math.pi)).real


def sigma_x(xs_ecf, ff, ft, m, k, cbar1, cbar2, kappa, wdelta, half_points, phi_fn=None):
    """(sigma^2, x) for the pair (m, k); ``phi_fn`` replaces the truncated ECF (deterministic variant)."""
    n = len(xs_ecf)

    def phi_check(u):
        if phi_fn is not None:
            return phi_fn(u)
        phi = ecf(xs_ecf, u)
        floor = kappa * math.sqrt(math.log(n)) / weight(u, wdelta) / math.sqrt(n)
        return phi if abs(phi) >= floor else floor

    def base(u, side):
        probe = u + side * PROBE * max(1.0, abs(u))
        dk = one_sided(lambda v: kdiff(ft, m, k, v), u, probe)
        return abs(ff(-u)) / abs(phi_check(u)) * abs(dk) / weight(u, wdelta)

    pts = full_line(half_points)
    l1 = trapezoid_one_sided(pts, base)
    l2 = trapezoid_one_sided(pts, lambda u, s: base(u, s) ** 2)
    b2 = cbar2 * l1 * l1
    b1 = cbar1 * l2 if math.isfinite(cbar1) else math.inf
    return min(b1, b2) / (2 * math.pi**2), l1 / (2 * math.pi * math.sqrt(n))


def clog(z):
    return math.log(z) if z > math.e else 1.0


def lam(x, s2, m, k, n, eta):
    d = k - m
    a = clog(n * x * d)
    return max(8.0 / eta * clog(a) ** 2 * a * clog(x * x * d * d), clog(s2 * d * d))


def corr(x, s2, m, k, n, eta, c1, gamma, kappa):
    cpen = max(64.0, 16.0 * (2 * c1 + gamma))
    L = lam(x, s2, m, k, n, eta)
    return (cpen * c1 * L * L + 16.0 * (2.5 * kappa) ** 2 * math.log(n)) * max(s2, x * x) / n


def m_star(theta_m, pens):
    """Exhaustive argmin of sup_{k>=m} |theta_k - theta_m|^2 + pen(m), smallest m on ties."""
    ms = sorted(theta_m)
    best, best_val = None, None
    for m in ms:
        sup = 0.0
        for k in ms:
            if k >= m:
                sup = max(sup, (theta_m[k] - theta_m[m]) ** 2)
        val = sup + pens[m]
        if best_val is None or val < best_val:
            best, best_val = m, val
    return best
