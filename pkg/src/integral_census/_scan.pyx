# cython: boundscheck=False, wraparound=False, cdivision=True
"""int64 scan for integral points on y^2 = x^3 + a x + b.

Only called for parameter ranges where x^3 + a x + b provably fits in a
signed 64-bit integer (the Python wrapper checks before dispatching).
"""

from libc.math cimport sqrt


def scan_range(long long a, long long b, long long x_lo, long long x_hi):
    """Return [(x, y), ...] with y >= 0 and y^2 = x^3 + a*x + b, x in [x_lo, x_hi]."""
    cdef long long x, v, r
    cdef list out = []
    for x in range(x_lo, x_hi + 1):
        v = x * x * x + a * x + b
        if v < 0:
            continue
        r = <long long> sqrt(<double> v)
        # float sqrt can be off by one in either direction at 2^50+
        while r > 0 and r * r > v:
            r -= 1
        while (r + 1) * (r + 1) <= v:
            r += 1
        if r * r == v:
            out.append((x, r))
    return out
