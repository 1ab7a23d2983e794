"""Reference implementation of the WFG1-WFG9 scalable test problems.

Independent transcription of the published WFG toolkit definition, used to
generate the golden vectors under crates/subpop/tests/data/wfg_golden/ and to
cross-check the Rust implementation.  Indexing follows the toolkit's 1-based
formulas, translated to 0-based arrays.

Run `python3 tools/wfg_reference.py --selfcheck` to verify the analytic
identities (front geometry, optima, ranges) before regenerating goldens with
`python3 tools/wfg_reference.py --golden <outdir>`.
"""

import math
import sys

EPS = 1e-10


def correct01(v):
    if v < 0.0 and v >= -EPS:
        return 0.0
    if v > 1.0 and v <= 1.0 + EPS:
        return 1.0
    return v


# ---------------------------------------------------------------------------
# transformation functions


def b_poly(y, a):
    return correct01(y ** a)


def b_flat(y, A, B, C):
    v = (A + min(0.0, math.floor(y - B)) * A * (B - y) / B
         - min(0.0, math.floor(C - y)) * (1.0 - A) * (y - C) / (1.0 - C))
    return correct01(v)


def b_param(y, u, A, B, C):
    v = y ** (B + (C - B) * (A - (1.0 - 2.0 * u) * abs(math.floor(0.5 - u) + A)))
    return correct01(v)


def s_linear(y, A):
    return correct01(abs(y - A) / abs(math.floor(A - y) + A))


def s_decept(y, A, B, C):
    tmp1 = math.floor(y - A + B) * (1.0 - C + (A - B) / B) / (A - B)
    tmp2 = math.floor(A + B - y) * (1.0 - C + (1.0 - A - B) / B) / (1.0 - A - B)
    return correct01(1.0 + (abs(y - A) - B) * (tmp1 + tmp2 + 1.0 / B))


def s_multi(y, A, B, C):
    tmp1 = abs(y - C) / (2.0 * (math.floor(C - y) + C))
    tmp2 = (4.0 * A + 2.0) * math.pi * (0.5 - tmp1)
    return correct01((1.0 + math.cos(tmp2) + 4.0 * B * tmp1 * tmp1) / (B + 2.0))


def r_sum(ys, ws):
    return correct01(sum(w * y for w, y in zip(ws, ys)) / sum(ws))


def r_nonsep(ys, A):
    n = len(ys)
    num = 0.0
    for j in range(n):
        num += ys[j]
        for kk in range(A - 1):
            num += abs(ys[j] - ys[(j + kk + 1) % n])
    denom = (n / A) * math.ceil(A / 2.0) * (1.0 + 2.0 * A - 2.0 * math.ceil(A / 2.0))
    return correct01(num / denom)


# ---------------------------------------------------------------------------
# shape functions (m is 1-based, x has length M-1)


def _shape_general(x, m, M, factor, tail):
    v = 1.0
    for i in range(M - m):
        v *= factor(x[i])
    if m >= 2:
        v *= tail(x[M - m])
    return correct01(v)


def sh_linear(x, m, M):
    return _shape_general(x, m, M, lambda t: t, lambda t: 1.0 - t)


def sh_convex(x, m, M):
    return _shape_general(x, m, M,
                          lambda t: 1.0 - math.cos(t * math.pi / 2.0),
                          lambda t: 1.0 - math.sin(t * math.pi / 2.0))


def sh_concave(x, m, M):
    return _shape_general(x, m, M,
                          lambda t: math.sin(t * math.pi / 2.0),
                          lambda t: math.cos(t * math.pi / 2.0))


def sh_mixed(x1, A, alpha):
    v = (1.0 - x1 - math.cos(2.0 * A * math.pi * x1 + math.pi / 2.0) / (2.0 * A * math.pi)) ** alpha
    return correct01(v)


def sh_disc(x1, A, alpha, beta):
    v = 1.0 - (x1 ** alpha) * math.cos(A * (x1 ** beta) * math.pi) ** 2
    return correct01(v)


# ---------------------------------------------------------------------------
# problem assembly


def _position_groups(k, M):
    g = k // (M - 1)
    return [list(range(i * g, (i + 1) * g)) for i in range(M - 1)]


def _finalize(t, prob, M):
    A = [1.0] * (M - 1)
    if prob == 3:
        A = [1.0] + [0.0] * (M - 2)
    x = [correct01(max(t[M - 1], A[i]) * (t[i] - 0.5) + 0.5) for i in range(M - 1)]
    x.append(t[M - 1])
    if prob == 1:
        h = [sh_convex(x, m, M) for m in range(1, M)] + [sh_mixed(x[0], 5.0, 1.0)]
    elif prob == 2:
        h = [sh_convex(x, m, M) for m in range(1, M)] + [sh_disc(x[0], 5.0, 1.0, 1.0)]
    elif prob == 3:
        h = [sh_linear(x, m, M) for m in range(1, M + 1)]
    else:
        h = [sh_concave(x, m, M) for m in range(1, M + 1)]
    return [x[M - 1] + 2.0 * (m + 1) * h[m] for m in range(M)]


def wfg_evaluate(prob, M, k, l, z):
    n = k + l
    assert len(z) == n
    assert k % (M - 1) == 0
    if prob in (2, 3):
        assert l % 2 == 0
    y = [correct01(z[i] / (2.0 * (i + 1))) for i in range(n)]
    groups = _position_groups(k, M)

    if prob == 1:
        y = y[:k] + [s_linear(v, 0.35) for v in y[k:]]
        y = y[:k] + [b_flat(v, 0.8, 0.75, 0.85) for v in y[k:]]
        y = [b_poly(v, 0.02) for v in y]
        t = [r_sum([y[j] for j in g], [2.0 * (j + 1) for j in g]) for g in groups]
        t.append(r_sum(y[k:], [2.0 * (j + 1) for j in range(k, n)]))
    elif prob in (2, 3):
        y = y[:k] + [s_linear(v, 0.35) for v in y[k:]]
        y2 = y[:k]
        for i in range(k, k + l // 2):
            a = k + 2 * (i - k)
            y2.append(r_nonsep([y[a], y[a + 1]], 2))
        y = y2
        t = [r_sum([y[j] for j in g], [1.0] * len(g)) for g in groups]
        t.append(r_sum(y[k:], [1.0] * (l // 2)))
    elif prob == 4:
        y = [s_multi(v, 30.0, 10.0, 0.35) for v in y]
        t = [r_sum([y[j] for j in g], [1.0] * len(g)) for g in groups]
        t.append(r_sum(y[k:], [1.0] * l))
    elif prob == 5:
        y = [s_decept(v, 0.35, 0.001, 0.05) for v in y]
        t = [r_sum([y[j] for j in g], [1.0] * len(g)) for g in groups]
        t.append(r_sum(y[k:], [1.0] * l))
    elif prob == 6:
        y = y[:k] + [s_linear(v, 0.35) for v in y[k:]]
        t = [r_nonsep([y[j] for j in g], k // (M - 1)) for g in groups]
        t.append(r_nonsep(y[k:], l))
    elif prob == 7:
        y = [b_param(y[i], r_sum(y[i + 1:], [1.0] * (n - i - 1)), 0.98 / 49.98, 0.02, 50.0)
             for i in range(k)] + y[k:]
        y = y[:k] + [s_linear(v, 0.35) for v in y[k:]]
        t = [r_sum([y[j] for j in g], [1.0] * len(g)) for g in groups]
        t.append(r_sum(y[k:], [1.0] * l))
    elif prob == 8:
        y = y[:k] + [b_param(y[i], r_sum(y[:i], [1.0] * i), 0.98 / 49.98, 0.02, 50.0)
                     for i in range(k, n)]
        y = y[:k] + [s_linear(v, 0.35) for v in y[k:]]
        t = [r_sum([y[j] for j in g], [1.0] * len(g)) for g in groups]
        t.append(r_sum(y[k:], [1.0] * l))
    elif prob == 9:
        y = [b_param(y[i], r_sum(y[i + 1:], [1.0] * (n - i - 1)), 0.98 / 49.98, 0.02, 50.0)
             for i in range(n - 1)] + [y[n - 1]]
        y = ([s_decept(v, 0.35, 0.001, 0.05) for v in y[:k]]
             + [s_multi(v, 30.0, 95.0, 0.35) for v in y[k:]])
        t = [r_nonsep([y[j] for j in g], k // (M - 1)) for g in groups]
        t.append(r_nonsep(y[k:], l))
    else:
        raise ValueError(prob)

    return _finalize(t, prob, M)


def optimal_distance_values(prob, k, l, position_y):
    """Normalized optimal distance parameter values y_{k+1..n} for the front.

    `position_y` are the normalized position values z_i/(2i), needed for WFG8
    whose distance optima depend on preceding parameters.
    """
    n = k + l
    if prob == 8:
        ys = list(position_y)
        for i in range(k, n):
            u = r_sum(ys[:i], [1.0] * i)
            exponent = 0.02 + (50.0 - 0.02) * (0.98 / 49.98
                                               - (1.0 - 2.0 * u) * abs(math.floor(0.5 - u) + 0.98 / 49.98))
            ys.append(0.35 ** (1.0 / exponent))
        return ys[k:]
    if prob == 9:
        ys = [0.0] * n
        ys[n - 1] = 0.35
        for i in range(n - 2, k - 1, -1):
            u = r_sum(ys[i + 1:], [1.0] * (n - i - 1))
            exponent = 0.02 + (50.0 - 0.02) * (0.98 / 49.98
                                               - (1.0 - 2.0 * u) * abs(math.floor(0.5 - u) + 0.98 / 49.98))
            ys[i] = 0.35 ** (1.0 / exponent)
        return ys[k:]
    return [0.35] * l


def _rng(seed):
    state = seed & 0xFFFFFFFFFFFFFFFF

    def nxt():
        nonlocal state
        state = (state + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        z = z ^ (z >> 31)
        return (z >> 11) * (1.0 / (1 << 53))

    return nxt


def selfcheck():
    k, l = 4, 20
    n = k + l
    for M in (2, 5):
        for prob in range(1, 10):
            rnd = _rng(1000 * prob + M)
            # range of raw objectives: f_m in [0, 1 + 2m]
            for _ in range(2000):
                z = [rnd() * 2.0 * (i + 1) for i in range(n)]
                f = wfg_evaluate(prob, M, k, l, z)
                for m, v in enumerate(f, start=1):
                    assert -1e-9 <= v <= 1.0 + 2.0 * m + 1e-9, (prob, M, m, v)
            # optimal distance values put the solution on the front: the
            # distance meta-variable x_M must vanish, i.e. f_m = 2m * h_m.
            for _ in range(200):
                pos_y = [rnd() for _ in range(k)]
                dist_y = optimal_distance_values(prob, k, l, pos_y)
                z = [pos_y[i] * 2.0 * (i + 1) for i in range(k)] + \
                    [dist_y[i] * 2.0 * (k + i + 1) for i in range(l)]
                f = wfg_evaluate(prob, M, k, l, z)
                if prob == 4:
                    s = sum((f[m] / (2.0 * (m + 1))) ** 2 for m in range(M))
                    assert abs(s - 1.0) < 1e-9, (M, s)
                if prob in (4, 5, 6, 7, 8, 9):
                    s = sum((f[m] / (2.0 * (m + 1))) ** 2 for m in range(M))
                    assert abs(s - 1.0) < 1e-6, (prob, M, s)
    # spot values used by the Rust unit tests
    print("WFG4 M=2 at z=0:", wfg_evaluate(4, 2, 4, 20, [0.0] * 24))
    print("s_multi(0,30,10,0.35) =", repr(s_multi(0.0, 30.0, 10.0, 0.35)))
    print("s_decept(0.2,0.35,0.001,0.05) =", repr(s_decept(0.2, 0.35, 0.001, 0.05)))
    print("s_linear(0.8,0.35) =", repr(s_linear(0.8, 0.35)))
    print("b_flat(0.4,0.8,0.75,0.85) =", repr(b_flat(0.4, 0.8, 0.75, 0.85)))
    print("b_param(0.6,0.3,0.98/49.98,0.02,50) =", repr(b_param(0.6, 0.3, 0.98 / 49.98, 0.02, 50.0)))
    print("r_nonsep([0.3,0.8],2) =", repr(r_nonsep([0.3, 0.8], 2)))
    print("selfcheck ok")


def write_golden(outdir):
    import os
    os.makedirs(outdir, exist_ok=True)
    k, l = 4, 20
    n = k + l
    for M in (2, 5):
        for prob in range(1, 10):
            rnd = _rng(97531 * prob + M)
            path = os.path.join(outdir, "wfg%d_m%d.txt" % (prob, M))
            with open(path, "w") as fh:
                for _ in range(100):
                    z = [rnd() * 2.0 * (i + 1) for i in range(n)]
                    f = wfg_evaluate(prob, M, k, l, z)
                    row = ["%.17g" % v for v in z] + ["%.17g" % v for v in f]
                    fh.write(" ".join(row) + "\n")
            print("wrote", path)


if __name__ == "__main__":
    if "--selfcheck" in sys.argv:
        selfcheck()
    elif "--golden" in sys.argv:
        write_golden(sys.argv[sys.argv.index("--golden") + 1])
    else:
        print(__doc__)
