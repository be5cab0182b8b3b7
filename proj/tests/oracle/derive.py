"""Independent reference values frozen into the C++ tests (numpy + mpmath)."""
import itertools

import mpmath as mp
import numpy as np

mp.mp.dps = 30


def shaped(lam, d, pref, num):
    y = (mp.mpf(lam) * mp.log(d, 2)) ** mp.mpf("0.25")
    hyp = 3.1 * d * y
    val = pref * y * mp.log(num / (mp.mpf("3.1") * y), 2) if hyp <= 2 else mp.inf
    return val, hyp


def entropy(rho):
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(-(w * np.log2(w)).sum())


def ptrace(rho, dims, keep):
    n = len(dims)
    r = rho.reshape(dims + dims)
    idx = list(range(2 * n))
    for i in sorted(set(range(n)) - set(keep), reverse=True):
        r = np.trace(r, axis1=i, axis2=i + r.ndim // 2)
    d = int(np.prod([dims[k] for k in keep]))
    return r.reshape(d, d)


def werner(p):
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    return p * np.outer(psi, psi) + (1 - p) * np.eye(4) / 4


def h(x):
    return 0.0 if x in (0, 1) else float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


print("correction_term(1e-6,2)", shaped(1e-6, 2, 6.2 * 2, 4))
print("correction_term(0.5,2) hyp", shaped(0.5, 2, 6.2 * 2, 4)[1])
print("additivity_correction(1e-6,2,3)", shaped(1e-6, 2, 6.2 * 2 * 3, 4))
print("combined_correction(1e-6,2,2)", shaped(1e-6, 2, 6.2 * 2 * 3, 2))
print("erasure_correction(0.01,2)", shaped(0.01, 2, 6.2 * 2, 2))
print("erasure_correction(0.001,3)", shaped(0.001, 3, 6.2 * 3, 3))
x = (mp.mpf("1e-4") * 1) ** mp.mpf("0.25")
print("entropy_correction(1e-4,1,2)", 3.1 * 2 * x * mp.log(4 / (mp.mpf("3.1") * x), 2))
for p in (0.2, 0.5, 0.8):
    r = werner(p)
    mi = entropy(ptrace(r, [2, 2], [0])) + entropy(ptrace(r, [2, 2], [1])) - entropy(r)
    print("werner", p, "half_I", mi / 2)
for p in (0.2, 0.4, 0.8):
    print("depolarizing", p, "chi", 1 - h(p / 2))
print("binomial_weights(3,0.3)", [mp.binomial(3, k) * mp.mpf("0.3") ** k * mp.mpf("0.7") ** (3 - k) for k in range(4)])
for lam, n in ((0.1, 2), (0.25, 3), (0.5, 4)):
    print("blocksize coeff", lam, n, lam * (1 - (1 - lam) ** (n - 1)))
print("monogamy_game_bound(2,2)", 2 * mp.mpf(2) ** mp.mpf("-0.25"))
print("monogamy_game_bound(3,3)", mp.mpf(3) ** mp.mpf("-0.25") * 3 * mp.log(3, 2) ** mp.mpf("0.25"))
print("chsh quantum", mp.cos(mp.pi / 8) ** 2)

# Exact classical value of a random small game by brute force.
rng = np.random.default_rng(5)
v = rng.integers(0, 2, size=(3, 2, 2, 3))
best = 0
for a in itertools.product(range(2), repeat=3):
    for b in itertools.product(range(3), repeat=2):
        best = max(best, sum(v[x, y, a[x], b[y]] for x in range(3) for y in range(2)))
print("random game v", v.tolist(), "classical", best, "/6")
