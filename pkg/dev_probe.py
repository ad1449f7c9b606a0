"""Dev-only probe: establish key numbers before freezing tests (not shipped)."""
import math
import time

import numpy as np

from hyplap import (
    EigenParams, solve_regular, solve_singular, exterior_combination,
    find_peak, decay_fit, evaluate, estimate_barrier_constants,
)
from hyplap.radial import ode_residual_midpoints, residual_tolerance

t0 = time.perf_counter()

# --- n=3 closed forms ---
for lam in (0.1, 0.5, 1.0):
    p = EigenParams(3, lam)
    k = math.sqrt(1 - lam)
    reg = solve_regular(p, 10.0)
    sing = solve_singular(p, 1e-3, 10.0)
    r = np.linspace(1e-3, 10, 3001)
    if lam < 1:
        u_or = np.sinh(k * r) / (k * np.sinh(r))
        v_or = np.exp(-k * r) / np.sinh(r)
    else:
        u_or = r / np.sinh(r)
        v_or = 1.0 / np.sinh(r)
    eu = np.max(np.abs(evaluate(reg, r) - u_or) / np.abs(u_or))
    ev = np.max(np.abs(evaluate(sing, r) - v_or) / np.abs(v_or))
    ext = exterior_combination(reg, sing, 1.0)
    re = np.linspace(1.0, 10.0, 2001)
    w_or = (np.exp(-k) * np.sinh(k * re) - np.sinh(k) * np.exp(-k * re)) / np.sinh(re) if lam < 1 else (re - 1) / np.sinh(re)
    w_or = w_or / w_or.max()
    # normalize oracle by its true sup on a fine grid
    rf = np.linspace(1.0, 10.0, 200001)
    w_f = (np.exp(-k) * np.sinh(k * rf) - np.sinh(k) * np.exp(-k * rf)) / np.sinh(rf) if lam < 1 else (rf - 1) / np.sinh(rf)
    sup = w_f.max()
    w_or2 = ((np.exp(-k) * np.sinh(k * re) - np.sinh(k) * np.exp(-k * re)) / np.sinh(re) if lam < 1 else (re - 1) / np.sinh(re)) / sup
    ee = np.max(np.abs(evaluate(ext, re) - w_or2))
    print(f"lam={lam}: reg rel {eu:.2e}  sing rel {ev:.2e}  ext abs {ee:.2e}  peak={find_peak(ext):.6f}")
    res = ode_residual_midpoints(sing); tol = residual_tolerance(sing)
    print(f"   sing residual ok: {np.all(np.abs(res) <= tol)}  max ratio {np.max(np.abs(res)/tol):.3f}  sing grid {sing.grid.size}")

print(f"time n=3 block: {time.perf_counter()-t0:.2f}s")

# oracle peak for n=3 lam=1: tanh r = r-1
from scipy.optimize import brentq
print("peak oracle:", brentq(lambda r: math.tanh(r) - (r - 1), 1.5, 2.5, xtol=1e-14))

# --- barrier constants ---
for n in (2, 3):
    t1 = time.perf_counter()
    bc = estimate_barrier_constants(n)
    print(f"n={n}: R0={bc.R0:.8f} C={bc.C:.8f} C0={bc.C0:.8f} d0={bc.d0:.8f} d1={bc.d1:.8f}  ({time.perf_counter()-t1:.2f}s)")

# --- decay values u(15) ---
for n, lam in ((2, 0.25), (2, 1/4*0.5), (3, 0.5), (3, 1.0)):
    p = EigenParams(n, lam)
    reg = solve_regular(p, 16.0)
    C, ok = decay_fit(reg)
    print(f"n={n} lam={lam}: u(15)={evaluate(reg, 15.0):.4e}  C={C:.4f} check={ok}  bound@15={C*15*math.exp(-math.sqrt(lam)*15):.4e}")

print(f"total: {time.perf_counter()-t0:.2f}s")
