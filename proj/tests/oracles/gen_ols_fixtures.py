#!/usr/bin/env python3
# Copyright 2026 The trackr Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""OLS fixtures with reference results.

Reference fits solve the normal equations in 60-digit arithmetic (mpmath)
and take two-sided p-values from the regularized incomplete beta function.
Results are cross-checked against numpy/scipy before being written.
"""
import csv
import os
import random
import sys

import mpmath as mp
import numpy as np
from scipy import stats

mp.mp.dps = 60


def reference_fit(columns, y):
    n = len(y)
    X = mp.matrix([[1] + [mp.mpf(c[i]) for c in columns] for i in range(n)])
    Y = mp.matrix([mp.mpf(v) for v in y])
    XtX = X.T * X
    beta = mp.lu_solve(XtX, X.T * Y)
    resid = Y - X * beta
    rss = sum(r * r for r in resid)
    df = n - X.cols
    sigma2 = rss / df
    inv = XtX ** -1
    out = []
    for j in range(X.cols):
        se = mp.sqrt(sigma2 * inv[j, j])
        t = beta[j] / se
        p = mp.betainc(mp.mpf(df) / 2, mp.mpf(1) / 2, 0, df / (df + t * t), regularized=True)
        out.append((beta[j], se, t, p))
    return out, rss, df


def crosscheck(columns, y, fit):
    X = np.column_stack([np.ones(len(y))] + [np.asarray(c, float) for c in columns])
    beta, *_ = np.linalg.lstsq(X, np.asarray(y, float), rcond=None)
    resid = np.asarray(y, float) - X @ beta
    df = len(y) - X.shape[1]
    se = np.sqrt(resid @ resid / df * np.diag(np.linalg.inv(X.T @ X)))
    p = 2 * stats.t.sf(np.abs(beta / se), df)
    for j, (b, s, _, pv) in enumerate(fit):
        assert abs(float(b) - beta[j]) <= 1e-8 * max(1, abs(beta[j])), (j, b, beta[j])
        assert abs(float(s) - se[j]) <= 1e-8 * se[j]
        assert abs(float(pv) - p[j]) <= 1e-8 * max(p[j], 1e-300)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_expected(path, names, fit, rss, df):
    with open(path, "w") as f:
        f.write("term\testimate\tstd_error\tt_value\tp_value\n")
        for name, (b, se, t, p) in zip(names, fit):
            f.write("\t".join([name] + [mp.nstr(v, 20, min_fixed=1, max_fixed=0) for v in (b, se, t, p)]) + "\n")
        f.write(f"# rss\t{mp.nstr(rss, 20, min_fixed=1, max_fixed=0)}\n# df_residual\t{df}\n")


def r4(v):
    return float(f"{v:.4f}")


def simple(x, e, slope, intercept):
    return [r4(intercept + slope * xi + ei) for xi, ei in zip(x, e)]


def tune(x, e, intercept, target):
    """Slope whose two-sided p-value lands on `target` before rounding."""
    lo, hi = 0.0, 10.0
    for _ in range(200):
        mid = (lo + hi) / 2
        fit, _, _ = reference_fit([x], [intercept + mid * xi + ei for xi, ei in zip(x, e)])
        if fit[1][3] > target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def main(outdir):
    rng = random.Random(20)
    x1 = [r4(rng.uniform(0, 10)) for _ in range(20)]
    x2 = [r4(rng.uniform(-5, 5)) for _ in range(20)]
    y = [r4(1.5 + 0.8 * a - 0.3 * b + rng.gauss(0, 1.2)) for a, b in zip(x1, x2)]
    fit, rss, df = reference_fit([x1, x2], y)
    crosscheck([x1, x2], y, fit)
    write_csv(os.path.join(outdir, "lm20.csv"), ["x1", "x2", "y"], zip(x1, x2, y))
    write_expected(os.path.join(outdir, "lm20_expected.tsv"), ["(Intercept)", "x1", "x2"], fit, rss, df)

    x = [float(i + 1) for i in range(20)]
    e = [r4(rng.gauss(0, 1)) for _ in range(20)]
    mean_e = sum(e) / len(e)
    e = [r4(v - mean_e) for v in e]
    for name, target in (("boundary_low", 0.049), ("boundary_high", 0.051)):
        slope = tune(x, e, 0.0, target)
        ys = simple(x, e, slope, 0.0)
        fit, rss, df = reference_fit([x], ys)
        crosscheck([x], ys, fit)
        p = float(fit[1][3])
        assert (p < 0.05) == (target < 0.05) and abs(p - target) < 5e-4, (name, p)
        write_csv(os.path.join(outdir, name + ".csv"), ["x", "y"], zip(x, ys))
        write_expected(os.path.join(outdir, name + "_expected.tsv"), ["(Intercept)", "x"], fit, rss, df)

    # Slope p near 0.001 with an intercept far from significance.
    slope = tune(x, e, 0.0, 0.001)
    best = None
    for k in range(-4000, 4001):
        c = k / 1000
        fit, _, _ = reference_fit([x], simple(x, e, slope, c))
        gap = abs(float(fit[0][3]) - 0.9)
        if best is None or gap < best[0]:
            best = (gap, c)
    ys = simple(x, e, slope, best[1])
    fit, rss, df = reference_fit([x], ys)
    crosscheck([x], ys, fit)
    assert abs(float(fit[1][3]) - 0.001) < 1e-4 and abs(float(fit[0][3]) - 0.9) < 0.02
    write_csv(os.path.join(outdir, "slope_signal.csv"), ["x", "y"], zip(x, ys))
    write_expected(os.path.join(outdir, "slope_signal_expected.tsv"), ["(Intercept)", "x"], fit, rss, df)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else ".")
