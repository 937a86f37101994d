"""Writes lowess reference fits computed by statsmodels."""
import numpy as np
from statsmodels.nonparametric.smoothers_lowess import lowess

rng = np.random.default_rng(20240611)


def write(path, x, y, frac, it):
    fit = lowess(y, x, frac=frac, it=it, delta=0.0, return_sorted=False)
    with open(path, "w", newline="\n") as f:
        f.write(f"# frac={frac!r} it={it}\n")
        f.write("x,y,fit\n")
        for a, b, c in zip(x, y, fit):
            f.write(f"{float(a)!r},{float(b)!r},{float(c)!r}\n")


x = np.sort(rng.uniform(10, 60, 20))
y = 2.0 + 0.08 * x - 0.0006 * x**2 + rng.normal(0, 0.25, 20)
write("fixtures/lowess/reference20.csv", x, y, 1.0 / 3.0, 0)

x = np.round(np.sort(rng.uniform(12, 48, 30)))
y = np.log(x) + rng.normal(0, 0.1, 30)
write("fixtures/lowess/ties30.csv", x, y, 1.0 / 3.0, 0)

x = np.sort(rng.uniform(0, 10, 25))
y = np.sin(x) + rng.normal(0, 0.2, 25)
y[7] += 3.0
write("fixtures/lowess/robust25.csv", x, y, 0.5, 2)
