#!/usr/bin/env python3
"""Offline generator for zeta-zero data files.

Writes one line per nontrivial zero rho = 1/2 + i*gamma with gamma < HEIGHT:

    <gamma> <alpha> <psi>

where alpha = 1/|rho zeta'(rho)| and psi = arg(rho zeta'(rho)) in (-pi, pi].
All values are computed with Arb (python-flint) ball arithmetic and printed
with DIGITS significant digits; a line is only written when every ball is
tight enough to guarantee those digits.

Usage: gen_zeros.py HEIGHT DIGITS OUT [--start N]
"""
import gzip
import sys
import time

from flint import acb, acb_series, ctx


def fmt(x, digits):
    # x is an arb; the midpoint printed to `digits` significant digits.
    s = x.str(digits, radius=False, more=True)
    return s


def main():
    height = float(sys.argv[1])
    digits = int(sys.argv[2])
    out = sys.argv[3]
    ctx.dps = digits + 25
    opener = gzip.open if out.endswith(".gz") else open
    chunk = 500
    n = 1
    t0 = time.time()
    with opener(out, "wt") as f:
        f.write("# generator: scripts/gen_zeros.py (Arb via python-flint %s)\n" % __import__("flint").__version__)
        f.write("# precision: %d significant digits (working %d)\n" % (digits, ctx.dps))
        f.write("# height: 0 < gamma < %s\n" % sys.argv[1])
        f.write("# columns: gamma alpha psi  (alpha = 1/|rho zeta'(rho)|, psi = arg(rho zeta'(rho)))\n")
        done = False
        while not done:
            zs = acb.zeta_zeros(n, chunk)
            for z in zs:
                g = z.imag
                if g.mid() >= height:
                    done = True
                    break
                d = acb_series([z, 1], prec=2).zeta().coeffs()[1]
                w = z * d
                alpha = 1 / abs(w)
                psi = w.arg()
                for v in (g, alpha, psi):
                    if v.rel_accuracy_bits() < digits * 3.33 + 8:
                        raise SystemExit("insufficient accuracy at zero %d" % n)
                f.write("%s %s %s\n" % (fmt(g, digits), fmt(alpha, digits), fmt(psi, digits)))
                n += 1
            f.flush()
            print("zeros %d  gamma %.3f  %.1fs" % (n - 1, float(g.mid()), time.time() - t0), file=sys.stderr, flush=True)


if __name__ == "__main__":
    main()
