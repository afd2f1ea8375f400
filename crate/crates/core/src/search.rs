//! One-dimensional minimizers used by the duration solvers.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `tol`. The endpoints are
/// compared too, so monotone functions return the better boundary.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let (a0, b0) = (a, b);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;
    while b - a > tol && iters < 400 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iters += 1;
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a0, b0] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Dense uniform grid over `[a, b]` followed by golden-section refinement
/// inside the two cells around the best grid point. No unimodality is assumed
/// for the coarse pass.
pub fn grid_then_golden<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    points: usize,
    tol: f64,
) -> (f64, f64) {
    if b <= a {
        return (a, f(a));
    }
    let n = points.max(2);
    let step = (b - a) / (n - 1) as f64;
    let grid = |i: usize| if i + 1 == n { b } else { a + step * i as f64 };
    let mut best = (0usize, f64::INFINITY);
    for i in 0..n {
        let v = f(grid(i));
        if v < best.1 {
            best = (i, v);
        }
    }
    let (i, fi) = best;
    let lo = grid(i.saturating_sub(1));
    let hi = grid((i + 1).min(n - 1));
    let refined = golden_section(&f, lo, hi, tol);
    if refined.1 < fi {
        refined
    } else {
        (grid(i), fi)
    }
}
