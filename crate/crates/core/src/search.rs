//! Golden-section search on an interval.
//!
//! Works for any function that is unimodal (in particular convex, plateaus
//! allowed) on the bracket: when the two probe values tie, the minimum lies
//! between them, so either shrink keeps a global minimizer inside.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimize `f` on `[a, b]`.
///
/// Stops after `max_iter` interval reductions or once the bracket is shorter
/// than `x_tol`. Endpoints are evaluated too, so boundary minima are exact.
/// Returns `(x_min, f_min)` over every point evaluated.
pub fn golden_min(mut a: f64, mut b: f64, max_iter: usize, x_tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    if b <= a {
        let m = 0.5 * (a + b);
        return (m, f(m));
    }
    let mut best_x = a;
    let mut best_f = f(a);
    let fb = f(b);
    if fb < best_f {
        best_x = b;
        best_f = fb;
    }

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    for _ in 0..max_iter {
        if (b - a) <= x_tol {
            break;
        }
        if f1 < f2 {
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
    }

    for (x, v) in [(x1, f1), (x2, f2)] {
        if v < best_f {
            best_x = x;
            best_f = v;
        }
    }
    (best_x, best_f)
}

/// Maximize `f` on `[a, b]`; same contract as [`golden_min`].
pub fn golden_max(a: f64, b: f64, max_iter: usize, x_tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (x, neg) = golden_min(a, b, max_iter, x_tol, |t| -f(t));
    (x, -neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum() {
        let (x, v) = golden_min(-2.0, 2.0, 200, 1e-14, |t| (t - 0.3) * (t - 0.3) + 1.0);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plateau_keeps_global_minimum() {
        // max(|1+t|, 1) is flat at its minimum on [-2, 0].
        let (_, v) = golden_min(-3.0, 3.0, 200, 1e-14, |t| (1.0 + t).abs().max(1.0));
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_minimum_is_exact() {
        let (x, v) = golden_min(0.0, 5.0, 200, 1e-14, |t| t + 1.0);
        assert_eq!(x, 0.0);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn kink_minimum() {
        let (x, v) = golden_min(-4.0, 4.0, 300, 1e-15, |t| (t - 1.25).abs());
        assert!((x - 1.25).abs() < 1e-9);
        assert!(v < 1e-9);
    }
}
