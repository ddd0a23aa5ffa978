//! Gauss–Legendre rules and a graded variant for endpoint singularities.

use crate::real::Real;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
///
/// Newton iteration on the three-term recurrence, seeded in f64 and polished
/// in the working precision.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut xs = vec![T::zero(); n];
    let mut ws = vec![T::zero(); n];
    let one = T::one();
    let two = T::from_f64(2.0);
    let m = n.div_ceil(2);
    for i in 0..m {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = T::from_f64(guess);
        let mut dp = T::one();
        let iters = if T::DIGITS > 20 { 12 } else { 8 };
        for _ in 0..iters {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs().to_f64() < 1e-40 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != T::zero() {
            dp = d;
        }
        let w = two / ((one - x * x) * dp * dp);
        xs[i] = -x;
        ws[i] = w;
        xs[n - 1 - i] = x;
        ws[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = T::zero();
    }
    (xs, ws)
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_f64(k as f64);
        let p2 = ((T::from_f64((2 * k - 1) as f64)) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nf = T::from_f64(n as f64);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Composite rule on [0, 1] with panels geometrically refined towards 0.
///
/// Panels are [q^{j+1}, q^j] for j < levels plus [0, q^levels]; each carries
/// an `order`-point Gauss–Legendre rule. Suited to integrands behaving like
/// t^α with Re α > −1 at the left endpoint.
pub fn graded_unit<T: Real>(order: usize, levels: usize, ratio: f64) -> Vec<(T, T)> {
    let (gx, gw) = gauss_legendre::<T>(order);
    let q = T::from_f64(ratio);
    let half = T::from_f64(0.5);
    let mut out = Vec::with_capacity(order * (levels + 1));
    let mut hi = T::one();
    for _ in 0..levels {
        let lo = hi * q;
        push_panel(&mut out, &gx, &gw, lo, hi, half);
        hi = lo;
    }
    push_panel(&mut out, &gx, &gw, T::zero(), hi, half);
    out
}

fn push_panel<T: Real>(out: &mut Vec<(T, T)>, gx: &[T], gw: &[T], lo: T, hi: T, half: T) {
    let mid = (lo + hi) * half;
    let rad = (hi - lo) * half;
    for (x, w) in gx.iter().zip(gw) {
        out.push((mid + rad * *x, rad * *w));
    }
}

/// Rule on [a, b] graded towards both endpoints.
pub fn graded_interval<T: Real>(a: T, b: T, order: usize, levels: usize, ratio: f64) -> Vec<(T, T)> {
    let half = T::from_f64(0.5);
    let len = (b - a) * half;
    let unit = graded_unit::<T>(order, levels, ratio);
    let mut out = Vec::with_capacity(2 * unit.len());
    for &(t, w) in unit.iter() {
        out.push((a + len * t, len * w));
    }
    for &(t, w) in unit.iter().rev() {
        out.push((b - len * t, len * w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;

    #[test]
    fn integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre::<f64>(7);
        for deg in 0..14 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "deg {deg}: {s}");
        }
    }

    #[test]
    fn extended_weights_sum_to_two() {
        let (_, w) = gauss_legendre::<Dd>(40);
        let s: Dd = w.iter().copied().sum();
        assert!((s - Dd::from_f64(2.0)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn graded_rule_handles_root_singularity() {
        let rule = graded_unit::<f64>(16, 60, 0.3);
        let s: f64 = rule.iter().map(|(t, w)| w * t.powf(-0.5)).sum();
        assert!((s - 2.0).abs() < 1e-12, "{s}");
    }
}
