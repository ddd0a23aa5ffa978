//! Dense complex linear algebra: partially pivoted LU and 2×2 matrices.

use crate::cplx::{CExt, C};
use crate::error::{Error, Result};
use crate::logc::LogComplex;
use crate::real::Real;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat<T: Real> {
    pub n: usize,
    pub data: Vec<C<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![C::new(T::zero(), T::zero()); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(n);
        for r in 0..n {
            for s in 0..n {
                m[(r, s)] = f(r, s);
            }
        }
        m
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, z| a.max(z.cabs()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |r, s| self[(s, r)])
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        (0..self.n)
            .map(|r| (0..self.n).fold(C::new(T::zero(), T::zero()), |a, s| a + self[(r, s)] * v[s]))
            .collect()
    }
}

impl<T: Real> Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    fn index(&self, (r, s): (usize, usize)) -> &C<T> {
        &self.data[r * self.n + s]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (r, s): (usize, usize)) -> &mut C<T> {
        &mut self.data[r * self.n + s]
    }
}

/// LU factors with row permutation `perm` (row i of U·L came from row perm[i]).
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    lu: CMat<T>,
    perm: Vec<usize>,
    odd: bool,
    /// Largest pivot magnitude over smallest.
    pub condition: f64,
    /// Smallest pivot magnitude relative to the largest entry of the input.
    pub min_rel_pivot: f64,
    pub min_pivot_index: usize,
}

/// Factor with partial pivoting. Never fails; singularity is judged by the
/// caller from [`Lu::min_rel_pivot`].
pub fn lu<T: Real>(a: &CMat<T>) -> Lu<T> {
    let n = a.n;
    let scale = a.max_abs().to_f64();
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut odd = false;
    let mut pmax = 0.0f64;
    let mut pmin = f64::INFINITY;
    let mut pmin_i = 0;
    for k in 0..n {
        let mut best = k;
        let mut bv = m[(k, k)].cabs();
        for r in k + 1..n {
            let v = m[(r, k)].cabs();
            if v > bv {
                best = r;
                bv = v;
            }
        }
        if best != k {
            for s in 0..n {
                m.data.swap(k * n + s, best * n + s);
            }
            perm.swap(k, best);
            odd = !odd;
        }
        let piv = m[(k, k)];
        let pv = piv.cabs().to_f64();
        pmax = pmax.max(pv);
        if pv < pmin {
            pmin = pv;
            pmin_i = k;
        }
        if pv == 0.0 {
            continue;
        }
        for r in k + 1..n {
            let l = m[(r, k)] / piv;
            m[(r, k)] = l;
            if l.re == T::zero() && l.im == T::zero() {
                continue;
            }
            for s in k + 1..n {
                let u = m[(k, s)];
                m[(r, s)] = m[(r, s)] - l * u;
            }
        }
    }
    let condition = if pmin > 0.0 { pmax / pmin } else { f64::INFINITY };
    let min_rel_pivot = if scale > 0.0 { pmin / scale } else { 0.0 };
    Lu { lu: m, perm, odd, condition, min_rel_pivot, min_pivot_index: pmin_i }
}

impl<T: Real> Lu<T> {
    pub fn n(&self) -> usize {
        self.lu.n
    }

    /// log det as a sum of log pivots.
    pub fn log_det(&self) -> LogComplex<T> {
        let mut lm = T::zero();
        let mut ph = if self.odd { T::pi() } else { T::zero() };
        for k in 0..self.lu.n {
            let l = self.lu[(k, k)].cln();
            lm += l.re;
            ph += l.im;
        }
        LogComplex::new(lm, ph)
    }

    /// Fails when a pivot is below `tol` relative to the input scale.
    pub fn check(&self, tol: f64) -> Result<()> {
        if self.min_rel_pivot < tol || !self.condition.is_finite() {
            return Err(Error::Singular { index: self.min_pivot_index, pivot: self.min_rel_pivot });
        }
        Ok(())
    }

    pub fn solve(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.lu.n;
        let mut y: Vec<C<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let mut acc = y[r];
            for s in 0..r {
                acc = acc - self.lu[(r, s)] * y[s];
            }
            y[r] = acc;
        }
        for r in (0..n).rev() {
            let mut acc = y[r];
            for s in r + 1..n {
                acc = acc - self.lu[(r, s)] * y[s];
            }
            y[r] = acc / self.lu[(r, r)];
        }
        y
    }

    /// Solves Aᵀx = b with the same factors.
    pub fn solve_transpose(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.lu.n;
        // PA = LU, so Aᵀ = Uᵀ Lᵀ P.
        let mut y = b.to_vec();
        for r in 0..n {
            let mut acc = y[r];
            for s in 0..r {
                acc = acc - self.lu[(s, r)] * y[s];
            }
            y[r] = acc / self.lu[(r, r)];
        }
        for r in (0..n).rev() {
            let mut acc = y[r];
            for s in r + 1..n {
                acc = acc - self.lu[(s, r)] * y[s];
            }
            y[r] = acc;
        }
        let mut x = vec![C::new(T::zero(), T::zero()); n];
        for (i, &pi) in self.perm.iter().enumerate() {
            x[pi] = y[i];
        }
        x
    }
}

/// 2×2 complex matrix [[a, b], [c, d]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T: Real> {
    pub a: C<T>,
    pub b: C<T>,
    pub c: C<T>,
    pub d: C<T>,
}

impl<T: Real> Mat2<T> {
    pub fn new(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        let o = C::new(T::one(), T::zero());
        let z = C::new(T::zero(), T::zero());
        Mat2::new(o, z, z, o)
    }

    pub fn diag(a: C<T>, d: C<T>) -> Self {
        let z = C::new(T::zero(), T::zero());
        Mat2::new(a, z, z, d)
    }

    pub fn upper(b: C<T>) -> Self {
        let o = C::new(T::one(), T::zero());
        let z = C::new(T::zero(), T::zero());
        Mat2::new(o, b, z, o)
    }

    pub fn lower(c: C<T>) -> Self {
        let o = C::new(T::one(), T::zero());
        let z = C::new(T::zero(), T::zero());
        Mat2::new(o, z, c, o)
    }

    pub fn det(&self) -> C<T> {
        self.a * self.d - self.b * self.c
    }

    /// Inverse through the adjugate.
    pub fn inv(&self) -> Self {
        let dt = self.det();
        Mat2::new(self.d / dt, -self.b / dt, -self.c / dt, self.a / dt)
    }

    pub fn max_abs(&self) -> T {
        self.a.cabs().max(self.b.cabs()).max(self.c.cabs()).max(self.d.cabs())
    }

    /// Largest entry of self − I.
    pub fn dist_identity(&self) -> T {
        (*self - Self::identity()).max_abs()
    }

    pub fn entries(&self) -> [C<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx::c;
    use crate::dd::Dd;

    fn sample(n: usize) -> CMat<f64> {
        CMat::from_fn(n, |r, s| c(((r * 7 + s * 3) % 5) as f64 - 2.0, ((r + 2 * s) % 3) as f64 * 0.5))
    }

    #[test]
    fn three_by_three_cofactor() {
        let m = CMat::from_fn(3, |r, s| c::<f64>((((r + 1) * (s + 2)) % 7) as f64 + 0.5, (r as f64 - s as f64) * 0.25));
        let a = |r, s| m[(r, s)];
        let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        let got = lu(&m).log_det().to_complex();
        assert!((got - det).norm() < 1e-12 * det.norm());
    }

    #[test]
    fn solve_roundtrip() {
        let m = sample(6);
        let f = lu(&m);
        let x: Vec<C<f64>> = (0..6).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        let b = m.mul_vec(&x);
        let y = f.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).norm() < 1e-12);
        }
        let bt = m.transpose().mul_vec(&x);
        let yt = f.solve_transpose(&bt);
        for (u, v) in x.iter().zip(&yt) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_is_flagged() {
        let m = CMat::from_fn(3, |r, s| c::<Dd>((r + s) as f64, 0.0));
        assert!(lu(&m).check(1e-27).is_err());
    }

    #[test]
    fn mat2_inverse() {
        let m = Mat2::new(c::<f64>(1.0, 2.0), c(0.5, 0.0), c(-1.0, 1.0), c(3.0, -0.5));
        assert!((m * m.inv()).dist_identity() < 1e-15);
    }
}
