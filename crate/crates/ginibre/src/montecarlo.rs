//! Monte Carlo estimates over Ginibre matrices.
//!
//! Sample i of a run with seed s draws from the Philox stream keyed by (s, i),
//! so estimates are bit-identical for any thread count. Samples are produced
//! in fixed-size chunks in parallel, then reduced sequentially in index order.

use crate::cplx::C64;
use crate::error::{Error, Result};
use crate::linalg::{lu, CMat};
use crate::rng::Philox;
use rayon::prelude::*;

const CHUNK: usize = 4096;
/// Groups used by the median-of-means estimate.
const MOM_GROUPS: usize = 32;
/// Kurtosis proxy above which the median-of-means estimate is reported.
pub const HEAVY_TAIL_KURTOSIS: f64 = 100.0;
pub const MIN_SAMPLES: usize = 1000;

/// log|det(G − zI)| for one Ginibre draw, with the number of exactly
/// singular draws that were discarded before it.
pub fn sample_log_abs_det(n: usize, z: C64, rng: &mut Philox) -> (f64, u32) {
    let mut resamples = 0;
    loop {
        let m = draw_shifted(n, &[z], rng);
        let v = log_abs_dets(&m);
        if v.iter().all(|l| l.is_finite()) {
            return (v[0], resamples);
        }
        resamples += 1;
    }
}

/// Ginibre matrix with entries (ξ + iη)/√(2N).
pub fn draw_ginibre(n: usize, rng: &mut Philox) -> CMat<f64> {
    let s = (2.0 * n as f64).sqrt().recip();
    let mut m = CMat::zeros(n);
    for e in m.data.iter_mut() {
        let re = rng.next_normal();
        let im = rng.next_normal();
        *e = C64::new(re * s, im * s);
    }
    m
}

fn draw_shifted(n: usize, zs: &[C64], rng: &mut Philox) -> Vec<CMat<f64>> {
    let g = draw_ginibre(n, rng);
    zs.iter()
        .map(|&z| {
            let mut a = g.clone();
            for i in 0..n {
                a[(i, i)] -= z;
            }
            a
        })
        .collect()
}

fn log_abs_dets(ms: &[CMat<f64>]) -> Vec<f64> {
    ms.iter().map(|m| lu(m).log_det().log_mag).collect()
}

/// Joint draw at several shifts of one matrix: Σ_j γ_j log|det(G − z_j)|.
fn sample_weighted(n: usize, points: &[(C64, C64)], rng: &mut Philox) -> (C64, u32) {
    let zs: Vec<C64> = points.iter().map(|p| p.0).collect();
    let mut resamples = 0;
    loop {
        let ls = log_abs_dets(&draw_shifted(n, &zs, rng));
        if ls.iter().all(|l| l.is_finite()) {
            let e = points.iter().zip(&ls).fold(C64::new(0.0, 0.0), |a, (p, &l)| a + p.1 * l);
            return (e, resamples);
        }
        resamples += 1;
    }
}

/// Evaluates `f` on every sample index in parallel; output is in index order.
fn sample_all<V: Send>(samples: usize, seed: u64, f: impl Fn(&mut Philox) -> V + Sync) -> Vec<V> {
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Vec<V>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(samples))
                .map(|i| f(&mut Philox::for_sample(seed, i as u64)))
                .collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Pairwise sum in index order.
fn tree_sum<T: Copy + std::ops::Add<Output = T>>(v: &[T], zero: T) -> T {
    match v.len() {
        0 => zero,
        1 => v[0],
        n => tree_sum(&v[..n / 2], zero) + tree_sum(&v[n / 2..], zero),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub mean: C64,
    /// Sample standard deviation over √samples.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub resamples: u64,
    /// Fourth central moment over squared variance of the summands.
    pub kurtosis: f64,
    /// Reported when `kurtosis` exceeds [`HEAVY_TAIL_KURTOSIS`].
    pub median_of_means: Option<C64>,
}

impl McEstimate {
    /// |mean − v| in units of the standard error.
    pub fn sigmas_from(&self, v: C64) -> f64 {
        (self.mean - v).norm() / self.std_error
    }
}

fn summarize(values: &[C64], samples: usize, seed: u64, resamples: u64) -> McEstimate {
    let zero = C64::new(0.0, 0.0);
    let nf = samples as f64;
    let mean = tree_sum(values, zero) / nf;
    let dev2: Vec<f64> = values.iter().map(|v| (v - mean).norm_sqr()).collect();
    let m2 = tree_sum(&dev2, 0.0);
    let dev4: Vec<f64> = dev2.iter().map(|d| d * d).collect();
    let m4 = tree_sum(&dev4, 0.0) / nf;
    let var = m2 / (nf - 1.0);
    let kurtosis = if m2 > 0.0 { m4 / (m2 / nf).powi(2) } else { 0.0 };
    let median_of_means = (kurtosis > HEAVY_TAIL_KURTOSIS).then(|| median_of_means(values));
    McEstimate { mean, std_error: (var / nf).sqrt(), samples, seed, resamples, kurtosis, median_of_means }
}

/// Componentwise median of the means of contiguous groups.
fn median_of_means(values: &[C64]) -> C64 {
    let size = values.len().div_ceil(MOM_GROUPS);
    let means: Vec<C64> = values.chunks(size).map(|g| tree_sum(g, C64::new(0.0, 0.0)) / g.len() as f64).collect();
    let median = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        let k = v.len();
        if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) }
    };
    C64::new(median(means.iter().map(|m| m.re).collect()), median(means.iter().map(|m| m.im).collect()))
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::Parameter(format!("at least {MIN_SAMPLES} samples are required, got {samples}")));
    }
    Ok(())
}

/// Estimate of E|det(G_N − z)|^γ; complex γ averages e^{γL}.
pub fn mc_moment(n: usize, z: C64, gamma: C64, samples: usize, seed: u64) -> Result<McEstimate> {
    mc_product_moment(n, &[(z, gamma)], samples, seed)
}

/// Estimate of E ∏_j |det(G_N − z_j)|^{γ_j}, all factors from the same matrix.
pub fn mc_product_moment(n: usize, points: &[(C64, C64)], samples: usize, seed: u64) -> Result<McEstimate> {
    if n == 0 || points.is_empty() {
        return Err(Error::Parameter("need N >= 1 and at least one point".into()));
    }
    if let Some(p) = points.iter().find(|p| p.1.re <= -2.0) {
        return Err(Error::Parameter(format!("Re gamma must exceed -2, got {}", p.1)));
    }
    check_samples(samples)?;
    if points.iter().all(|p| p.1 == C64::new(0.0, 0.0)) {
        return Ok(McEstimate {
            mean: C64::new(1.0, 0.0),
            std_error: 0.0,
            samples,
            seed,
            resamples: 0,
            kurtosis: 0.0,
            median_of_means: None,
        });
    }
    let draws = sample_all(samples, seed, |rng| sample_weighted(n, points, rng));
    let resamples = draws.iter().map(|d| d.1 as u64).sum();
    let values: Vec<C64> = draws.iter().map(|d| d.0.exp()).collect();
    Ok(summarize(&values, samples, seed, resamples))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CltStatistic {
    pub mean: f64,
    pub variance: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Sample mean and variance of X_N = [log|det(G_N − z)| − N(|z|²−1)/2] / (½√log N).
pub fn clt_statistic(n: usize, z: C64, samples: usize, seed: u64) -> Result<CltStatistic> {
    if n < 50 {
        return Err(Error::Parameter(format!("the CLT statistic needs N >= 50, got {n}")));
    }
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("z = {z} is not inside the unit disk")));
    }
    check_samples(samples)?;
    let nf = n as f64;
    let centre = nf * (z.norm_sqr() - 1.0) / 2.0;
    let scale = 0.5 * nf.ln().sqrt();
    let xs: Vec<f64> = sample_all(samples, seed, |rng| (sample_log_abs_det(n, z, rng).0 - centre) / scale);
    let sf = samples as f64;
    let mean = tree_sum(&xs, 0.0) / sf;
    let dev2: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    Ok(CltStatistic { mean, variance: tree_sum(&dev2, 0.0) / (sf - 1.0), samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn one_by_one_second_moment() {
        for z in [c(0.0, 0.0), c(0.5, 0.0), c(0.3, -0.4)] {
            let e = mc_moment(1, z, c(2.0, 0.0), 200_000, 7).unwrap();
            assert!(e.sigmas_from(c(1.0 + z.norm_sqr(), 0.0)) < 3.0, "{z}: {e:?}");
        }
    }

    #[test]
    fn three_by_three_cofactor() {
        let mut rng = Philox::for_sample(11, 0);
        let g = draw_ginibre(3, &mut rng);
        let a = |r, s| g[(r, s)];
        let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        let (l, _) = sample_log_abs_det(3, c(0.0, 0.0), &mut Philox::for_sample(11, 0));
        assert!((l - det.norm().ln()).abs() < 1e-12);
    }

    #[test]
    fn gamma_zero_is_exact() {
        let e = mc_moment(5, c(0.5, 0.0), c(0.0, 0.0), 1000, 1).unwrap();
        assert_eq!((e.mean, e.std_error), (c(1.0, 0.0), 0.0));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(mc_moment(3, c(0.5, 0.0), c(1.0, 0.0), 10, 1).is_err());
        assert!(mc_moment(3, c(0.5, 0.0), c(-2.5, 0.0), 1000, 1).is_err());
        assert!(clt_statistic(10, c(0.5, 0.0), 1000, 1).is_err());
        assert!(clt_statistic(60, c(1.5, 0.0), 1000, 1).is_err());
    }

    #[test]
    fn rotation_invariance() {
        let a = mc_moment(4, c(0.3, 0.4), c(1.0, 0.0), 100_000, 3).unwrap();
        let b = mc_moment(4, c(0.5, 0.0), c(1.0, 0.0), 100_000, 4).unwrap();
        let combined = a.std_error.hypot(b.std_error);
        assert!((a.mean - b.mean).norm() < 3.0 * combined);
    }

    #[test]
    fn bit_reproducible() {
        let a = mc_moment(4, c(0.5, 0.0), c(1.0, 0.5), 5000, 99).unwrap();
        let b = mc_moment(4, c(0.5, 0.0), c(1.0, 0.5), 5000, 99).unwrap();
        assert_eq!(a, b);
        let d = mc_moment(4, c(0.5, 0.0), c(1.0, 0.5), 5000, 100).unwrap();
        assert_ne!(a.mean, d.mean);
    }

    #[test]
    fn median_of_means_is_robust() {
        let mut v = vec![c(1.0, 0.0); 3200];
        v[0] = c(1e6, 0.0);
        let s = summarize(&v, v.len(), 0, 0);
        assert!(s.kurtosis > HEAVY_TAIL_KURTOSIS);
        assert_eq!(s.median_of_means, Some(c(1.0, 0.0)));
    }

    #[test]
    fn clt_variance_is_positive() {
        let s = clt_statistic(50, c(0.5, 0.0), 1000, 5).unwrap();
        assert!(s.variance.is_finite() && s.variance > 0.0 && s.mean.is_finite());
    }
}
