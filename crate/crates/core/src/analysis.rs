//! Diagonal/off-diagonal decomposition, tail-bound calculators and pairwise
//! distortion reports.
//!
//! For a circulant transform the unnormalized squared norm splits as
//!
//! ```text
//! ‖M D_κ x‖² = Σ_j (Σ_i a_i κ_{i+j} x_{i+j})² = I + II
//! I  = Σ_i a_i² · Σ_{j<k} x²_{i+j}
//! II = Σ_{j<k} Σ_{i≠i'} a_i a_{i'} κ_{i+j} κ_{i'+j} x_{i+j} x_{i'+j}
//! ```
//!
//! with indices taken mod `d`. `I` is a weighted sum of squared coefficients
//! (weights `α_i = Σ_{j<k} x²_{i+j}`, `‖α‖₁ = k‖x‖²`), which is where the
//! Laurent–Massart thresholds apply; `II` is a centered chaos whose tail is
//! only bounded up to an unspecified constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::transform::{embed_raw_norm_sq, MatrixStructure, SampledTransform};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Diagonal term `I`.
    pub diagonal: f64,
    /// Off-diagonal term `II`.
    pub off_diagonal: f64,
    /// `‖M D_κ x‖²`, unnormalized.
    pub total: f64,
}

/// Splits `‖M D_κ x‖²` into `I + II`. Circulant transforms only.
pub fn decompose(t: &SampledTransform, x: &[f64]) -> Result<Decomposition> {
    if t.spec().structure() != MatrixStructure::Circulant {
        return Err(Error::NotCirculant);
    }
    Error::check_len(t.spec().d(), x.len())?;
    let diagonal = diagonal_term(t.a(), x, t.spec().k());
    let total = embed_raw_norm_sq(t, x)?;
    Ok(Decomposition {
        diagonal,
        off_diagonal: total - diagonal,
        total,
    })
}

/// `I = Σ_i a_i² · Σ_{j<k} x²_{(i+j) mod d}`, by direct double sum.
pub fn diagonal_term(a: &[f64], x: &[f64], k: usize) -> f64 {
    let d = x.len();
    a.iter()
        .enumerate()
        .map(|(i, ai)| ai * ai * (0..k).map(|j| x[(i + j) % d].powi(2)).sum::<f64>())
        .sum()
}

/// Weights `α_i = Σ_{j<k} x²_{(i+j) mod d}` that turn `I - k‖x‖²` into
/// `Σ α_i (a_i² - 1)`.
pub fn diagonal_weights(x: &[f64], k: usize) -> Vec<f64> {
    let d = x.len();
    (0..d)
        .map(|i| (0..k).map(|j| x[(i + j) % d].powi(2)).sum())
        .collect()
}

/// Weights `α` and level `t` of a Laurent–Massart tail bound for
/// `Z = Σ α_i (a_i² - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBoundParams {
    alpha: Vec<f64>,
    t: f64,
}

impl TailBoundParams {
    pub fn new(alpha: Vec<f64>, t: f64) -> Result<Self> {
        if alpha.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::invalid("t must be positive"));
        }
        Ok(Self { alpha, t })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn l2(&self) -> f64 {
        self.alpha.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn linf(&self) -> f64 {
        self.alpha.iter().fold(0.0, |m: f64, &w| m.max(w))
    }

    /// `exp(-t)`, the bound on either tail probability.
    pub fn probability_bound(&self) -> f64 {
        (-self.t).exp()
    }
}

/// `2‖α‖₂√t + 2‖α‖_∞ t`; `P(Z ≥ ·) ≤ exp(-t)`.
pub fn lm_upper_threshold(p: &TailBoundParams) -> f64 {
    2.0 * p.l2() * p.t.sqrt() + 2.0 * p.linf() * p.t
}

/// `2‖α‖₂√t`; `P(Z ≤ -·) ≤ exp(-t)`.
pub fn lm_lower_threshold(p: &TailBoundParams) -> f64 {
    2.0 * p.l2() * p.t.sqrt()
}

/// Constants of the per-vector failure bounds.
///
/// `c_diag` is the explicit constant of the upper diagonal tail. `c_offdiag`
/// multiplies `(kε²)^{1/3}` in the off-diagonal tail and has no known value;
/// bounds using it hold only up to that unspecified constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub c_diag: f64,
    pub c_offdiag: f64,
}

impl BoundConstants {
    /// `5/2 - √6`, the positive root of `√c + c/2 = 1/4`.
    pub fn default_c_diag() -> f64 {
        2.5 - 6f64.sqrt()
    }

    pub fn new(c_diag: f64, c_offdiag: f64) -> Result<Self> {
        if !(c_diag > 0.0 && c_diag.is_finite() && c_offdiag > 0.0 && c_offdiag.is_finite()) {
            return Err(Error::invalid("bound constants must be positive"));
        }
        Ok(Self { c_diag, c_offdiag })
    }
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            c_diag: Self::default_c_diag(),
            c_offdiag: 1.0,
        }
    }
}

/// `(exp(-ε²k/16), exp(-c_diag ε²k))`: bounds on `P(I ≤ (1-ε/2)k)` and
/// `P(I ≥ (1+ε/2)k)` for a unit vector.
pub fn diag_failure_bounds(k: usize, eps: f64, c: &BoundConstants) -> (f64, f64) {
    let e2k = eps * eps * k as f64;
    ((-e2k / 16.0).exp(), (-c.c_diag * e2k).exp())
}

/// `exp(-c_offdiag (kε²)^{1/3})`.
pub fn offdiag_failure_bound(k: usize, eps: f64, c: &BoundConstants) -> f64 {
    (-c.c_offdiag * (k as f64 * eps * eps).cbrt()).exp()
}

/// Per-vector two-sided failure bound: both diagonal tails plus the
/// off-diagonal tail once per side.
pub fn per_vector_failure_bound(k: usize, eps: f64, c: &BoundConstants) -> f64 {
    let (lo, hi) = diag_failure_bounds(k, eps, c);
    lo + hi + 2.0 * offdiag_failure_bound(k, eps, c)
}

/// `C(n, 2)` times the per-vector bound, capped at 1.
pub fn pairwise_union_bound(n: usize, k: usize, eps: f64, c: &BoundConstants) -> f64 {
    let pairs = n as f64 * n.saturating_sub(1) as f64 / 2.0;
    (pairs * per_vector_failure_bound(k, eps, c)).min(1.0)
}

/// Squared-distance ratios of all pairs of a point set before and after
/// embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub eps: f64,
    pub n: usize,
    /// `‖f(x_i) - f(x_j)‖² / ‖x_i - x_j‖²` for `i < j` in lexicographic
    /// order, skipping degenerate pairs.
    pub ratios: Vec<f64>,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub success: bool,
    /// Pairs with `x_i = x_j`.
    pub degenerate_pairs: Vec<(usize, usize)>,
}

/// JSON form of a [`DistortionReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionRecord {
    pub eps: f64,
    pub n: usize,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub success: bool,
    pub num_degenerate: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,
}

impl DistortionReport {
    /// Ratios are included when there are at most this many pairs.
    pub const MAX_LISTED_PAIRS: usize = 100;

    pub fn to_record(&self) -> DistortionRecord {
        let pairs = self.ratios.len() + self.degenerate_pairs.len();
        DistortionRecord {
            eps: self.eps,
            n: self.n,
            min_ratio: self.min_ratio,
            max_ratio: self.max_ratio,
            success: self.success,
            num_degenerate: self.degenerate_pairs.len(),
            ratios: (pairs <= Self::MAX_LISTED_PAIRS).then(|| self.ratios.clone()),
        }
    }
}

/// Compares every pairwise squared distance against the closed band
/// `[1 - eps, 1 + eps]`.
pub fn distortion_report(
    original: &PointSet,
    embedded: &PointSet,
    eps: f64,
) -> Result<DistortionReport> {
    Error::check_len(original.n(), embedded.n())?;
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps must be a nonnegative number"));
    }
    let n = original.n();
    let mut ratios = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    let mut degenerate_pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let before = dist_sq(original.row(i), original.row(j));
            if before == 0.0 {
                degenerate_pairs.push((i, j));
                continue;
            }
            ratios.push(dist_sq(embedded.row(i), embedded.row(j)) / before);
        }
    }
    let min_ratio = ratios.iter().copied().reduce(f64::min);
    let max_ratio = ratios.iter().copied().reduce(f64::max);
    let success = ratios.iter().all(|&r| 1.0 - eps <= r && r <= 1.0 + eps);
    Ok(DistortionReport {
        eps,
        n,
        ratios,
        min_ratio,
        max_ratio,
        success,
        degenerate_pairs,
    })
}

fn dist_sq(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;
    use crate::transform::{CoefficientDistribution, TransformSpec};

    fn circulant(d: usize, k: usize, seed: u64) -> SampledTransform {
        SampledTransform::sample(
            TransformSpec::new(
                d,
                k,
                CoefficientDistribution::Gaussian,
                MatrixStructure::Circulant,
                seed,
            )
            .unwrap(),
        )
    }

    /// `II` by its defining double sum over `i ≠ i'`.
    fn off_diagonal_direct(t: &SampledTransform, x: &[f64]) -> f64 {
        let (a, s, d) = (t.a(), t.kappa(), x.len());
        let mut acc = 0.0;
        for j in 0..t.spec().k() {
            for i in 0..d {
                for ip in 0..d {
                    if i != ip {
                        let (u, v) = ((i + j) % d, (ip + j) % d);
                        acc += a[i] * a[ip] * s[u] * s[v] * x[u] * x[v];
                    }
                }
            }
        }
        acc
    }

    #[test]
    fn full_period_diagonal() {
        let t = circulant(9, 9, 1);
        let x = SeedStream::new(2).gaussian_vec(9);
        let dec = decompose(&t, &x).unwrap();
        let a2: f64 = t.a().iter().map(|v| v * v).sum();
        let x2: f64 = x.iter().map(|v| v * v).sum();
        assert!((dec.diagonal - a2 * x2).abs() <= 1e-12 * dec.diagonal);
    }

    #[test]
    fn single_row_unit_vector() {
        let t = circulant(6, 1, 3);
        let mut x = vec![0.0; 6];
        x[0] = 1.0;
        let dec = decompose(&t, &x).unwrap();
        assert_eq!(dec.diagonal, t.a()[0] * t.a()[0]);
        assert!(dec.off_diagonal.abs() < 1e-15);
    }

    #[test]
    fn decomposition_matches_direct_off_diagonal() {
        let t = circulant(8, 3, 4);
        let x = SeedStream::new(5).gaussian_vec(8);
        let dec = decompose(&t, &x).unwrap();
        let direct = dec.diagonal + off_diagonal_direct(&t, &x);
        assert!((direct - dec.total).abs() <= 1e-9 * dec.total.abs());
    }

    #[test]
    fn diagonal_ignores_signs() {
        let t = circulant(10, 4, 6);
        let x = SeedStream::new(7).gaussian_vec(10);
        let a = decompose(&t, &x).unwrap().diagonal;
        let b = decompose(&t.clone().without_sign_flip(), &x)
            .unwrap()
            .diagonal;
        assert_eq!(a, b);
    }

    #[test]
    fn diagonal_weights_sum_to_k() {
        let x = SeedStream::new(8).unit_sphere(12);
        let w = diagonal_weights(&x, 5);
        assert!((w.iter().sum::<f64>() - 5.0).abs() < 1e-12);
        assert!(w.iter().all(|&v| v <= 1.0 + 1e-15));
    }

    #[test]
    fn toeplitz_rejected() {
        let t = SampledTransform::sample(
            TransformSpec::new(
                4,
                2,
                CoefficientDistribution::Gaussian,
                MatrixStructure::Toeplitz,
                0,
            )
            .unwrap(),
        );
        assert_eq!(decompose(&t, &[1.0; 4]).unwrap_err(), Error::NotCirculant);
        assert!(decompose(&circulant(4, 2, 0), &[1.0; 3]).is_err());
    }

    #[test]
    fn lm_threshold_examples() {
        let p = TailBoundParams::new(vec![1.0; 100], 1.0).unwrap();
        assert_eq!(lm_upper_threshold(&p), 22.0);
        assert_eq!(lm_lower_threshold(&p), 20.0);
        let p = TailBoundParams::new(vec![1.0], 4.0).unwrap();
        assert_eq!(lm_upper_threshold(&p), 12.0);
        assert!((p.probability_bound() - (-4f64).exp()).abs() < 1e-18);

        let alpha = vec![0.3, 1.7, 0.0, 2.2];
        let p1 = TailBoundParams::new(alpha.clone(), 2.5).unwrap();
        let p2 = TailBoundParams::new(alpha.iter().map(|w| 2.0 * w).collect(), 2.5).unwrap();
        assert_eq!(lm_upper_threshold(&p2), 2.0 * lm_upper_threshold(&p1));
        assert_eq!(lm_lower_threshold(&p2), 2.0 * lm_lower_threshold(&p1));

        assert!(TailBoundParams::new(vec![-1.0], 1.0).is_err());
        assert!(TailBoundParams::new(vec![1.0], 0.0).is_err());
    }

    #[test]
    fn diag_constant_value() {
        let c = BoundConstants::default().c_diag;
        assert!((c - 0.050_510_257).abs() < 1e-9);
        assert!(c > 1.0 / 20.0);
        // √c + c/2 = 1/4
        assert!((c.sqrt() + c / 2.0 - 0.25).abs() < 1e-15);
        assert!(BoundConstants::new(0.0, 1.0).is_err());
    }

    #[test]
    fn diag_bound_values_and_monotonicity() {
        let c = BoundConstants::default();
        let (lo, _) = diag_failure_bounds(64, 0.5, &c);
        assert!((lo - (-1f64).exp()).abs() < 1e-15);
        let mut prev = diag_failure_bounds(1, 0.3, &c);
        for k in 2..200 {
            let cur = diag_failure_bounds(k, 0.3, &c);
            assert!(cur.0 < prev.0 && cur.1 < prev.1);
            prev = cur;
        }
    }

    #[test]
    fn offdiag_bound_values() {
        let c = BoundConstants::default();
        let b = offdiag_failure_bound(1000, 0.5, &c);
        assert!((b - (-250f64.cbrt()).exp()).abs() < 1e-15);
        assert!((b - 1.837e-3).abs() < 1e-6);
        assert!(offdiag_failure_bound(2000, 0.5, &c) < b);
        // depends on k·eps² only
        let same = offdiag_failure_bound(4000, 0.25, &c);
        assert!((same - b).abs() < 1e-15);
    }

    #[test]
    fn union_bound_properties() {
        let c = BoundConstants::default();
        let one_pair = pairwise_union_bound(2, 5000, 0.4, &c);
        assert_eq!(one_pair, per_vector_failure_bound(5000, 0.4, &c));
        assert_eq!(pairwise_union_bound(1000, 10, 0.4, &c), 1.0);
        let mut prev = 0.0;
        for n in 2..50 {
            let b = pairwise_union_bound(n, 1 << 20, 0.45, &c);
            assert!(b > prev && b <= 1.0);
            prev = b;
        }
        assert!(
            pairwise_union_bound(10, 1 << 21, 0.45, &c)
                < pairwise_union_bound(10, 1 << 20, 0.45, &c)
        );
    }

    #[test]
    fn distortion_identity() {
        let x = PointSet::from_rows(
            (0..5)
                .map(|i| vec![i as f64, 1.0, -(i as f64) * 0.5])
                .collect(),
        )
        .unwrap();
        let r = distortion_report(&x, &x, 1e-6).unwrap();
        assert!(r.success);
        assert!(r.ratios.iter().all(|&v| v == 1.0));
        assert_eq!(r.ratios.len(), 10);
    }

    #[test]
    fn distortion_closed_boundary() {
        let x = PointSet::from_rows(vec![vec![0.0], vec![1.0]]).unwrap();
        let y = PointSet::from_rows(vec![vec![0.0], vec![1.25]]).unwrap();
        // ratio is exactly 1.5625 = 1 + eps
        let r = distortion_report(&x, &y, 0.5625).unwrap();
        assert_eq!(r.max_ratio, Some(1.5625));
        assert!(r.success);
        assert!(!distortion_report(&x, &y, 0.5).unwrap().success);
    }

    #[test]
    fn distortion_degenerate_pairs() {
        let x = PointSet::from_rows(vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let y = PointSet::from_rows(vec![vec![3.0], vec![3.0], vec![0.0]]).unwrap();
        let r = distortion_report(&x, &y, 0.1).unwrap();
        assert_eq!(r.degenerate_pairs, vec![(0, 1)]);
        assert_eq!(r.ratios.len(), 2);
        assert_eq!(r.min_ratio, Some(9.0 / 5.0));
        let rec = serde_json::to_value(r.to_record()).unwrap();
        assert_eq!(rec["num_degenerate"], 1);
        assert_eq!(rec["ratios"].as_array().unwrap().len(), 2);
        assert!(
            distortion_report(&x, &PointSet::from_rows(vec![vec![0.0]]).unwrap(), 0.1).is_err()
        );
    }

    #[test]
    fn distortion_single_point() {
        let x = PointSet::from_rows(vec![vec![1.0, 2.0]]).unwrap();
        let r = distortion_report(&x, &x, 0.1).unwrap();
        assert!(r.success && r.min_ratio.is_none());
    }

    #[test]
    fn record_omits_large_ratio_lists() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let x = PointSet::from_rows(rows).unwrap();
        let rec = distortion_report(&x, &x, 0.1).unwrap().to_record();
        assert!(rec.ratios.is_none());
    }
}
