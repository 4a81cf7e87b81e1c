//! FFT evaluation path.
//!
//! Both matrix structures reduce to one circular correlation
//! `c_j = Σ_i u_i · v_{(i+j) mod m}`, evaluated as `idft(conj(dft(u)) ⊙ dft(v))`:
//!
//! * circulant: `u = a`, `v = κ ⊙ x`, `m = d`, output `y_j = c_j`;
//! * Toeplitz: `u = κ ⊙ x` and `v = a`, both zero-padded to `m ≥ d + k - 1`,
//!   output `y_j = c_{k-1-j}`. No index wraps because `u` vanishes past `d`.
//!
//! The coefficient spectrum is computed once per transform and kept in a
//! [`SpectrumCache`]; each embedded point then costs one real-input FFT of
//! length `m` and its inverse.

use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
pub use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::rng::mix64;
use crate::transform::{MatrixStructure, SampledTransform};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static REAL_PLANNER: RefCell<RealFftPlanner<f64>> = RefCell::new(RealFftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// `X_m = Σ_t v_t · exp(-2πi·mt/N)` for any `N`.
pub fn dft(v: &[Complex64]) -> Vec<Complex64> {
    let mut buf = v.to_vec();
    if !buf.is_empty() {
        plan(buf.len(), false).process(&mut buf);
    }
    buf
}

/// Inverse of [`dft`], including the `1/N` factor.
pub fn idft(v: &[Complex64]) -> Vec<Complex64> {
    let mut buf = v.to_vec();
    if !buf.is_empty() {
        plan(buf.len(), true).process(&mut buf);
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
    }
    buf
}

/// `c_j = ⟨shift(a, j), z⟩ = Σ_i a_i · z_{(i+j) mod d}`.
pub fn circular_correlate(a: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    Error::check_len(a.len(), z.len())?;
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let spectrum = dft(&to_complex(a, a.len()));
    let zs = dft(&to_complex(z, z.len()));
    let prod: Vec<Complex64> = spectrum
        .iter()
        .zip(&zs)
        .map(|(p, q)| p.conj() * q)
        .collect();
    let c = idft(&prod);
    check_residue(&c, norm(a) * norm(z));
    Ok(c.into_iter().map(|c| c.re).collect())
}

/// Forward spectrum of a transform's (padded) coefficient vector, plus the
/// FFT plans for its length.
#[derive(Clone)]
pub struct SpectrumCache {
    structure: MatrixStructure,
    d: usize,
    k: usize,
    fingerprint: u64,
    m: usize,
    spectrum: Vec<Complex64>,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

impl fmt::Debug for SpectrumCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectrumCache")
            .field("structure", &self.structure)
            .field("d", &self.d)
            .field("k", &self.k)
            .field("len", &self.m)
            .finish()
    }
}

impl PartialEq for SpectrumCache {
    fn eq(&self, other: &Self) -> bool {
        self.structure == other.structure
            && self.d == other.d
            && self.k == other.k
            && self.fingerprint == other.fingerprint
            && self.spectrum == other.spectrum
    }
}

impl SpectrumCache {
    pub fn new(t: &SampledTransform) -> Self {
        let spec = t.spec();
        let m = padded_len(spec.structure(), spec.d(), spec.k());
        let (forward, inverse) = REAL_PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(m), p.plan_fft_inverse(m))
        });
        let mut padded = vec![0.0; m];
        padded[..t.a().len()].copy_from_slice(t.a());
        let mut spectrum = forward.make_output_vec();
        forward
            .process(&mut padded, &mut spectrum)
            .expect("buffer lengths come from the plan");
        Self {
            structure: spec.structure(),
            d: spec.d(),
            k: spec.k(),
            fingerprint: fingerprint(t.a()),
            m,
            spectrum,
            forward,
            inverse,
        }
    }

    /// DFT size `m`.
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Bins `0..=m/2` of the coefficient DFT; the rest follow by conjugate
    /// symmetry.
    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    fn matches(&self, t: &SampledTransform) -> bool {
        let spec = t.spec();
        self.structure == spec.structure()
            && self.d == spec.d()
            && self.k == spec.k()
            && self.fingerprint == fingerprint(t.a())
    }
}

/// DFT size used for a transform: `d` for circulant, otherwise the smallest
/// 5-smooth integer `≥ d + k - 1`.
pub fn padded_len(structure: MatrixStructure, d: usize, k: usize) -> usize {
    match structure {
        MatrixStructure::Circulant => d,
        MatrixStructure::Toeplitz => next_smooth(d + k - 1),
    }
}

fn next_smooth(n: usize) -> usize {
    (n.max(1)..)
        .find(|&m| {
            let mut r = m;
            for p in [2, 3, 5] {
                while r % p == 0 {
                    r /= p;
                }
            }
            r == 1
        })
        .expect("5-smooth numbers are unbounded")
}

/// `f(x)` through the frequency domain.
pub fn embed_fast(t: &SampledTransform, cache: &SpectrumCache, x: &[f64]) -> Result<Vec<f64>> {
    if !cache.matches(t) {
        return Err(Error::CacheMismatch);
    }
    let z = t.precondition(x)?;
    Ok(correlate_cached(cache, &z))
}

fn correlate_cached(cache: &SpectrumCache, z: &[f64]) -> Vec<f64> {
    let m = cache.m;
    let k = cache.k;
    let mut signal = vec![0.0; m];
    signal[..z.len()].copy_from_slice(z);
    let mut bins = cache.forward.make_output_vec();
    let mut scratch = vec![
        Complex64::new(0.0, 0.0);
        cache
            .forward
            .get_scratch_len()
            .max(cache.inverse.get_scratch_len())
    ];
    cache
        .forward
        .process_with_scratch(&mut signal, &mut bins, &mut scratch)
        .expect("buffer lengths come from the plan");
    match cache.structure {
        MatrixStructure::Circulant => bins
            .iter_mut()
            .zip(&cache.spectrum)
            .for_each(|(zc, ac)| *zc *= ac.conj()),
        MatrixStructure::Toeplitz => bins
            .iter_mut()
            .zip(&cache.spectrum)
            .for_each(|(zc, ac)| *zc = zc.conj() * ac),
    }
    bins[0].im = 0.0;
    if m.is_multiple_of(2) {
        bins[m / 2].im = 0.0;
    }
    cache
        .inverse
        .process_with_scratch(&mut bins, &mut signal, &mut scratch)
        .expect("buffer lengths come from the plan");
    // 1/m from the inverse DFT, 1/√k from the embedding
    let scale = 1.0 / (m as f64 * (k as f64).sqrt());
    match cache.structure {
        MatrixStructure::Circulant => signal[..k].iter().map(|c| c * scale).collect(),
        MatrixStructure::Toeplitz => (0..k).map(|j| signal[k - 1 - j] * scale).collect(),
    }
}

/// Embeds every row; rows are processed in parallel and the result equals
/// row-by-row evaluation.
pub fn embed_pointset(
    t: &SampledTransform,
    cache: &SpectrumCache,
    points: &PointSet,
) -> Result<PointSet> {
    if !cache.matches(t) {
        return Err(Error::CacheMismatch);
    }
    Error::check_len(t.spec().d(), points.d())?;
    let rows: Vec<Vec<f64>> = points
        .rows()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|x| {
            let z = t.precondition(x).expect("dimension checked");
            correlate_cached(cache, &z)
        })
        .collect();
    PointSet::new(t.spec().k(), rows.concat())
}

/// A transform bundled with its spectrum.
#[derive(Debug, Clone)]
pub struct FastEmbedder {
    transform: SampledTransform,
    cache: SpectrumCache,
}

impl FastEmbedder {
    pub fn new(transform: SampledTransform) -> Self {
        let cache = SpectrumCache::new(&transform);
        Self { transform, cache }
    }

    pub fn transform(&self) -> &SampledTransform {
        &self.transform
    }

    pub fn cache(&self) -> &SpectrumCache {
        &self.cache
    }

    pub fn embed(&self, x: &[f64]) -> Result<Vec<f64>> {
        embed_fast(&self.transform, &self.cache, x)
    }

    /// `‖f(x)‖²` (normalized).
    pub fn norm_sq(&self, x: &[f64]) -> Result<f64> {
        Ok(self.embed(x)?.iter().map(|v| v * v).sum())
    }

    pub fn embed_points(&self, points: &PointSet) -> Result<PointSet> {
        embed_pointset(&self.transform, &self.cache, points)
    }
}

fn to_complex(v: &[f64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (o, &x) in out.iter_mut().zip(v) {
        o.re = x;
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn fingerprint(a: &[f64]) -> u64 {
    a.iter().fold(a.len() as u64, |h, v| mix64(h ^ v.to_bits()))
}

/// A large imaginary part after the inverse transform means the FFT itself
/// is wrong; this is not recoverable.
fn check_residue(c: &[Complex64], scale: f64) {
    let worst = c.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    assert!(
        worst <= 1e-9 * scale,
        "imaginary residue {worst:e} exceeds 1e-9 · {scale:e}"
    );
}
