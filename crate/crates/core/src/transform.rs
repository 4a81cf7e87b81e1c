//! Transform description, reproducible sampling and the direct evaluation path.
//!
//! A transform maps `x ∈ R^d` to `f(x) = M · (κ ⊙ x) / √k`, where `κ` is a
//! random sign vector and `M` is a `k × d` partial circulant or Toeplitz matrix
//! generated by a random coefficient vector `a`:
//!
//! * circulant: row `j` is `a` cyclically shifted right by `j`, so
//!   `M[j][i] = a[(i - j) mod d]`;
//! * Toeplitz: `M[j][i] = a[i - j + k - 1]` with `a` of length `d + k - 1`;
//!   row 0 is the window `a[k-1 .. k+d-2]`.
//!
//! The functions here evaluate `f` by direct summation and are the reference
//! against which the FFT path in [`crate::fastconv`] is checked.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{SeedStream, GAUSSIAN_METHOD, RNG_ID};

/// Law of the coefficient vector `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientDistribution {
    /// Uniform on {-1, +1}.
    Rademacher,
    /// Standard normal.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixStructure {
    Circulant,
    Toeplitz,
}

impl fmt::Display for CoefficientDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rademacher => "rademacher",
            Self::Gaussian => "gaussian",
        })
    }
}

impl FromStr for CoefficientDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rademacher" | "bernoulli" => Ok(Self::Rademacher),
            "gaussian" | "normal" => Ok(Self::Gaussian),
            other => Err(Error::invalid(format!("unknown distribution `{other}`"))),
        }
    }
}

impl fmt::Display for MatrixStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Circulant => "circulant",
            Self::Toeplitz => "toeplitz",
        })
    }
}

impl FromStr for MatrixStructure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circulant" => Ok(Self::Circulant),
            "toeplitz" => Ok(Self::Toeplitz),
            other => Err(Error::invalid(format!("unknown structure `{other}`"))),
        }
    }
}

/// Immutable description of a transform. Two equal specs always sample the
/// same [`SampledTransform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransformSpec {
    d: usize,
    k: usize,
    distribution: CoefficientDistribution,
    structure: MatrixStructure,
    seed: u64,
}

impl TransformSpec {
    /// Validates `1 <= k <= d`.
    pub fn new(
        d: usize,
        k: usize,
        distribution: CoefficientDistribution,
        structure: MatrixStructure,
        seed: u64,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("ambient dimension d must be at least 1"));
        }
        if k == 0 {
            return Err(Error::invalid("target dimension k must be at least 1"));
        }
        if k > d {
            return Err(Error::invalid(format!(
                "target dimension k = {k} exceeds ambient dimension d = {d}"
            )));
        }
        Ok(Self {
            d,
            k,
            distribution,
            structure,
            seed,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn distribution(&self) -> CoefficientDistribution {
        self.distribution
    }

    pub fn structure(&self) -> MatrixStructure {
        self.structure
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same spec with a different seed.
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// Length of the coefficient vector: `d` (circulant) or `d + k - 1` (Toeplitz).
    pub fn coefficient_len(&self) -> usize {
        match self.structure {
            MatrixStructure::Circulant => self.d,
            MatrixStructure::Toeplitz => self.d + self.k - 1,
        }
    }
}

/// A realized transform: coefficients `a` and signs `κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTransform {
    spec: TransformSpec,
    a: Vec<f64>,
    kappa: Vec<f64>,
}

impl SampledTransform {
    /// Draws `κ_0 .. κ_{d-1}` and then `a` in index order from the stream
    /// seeded by `spec.seed()`.
    pub fn sample(spec: TransformSpec) -> Self {
        let mut stream = SeedStream::new(spec.seed);
        let kappa: Vec<f64> = (0..spec.d).map(|_| stream.sign()).collect();
        let len = spec.coefficient_len();
        let a = match spec.distribution {
            CoefficientDistribution::Rademacher => (0..len).map(|_| stream.sign()).collect(),
            CoefficientDistribution::Gaussian => stream.gaussian_vec(len),
        };
        Self { spec, a, kappa }
    }

    /// Assembles a transform from explicit vectors, checking their lengths and
    /// that every sign is exactly ±1.
    pub fn from_parts(spec: TransformSpec, a: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        Error::check_len(spec.coefficient_len(), a.len())?;
        Error::check_len(spec.d, kappa.len())?;
        if let Some(bad) = kappa.iter().find(|&&s| s != 1.0 && s != -1.0) {
            return Err(Error::invalid(format!("sign entry {bad} is not ±1")));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        Ok(Self { spec, a, kappa })
    }

    pub fn spec(&self) -> &TransformSpec {
        &self.spec
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    /// The same coefficients with every sign set to `+1`, i.e. `D_κ = I`.
    pub fn without_sign_flip(mut self) -> Self {
        self.kappa.iter_mut().for_each(|s| *s = 1.0);
        self
    }

    /// The same coefficients with every sign negated.
    pub fn negated_signs(mut self) -> Self {
        self.kappa.iter_mut().for_each(|s| *s = -*s);
        self
    }

    /// Entry `(j, i)` of the unnormalized matrix.
    #[inline]
    pub fn entry(&self, j: usize, i: usize) -> f64 {
        let (d, k) = (self.spec.d, self.spec.k);
        match self.spec.structure {
            MatrixStructure::Circulant => self.a[(i + d - j % d) % d],
            MatrixStructure::Toeplitz => self.a[i + k - 1 - j],
        }
    }

    /// `κ ⊙ x`.
    pub fn precondition(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_len(self.spec.d, x.len())?;
        Ok(x.iter().zip(&self.kappa).map(|(v, s)| v * s).collect())
    }

    /// Serializable form; explicit vectors are included when `with_arrays`.
    pub fn to_record(&self, with_arrays: bool) -> TransformRecord {
        TransformRecord {
            version: TransformRecord::VERSION,
            d: self.spec.d,
            k: self.spec.k,
            distribution: self.spec.distribution,
            structure: self.spec.structure,
            seed: self.spec.seed,
            rng_id: RNG_ID.to_string(),
            gaussian_method: GAUSSIAN_METHOD.to_string(),
            a: with_arrays.then(|| self.a.clone()),
            kappa: with_arrays.then(|| self.kappa.iter().map(|&s| s as i8).collect()),
        }
    }

    pub fn from_record(record: &TransformRecord) -> Result<Self> {
        if record.version != TransformRecord::VERSION {
            return Err(Error::Serialization(format!(
                "unsupported transform version {}",
                record.version
            )));
        }
        let spec = TransformSpec::new(
            record.d,
            record.k,
            record.distribution,
            record.structure,
            record.seed,
        )?;
        match (&record.a, &record.kappa) {
            (Some(a), Some(kappa)) => Self::from_parts(
                spec,
                a.clone(),
                kappa.iter().map(|&s| f64::from(s)).collect(),
            ),
            (None, None) => {
                if record.rng_id != RNG_ID || record.gaussian_method != GAUSSIAN_METHOD {
                    return Err(Error::Serialization(format!(
                        "cannot resample: generator `{}` / `{}` is not supported",
                        record.rng_id, record.gaussian_method
                    )));
                }
                Ok(Self::sample(spec))
            }
            _ => Err(Error::Serialization(
                "`a` and `kappa` must be given together".into(),
            )),
        }
    }
}

/// JSON form of a transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub version: u32,
    pub d: usize,
    pub k: usize,
    pub distribution: CoefficientDistribution,
    pub structure: MatrixStructure,
    pub seed: u64,
    pub rng_id: String,
    pub gaussian_method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<i8>>,
}

impl TransformRecord {
    pub const VERSION: u32 = 1;
}

/// `S^j v`, where `S(x_0, .., x_{d-1}) = (x_{d-1}, x_0, .., x_{d-2})`.
pub fn shift(v: &[f64], j: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    if !out.is_empty() {
        out.rotate_right(j % v.len());
    }
    out
}

/// The unnormalized `k × d` matrix, one `Vec` per row. Test-scale only.
pub fn materialize_matrix(t: &SampledTransform) -> Vec<Vec<f64>> {
    let (d, k) = (t.spec.d, t.spec.k);
    (0..k)
        .map(|j| (0..d).map(|i| t.entry(j, i)).collect())
        .collect()
}

/// `M · (κ ⊙ x)` by direct summation, without the `1/√k` factor.
pub fn embed_raw(t: &SampledTransform, x: &[f64]) -> Result<Vec<f64>> {
    let z = t.precondition(x)?;
    let (d, k) = (t.spec.d, t.spec.k);
    let a = &t.a;
    let out = (0..k)
        .map(|j| match t.spec.structure {
            // row j = (a[d-j], .., a[d-1], a[0], .., a[d-j-1])
            MatrixStructure::Circulant => {
                let (head, tail) = z.split_at(j);
                dot(&a[d - j..], head) + dot(&a[..d - j], tail)
            }
            MatrixStructure::Toeplitz => dot(&a[k - 1 - j..k - 1 - j + d], &z),
        })
        .collect();
    Ok(out)
}

/// `f(x) = M · (κ ⊙ x) / √k` by direct summation.
pub fn embed_naive(t: &SampledTransform, x: &[f64]) -> Result<Vec<f64>> {
    let scale = 1.0 / (t.spec.k as f64).sqrt();
    let mut y = embed_raw(t, x)?;
    y.iter_mut().for_each(|v| *v *= scale);
    Ok(y)
}

/// `‖M · (κ ⊙ x)‖²`, the unnormalized squared norm (`k · ‖f(x)‖²`).
pub fn embed_raw_norm_sq(t: &SampledTransform, x: &[f64]) -> Result<f64> {
    Ok(embed_raw(t, x)?.iter().map(|v| v * v).sum())
}

/// `ceil(c · eps⁻² · (ln n)³)`, at least 1.
pub fn target_dimension(n: usize, eps: f64, c: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::invalid("need at least two points"));
    }
    check_eps(eps)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("constant C must be positive"));
    }
    let ln_n = (n as f64).ln();
    let k = (c * ln_n.powi(3) / (eps * eps)).ceil();
    Ok((k as usize).max(1))
}

/// Distortion parameter must lie in (0, 1/2]. The endpoint 1/2 is admitted
/// so that the customary `eps = 0.5` experiments can be run.
pub fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 0.5 {
        Ok(())
    } else {
        Err(Error::invalid(format!("eps = {eps} must lie in (0, 1/2]")))
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
