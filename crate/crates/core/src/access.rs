//! Success/failure access probabilities over a key set.

use crate::error::{Error, Result};

/// Normalization tolerance for `Σp + Σq = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// `p[i]` is the probability of querying key `i`; `q[j]` the probability of
/// an absent query falling below key 0 (`j = 0`), between keys `j-1` and `j`,
/// or above the last key (`j = n`).
#[derive(Debug, Clone, PartialEq)]
pub struct AccessDistribution {
    p: Vec<f64>,
    q: Vec<f64>,
}

impl AccessDistribution {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() + 1 {
            return Err(Error::InvalidDistribution(format!(
                "expected {} failure probabilities, got {}",
                p.len() + 1,
                q.len()
            )));
        }
        if let Some(bad) = p.iter().chain(&q).find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("entry {bad} is not a nonnegative number")));
        }
        let total: f64 = p.iter().chain(&q).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(AccessDistribution { p, q })
    }

    /// Normalizes arbitrary nonnegative weights into a distribution.
    pub fn from_weights(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        let total: f64 = p.iter().chain(&q).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        let scale = |v: Vec<f64>| v.into_iter().map(|x| x / total).collect::<Vec<_>>();
        let (p, q) = (scale(p), scale(q));
        // renormalize once more so the rounding residue is below tolerance
        let total: f64 = p.iter().chain(&q).sum();
        Self::new(p.into_iter().map(|x| x / total).collect(), q.into_iter().map(|x| x / total).collect())
    }

    /// All mass on successful searches, spread evenly.
    pub fn uniform_hits(n: usize) -> Result<Self> {
        Self::from_weights(vec![1.0; n], vec![0.0; n + 1])
    }

    /// Every one of the `2n + 1` outcomes equally likely.
    pub fn uniform_all(n: usize) -> Result<Self> {
        Self::from_weights(vec![1.0; n], vec![1.0; n + 1])
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_bits(self.p.iter().chain(&self.q).copied())
    }
}

/// `-Σ x log2 x` over the positive entries; zeros contribute nothing.
pub fn entropy_bits(masses: impl IntoIterator<Item = f64>) -> f64 {
    let h: f64 = masses.into_iter().filter(|&x| x > 0.0).map(|x| -x * x.log2()).sum();
    h.max(0.0)
}

/// Entropy of a sub-distribution after normalizing it to unit mass.
pub fn normalized_entropy(p: &[f64], q: &[f64]) -> f64 {
    let w: f64 = p.iter().chain(q).sum();
    if w <= 0.0 {
        return 0.0;
    }
    entropy_bits(p.iter().chain(q).map(|x| x / w))
}
