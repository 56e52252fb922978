//! Feature vectors and the distance kernels shared by every other module.

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// A point in d-dimensional embedding space, stored in f64.
///
/// Construction guarantees a non-empty, all-finite component list.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Empty("feature vector has no components"));
        }
        if let Some(i) = components.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(components))
    }

    /// Widens f32 components, as read from disk.
    pub fn from_f32(components: &[f32]) -> Result<Self> {
        Self::new(components.iter().map(|&c| c as f64).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Point on the segment from `self` (t = 0) to `other` (t = 1).
    pub fn lerp(&self, other: &FeatureVector, t: f64) -> FeatureVector {
        FeatureVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect(),
        )
    }

    /// Lexicographic total order on coordinates.
    pub fn canonical_cmp(&self, other: &FeatureVector) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl Deref for FeatureVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Euclidean distance without the dimension check, for hot loops over
/// data already validated at construction.
#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn l2_distance(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(dist(a, b))
}

pub fn normalize(v: &FeatureVector) -> Result<FeatureVector> {
    let n = v.norm();
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(FeatureVector(v.0.iter().map(|c| c / n).collect()))
}

/// Componentwise arithmetic mean.
pub fn mean_vector<V: AsRef<[f64]>>(vs: &[V]) -> Result<FeatureVector> {
    let first = vs.first().ok_or(Error::Empty("mean of no vectors"))?;
    let dim = first.as_ref().len();
    // Running mean: exact when every input is the same vector.
    let mut acc = vec![0.0; dim];
    for (i, v) in vs.iter().enumerate() {
        let v = v.as_ref();
        check_dims(dim, v.len())?;
        let w = (i + 1) as f64;
        for (a, x) in acc.iter_mut().zip(v) {
            *a += (x - *a) / w;
        }
    }
    FeatureVector::new(acc)
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Opaque, non-empty identity label. Ordering is byte-lexicographic and is
/// the canonical tie-break order everywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IdentityId(String);

impl IdentityId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidParameter("identity id must be non-empty".into()));
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
