//! Seeded synthetic galleries: identity clusters on the unit hypersphere
//! with mislabeled and noise outliers mixed into the enrolled vectors.
//!
//! The random source is ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`,
//! with Gaussian draws from `rand_distr::StandardNormal`; both are portable,
//! so fixtures reproduce across platforms. Draw order:
//!
//! 1. one center per gallery identity, then one per non-mate identity;
//! 2. per gallery identity (in index order): the vector count, then per
//!    vector a uniform kind draw followed by the vector itself;
//! 3. mate probes per gallery identity, then non-mate probes per non-mate identity.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gallery::{Gallery, ProbeSet};
use crate::vector::{normalize, FeatureVector, IdentityId};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub num_identities: usize,
    pub dim: usize,
    /// Inclusive range of enrolled vectors per identity.
    pub vectors_per_identity: (usize, usize),
    /// Std-dev of the isotropic perturbation added to a center before renormalizing.
    pub cluster_spread: f64,
    pub mislabel_rate: f64,
    pub noise_rate: f64,
    /// Probes per gallery identity; also used for every non-mate identity.
    pub mates_per_identity: usize,
    pub num_nonmate_identities: usize,
    pub seed: u64,
}

/// Spread calibrated so that same-identity distances in d = 64 sit around
/// 0.5-0.6 while unrelated unit vectors sit near sqrt(2).
pub const DEFAULT_CLUSTER_SPREAD: f64 = 0.06;

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            num_identities: 100,
            dim: 64,
            vectors_per_identity: (40, 40),
            cluster_spread: DEFAULT_CLUSTER_SPREAD,
            mislabel_rate: 0.05,
            noise_rate: 0.05,
            mates_per_identity: 10,
            num_nonmate_identities: 25,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.num_identities < 2 {
            return bad("num_identities must be at least 2");
        }
        if self.dim < 2 {
            return bad("dim must be at least 2");
        }
        let (lo, hi) = self.vectors_per_identity;
        if lo == 0 || lo > hi {
            return bad("vectors_per_identity must be a non-empty range of positive counts");
        }
        if !(self.cluster_spread > 0.0 && self.cluster_spread.is_finite()) {
            return bad("cluster_spread must be > 0");
        }
        if !(0.0..1.0).contains(&self.mislabel_rate) || !(0.0..1.0).contains(&self.noise_rate) {
            return bad("outlier rates must lie in [0, 1)");
        }
        if self.mislabel_rate + self.noise_rate >= 1.0 {
            return bad("mislabel_rate + noise_rate must be < 1");
        }
        if self.num_nonmate_identities == 0 {
            return bad("num_nonmate_identities must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Inlier,
    /// Drawn from another identity's cluster but labeled as this one.
    Mislabeled,
    /// Uniform random unit vector.
    Noise,
}

impl EntryKind {
    pub fn is_outlier(self) -> bool {
        self != EntryKind::Inlier
    }
}

/// Kind of every enrolled vector, aligned with the gallery's vector order.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub kinds: BTreeMap<IdentityId, Vec<EntryKind>>,
}

impl GroundTruth {
    pub fn num_outliers(&self) -> usize {
        self.kinds.values().flatten().filter(|k| k.is_outlier()).count()
    }

    pub fn num_entries(&self) -> usize {
        self.kinds.values().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub gallery: Gallery,
    pub probes: ProbeSet,
    pub truth: GroundTruth,
}

pub fn identity_name(i: usize) -> String {
    format!("id{i:05}")
}

pub fn nonmate_name(i: usize) -> String {
    format!("nm{i:05}")
}

struct Sampler {
    rng: ChaCha8Rng,
    dim: usize,
    spread: f64,
}

impl Sampler {
    fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn unit(&mut self) -> FeatureVector {
        loop {
            let v: Vec<f64> = (0..self.dim).map(|_| self.gaussian()).collect();
            if let Ok(u) = FeatureVector::new(v).and_then(|v| normalize(&v)) {
                return u;
            }
        }
    }

    fn member(&mut self, center: &FeatureVector) -> FeatureVector {
        loop {
            let v: Vec<f64> = center.iter().map(|c| c + self.spread * self.gaussian()).collect();
            if let Ok(u) = FeatureVector::new(v).and_then(|v| normalize(&v)) {
                return u;
            }
        }
    }
}

pub fn generate(config: &SynthConfig) -> Result<SynthDataset> {
    config.validate()?;
    let mut s = Sampler {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        dim: config.dim,
        spread: config.cluster_spread,
    };

    let centers: Vec<FeatureVector> = (0..config.num_identities).map(|_| s.unit()).collect();
    let nonmate_centers: Vec<FeatureVector> =
        (0..config.num_nonmate_identities).map(|_| s.unit()).collect();

    let mut entries = BTreeMap::new();
    let mut kinds = BTreeMap::new();
    let (lo, hi) = config.vectors_per_identity;
    for (i, center) in centers.iter().enumerate() {
        let n = s.rng.random_range(lo..=hi);
        let mut vs = Vec::with_capacity(n);
        let mut ks = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = s.rng.random();
            if u < config.mislabel_rate {
                // Uniform over the other identities.
                let mut other = s.rng.random_range(0..config.num_identities - 1);
                if other >= i {
                    other += 1;
                }
                vs.push(s.member(&centers[other]));
                ks.push(EntryKind::Mislabeled);
            } else if u < config.mislabel_rate + config.noise_rate {
                vs.push(s.unit());
                ks.push(EntryKind::Noise);
            } else {
                vs.push(s.member(center));
                ks.push(EntryKind::Inlier);
            }
        }
        let id = IdentityId::new(identity_name(i))?;
        entries.insert(id.clone(), vs);
        kinds.insert(id, ks);
    }

    let mut mates = Vec::new();
    for (i, center) in centers.iter().enumerate() {
        let id = IdentityId::new(identity_name(i))?;
        for _ in 0..config.mates_per_identity {
            mates.push((id.clone(), s.member(center)));
        }
    }
    let mut nonmates = Vec::new();
    for center in &nonmate_centers {
        for _ in 0..config.mates_per_identity {
            nonmates.push(s.member(center));
        }
    }

    Ok(SynthDataset {
        gallery: Gallery::new(entries)?,
        probes: ProbeSet::new(mates, nonmates, config.dim)?,
        truth: GroundTruth { kinds },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryScore {
    /// Removed outliers over all outliers (1.0 when there are none).
    pub outlier_removal_rate: f64,
    /// Retained inliers over all inliers (1.0 when there are none).
    pub inlier_retention_rate: f64,
}

/// Scores pruning against the ground truth. `retained` holds the kept
/// indices per identity; identities missing from it count as fully removed.
pub fn outlier_recovery_score(retained: &BTreeMap<IdentityId, Vec<usize>>, truth: &GroundTruth) -> RecoveryScore {
    let (mut outliers, mut removed_outliers, mut inliers, mut kept_inliers) = (0usize, 0usize, 0usize, 0usize);
    for (id, ks) in &truth.kinds {
        let kept = retained.get(id).map(Vec::as_slice).unwrap_or(&[]);
        for (i, k) in ks.iter().enumerate() {
            let is_kept = kept.contains(&i);
            if k.is_outlier() {
                outliers += 1;
                removed_outliers += usize::from(!is_kept);
            } else {
                inliers += 1;
                kept_inliers += usize::from(is_kept);
            }
        }
    }
    let rate = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    RecoveryScore {
        outlier_removal_rate: rate(removed_outliers, outliers),
        inlier_retention_rate: rate(kept_inliers, inliers),
    }
}
