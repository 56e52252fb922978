//! Sampling-by-generating: cover an identity's vectors with hyperspheres of
//! a fixed radius and keep only the sphere centers.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gallery::{CondensedGallery, Gallery, Provenance, SampleSet};
use crate::meanshift::{prune_identity, PruningParams};
use crate::vector::{check_dims, dist, mean_vector, FeatureVector, IdentityId};

pub const DEFAULT_LINE_SEARCH_STEPS: u32 = 32;
/// Margin used when none is given, as a fraction of the radius.
pub const DEFAULT_MARGIN_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationParams {
    pub radius: f64,
    /// Slack subtracted from `2 * radius` when pairing the seed points of a sphere.
    pub margin: f64,
    pub line_search_steps: u32,
}

impl GenerationParams {
    pub fn new(radius: f64, margin: f64) -> Result<Self> {
        let p = Self { radius, margin, line_search_steps: DEFAULT_LINE_SEARCH_STEPS };
        p.validate()?;
        Ok(p)
    }

    /// Margin defaults to `DEFAULT_MARGIN_RATIO * radius`.
    pub fn with_radius(radius: f64) -> Result<Self> {
        Self::new(radius, DEFAULT_MARGIN_RATIO * radius)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius must be > 0, got {}", self.radius)));
        }
        if !(self.margin >= 0.0 && self.margin < 2.0 * self.radius) {
            return Err(Error::InvalidParameter(format!(
                "margin must lie in [0, 2 * radius), got {}",
                self.margin
            )));
        }
        if self.line_search_steps == 0 {
            return Err(Error::InvalidParameter("line_search_steps must be positive".into()));
        }
        Ok(())
    }
}

/// Index of the point of `candidates` farthest from `from`; lowest index wins ties.
fn farthest<'a>(from: &[f64], candidates: impl Iterator<Item = &'a FeatureVector>) -> Option<&'a FeatureVector> {
    let mut best: Option<(&FeatureVector, f64)> = None;
    for c in candidates {
        let d = dist(from, c);
        if best.is_none_or(|(_, bd)| d > bd) {
            best = Some((c, d));
        }
    }
    best.map(|(c, _)| c)
}

fn covers_all(center: &[f64], members: &[&FeatureVector], radius: f64) -> bool {
    members.iter().all(|m| dist(center, m) < radius)
}

/// Slides `v_m` toward `v_init` as far as every member of `members` stays
/// strictly inside the sphere of `radius`.
///
/// Each constraint is convex along the segment, so the feasible parameters
/// form an interval starting at 0 and bisection finds its end to within
/// `2^-steps`.
pub fn move_toward_init(
    v_m: &FeatureVector,
    v_init: &FeatureVector,
    members: &[&FeatureVector],
    radius: f64,
    steps: u32,
) -> Result<FeatureVector> {
    check_dims(v_m.dim(), v_init.dim())?;
    if !covers_all(v_m, members, radius) {
        return Err(Error::Precondition("sphere does not cover its members before the move".into()));
    }
    Ok(v_m.lerp(v_init, line_search(v_m, v_init, members, radius, steps)))
}

/// Largest feasible segment parameter, as found by the bisection.
pub fn line_search(
    v_m: &FeatureVector,
    v_init: &FeatureVector,
    members: &[&FeatureVector],
    radius: f64,
    steps: u32,
) -> f64 {
    let feasible = |t: f64| covers_all(&v_m.lerp(v_init, t), members, radius);
    if feasible(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Greedy hypersphere covering of one identity's vectors.
///
/// Starting from the point farthest from the mean, each round pairs the
/// current point with its farthest neighbour inside `2r - margin`, centers a
/// sphere between them, pulls the center toward the global mean while its
/// initial members stay covered, then removes everything the sphere covers.
/// The next round starts from the remaining point farthest from the last center.
pub fn generate_samples(vectors: &[FeatureVector], params: &GenerationParams) -> Result<SampleSet> {
    params.validate()?;
    let first = vectors.first().ok_or(Error::Empty("cannot generate samples from no vectors"))?;
    for v in vectors {
        check_dims(first.dim(), v.dim())?;
        if let Some(i) = v.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
    }
    let r = params.radius;
    let pair_radius = 2.0 * r - params.margin;

    let v_init = mean_vector(vectors)?;
    let mut remaining: Vec<&FeatureVector> = vectors.iter().collect();
    let mut v1 = farthest(&v_init, remaining.iter().copied()).expect("non-empty").clone();
    let mut samples = Vec::new();

    while !remaining.is_empty() {
        let v2 = farthest(&v1, remaining.iter().copied().filter(|v| dist(&v1, v) < pair_radius))
            .unwrap_or(&v1)
            .clone();
        let v_m = mean_vector(&[&v1, &v2].map(|v| v.as_slice()))?;
        let inliers: Vec<&FeatureVector> =
            remaining.iter().copied().filter(|v| dist(&v_m, v) < r).collect();
        let v_m = move_toward_init(&v_m, &v_init, &inliers, r, params.line_search_steps)?;

        remaining.retain(|v| dist(&v_m, v) >= r);
        if let Some(next) = farthest(&v_m, remaining.iter().copied()) {
            v1 = next.clone();
        }
        samples.push(v_m);
        if samples.len() > vectors.len() {
            return Err(Error::Precondition("covering loop failed to make progress".into()));
        }
    }

    Ok(SampleSet { samples, source_count: vectors.len() })
}

/// Per identity: optional mean-shift pruning, then sample generation.
pub fn condense_gallery(
    g: &Gallery,
    pruning: Option<&PruningParams>,
    generation: &GenerationParams,
) -> Result<CondensedGallery> {
    let entries: BTreeMap<IdentityId, SampleSet> = g
        .entries()
        .par_iter()
        .map(|(id, vs)| {
            let set = match pruning {
                Some(p) => generate_samples(&prune_identity(vs, p)?, generation)?,
                None => generate_samples(vs, generation)?,
            };
            Ok((id.clone(), set))
        })
        .collect::<Result<_>>()?;
    let provenance = if pruning.is_some() { Provenance::PrunedGenerated } else { Provenance::Generated };
    CondensedGallery::new(entries, g.dim(), provenance)
}
