//! Sampling-by-pruning: flat-kernel mean-shift clustering per identity,
//! then removal of clusters that are small relative to the largest one.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gallery::Gallery;
use crate::vector::{check_dims, dist, FeatureVector, IdentityId};

pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruningParams {
    /// Kernel radius, in embedding distance units.
    pub bandwidth: f64,
    /// 0 keeps everything, 1 keeps only the largest cluster(s).
    pub pruning_ratio: f64,
    pub convergence_tol: f64,
    pub max_iterations: usize,
}

impl PruningParams {
    pub fn new(bandwidth: f64, pruning_ratio: f64) -> Result<Self> {
        let p = Self {
            bandwidth,
            pruning_ratio,
            convergence_tol: DEFAULT_CONVERGENCE_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!("bandwidth must be > 0, got {}", self.bandwidth)));
        }
        if !(0.0..=1.0).contains(&self.pruning_ratio) {
            return Err(Error::InvalidParameter(format!(
                "pruning ratio must lie in [0, 1], got {}",
                self.pruning_ratio
            )));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return Err(Error::InvalidParameter("convergence tolerance must be > 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// Cluster index of each input point.
    pub assignments: Vec<usize>,
    /// One converged mode per cluster.
    pub modes: Vec<FeatureVector>,
    /// Member count per cluster.
    pub sizes: Vec<usize>,
}

impl ClusterResult {
    pub fn max_size(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }
}

/// One flat-kernel step: the mean of every point within `bandwidth` of `x`.
pub fn mean_shift_update(x: &[f64], points: &[FeatureVector], bandwidth: f64) -> FeatureVector {
    let mut acc = vec![0.0; x.len()];
    let mut count = 0usize;
    for p in points {
        if dist(x, p) <= bandwidth {
            count += 1;
            let w = count as f64;
            for (a, c) in acc.iter_mut().zip(p.iter()) {
                *a += (c - *a) / w;
            }
        }
    }
    if count == 0 {
        acc.copy_from_slice(x);
    }
    FeatureVector::new(acc).expect("mean of finite points is finite")
}

fn seek_mode(start: &FeatureVector, points: &[FeatureVector], params: &PruningParams) -> FeatureVector {
    let mut x = start.clone();
    for _ in 0..params.max_iterations {
        let next = mean_shift_update(&x, points, params.bandwidth);
        let shift = dist(&next, &x);
        x = next;
        if shift < params.convergence_tol {
            break;
        }
    }
    x
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Flat-kernel mean-shift seeded from every point. Converged modes closer
/// than `bandwidth / 2` are merged by single linkage; clusters are numbered
/// by the canonical coordinate order of their first mode, which makes the
/// result independent of input order.
pub fn mean_shift(points: &[FeatureVector], params: &PruningParams) -> Result<ClusterResult> {
    params.validate()?;
    let first = points.first().ok_or(Error::Empty("mean-shift needs at least one point"))?;
    for p in points {
        check_dims(first.dim(), p.dim())?;
    }

    let point_modes: Vec<FeatureVector> =
        points.iter().map(|p| seek_mode(p, points, params)).collect();

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| point_modes[a].canonical_cmp(&point_modes[b]).then(a.cmp(&b)));

    // Union-find over positions in canonical order; roots stay at the
    // smallest position so each component's representative is its
    // canonically first mode.
    let merge_radius = params.bandwidth / 2.0;
    let mut parent: Vec<usize> = (0..order.len()).collect();
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            if dist(&point_modes[order[i]], &point_modes[order[j]]) < merge_radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    parent[hi] = lo;
                }
            }
        }
    }

    let mut cluster_of_root = BTreeMap::new();
    let mut modes = Vec::new();
    let mut sizes = Vec::new();
    let mut assignments = vec![0; points.len()];
    for pos in 0..order.len() {
        let root = find(&mut parent, pos);
        let cluster = *cluster_of_root.entry(root).or_insert_with(|| {
            modes.push(point_modes[order[root]].clone());
            sizes.push(0);
            modes.len() - 1
        });
        sizes[cluster] += 1;
        assignments[order[pos]] = cluster;
    }

    Ok(ClusterResult { assignments, modes, sizes })
}

/// Indices (ascending) of points whose cluster has at least
/// `pruning_ratio × largest size` members.
pub fn prune_clusters(result: &ClusterResult, pruning_ratio: f64) -> Vec<usize> {
    let cutoff = pruning_ratio * result.max_size() as f64;
    result
        .assignments
        .iter()
        .enumerate()
        .filter(|&(_, &c)| result.sizes[c] as f64 >= cutoff)
        .map(|(i, _)| i)
        .collect()
}

/// Indices of the vectors kept by mean-shift pruning.
pub fn prune_identity_indices(vectors: &[FeatureVector], params: &PruningParams) -> Result<Vec<usize>> {
    let clusters = mean_shift(vectors, params)?;
    Ok(prune_clusters(&clusters, params.pruning_ratio))
}

/// Retained vectors, in input order. Never empty.
pub fn prune_identity(vectors: &[FeatureVector], params: &PruningParams) -> Result<Vec<FeatureVector>> {
    Ok(prune_identity_indices(vectors, params)?
        .into_iter()
        .map(|i| vectors[i].clone())
        .collect())
}

/// Pruned gallery plus the retained indices of each identity.
#[derive(Debug, Clone)]
pub struct PrunedGallery {
    pub gallery: Gallery,
    pub retained: BTreeMap<IdentityId, Vec<usize>>,
}

impl PrunedGallery {
    /// `(identity, index)` pairs that were removed.
    pub fn removed(&self, original: &Gallery) -> Vec<(IdentityId, usize)> {
        let mut out = Vec::new();
        for (id, vs) in original.entries() {
            let kept = self.retained.get(id).map(Vec::as_slice).unwrap_or(&[]);
            out.extend((0..vs.len()).filter(|i| kept.binary_search(i).is_err()).map(|i| (id.clone(), i)));
        }
        out
    }
}

/// Prunes every identity independently (in parallel).
pub fn prune_gallery(g: &Gallery, params: &PruningParams) -> Result<PrunedGallery> {
    let per_id: Vec<(IdentityId, Vec<usize>)> = g
        .entries()
        .par_iter()
        .map(|(id, vs)| Ok((id.clone(), prune_identity_indices(vs, params)?)))
        .collect::<Result<_>>()?;
    let mut entries = BTreeMap::new();
    let mut retained = BTreeMap::new();
    for (id, idx) in per_id {
        let vs = &g.entries()[&id];
        entries.insert(id.clone(), idx.iter().map(|&i| vs[i].clone()).collect());
        retained.insert(id, idx);
    }
    Ok(PrunedGallery { gallery: Gallery::new(entries)?, retained })
}
