//! Random gallery / mate / non-mate splits of a labeled dataset.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gallery::{Gallery, ProbeSet};
use crate::vector::{FeatureVector, IdentityId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitFractions {
    /// Share of identities enrolled (the rest become non-mate probes).
    pub mate_identities: f64,
    /// Share of each enrolled identity's images kept in the gallery.
    pub gallery_images: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self { mate_identities: 0.8, gallery_images: 0.8 }
    }
}

#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub gallery: Gallery,
    pub probes: ProbeSet,
    /// Enrolled identities with a single image: kept in the gallery, no mate probe.
    pub single_image_identities: Vec<IdentityId>,
}

fn share(n: usize, fraction: f64) -> usize {
    (fraction * n as f64).round() as usize
}

/// Identity-level split into mates and non-mates, then an image-level split
/// of each mate identity into gallery and mate probes.
pub fn split_dataset(g: &Gallery, fractions: SplitFractions, seed: u64) -> Result<SplitOutcome> {
    for f in [fractions.mate_identities, fractions.gallery_images] {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidParameter(format!("split fraction must lie in (0, 1], got {f}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<&IdentityId> = g.entries().keys().collect();
    ids.shuffle(&mut rng);
    let num_mates = share(ids.len(), fractions.mate_identities).clamp(1, ids.len());
    let (mate_ids, nonmate_ids) = ids.split_at(num_mates);
    let mut mate_ids = mate_ids.to_vec();
    mate_ids.sort();
    let mut nonmate_ids = nonmate_ids.to_vec();
    nonmate_ids.sort();

    let mut entries: BTreeMap<IdentityId, Vec<FeatureVector>> = BTreeMap::new();
    let mut mates = Vec::new();
    let mut single_image_identities = Vec::new();
    for id in mate_ids {
        let vs = &g.entries()[id];
        if vs.len() == 1 {
            single_image_identities.push(id.clone());
            entries.insert(id.clone(), vs.clone());
            continue;
        }
        let mut order: Vec<usize> = (0..vs.len()).collect();
        order.shuffle(&mut rng);
        let keep = share(vs.len(), fractions.gallery_images).clamp(1, vs.len() - 1);
        let mut kept = order[..keep].to_vec();
        kept.sort_unstable();
        let mut probes = order[keep..].to_vec();
        probes.sort_unstable();
        entries.insert(id.clone(), kept.iter().map(|&i| vs[i].clone()).collect());
        mates.extend(probes.iter().map(|&i| (id.clone(), vs[i].clone())));
    }
    let nonmates = nonmate_ids.iter().flat_map(|id| g.entries()[*id].iter().cloned()).collect();

    Ok(SplitOutcome {
        gallery: Gallery::new(entries)?,
        probes: ProbeSet::new(mates, nonmates, g.dim())?,
        single_image_identities,
    })
}

/// `k` independent splits with seeds `seed, seed + 1, ...`.
pub fn split_k(g: &Gallery, fractions: SplitFractions, seed: u64, k: usize) -> Result<Vec<SplitOutcome>> {
    (0..k as u64).map(|i| split_dataset(g, fractions, seed.wrapping_add(i))).collect()
}
