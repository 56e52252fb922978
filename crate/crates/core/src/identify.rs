//! Open-set top-1 identification and the single-aggregate baseline.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gallery::{CondensedGallery, Gallery, Provenance, SampleSet};
use crate::generate::{generate_samples, GenerationParams};
use crate::meanshift::{prune_identity, PruningParams};
use crate::vector::{check_dims, dist, mean_vector, normalize, FeatureVector, IdentityId};

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationResult {
    pub probe_index: usize,
    pub best_id: IdentityId,
    pub best_distance: f64,
    /// Best distance among the other identities, when there are any.
    pub second_distance: Option<f64>,
}

/// Conventional identity distance: the nearest enrolled vector.
pub fn dist_cnv(query: &FeatureVector, id_vectors: &[FeatureVector]) -> Result<f64> {
    if id_vectors.is_empty() {
        return Err(Error::Empty("identity has no vectors"));
    }
    let mut best = f64::INFINITY;
    for v in id_vectors {
        check_dims(query.dim(), v.dim())?;
        best = best.min(dist(query, v));
    }
    Ok(best)
}

/// Nearest identity by `dist_cnv`. Identities are scanned in id order and
/// only a strictly smaller distance displaces the incumbent, so ties go to
/// the lexicographically smaller id.
pub fn identify_top1(
    probe_index: usize,
    query: &FeatureVector,
    g: &CondensedGallery,
) -> Result<IdentificationResult> {
    check_dims(g.dim(), query.dim())?;
    let mut best: Option<(&IdentityId, f64)> = None;
    let mut second: Option<f64> = None;
    for (id, set) in g.entries() {
        let d = dist_cnv(query, &set.samples)?;
        match best {
            Some((_, bd)) if d >= bd => {
                second = Some(second.map_or(d, |s: f64| s.min(d)));
            }
            Some((_, bd)) => {
                second = Some(second.map_or(bd, |s: f64| s.min(bd)));
                best = Some((id, d));
            }
            None => best = Some((id, d)),
        }
    }
    let (best_id, best_distance) = best.ok_or(Error::Empty("gallery has no identities"))?;
    Ok(IdentificationResult {
        probe_index,
        best_id: best_id.clone(),
        best_distance,
        second_distance: second,
    })
}

/// Identifies every query in parallel; output order follows input order.
pub fn identify_all(queries: &[FeatureVector], g: &CondensedGallery) -> Result<Vec<IdentificationResult>> {
    queries
        .par_iter()
        .enumerate()
        .map(|(i, q)| identify_top1(i, q, g))
        .collect()
}

/// Open-set decision: accept iff the best distance is strictly below `threshold`.
pub fn accept(result: &IdentificationResult, threshold: f64) -> bool {
    result.best_distance < threshold
}

/// Sgl baseline: the re-normalized mean of an identity's vectors.
pub fn aggregate_single(vectors: &[FeatureVector]) -> Result<SampleSet> {
    let mean = mean_vector(vectors)?;
    Ok(SampleSet { samples: vec![normalize(&mean)?], source_count: vectors.len() })
}

/// Parameters for building any of the six gallery variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodParams {
    pub pruning: Option<PruningParams>,
    pub generation: Option<GenerationParams>,
}

/// Builds the gallery variant named by `method` from enrolled vectors.
pub fn build_gallery(g: &Gallery, method: Provenance, params: &MethodParams) -> Result<CondensedGallery> {
    if method == Provenance::Raw {
        return Ok(CondensedGallery::raw(g));
    }
    let pruning = if method.is_pruned() {
        Some(params.pruning.ok_or_else(|| {
            Error::InvalidParameter(format!("method {method} needs pruning parameters"))
        })?)
    } else {
        None
    };
    let generation = match method {
        Provenance::Generated | Provenance::PrunedGenerated => Some(params.generation.ok_or_else(|| {
            Error::InvalidParameter(format!("method {method} needs generation parameters"))
        })?),
        _ => None,
    };

    let entries: BTreeMap<IdentityId, SampleSet> = g
        .entries()
        .par_iter()
        .map(|(id, vs)| {
            let kept = match &pruning {
                Some(p) => prune_identity(vs, p)?,
                None => vs.clone(),
            };
            let set = match method {
                Provenance::Raw | Provenance::PrunedRaw => SampleSet {
                    source_count: vs.len(),
                    samples: kept,
                },
                Provenance::Single | Provenance::PrunedSingle => aggregate_single(&kept)?,
                Provenance::Generated | Provenance::PrunedGenerated => {
                    generate_samples(&kept, generation.as_ref().expect("checked above"))?
                }
            };
            Ok((id.clone(), set))
        })
        .collect::<Result<_>>()?;
    CondensedGallery::new(entries, g.dim(), method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::new(v.to_vec()).unwrap()
    }

    fn id(s: &str) -> IdentityId {
        IdentityId::new(s).unwrap()
    }

    fn gallery(entries: &[(&str, Vec<Vec<f64>>)]) -> CondensedGallery {
        let m = entries
            .iter()
            .map(|(k, vs)| (id(k), vs.iter().map(|v| fv(v)).collect()))
            .collect();
        CondensedGallery::raw(&Gallery::new(m).unwrap())
    }

    #[test]
    fn dist_cnv_examples() {
        let q = fv(&[0., 0.]);
        assert_eq!(dist_cnv(&q, &[fv(&[3., 4.]), fv(&[0., 1.])]).unwrap(), 1.0);
        assert_eq!(dist_cnv(&fv(&[1., 1.]), &[fv(&[1., 1.]), fv(&[2., 2.])]).unwrap(), 0.0);
        assert_eq!(dist_cnv(&q, std::slice::from_ref(&q)).unwrap(), 0.0);
        assert!(dist_cnv(&q, &[]).is_err());
    }

    #[test]
    fn top1_examples() {
        let g = gallery(&[("A", vec![vec![0., 0.]]), ("B", vec![vec![10., 0.]])]);
        let r = identify_top1(0, &fv(&[1., 0.]), &g).unwrap();
        assert_eq!((r.best_id.as_str(), r.best_distance, r.second_distance), ("A", 1.0, Some(9.0)));

        let r = identify_top1(1, &fv(&[10., 0.]), &g).unwrap();
        assert_eq!((r.best_id.as_str(), r.best_distance), ("B", 0.0));

        let g = gallery(&[("b", vec![vec![1., 0.]]), ("a", vec![vec![-1., 0.]])]);
        let r = identify_top1(0, &fv(&[0., 0.]), &g).unwrap();
        assert_eq!(r.best_id.as_str(), "a");
        assert_eq!(r.second_distance, Some(1.0));
    }

    #[test]
    fn single_identity_has_no_runner_up() {
        let g = gallery(&[("A", vec![vec![0., 0.]])]);
        assert_eq!(identify_top1(0, &fv(&[1., 0.]), &g).unwrap().second_distance, None);
    }

    #[test]
    fn accept_is_strict() {
        let mk = |d| IdentificationResult { probe_index: 0, best_id: id("x"), best_distance: d, second_distance: None };
        assert!(accept(&mk(0.5), 0.7));
        assert!(!accept(&mk(0.7), 0.7));
        assert!(!accept(&mk(0.0), 0.0));
    }

    #[test]
    fn aggregate_single_examples() {
        let v = fv(&[3., 4.]);
        assert_eq!(aggregate_single(std::slice::from_ref(&v)).unwrap().samples, vec![normalize(&v).unwrap()]);
        let s = aggregate_single(&[fv(&[1., 0.]), fv(&[0., 1.])]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(dist(&s.samples[0], &[h, h]) < 1e-12);
        assert_eq!(aggregate_single(&[fv(&[1., 0.]), fv(&[-1., 0.])]), Err(Error::ZeroVector));
    }

    #[test]
    fn build_gallery_requires_params() {
        let g = Gallery::new([(id("a"), vec![fv(&[1., 0.])])].into_iter().collect()).unwrap();
        let none = MethodParams { pruning: None, generation: None };
        assert!(build_gallery(&g, Provenance::PrunedGenerated, &none).is_err());
        assert!(build_gallery(&g, Provenance::Generated, &none).is_err());
        assert_eq!(build_gallery(&g, Provenance::Single, &none).unwrap().num_samples(), 1);
    }

    proptest! {
        #[test]
        fn accept_monotone_in_threshold(d in 0.0f64..2.0, th in 0.0f64..2.0, bump in 0.0f64..1.0) {
            let r = IdentificationResult { probe_index: 0, best_id: id("x"), best_distance: d, second_distance: None };
            if accept(&r, th) {
                prop_assert!(accept(&r, th + bump));
            }
        }
    }
}
