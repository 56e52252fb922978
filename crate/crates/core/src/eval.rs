//! FNIR at fixed FPIR, precision/recall, and parameter sweeps.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gallery::{CondensedGallery, Gallery, ProbeSet, Provenance};
use crate::generate::{generate_samples, GenerationParams, DEFAULT_MARGIN_RATIO};
use crate::identify::{accept, identify_all, IdentificationResult};
use crate::meanshift::{prune_gallery, PruningParams};
use crate::vector::{FeatureVector, IdentityId};

/// A mate probe's identification result paired with its true identity.
#[derive(Debug, Clone, PartialEq)]
pub struct MateResult {
    pub result: IdentificationResult,
    pub true_id: IdentityId,
}

impl MateResult {
    fn correct(&self) -> bool {
        self.result.best_id == self.true_id
    }
}

/// Largest `k` with `k / n <= target`, evaluated with the same division a
/// brute-force rate check would use.
fn allowed_false_positives(n: usize, target: f64) -> usize {
    let nf = n as f64;
    let mut k = ((target * nf).floor().max(0.0) as usize).min(n);
    while k < n && (k + 1) as f64 / nf <= target {
        k += 1;
    }
    while k > 0 && k as f64 / nf > target {
        k -= 1;
    }
    k
}

/// Threshold whose strict-acceptance FPIR on the given non-mate scores is
/// as large as possible without exceeding `target_fpir`: the order
/// statistic of rank `floor(target · n) + 1`.
pub fn threshold_for_fpir(nonmate_best_distances: &[f64], target_fpir: f64) -> Result<f64> {
    if nonmate_best_distances.is_empty() {
        return Err(Error::Empty("no non-mate scores"));
    }
    if !(target_fpir > 0.0 && target_fpir < 1.0) {
        return Err(Error::InvalidParameter(format!("target FPIR must lie in (0, 1), got {target_fpir}")));
    }
    let mut sorted = nonmate_best_distances.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = allowed_false_positives(sorted.len(), target_fpir);
    Ok(sorted[k.min(sorted.len() - 1)])
}

/// Fraction of non-mate results accepted at `th`.
pub fn compute_fpir(nonmate_results: &[IdentificationResult], th: f64) -> f64 {
    if nonmate_results.is_empty() {
        return 0.0;
    }
    nonmate_results.iter().filter(|r| accept(r, th)).count() as f64 / nonmate_results.len() as f64
}

/// Mate probes that are wrongly identified or rejected count as negatives.
pub fn compute_fnir(mate_results: &[MateResult], th: f64) -> f64 {
    if mate_results.is_empty() {
        return 0.0;
    }
    let negatives = mate_results
        .iter()
        .filter(|m| !m.correct() || !accept(&m.result, th))
        .count();
    negatives as f64 / mate_results.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    /// False when nothing was accepted; precision is then reported as 1.0.
    pub precision_defined: bool,
}

/// TP: mates accepted under their own id. FP: accepted non-mates plus
/// mates accepted under a wrong id. FN: every other mate.
pub fn compute_precision_recall(
    mate_results: &[MateResult],
    nonmate_results: &[IdentificationResult],
    th: f64,
) -> PrecisionRecall {
    let tp = mate_results.iter().filter(|m| m.correct() && accept(&m.result, th)).count();
    let wrong_id = mate_results.iter().filter(|m| !m.correct() && accept(&m.result, th)).count();
    let fp = wrong_id + nonmate_results.iter().filter(|r| accept(r, th)).count();
    let false_neg = mate_results.len() - tp;

    let (precision, precision_defined) = if tp + fp == 0 {
        (1.0, false)
    } else {
        (tp as f64 / (tp + fp) as f64, true)
    };
    // Written as the complement of the miss fraction so that it agrees
    // bit-for-bit with `1 - compute_fnir`.
    let recall = if mate_results.is_empty() {
        0.0
    } else {
        1.0 - false_neg as f64 / mate_results.len() as f64
    };
    PrecisionRecall { precision, recall, precision_defined }
}

/// Metrics at one target FPIR.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    pub target_fpir: f64,
    pub threshold: f64,
    pub fnir: f64,
    pub realized_fpir: f64,
    /// False when there are fewer non-mates than `1 / target_fpir`.
    pub achievable: bool,
    pub precision: PrecisionRecall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub method: Provenance,
    /// One entry per requested target FPIR, in request order.
    pub operating_points: Vec<OperatingPoint>,
    pub avg_gallery_size: f64,
    pub num_mates: usize,
    pub num_nonmates: usize,
}

impl EvalReport {
    pub fn fnir_at(&self, target_fpir: f64) -> Option<f64> {
        self.operating_points
            .iter()
            .find(|p| p.target_fpir == target_fpir)
            .map(|p| p.fnir)
    }

    /// FNIR at the first requested FPIR; the sort key of sweeps.
    pub fn primary_fnir(&self) -> f64 {
        self.operating_points.first().map_or(f64::NAN, |p| p.fnir)
    }

    /// Operating points keyed by target FPIR.
    pub fn fnir_at_fpir(&self) -> BTreeMap<String, (f64, f64)> {
        self.operating_points
            .iter()
            .map(|p| (format!("{}", p.target_fpir), (p.threshold, p.fnir)))
            .collect()
    }
}

/// Identifies every probe against `g`, then derives thresholds from the
/// non-mate scores and reports metrics at each target FPIR.
pub fn evaluate_method(g: &CondensedGallery, probes: &ProbeSet, target_fpirs: &[f64]) -> Result<EvalReport> {
    probes.check_against(g)?;
    if probes.mates.is_empty() {
        return Err(Error::Empty("no mate probes"));
    }
    if probes.nonmates.is_empty() {
        return Err(Error::Empty("no non-mate probes"));
    }
    if target_fpirs.is_empty() {
        return Err(Error::Empty("no target FPIRs"));
    }

    let mate_vectors: Vec<FeatureVector> = probes.mates.iter().map(|(_, v)| v.clone()).collect();
    let mate_results: Vec<MateResult> = identify_all(&mate_vectors, g)?
        .into_iter()
        .zip(&probes.mates)
        .map(|(result, (id, _))| MateResult { result, true_id: id.clone() })
        .collect();
    let nonmate_results = identify_all(&probes.nonmates, g)?;
    let nonmate_scores: Vec<f64> = nonmate_results.iter().map(|r| r.best_distance).collect();

    let operating_points = target_fpirs
        .iter()
        .map(|&target| {
            let threshold = threshold_for_fpir(&nonmate_scores, target)?;
            Ok(OperatingPoint {
                target_fpir: target,
                threshold,
                fnir: compute_fnir(&mate_results, threshold),
                realized_fpir: compute_fpir(&nonmate_results, threshold),
                achievable: nonmate_scores.len() as f64 * target >= 1.0,
                precision: compute_precision_recall(&mate_results, &nonmate_results, threshold),
            })
        })
        .collect::<Result<_>>()?;

    Ok(EvalReport {
        method: g.provenance,
        operating_points,
        avg_gallery_size: g.avg_gallery_size(),
        num_mates: mate_results.len(),
        num_nonmates: nonmate_results.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub radii: Vec<f64>,
    pub bandwidths: Vec<f64>,
    /// Empty together with `bandwidths` to sweep Gen (no pruning) over radii.
    pub pruning_ratios: Vec<f64>,
    pub target_fpirs: Vec<f64>,
    /// Margin as a fraction of each radius.
    pub margin_ratio: f64,
}

impl SweepGrid {
    pub fn new(radii: Vec<f64>, bandwidths: Vec<f64>, pruning_ratios: Vec<f64>, target_fpirs: Vec<f64>) -> Self {
        Self { radii, bandwidths, pruning_ratios, target_fpirs, margin_ratio: DEFAULT_MARGIN_RATIO }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.target_fpirs.is_empty() {
            return Err(Error::Empty("sweep grid needs radii and target FPIRs"));
        }
        if self.bandwidths.is_empty() != self.pruning_ratios.is_empty() {
            return Err(Error::InvalidParameter(
                "bandwidths and pruning ratios must both be given or both be empty".into(),
            ));
        }
        if self.radii.iter().chain(&self.bandwidths).any(|&x| x.is_nan() || x <= 0.0) {
            return Err(Error::InvalidParameter("radii and bandwidths must be positive".into()));
        }
        if self.pruning_ratios.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidParameter("pruning ratios must lie in [0, 1]".into()));
        }
        if self.target_fpirs.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::InvalidParameter("target FPIRs must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.bandwidths.len().max(1) * self.pruning_ratios.len().max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub radius: f64,
    pub bandwidth: Option<f64>,
    pub pruning_ratio: Option<f64>,
    pub report: EvalReport,
}

/// Evaluates PrunGen at every (pr, b, r) of the grid, or Gen at every r when
/// no pruning axes are given. Results are sorted by FNIR at the first target
/// FPIR; equal FNIRs keep grid order.
pub fn run_sweep(g: &Gallery, probes: &ProbeSet, grid: &SweepGrid) -> Result<Vec<SweepResult>> {
    grid.validate()?;

    let mut prunings: Vec<(Option<f64>, Option<f64>, Gallery)> = Vec::new();
    if grid.bandwidths.is_empty() {
        prunings.push((None, None, g.clone()));
    } else {
        for &pr in &grid.pruning_ratios {
            for &b in &grid.bandwidths {
                let pruned = prune_gallery(g, &PruningParams::new(b, pr)?)?;
                prunings.push((Some(b), Some(pr), pruned.gallery));
            }
        }
    }

    let settings: Vec<(usize, f64)> = (0..prunings.len())
        .flat_map(|p| grid.radii.iter().map(move |&r| (p, r)))
        .collect();
    let mut results: Vec<SweepResult> = settings
        .par_iter()
        .map(|&(p, radius)| {
            let (bandwidth, pruning_ratio, pruned) = &prunings[p];
            let generation = GenerationParams::new(radius, grid.margin_ratio * radius)?;
            let entries = pruned
                .entries()
                .iter()
                .map(|(id, vs)| Ok((id.clone(), generate_samples(vs, &generation)?)))
                .collect::<Result<_>>()?;
            let method = if bandwidth.is_some() { Provenance::PrunedGenerated } else { Provenance::Generated };
            let condensed = CondensedGallery::new(entries, g.dim(), method)?;
            Ok(SweepResult {
                radius,
                bandwidth: *bandwidth,
                pruning_ratio: *pruning_ratio,
                report: evaluate_method(&condensed, probes, &grid.target_fpirs)?,
            })
        })
        .collect::<Result<_>>()?;

    results.sort_by(|a, b| a.report.primary_fnir().total_cmp(&b.report.primary_fnir()));
    Ok(results)
}
