//! How a target FPIR turns into an acceptance threshold, and what FNIR,
//! precision and recall look like at that threshold.

use gallery_sampling::eval::{compute_fnir, compute_fpir, compute_precision_recall, threshold_for_fpir, MateResult};
use gallery_sampling::{IdentificationResult, IdentityId};

fn result(i: usize, id: &str, d: f64) -> IdentificationResult {
    IdentificationResult { probe_index: i, best_id: IdentityId::new(id).unwrap(), best_distance: d, second_distance: None }
}

fn main() -> gallery_sampling::Result<()> {
    // Best distances of ten non-mate probes.
    let nonmates: Vec<IdentificationResult> = [0.91, 0.95, 1.02, 1.10, 1.12, 1.20, 1.25, 1.31, 1.40, 1.52]
        .iter()
        .enumerate()
        .map(|(i, &d)| result(i, "someone", d))
        .collect();
    // Mate probes: (true id, returned id, distance).
    let mates: Vec<MateResult> = [
        ("a", "a", 0.40),
        ("a", "a", 0.88),
        ("b", "b", 0.97),
        ("b", "c", 0.60),
        ("c", "c", 1.30),
    ]
    .iter()
    .enumerate()
    .map(|(i, &(truth, got, d))| MateResult { result: result(i, got, d), true_id: IdentityId::new(truth).unwrap() })
    .collect();

    let scores: Vec<f64> = nonmates.iter().map(|r| r.best_distance).collect();
    for target in [0.05, 0.1, 0.2, 0.3] {
        let th = threshold_for_fpir(&scores, target)?;
        let pr = compute_precision_recall(&mates, &nonmates, th);
        println!(
            "target {target:<4} -> th {th:.2}  fpir {:.2}  fnir {:.2}  precision {:.3}  recall {:.2}",
            compute_fpir(&nonmates, th),
            compute_fnir(&mates, th),
            pr.precision,
            pr.recall
        );
    }
    Ok(())
}
