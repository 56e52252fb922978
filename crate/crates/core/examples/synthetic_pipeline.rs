//! End to end on a seeded synthetic gallery: prune, generate, and compare
//! all six gallery variants at a fixed false-positive budget.

use gallery_sampling::meanshift::prune_gallery;
use gallery_sampling::report::eval_table;
use gallery_sampling::synth::{generate, outlier_recovery_score, SynthConfig};
use gallery_sampling::{build_gallery, evaluate_method, GenerationParams, MethodParams, Provenance, PruningParams};

fn main() -> gallery_sampling::Result<()> {
    let data = generate(&SynthConfig { num_identities: 40, seed: 5, ..SynthConfig::default() })?;
    println!(
        "{} identities, {} enrolled vectors ({} planted outliers), {} mate and {} non-mate probes",
        data.gallery.num_identities(),
        data.gallery.num_vectors(),
        data.truth.num_outliers(),
        data.probes.mates.len(),
        data.probes.nonmates.len()
    );

    let pruning = PruningParams::new(0.9, 1.0)?;
    let pruned = prune_gallery(&data.gallery, &pruning)?;
    let score = outlier_recovery_score(&pruned.retained, &data.truth);
    println!(
        "pruning removed {:.1}% of outliers and kept {:.1}% of inliers\n",
        100.0 * score.outlier_removal_rate,
        100.0 * score.inlier_retention_rate
    );

    let params = MethodParams { pruning: Some(pruning), generation: Some(GenerationParams::with_radius(0.7)?) };
    let mut reports = Vec::new();
    for method in Provenance::ALL {
        let g = build_gallery(&data.gallery, method, &params)?;
        reports.push(evaluate_method(&g, &data.probes, &[0.01, 0.05, 0.1])?);
    }
    print!("{}", eval_table(&reports));
    Ok(())
}
