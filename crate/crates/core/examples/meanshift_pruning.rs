//! Mean-shift clustering of a single identity and the effect of the pruning
//! ratio on which clusters survive.

use gallery_sampling::meanshift::{mean_shift, prune_clusters};
use gallery_sampling::{FeatureVector, PruningParams};

fn main() -> gallery_sampling::Result<()> {
    // A dense cluster of 12, a smaller one of 6 and two stray points, on a line.
    let mut xs: Vec<f64> = (0..12).map(|i| i as f64 * 0.05).collect();
    xs.extend((0..6).map(|i| 4.0 + i as f64 * 0.05));
    xs.extend([9.0, 12.5]);
    let points: Vec<FeatureVector> = xs
        .iter()
        .map(|&x| FeatureVector::new(vec![x, 0.0]))
        .collect::<Result<_, _>>()?;

    let params = PruningParams::new(1.0, 0.0)?;
    let clusters = mean_shift(&points, &params)?;
    println!("modes:");
    for (mode, size) in clusters.modes.iter().zip(&clusters.sizes) {
        println!("  x = {:>7.3}  size {size}", mode[0]);
    }

    for pr in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
        let kept = prune_clusters(&clusters, pr);
        println!("pr = {pr:<4}  keeps {:>2} of {} points", kept.len(), points.len());
    }
    Ok(())
}
