//! Covers one identity's vectors with as few radius-r spheres as the greedy
//! procedure finds, and shows how the sample count reacts to the radius.
//!
//! Run with `cargo run --example hypersphere_covering`.

use gallery_sampling::{generate_samples, l2_distance, normalize, FeatureVector, GenerationParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> gallery_sampling::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dim = 32;
    // Three pose-like modes of the same person.
    let centers: Vec<FeatureVector> = (0..3).map(|_| random_unit(&mut rng, dim)).collect::<Result<_, _>>()?;
    let mut vectors = Vec::new();
    for c in &centers {
        for _ in 0..30 {
            let noisy: Vec<f64> = c.iter().map(|x| x + 0.05 * gauss(&mut rng)).collect();
            vectors.push(normalize(&FeatureVector::new(noisy)?)?);
        }
    }

    println!("{} input vectors in d = {dim}", vectors.len());
    println!("{:>8} {:>9} {:>14}", "radius", "samples", "worst cover");
    for r in [0.3, 0.5, 0.7, 1.0, 1.5, 2.5] {
        let params = GenerationParams::with_radius(r)?;
        let set = generate_samples(&vectors, &params)?;
        let mut worst = 0.0f64;
        for v in &vectors {
            let nearest = set
                .samples
                .iter()
                .map(|s| l2_distance(v, s))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest);
        }
        println!("{r:>8.2} {:>9} {worst:>14.4}", set.len());
    }
    Ok(())
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> gallery_sampling::Result<FeatureVector> {
    normalize(&FeatureVector::new((0..dim).map(|_| gauss(rng)).collect())?)
}
