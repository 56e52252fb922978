//! Fits a shrunk Gaussian to an elongated cluster and compares Mahalanobis
//! and Euclidean distances along and across its main axis.

use gallery_sampling::mahalanobis::{dist_mahalanobis, fit_mahalanobis, DEFAULT_SHRINKAGE};
use gallery_sampling::{l2_distance, FeatureVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> gallery_sampling::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let along = Normal::new(0.0, 1.0).unwrap();
    let across = Normal::new(0.0, 0.1).unwrap();
    let cluster: Vec<FeatureVector> = (0..500)
        .map(|_| FeatureVector::new(vec![along.sample(&mut rng), across.sample(&mut rng)]))
        .collect::<Result<_, _>>()?;

    let model = fit_mahalanobis(&cluster, DEFAULT_SHRINKAGE)?;
    println!("mean = ({:.3}, {:.3})", model.mu[0], model.mu[1]);
    for (label, q) in [("along axis", [1.0, 0.0]), ("across axis", [0.0, 1.0])] {
        let q = FeatureVector::new(q.to_vec())?;
        println!(
            "{label:<12} euclidean {:.3}  mahalanobis {:.3}",
            l2_distance(&q, &model.mu)?,
            dist_mahalanobis(&q, &model)?
        );
    }
    Ok(())
}
