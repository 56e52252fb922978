//! Top-1 search against a small gallery plus the accept/reject threshold.

use std::collections::BTreeMap;

use gallery_sampling::identify::identify_all;
use gallery_sampling::{accept, CondensedGallery, FeatureVector, Gallery, IdentityId};

fn v(x: f64, y: f64) -> FeatureVector {
    FeatureVector::new(vec![x, y]).expect("finite")
}

fn main() -> gallery_sampling::Result<()> {
    let mut entries = BTreeMap::new();
    entries.insert(IdentityId::new("alice")?, vec![v(0.0, 0.0), v(0.2, 0.1)]);
    entries.insert(IdentityId::new("bob")?, vec![v(3.0, 0.0)]);
    entries.insert(IdentityId::new("carol")?, vec![v(0.0, 3.0), v(0.3, 2.8)]);
    let gallery = CondensedGallery::raw(&Gallery::new(entries)?);

    let probes = [v(0.1, 0.1), v(2.7, 0.2), v(1.5, 1.5), v(-4.0, -4.0)];
    let threshold = 1.0;
    for r in identify_all(&probes, &gallery)? {
        let verdict = if accept(&r, threshold) { "accept" } else { "reject" };
        println!(
            "probe {} -> {:<6} at {:.3} (runner-up {}) {verdict}",
            r.probe_index,
            r.best_id,
            r.best_distance,
            r.second_distance.map_or("-".to_string(), |d| format!("{d:.3}")),
        );
    }
    Ok(())
}
