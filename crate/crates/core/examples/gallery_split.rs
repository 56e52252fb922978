//! Splits a labeled collection into an enrolled gallery, mate probes and
//! non-mate probes, several times with different seeds.

use gallery_sampling::split::{split_k, SplitFractions};
use gallery_sampling::synth::{generate, SynthConfig};

fn main() -> gallery_sampling::Result<()> {
    let labeled = generate(&SynthConfig { num_identities: 50, num_nonmate_identities: 1, ..SynthConfig::default() })?.gallery;
    for (i, s) in split_k(&labeled, SplitFractions::default(), 7, 3)?.iter().enumerate() {
        println!(
            "split {i}: {} enrolled identities / {} gallery vectors, {} mate probes, {} non-mate probes",
            s.gallery.num_identities(),
            s.gallery.num_vectors(),
            s.probes.mates.len(),
            s.probes.nonmates.len()
        );
    }
    Ok(())
}
