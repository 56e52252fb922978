//! Grid search over radius, bandwidth and pruning ratio, ranked by FNIR at
//! the first target FPIR. A pruning ratio of 0 is plain generation.

use gallery_sampling::report::sweep_table;
use gallery_sampling::synth::{generate, SynthConfig};
use gallery_sampling::{run_sweep, SweepGrid};

fn main() -> gallery_sampling::Result<()> {
    // A noisier fixture than the default so the settings actually separate.
    let config = SynthConfig {
        num_identities: 30,
        dim: 16,
        cluster_spread: 0.15,
        mislabel_rate: 0.1,
        noise_rate: 0.1,
        seed: 2,
        ..SynthConfig::default()
    };
    let data = generate(&config)?;
    let grid = SweepGrid::new(vec![0.4, 0.7, 1.0], vec![0.8, 1.0], vec![0.0, 1.0], vec![0.01]);
    let results = run_sweep(&data.gallery, &data.probes, &grid)?;
    print!("{}", sweep_table(&results));
    Ok(())
}
