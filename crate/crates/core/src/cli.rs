//! Command-line surface. The `gsmp` binary only parses arguments and calls [`run`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_list, RunConfig};
use crate::error::Error;
use crate::eval::{evaluate_method, run_sweep, SweepGrid};
use crate::gallery::{CondensedGallery, Gallery, Provenance};
use crate::generate::{condense_gallery, DEFAULT_MARGIN_RATIO};
use crate::identify::{build_gallery, identify_all};
use crate::io::{read_dataset, write_dataset, Dataset, Format, FormatError, Role};
use crate::meanshift::prune_gallery;
use crate::report;
use crate::split::{split_k, SplitFractions};
use crate::synth::{generate, SynthConfig, DEFAULT_CLUSTER_SPREAD};

#[derive(Debug, Parser)]
#[command(name = "gsmp", version, about = "Gallery pruning, sample generation and open-set identification evaluation")]
pub struct Cli {
    /// Flat `key = value` file with run defaults; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// L2-normalize gallery and probe vectors on read.
    #[arg(long, global = true)]
    pub normalize: Option<bool>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded synthetic gallery and probe set.
    Synth(SynthArgs),
    /// Split a labeled dataset into gallery, mate and non-mate probe files.
    Split(SplitArgs),
    /// Mean-shift prune every identity of a gallery.
    Prune(PruneArgs),
    /// Replace every identity's vectors with covering samples.
    Generate(GenerateArgs),
    /// Prune, then generate samples.
    Condense(CondenseArgs),
    /// Top-1 identification of every probe.
    Identify(IdentifyArgs),
    /// FNIR / precision / recall report for one or more methods.
    Eval(EvalArgs),
    /// Evaluate a radius x bandwidth x pruning-ratio grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    pub num_identities: usize,
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, default_value_t = 40)]
    pub vectors_min: usize,
    #[arg(long, default_value_t = 40)]
    pub vectors_max: usize,
    #[arg(long, default_value_t = DEFAULT_CLUSTER_SPREAD)]
    pub spread: f64,
    #[arg(long, default_value_t = 0.05)]
    pub mislabel_rate: f64,
    #[arg(long, default_value_t = 0.05)]
    pub noise_rate: f64,
    #[arg(long, default_value_t = 10)]
    pub mates_per_identity: usize,
    #[arg(long, default_value_t = 25)]
    pub nonmate_identities: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub gallery_out: PathBuf,
    #[arg(long)]
    pub probes_out: PathBuf,
    /// Optional `id,index,kind` listing of every enrolled vector.
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
    #[arg(long, default_value = "binary")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Labeled images (gallery-role records).
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    pub mate_fraction: f64,
    #[arg(long, default_value_t = 0.8)]
    pub gallery_fraction: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub splits: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value = "binary")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PruningArgs {
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long)]
    pub pruning_ratio: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenerationArgs {
    #[arg(long)]
    pub radius: Option<f64>,
    /// Defaults to 0.1 x radius.
    #[arg(long)]
    pub margin: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    #[arg(long)]
    pub gallery: PathBuf,
    #[command(flatten)]
    pub pruning: PruningArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "binary")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub gallery: PathBuf,
    #[command(flatten)]
    pub generation: GenerationArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "binary")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CondenseArgs {
    #[arg(long)]
    pub gallery: PathBuf,
    #[command(flatten)]
    pub pruning: PruningArgs,
    #[command(flatten)]
    pub generation: GenerationArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "binary")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    /// Raw gallery or condensed (sample) file.
    #[arg(long)]
    pub gallery: PathBuf,
    #[arg(long)]
    pub probes: PathBuf,
    #[arg(long)]
    pub threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Raw gallery (methods are built from it) or a condensed sample file.
    #[arg(long)]
    pub gallery: PathBuf,
    #[arg(long)]
    pub probes: PathBuf,
    /// Comma-separated methods: raw, prun_raw, sgl, prun_sgl, gen, prun_gen.
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<Provenance>,
    /// Comma-separated target FPIRs.
    #[arg(long)]
    pub fpirs: Option<String>,
    #[command(flatten)]
    pub pruning: PruningArgs,
    #[command(flatten)]
    pub generation: GenerationArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub gallery: PathBuf,
    #[arg(long)]
    pub probes: PathBuf,
    #[arg(long)]
    pub radii: String,
    /// Omit together with --pruning-ratios to sweep Gen only.
    #[arg(long, default_value = "")]
    pub bandwidths: String,
    #[arg(long, default_value = "")]
    pub pruning_ratios: String,
    #[arg(long)]
    pub fpirs: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MARGIN_RATIO)]
    pub margin_ratio: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command: message plus process exit code.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { message: e.to_string(), code: 1 }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError { message: e.to_string(), code: e.code() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        FormatError::Io(e).into()
    }
}

fn read(path: &Path) -> Result<Dataset, CliError> {
    read_dataset(path).map_err(|e| {
        let code = e.code();
        CliError { message: format!("{}: {e}", path.display()), code }
    })
}

fn write_or_print(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

struct Ctx {
    cfg: RunConfig,
}

impl Ctx {
    fn pruning(&self, a: &PruningArgs) -> Result<RunConfig, Error> {
        let mut cfg = self.cfg.clone();
        if let Some(b) = a.bandwidth {
            cfg.bandwidth = b;
        }
        if let Some(pr) = a.pruning_ratio {
            cfg.pruning_ratio = pr;
        }
        Ok(cfg)
    }

    fn generation(&self, base: RunConfig, a: &GenerationArgs) -> RunConfig {
        let mut cfg = base;
        if let Some(r) = a.radius {
            cfg.radius = r;
            if a.margin.is_none() {
                cfg.margin = None;
            }
        }
        if let Some(m) = a.margin {
            cfg.margin = Some(m);
        }
        cfg
    }

    fn fpirs(&self, s: Option<&str>) -> Result<Vec<f64>, Error> {
        match s {
            Some(s) => parse_list("fpirs", s),
            None => Ok(self.cfg.target_fpirs.clone()),
        }
    }

    fn gallery(&self, path: &Path) -> Result<Gallery, CliError> {
        Ok(read(path)?.gallery(self.cfg.normalize_on_ingest)?)
    }
}

/// Runs one parsed command, writing its report to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.normalize {
        cfg.normalize_on_ingest = n;
    }
    let ctx = Ctx { cfg };

    match cli.command {
        Command::Synth(a) => synth(&ctx, a, out),
        Command::Split(a) => split(&ctx, a, out),
        Command::Prune(a) => {
            let g = ctx.gallery(&a.gallery)?;
            let params = ctx.pruning(&a.pruning)?.pruning_params()?;
            let pruned = prune_gallery(&g, &params)?;
            write_dataset(&a.out, &Dataset::from_gallery(&pruned.gallery), a.format)?;
            let removed = pruned.removed(&g);
            writeln!(
                out,
                "kept={} removed={} bandwidth={} pruning_ratio={}",
                pruned.gallery.num_vectors(),
                removed.len(),
                params.bandwidth,
                params.pruning_ratio
            )?;
            for (id, idx) in removed {
                writeln!(out, "removed,{id},{idx}")?;
            }
            Ok(())
        }
        Command::Generate(a) => {
            let g = ctx.gallery(&a.gallery)?;
            let params = ctx.generation(ctx.cfg.clone(), &a.generation).generation_params()?;
            let c = condense_gallery(&g, None, &params)?;
            write_dataset(&a.out, &Dataset::from_condensed(&c), a.format)?;
            size_line(out, &g, &c)
        }
        Command::Condense(a) => {
            let g = ctx.gallery(&a.gallery)?;
            let cfg = ctx.generation(ctx.pruning(&a.pruning)?, &a.generation);
            let c = condense_gallery(&g, Some(&cfg.pruning_params()?), &cfg.generation_params()?)?;
            write_dataset(&a.out, &Dataset::from_condensed(&c), a.format)?;
            size_line(out, &g, &c)
        }
        Command::Identify(a) => {
            let gallery = load_condensed(&ctx, &a.gallery, ctx.cfg.method)?;
            let probes = read(&a.probes)?.probe_vectors(ctx.cfg.normalize_on_ingest)?;
            let results = identify_all(&probes, &gallery)?;
            write_or_print(out, a.out.as_deref(), &report::identification_lines(&results, a.threshold))
        }
        Command::Eval(a) => {
            let data = read(&a.gallery)?;
            let probes = read(&a.probes)?.probes(ctx.cfg.normalize_on_ingest)?;
            let fpirs = ctx.fpirs(a.fpirs.as_deref())?;
            let methods = if a.method.is_empty() { vec![ctx.cfg.method] } else { a.method.clone() };
            let reports = if data.has_role(Role::Sample) {
                let c = data.condensed(methods[0])?;
                vec![evaluate_method(&c, &probes, &fpirs)?]
            } else {
                let g = data.gallery(ctx.cfg.normalize_on_ingest)?;
                let params = ctx.generation(ctx.pruning(&a.pruning)?, &a.generation).method_params()?;
                methods
                    .iter()
                    .map(|&m| evaluate_method(&build_gallery(&g, m, &params)?, &probes, &fpirs))
                    .collect::<Result<Vec<_>, _>>()?
            };
            write_or_print(out, a.out.as_deref(), &report::eval_table(&reports))
        }
        Command::Sweep(a) => {
            let g = ctx.gallery(&a.gallery)?;
            let probes = read(&a.probes)?.probes(ctx.cfg.normalize_on_ingest)?;
            let mut grid = SweepGrid::new(
                parse_list("radii", &a.radii)?,
                parse_list("bandwidths", &a.bandwidths)?,
                parse_list("pruning_ratios", &a.pruning_ratios)?,
                ctx.fpirs(a.fpirs.as_deref())?,
            );
            grid.margin_ratio = a.margin_ratio;
            let results = run_sweep(&g, &probes, &grid)?;
            write_or_print(out, a.out.as_deref(), &report::sweep_table(&results))
        }
    }
}

fn load_condensed(ctx: &Ctx, path: &Path, method: Provenance) -> Result<CondensedGallery, CliError> {
    let data = read(path)?;
    if data.has_role(Role::Sample) {
        Ok(data.condensed(method)?)
    } else {
        Ok(CondensedGallery::raw(&data.gallery(ctx.cfg.normalize_on_ingest)?))
    }
}

fn size_line(out: &mut dyn Write, g: &Gallery, c: &CondensedGallery) -> Result<(), CliError> {
    writeln!(
        out,
        "identities={} input_vectors={} samples={} avg_gallery_size={:.4}",
        g.num_identities(),
        g.num_vectors(),
        c.num_samples(),
        c.avg_gallery_size()
    )?;
    Ok(())
}

fn synth(ctx: &Ctx, a: SynthArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = SynthConfig {
        num_identities: a.num_identities,
        dim: a.dim,
        vectors_per_identity: (a.vectors_min, a.vectors_max),
        cluster_spread: a.spread,
        mislabel_rate: a.mislabel_rate,
        noise_rate: a.noise_rate,
        mates_per_identity: a.mates_per_identity,
        num_nonmate_identities: a.nonmate_identities,
        seed: a.seed.unwrap_or(ctx.cfg.seed),
    };
    let data = generate(&cfg)?;
    write_dataset(&a.gallery_out, &Dataset::from_gallery(&data.gallery), a.format)?;
    write_dataset(&a.probes_out, &Dataset::from_probes(&data.probes), a.format)?;
    if let Some(path) = &a.truth_out {
        let mut text = String::new();
        for (id, kinds) in &data.truth.kinds {
            for (i, k) in kinds.iter().enumerate() {
                text.push_str(&format!("{id},{i},{k:?}\n").to_lowercase());
            }
        }
        fs::write(path, text)?;
    }
    writeln!(
        out,
        "identities={} gallery_vectors={} outliers={} mates={} nonmates={} seed={}",
        data.gallery.num_identities(),
        data.gallery.num_vectors(),
        data.truth.num_outliers(),
        data.probes.mates.len(),
        data.probes.nonmates.len(),
        cfg.seed
    )?;
    Ok(())
}

fn split(ctx: &Ctx, a: SplitArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = ctx.gallery(&a.dataset)?;
    let fractions = SplitFractions { mate_identities: a.mate_fraction, gallery_images: a.gallery_fraction };
    let seed = a.seed.unwrap_or(ctx.cfg.seed);
    fs::create_dir_all(&a.out_dir)?;
    let ext = match a.format {
        Format::Binary => "gsmp",
        Format::Text => "txt",
    };
    for (i, s) in split_k(&g, fractions, seed, a.splits)?.iter().enumerate() {
        write_dataset(a.out_dir.join(format!("split{i}_gallery.{ext}")), &Dataset::from_gallery(&s.gallery), a.format)?;
        write_dataset(a.out_dir.join(format!("split{i}_probes.{ext}")), &Dataset::from_probes(&s.probes), a.format)?;
        writeln!(
            out,
            "split={i} gallery_identities={} gallery_vectors={} mates={} nonmates={}",
            s.gallery.num_identities(),
            s.gallery.num_vectors(),
            s.probes.mates.len(),
            s.probes.nonmates.len()
        )?;
        for id in &s.single_image_identities {
            writeln!(out, "warning: split={i} identity {id} has a single image; kept in gallery without mate probes")?;
        }
    }
    Ok(())
}
