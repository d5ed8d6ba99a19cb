use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sdpa::denoise::{registry, DenoiserSpec};
use sdpa::ensemble::{decision_rows, decisions_header, patch_ensemble, voting_ensemble, EnsembleConfig};
use sdpa::fusion::{fuse_volume, Align, FusionConfig};
use sdpa::io::{load_image, load_volume_named, numbered_names, save_image, save_volume, slice_files};
use sdpa::metrics::MetricWeights;
use sdpa::n2n::{make_plan, n2n_loss, N2nConfig};
use sdpa::pipeline::{self, PipelineConfig, Reference};
use sdpa::postprocess::color_scale;
use sdpa::sim::{make_noisy_volume, SimConfig};

#[derive(Parser)]
#[command(
    name = "sdpa",
    version,
    about = "Self-supervised OCT denoising with patch-ensemble fusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic phantom (clean.png) and speckled slices (noisy/NNN.png).
    Simulate(SimulateArgs),
    /// Fuse every slice of a volume with its neighbours.
    Selffuse(SelffuseArgs),
    /// Evaluate the Neighbor2Neighbor loss of a denoiser on one image.
    #[command(name = "n2n-loss")]
    N2nLoss(N2nArgs),
    /// Combine candidate images with the patch ensemble (or the voting baseline).
    Ensemble(EnsembleArgs),
    /// Min-max stretch an image or every image of a directory.
    Colorscale(ColorscaleArgs),
    /// Apply one denoiser to an image.
    Denoise(DenoiseArgs),
    /// List registered denoisers and their parameters.
    Denoisers,
    /// Write the metrics CSV of a result volume against its noisy input.
    Report(ReportArgs),
    /// Run the full two-phase pipeline.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 128)]
    w: usize,
    #[arg(long, default_value_t = 128)]
    h: usize,
    #[arg(long, default_value_t = 20)]
    slices: usize,
    #[arg(long, default_value_t = 4)]
    looks: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    sigma_add: f64,
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlignArg {
    None,
    Shift,
}

#[derive(Args)]
struct SelffuseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 3)]
    radius: usize,
    #[arg(long, default_value_t = 7)]
    patch: usize,
    #[arg(long, default_value_t = FusionConfig::default().h)]
    h: f64,
    #[arg(long, value_enum, default_value_t = AlignArg::None)]
    align: AlignArg,
    #[arg(long, default_value_t = 8)]
    max_shift: usize,
    /// Leave the centre slice out of its own fusion.
    #[arg(long)]
    exclude_center: bool,
}

#[derive(Args)]
struct N2nArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "identity")]
    denoiser: DenoiserSpec,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleMethod {
    Patch,
    Voting,
}

#[derive(Args)]
struct EnsembleArgs {
    #[arg(long)]
    noisy: PathBuf,
    #[arg(long = "cand", required = true, num_args = 1..)]
    candidates: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = EnsembleMethod::Patch)]
    method: EnsembleMethod,
    #[arg(long, default_value_t = 16)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    stride: usize,
    #[arg(long, default_value_t = 3.0)]
    w_cnr: f64,
    #[arg(long, default_value_t = 2.0)]
    w_msr: f64,
    #[arg(long, default_value_t = 5.0)]
    w_tp: f64,
    #[arg(long, default_value_t = 0.0)]
    w_ep: f64,
    #[arg(long)]
    decisions: Option<PathBuf>,
}

#[derive(Args)]
struct ColorscaleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DenoiseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    denoiser: DenoiserSpec,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    noisy: PathBuf,
    #[arg(long)]
    result: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReferenceArg {
    Noisy,
    Pseudo,
}

#[derive(Args)]
struct PipelineArgs {
    /// TOML config file, or a manifest.toml from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ensemble denoiser, repeatable; replaces the configured list.
    #[arg(long = "denoiser")]
    denoisers: Vec<DenoiserSpec>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    split: Option<f64>,
    #[arg(long)]
    fold: Option<u8>,
    #[arg(long, value_enum)]
    reference: Option<ReferenceArg>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Resize every slice, e.g. `256x256`.
    #[arg(long, value_parser = parse_dims)]
    resize: Option<[usize; 2]>,
    #[arg(long)]
    no_intermediates: bool,
}

fn parse_dims(s: &str) -> std::result::Result<[usize; 2], String> {
    let (w, h) = s.split_once('x').ok_or("expected WIDTHxHEIGHT")?;
    Ok([
        w.parse().map_err(|_| format!("bad width '{w}'"))?,
        h.parse().map_err(|_| format!("bad height '{h}'"))?,
    ])
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let cfg = SimConfig {
        looks: a.looks,
        sigma_add: a.sigma_add,
        seed: a.seed,
        slices: a.slices,
        jitter: a.jitter,
    };
    let (clean, vol) = make_noisy_volume(&cfg, a.w, a.h)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    save_image(&clean, a.out.join("clean.png"))?;
    save_volume(&vol, a.out.join("noisy"), &numbered_names(vol.len(), "png"))?;
    println!(
        "wrote {} slices of {}x{} to {}",
        vol.len(),
        a.w,
        a.h,
        a.out.join("noisy").display()
    );
    Ok(())
}

fn selffuse(a: SelffuseArgs) -> Result<()> {
    let cfg = FusionConfig {
        radius: a.radius,
        patch: a.patch,
        h: a.h,
        include_center: !a.exclude_center,
        align: match a.align {
            AlignArg::None => Align::None,
            AlignArg::Shift => Align::Shift,
        },
        max_shift: a.max_shift,
    };
    let (vol, names) = load_volume_named(&a.input)?;
    let fused = fuse_volume(&vol, &cfg)?;
    save_volume(&fused, &a.out, &names)?;
    println!("fused {} slices into {}", fused.len(), a.out.display());
    Ok(())
}

fn n2n(a: N2nArgs) -> Result<()> {
    let img = load_image(&a.input)?;
    let plan = make_plan(img.width(), img.height(), a.seed)?;
    let cfg = N2nConfig {
        gamma: a.gamma,
        seed: a.seed,
    };
    let loss = n2n_loss(&a.denoiser, &img, &cfg, &plan)?;
    println!("rec={:.9}", loss.rec);
    println!("reg={:.9}", loss.reg);
    println!("total={:.9}", loss.total);
    Ok(())
}

fn ensemble(a: EnsembleArgs) -> Result<()> {
    let noisy = load_image(&a.noisy)?;
    let candidates = a.candidates.iter().map(load_image).collect::<sdpa::Result<Vec<_>>>()?;
    let out = match a.method {
        EnsembleMethod::Voting => voting_ensemble(&candidates)?,
        EnsembleMethod::Patch => {
            let cfg = EnsembleConfig {
                k: a.k,
                stride: a.stride,
                weights: MetricWeights::new(a.w_cnr, a.w_msr, a.w_tp, a.w_ep)?,
                ..Default::default()
            };
            let (out, decisions) = patch_ensemble(&candidates, &noisy, &cfg)?;
            if let Some(path) = &a.decisions {
                let mut text = decisions_header(candidates.len());
                text.push('\n');
                for row in decision_rows(0, &decisions) {
                    text.push_str(&row);
                    text.push('\n');
                }
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            let mut wins = vec![0usize; candidates.len()];
            decisions.iter().for_each(|d| wins[d.winner] += 1);
            println!("patches won per candidate: {wins:?}");
            out
        }
    };
    save_image(&out, &a.out)?;
    Ok(())
}

fn colorscale_file(input: &Path, out: &Path) -> Result<()> {
    let (img, rep) = color_scale(&load_image(input)?);
    save_image(&img, out)?;
    println!(
        "{}: min={:.6} max={:.6} applied={}",
        input.display(),
        rep.in_min,
        rep.in_max,
        rep.applied
    );
    Ok(())
}

fn colorscale(a: ColorscaleArgs) -> Result<()> {
    if a.input.is_dir() {
        fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
        for f in slice_files(&a.input)? {
            colorscale_file(&f, &a.out.join(f.file_name().unwrap()))?;
        }
        Ok(())
    } else {
        colorscale_file(&a.input, &a.out)
    }
}

fn report(a: ReportArgs) -> Result<()> {
    let (noisy, _) = load_volume_named(&a.noisy)?;
    let (result, _) = load_volume_named(&a.result)?;
    pipeline::report(&noisy, &result, &MetricWeights::default(), &a.out)?;
    Ok(())
}

fn run_pipeline(a: PipelineArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => PipelineConfig::load(p)?,
        None => {
            if a.input.is_none() || a.out.is_none() {
                bail!("pipeline needs --config or both --in and --out");
            }
            PipelineConfig::default()
        }
    };
    if let Some(p) = a.input {
        cfg.input_dir = p;
    }
    if let Some(p) = a.out {
        cfg.output_dir = p;
    }
    if !a.denoisers.is_empty() {
        cfg.denoisers = a.denoisers;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.split.is_some() {
        cfg.split = a.split;
    }
    if a.fold.is_some() {
        cfg.fold = a.fold;
    }
    if let Some(r) = a.reference {
        cfg.reference = match r {
            ReferenceArg::Noisy => Reference::Noisy,
            ReferenceArg::Pseudo => Reference::Pseudo,
        };
    }
    if let Some(k) = a.k {
        cfg.ensemble.k = k;
    }
    if let Some(s) = a.stride {
        cfg.ensemble.stride = s;
    }
    if let Some(r) = a.radius {
        cfg.fusion.radius = r;
    }
    if let Some(h) = a.h {
        cfg.fusion.h = h;
    }
    if let Some(g) = a.gamma {
        cfg.n2n.gamma = g;
    }
    if a.resize.is_some() {
        cfg.resize = a.resize;
    }
    if a.no_intermediates {
        cfg.emit_intermediates = false;
    }
    let manifest = pipeline::run(&cfg)?;
    for s in &manifest.subjects {
        println!(
            "{}: {} slices, pseudo-clean denoiser {}",
            s.subject_id, s.slices, s.chosen_denoiser
        );
    }
    println!(
        "wrote {} files and {}",
        manifest.outputs.len(),
        cfg.output_dir.join(pipeline::MANIFEST_NAME).display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Selffuse(a) => selffuse(a),
        Command::N2nLoss(a) => n2n(a),
        Command::Ensemble(a) => ensemble(a),
        Command::Colorscale(a) => colorscale(a),
        Command::Denoise(a) => {
            let img = load_image(&a.input).map_err(anyhow::Error::from);
            img.and_then(|img| Ok(save_image(&a.denoiser.apply(&img)?, &a.out)?))
        }
        Command::Denoisers => {
            for d in registry() {
                let params: Vec<String> = d
                    .params
                    .iter()
                    .map(|p| format!("{}={} ({})", p.key, p.default, p.help))
                    .collect();
                println!("{}\t{}", d.name, params.join("; "));
            }
            Ok(())
        }
        Command::Report(a) => report(a),
        Command::Pipeline(a) => run_pipeline(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
