//! Two-phase orchestration: self-fusion and pseudo-clean selection, then
//! multi-denoiser patch ensemble, color scaling and a metrics report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::denoise::DenoiserSpec;
use crate::ensemble::{decision_rows, decisions_header, patch_ensemble, EnsembleConfig, PatchDecision};
use crate::error::{Error, Result};
use crate::fusion::{fuse_volume, FusionConfig};
use crate::image::{resize_to, Image, Volume};
use crate::io::{load_volume_named, save_volume, slice_files};
use crate::metrics::{auto_roi_or_regions, csv_value, MetricReport, MetricWeights};
use crate::n2n::{make_plan, n2n_loss, N2nConfig};
use crate::par::try_map;
use crate::postprocess::color_scale;

/// Which image the ensemble scores candidates against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    /// The raw B-scan.
    #[default]
    Noisy,
    /// The phase-1 pseudo-clean image.
    Pseudo,
}

impl Reference {
    pub fn as_str(&self) -> &'static str {
        match self {
            Reference::Noisy => "noisy",
            Reference::Pseudo => "pseudo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub emit_intermediates: bool,
    /// Denoisers whose outputs enter the patch ensemble.
    pub denoisers: Vec<DenoiserSpec>,
    /// Grid searched for the pseudo-clean denoiser by mean neighbour loss.
    pub pseudo_candidates: Vec<DenoiserSpec>,
    pub reference: Reference,
    /// Resize every slice to `[width, height]` on load.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resize: Option<[usize; 2]>,
    /// Fraction of subjects in the training part of the split.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fold: Option<u8>,
    pub fusion: FusionConfig,
    pub n2n: N2nConfig,
    pub ensemble: EnsembleConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input_dir: PathBuf::from("input"),
            output_dir: PathBuf::from("output"),
            seed: 0,
            emit_intermediates: true,
            denoisers: vec![DenoiserSpec::median(3).unwrap(), DenoiserSpec::gaussian(1.0).unwrap()],
            pseudo_candidates: default_pseudo_grid(),
            reference: Reference::Noisy,
            resize: None,
            split: None,
            fold: None,
            fusion: FusionConfig::default(),
            n2n: N2nConfig::default(),
            ensemble: EnsembleConfig::default(),
        }
    }
}

pub fn default_pseudo_grid() -> Vec<DenoiserSpec> {
    let mut grid = vec![DenoiserSpec::identity()];
    grid.extend([0.5, 1.0, 1.5, 2.0].map(|s| DenoiserSpec::gaussian(s).unwrap()));
    grid.extend([3, 5].map(|w| DenoiserSpec::median(w).unwrap()));
    grid
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.denoisers.is_empty() {
            return Err(Error::Config("at least one denoiser is required".into()));
        }
        if self.pseudo_candidates.is_empty() {
            return Err(Error::Config("at least one pseudo-clean candidate is required".into()));
        }
        if self.input_dir == self.output_dir {
            return Err(Error::Config("input and output directories must differ".into()));
        }
        if let Some(s) = self.split {
            if !(s > 0.0 && s < 1.0) {
                return Err(Error::Config(format!("split must be in (0, 1), got {s}")));
            }
        }
        match (self.split, self.fold) {
            (_, Some(f)) if f != 1 && f != 2 => return Err(Error::Config(format!("fold must be 1 or 2, got {f}"))),
            (None, Some(_)) => return Err(Error::Config("fold requires split".into())),
            _ => {}
        }
        if let Some([w, h]) = self.resize {
            if w == 0 || h == 0 {
                return Err(Error::Config("resize dimensions must be positive".into()));
            }
        }
        self.fusion.validate()?;
        self.ensemble.validate()?;
        if self.n2n.gamma.is_nan() || self.n2n.gamma < 0.0 {
            return Err(Error::Config("gamma must be non-negative".into()));
        }
        Ok(())
    }

    /// Parses a config file, or the `[config]` table of a run manifest.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let value = match table.remove("config") {
            Some(toml::Value::Table(t)) => toml::Value::Table(t),
            _ => toml::Value::Table(table),
        };
        value
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Outcome of phase 1 for one volume.
#[derive(Debug, Clone)]
pub struct Phase1 {
    pub fused: Volume,
    pub pseudo: Volume,
    pub chosen: DenoiserSpec,
    /// Mean loss of every candidate, in configuration order.
    pub losses: Vec<(DenoiserSpec, f64)>,
}

fn plan_seed(base: u64, n2n_seed: u64, slice: usize) -> u64 {
    let mut z = base ^ n2n_seed.rotate_left(32) ^ (slice as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fuses every slice, picks the candidate with the lowest mean neighbour loss
/// over the fused volume and applies it to produce the pseudo-clean volume.
pub fn run_phase1(vol: &Volume, cfg: &PipelineConfig) -> Result<Phase1> {
    let fused = fuse_volume(vol, &cfg.fusion).map_err(|e| e.in_stage("self-fusion"))?;
    let (w, h) = fused.dims();
    let indices: Vec<usize> = (0..fused.len()).collect();
    let plans =
        try_map(&indices, |&i| make_plan(w, h, plan_seed(cfg.seed, cfg.n2n.seed, i))).map_err(|e| e.in_stage("n2n"))?;
    let mut losses = Vec::with_capacity(cfg.pseudo_candidates.len());
    for cand in &cfg.pseudo_candidates {
        let per_slice = try_map(&indices, |&i| {
            n2n_loss(cand, &fused.slices()[i], &cfg.n2n, &plans[i]).map(|l| l.total)
        })
        .map_err(|e| e.in_stage("n2n"))?;
        losses.push((cand.clone(), per_slice.iter().sum::<f64>() / per_slice.len() as f64));
    }
    let mut best = 0;
    for (i, (_, l)) in losses.iter().enumerate() {
        if *l < losses[best].1 {
            best = i;
        }
    }
    let chosen = losses[best].0.clone();
    let pseudo = try_map(fused.slices(), |s| chosen.apply(s)).map_err(|e| e.in_stage("pseudo-clean"))?;
    Ok(Phase1 {
        pseudo: Volume::new(vol.subject_id(), pseudo)?,
        fused,
        chosen,
        losses,
    })
}

#[derive(Debug, Clone)]
pub struct Phase2 {
    pub output: Volume,
    /// Patch decisions per slice.
    pub decisions: Vec<Vec<PatchDecision>>,
}

/// Applies every configured denoiser to each raw slice, fuses the candidates
/// with the patch ensemble and color-scales the result.
pub fn run_phase2(vol: &Volume, pseudo: &Volume, cfg: &PipelineConfig) -> Result<Phase2> {
    if vol.len() != pseudo.len() || vol.dims() != pseudo.dims() {
        return Err(Error::Shape(format!(
            "noisy volume has {} slices of {:?}, pseudo-clean has {} of {:?}",
            vol.len(),
            vol.dims(),
            pseudo.len(),
            pseudo.dims()
        ))
        .in_stage("ensemble"));
    }
    let indices: Vec<usize> = (0..vol.len()).collect();
    let results = try_map(&indices, |&i| {
        let noisy = &vol.slices()[i];
        let candidates = cfg
            .denoisers
            .iter()
            .map(|d| d.apply(noisy))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.in_stage("denoise"))?;
        let reference = match cfg.reference {
            Reference::Noisy => noisy,
            Reference::Pseudo => &pseudo.slices()[i],
        };
        let (fused, decisions) =
            patch_ensemble(&candidates, reference, &cfg.ensemble).map_err(|e| e.in_stage("ensemble"))?;
        Ok((color_scale(&fused).0, decisions))
    })?;
    let (slices, decisions): (Vec<Image>, Vec<_>) = results.into_iter().unzip();
    Ok(Phase2 {
        output: Volume::new(vol.subject_id(), slices)?,
        decisions,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub subject_id: String,
    /// `None` for the mean row.
    pub slice_index: Option<usize>,
    pub method: String,
    pub report: MetricReport,
    pub composite: Option<f64>,
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Per-slice metrics of `result` against `noisy` (ROIs from the noisy slice),
/// followed by a mean row over the defined values.
pub fn report_rows(noisy: &Volume, result: &Volume, method: &str, weights: &MetricWeights) -> Result<Vec<ReportRow>> {
    if noisy.len() != result.len() || noisy.dims() != result.dims() {
        return Err(Error::Shape("noisy and result volumes differ in size".into()));
    }
    let mut rows = Vec::with_capacity(noisy.len() + 1);
    for (i, (n, r)) in noisy.slices().iter().zip(result.slices()).enumerate() {
        let roi = auto_roi_or_regions(n);
        let report = MetricReport::evaluate(r, n, &roi)?;
        rows.push(ReportRow {
            subject_id: noisy.subject_id().to_string(),
            slice_index: Some(i),
            method: method.to_string(),
            composite: Some(report.composite(weights)),
            report,
        });
    }
    let mean = ReportRow {
        subject_id: noisy.subject_id().to_string(),
        slice_index: None,
        method: method.to_string(),
        report: MetricReport {
            cnr: mean_defined(rows.iter().map(|r| r.report.cnr)),
            msr: mean_defined(rows.iter().map(|r| r.report.msr)),
            tp: mean_defined(rows.iter().map(|r| r.report.tp)),
            ep: mean_defined(rows.iter().map(|r| r.report.ep)),
        },
        composite: mean_defined(rows.iter().map(|r| r.composite)),
    };
    rows.push(mean);
    Ok(rows)
}

pub const REPORT_HEADER: &str = "subject_id,slice_index,method,cnr,msr,tp,ep,composite";

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        let slice = r.slice_index.map_or("mean".to_string(), |i| i.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.subject_id,
            slice,
            r.method,
            csv_value(r.report.cnr),
            csv_value(r.report.msr),
            csv_value(r.report.tp),
            csv_value(r.report.ep),
            csv_value(r.composite)
        );
    }
    out
}

/// Writes the metrics CSV for one volume.
pub fn report(noisy: &Volume, result: &Volume, weights: &MetricWeights, out: impl AsRef<Path>) -> Result<()> {
    let rows = report_rows(noisy, result, "patch_ensemble", weights)?;
    write_file(out.as_ref(), report_csv(&rows).as_bytes())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::Write {
            path: parent.to_path_buf(),
            reason: e.to_string(),
        })?;
    }
    fs::write(path, bytes).map_err(|e| Error::Write {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Fraction in `[0, 1)` derived from the SHA-256 of a subject id.
pub fn subject_bucket(subject_id: &str) -> f64 {
    let digest = Sha256::digest(subject_id.as_bytes());
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    (u64::from_be_bytes(head) >> 11) as f64 / (1u64 << 53) as f64
}

/// Subjects evaluated in a fold: fold 1 keeps buckets `>= split`, fold 2 keeps
/// buckets `< 1 - split`; without a split every subject is kept.
pub fn select_subjects(ids: &[String], split: Option<f64>, fold: Option<u8>) -> Vec<String> {
    ids.iter()
        .filter(|id| match (split, fold) {
            (Some(s), Some(2)) => subject_bucket(id) < 1.0 - s,
            (Some(s), _) => subject_bucket(id) >= s,
            _ => true,
        })
        .cloned()
        .collect()
}

/// Subject volumes under `input`: the directory itself when it holds slices,
/// otherwise each sub-directory that does, sorted by name.
pub fn discover_subjects(input: &Path) -> Result<Vec<PathBuf>> {
    if !slice_files(input)?.is_empty() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut dirs: Vec<PathBuf> = fs::read_dir(input)
        .map_err(|e| Error::Volume(format!("cannot read {}: {e}", input.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    let mut subjects = Vec::new();
    for d in dirs {
        if !slice_files(&d)?.is_empty() {
            subjects.push(d);
        }
    }
    if subjects.is_empty() {
        return Err(Error::Volume(format!("no volumes found under {}", input.display())));
    }
    Ok(subjects)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectRecord {
    pub subject_id: String,
    pub slices: usize,
    pub chosen_denoiser: DenoiserSpec,
    pub reference: Reference,
    pub pseudo_losses: Vec<(String, f64)>,
}

/// Everything needed to reproduce and audit a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: PipelineConfig,
    pub subjects: Vec<SubjectRecord>,
    pub outputs: Vec<FileHash>,
}

impl Manifest {
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

pub const MANIFEST_NAME: &str = "manifest.toml";
pub const METRICS_NAME: &str = "metrics.csv";

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Runs both phases on every selected subject and writes results, decisions,
/// metrics and the manifest under `cfg.output_dir`.
pub fn run(cfg: &PipelineConfig) -> Result<Manifest> {
    cfg.validate()?;
    let subject_dirs = discover_subjects(&cfg.input_dir).map_err(|e| e.in_stage("load"))?;
    let ids: Vec<String> = subject_dirs
        .iter()
        .map(|d| {
            d.file_name()
                .map_or("subject".into(), |n| n.to_string_lossy().into_owned())
        })
        .collect();
    let keep = select_subjects(&ids, cfg.split, cfg.fold);
    let out = &cfg.output_dir;
    let mut written: Vec<PathBuf> = Vec::new();
    let mut subjects = Vec::new();
    let mut csv_rows = Vec::new();

    for dir in subject_dirs
        .iter()
        .zip(&ids)
        .filter(|(_, id)| keep.contains(id))
        .map(|(d, _)| d)
    {
        let (vol, names) = load_volume_named(dir).map_err(|e| e.in_stage("load"))?;
        let vol = match cfg.resize {
            Some([w, h]) => Volume::new(
                vol.subject_id(),
                vol.slices()
                    .iter()
                    .map(|s| resize_to(s, w, h))
                    .collect::<Result<_>>()
                    .map_err(|e| e.in_stage("resize"))?,
            )?,
            None => vol,
        };
        let subject_out = out.join(vol.subject_id());
        let p1 = run_phase1(&vol, cfg)?;
        let p2 = run_phase2(&vol, &p1.pseudo, cfg)?;

        if cfg.emit_intermediates {
            written.extend(save_volume(&p1.fused, subject_out.join("fused"), &names).map_err(|e| e.in_stage("write"))?);
            written
                .extend(save_volume(&p1.pseudo, subject_out.join("pseudo"), &names).map_err(|e| e.in_stage("write"))?);
        }
        written.extend(save_volume(&p2.output, subject_out.join("result"), &names).map_err(|e| e.in_stage("write"))?);

        let mut audit = decisions_header(cfg.denoisers.len());
        audit.push('\n');
        for (i, d) in p2.decisions.iter().enumerate() {
            for row in decision_rows(i, d) {
                audit.push_str(&row);
                audit.push('\n');
            }
        }
        let audit_path = subject_out.join("decisions.csv");
        write_file(&audit_path, audit.as_bytes()).map_err(|e| e.in_stage("write"))?;
        written.push(audit_path);

        csv_rows.extend(
            report_rows(&vol, &p2.output, "patch_ensemble", &cfg.ensemble.weights).map_err(|e| e.in_stage("report"))?,
        );
        subjects.push(SubjectRecord {
            subject_id: vol.subject_id().to_string(),
            slices: vol.len(),
            chosen_denoiser: p1.chosen.clone(),
            reference: cfg.reference,
            pseudo_losses: p1.losses.iter().map(|(d, l)| (d.to_string(), *l)).collect(),
        });
    }
    if subjects.is_empty() {
        return Err(Error::Config("split/fold selected no subjects".into()).in_stage("load"));
    }

    let metrics_path = out.join(METRICS_NAME);
    write_file(&metrics_path, report_csv(&csv_rows).as_bytes()).map_err(|e| e.in_stage("report"))?;
    written.push(metrics_path);

    let mut outputs = Vec::with_capacity(written.len());
    for p in &written {
        let bytes = fs::read(p).map_err(|e| Error::Write {
            path: p.clone(),
            reason: e.to_string(),
        })?;
        let rel = p.strip_prefix(out).unwrap_or(p);
        outputs.push(FileHash {
            path: rel.to_string_lossy().replace('\\', "/"),
            sha256: sha256_hex(&bytes),
        });
    }
    let manifest = Manifest {
        config: cfg.clone(),
        subjects,
        outputs,
    };
    write_file(&out.join(MANIFEST_NAME), manifest.to_toml_string()?.as_bytes()).map_err(|e| e.in_stage("manifest"))?;
    Ok(manifest)
}

/// Recomputes every output hash recorded in `manifest` against files under `dir`;
/// returns the paths that are missing or differ.
pub fn verify_outputs(manifest: &Manifest, dir: impl AsRef<Path>) -> Vec<String> {
    let dir = dir.as_ref();
    manifest
        .outputs
        .iter()
        .filter(|f| match fs::read(dir.join(&f.path)) {
            Ok(bytes) => sha256_hex(&bytes) != f.sha256,
            Err(_) => true,
        })
        .map(|f| f.path.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{make_noisy_volume, SimConfig};

    fn sim(slices: usize, size: usize) -> (Image, Volume) {
        make_noisy_volume(
            &SimConfig {
                slices,
                ..Default::default()
            },
            size,
            size,
        )
        .unwrap()
    }

    #[test]
    fn identity_grid_keeps_fused() {
        let (_, vol) = sim(4, 32);
        let cfg = PipelineConfig {
            pseudo_candidates: vec![DenoiserSpec::identity()],
            ..Default::default()
        };
        let p1 = run_phase1(&vol, &cfg).unwrap();
        assert_eq!(p1.chosen, DenoiserSpec::identity());
        assert_eq!(p1.pseudo, p1.fused);
    }

    #[test]
    fn constant_volume_gives_constant_pseudo() {
        let vol = Volume::new("c", vec![Image::filled(16, 16, 0.4); 3]).unwrap();
        let p1 = run_phase1(&vol, &PipelineConfig::default()).unwrap();
        for s in p1.pseudo.slices() {
            let (lo, hi) = s.min_max();
            assert!((hi - lo) < 1e-12);
        }
    }

    #[test]
    fn pseudo_clean_beats_raw_on_median_slice() {
        let (clean, vol) = sim(7, 64);
        let p1 = run_phase1(&vol, &PipelineConfig::default()).unwrap();
        let mut gains: Vec<f64> = vol
            .slices()
            .iter()
            .zip(p1.pseudo.slices())
            .map(|(b, c)| b.mse(&clean).unwrap() - c.mse(&clean).unwrap())
            .collect();
        gains.sort_by(f64::total_cmp);
        assert!(gains[gains.len() / 2] >= 0.0);
    }

    #[test]
    fn identity_ensemble_is_color_scaled_input() {
        let (_, vol) = sim(3, 32);
        let cfg = PipelineConfig {
            denoisers: vec![DenoiserSpec::identity()],
            ..Default::default()
        };
        let p2 = run_phase2(&vol, &vol, &cfg).unwrap();
        for (o, b) in p2.output.slices().iter().zip(vol.slices()) {
            assert_eq!(o, &color_scale(b).0);
        }
        let same = PipelineConfig {
            denoisers: vec![DenoiserSpec::median(3).unwrap(); 2],
            ..Default::default()
        };
        let p2 = run_phase2(&vol, &vol, &same).unwrap();
        for (o, b) in p2.output.slices().iter().zip(vol.slices()) {
            assert_eq!(o, &color_scale(&DenoiserSpec::median(3).unwrap().apply(b).unwrap()).0);
        }
    }

    #[test]
    fn report_identity_rows() {
        let (_, vol) = sim(3, 32);
        let rows = report_rows(&vol, &vol, "identity", &MetricWeights::default()).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows[..3] {
            assert!((r.report.tp.unwrap() - 1.0).abs() < 1e-12);
            assert!((r.report.ep.unwrap() - 1.0).abs() < 1e-12);
        }
        let mean_cnr = rows[..3].iter().map(|r| r.report.cnr.unwrap()).sum::<f64>() / 3.0;
        assert!((rows[3].report.cnr.unwrap() - mean_cnr).abs() < 1e-12);
        let csv = report_csv(&rows);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().last().unwrap().starts_with("sim-42,mean,identity,"));
    }

    #[test]
    fn mean_row_skips_undefined() {
        assert_eq!(mean_defined([Some(1.0), None, Some(3.0)].into_iter()), Some(2.0));
        assert_eq!(mean_defined([None, None].into_iter()), None);
        let flat = Volume::new("f", vec![Image::filled(8, 8, 0.5); 2]).unwrap();
        let rows = report_rows(&flat, &flat, "x", &MetricWeights::default()).unwrap();
        assert!(report_csv(&rows)
            .lines()
            .nth(1)
            .unwrap()
            .ends_with("NA,NA,NA,NA,0.000000"));
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = PipelineConfig {
            split: Some(0.9),
            fold: Some(2),
            resize: Some([256, 256]),
            ..Default::default()
        };
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(PipelineConfig::from_toml_str(&text).unwrap(), cfg);
        let partial = PipelineConfig::from_toml_str(
            "input_dir = \"a\"\noutput_dir = \"b\"\ndenoisers = [\"median:window=5\"]\n[ensemble]\nk = 8\n",
        )
        .unwrap();
        assert_eq!(partial.ensemble.k, 8);
        assert_eq!(partial.ensemble.stride, 4);
        assert_eq!(partial.denoisers, vec![DenoiserSpec::median(5).unwrap()]);
        assert!(PipelineConfig::from_toml_str("denoisers = [\"bogus\"]").is_err());
    }

    #[test]
    fn config_validation() {
        let same = PipelineConfig {
            input_dir: "x".into(),
            output_dir: "x".into(),
            ..Default::default()
        };
        assert!(same.validate().is_err());
        assert!(PipelineConfig {
            denoisers: vec![],
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(PipelineConfig {
            fold: Some(1),
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(PipelineConfig {
            split: Some(0.9),
            fold: Some(3),
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn split_partitions_deterministically() {
        let ids: Vec<String> = (0..200).map(|i| format!("subject-{i:03}")).collect();
        let f1 = select_subjects(&ids, Some(0.9), Some(1));
        let f2 = select_subjects(&ids, Some(0.9), Some(2));
        assert_eq!(f1, select_subjects(&ids, Some(0.9), Some(1)));
        assert!(f1.iter().all(|id| !f2.contains(id)));
        assert!(
            (5..=40).contains(&f1.len()) && (5..=40).contains(&f2.len()),
            "{} {}",
            f1.len(),
            f2.len()
        );
        assert_eq!(select_subjects(&ids, None, None).len(), 200);
    }
}
