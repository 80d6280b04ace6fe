//! Reproducible command runs: `simulate`, `reconstruct`, `verify-lemmas` and
//! `compare-phase-space`.
//!
//! Every run is described by a [`RunConfig`], settable from flags or a JSON
//! file, and copied into the output directory. Exit status is 0 on success,
//! 2 on validation errors and 3 on numerical-certification failures; errors
//! are printed to stderr as one JSON object.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::fock::{DensityMatrix, ExactDensityFile, FockConfig, QuadratureDistribution, DEFAULT_QUAD_TOL};
use crate::linalg::max_entry_diff;
use crate::phase_space::{
    husimi, radon_projections, wigner_direct, wigner_inverse_radon, PhaseSpaceGrid, RadonConfig,
    RadonFilter,
};
use crate::sim::{exact_distributions, make_state, make_state_projected, sample_angles, SampleBatch, StateKind, StateSpec,
    TRUNCATED_TRACE_TOL,
};
use crate::tomography::{reconstruct_with, AngleGrid, QuadratureData, ReconstructOptions, MIN_SAMPLES};
use crate::verify::{run_all, VerifyConfig, VerifyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Reconstruct,
    VerifyLemmas,
    ComparePhaseSpace,
}

mod state_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(kind: &StateKind, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&kind.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<StateKind, D::Error> {
        let text = String::deserialize(d)?;
        StateKind::from_str(&text).map_err(serde::de::Error::custom)
    }
}

/// Numerical thresholds that may be overridden per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Gauss–Hermite order-doubling tolerance.
    pub quad_tol: f64,
    /// Sample batches below this size are flagged.
    pub min_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_tol: DEFAULT_QUAD_TOL,
            min_samples: MIN_SAMPLES,
        }
    }
}

/// Back-projection settings for `compare-phase-space`; the angle count comes
/// from [`RunConfig::angles`] (default 64).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadonSettings {
    pub filter: RadonFilter,
    pub cutoff: f64,
    pub bins: usize,
    /// Defaults to `√(2·dim) + 4`.
    pub half_width: Option<f64>,
    pub grid_points: usize,
}

impl Default for RadonSettings {
    fn default() -> Self {
        Self {
            filter: RadonFilter::default(),
            cutoff: 1.0,
            bins: 256,
            half_width: None,
            grid_points: 129,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: Command,
    #[serde(with = "state_string")]
    pub state: StateKind,
    pub dim: usize,
    /// Angle count; defaults to the smallest exact grid for `simulate` and 64
    /// for `compare-phase-space`.
    pub angles: Option<usize>,
    pub samples: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Data directory for `reconstruct`.
    pub input: Option<PathBuf>,
    /// Ground-truth density matrix; `reconstruct` also looks for `truth.json` in the input.
    pub truth: Option<PathBuf>,
    /// `simulate` writes exact densities instead of samples.
    pub exact: bool,
    /// Renormalize the truncated state instead of rejecting edge mass.
    pub projected: bool,
    pub gh_order: usize,
    pub tolerances: Tolerances,
    pub radon: RadonSettings,
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::VerifyLemmas,
            state: StateKind::Number { n: 0 },
            dim: 4,
            angles: None,
            samples: 100_000,
            seed: 7,
            out: PathBuf::from("quadtomo-out"),
            input: None,
            truth: None,
            exact: false,
            projected: false,
            gh_order: crate::fock::DEFAULT_GH_ORDER,
            tolerances: Tolerances::default(),
            radon: RadonSettings::default(),
            verify: VerifyConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dim must be positive".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be positive".into()));
        }
        if self.angles == Some(0) {
            return Err(Error::InvalidConfig("angle count must be positive".into()));
        }
        if self.command == Command::Reconstruct && self.input.is_none() {
            return Err(Error::InvalidConfig("reconstruct needs --input".into()));
        }
        Ok(())
    }

    fn fock_config(&self) -> Result<FockConfig> {
        let mut cfg = FockConfig::new(self.dim)?.with_gh_order(self.gh_order.max(2 * self.dim))?;
        cfg.quad_tol = self.tolerances.quad_tol;
        cfg.validate()?;
        Ok(cfg)
    }

    fn spec(&self) -> StateSpec {
        StateSpec::new(self.state.clone(), self.dim)
    }

    fn state(&self) -> Result<DensityMatrix> {
        if self.projected {
            make_state_projected(&self.spec())
        } else {
            make_state(&self.spec())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "quadtomo", version, about = "Quadrature tomography on a truncated Fock space")]
struct Args {
    #[arg(long, value_enum)]
    command: Option<Command>,
    /// vacuum, number:N, coherent:RE[,IM], thermal:MEAN, cat:RE[,IM], random:RANK[,SEED]
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    angles: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file mirroring the run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    gh_order: Option<usize>,
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    projected: bool,
    #[arg(long)]
    filter: Option<String>,
}

/// Files written by a run and a short human-readable summary.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    /// Set when the run completed but a numerical check did not pass.
    pub failure: Option<Error>,
}

/// Result of comparing a reconstruction with the ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthReport {
    pub fidelity: f64,
    pub trace_distance: f64,
    pub max_entry_error_hat: f64,
    pub max_entry_error_phys: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceReport {
    pub angles: usize,
    pub bins: usize,
    pub filter: RadonFilter,
    pub sup_error: f64,
    pub wigner_origin: f64,
    pub radon_origin: f64,
    pub wigner_integral: f64,
    pub husimi_integral: f64,
    pub husimi_min: f64,
    pub warnings: Vec<Warning>,
}

fn write_file(outcome: &mut RunOutcome, path: PathBuf, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(&path, contents)?;
    outcome.files.push(path);
    Ok(())
}

/// Angle `j` of `J` for the files `angle_XXX.csv` / `density_XXX.json`.
fn file_stem(prefix: &str, j: usize) -> String {
    format!("{prefix}_{j:03}")
}

fn simulate(cfg: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    let rho = cfg.state()?;
    let fock = cfg.fock_config()?;
    let count = cfg
        .angles
        .unwrap_or_else(|| AngleGrid::required_len(cfg.dim, cfg.dim - 1));
    let grid = AngleGrid::uniform(count)?;
    write_file(out, cfg.out.join("truth.json"), rho.to_json()?)?;
    if cfg.exact {
        for (j, d) in exact_distributions(&rho, grid.angles(), &fock)?.iter().enumerate() {
            let path = cfg.out.join(format!("{}.json", file_stem("density", j)));
            write_file(out, path, serde_json::to_string(&d.to_file())?)?;
        }
        out.summary = format!("{count} exact densities for {} at dim {}", cfg.state, cfg.dim);
    } else {
        let batches = sample_angles(&rho, grid.angles(), cfg.samples, cfg.seed, &fock)?;
        for (j, b) in batches.iter().enumerate() {
            let csv = cfg.out.join(format!("{}.csv", file_stem("angle", j)));
            b.write_csv(&csv)?;
            out.files.push(csv);
            let meta = cfg.out.join(format!("{}.json", file_stem("angle", j)));
            b.write_metadata(&meta)?;
            out.files.push(meta);
        }
        out.summary = format!(
            "{count} angles x {} samples for {} at dim {} (seed {})",
            cfg.samples, cfg.state, cfg.dim, cfg.seed
        );
    }
    Ok(())
}

fn sorted_files(dir: &Path, prefix: &str, ext: &str) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().and_then(|n| n.to_str()).is_some_and(|n| {
                n.starts_with(prefix) && n.ends_with(ext)
            })
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Loads `angle_*.csv` sample files, or failing that `density_*.json` exact densities.
pub fn load_data(dir: &Path) -> Result<QuadratureData> {
    let csv = sorted_files(dir, "angle_", ".csv")?;
    if !csv.is_empty() {
        let batches = csv.iter().map(SampleBatch::read_csv).collect::<Result<Vec<_>>>()?;
        return Ok(QuadratureData::Samples(batches));
    }
    let json = sorted_files(dir, "density_", ".json")?;
    if json.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "{} holds no angle_*.csv or density_*.json files",
            dir.display()
        )));
    }
    let dists = json
        .iter()
        .map(|p| {
            let file: ExactDensityFile = serde_json::from_str(&fs::read_to_string(p)?)?;
            QuadratureDistribution::from_file(file)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadratureData::Exact(dists))
}

fn reconstruct_cmd(cfg: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    let input = cfg.input.as_ref().expect("validated");
    let data = load_data(input)?;
    let fock = cfg.fock_config()?;
    let options = ReconstructOptions {
        min_samples: cfg.tolerances.min_samples,
        ..ReconstructOptions::default()
    };
    let result = reconstruct_with(&data, cfg.dim, &fock, &options)?;
    write_file(out, cfg.out.join("reconstruction.json"), result.to_json()?)?;
    out.summary = format!(
        "reconstructed dim {} from {} angles ({:?} data); trace {:.6}, min eigenvalue {:.3e}",
        cfg.dim,
        data.len(),
        data.mode(),
        result.diagnostics.trace_hat,
        result.diagnostics.min_eigenvalue_hat
    );

    let truth_path = cfg
        .truth
        .clone()
        .or_else(|| Some(input.join("truth.json")).filter(|p| p.exists()));
    if let Some(path) = truth_path {
        let truth = DensityMatrix::read_with_trace_tolerance(&path, TRUNCATED_TRACE_TOL)?;
        if truth.dim() != cfg.dim {
            return Err(Error::DimensionMismatch {
                expected: cfg.dim,
                found: truth.dim(),
            });
        }
        let report = TruthReport {
            fidelity: result.rho_phys.fidelity(&truth),
            trace_distance: result.rho_phys.trace_distance(&truth),
            max_entry_error_hat: max_entry_diff(&result.rho_hat, truth.entries()),
            max_entry_error_phys: max_entry_diff(result.rho_phys.entries(), truth.entries()),
        };
        write_file(out, cfg.out.join("report.json"), serde_json::to_string_pretty(&report)?)?;
        out.summary.push_str(&format!(
            "\nfidelity {:.10}, trace distance {:.3e}",
            report.fidelity, report.trace_distance
        ));
    }
    Ok(())
}

fn verify_cmd(cfg: &RunConfig, out: &mut RunOutcome) -> Result<VerifyReport> {
    let vcfg = VerifyConfig {
        dim: cfg.dim,
        gh_order: cfg.gh_order,
        seed: cfg.seed,
        ..cfg.verify.clone()
    };
    let report = run_all(&vcfg);
    write_file(out, cfg.out.join("verify.json"), report.to_json()?)?;
    out.summary = report.table();
    if !report.all_passed() {
        let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
        out.failure = Some(Error::Certification(format!("suites failed: {}", failed.join(", "))));
    }
    Ok(report)
}

fn write_grid(out: &mut RunOutcome, path: PathBuf, grid: &PhaseSpaceGrid) -> Result<()> {
    grid.write_csv(fs::File::create(&path)?)?;
    out.files.push(path);
    Ok(())
}

fn compare_cmd(cfg: &RunConfig, out: &mut RunOutcome) -> Result<PhaseSpaceReport> {
    let rho = cfg.state()?;
    let half_width = cfg
        .radon
        .half_width
        .unwrap_or_else(|| (2.0 * cfg.dim as f64).sqrt() + 4.0);
    let radon = RadonConfig {
        filter: cfg.radon.filter,
        cutoff: cfg.radon.cutoff,
        angles: cfg.angles.unwrap_or(64),
        bins: cfg.radon.bins,
        half_width,
        grid_points: cfg.radon.grid_points,
    };
    let estimate = wigner_inverse_radon(&radon_projections(&rho, &radon)?, &radon)?;
    let direct = wigner_direct(&rho, &estimate);
    let q = husimi(&rho, &estimate);
    let report = PhaseSpaceReport {
        angles: radon.angles,
        bins: radon.bins,
        filter: radon.filter,
        sup_error: estimate.max_abs_diff(&direct)?,
        wigner_origin: crate::phase_space::wigner_point(&rho, 0.0, 0.0),
        radon_origin: estimate.interpolate(0.0, 0.0),
        wigner_integral: direct.integral(),
        husimi_integral: q.integral(),
        husimi_min: q.values.min(),
        warnings: direct.warnings.iter().chain(&q.warnings).cloned().collect(),
    };
    write_grid(out, cfg.out.join("wigner_direct.csv"), &direct)?;
    write_grid(out, cfg.out.join("wigner_radon.csv"), &estimate)?;
    write_grid(out, cfg.out.join("husimi.csv"), &q)?;
    write_file(out, cfg.out.join("phase_space.json"), serde_json::to_string_pretty(&report)?)?;
    out.summary = format!(
        "sup |W_radon - W_direct| = {:.3e}; W(0,0) direct {:.6}, radon {:.6}",
        report.sup_error, report.wigner_origin, report.radon_origin
    );
    Ok(report)
}

/// Executes one run. `config_text` is written verbatim as `config.json`
/// when the run came from a file; otherwise the serialized config is.
pub fn run(cfg: &RunConfig, config_text: Option<&str>) -> Result<RunOutcome> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out)?;
    let mut outcome = RunOutcome::default();
    let text = match config_text {
        Some(t) => t.to_string(),
        None => cfg.to_json()?,
    };
    write_file(&mut outcome, cfg.out.join("config.json"), text)?;
    match cfg.command {
        Command::Simulate => simulate(cfg, &mut outcome)?,
        Command::Reconstruct => reconstruct_cmd(cfg, &mut outcome)?,
        Command::VerifyLemmas => {
            verify_cmd(cfg, &mut outcome)?;
        }
        Command::ComparePhaseSpace => {
            compare_cmd(cfg, &mut outcome)?;
        }
    }
    Ok(outcome)
}

fn resolve(args: Args) -> Result<(RunConfig, Option<String>)> {
    let (mut cfg, text) = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            (RunConfig::from_json(&text)?, Some(text))
        }
        None => (RunConfig::default(), None),
    };
    let overridden = args.command.is_some()
        || args.state.is_some()
        || args.dim.is_some()
        || args.angles.is_some()
        || args.samples.is_some()
        || args.seed.is_some()
        || args.out.is_some()
        || args.input.is_some()
        || args.truth.is_some()
        || args.gh_order.is_some()
        || args.exact
        || args.projected
        || args.filter.is_some();
    if let Some(c) = args.command {
        cfg.command = c;
    }
    if let Some(s) = &args.state {
        cfg.state = StateKind::from_str(s)?;
    }
    if let Some(d) = args.dim {
        cfg.dim = d;
    }
    if args.angles.is_some() {
        cfg.angles = args.angles;
    }
    if let Some(s) = args.samples {
        cfg.samples = s;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = args.out {
        cfg.out = o;
    }
    if args.input.is_some() {
        cfg.input = args.input;
    }
    if args.truth.is_some() {
        cfg.truth = args.truth;
    }
    if let Some(g) = args.gh_order {
        cfg.gh_order = g;
    }
    cfg.exact |= args.exact;
    cfg.projected |= args.projected;
    if let Some(f) = &args.filter {
        cfg.radon.filter = RadonFilter::from_str(f)?;
    }
    // a file overridden by flags is no longer the run's description
    let text = if overridden { None } else { text };
    Ok((cfg, text))
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

fn report_error(err: &Error) -> i32 {
    let report = ErrorReport {
        error: err.kind(),
        message: err.to_string(),
    };
    eprintln!("{}", serde_json::to_string(&report).unwrap_or_else(|_| err.to_string()));
    if err.is_numerical() {
        3
    } else {
        2
    }
}

/// Parses arguments, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = resolve(args).and_then(|(cfg, text)| run(&cfg, text.as_deref()));
    match outcome {
        Ok(o) => {
            println!("{}", o.summary.trim_end());
            match &o.failure {
                Some(err) => report_error(err),
                None => 0,
            }
        }
        Err(err) => report_error(&err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_losslessly() {
        let cfg = RunConfig {
            command: Command::Simulate,
            state: StateKind::Cat { re: 1.5, im: 0.1 },
            dim: 9,
            angles: Some(33),
            samples: 12345,
            seed: 99,
            out: PathBuf::from("/tmp/x"),
            input: Some(PathBuf::from("in")),
            truth: None,
            exact: true,
            projected: true,
            gh_order: 300,
            tolerances: Tolerances {
                quad_tol: 3.3e-10,
                min_samples: 10,
            },
            radon: RadonSettings {
                filter: RadonFilter::RamLak,
                cutoff: 0.7,
                bins: 100,
                half_width: Some(6.1),
                grid_points: 33,
            },
            verify: VerifyConfig {
                dual_states: 4,
                ..VerifyConfig::default()
            },
        };
        let text = cfg.to_json().unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
        assert!(text.contains("\"cat:1.5,0.1\""));
    }

    #[test]
    fn partial_config_uses_defaults() {
        let cfg = RunConfig::from_json(r#"{"command": "simulate", "state": "number:2"}"#).unwrap();
        assert_eq!(cfg.command, Command::Simulate);
        assert_eq!(cfg.state, StateKind::Number { n: 2 });
        assert_eq!(cfg.dim, 4);
        assert!(RunConfig::from_json(r#"{"state": "bogus"}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(RunConfig { dim: 0, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { samples: 0, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig {
            command: Command::Reconstruct,
            ..RunConfig::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(main_with_args(["quadtomo", "--dim", "0"]), 2);
        assert_eq!(main_with_args(["quadtomo", "--state", "nope"]), 2);
        let bogus = Args::try_parse_from(["quadtomo", "--bogus"]).unwrap_err();
        assert!(bogus.use_stderr());
        let help = Args::try_parse_from(["quadtomo", "--help"]).unwrap_err();
        assert!(!help.use_stderr());
    }
}
