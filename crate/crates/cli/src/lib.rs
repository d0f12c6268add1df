//! Command implementations behind the `wderiv` binary.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wderiv_core::analyzers::{
    compact_verdict, default_t_grid, family_total_boundedness, noncompact_witness_limit,
    noncompact_witness_step, range_c0_check, svd_decay, weakstar_condition_check,
    weakstar_counterexample_check,
};
use wderiv_core::catalog::{self, EntryId, Params};
use wderiv_core::config::{RunConfig, Tolerances};
use wderiv_core::derivation::{deriv_delta_norm_profile, DerivationKernel, FamilyKind, FamilySpec, KernelFamily};
use wderiv_core::{
    AnalysisReport, Error, Evidence, Grid, L1Element, L1Tail, LInfElement, Verdict, Weight, C64,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const IDENTITY_GRID: (f64, f64) = (1.0 / 256.0, 40.0);

#[derive(Debug, Parser)]
#[command(name = "wderiv", version, about = "Numerical checks for derivations on weighted convolution algebras")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct GlobalOpts {
    /// Config file with [weight], [grid], [tolerance] and [run] sections.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Catalog id, `zero`, `one`, `texp`, or a CSV file of `t,re[,im]` rows.
    #[arg(long, global = true, value_name = "ID|FILE")]
    pub phi: Option<String>,
    /// Directory for report.txt and evidence CSV files.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Grid step.
    #[arg(long, global = true, value_name = "REAL")]
    pub h: Option<f64>,
    /// Grid end.
    #[arg(long, global = true, value_name = "REAL")]
    pub tmax: Option<f64>,
    /// Tolerance override, repeatable.
    #[arg(long = "tolerance", global = true, value_name = "NAME=VALUE")]
    pub tolerances: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog entries and their expected verdicts.
    List,
    /// Check the derivation identity on random compactly supported pairs.
    VerifyDerivation {
        #[arg(long, value_name = "N")]
        trials: Option<usize>,
    },
    /// Weak-star continuity report for φ.
    WeakstarReport,
    /// Compactness report for φ.
    CompactnessReport,
    /// Run a catalog entry's designated analyzers against its expected verdicts.
    Reproduce {
        #[arg(value_name = "ID")]
        id: String,
    },
}

/// Failure that ends a command before any verdict is reached.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(PathBuf, io::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Resolved run settings: defaults, then the config file, then flags.
pub struct Settings {
    pub config: RunConfig,
    pub tol: Tolerances,
    pub seed: u64,
    pub phi: Option<String>,
    pub out: Option<PathBuf>,
    h: Option<f64>,
    t_max: Option<f64>,
}

impl Settings {
    pub fn resolve(opts: &GlobalOpts) -> CliResult<Self> {
        let config = match &opts.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::Io(p.clone(), e))?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        let mut tol = config.tolerances();
        for t in &opts.tolerances {
            tol.apply_override(t)?;
        }
        Ok(Settings {
            tol,
            seed: opts.seed.or(config.seed).unwrap_or(0),
            phi: opts.phi.clone().or_else(|| config.phi.clone()),
            out: opts.out.clone().or_else(|| config.out.as_ref().map(PathBuf::from)),
            h: opts.h,
            t_max: opts.tmax,
            config,
        })
    }

    pub fn weight(&self, default: &Weight) -> Weight {
        self.config.weight.clone().unwrap_or_else(|| default.clone())
    }

    pub fn grid(&self, default: (f64, f64)) -> CliResult<Arc<Grid>> {
        let mut spec = self.config.grid.clone();
        if self.h.is_some() {
            spec.h = self.h;
        }
        if self.t_max.is_some() {
            spec.t_max = self.t_max;
        }
        Ok(Arc::new(spec.build(default)?))
    }
}

/// What `--phi` names.
#[derive(Clone, Debug, PartialEq)]
pub enum PhiSpec {
    Entry(EntryId),
    Zero,
    One,
    TExp,
    File(PathBuf),
}

impl PhiSpec {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "zero" => Ok(PhiSpec::Zero),
            "one" => Ok(PhiSpec::One),
            "texp" => Ok(PhiSpec::TExp),
            _ => match EntryId::parse(s) {
                Ok(id) => Ok(PhiSpec::Entry(id)),
                Err(_) if Path::new(s).is_file() => Ok(PhiSpec::File(PathBuf::from(s))),
                Err(e) => Err(e.into()),
            },
        }
    }

    fn entry(&self) -> Option<catalog::CatalogEntry> {
        match self {
            PhiSpec::Entry(id) => Some(catalog::entry(*id)),
            _ => None,
        }
    }

    pub fn default_weight(&self) -> Weight {
        self.entry().map_or_else(Weight::constant_one, |e| e.weight)
    }

    pub fn default_grid(&self) -> (f64, f64) {
        self.entry().map_or(IDENTITY_GRID, |e| e.grid)
    }

    pub fn build(&self, w: &Weight, grid: &Arc<Grid>, tol: &Tolerances) -> CliResult<LInfElement> {
        let one = C64::new(1.0, 0.0);
        Ok(match self {
            PhiSpec::Entry(id) => catalog::build(*id, w, grid, &Params::new())?,
            PhiSpec::Zero => LInfElement::zero(grid),
            PhiSpec::One => LInfElement::from_fn_inferred(grid, w, tol, |_| one)?,
            PhiSpec::TExp => LInfElement::from_fn_inferred(grid, w, tol, |t| C64::new(t * (-t).exp(), 0.0))?,
            PhiSpec::File(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::Io(p.clone(), e))?;
                let (ts, vals) = parse_phi_csv(&text)?;
                let table = Arc::new(Grid::from_nodes(ts)?);
                let end = table.t_max();
                if end < grid.t_max() - 1e-9 {
                    return Err(CliError::Usage(format!(
                        "{}: samples end at {end}, grid needs {}",
                        p.display(),
                        grid.t_max()
                    )));
                }
                LInfElement::from_fn_inferred(grid, w, tol, |t| {
                    table.interpolate(&vals, t).unwrap_or(C64::new(f64::NAN, 0.0))
                })?
            }
        })
    }
}

/// Rows `t,re` or `t,re,im`; a header row is skipped when it does not parse.
fn parse_phi_csv(text: &str) -> CliResult<(Vec<f64>, Vec<C64>)> {
    let mut ts = Vec::new();
    let mut vals = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let nums: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match (nums, k) {
            (Some(n), _) if n.len() == 2 || n.len() == 3 => {
                ts.push(n[0]);
                vals.push(C64::new(n[1], n.get(2).copied().unwrap_or(0.0)));
            }
            (None, 0) => continue,
            _ => {
                return Err(Error::Config {
                    line: k + 1,
                    msg: format!("expected `t,re[,im]`, got `{line}`"),
                }
                .into())
            }
        }
    }
    Ok((ts, vals))
}

/// Collected output of one command.
pub struct Outcome {
    pub reports: Vec<AnalysisReport>,
    pub notes: Vec<String>,
    pub exit: i32,
}

impl Outcome {
    fn reports(reports: Vec<AnalysisReport>) -> Self {
        Outcome {
            reports,
            notes: Vec::new(),
            exit: EXIT_OK,
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for n in &self.notes {
            s.push_str(n);
            s.push('\n');
        }
        for r in &self.reports {
            if !s.is_empty() {
                s.push('\n');
            }
            s.push_str(&r.to_text());
        }
        s
    }
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect()
}

/// Writes `report.txt` plus one `<analyzer>__<evidence>.csv` per sequence.
pub fn write_outputs(dir: &Path, outcome: &Outcome) -> CliResult<()> {
    let io_err = |p: &Path, e| CliError::Io(p.to_path_buf(), e);
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let report = dir.join("report.txt");
    fs::write(&report, outcome.text()).map_err(|e| io_err(&report, e))?;
    for r in &outcome.reports {
        for ev in &r.evidence {
            let p = dir.join(format!("{}__{}.csv", file_stem(&r.analyzer), file_stem(&ev.name)));
            fs::write(&p, ev.to_csv()).map_err(|e| io_err(&p, e))?;
        }
    }
    Ok(())
}

fn list() -> Outcome {
    let mut notes = Vec::new();
    for e in catalog::list_entries() {
        notes.push(format!("{}: {}", e.id, e.statement));
        for (a, v) in &e.expected {
            notes.push(format!("  expects {a} = {v}"));
        }
    }
    Outcome {
        reports: Vec::new(),
        notes,
        exit: EXIT_OK,
    }
}

fn phi_spec(settings: &Settings, fallback: Option<&str>) -> CliResult<PhiSpec> {
    match settings.phi.as_deref().or(fallback) {
        Some(s) => PhiSpec::parse(s),
        None => Err(CliError::Usage("this command needs --phi ID|FILE".into())),
    }
}

fn verify_derivation(settings: &Settings, trials: Option<usize>) -> CliResult<Outcome> {
    let spec = phi_spec(settings, Some("one"))?;
    let w = settings.weight(&spec.default_weight());
    let grid = settings.grid(IDENTITY_GRID)?;
    let phi = spec.build(&w, &grid, &settings.tol)?;
    let trials = trials.or(settings.config.trials).unwrap_or(10);
    let span = (0.5 * grid.t_max()).min(5.0);
    if span < 0.5 {
        return Err(CliError::Usage(format!("grid end {} is too short for random trials", grid.t_max())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let bump = |rng: &mut ChaCha8Rng| -> CliResult<L1Element> {
        let a = rng.gen_range(0.0..span - 0.5);
        let b = rng.gen_range(a + 0.5..=span);
        Ok(L1Element::bump(&grid, a, b, rng.gen_range(0.5..1.5))?)
    };
    let kernel = DerivationKernel::new(&phi, &w);
    let phi_norm = phi.linf_norm(&w)?;
    let h = grid.max_step();
    let mut residuals = Vec::with_capacity(trials);
    let mut budgets = Vec::with_capacity(trials);
    for k in 0..trials {
        let (f, g) = (bump(&mut rng)?, bump(&mut rng)?);
        let r = kernel.identity_residual(&f, &g)?;
        let scale = phi_norm * f.l1_norm(&w)? * g.l1_norm(&w)?;
        residuals.push((k as f64, r));
        budgets.push((k as f64, settings.tol.slack_budget(h, scale)));
    }
    let all_ok = residuals.iter().zip(&budgets).all(|(r, b)| r.1 <= b.1);
    let worst = residuals
        .iter()
        .zip(&budgets)
        .map(|(r, b)| if b.1 > 0.0 { r.1 / b.1 } else { 0.0 })
        .fold(0.0, f64::max);
    let report = AnalysisReport::new("derivation_identity")
        .param("weight", &w)
        .param("phi", settings.phi.as_deref().unwrap_or("one"))
        .param("h", h)
        .param("t_max", grid.t_max())
        .param("trials", trials)
        .param("seed", settings.seed)
        .param("slack", settings.tol.slack)
        .summarize("max_residual_over_budget", worst)
        .caveat("verified on grid")
        .with_evidence(Evidence::new("residual", residuals))
        .with_evidence(Evidence::new("budget", budgets));
    let report = if trials == 0 {
        report.caveat("no trials run").conclude(Verdict::Inconclusive)
    } else if all_ok {
        report.conclude(Verdict::Holds)
    } else {
        report.conclude(Verdict::Fails)
    };
    let exit = if report.verdict == Verdict::Fails { EXIT_VERDICT } else { EXIT_OK };
    Ok(Outcome {
        reports: vec![report],
        notes: Vec::new(),
        exit,
    })
}

fn weakstar_report(settings: &Settings) -> CliResult<Outcome> {
    let spec = phi_spec(settings, None)?;
    let w = settings.weight(&spec.default_weight());
    let grid = settings.grid(spec.default_grid())?;
    let tol = &settings.tol;
    let phi = spec.build(&w, &grid, tol)?;
    let known_end = grid.node(phi.known_len() - 1);
    let t_grid: Vec<f64> = default_t_grid(&grid, 0.5)
        .into_iter()
        .filter(|&t| t + 1.0 <= known_end + 1e-9)
        .collect();
    let mut reports = vec![weakstar_condition_check(&phi, &w, &[0.5, 0.25], &t_grid, tol)];
    let f_end = grid.t_max().min(1.0);
    let inputs = vec![
        L1Element::indicator(&grid, 0.0, f_end, 1.0)?,
        L1Element::bump(&grid, 0.0, 2.0 * f_end, 1.0).or_else(|_| L1Element::bump(&grid, 0.0, f_end, 1.0))?,
    ];
    reports.push(range_c0_check(&phi, &w, &inputs, tol));
    if spec == PhiSpec::Entry(EntryId::Notwkscts) {
        let a = catalog::spike_positions(&catalog::entry(EntryId::Notwkscts).params)?;
        let a: Vec<f64> = a.into_iter().filter(|&x| x + 1.0 <= grid.t_max()).collect();
        reports.push(weakstar_counterexample_check(&w, &grid, &a, tol)?);
    }
    Ok(Outcome::reports(reports))
}

fn norm_profile_report(phi: &LInfElement, w: &Weight, grid: &Grid) -> AnalysisReport {
    let mut s_list = Vec::new();
    let mut s = 0.25;
    while s <= 0.5 * grid.t_max() {
        s_list.push(s);
        s *= 2.0;
    }
    let report = AnalysisReport::new("deriv_delta_norm_profile")
        .param("weight", w)
        .caveat("supporting evidence: scaled norms of point-mass images");
    match deriv_delta_norm_profile(phi, w, &s_list) {
        Ok(points) => report
            .with_evidence(Evidence::new("scaled_norm", points.iter().map(|p| (p.s, p.scaled)).collect()))
            .with_evidence(Evidence::new("grid_sup", points.iter().map(|p| (p.s, p.grid_sup)).collect()))
            .conclude(Verdict::Inconclusive),
        Err(e) => report.caveat(e.to_string()).conclude(Verdict::Inconclusive),
    }
}

fn net_report(phi: &LInfElement, w: &Weight, grid: &Grid, tol: &Tolerances) -> AnalysisReport {
    // The extended family reaches member_t_max + param_max = T_max.
    let window = (0.25 * grid.t_max()).min(40.0);
    let spec = FamilySpec {
        member_h: grid.max_step().max(1.0 / 16.0),
        member_t_max: window,
        param_step: grid.max_step().max(1.0 / 8.0),
        param_max: window,
    };
    match KernelFamily::build(FamilyKind::DeltaImage, phi, w, spec) {
        Ok(fam) => family_total_boundedness(&fam, tol.net_eps, tol),
        Err(e) => AnalysisReport::new("family_total_boundedness")
            .caveat(e.to_string())
            .conclude(Verdict::Inconclusive),
    }
}

fn compactness_report(settings: &Settings) -> CliResult<Outcome> {
    let spec = phi_spec(settings, None)?;
    let w = settings.weight(&spec.default_weight());
    let grid = settings.grid(spec.default_grid())?;
    let tol = &settings.tol;
    let phi = spec.build(&w, &grid, tol)?;
    let mut reports = vec![compact_verdict(&phi, &w, tol), net_report(&phi, &w, &grid, tol)];
    reports.push(norm_profile_report(&phi, &w, &grid));
    let half = 0.5 * grid.t_max();
    reports.push(svd_decay(&phi, &w, &Grid::uniform(half / 255.0, half)?));
    let mut notes = vec!["NOTE: compact_verdict is the headline; the other reports are supporting evidence".to_string()];
    match &spec {
        PhiSpec::Entry(EntryId::Step) => {
            let b = catalog::entry(EntryId::Step).params["b"];
            match noncompact_witness_step(&phi, &w, b, 0.5, &[4, 8, 16], tol) {
                Ok(r) => reports.push(r),
                Err(e) => notes.push(format!("NOTE: jump witness skipped: {e}")),
            }
        }
        PhiSpec::Entry(EntryId::LimitAlpha) => {
            let p = &catalog::entry(EntryId::LimitAlpha).params;
            let alpha = C64::new(p["alpha"], p["alpha_im"]);
            let n_list: Vec<u32> = [4, 8, 16, 32]
                .into_iter()
                .filter(|&n| f64::from(n) + 1.0 <= grid.t_max())
                .collect();
            let g = L1Element::from_real_fn(&grid, L1Tail::None, |t| (-t).exp())?;
            match noncompact_witness_limit(&phi, &w, alpha, &n_list, &g, tol) {
                Ok(r) => reports.push(r),
                Err(e) => notes.push(format!("NOTE: limit witness skipped: {e}")),
            }
        }
        _ => {}
    }
    Ok(Outcome {
        reports,
        notes,
        exit: EXIT_OK,
    })
}

fn reproduce(settings: &Settings, id: &str) -> CliResult<Outcome> {
    let id = EntryId::parse(id)?;
    let e = catalog::entry(id);
    let w = settings.weight(&e.weight);
    let grid = settings.grid(e.grid)?;
    let outcomes = catalog::run_designated(id, &w, &grid, &Params::new(), &settings.tol)?;
    let mut notes = Vec::new();
    let mut all = true;
    for o in &outcomes {
        let tag = if o.matches() { "MATCH" } else { "MISMATCH" };
        all &= o.matches();
        notes.push(format!(
            "{tag}: {} expected {} got {}",
            o.report.analyzer, o.expected, o.report.verdict
        ));
    }
    Ok(Outcome {
        reports: outcomes.into_iter().map(|o| o.report).collect(),
        notes,
        exit: if all { EXIT_OK } else { EXIT_VERDICT },
    })
}

/// Runs `cli`, printing to `out`/`err`; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = Settings::resolve(&cli.opts).and_then(|settings| {
        let outcome = match &cli.command {
            Command::List => list(),
            Command::VerifyDerivation { trials } => verify_derivation(&settings, *trials)?,
            Command::WeakstarReport => weakstar_report(&settings)?,
            Command::CompactnessReport => compactness_report(&settings)?,
            Command::Reproduce { id } => reproduce(&settings, id)?,
        };
        if let Some(dir) = &settings.out {
            write_outputs(dir, &outcome)?;
        }
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            let _ = out.write_all(outcome.text().as_bytes());
            outcome.exit
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_spec_names() {
        assert_eq!(PhiSpec::parse("zero").unwrap(), PhiSpec::Zero);
        assert_eq!(PhiSpec::parse("step").unwrap(), PhiSpec::Entry(EntryId::Step));
        assert!(matches!(PhiSpec::parse("no-such-thing"), Err(CliError::Core(Error::UnknownId(_)))));
    }

    #[test]
    fn phi_csv_rows() {
        let (ts, vals) = parse_phi_csv("t,re,im\n0,1,0\n0.5,2,-1\n\n1,3\n").unwrap();
        assert_eq!(ts, [0.0, 0.5, 1.0]);
        assert_eq!(vals[1], C64::new(2.0, -1.0));
        assert_eq!(vals[2], C64::new(3.0, 0.0));
        assert!(matches!(parse_phi_csv("0,1\nx,2\n"), Err(CliError::Core(Error::Config { line: 2, .. }))));
    }

    #[test]
    fn file_stems_are_sanitized() {
        assert_eq!(file_stem("mU_eps_0.5"), "mU_eps_0.5");
        assert_eq!(file_stem("a/b c"), "a_b_c");
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "[grid]\nh = 0.125\nt_max = 8\n[run]\nseed = 5\n").unwrap();
        let opts = GlobalOpts {
            config: Some(cfg),
            seed: Some(9),
            tmax: Some(4.0),
            ..GlobalOpts::default()
        };
        let s = Settings::resolve(&opts).unwrap();
        assert_eq!(s.seed, 9);
        let g = s.grid(IDENTITY_GRID).unwrap();
        assert_eq!(g.max_step(), 0.125);
        assert_eq!(g.t_max(), 4.0);
    }
}
