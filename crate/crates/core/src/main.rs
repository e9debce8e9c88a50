use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use locstat::harness::output::{
    output_dir, write_lse_table, write_statespace_table, LseRow, StateSpaceRow, VERSION,
};
use locstat::harness::{run_study, write_study, EstimatorKind, StudyConfig, StudyResult};
use locstat::kernels::KernelKind;
use locstat::levy::LevySpec;
use locstat::rng::RngStream;
use locstat::simulate::{simulate_tv_ou, simulate_tv_statespace, CoefficientCurve, SimSettings};
use locstat::statespace::FamilyId;
use locstat::{Error, Result};

#[derive(Parser)]
#[command(name = "locstat", version = VERSION, about = "Localized estimation for time-varying Levy-driven OU and state space models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path over [0, T] and write it as CSV.
    Simulate {
        #[arg(long, value_enum, default_value = "ou")]
        model: Model,
        #[command(flatten)]
        common: Common,
    },
    /// Least squares estimates of a(u) along one simulated path.
    EstimateLse(Common),
    /// Truncated quasi maximum likelihood estimates along one simulated path.
    EstimateQmle(Common),
    /// Whittle estimates along one simulated path.
    EstimateWhittle(Common),
    /// Monte Carlo study writing estimates, summaries and a manifest.
    Montecarlo {
        #[arg(long, value_parser = parse_estimator)]
        estimator: Option<EstimatorKind>,
        /// Full-size study (400 replications, 101 points, N up to 256).
        #[arg(long)]
        full_scale: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Ou,
    Statespace,
}

#[derive(Clone, Copy, ValueEnum)]
enum Noise {
    Gauss,
    Nig,
}

#[derive(Args)]
struct Common {
    /// JSON study configuration; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_kernel)]
    kernel: Option<KernelKind>,
    #[arg(long, value_enum)]
    noise: Option<Noise>,
    /// Gaussian variance.
    #[arg(long)]
    sigma2: Option<f64>,
    /// NIG parameters; the location is set so that the noise is centered.
    #[arg(long)]
    nig_alpha: Option<f64>,
    #[arg(long)]
    nig_beta: Option<f64>,
    #[arg(long)]
    nig_delta: Option<f64>,
    /// OU coefficient curve: a1, a2, a3 or a constant.
    #[arg(long, value_parser = parse_curve)]
    curve: Option<CoefficientCurve>,
    #[arg(long, value_parser = parse_family)]
    family: Option<FamilyId>,
    /// Rescaling parameter(s), comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    n: Option<Vec<u32>>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sim_ratio: Option<u32>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    bandwidth_constant: Option<f64>,
    #[arg(long)]
    de_pop: Option<usize>,
    #[arg(long)]
    de_gens: Option<usize>,
    #[arg(long)]
    de_seed: Option<u64>,
    /// Output file (estimates, simulate) or directory (montecarlo).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kernel(s: &str) -> std::result::Result<KernelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
fn parse_curve(s: &str) -> std::result::Result<CoefficientCurve, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
fn parse_family(s: &str) -> std::result::Result<FamilyId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}
fn parse_estimator(s: &str) -> std::result::Result<EstimatorKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn config(&self) -> Result<StudyConfig> {
        let mut c = match &self.config {
            Some(p) => StudyConfig::from_json_file(p)?,
            None => StudyConfig::default(),
        };
        if let Some(k) = self.kernel {
            c.kernel = k;
        }
        let nig_flags = self.nig_alpha.is_some() || self.nig_beta.is_some() || self.nig_delta.is_some();
        match self.noise {
            Some(Noise::Gauss) => c.noise = LevySpec::gaussian(self.sigma2.unwrap_or(0.2))?,
            Some(Noise::Nig) => c.noise = self.nig()?,
            None if self.sigma2.is_some() => c.noise = LevySpec::gaussian(self.sigma2.unwrap())?,
            None if nig_flags => c.noise = self.nig()?,
            None => {}
        }
        if let Some(v) = &self.curve {
            c.curve = v.clone();
        }
        if let Some(f) = self.family {
            c.family = f;
        }
        if let Some(n) = &self.n {
            c.n_values = n.clone();
        }
        if let Some(p) = self.points {
            c.points = p;
            c.u_points = None;
        }
        if let Some(r) = self.replications {
            c.replications = r;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(s) = self.sim_ratio {
            c.sim_ratio = s;
        }
        if let Some(h) = self.horizon {
            c.horizon = h;
        }
        if let Some(b) = self.bandwidth_constant {
            c.bandwidth_constant = b;
        }
        if let Some(p) = self.de_pop {
            c.de.population = Some(p);
        }
        if let Some(g) = self.de_gens {
            c.de.max_gens = g;
        }
        if let Some(s) = self.de_seed {
            c.de.seed = s;
        }
        Ok(c)
    }

    fn nig(&self) -> Result<LevySpec> {
        LevySpec::centered_nig(
            self.nig_alpha.unwrap_or(3.0),
            self.nig_beta.unwrap_or(1.0),
            self.nig_delta.unwrap_or(2.0),
        )
    }

    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn single_n(c: &StudyConfig) -> Result<u32> {
    match c.n_values.as_slice() {
        [n] => Ok(*n),
        other => Err(Error::Config(format!("expected a single --N, got {other:?}"))),
    }
}

fn simulate(model: Model, common: &Common) -> Result<()> {
    let c = common.config()?;
    let n = single_n(&c)?;
    let settings = SimSettings::new(n, 1.0 / n as f64, c.sim_ratio, 0.0, c.horizon);
    let mut rng = RngStream::new(c.seed, 0);
    let path = match model {
        Model::Ou => {
            c.curve.check_positive(0.0, c.horizon)?;
            simulate_tv_ou(&c.curve, &c.noise, &settings, &mut rng)?
        }
        Model::Statespace => {
            let family = c.build_family()?;
            simulate_tv_statespace(family.as_ref(), &c.theta_curves, &c.noise, &settings, true, &mut rng)?
        }
    };
    path.write_csv(common.writer()?)
}

/// One replication of a study at a single `N`.
fn single_path(common: &Common, estimator: EstimatorKind) -> Result<StudyResult> {
    let mut c = common.config()?;
    c.estimator = estimator;
    c.replications = 1;
    single_n(&c)?;
    let res = run_study(&c)?;
    if let Some(r) = res.records.iter().find(|r| !r.is_ok()) {
        return Err(Error::Estimation(format!("at u = {}: {}", r.u, r.error.as_deref().unwrap_or(""))));
    }
    Ok(res)
}

fn estimate_lse(common: &Common) -> Result<()> {
    let res = single_path(common, EstimatorKind::Lse)?;
    let rows: Vec<LseRow> = res
        .records
        .iter()
        .map(|r| LseRow {
            u: r.u,
            a_true: r.truth[0],
            a_hat: r.estimate[0],
            sigma_hat: r.sigma_hat.unwrap_or(f64::NAN),
            std_err: r.std_err,
        })
        .collect();
    write_lse_table(common.writer()?, &rows)
}

fn estimate_statespace(common: &Common, estimator: EstimatorKind) -> Result<()> {
    let res = single_path(common, estimator)?;
    let rows: Vec<StateSpaceRow> = res
        .records
        .iter()
        .map(|r| StateSpaceRow {
            u: r.u,
            theta_star: r.truth.clone(),
            theta_hat: r.estimate.clone(),
            objective: r.objective.unwrap_or(f64::NAN),
            riccati_residual: r.riccati_residual.unwrap_or(f64::NAN),
            whittle_value: r.whittle_value,
        })
        .collect();
    write_statespace_table(common.writer()?, &rows, estimator == EstimatorKind::Whittle)
}

fn montecarlo(estimator: Option<EstimatorKind>, full_scale: bool, common: &Common) -> Result<()> {
    let mut c = common.config()?;
    if let Some(e) = estimator {
        c.estimator = e;
    }
    if full_scale {
        c = c.full_scale();
    }
    if let Some(o) = &common.out {
        c.output_dir = Some(o.clone());
    }
    let res = run_study(&c)?;
    let dir = output_dir(&c);
    let manifest = write_study(&res, &dir)?;
    let mut out = io::stdout().lock();
    writeln!(out, "wrote {} records ({} failed) to {}", manifest.records, manifest.failures, dir.display())?;
    for s in &res.summaries {
        let mise: Vec<String> = s
            .mise
            .iter()
            .map(|m| m.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into()))
            .collect();
        writeln!(out, "N = {:>4}  MISE = [{}]  failures = {}", s.n, mise.join(", "), s.failures)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate { model, common } => simulate(*model, common),
        Command::EstimateLse(c) => estimate_lse(c),
        Command::EstimateQmle(c) => estimate_statespace(c, EstimatorKind::Qmle),
        Command::EstimateWhittle(c) => estimate_statespace(c, EstimatorKind::Whittle),
        Command::Montecarlo { estimator, full_scale, common } => montecarlo(*estimator, *full_scale, common),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("locstat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
