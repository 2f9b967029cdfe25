//! `okounkov`: command-line front end for the exact discrete-body library.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use okounkov::estimates::{self, EllRule, KRange, SweepReport};
use okounkov::io::{self, Table};
use okounkov::par::Exec;
use okounkov::rational::{fmt_rat, int, parse_rat, rat};
use okounkov::thresholds::{self, MRule};
use okounkov::{catalog, AffineFunctional, ConvexBody, Error, GradedSeriesModel, Rat, ValuationModel};

#[derive(Parser)]
#[command(name = "okounkov", version, about = "Exact discrete Okounkov bodies and stability thresholds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Volume, barycenter, inscribed-ball radius and lattice count of a polytope.
    Body(Common),
    /// Discrete bodies, gap sets and the gap table of a model.
    Series(Common),
    /// Per-level jumping data and thresholds of a model.
    Thresholds(Common),
    /// Runs a verification sweep.
    Verify {
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Ehrhart,
    Lowerbound,
    Concave,
    Cones,
    Maxp1,
    Stwosided,
    Deltarate,
    Endpoints,
    Weierstrass,
    All,
}

#[derive(Args, Clone, Debug, Default)]
struct Common {
    /// Input JSON (polytope for `body`, model otherwise).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// A bundled model by name instead of `--in`.
    #[arg(long)]
    model: Option<String>,
    /// Valuation family JSON.
    #[arg(long)]
    valuations: Option<PathBuf>,
    /// Sweep spec JSON (`tau`, `m_rule`, `k_range`, `tol`).
    #[arg(long)]
    sweep: Option<PathBuf>,
    /// Output file (`body`, `series`, `thresholds`) or directory (`verify`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    k_min: Option<u64>,
    #[arg(long)]
    k_max: Option<u64>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    m_rule: Option<String>,
    /// A fixed `m`, not clamped to `1..=d_k`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol: Option<String>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
    /// Number of sampled bodies in seeded sweeps.
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

/// Validated run configuration.
struct RunConfig {
    range: KRange,
    tau: Rat,
    rule: MRule,
    tol: Rat,
    exec: Exec,
}

enum Failure {
    Lib(Error),
    Verification(SweepReport),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn input_error(msg: impl Into<String>) -> Failure {
    Failure::Lib(Error::Input(msg.into()))
}

impl Common {
    fn config(&self, default_range: (u64, u64), default_tau: Rat, default_rule: MRule) -> CliResult<RunConfig> {
        let spec = self.sweep.as_deref().map(|p| io::sweep_from_json(&io::read_file(p)?)).transpose()?;
        let (mut lo, mut hi) = spec.as_ref().map_or(default_range, |s| s.k_range);
        if let Some(k) = self.k_min {
            lo = k;
        }
        if let Some(k) = self.k_max {
            hi = k;
        }
        let range = KRange::new(lo, hi).map_err(|e| input_error(e.to_string()))?;
        let tau = match (&self.tau, &spec) {
            (Some(t), _) => parse_rat(t)?,
            (None, Some(s)) => s.tau.0.clone(),
            (None, None) => default_tau,
        };
        if tau < int(0) || tau > int(1) {
            return Err(input_error(format!("tau = {} outside [0, 1]", fmt_rat(&tau))));
        }
        let rule = match (&self.m_rule, &spec) {
            (Some(r), _) => MRule::parse(r)?,
            (None, Some(s)) => s.rule()?,
            (None, None) => default_rule,
        };
        let tol = match (&self.tol, spec.and_then(|s| s.tol)) {
            (Some(t), _) => parse_rat(t)?,
            (None, Some(t)) => t.0,
            (None, None) => rat(1, 1_000_000_000),
        };
        if tol <= int(0) {
            return Err(input_error("tol must be positive"));
        }
        Ok(RunConfig { range, tau, rule, tol, exec: exec_for(self.jobs)? })
    }

    fn model_or(&self, default: &str) -> CliResult<(String, GradedSeriesModel)> {
        match (&self.input, &self.model) {
            (Some(p), _) => Ok((p.display().to_string(), io::model_from_json(&io::read_file(p)?)?)),
            (None, Some(name)) => {
                catalog::model(name).map(|m| (name.clone(), m)).ok_or_else(|| input_error(format!("unknown model {name:?}")))
            }
            (None, None) => Ok((default.to_string(), catalog::model(default).expect("bundled model"))),
        }
    }

    fn family_or(&self, default: Vec<ValuationModel>) -> CliResult<Vec<ValuationModel>> {
        match &self.valuations {
            Some(p) => Ok(io::family_from_json(&io::read_file(p)?)?),
            None => Ok(default),
        }
    }

    fn body_or(&self, default: fn() -> ConvexBody) -> CliResult<ConvexBody> {
        match &self.input {
            Some(p) => Ok(io::polytope_from_json(&io::read_file(p)?)?),
            None => Ok(default()),
        }
    }
}

fn exec_for(jobs: Option<usize>) -> CliResult<Exec> {
    match jobs {
        Some(0) => Err(input_error("--jobs must be at least 1")),
        Some(1) => Ok(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            // A second call in the same process keeps the first pool.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(Exec::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Exec::Sequential),
        None => Ok(Exec::default()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => io::write_file(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_body(c: &Common) -> CliResult {
    let exec = exec_for(c.jobs)?;
    let path = c.input.as_deref().ok_or_else(|| input_error("body needs --in"))?;
    let b = io::polytope_from_json(&io::read_file(path)?)?;
    let mut t = Table::new(["quantity", "value"]);
    t.push(vec!["dim".into(), b.dim().to_string()]);
    t.push(vec!["volume".into(), fmt_rat(&b.volume())]);
    if b.is_full_dimensional() {
        t.push(vec!["barycenter".into(), b.barycenter()?.to_string()]);
        t.push(vec!["radius_lb".into(), fmt_rat(&b.chebyshev_ball()?.1)]);
    }
    if let Some(k) = c.k {
        t.push(vec![format!("count_k{k}"), okounkov::lattice::count_with(&b, k, exec)?.to_string()]);
    }
    emit(c.out.as_deref(), &t.to_csv())
}

fn cmd_series(c: &Common) -> CliResult {
    let cfg = c.config((1, 10), int(0), MRule::One)?;
    let (_, m) = c.model_or("toric_simplex")?;
    if let Some(k) = c.k {
        let body = m.discrete_body(k)?;
        let gaps = m.gap_set(k)?;
        let v: serde_json::Value = serde_json::json!({
            "k": k,
            "d_k": body.len(),
            "D_k": m.big_d_k(k)?,
            "discrete_body": serde_json::from_str::<serde_json::Value>(&io::pointcloud_to_json(&body))
                .map_err(Error::from)?,
            "gap_set": serde_json::from_str::<serde_json::Value>(&io::pointcloud_to_json(&gaps)).map_err(Error::from)?,
        });
        return emit(c.out.as_deref(), &format!("{}\n", serde_json::to_string(&v).map_err(Error::from)?));
    }
    let mut t = Table::new(["k", "d_k", "D_k", "diff"]);
    for row in m.gap_table_with(cfg.range.hi, cfg.exec)?.into_iter().filter(|r| r.k >= cfg.range.lo) {
        t.push(vec![row.k.to_string(), row.d_k.to_string(), row.big_d_k.to_string(), row.diff.to_string()]);
    }
    emit(c.out.as_deref(), &t.to_csv())
}

fn est_str(e: &thresholds::Estimate) -> String {
    match e {
        thresholds::Estimate::Exact(x) => fmt_rat(x),
        thresholds::Estimate::Bracket { lo, hi } => format!("[{},{}]", fmt_rat(lo), fmt_rat(hi)),
    }
}

fn cmd_thresholds(c: &Common) -> CliResult {
    let cfg = c.config((1, 20), rat(1, 2), MRule::CeilTau)?;
    let (_, m) = c.model_or("toric_segment")?;
    let family = c.family_or(vec![ValuationModel::divisorial("p1", m.dim())])?;
    if family.is_empty() {
        return Err(input_error("empty valuation family"));
    }
    let n = m.dim();
    let s_taus = family.iter().map(|v| thresholds::s_tau(&m, v, &cfg.tau, &cfg.tol)).collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new([
        "valuation",
        "k",
        "d_k",
        "m_k",
        "j_head",
        "S_km",
        "Sbar_km",
        "quantum_quantile",
        "S_tau",
        "delta_km",
    ]);
    for k in cfg.range.ks().into_iter().filter(|&k| m.levels().contains(k)) {
        let d = m.d_k(k)?;
        let mk = c.m.unwrap_or_else(|| cfg.rule.eval(d, k, n, &cfg.tau) as usize);
        let delta = thresholds::delta_km_restricted(&m, &family, k, mk)?;
        for (v, st) in family.iter().zip(&s_taus) {
            let j = thresholds::jumping_numbers(&m, v, k)?;
            let head: Vec<String> = j.values.iter().take(3).map(fmt_rat).collect();
            t.push(vec![
                v.label.clone(),
                k.to_string(),
                d.to_string(),
                mk.to_string(),
                head.join(";"),
                fmt_rat(&j.top_average(mk)?),
                fmt_rat(&thresholds::sbar_km(&m, v, k, mk)?),
                fmt_rat(&thresholds::quantum_quantile(&m, v, k, &cfg.tau)?),
                est_str(st),
                delta.value.to_string(),
            ]);
        }
    }
    emit(c.out.as_deref(), &t.to_csv())
}

fn top_vertex(b: &ConvexBody) -> okounkov::Point {
    let p1 = AffineFunctional::p1(b.dim());
    let top = b.vertices().iter().map(|v| p1.eval(v)).max().expect("nonempty body");
    b.vertices().iter().filter(|v| p1.eval(v) == top).max().expect("top vertex").clone()
}

fn run_suite(suite: Suite, c: &Common) -> CliResult<SweepReport> {
    let default_range = match suite {
        Suite::Lowerbound | Suite::Maxp1 => (1, 60),
        Suite::Weierstrass => (1, 50),
        _ => (1, 40),
    };
    let default_rule = if suite == Suite::Deltarate || suite == Suite::Stwosided { MRule::CeilTau } else { MRule::One };
    let cfg = c.config(default_range, rat(1, 2), default_rule)?;
    let (range, exec) = (cfg.range, cfg.exec);
    let nu = rat(1, 10);
    let report = match suite {
        Suite::Ehrhart => {
            let k = c.body_or(catalog::unit_square)?;
            let bodies = estimates::sample_sub_bodies(&k, c.seed, c.samples, &nu)?;
            estimates::verify_uniform_ehrhart(&k, &bodies, &nu, range, exec)?
        }
        Suite::Lowerbound => {
            let half = c.samples.div_ceil(2);
            let mut bodies = estimates::sample_polytopes(2, c.seed, half)?;
            bodies.extend(estimates::sample_polytopes(3, c.seed.wrapping_add(1), c.samples - half)?);
            estimates::verify_lower_bound_constant(&bodies, range, exec)?
        }
        Suite::Concave => {
            let k = c.body_or(catalog::unit_square)?;
            let pairs = estimates::sample_concave_pairs(&k, c.seed, c.samples, &nu)?;
            estimates::verify_concave_sum_bound(&pairs, range, exec)?
        }
        Suite::Cones => {
            let b = c.body_or(catalog::unit_square)?;
            let p1 = AffineFunctional::p1(b.dim());
            let (lo, hi) = b.range(&p1).ok_or(Error::EmptyInput("body"))?;
            let apex = top_vertex(&b);
            let mut all = SweepReport::new("cones", ["k", "ell", "t", "count", "bound"]);
            for ell in [EllRule::HalfK, EllRule::Full, EllRule::SqrtK] {
                let mut r = estimates::verify_cone_counts(&b, &lo, &hi, Some(&apex), ell, range, exec)?;
                r.assertion = format!("apex_{ell:?}");
                all.rows.rows.append(&mut r.rows.rows);
                all.absorb(r);
                let a = &lo + (&hi - &lo) / int(4);
                let bb = &lo + int(3) * (&hi - &lo) / int(4);
                let mut r = estimates::verify_cone_counts(&b, &a, &bb, None, ell, range, exec)?;
                r.assertion = format!("slice_{ell:?}");
                all.rows.rows.append(&mut r.rows.rows);
                all.absorb(r);
            }
            all
        }
        Suite::Maxp1 => {
            let models = match (&c.input, &c.model) {
                (None, None) => catalog::maxp1_models(),
                _ => vec![c.model_or("")?],
            };
            estimates::verify_maxp1(&models, range, None, exec)?
        }
        Suite::Stwosided => {
            let (_, m) = c.model_or("toric_trapezoid")?;
            let v = c.family_or(vec![ValuationModel::divisorial("p1", m.dim())])?.remove(0);
            estimates::verify_s_two_sided(&m, &v, &cfg.tau, &cfg.rule, range, &cfg.tol, exec)?
        }
        Suite::Deltarate => {
            let (_, m) = c.model_or("toric_p2")?;
            let family = c.family_or(catalog::p2_coordinate_family())?;
            estimates::verify_delta_rate(&m, &family, &cfg.tau, &cfg.rule, range, &cfg.tol, exec)?
        }
        Suite::Endpoints => {
            let (_, m) = c.model_or("toric_trapezoid")?;
            let v = c.family_or(vec![ValuationModel::divisorial("p1", m.dim())])?.remove(0);
            estimates::verify_endpoint_limits(&m, &v, range, &cfg.tol, exec)?
        }
        Suite::Weierstrass => estimates::verify_weierstrass(8, range.hi, exec)?,
        Suite::All => {
            let mut all = SweepReport::new("all", ["suite", "passed"]);
            all.grid("seed", c.seed).grid("k_range", format!("{}..={}", range.lo, range.hi));
            for s in [
                Suite::Ehrhart,
                Suite::Lowerbound,
                Suite::Concave,
                Suite::Cones,
                Suite::Maxp1,
                Suite::Stwosided,
                Suite::Deltarate,
                Suite::Endpoints,
                Suite::Weierstrass,
            ] {
                let r = run_suite(s, c)?;
                all.rows.push(vec![r.assertion.clone(), r.passed().to_string()]);
                all.absorb(r);
            }
            all
        }
    };
    Ok(report)
}

fn cmd_verify(suite: Suite, c: &Common) -> CliResult {
    let report = run_suite(suite, c)?;
    match &c.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
            let name = format!("{suite:?}").to_lowercase();
            io::write_file(&dir.join(format!("{name}.json")), &format!("{}\n", report.to_json()))?;
            io::write_file(&dir.join(format!("{name}.csv")), &report.to_csv())?;
        }
        None => println!("{}", report.to_json()),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(report))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Body(c) => cmd_body(c),
        Command::Series(c) => cmd_series(c),
        Command::Thresholds(c) => cmd_thresholds(c),
        Command::Verify { suite, common } => cmd_verify(*suite, common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
        Err(Failure::Verification(r)) => {
            eprintln!("verification failed: {}", r.assertion);
            for w in &r.witnesses {
                eprintln!("  {w}");
            }
            ExitCode::from(3)
        }
    }
}
