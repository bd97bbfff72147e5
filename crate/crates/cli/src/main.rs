//! Batch front end: JSON in, canonical JSON out, stable exit codes.
//!
//! Exit codes: 0 success/found, 1 solver not-found, 2 malformed input,
//! 3 numerical failure, 4 determinant obstruction, 5 check failure.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use lagrep_core::config::Config;
use lagrep_core::error::Error;
use lagrep_core::json as cjson;
use lagrep_core::numcore;
use lagrep_core::qham::{run_formcheck, FormcheckConfig};
use lagrep_core::reps::{self, VerdictRegime};
use lagrep_core::solver::{self, SolveStatus};

const EXIT_OK: u8 = 0;
const EXIT_NOT_FOUND: u8 = 1;
const EXIT_MALFORMED: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;
const EXIT_CHECK_FAILED: u8 = 5;

#[derive(Parser)]
#[command(name = "lagrep", version, about = "Unitary tuple verification, decomposition and search")]
struct Cli {
    /// Input file; stdin when omitted
    #[arg(short, long, global = true)]
    input: Option<PathBuf>,

    /// Output file; stdout when omitted
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Seed override for randomized commands
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Configuration override, repeatable: --set solver.restarts=8
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    /// Worker thread count for parallel sections
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closure, β-fixedness and Lagrangian decomposability of a tuple
    Verify,
    /// Split one unitary into two Lagrangian subspaces
    Decompose,
    /// Search for a closed tuple in prescribed conjugacy classes
    Solve,
    /// Numerical verification of the 2-form axioms
    Formcheck,
    /// Double coset label of a unitary
    Orbit,
    /// Reduced property suite over all modules
    Selftest,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn malformed(e: impl std::fmt::Display) -> Failure {
        Failure { code: EXIT_MALFORMED, message: e.to_string() }
    }

    fn numerical(e: impl std::fmt::Display) -> Failure {
        Failure { code: EXIT_NUMERICAL, message: e.to_string() }
    }
}

/// Classifies library errors arising after the input was decoded:
/// input-shape problems stay "malformed", the rest are numerical.
fn compute_failure(e: Error) -> Failure {
    match e {
        Error::Malformed(_)
        | Error::DimensionMismatch { .. }
        | Error::UnknownConfigKey(_)
        | Error::InvalidConfigValue { .. }
        | Error::NonFiniteEntries
        | Error::NotUnitary { .. }
        | Error::NotSymmetric { .. } => Failure::malformed(e),
        other => Failure::numerical(other),
    }
}

fn read_input(cli: &Cli) -> Result<String, Failure> {
    match &cli.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::malformed(format!("cannot read {}: {e}", path.display()))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::malformed(format!("cannot read stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn write_output(cli: &Cli, value: &Value) -> Result<(), Failure> {
    let mut text = cjson::to_canonical_string(value);
    text.push('\n');
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::numerical(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_config(cli: &Cli) -> Result<Config, Failure> {
    let mut config = Config::default();
    if let Ok(path) = std::env::var("LAGREP_CONFIG") {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::malformed(format!("LAGREP_CONFIG {path}: {e}")))?;
        config.apply_defaults_json(&text).map_err(Failure::malformed)?;
    }
    for kv in &cli.set {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Failure::malformed(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        config.set(key.trim(), value.trim()).map_err(Failure::malformed)?;
    }
    Ok(config)
}

fn num(f: f64) -> Value {
    match serde_json::Number::from_f64(f) {
        Some(n) => Value::Number(n),
        None => Value::Null,
    }
}

fn sorted_angle_array(mut angles: Vec<f64>) -> Value {
    angles.sort_by(|a, b| a.partial_cmp(b).expect("angles are finite"));
    Value::Array(angles.into_iter().map(num).collect())
}

fn cmd_verify(input: &str, config: &Config) -> Result<(Value, u8), Failure> {
    let tol = &config.tol;
    let value = cjson::parse(input).map_err(Failure::malformed)?;
    let rep = cjson::rep_from_value(&value, tol).map_err(Failure::malformed)?;

    let product_residual = rep.product_residual();
    let closed = product_residual <= tol.product;
    let beta_fix_defect = reps::beta_fix_defect(&rep);
    let beta_fixed = closed && beta_fix_defect <= tol.fix;

    let mut report = Map::new();
    let mut diagnostics = Map::new();
    diagnostics.insert("beta_fix_defect".into(), num(beta_fix_defect));
    diagnostics.insert("product_residual".into(), num(product_residual));

    let mut sigma0 = false;
    let mut lagrangian = false;
    if closed {
        let (s0, s0_witness) = reps::is_sigma0_lagrangian(&rep, tol).map_err(compute_failure)?;
        sigma0 = s0;
        let (lag, certificate) = reps::is_lagrangian(&rep, tol).map_err(compute_failure)?;
        lagrangian = lag;
        if let Some(cert) = certificate {
            report.insert("psi".into(), cjson::matrix_to_value(&cert.psi));
            report.insert("phi".into(), cjson::matrix_to_value(&cert.phi));
            report.insert("witnesses".into(), cjson::witness_to_value(&cert.witness));
            diagnostics.insert("psi_symmetry_defect".into(), num(cert.psi_symmetry_defect));
            let regime = match cert.regime {
                VerdictRegime::BetaFixed => "beta_fixed",
                VerdictRegime::DistinctSpectrum(_) => "distinct_spectrum",
                VerdictRegime::UnverifiedHypothesis => "unverified_hypothesis",
            };
            diagnostics.insert("regime".into(), Value::String(regime.into()));
        } else if let Some(w) = s0_witness {
            report.insert("witnesses".into(), cjson::witness_to_value(&w));
        }
    }
    report.insert("beta_fixed".into(), Value::Bool(beta_fixed));
    report.insert("closed".into(), Value::Bool(closed));
    report.insert("diagnostics".into(), Value::Object(diagnostics));
    report.insert("lagrangian".into(), Value::Bool(lagrangian));
    report.insert("sigma0_lagrangian".into(), Value::Bool(sigma0));
    Ok((Value::Object(report), EXIT_OK))
}

fn cmd_decompose(input: &str, config: &Config) -> Result<(Value, u8), Failure> {
    let tol = &config.tol;
    let value = cjson::parse(input).map_err(Failure::malformed)?;
    let u = cjson::matrix_from_value(&value).map_err(Failure::malformed)?;
    numcore::check_unitary(&u, tol).map_err(Failure::malformed)?;
    let (l1, l2) = lagrep_core::lagrange::decompose_two_lagrangians(&u, tol)
        .map_err(compute_failure)?;
    let rebuilt = lagrep_core::lagrange::sigma_compose(&l1, &l2).map_err(compute_failure)?;
    let residual = (&rebuilt - &u).norm();
    Ok((
        json!({
            "l1": cjson::lagrangian_to_value(&l1),
            "l2": cjson::lagrangian_to_value(&l2),
            "residual": num(residual),
        }),
        EXIT_OK,
    ))
}

fn cmd_solve(input: &str, config: &Config, seed: Option<u64>) -> Result<(Value, u8), Failure> {
    let value = cjson::parse(input).map_err(Failure::malformed)?;
    let mut problem = cjson::problem_from_value(&value).map_err(Failure::malformed)?;
    if let Some(seed) = seed {
        problem.seed = seed;
    }
    let obj = value.as_object().expect("validated by problem_from_value");
    if !obj.contains_key("restarts") {
        problem.restarts = config.solver.restarts;
    }
    if !obj.contains_key("max_iter") {
        problem.max_iter = config.solver.max_iter;
    }
    let result = solver::solve(&problem, &config.solver, &config.tol).map_err(compute_failure)?;
    let code = match result.status {
        SolveStatus::Found => EXIT_OK,
        SolveStatus::NotFound => EXIT_NOT_FOUND,
        SolveStatus::InfeasibleDeterminant => EXIT_INFEASIBLE,
    };
    Ok((cjson::result_to_value(&result), code))
}

fn cmd_formcheck(input: &str, seed: Option<u64>) -> Result<(Value, u8), Failure> {
    let text = if input.trim().is_empty() { "{}" } else { input };
    let value = cjson::parse(text).map_err(Failure::malformed)?;
    let mut cfg = cjson::formcheck_config_from_value(&value).map_err(Failure::malformed)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let report = run_formcheck(&cfg).map_err(compute_failure)?;
    let code = if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok((cjson::formcheck_report_to_value(&report), code))
}

fn cmd_orbit(input: &str, config: &Config) -> Result<(Value, u8), Failure> {
    let tol = &config.tol;
    let value = cjson::parse(input).map_err(Failure::malformed)?;
    let u = cjson::matrix_from_value(&value).map_err(Failure::malformed)?;
    numcore::check_unitary(&u, tol).map_err(Failure::malformed)?;
    let label = lagrep_core::duality::kk_orbit_label(&u, tol).map_err(compute_failure)?;
    let eig = numcore::eig_unitary(&u, tol).map_err(compute_failure)?;
    Ok((
        json!({
            "angles_u": sorted_angle_array(eig.angles),
            "angles_utu": sorted_angle_array(label.angles),
        }),
        EXIT_OK,
    ))
}

struct SelfCheck {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, body: impl FnOnce() -> Result<String, String>) -> SelfCheck {
    match body() {
        Ok(detail) => SelfCheck { name, pass: true, detail },
        Err(detail) => SelfCheck { name, pass: false, detail },
    }
}

fn cmd_selftest(config: &Config, seed: Option<u64>) -> Result<(Value, u8), Failure> {
    use rand::SeedableRng;

    let tol = config.tol.clone();
    let scfg = config.solver.clone();
    let seed = seed.unwrap_or(1);
    let mut checks = Vec::new();

    checks.push(check("eig_reconstruction", || {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0_f64;
        for n in 1..=4 {
            let u = numcore::haar_unitary_with(n, &mut rng);
            let eig = numcore::eig_unitary(&u, &tol).map_err(|e| e.to_string())?;
            worst = worst.max((eig.reconstruct() - u).norm());
        }
        if worst <= tol.recon(4) {
            Ok(format!("max residual {worst:.3e}"))
        } else {
            Err(format!("max residual {worst:.3e}"))
        }
    }));

    checks.push(check("beta_involution", || {
        let mut worst = 0.0_f64;
        for (n, l) in [(2usize, 3usize), (3, 4)] {
            let (_, rep) =
                solver::planted_unitary_problem(n, l, seed + n as u64, &tol).map_err(|e| e.to_string())?;
            worst = worst.max(reps::beta(&reps::beta(&rep)).distance(&rep));
        }
        if worst <= 1e-11 {
            Ok(format!("max defect {worst:.3e}"))
        } else {
            Err(format!("max defect {worst:.3e}"))
        }
    }));

    checks.push(check("sigma0_roundtrip", || {
        let (_, rep, _) =
            solver::planted_lagrangian_problem(2, 3, seed + 10, &tol).map_err(|e| e.to_string())?;
        let (ok, witness) = reps::is_sigma0_lagrangian(&rep, &tol).map_err(|e| e.to_string())?;
        if !ok {
            return Err("planted chain not recognized".into());
        }
        let witness = witness.ok_or("missing witnesses")?;
        let rebuilt = reps::rep_from_lagrangians(&witness).map_err(|e| e.to_string())?;
        let d = rebuilt.distance(&rep);
        if d <= 1e-9 {
            Ok(format!("rebuild distance {d:.3e}"))
        } else {
            Err(format!("rebuild distance {d:.3e}"))
        }
    }));

    checks.push(check("lagrangian_certificate", || {
        use rand::SeedableRng;
        let (_, rep, _) =
            solver::planted_lagrangian_problem(2, 3, seed + 20, &tol).map_err(|e| e.to_string())?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed + 21);
        let g = numcore::haar_unitary_with(2, &mut rng);
        let moved = rep.conjugated_by(&g);
        let (ok, cert) = reps::is_lagrangian(&moved, &tol).map_err(|e| e.to_string())?;
        let cert = cert.ok_or("missing certificate")?;
        if !ok {
            return Err("conjugated chain not recognized".into());
        }
        let defect = numcore::sym_defect(&cert.psi);
        if defect <= tol.sym {
            Ok(format!("psi symmetry defect {defect:.3e}"))
        } else {
            Err(format!("psi symmetry defect {defect:.3e}"))
        }
    }));

    checks.push(check("solver_unitary", || {
        let (problem, _) =
            solver::planted_unitary_problem(2, 3, seed + 30, &tol).map_err(|e| e.to_string())?;
        let result = solver::solve(&problem, &scfg, &tol).map_err(|e| e.to_string())?;
        if result.status != SolveStatus::Found {
            return Err(format!("status {:?}", result.status));
        }
        if !solver::verify_solution(&problem, &result, &scfg, &tol).map_err(|e| e.to_string())? {
            return Err("verifier rejected the solution".into());
        }
        Ok(format!("product residual {:.3e}", result.product_residual.unwrap_or(f64::NAN)))
    }));

    checks.push(check("solver_lagrangian", || {
        let (problem, _, _) =
            solver::planted_lagrangian_problem(2, 3, seed + 40, &tol).map_err(|e| e.to_string())?;
        let result = solver::solve(&problem, &scfg, &tol).map_err(|e| e.to_string())?;
        if result.status != SolveStatus::Found {
            return Err(format!("status {:?}", result.status));
        }
        if !solver::verify_solution(&problem, &result, &scfg, &tol).map_err(|e| e.to_string())? {
            return Err("verifier rejected the solution".into());
        }
        let rep = result.rep.as_ref().ok_or("missing rep")?;
        let (s0, _) = reps::is_sigma0_lagrangian(rep, &tol).map_err(|e| e.to_string())?;
        if !s0 {
            return Err("solution is not sigma0-lagrangian".into());
        }
        Ok("found and verified".into())
    }));

    checks.push(check("formcheck_product", || {
        let cfg = FormcheckConfig { n: 2, l: 3, samples: 6, seed, h: 1e-5 };
        let report = run_formcheck(&cfg).map_err(|e| e.to_string())?;
        if report.pass {
            Ok("axioms hold on product points".into())
        } else {
            let failing: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.as_str())
                .collect();
            Err(format!("failing checks: {}", failing.join(", ")))
        }
    }));

    checks.push(check("formcheck_single_class", || {
        let cfg = FormcheckConfig { n: 3, l: 1, samples: 6, seed, h: 1e-5 };
        let report = run_formcheck(&cfg).map_err(|e| e.to_string())?;
        if report.pass {
            Ok("axioms hold on a single class".into())
        } else {
            Err("single class axioms failed".into())
        }
    }));

    checks.push(check("duality_intertwining", || {
        use lagrep_core::duality;
        let mut worst = 0.0_f64;
        for k in 0..3u64 {
            let (_, ru) =
                solver::planted_unitary_problem(2, 3, seed + 50 + k, &tol).map_err(|e| e.to_string())?;
            let (_, rv) =
                solver::planted_unitary_problem(2, 3, seed + 60 + k, &tol).map_err(|e| e.to_string())?;
            let pairs = duality::PairTuple::new(
                ru.matrices.into_iter().zip(rv.matrices).collect(),
                &tol,
            )
            .map_err(|e| e.to_string())?;
            let left = duality::eta_l(&duality::alpha_l(&pairs), &tol).map_err(|e| e.to_string())?;
            let right = reps::beta(&duality::eta_l(&pairs, &tol).map_err(|e| e.to_string())?);
            worst = worst.max(left.distance(&right));
        }
        if worst <= 1e-10 {
            Ok(format!("max defect {worst:.3e}"))
        } else {
            Err(format!("max defect {worst:.3e}"))
        }
    }));

    checks.push(check("orbit_invariance", || {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed + 70);
        let mut worst = 0.0_f64;
        for _ in 0..3 {
            let u = numcore::haar_unitary_with(3, &mut rng);
            let o1 = numcore::haar_orthogonal_with(3, &mut rng).map(numcore::Complex::from);
            let o2 = numcore::haar_orthogonal_with(3, &mut rng).map(numcore::Complex::from);
            let moved = &o1 * &u * o2.transpose();
            let a = lagrep_core::duality::kk_orbit_label(&u, &tol).map_err(|e| e.to_string())?;
            let b = lagrep_core::duality::kk_orbit_label(&moved, &tol).map_err(|e| e.to_string())?;
            worst = worst.max(numcore::angle_multiset_distance(&a.angles, &b.angles));
        }
        if worst <= 1e-9 {
            Ok(format!("max label distance {worst:.3e}"))
        } else {
            Err(format!("max label distance {worst:.3e}"))
        }
    }));

    checks.push(check("json_roundtrip", || {
        let (problem, rep) =
            solver::planted_unitary_problem(2, 3, seed + 80, &tol).map_err(|e| e.to_string())?;
        let ps = cjson::to_canonical_string(&cjson::problem_to_value(&problem));
        let pv = cjson::parse(&ps).map_err(|e| e.to_string())?;
        let back = cjson::problem_from_value(&pv).map_err(|e| e.to_string())?;
        if ps != cjson::to_canonical_string(&cjson::problem_to_value(&back)) {
            return Err("problem encoding is not canonical".into());
        }
        let rs = cjson::to_canonical_string(&cjson::rep_to_value(&rep));
        let rv = cjson::parse(&rs).map_err(|e| e.to_string())?;
        let back = cjson::rep_from_value(&rv, &tol).map_err(|e| e.to_string())?;
        if rs != cjson::to_canonical_string(&cjson::rep_to_value(&back)) {
            return Err("rep encoding is not canonical".into());
        }
        Ok("byte-identical round trips".into())
    }));

    let pass = checks.iter().all(|c| c.pass);
    let report = json!({
        "checks": Value::Array(
            checks
                .iter()
                .map(|c| {
                    json!({
                        "detail": c.detail,
                        "name": c.name,
                        "pass": c.pass,
                    })
                })
                .collect(),
        ),
        "pass": pass,
    });
    Ok((report, if pass { EXIT_OK } else { EXIT_CHECK_FAILED }))
}

fn run(cli: &Cli) -> Result<(Value, u8), Failure> {
    let config = build_config(cli)?;
    match cli.command {
        Command::Verify => cmd_verify(&read_input(cli)?, &config),
        Command::Decompose => cmd_decompose(&read_input(cli)?, &config),
        Command::Solve => cmd_solve(&read_input(cli)?, &config, cli.seed),
        Command::Formcheck => cmd_formcheck(&read_input(cli)?, cli.seed),
        Command::Orbit => cmd_orbit(&read_input(cli)?, &config),
        Command::Selftest => cmd_selftest(&config, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .is_err()
        {
            eprintln!("warning: worker pool already initialized; --jobs ignored");
        }
    }
    match run(&cli) {
        Ok((value, code)) => {
            if let Err(f) = write_output(&cli, &value) {
                eprintln!("error: {}", f.message);
                return ExitCode::from(f.code);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
