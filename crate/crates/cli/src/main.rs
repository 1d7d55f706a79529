//! `dmp`: batch front end for the toolkit.

mod config;
mod parse;

use clap::{Parser, Subcommand};
use config::{read_config, RunConfig, Settings, CONFIG_ENV};
use dmp_core::apartment::{breakpoints, graded_support, mp_lattice, GroupConfig, Level};
use dmp_core::finite_types::{fork_identity, FiniteModule, GF};
use dmp_core::graded::homogeneous_lift;
use dmp_core::measures::{independence_check, verify_relation_measure};
use dmp_core::orbits::{all_orbits, minimality_report, sl2_complete};
use dmp_core::refine::{refine_relation_bounded, DMPPair};
use dmp_core::selftest::{run_all, SelftestConfig};
use dmp_core::solver::{
    assemble_and_invert, default_probe_table, solve_expansion, synthesize_vector, CoefficientMatrix, ExpansionResult,
    MultiplicityVector, RationalVector,
};
use dmp_core::{DmpError, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "dmp", version, about = "Local expansions over F_q((t)) from degenerate Moy-Prasad pairs")]
struct Cli {
    /// JSON file with the same fields as the global flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Filtration lattices and graded supports at a point.
    Lattice {
        #[arg(long)]
        x: String,
        #[arg(long)]
        s: String,
    },
    /// Lift, sl2 completion and minimality probe of a graded element.
    Lift {
        #[arg(long)]
        x: String,
        #[arg(long)]
        s: String,
        /// One-based `i,j,c` triples separated by `;` (`0` for zero).
        #[arg(long, default_value = "0")]
        phi: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        depth: i64,
    },
    /// Breakpoints and interval certificates along a geodesic.
    Breakpoints {
        #[arg(long)]
        x0: String,
        #[arg(long)]
        s0: String,
        #[arg(long)]
        x1: String,
        #[arg(long)]
        s1: String,
    },
    /// Relation record for a coarse pair and a finer point, with checks.
    Refine {
        #[arg(long)]
        y: String,
        #[arg(long)]
        tau: String,
        #[arg(long, default_value = "0")]
        phi: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        s: String,
        /// Random finite modules used for the multiplicity check.
        #[arg(long, default_value_t = 10)]
        modules: usize,
        #[arg(long, default_value_t = 2)]
        ell: u32,
        #[arg(long, default_value_t = 4)]
        a: u32,
    },
    /// Density table on the default probes and its coefficient matrix.
    Measure {
        /// Depth bound the probe levels must exceed.
        #[arg(long, default_value = "0")]
        r: String,
    },
    /// Expansion coefficients from a multiplicity or rational vector.
    Solve {
        /// Stored coefficient matrix; rebuilt from the flags when absent.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value = "0")]
        r: String,
    },
    /// Vector of values on the default probes for given coefficients.
    Synthesize {
        #[arg(long, default_value = "0")]
        r: String,
    },
    /// Full acceptance suite.
    Selftest,
}

fn exit_code(e: &DmpError) -> u8 {
    match e {
        DmpError::Validation { .. } => 2,
        DmpError::Infeasible { .. } | DmpError::Undecided { .. } => 3,
        DmpError::Contract { .. } => 4,
    }
}

fn error_json(e: &DmpError) -> Value {
    json!({ "module": e.module(), "operation": e.operation(), "kind": e.kind(), "message": e.message() })
}

fn io_error(op: &'static str, e: impl std::fmt::Display) -> DmpError {
    DmpError::validation("cli", op, e.to_string())
}

fn read_input(settings: &Settings) -> Result<String> {
    let path = settings.input.as_ref().ok_or_else(|| DmpError::validation("cli", "input", "--input is required"))?;
    std::fs::read_to_string(path).map_err(|e| io_error("input", format!("{}: {e}", path.display())))
}

fn emit(settings: &Settings, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| DmpError::contract("cli", "output", e.to_string()))?;
    match &settings.output {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| io_error("output", format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| DmpError::contract("cli", "output", e.to_string()))
}

/// Outcome of a check that may be out of scope for the instance.
fn check_value(r: Result<bool>) -> Value {
    match r {
        Ok(holds) => json!({ "holds": holds }),
        Err(e) => json!({ "skipped": error_json(&e) }),
    }
}

fn coefficient_matrix(settings: &Settings, r: Level) -> Result<(CoefficientMatrix, dmp_core::measures::MeasureTable)> {
    let (probes, table) = default_probe_table(settings.n, settings.q, r, settings.k)?;
    Ok((assemble_and_invert(&probes, &table)?, table))
}

fn run(command: &Command, st: &Settings) -> Result<(Value, bool)> {
    let ok = |v: Value| Ok((v, true));
    let mut group = GroupConfig::new(st.n, st.q, st.m.unwrap_or(1))?;
    group.allow_small_p = st.allow_small_p;
    group.warn_if_small_p();
    match command {
        Command::Lattice { x, s } => {
            let (x, s) = (parse::point(x)?, parse::level(s)?);
            let cfg = parse::group(st.n, st.q, st.m, &[&x], &[s])?;
            ok(json!({
                "ge": to_value(&mp_lattice(&cfg, &x, s, false)?)?,
                "gt": to_value(&mp_lattice(&cfg, &x, s, true)?)?,
                "support": to_value(&graded_support(&cfg, &x, s)?)?,
                "dual_support": to_value(&graded_support(&cfg, &x, -s)?)?,
            }))
        }
        Command::Lift { x, s, phi, samples, depth } => {
            let (x, s) = (parse::point(x)?, parse::level(s)?);
            parse::group(st.n, st.q, st.m, &[&x], &[s])?;
            let phi = parse::element(&x, -s, st.q, phi)?;
            let pair = DMPPair::new(s, &x, phi)?;
            let hl = homogeneous_lift(&pair.phi);
            let sl2 = match sl2_complete(&x, s, &hl) {
                Ok(t) => json!({ "triple": to_value(&t)?, "brackets_hold": t.brackets_hold() }),
                Err(e) => json!({ "skipped": error_json(&e) }),
            };
            let probe = minimality_report(s, &x, &pair.phi, *samples, *depth, st.seed)?;
            let passed = probe.passed();
            Ok((
                json!({ "pair": to_value(&pair)?, "homogeneous_lift": to_value(&hl)?, "sl2": sl2, "probe": to_value(&probe)? }),
                passed,
            ))
        }
        Command::Breakpoints { x0, s0, x1, s1 } => {
            let (x0, s0, x1, s1) = (parse::point(x0)?, parse::level(s0)?, parse::point(x1)?, parse::level(s1)?);
            parse::group(st.n, st.q, st.m, &[&x0, &x1], &[s0, s1])?;
            let plan = breakpoints(&x0, s0, &x1, s1)?;
            let nominal: Vec<bool> = (0..plan.breakpoints.len()).map(|i| plan.breakpoint_is_nominal(i)).collect();
            ok(json!({ "plan": to_value(&plan)?, "nominal": nominal }))
        }
        Command::Refine { y, tau, phi, x, s, modules, ell, a } => {
            let (y, tau, x, s) = (parse::point(y)?, parse::level(tau)?, parse::point(x)?, parse::level(s)?);
            parse::group(st.n, st.q, st.m, &[&y, &x], &[tau, s])?;
            let coarse = DMPPair::new(tau, &y, parse::element(&y, -tau, st.q, phi)?)?;
            let rec = refine_relation_bounded(&coarse, &x, s, st.bound)?;
            let mut measure_checks = Vec::new();
            for o in all_orbits(st.n) {
                let mut v = check_value(verify_relation_measure(&rec, &o, st.k));
                v["orbit"] = to_value(&o)?;
                measure_checks.push(v);
            }
            let field = GF::new(*ell, *a)?;
            let mut rng = ChaCha8Rng::seed_from_u64(st.seed);
            let mut module_checks = Vec::new();
            let mut all_hold = true;
            for i in 0..*modules {
                let dim = 1 + i % 16;
                let m = FiniteModule::random(&x, s, st.q, &field, dim, &mut rng)?;
                let r = fork_identity(&m, &coarse, &x, s)?;
                all_hold &= r.holds();
                module_checks.push(to_value(&r)?);
            }
            let measures_hold = measure_checks.iter().all(|v| v.get("holds") != Some(&json!(false)));
            Ok((
                json!({ "record": to_value(&rec)?, "measure_checks": measure_checks, "module_checks": module_checks }),
                measures_hold && all_hold,
            ))
        }
        Command::Measure { r } => {
            let (cm, table) = coefficient_matrix(st, parse::level(r)?)?;
            let independent = independence_check(&table)?;
            Ok((
                json!({ "table": to_value(&table)?, "coefficient_matrix": to_value(&cm)?, "triangular": true, "independent": independent }),
                independent,
            ))
        }
        Command::Solve { matrix, r } => {
            let text = read_input(st)?;
            let (vector, r): (Box<dyn dmp_core::refine::ComponentValues>, Level) =
                match serde_json::from_str::<MultiplicityVector>(&text) {
                    Ok(mv) => {
                        let mv = MultiplicityVector::new(mv.r, mv.entries, mv.source)?;
                        let r = mv.r;
                        (Box::new(mv), r)
                    }
                    Err(_) => {
                        let rv: RationalVector =
                            serde_json::from_str(&text).map_err(|e| io_error("solve", format!("unreadable vector: {e}")))?;
                        (Box::new(rv), parse::level(r)?)
                    }
                };
            let cm = match matrix {
                Some(path) => CoefficientMatrix::load(path)?,
                None => coefficient_matrix(st, r)?.0,
            };
            ok(to_value(&solve_expansion(vector.as_ref(), &cm)?)?)
        }
        Command::Synthesize { r } => {
            let c: ExpansionResult =
                serde_json::from_str(&read_input(st)?).map_err(|e| io_error("synthesize", format!("unreadable coefficients: {e}")))?;
            let (cm, table) = coefficient_matrix(st, parse::level(r)?)?;
            if c.k != cm.k || c.lambda_c != cm.lambda_c {
                return Err(DmpError::validation("cli", "synthesize", "coefficients use a different truncation or reference lattice"));
            }
            ok(to_value(&synthesize_vector(&c, &cm.probes, &table)?)?)
        }
        Command::Selftest => {
            let cfg = SelftestConfig { q: st.q, k: st.k, seed: st.seed, ..SelftestConfig::default() };
            let results = run_all(&cfg);
            for r in &results {
                eprintln!("{}", r.line());
            }
            let passed = results.iter().all(|r| r.passed);
            let summary: Vec<Value> = results
                .iter()
                .map(|r| json!({ "criterion": r.id, "name": r.name, "passed": r.passed, "budget_seconds": r.budget_seconds }))
                .collect();
            Ok((json!({ "passed": passed, "criteria": summary }), passed))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = (|| {
        let file = match cli.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from)) {
            Some(p) => Some(read_config(&p)?),
            None => None,
        };
        let settings = cli.run.resolve(file);
        let (value, passed) = run(&cli.command, &settings)?;
        emit(&settings, &value)?;
        if passed {
            Ok(())
        } else {
            Err(DmpError::contract("cli", "check", "a verification in the output failed"))
        }
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
