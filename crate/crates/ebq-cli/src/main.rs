//! `ebq`: evaluate the R-matrix and run the identity-verification suites.
//!
//! Exit codes: 0 pass, 1 check failure, 2 invalid input, 3 numerical non-convergence.

use clap::{Parser, Subcommand, ValueEnum};
use ebq_core::exec::Exec;
use ebq_core::rmatrix::{assemble, DynamicalParam, PrefactorMode};
use ebq_core::suites::{self, RunConfig, Suite, SCHEMA_ID};
use ebq_core::{AlgebraParams, EbqError, TruncationPolicy, C};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ebq", version, about = "Type-B elliptic dynamical R-matrix evaluation and identity checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Clone)]
struct ParamArgs {
    /// Rank N.
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0.45, allow_hyphen_values = true)]
    q_re: f64,
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    q_im: f64,
    #[arg(long, default_value_t = 4.3, allow_hyphen_values = true)]
    r: f64,
    /// Level c.
    #[arg(long, default_value_t = 1.2, allow_hyphen_values = true)]
    c: f64,
}

impl ParamArgs {
    fn build(&self) -> Result<AlgebraParams, EbqError> {
        let policy = TruncationPolicy::from_env()?;
        AlgebraParams::with_policy(self.n, C::new(self.q_re, self.q_im), C::from(self.r), C::from(self.c), policy)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Prefactor {
    None,
    Rho0,
    RhoHatSquared,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the R-matrix at (u, s) as JSON.
    EvalRmatrix {
        #[command(flatten)]
        params: ParamArgs,
        /// Spectral parameter: `a`, `a+bi` or `a,b`.
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Dynamical vector, N complex values.
        #[arg(long, num_args = 1.., allow_hyphen_values = true, required = true)]
        s: Vec<String>,
        #[arg(long, value_enum, default_value = "none")]
        prefactor: Prefactor,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<String>,
    },
    /// Run verification suites and write the report.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated subset of special, modes, exchange, face, dybe, repLR, vertex, all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        /// Fixed dynamical vector in place of sampled ones.
        #[arg(long, num_args = 1.., allow_hyphen_values = true)]
        s: Option<Vec<String>>,
        /// Tolerance override `check_id=value` (repeatable).
        #[arg(long = "tol")]
        tol: Vec<String>,
        /// Run sweeps on one thread.
        #[arg(long)]
        sequential: bool,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the report schema and every check id.
    Schema,
}

fn parse_complex(s: &str) -> Result<C, EbqError> {
    let bad = || EbqError::InvalidParams(format!("cannot parse complex value '{s}'"));
    if let Some((a, b)) = s.split_once(',') {
        let re = a.trim().parse::<f64>().map_err(|_| bad())?;
        let im = b.trim().parse::<f64>().map_err(|_| bad())?;
        return Ok(C::new(re, im));
    }
    s.trim().parse::<C>().map_err(|_| bad())
}

fn parse_tol(items: &[String]) -> Result<BTreeMap<String, f64>, EbqError> {
    let mut out = BTreeMap::new();
    for it in items {
        let (k, v) = it
            .split_once('=')
            .ok_or_else(|| EbqError::InvalidParams(format!("tolerance override '{it}' is not check_id=value")))?;
        let v: f64 = v.parse().map_err(|_| EbqError::InvalidParams(format!("tolerance '{v}' is not a number")))?;
        out.insert(k.to_string(), v);
    }
    Ok(out)
}

fn emit(v: &Value, out: &Option<String>) -> Result<(), EbqError> {
    let text = serde_json::to_string_pretty(v).expect("report serializes") + "\n";
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| EbqError::InvalidParams(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn schema() -> Value {
    let cplx = json!({"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2});
    let num = json!({"type": ["number", "null"]});
    json!({
        "schema_id": SCHEMA_ID,
        "check_ids": suites::check_ids(),
        "json_schema": {
            "$schema": "https://json-schema.org/draft/2020-12/schema",
            "type": "object",
            "required": ["schema", "seed", "samples", "suites", "params", "tol_overrides", "pass", "reports"],
            "properties": {
                "schema": {"const": SCHEMA_ID},
                "seed": {"type": "integer", "minimum": 0},
                "samples": {"type": "integer", "minimum": 1},
                "suites": {"type": "array", "items": {"type": "string"}},
                "params": {
                    "type": "object",
                    "required": ["n", "q", "r", "c", "p", "p_star", "r_star", "eta", "xi", "policy"],
                    "properties": {"n": {"type": "integer", "minimum": 1}, "q": cplx, "r": cplx, "c": cplx}
                },
                "tol_overrides": {"type": "object", "additionalProperties": {"type": "number"}},
                "pass": {"type": "boolean"},
                "reports": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["check_id", "samples", "max_abs_residual", "max_rel_residual", "tol", "pass", "gate", "notes"],
                        "additionalProperties": false,
                        "properties": {
                            "check_id": {"enum": suites::check_ids()},
                            "samples": {"type": "array"},
                            "max_abs_residual": num,
                            "max_rel_residual": num,
                            "tol": {"type": "number"},
                            "pass": {"type": "boolean"},
                            "gate": {"type": "boolean"},
                            "notes": {"type": "array", "items": {"type": "string"}}
                        }
                    }
                }
            }
        }
    })
}

fn run(cli: Cli) -> Result<bool, EbqError> {
    match cli.cmd {
        Cmd::Schema => {
            emit(&schema(), &None)?;
            Ok(true)
        }
        Cmd::EvalRmatrix { params, u, s, prefactor, out } => {
            let pr = params.build()?;
            let u = parse_complex(&u)?;
            let s = s.iter().map(|x| parse_complex(x)).collect::<Result<Vec<_>, _>>()?;
            let dp = DynamicalParam::new(s, &pr)?;
            let mode = match prefactor {
                Prefactor::None => PrefactorMode::None,
                Prefactor::Rho0 => PrefactorMode::Rho0,
                Prefactor::RhoHatSquared => PrefactorMode::RhoHatSquared,
            };
            emit(&assemble(u, &dp, mode, &pr)?.to_json(), &out)?;
            Ok(true)
        }
        Cmd::Verify { params, suite, seed, samples, s, tol, sequential, out } => {
            let pr = params.build()?;
            let list = Suite::parse_list(&suite)?;
            let mut cfg = RunConfig::new(pr.clone(), seed, samples);
            cfg.tol_overrides = parse_tol(&tol)?;
            if let Some(s) = s {
                cfg.s = Some(s.iter().map(|x| parse_complex(x)).collect::<Result<Vec<_>, _>>()?);
            }
            if sequential {
                cfg.exec = Exec::Sequential;
            }
            let reports = suites::run(&list, &cfg)?;
            let pass = suites::all_pass(&reports);
            let doc = json!({
                "schema": SCHEMA_ID,
                "seed": seed,
                "samples": samples,
                "suites": list.iter().map(|x| x.name()).collect::<Vec<_>>(),
                "params": pr,
                "tol_overrides": cfg.tol_overrides,
                "pass": pass,
                "reports": suites::failing_first(reports),
            });
            emit(&doc, &out)?;
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("ebq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
