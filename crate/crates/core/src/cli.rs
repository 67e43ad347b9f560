//! Command-line front end.
//!
//! Exit codes: `0` success, `1` a mathematical check failed, `2` bad input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::dsl::{self, certificate_value};
use crate::lie::{build_algebra, is_nice_basis, nilpotency_step, QuiverLieAlgebra};
use crate::quiver::{automorphism_generators, automorphism_group_order, automorphisms, Quiver};
use crate::random::{random_quiver, rng};
use crate::rational::{format_all, format_rational};
use crate::ricci::{parse_metric, ricci_diagonal_nice, ricci_form, DiagonalMetric};
use crate::soliton::{construct_soliton_metric, construction_levels, diagonal_soliton_feasibility, verify_certificate};
use crate::suite::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "quiver-soliton", version, about = "Nilpotent Lie algebras of quivers and their Ricci soliton metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a quiver file, printing vertex, arrow and path counts.
    Check { file: PathBuf },
    /// Dimension, step, grading, basis and automorphism group order.
    Info {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Construct the soliton metric and verify its certificate.
    Soliton {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Also list N_j, partition sizes and every recursion level.
        #[arg(long)]
        report: bool,
    },
    /// Ricci eigenvalues of a diagonal metric and the soliton feasibility test.
    Ricci {
        file: PathBuf,
        /// Lines of the form `<path> = <p>/<q>`; missing paths default to 1.
        #[arg(long)]
        metric: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Generate seeded random acyclic quivers.
    Random(RandomArgs),
    /// List automorphisms as arrow-permutation cycles.
    Aut {
        file: PathBuf,
        /// Print generators instead once the group is larger than this.
        #[arg(long, default_value_t = 1000)]
        limit: u64,
    },
    /// Export the quiver in DOT format.
    Dot { file: PathBuf },
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long)]
    pub vertices: usize,
    #[arg(long)]
    pub arrows: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Run the full invariant suite on every generated quiver.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn input_error(message: impl std::fmt::Display) -> Self {
        Self { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command),
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                CommandOutcome { code: EXIT_INPUT, stdout: String::new(), stderr: rendered }
            } else {
                CommandOutcome::ok(rendered)
            }
        }
    }
}

pub fn execute(command: Command) -> CommandOutcome {
    let result = match command {
        Command::Check { file } => cmd_check(&file),
        Command::Info { file, json } => cmd_info(&file, json),
        Command::Soliton { file, json, report } => cmd_soliton(&file, json, report),
        Command::Ricci { file, metric, json } => cmd_ricci(&file, metric.as_deref(), json),
        Command::Random(args) => cmd_random(&args),
        Command::Aut { file, limit } => cmd_aut(&file, limit),
        Command::Dot { file } => cmd_dot(&file),
    };
    result.unwrap_or_else(|outcome| outcome)
}

type Outcome = Result<CommandOutcome, CommandOutcome>;

fn read(path: &Path) -> Result<String, CommandOutcome> {
    std::fs::read_to_string(path).map_err(|e| CommandOutcome::input_error(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Quiver, CommandOutcome> {
    let text = read(path)?;
    dsl::parse_acyclic(&text).map_err(|e| CommandOutcome::input_error(format!("{}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> Result<(Quiver, QuiverLieAlgebra), CommandOutcome> {
    let q = load(path)?;
    let alg = build_algebra(&q).map_err(|e| CommandOutcome::input_error(format!("{}: {e}", path.display())))?;
    Ok((q, alg))
}

fn check_failed(stdout: String, message: impl std::fmt::Display) -> CommandOutcome {
    CommandOutcome { code: EXIT_CHECK_FAILED, stdout, stderr: format!("check failed: {message}\n") }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn cmd_check(file: &Path) -> Outcome {
    let q = load(file)?;
    let paths = q.enumerate_paths().expect("validated quivers enumerate");
    let length = paths.last().map_or(0, |p| p.len());
    Ok(CommandOutcome::ok(format!(
        "{} vertices, {} arrows, {} paths, length {}\n",
        q.vertices().len(),
        q.arrow_count(),
        paths.len(),
        length
    )))
}

pub fn cmd_info(file: &Path, as_json: bool) -> Outcome {
    let (q, alg) = load_algebra(file)?;
    let step = nilpotency_step(&alg).map_err(|e| check_failed(String::new(), e))?;
    is_nice_basis(&alg).map_err(|e| check_failed(String::new(), e))?;
    let grading = alg.grading_dims();
    let aut = automorphism_group_order(&q);
    let stdout = if as_json {
        pretty(&json!({
            "dimension": alg.dim(),
            "step": step,
            "grading": grading,
            "paths": alg.names(),
            "nice_basis": true,
            "automorphism_group_order": aut.to_string(),
        }))
    } else {
        let grading: Vec<String> = grading.iter().map(usize::to_string).collect();
        format!(
            "dimension: {}\nstep: {step}\ngrading: ({})\npaths: {}\nnice basis: yes\n|Aut(Q)|: {aut}\n",
            alg.dim(),
            grading.join(","),
            alg.names().join(" ")
        )
    };
    Ok(CommandOutcome::ok(stdout))
}

fn column_table(rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> =
        (0..rows[0].len()).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
    }
    out
}

pub fn cmd_soliton(file: &Path, as_json: bool, report: bool) -> Outcome {
    let (q, alg) = load_algebra(file)?;
    let metric = construct_soliton_metric(&q).map_err(|e| check_failed(String::new(), e))?;
    let cert = verify_certificate(&alg, &metric).map_err(|e| check_failed(String::new(), e))?;
    let levels = if report { Some(construction_levels(&q)) } else { None };

    let stdout = if as_json {
        let mut value = certificate_value(&cert);
        if let Some(levels) = &levels {
            value["levels"] = match levels {
                Ok(levels) => Value::Array(levels.iter().map(level_json).collect()),
                Err(e) => json!({ "error": e.to_string() }),
            };
        }
        pretty(&value)
    } else {
        let mut out = String::new();
        let mut rows = vec![vec!["path".to_string(), "norm²".into(), "ricci".into(), "d".into()]];
        for i in 0..alg.dim() {
            rows.push(vec![
                alg.name(i),
                format_rational(metric.get(i)),
                format_rational(&cert.ricci[i]),
                format_rational(cert.derivation.get(i)),
            ]);
        }
        out.push_str(&column_table(&rows));
        writeln!(out, "c = {}", cert.c).unwrap();
        let c = &cert.checks;
        for (name, value) in [
            ("ricci operator diagonal", Some(c.operator_diagonal)),
            ("ric = -id + d", Some(c.ric_equals_minus_id_plus_d)),
            ("d is a derivation", Some(c.d_is_derivation)),
            ("aut-invariant", Some(c.aut_invariant)),
            ("d = extended d' + a", c.decomposition),
        ] {
            let verdict = match value {
                Some(true) => "ok",
                Some(false) => "FAILED",
                None => "n/a",
            };
            writeln!(out, "{name}: {verdict}").unwrap();
        }
        if let Some(levels) = &levels {
            out.push_str(&render_levels(levels));
        }
        out
    };

    let levels_ok = levels.as_ref().is_none_or(|l| l.is_ok());
    if cert.all_passed() && levels_ok {
        Ok(CommandOutcome::ok(stdout))
    } else if !levels_ok {
        let e = levels.unwrap().unwrap_err();
        Err(check_failed(stdout, e))
    } else {
        Err(check_failed(stdout, format!("{:?}", cert.checks)))
    }
}

fn level_json(level: &crate::soliton::LevelReport) -> Value {
    json!({
        "length": level.length,
        "arrows": level.quiver.arrows().iter().map(|a| a.name.clone()).collect::<Vec<_>>(),
        "vertices": level.levels.as_ref().map(|l| l.vertices.iter().map(|v| json!({
            "vertex": v.vertex,
            "starting": v.starting_count,
            "p1": v.p1_count,
            "n": format_rational(&v.n),
        })).collect::<Vec<_>>()),
    })
}

fn render_levels(levels: &Result<Vec<crate::soliton::LevelReport>, crate::soliton::SolitonError>) -> String {
    let levels = match levels {
        Ok(levels) => levels,
        Err(e) => return format!("levels: FAILED ({e})\n"),
    };
    let mut out = String::new();
    for (depth, level) in levels.iter().enumerate() {
        let arrows: Vec<&str> = level.quiver.arrows().iter().map(|a| a.name.as_str()).collect();
        writeln!(out, "level {depth}: length {}, arrows {}", level.length, arrows.join(" ")).unwrap();
        match &level.levels {
            Some(data) => {
                for v in &data.vertices {
                    writeln!(
                        out,
                        "  {}: #S = {}, #P1 = {}, #P2 = {}, N = {}",
                        v.vertex,
                        v.starting_count,
                        v.p1_count,
                        v.starting_count * v.p1_count,
                        format_rational(&v.n)
                    )
                    .unwrap();
                }
            }
            None => writeln!(out, "  abelian: all norms 1, d = id").unwrap(),
        }
    }
    out
}

pub fn cmd_ricci(file: &Path, metric_file: Option<&Path>, as_json: bool) -> Outcome {
    let (_, alg) = load_algebra(file)?;
    let metric = match metric_file {
        None => DiagonalMetric::ones(alg.dim()),
        Some(path) => {
            let text = read(path)?;
            parse_metric(&text, &alg).map_err(|e| CommandOutcome::input_error(format!("{}: {e}", path.display())))?
        }
    };
    let nice = ricci_diagonal_nice(&alg, &metric).map_err(|e| check_failed(String::new(), e))?;
    let full = ricci_form(&alg, &metric).map_err(|e| check_failed(String::new(), e))?;
    if full.diagonal.as_ref() != Some(&nice) {
        return Err(check_failed(String::new(), "general and nice-basis Ricci formulas disagree"));
    }
    let feasible = diagonal_soliton_feasibility(&alg, &metric).map_err(|e| check_failed(String::new(), e))?;
    let stdout = if as_json {
        pretty(&json!({
            "paths": alg.names(),
            "norms_squared": format_all(metric.norms_squared()),
            "ricci_eigenvalues": format_all(&nice),
            "off_diagonal_zero": true,
            "feasible": feasible.is_some(),
            "c": feasible.as_ref().map(|f| format_rational(&f.c)),
            "derivation_diagonal": feasible.as_ref().map(|f| format_all(f.derivation.entries())),
        }))
    } else {
        let mut rows = vec![vec!["path".to_string(), "norm²".into(), "ricci".into()]];
        for (i, r) in nice.iter().enumerate() {
            rows.push(vec![alg.name(i), format_rational(metric.get(i)), format_rational(r)]);
        }
        let mut out = column_table(&rows);
        out.push_str("off-diagonal entries: all zero\n");
        match &feasible {
            Some(f) => writeln!(
                out,
                "soliton: c = {}, d = ({})",
                format_rational(&f.c),
                format_all(f.derivation.entries()).join(", ")
            )
            .unwrap(),
            None => out.push_str("soliton: infeasible (no c with ric - c id a diagonal derivation)\n"),
        }
        out
    };
    Ok(CommandOutcome::ok(stdout))
}

pub fn cmd_random(args: &RandomArgs) -> Outcome {
    if args.vertices < 2 || args.arrows == 0 || args.count == 0 {
        return Err(CommandOutcome::input_error("need --vertices >= 2, --arrows >= 1 and --count >= 1"));
    }
    let mut rng = rng(args.seed);
    let mut out = String::new();
    for k in 0..args.count {
        let q = random_quiver(&mut rng, args.vertices, args.arrows);
        if args.verify {
            let report = run_suite(&q);
            if !report.ok() {
                let mut message = format!("quiver {} (seed {}):\n{}", k + 1, args.seed, dsl::serialize(&q));
                for failure in &report.failures {
                    writeln!(message, "  {}: {}", failure.check, failure.reason).unwrap();
                }
                write!(out, "# quiver {}\n{}", k + 1, dsl::serialize(&q)).unwrap();
                return Err(check_failed(out, message));
            }
        } else {
            if k > 0 {
                out.push('\n');
            }
            write!(out, "# quiver {}\n{}", k + 1, dsl::serialize(&q)).unwrap();
        }
    }
    if args.verify {
        writeln!(out, "verified {} quivers", args.count).unwrap();
    }
    Ok(CommandOutcome::ok(out))
}

pub fn cmd_aut(file: &Path, limit: u64) -> Outcome {
    let q = load(file)?;
    let order = automorphism_group_order(&q);
    let mut out = String::new();
    if order <= num_bigint::BigUint::from(limit) {
        for f in automorphisms(&q) {
            writeln!(out, "{}", f.display(&q)).unwrap();
        }
    } else {
        writeln!(out, "# |Aut(Q)| = {order} exceeds --limit; generators:").unwrap();
        for f in automorphism_generators(&q) {
            writeln!(out, "{}", f.display(&q)).unwrap();
        }
    }
    Ok(CommandOutcome::ok(out))
}

pub fn cmd_dot(file: &Path) -> Outcome {
    Ok(CommandOutcome::ok(dsl::export_dot(&load(file)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_rejects_bad_parameters() {
        for (v, a, c) in [(4, 0, 1), (1, 3, 1), (4, 3, 0)] {
            let out = run(["quiver-soliton", "random", "--vertices", &v.to_string(), "--arrows", &a.to_string(), "--count", &c.to_string()]);
            assert_eq!(out.code, EXIT_INPUT);
        }
    }

    #[test]
    fn random_is_reproducible() {
        let args = ["quiver-soliton", "random", "--vertices", "5", "--arrows", "7", "--seed", "11", "--count", "3"];
        let first = run(args);
        assert_eq!(first.code, 0);
        assert_eq!(first, run(args));
        assert_eq!(first.stdout.matches("# quiver").count(), 3);
    }

    #[test]
    fn unknown_subcommand_is_input_error() {
        assert_eq!(run(["quiver-soliton", "frobnicate"]).code, EXIT_INPUT);
        assert_eq!(run(["quiver-soliton", "--help"]).code, EXIT_OK);
    }
}
