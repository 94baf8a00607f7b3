//! Command-line front end: model listing, correlator queries, named checks,
//! the full suite and oracle cache files.

use crate::constraints::{cache_path, check_ids, run_check, CheckParams, ConstraintError, Report};
use crate::correlators::{CorrelatorKey, Insertion, Oracle};
use crate::exactnum::fmt_rat;
use crate::model::TargetModel;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Environment variable naming the oracle cache directory.
pub const CACHE_ENV: &str = "HODGEVIR_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(name = "hodgevir", version, about = "Exact checks of Virasoro constraints for Hodge integrals")]
struct Cli {
    /// Emit structured JSON instead of the text table.
    #[arg(long, global = true)]
    json: bool,
    /// Oracle cache directory (overrides HODGEVIR_CACHE_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// List the built-in target models.
    Models,
    /// Evaluate one correlator.
    Correlator {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 0)]
        genus: u32,
        #[arg(long, default_value_t = 0)]
        degree: u32,
        /// Comma-separated: `tauK` (point) or `tauK(1)`, `tauK(w)` (p1).
        #[arg(long, value_delimiter = ',')]
        insertions: Vec<String>,
        /// Comma-separated Chern characters of the Hodge bundle: `ch1,ch3`.
        #[arg(long, value_delimiter = ',')]
        hodge: Vec<String>,
    },
    /// Run one named check.
    Check {
        id: String,
        #[command(flatten)]
        flags: CheckFlags,
    },
    /// Run a suite of checks; `full` runs every acceptance check in order.
    Suite { name: String },
    /// Move oracle caches in and out of the cache directory.
    Cache {
        #[command(subcommand)]
        action: CacheCmd,
    },
}

#[derive(Debug, Subcommand)]
enum CacheCmd {
    /// Write the cached values for a model to a file.
    Export {
        path: PathBuf,
        #[arg(long, default_value = "point")]
        model: String,
    },
    /// Validate a cache file and merge it into the cache directory.
    Import {
        path: PathBuf,
        #[arg(long, default_value = "point")]
        model: String,
    },
}

/// Unset flags take the check's pinned values (see the README table).
#[derive(Debug, Args)]
struct CheckFlags {
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    n: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<i64>,
    #[arg(long)]
    k1: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    genus: Option<u32>,
    /// Total t-degree of the truncation; pinned per check when unset.
    #[arg(long)]
    t_deg: Option<u32>,
    /// Largest descendant level; pinned per check when unset.
    #[arg(long)]
    level: Option<u32>,
    /// Largest s-degree; pinned per check when unset.
    #[arg(long)]
    s_cap: Option<u32>,
    /// Largest Novikov degree; pinned per check when unset.
    #[arg(long)]
    q_max: Option<u32>,
    /// Largest genus; pinned per check when unset.
    #[arg(long)]
    genus_max: Option<u32>,
}

enum Failure {
    Usage(String),
    Checks,
}

/// Parses `argv` (program name first) and runs the command, writing the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run_with(argv: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
                return 0;
            }
            let _ = write!(err, "{text}");
            return 2;
        }
    };
    let cache_dir = cli.cache_dir.clone().or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
    match dispatch(&cli, cache_dir, out) {
        Ok(()) => 0,
        Err(Failure::Checks) => 1,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

pub fn run(argv: impl IntoIterator<Item = OsString>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn model(name: &str) -> Result<TargetModel, Failure> {
    TargetModel::builtin(name).map_err(|e| usage(format!("{e}; built-in models are `point` and `p1`")))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(usage)
}

fn dispatch(cli: &Cli, cache_dir: Option<PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Models => {
            let models = [TargetModel::point(), TargetModel::p1()];
            if cli.json {
                let v: Vec<serde_json::Value> = models
                    .iter()
                    .map(|m| {
                        serde_json::json!({
                            "name": m.name, "rank": m.n, "dim": m.d,
                            "euler": fmt_rat(&m.euler),
                            "novikov": m.novikov,
                        })
                    })
                    .collect();
                emit(out, &format!("{}\n", serde_json::to_string_pretty(&v).expect("json")))
            } else {
                let text: String = models.iter().map(|m| format!("{m}\n")).collect();
                emit(out, &text)
            }
        }
        Cmd::Correlator { model: name, genus, degree, insertions, hodge } => {
            let m = model(name)?;
            let ins = insertions.iter().map(|s| parse_insertion(&m, s)).collect::<Result<Vec<_>, _>>()?;
            let hodge = hodge.iter().map(|s| parse_hodge(s)).collect::<Result<Vec<_>, _>>()?;
            let o = Oracle::new(m, (*degree).max(2));
            load_cache(&o, cache_dir.as_deref());
            let v = o.correlator(*genus, *degree, &ins, &hodge).map_err(usage)?;
            save_cache(&o, cache_dir.as_deref())?;
            let key = CorrelatorKey::new(name, *genus, *degree, &ins, &hodge);
            if cli.json {
                let j = serde_json::json!({ "key": key.to_string(), "value": fmt_rat(&v) });
                emit(out, &format!("{}\n", serde_json::to_string_pretty(&j).expect("json")))
            } else {
                emit(out, &format!("{}\n", fmt_rat(&v)))
            }
        }
        Cmd::Check { id, flags } => {
            let p = CheckParams {
                model: flags.model.clone(),
                n: flags.n,
                m: flags.m,
                k1: flags.k1,
                l: flags.l,
                genus: flags.genus,
                t_deg: flags.t_deg,
                level: flags.level,
                s_cap: flags.s_cap,
                q_max: flags.q_max,
                genus_max: flags.genus_max,
                cache_dir,
                ..Default::default()
            };
            let r = run_check(id, &p).map_err(check_error)?;
            emit(out, &if cli.json { format!("{}\n", r.to_json()) } else { r.to_string() })?;
            if r.passed() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Cmd::Suite { name } => {
            if name != "full" {
                return Err(usage(format!("unknown suite `{name}`; available: full")));
            }
            let p = CheckParams { cache_dir, ..Default::default() };
            let reports: Vec<Result<Report, ConstraintError>> =
                check_ids().par_iter().map(|id| run_check(id, &p)).collect();
            let reports = reports.into_iter().collect::<Result<Vec<_>, _>>().map_err(check_error)?;
            let passed = reports.iter().filter(|r| r.passed()).count();
            if cli.json {
                emit(out, &format!("{}\n", serde_json::to_string_pretty(&reports).expect("json")))?;
            } else {
                let mut text: String = reports.iter().map(|r| r.to_string()).collect();
                text.push_str(&format!("suite full: {passed}/{} checks passed\n", reports.len()));
                emit(out, &text)?;
            }
            if passed == reports.len() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Cmd::Cache { action } => cache(action, cache_dir.as_deref(), out),
    }
}

fn check_error(e: ConstraintError) -> Failure {
    match e {
        ConstraintError::UnknownCheck(id) => usage(format!("unknown check `{id}`; available: {}", check_ids().join(", "))),
        other => usage(other),
    }
}

fn cache(action: &CacheCmd, dir: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match action {
        CacheCmd::Export { path, model: name } => {
            let o = Oracle::new(model(name)?, 2);
            load_cache(&o, dir);
            let text = o.export_cache();
            std::fs::write(path, &text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let n = text.lines().count().saturating_sub(1);
            emit(out, &format!("exported {n} entries to {}\n", path.display()))
        }
        CacheCmd::Import { path, model: name } => {
            let dir = dir.ok_or_else(|| usage(format!("no cache directory; pass --cache-dir or set {CACHE_ENV}")))?;
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let o = Oracle::new(model(name)?, 2);
            load_cache(&o, Some(dir));
            let n = o.import_cache(&text);
            if n == 0 && text.lines().count() > 1 {
                return Err(usage(format!("{}: header mismatch or corrupt entries; nothing imported", path.display())));
            }
            save_cache(&o, Some(dir))?;
            emit(out, &format!("imported {n} entries into {}\n", dir.display()))
        }
    }
}

fn load_cache(o: &Oracle, dir: Option<&Path>) {
    if let Some(dir) = dir {
        if let Ok(text) = std::fs::read_to_string(cache_path(dir, o)) {
            o.import_cache(&text);
        }
    }
}

fn save_cache(o: &Oracle, dir: Option<&Path>) -> Result<(), Failure> {
    let Some(dir) = dir else { return Ok(()) };
    std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let p = cache_path(dir, o);
    std::fs::write(&p, o.export_cache()).map_err(|e| usage(format!("{}: {e}", p.display())))
}

/// `tauK` for the point, `tauK(1)` or `tauK(w)` for P^1.
fn parse_insertion(m: &TargetModel, s: &str) -> Result<Insertion, Failure> {
    let bad = || usage(format!("bad insertion `{s}`; expected tauK, tauK(1) or tauK(w)"));
    let rest = s.trim().strip_prefix("tau").ok_or_else(bad)?;
    let (k, class) = match rest.split_once('(') {
        Some((k, c)) => (k, Some(c.strip_suffix(')').ok_or_else(bad)?)),
        None => (rest, None),
    };
    let k: u32 = k.parse().map_err(|_| bad())?;
    let a = match (m.n, class) {
        (1, None | Some("1")) => 0,
        (2, Some("1")) => 0,
        (2, Some("w")) => 1,
        (2, None) => return Err(usage(format!("`{s}`: p1 insertions need a class, tauK(1) or tauK(w)"))),
        _ => return Err(bad()),
    };
    Ok((k, a))
}

/// `chK` with `K` odd; even characters vanish and are rejected.
fn parse_hodge(s: &str) -> Result<u32, Failure> {
    let bad = || usage(format!("bad Hodge class `{s}`; expected ch1, ch3, ..."));
    let k: u32 = s.trim().strip_prefix("ch").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if k % 2 == 0 {
        return Err(usage(format!("`{s}`: only odd Chern characters ch1, ch3, ... are supported")));
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insertion_grammar() {
        let pt = TargetModel::point();
        let p1 = TargetModel::p1();
        assert_eq!(parse_insertion(&pt, "tau4").ok(), Some((4, 0)));
        assert_eq!(parse_insertion(&p1, "tau2(w)").ok(), Some((2, 1)));
        assert_eq!(parse_insertion(&p1, "tau0(1)").ok(), Some((0, 0)));
        assert!(parse_insertion(&p1, "tau2").is_err());
        assert!(parse_insertion(&pt, "tau2(w)").is_err());
        assert!(parse_insertion(&pt, "t4").is_err());
    }

    #[test]
    fn hodge_grammar() {
        assert_eq!(parse_hodge("ch3").ok(), Some(3));
        assert!(parse_hodge("ch2").is_err());
        assert!(parse_hodge("c1").is_err());
    }
}
