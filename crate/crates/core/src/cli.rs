//! Command-line front end. Exit codes: 0 success or optimal, 1 usage,
//! input or schema error, 2 infeasible, 3 solver timeout, 4 failed check.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::ilp::{build_model, compute_coefficients};
use crate::platform::FaultState;
use crate::scenario::{FaultAction, FaultKind, Scenario};
use crate::simulator::{audit_applied, run_scenario, Simulator};
use crate::solver::{solve, SolverConfig, Status};
use crate::theorems::{check_all, oracle_sweep};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "noc-realloc",
    version,
    about = "Fault-tolerant application allocation on a CU mesh"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Force the orientation constraints on.
    #[arg(long, overrides_with = "no_orientation")]
    pub orientation: bool,
    /// Force the orientation constraints off.
    #[arg(long)]
    pub no_orientation: bool,
    /// Solver wall-clock budget per solve.
    #[arg(long, value_name = "N")]
    pub timeout_ms: Option<u64>,
    /// Accept a majority of the replicas that answered.
    #[arg(long)]
    pub degraded_vote: bool,
    /// Accepted for scripting; the tool never uses randomness.
    #[arg(long)]
    pub seedless: bool,
    /// Only 0 is accepted.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the allocation program once for the scenario's final fault state.
    Solve {
        scenario: PathBuf,
        /// Previous allocation (JSON `{n_cus, placement}`).
        #[arg(long)]
        x_old: Option<PathBuf>,
        /// Write the resulting allocation as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the model in LP text format.
        #[arg(long)]
        lp: Option<PathBuf>,
        /// Write the platform graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the fault schedule and write a JSONL trace.
    Simulate {
        scenario: PathBuf,
        /// Trace output path.
        #[arg(long, short)]
        out: PathBuf,
        /// Optional CSV of (t, thrust, command).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the final allocation as JSON.
        #[arg(long = "final")]
        final_path: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Check the objective coefficients of the scenario's dimensions.
    Verify {
        scenario: PathBuf,
        /// Break the coefficients on purpose to exercise the failure path.
        #[arg(long, hide = true)]
        corrupt_coefficients: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Compare solver and brute-force oracle over all small fault sets.
    OracleCheck {
        scenario: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_faults: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Interactive fault injection.
    Repl {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

/// Sets up logging from `NOC_REALLOC_LOG` (quiet, info or debug).
pub fn init_logging() {
    let level = match std::env::var("NOC_REALLOC_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Off,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
}

fn load(path: &Path, common: &Common) -> Result<Scenario> {
    if common.seed.is_some_and(|s| s != 0) {
        return Err(Error::Scenario(
            "randomness is not supported; only --seed 0 is accepted".into(),
        ));
    }
    let mut s = Scenario::load(path)?;
    if common.orientation {
        s.options.orientation = true;
    }
    if common.no_orientation {
        s.options.orientation = false;
    }
    if let Some(t) = common.timeout_ms {
        s.options.solver.timeout_ms = t;
    }
    if common.degraded_vote {
        s.options.degraded_vote = true;
    }
    s.validate()?;
    Ok(s)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))
}

/// Crash state after replaying the scenario's schedule.
pub fn final_crash_state(s: &Scenario) -> FaultState {
    let n = s.platform.rows * s.platform.cols;
    let mut f = FaultState::healthy(n);
    for e in s.faults.iter().filter(|e| e.kind == FaultKind::Crash) {
        f.faulty[e.cu] = e.action == FaultAction::Inject;
    }
    f
}

fn cmd_solve(
    path: &Path,
    x_old: Option<&Path>,
    out_path: Option<&Path>,
    lp: Option<&Path>,
    dot: Option<&Path>,
    common: &Common,
    out: &mut dyn Write,
) -> Result<i32> {
    let s = load(path, common)?;
    let g = s.platform()?;
    let reg = s.registry()?;
    let f = final_crash_state(&s);
    let previous = match x_old {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Scenario(format!("{}: {e}", p.display())))?;
            Some(serde_json::from_str::<Allocation>(&text).map_err(|e| Error::Scenario(e.to_string()))?)
        }
        None => None,
    };
    let model = build_model(&g, &reg, &f, previous.as_ref(), s.options.build_options())?;
    if let Some(p) = lp {
        write_file(p, &model.to_lp_string())?;
    }
    if let Some(p) = dot {
        write_file(p, &g.to_dot(Some(&f)))?;
    }
    let sol = solve(&model, &s.options.solver_config());
    let status = serde_json::to_value(sol.status)?;
    writeln!(out, "status: {}", status.as_str().unwrap_or("?"))?;
    writeln!(out, "objective: {}", sol.objective)?;
    writeln!(out, "variables: {}, rows: {}", model.n_vars(), model.rows.len())?;
    if let Some(a) = sol.allocation(&model) {
        write!(out, "{}", a.render_grid(&g, &reg, &f))?;
        write!(out, "{}", model.solution_to_string(&sol.x))?;
        if let Some(p) = out_path {
            write_file(p, &(serde_json::to_string_pretty(&a)? + "\n"))?;
        }
    }
    Ok(match sol.status {
        Status::Optimal => EXIT_OK,
        Status::Infeasible => EXIT_INFEASIBLE,
        Status::TimedOut => EXIT_TIMEOUT,
    })
}

fn cmd_simulate(
    path: &Path,
    trace: &Path,
    csv: Option<&Path>,
    final_path: Option<&Path>,
    common: &Common,
    out: &mut dyn Write,
) -> Result<i32> {
    let s = load(path, common)?;
    let outcome = run_scenario(&s)?;
    write_file(trace, &outcome.trace_jsonl())?;
    if let Some(p) = csv {
        write_file(p, &outcome.plant_csv())?;
    }
    let g = s.platform()?;
    let reg = s.registry()?;
    let st = outcome.stats;
    writeln!(
        out,
        "events: {}, solves: {}, applies: {}, drops: {}, reallocations: {}, failed votes: {}",
        st.events, st.solves, st.applies, st.drops, st.reallocations, st.failed_votes
    )?;
    let f = final_crash_state(&s);
    if let Some(a) = &outcome.final_allocation {
        writeln!(out, "final allocation:")?;
        write!(out, "{}", a.render_grid(&g, &reg, &f))?;
        for row in a.to_matrix().rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        if let Some(p) = final_path {
            write_file(p, &(serde_json::to_string_pretty(a)? + "\n"))?;
        }
    }
    let bad = audit_applied(&g, &reg, s.options.build_options(), &outcome.applied)?;
    if !bad.is_empty() {
        writeln!(out, "infeasible applied allocations at ticks {bad:?}")?;
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(path: &Path, corrupt: bool, common: &Common, out: &mut dyn Write) -> Result<i32> {
    let s = load(path, common)?;
    let g = s.platform()?;
    let reg = s.registry()?;
    let mut coef = compute_coefficients(&reg, &g)?;
    if corrupt {
        let last = coef.alpha.len() - 1;
        coef.alpha[0] = coef.alpha[last];
        coef.realloc_weight = coef.beta;
    }
    let reports = check_all(&coef, &reg);
    writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?;
    Ok(if reports.iter().all(|r| r.holds) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn cmd_oracle_check(path: &Path, max_faults: usize, common: &Common, out: &mut dyn Write) -> Result<i32> {
    let s = load(path, common)?;
    let g = s.platform()?;
    let reg = s.registry()?;
    let cfg: SolverConfig = s.options.solver_config();
    let report = oracle_sweep(&g, &reg, s.options.build_options(), &cfg, max_faults)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    writeln!(out, "{}", if report.passed() { "pass" } else { "fail" })?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn parse_kind(word: &str) -> Option<FaultKind> {
    match word {
        "crash" => Some(FaultKind::Crash),
        "computational" | "comp" => Some(FaultKind::Computational),
        _ => None,
    }
}

/// Reads commands from `input` until `quit` or end of input.
pub fn repl(scenario: &Scenario, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32> {
    let mut sim = Simulator::new(scenario)?;
    write!(out, "{}", sim.render())?;
    let mut line = String::new();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Ok(EXIT_OK);
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            ["quit"] | ["exit"] => return Ok(EXIT_OK),
            ["show"] => {
                writeln!(out, "t = {}", sim.state().clock)?;
                write!(out, "{}", sim.render())?;
            }
            ["step"] => {
                sim.step()?;
                writeln!(out, "t = {}", sim.state().clock)?;
            }
            [verb @ ("fault" | "recover"), cu, kind] => {
                let action = if *verb == "fault" {
                    FaultAction::Inject
                } else {
                    FaultAction::Recover
                };
                let (Ok(cu), Some(kind)) = (cu.parse::<usize>(), parse_kind(kind)) else {
                    writeln!(out, "error: usage: {verb} <cu> <crash|computational>")?;
                    continue;
                };
                if let Err(e) = sim.inject(cu, kind, action) {
                    writeln!(out, "error: {e}")?;
                    continue;
                }
                sim.step()?;
                sim.settle(8)?;
                writeln!(out, "t = {}", sim.state().clock)?;
            }
            _ => writeln!(out, "error: unknown command; try fault, recover, step, show, quit")?,
        }
    }
}

/// Runs a parsed command, writing normal output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Solve {
            scenario,
            x_old,
            out: out_path,
            lp,
            dot,
            common,
        } => cmd_solve(
            &scenario,
            x_old.as_deref(),
            out_path.as_deref(),
            lp.as_deref(),
            dot.as_deref(),
            &common,
            out,
        ),
        Command::Simulate {
            scenario,
            out: trace,
            csv,
            final_path,
            common,
        } => cmd_simulate(&scenario, &trace, csv.as_deref(), final_path.as_deref(), &common, out),
        Command::Verify {
            scenario,
            corrupt_coefficients,
            common,
        } => cmd_verify(&scenario, corrupt_coefficients, &common, out),
        Command::OracleCheck {
            scenario,
            max_faults,
            common,
        } => cmd_oracle_check(&scenario, max_faults, &common, out),
        Command::Repl { scenario, common } => {
            let s = load(&scenario, &common)?;
            let stdin = std::io::stdin();
            repl(&s, &mut stdin.lock(), out)
        }
    }
}

/// Parses `args` and runs; errors become exit code 1 with a message on
/// standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli, &mut out) {
        Ok(code) => code,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
