//! `coherent`: batch front end for invariant weak-order extension.
//!
//! Exit codes: 0 completed, 1 usage or load error, 2 scenario admits no
//! extension, 3 oracle disagrees with the solver.

mod report;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coherent_core::dot::hasse_dot;
use coherent_core::oracle::{forced_from_orders, oracle_extensions, DEFAULT_CAP};
use coherent_core::solver::ExtensionResult;
use coherent_core::{
    check_commutativity, forced_relation, load_scenario, novel_pairs, seed, verify_extension,
    GeneratorSpec, RelationState, Scenario, Solver,
};

use report::*;

#[derive(Parser, Debug)]
#[command(
    name = "coherent",
    version,
    about = "Invariant weak-order extension solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate, check commutativity, saturate and report consistency.
    Check(Options),
    /// Exact forced verdicts for every pair, plus novel predictions.
    Forced(Options),
    /// Search for a complete coherent extension and audit it.
    Extend(Options),
    /// Brute-force certification of the solver on a small window.
    Oracle(Options),
    /// Print the scenario document.
    Dump(Options),
}

#[derive(Args, Debug)]
struct Options {
    /// Scenario document to load.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    scenario: Option<PathBuf>,
    /// Generator spec, e.g. two-track:5, koopmans:1, homothetic:1,2, dated:2,3,
    /// random:5,2,0.3,total,commutative.
    #[arg(long)]
    gen: Option<String>,
    /// Seed for random generator specs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Backward coherency rule: auto enables it for commutative scenarios.
    #[arg(long, value_enum, default_value_t = Strong::Auto)]
    strong: Strong,
    /// Cross-check forced verdicts against brute-force enumeration.
    #[arg(long)]
    oracle: bool,
    /// Write a Graphviz diagram of the extension.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Largest window the brute-force oracle will enumerate.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Write the machine-readable report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strong {
    Auto,
    On,
    Off,
}

const EXIT_UNSAT: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load(opts: &Options) -> Result<Scenario> {
    if let Some(path) = &opts.scenario {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return load_scenario(&text).with_context(|| format!("loading {}", path.display()));
    }
    let spec: GeneratorSpec = opts.gen.as_deref().unwrap_or_default().parse()?;
    Ok(spec.with_seed(opts.seed).build()?)
}

fn strong_mode(opts: &Options, s: &Scenario) -> Result<bool> {
    match opts.strong {
        Strong::Auto => Ok(s.is_commutative()),
        Strong::Off => Ok(false),
        Strong::On if s.is_commutative() => Ok(true),
        Strong::On => bail!("--strong on requires a scenario declared commutative"),
    }
}

struct Run<'s> {
    scenario: &'s Scenario,
    solver: Solver<'s>,
    base: RelationState,
    report: RunReport,
    text: String,
}

impl<'s> Run<'s> {
    fn new(command: &str, s: &'s Scenario, strong: bool) -> Result<Self> {
        let solver = Solver::new(s, strong)?;
        let base = solver.base_state();
        let seed_state = seed(s);
        let witness = base.cycle_witness();
        let report = RunReport {
            command: command.to_owned(),
            scenario: summarize(s),
            strong,
            window_relative: true,
            commutativity_violations: violations(s, &check_commutativity(s)),
            consistent: witness.is_none(),
            cycle_witness: witness.map(|x| s.label(x).to_owned()),
            counts: Counts {
                seed: 0,
                closure_forced: 0,
                exact_forced: None,
                novel: None,
            },
            seed_pairs: facts_out(s, seed_state.facts()),
            closure_forced: facts_out(s, base.facts()),
            exact_forced: None,
            novel: None,
            verdicts: None,
            extension: None,
            oracle: None,
        };
        let mut text = String::new();
        writeln!(
            text,
            "scenario   {} ({} elements, {} generators, {})",
            s.name(),
            s.len(),
            s.generators().len(),
            if s.is_commutative() {
                "commutative"
            } else {
                "non-commutative"
            }
        )?;
        writeln!(
            text,
            "rules      T + C1{}",
            if strong { " + C2" } else { "" }
        )?;
        writeln!(
            text,
            "commute    {} violation(s)",
            report.commutativity_violations.len()
        )?;
        match &report.cycle_witness {
            None => writeln!(text, "closure    consistent")?,
            Some(w) => writeln!(text, "closure    INCONSISTENT: {w} ≻ {w} is forced")?,
        }
        writeln!(
            text,
            "pairs      {} seed, {} after closure",
            report.seed_pairs.len(),
            report.closure_forced.len()
        )?;
        Ok(Run {
            scenario: s,
            solver,
            base,
            report,
            text,
        })
    }

    fn finish(mut self, opts: &Options, started: Instant) -> Result<()> {
        let r = &mut self.report;
        r.counts.seed = r.seed_pairs.len();
        r.counts.closure_forced = r.closure_forced.len();
        r.counts.exact_forced = r.exact_forced.as_ref().map(Vec::len);
        r.counts.novel = r.novel.as_ref().map(Vec::len);
        writeln!(
            self.text,
            "elapsed    {:.3}s",
            started.elapsed().as_secs_f64()
        )?;
        print!("{}", self.text);
        if let Some(path) = &opts.json {
            let mut json = serde_json::to_string_pretty(&self.report)?;
            json.push('\n');
            fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }

    fn forced(&mut self, with_oracle: bool, cap: usize) -> Result<u8> {
        let s = self.scenario;
        if !self.base.is_consistent() {
            writeln!(self.text, "forced     scenario admits no extension")?;
            return Ok(EXIT_UNSAT);
        }
        let forced = match self.solver.forced_set() {
            Ok(f) => f,
            Err(coherent_core::Error::Unsatisfiable) => {
                writeln!(self.text, "forced     scenario admits no extension")?;
                return Ok(EXIT_UNSAT);
            }
            Err(e) => return Err(e.into()),
        };
        let full = forced_relation(s.len(), &forced);
        let novel = novel_pairs(&full, s, self.solver.is_strong());
        self.report.exact_forced = Some(facts_out(s, full.facts()));
        self.report.novel = Some(facts_out(s, novel.iter().copied()));
        self.report.verdicts = Some(verdicts_out(s, &forced));

        let free = forced.values().filter(|v| !v.status.is_forced()).count();
        writeln!(
            self.text,
            "forced     {} pair(s) forced, {free} free within the window",
            forced.len() - free
        )?;
        for f in &novel {
            writeln!(
                self.text,
                "  novel    {} {} {}",
                s.label(f.x),
                if f.strict { "≻" } else { "≽" },
                s.label(f.y)
            )?;
        }

        if with_oracle {
            let orders = oracle_extensions(s, cap)?;
            let mut mismatches = Vec::new();
            if orders.is_empty() {
                mismatches.push("oracle finds no extension but the solver does".to_owned());
            } else {
                let brute = forced_from_orders(s.len(), &orders);
                for (pair, v) in &forced {
                    if brute[pair].surviving != v.surviving {
                        mismatches.push(format!(
                            "({}, {}): solver {:?}, oracle {:?}",
                            s.label(pair.0),
                            s.label(pair.1),
                            v.surviving,
                            brute[pair].surviving
                        ));
                    }
                }
            }
            writeln!(
                self.text,
                "oracle     {} extension(s), {} mismatch(es)",
                orders.len(),
                mismatches.len()
            )?;
            let bad = !mismatches.is_empty();
            self.report.oracle = Some(OracleOut {
                cap,
                extensions: orders.len(),
                solver_satisfiable: true,
                mismatches,
            });
            if bad {
                return Ok(EXIT_MISMATCH);
            }
        }
        Ok(0)
    }

    fn extend(&mut self, dot: Option<&PathBuf>) -> Result<u8> {
        let s = self.scenario;
        let result = if self.base.is_consistent() {
            self.solver.complete_from(self.base.clone())
        } else {
            self.solver.complete()
        };
        match result {
            ExtensionResult::Sat(e) => {
                let verification = verify_extension(s, &e);
                let classes = classes_out(s, &e);
                writeln!(
                    self.text,
                    "extension  SAT, {} class(es), verification {}",
                    classes.len(),
                    if verification.all_passed() {
                        "passed"
                    } else {
                        "FAILED"
                    }
                )?;
                for c in &verification.checks {
                    writeln!(
                        self.text,
                        "  {:<26}{}",
                        c.name,
                        if c.passed { "ok" } else { "FAIL" }
                    )?;
                }
                self.report.extension = Some(ExtensionOut {
                    satisfiable: true,
                    classes,
                    verification: checks_out(&verification.checks),
                    certificate: None,
                });
                if let Some(path) = dot {
                    fs::write(path, hasse_dot(s, &e))
                        .with_context(|| format!("writing {}", path.display()))?;
                    writeln!(self.text, "dot        {}", path.display())?;
                }
                Ok(0)
            }
            ExtensionResult::Unsat(cert) => {
                let out = certificate_out(s, &cert);
                write!(self.text, "extension  UNSAT")?;
                if let Some(c) = &out.seed_cycle {
                    write!(self.text, "; seed closure cycles through {c}")?;
                }
                for [x, y] in &out.dead_pairs {
                    write!(self.text, "; no option for {{{x}, {y}}}")?;
                }
                writeln!(self.text)?;
                self.report.extension = Some(ExtensionOut {
                    satisfiable: false,
                    classes: Vec::new(),
                    verification: Vec::new(),
                    certificate: Some(out),
                });
                Ok(EXIT_UNSAT)
            }
        }
    }

    fn oracle(&mut self, cap: usize) -> Result<u8> {
        let s = self.scenario;
        let orders = oracle_extensions(s, cap)?;
        let solved = self.solver.complete();
        let mut mismatches = Vec::new();
        if solved.is_sat() != !orders.is_empty() {
            mismatches.push(format!(
                "existence: solver {}, oracle {} extension(s)",
                if solved.is_sat() { "SAT" } else { "UNSAT" },
                orders.len()
            ));
        }
        if let ExtensionResult::Sat(e) = &solved {
            let verification = verify_extension(s, e);
            for c in verification.checks.iter().filter(|c| !c.passed) {
                mismatches.push(format!("solver extension fails {}", c.name));
            }
        }
        // survivors must themselves be coherent extensions
        for o in &orders {
            if !verify_extension(s, &o.to_state()).all_passed() {
                mismatches.push(format!(
                    "oracle candidate {:?} fails verification",
                    o.levels()
                ));
                break;
            }
        }
        if solved.is_sat() && !orders.is_empty() {
            let exact = self.solver.forced_set()?;
            let brute = forced_from_orders(s.len(), &orders);
            for (pair, v) in &exact {
                if brute[pair].surviving != v.surviving {
                    mismatches.push(format!(
                        "({}, {}): solver {:?}, oracle {:?}",
                        s.label(pair.0),
                        s.label(pair.1),
                        v.surviving,
                        brute[pair].surviving
                    ));
                }
            }
            let full = forced_relation(s.len(), &exact);
            self.report.exact_forced = Some(facts_out(s, full.facts()));
            self.report.verdicts = Some(verdicts_out(s, &brute));
        }
        writeln!(
            self.text,
            "oracle     {} extension(s) on {} elements (cap {cap}); solver {}",
            orders.len(),
            s.len(),
            if solved.is_sat() { "SAT" } else { "UNSAT" }
        )?;
        writeln!(self.text, "diff       {} mismatch(es)", mismatches.len())?;
        for m in &mismatches {
            writeln!(self.text, "  {m}")?;
        }
        let code = if mismatches.is_empty() {
            0
        } else {
            EXIT_MISMATCH
        };
        self.report.oracle = Some(OracleOut {
            cap,
            extensions: orders.len(),
            solver_satisfiable: solved.is_sat(),
            mismatches,
        });
        Ok(code)
    }
}

fn run(cli: Cli) -> Result<u8> {
    let started = Instant::now();
    let (name, opts) = match &cli.command {
        Command::Check(o) => ("check", o),
        Command::Forced(o) => ("forced", o),
        Command::Extend(o) => ("extend", o),
        Command::Oracle(o) => ("oracle", o),
        Command::Dump(o) => ("dump", o),
    };
    let s = load(opts)?;

    if let Command::Dump(_) = cli.command {
        let mut json = s.to_json();
        json.push('\n');
        match &opts.json {
            Some(path) => {
                fs::write(path, json).with_context(|| format!("writing {}", path.display()))?
            }
            None => print!("{json}"),
        }
        return Ok(0);
    }

    let strong = strong_mode(opts, &s)?;
    let mut run = Run::new(name, &s, strong)?;
    let code = match cli.command {
        Command::Check(_) => 0,
        Command::Forced(_) => run.forced(opts.oracle, opts.cap)?,
        Command::Extend(_) => run.extend(opts.dot.as_ref())?,
        Command::Oracle(_) => {
            if s.len() > opts.cap {
                bail!(coherent_core::Error::CapExceeded {
                    n: s.len(),
                    cap: opts.cap
                });
            }
            run.oracle(opts.cap)?
        }
        Command::Dump(_) => unreachable!(),
    };
    run.finish(opts, started)?;
    Ok(code)
}
