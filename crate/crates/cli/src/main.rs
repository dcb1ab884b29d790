//! Command-line front end for the reasoning engine: answer queries with
//! optional traces, enumerate an action's transitions, emit logic-program
//! translations, solve the world views of program files, and run the two
//! evaluation routes side by side to compare them.

use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ak_core::domain::{ActionKind, Domain, FluentId, FluentLiteral, Query, TestCondition};
use ak_core::elp::solve::{world_views_with_budget, DEFAULT_SEARCH_BUDGET};
use ak_core::elp::BeliefSet;
use ak_core::engine::{entails, EngineConfig, Outcome, TraceStep, Verdict, VerdictMode};
use ak_core::parser::{parse_domain, parse_elp, parse_query, render_program};
use ak_core::semantics::{
    initial_situation, render_situation, successors, truth_in_situation, Situation, ThreeValued,
};
use ak_core::translate::{crosscheck, ground, translate_domain, translate_query_rules};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const EXIT_HELP: &str = "\
Exit codes:
  0   yes / success (agreement for crosscheck, all cases passing for --suite)
  1   no
  2   unknown
  3   failed — some branch ended in the failure situation (worldviews: none exist)
  4   cross-check disagreement, or at least one failing suite case
  10  invalid input or configuration
  11  file not found or unreadable";

#[derive(Debug, Parser)]
#[command(
    name = "ak",
    version,
    about = "Reason about actions, sensing and plans, and translate them to epistemic logic programs",
    after_help = EXIT_HELP
)]
struct Cli {
    /// Run every `.case` file under a directory as a regression suite.
    #[arg(long, value_name = "DIR")]
    suite: Option<PathBuf>,

    #[command(flatten)]
    flags: RunFlags,

    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Debug, Args)]
struct RunFlags {
    /// How branch outcomes combine into a verdict.
    #[arg(long, value_enum, default_value_t = Mode::Default, global = true)]
    mode: Mode,

    /// Maximum iterations a single while loop may run on one branch.
    #[arg(long, value_name = "N", default_value_t = 10_000, global = true)]
    loop_budget: usize,

    /// Grounding depth for translations: a number of actions, or `auto` to
    /// infer it from the plan.
    #[arg(long, value_name = "N|auto", value_parser = parse_depth, default_value = "auto", global = true)]
    depth: Depth,

    /// Ground over every action chain up to the depth instead of only the
    /// situations the plan itself can visit.
    #[arg(long, global = true)]
    full_universe: bool,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Trace verbosity: 0 = verdict only, 1 = one line per branch, 2 = full
    /// step-by-step traces.
    #[arg(long, value_name = "0|1|2", default_value_t = 0, global = true)]
    trace: u8,

    /// Refuse domains with more fluents than this.
    #[arg(long, value_name = "N", default_value_t = 24, global = true)]
    max_fluents: usize,

    /// Print the translation with its situation variables instead of
    /// grounding it (translate only).
    #[arg(long, global = true)]
    emit_schematic: bool,

    /// Read the query from a file instead of the command line.
    #[arg(long, value_name = "FILE", global = true)]
    query_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Default,
    StrictVacuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy)]
enum Depth {
    Auto,
    Fixed(usize),
}

fn parse_depth(s: &str) -> Result<Depth, String> {
    if s == "auto" {
        return Ok(Depth::Auto);
    }
    s.parse::<usize>()
        .map(Depth::Fixed)
        .map_err(|_| format!("expected a number or `auto`, got `{s}`"))
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Answer a query against a domain and print the verdict.
    Check {
        /// Domain description file.
        domain: PathBuf,
        /// Query text such as `bulbFixed after [checkSwitch].`; omit it when
        /// using --query-file.
        query: Option<String>,
    },
    /// Print the initial situation and each successor for one action.
    Transitions {
        /// Domain description file.
        domain: PathBuf,
        /// Action name.
        action: String,
    },
    /// Compile a domain, and optionally a query, to a logic program.
    ///
    /// Without a query the program keeps its situation variables; with one
    /// it is grounded at --depth unless --emit-schematic is given.
    Translate {
        /// Domain description file.
        domain: PathBuf,
        /// Query text; omit it when using --query-file or for domain rules only.
        query: Option<String>,
    },
    /// Enumerate the world views of a logic program file.
    Worldviews {
        /// Program file.
        program: PathBuf,
    },
    /// Answer a query with the plan engine and with the translated program,
    /// then compare the two routes.
    Crosscheck {
        /// Domain description file.
        domain: PathBuf,
        /// Query text; omit it when using --query-file.
        query: Option<String>,
    },
}

/// Let a closed pipe (e.g. `ak ... | head`) end the process quietly
/// instead of panicking on the broken-pipe write error.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are successes; anything else is a usage
            // error and lands in the error band of the exit-code table.
            let code = if e.use_stderr() { 10 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(error_exit(&err))
        }
    }
}

/// Unreadable files exit 11; every other error 10.
fn error_exit(err: &anyhow::Error) -> u8 {
    if err.chain().any(|c| c.downcast_ref::<std::io::Error>().is_some()) {
        11
    } else {
        10
    }
}

fn run(cli: Cli) -> Result<u8> {
    if cli.flags.loop_budget == 0 {
        bail!("--loop-budget must be positive");
    }
    if cli.flags.max_fluents == 0 {
        bail!("--max-fluents must be positive");
    }
    if cli.flags.trace > 2 {
        bail!("--trace must be 0, 1 or 2");
    }
    let out = Output::new(&cli.flags);
    match (cli.suite, cli.command) {
        (Some(_), Some(_)) => bail!("pass either --suite or a subcommand, not both"),
        (Some(dir), None) => cmd_suite(&dir, &cli.flags, &out),
        (None, Some(cmd)) => match cmd {
            Cmd::Check { domain, query } => cmd_check(&domain, query, &cli.flags, &out),
            Cmd::Transitions { domain, action } => {
                cmd_transitions(&domain, &action, &cli.flags, &out)
            }
            Cmd::Translate { domain, query } => cmd_translate(&domain, query, &cli.flags, &out),
            Cmd::Worldviews { program } => cmd_worldviews(&program, &out),
            Cmd::Crosscheck { domain, query } => cmd_crosscheck(&domain, query, &cli.flags, &out),
        },
        (None, None) => bail!("nothing to do; pass a subcommand or --suite (see --help)"),
    }
}

// ---------------------------------------------------------------------------
// Output plumbing

struct Output {
    format: Format,
    trace: u8,
    color: bool,
}

impl Output {
    fn new(flags: &RunFlags) -> Output {
        let color = std::env::var_os("AK_COLOR").map_or(true, |v| v != "0")
            && std::io::stdout().is_terminal();
        Output { format: flags.format, trace: flags.trace, color }
    }

    fn paint(&self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    fn verdict(&self, v: Verdict) -> String {
        let code = match v {
            Verdict::Yes => "32",
            Verdict::No | Verdict::Failed => "31",
            Verdict::Unknown => "33",
        };
        self.paint(code, v.as_str())
    }

    fn emit_json(&self, value: &Value) -> Result<()> {
        println!("{}", serde_json::to_string(value)?);
        Ok(())
    }
}

fn verdict_exit(v: Verdict) -> u8 {
    match v {
        Verdict::Yes => 0,
        Verdict::No => 1,
        Verdict::Unknown => 2,
        Verdict::Failed => 3,
    }
}

fn parse_verdict(s: &str) -> Option<Verdict> {
    match s {
        "yes" => Some(Verdict::Yes),
        "no" => Some(Verdict::No),
        "unknown" => Some(Verdict::Unknown),
        "failed" => Some(Verdict::Failed),
        _ => None,
    }
}

/// States as sorted fluent-name lists, the whole situation sorted too, so
/// JSON output is byte-stable for equal inputs.
fn situation_value(d: &Domain, sit: &Situation) -> Value {
    let mut states: Vec<Vec<String>> = sit
        .iter()
        .map(|s| {
            let mut names: Vec<String> = d
                .fluents()
                .filter(|f| s.contains(*f))
                .map(|f| d.fluent_name(f).to_string())
                .collect();
            names.sort();
            names
        })
        .collect();
    states.sort();
    json!(states)
}

fn cond_text(d: &Domain, cond: &TestCondition) -> String {
    if cond.is_trivial() {
        return "true".to_string();
    }
    cond.conjuncts().iter().map(|&l| d.literal_name(l)).collect::<Vec<_>>().join(", ")
}

fn tv_text(v: ThreeValued) -> &'static str {
    match v {
        ThreeValued::True => "true",
        ThreeValued::False => "false",
        ThreeValued::Unknown => "unknown",
    }
}

// ---------------------------------------------------------------------------
// Shared loading helpers

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_domain(path: &Path, flags: &RunFlags) -> Result<Domain> {
    let text = read_file(path)?;
    let d = parse_domain(&text, &path.display().to_string())?;
    let report = d.validate();
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if !report.is_valid() {
        let details: Vec<String> = report.errors.iter().map(ToString::to_string).collect();
        bail!("domain {} is invalid:\n  {}", path.display(), details.join("\n  "));
    }
    if d.fluent_count() > flags.max_fluents {
        bail!(
            "domain has {} fluents, above the --max-fluents limit of {}",
            d.fluent_count(),
            flags.max_fluents
        );
    }
    Ok(d)
}

fn optional_query(d: &Domain, inline: Option<String>, flags: &RunFlags) -> Result<Option<Query>> {
    let (text, file) = match (inline, &flags.query_file) {
        (Some(_), Some(_)) => bail!("pass the query inline or via --query-file, not both"),
        (Some(t), None) => (t, "<query>".to_string()),
        (None, Some(f)) => (read_file(f)?, f.display().to_string()),
        (None, None) => return Ok(None),
    };
    Ok(Some(parse_query(text.trim(), d, &file)?))
}

fn required_query(d: &Domain, inline: Option<String>, flags: &RunFlags) -> Result<Query> {
    optional_query(d, inline, flags)?
        .ok_or_else(|| anyhow!("no query given; pass it inline or via --query-file"))
}

fn engine_config(flags: &RunFlags) -> EngineConfig {
    EngineConfig {
        mode: match flags.mode {
            Mode::Default => VerdictMode::Default,
            Mode::StrictVacuous => VerdictMode::StrictVacuous,
        },
        loop_budget: flags.loop_budget,
        max_fluents: flags.max_fluents,
    }
}

fn depth_option(flags: &RunFlags) -> Option<usize> {
    match flags.depth {
        Depth::Auto => None,
        Depth::Fixed(n) => Some(n),
    }
}

// ---------------------------------------------------------------------------
// check

fn cmd_check(domain: &Path, query: Option<String>, flags: &RunFlags, out: &Output) -> Result<u8> {
    let d = load_domain(domain, flags)?;
    let q = required_query(&d, query, flags)?;
    let answer = entails(&d, &q, &engine_config(flags))?;

    match out.format {
        Format::Text => {
            println!("{}", out.verdict(answer.verdict));
            if out.trace >= 2 {
                println!("initial: {}", render_situation(&d, &initial_situation(&d)));
            }
            if out.trace >= 1 {
                for (i, o) in answer.outcomes.iter().enumerate() {
                    print_branch(&d, i, answer.outcomes.len(), o, out);
                }
            }
        }
        Format::Json => {
            let branches: Vec<Value> =
                answer.outcomes.iter().map(|o| branch_value(&d, o, out.trace)).collect();
            let mut v = json!({
                "command": "check",
                "verdict": answer.verdict.as_str(),
                "branches": branches,
            });
            if out.trace >= 2 {
                v["initial"] = situation_value(&d, &initial_situation(&d));
            }
            out.emit_json(&v)?;
        }
    }
    Ok(verdict_exit(answer.verdict))
}

fn branch_result_text(d: &Domain, o: &Outcome) -> String {
    if o.result.is_empty() {
        if o.diverged {
            "∅ (diverged: the loop never terminates)".to_string()
        } else {
            "∅ (failed)".to_string()
        }
    } else {
        render_situation(d, &o.result)
    }
}

fn print_branch(d: &Domain, i: usize, total: usize, o: &Outcome, out: &Output) {
    if out.trace == 1 {
        let steps: Vec<String> = o
            .trace
            .iter()
            .map(|s| match s {
                TraceStep::Action { action, .. } => d.action_name(*action).to_string(),
                TraceStep::Test { condition, value } => {
                    format!("[{} = {}]", cond_text(d, condition), tv_text(*value))
                }
                TraceStep::CycleDetected => "[cycle]".to_string(),
            })
            .collect();
        let body = if steps.is_empty() { "(empty plan)".to_string() } else { steps.join("; ") };
        println!("branch {}/{}: {} -> {}", i + 1, total, body, branch_result_text(d, o));
    } else {
        println!("branch {}/{}:", i + 1, total);
        for s in &o.trace {
            match s {
                TraceStep::Action { action, to } => {
                    println!("  {} -> {}", d.action_name(*action), render_situation(d, to));
                }
                TraceStep::Test { condition, value } => {
                    println!("  test {}: {}", cond_text(d, condition), tv_text(*value));
                }
                TraceStep::CycleDetected => {
                    println!("  cycle: a loop-head situation repeated; this branch never terminates");
                }
            }
        }
        println!("  result: {}", branch_result_text(d, o));
    }
}

fn branch_value(d: &Domain, o: &Outcome, trace: u8) -> Value {
    let mut v = json!({
        "diverged": o.diverged,
        "result": situation_value(d, &o.result),
    });
    if trace >= 1 {
        let steps: Vec<Value> = o
            .trace
            .iter()
            .map(|s| match s {
                TraceStep::Action { action, to } => json!({
                    "action": d.action_name(*action),
                    "to": situation_value(d, to),
                }),
                TraceStep::Test { condition, value } => json!({
                    "test": cond_text(d, condition),
                    "value": tv_text(*value),
                }),
                TraceStep::CycleDetected => json!({ "cycle": true }),
            })
            .collect();
        v["steps"] = Value::Array(steps);
    }
    v
}

// ---------------------------------------------------------------------------
// transitions

fn cmd_transitions(domain: &Path, action: &str, flags: &RunFlags, out: &Output) -> Result<u8> {
    let d = load_domain(domain, flags)?;
    let a = d.action(action)?;
    let initial = initial_situation(&d);
    if initial.is_empty() {
        bail!("domain is inconsistent: no state satisfies the initial value propositions");
    }
    let succ = successors(&d, a, &initial)?;
    let sensed: Vec<FluentId> = if d.action_kind(a) == ActionKind::Sensing {
        d.potential_sensing_effects(a)?
    } else {
        Vec::new()
    };
    let labels: Vec<Vec<String>> = succ
        .iter()
        .map(|s| sensed.iter().map(|&f| sensing_label(&d, f, s)).collect())
        .collect();

    match out.format {
        Format::Text => {
            println!("initial: {}", render_situation(&d, &initial));
            for (i, (s, ls)) in succ.iter().zip(&labels).enumerate() {
                let suffix = if ls.is_empty() {
                    String::new()
                } else {
                    format!("  ({})", ls.join("; "))
                };
                println!("{}: {}{}", i + 1, render_situation(&d, s), suffix);
            }
        }
        Format::Json => {
            let successors: Vec<Value> = succ
                .iter()
                .zip(&labels)
                .map(|(s, ls)| json!({ "labels": ls, "situation": situation_value(&d, s) }))
                .collect();
            out.emit_json(&json!({
                "command": "transitions",
                "action": action,
                "initial": situation_value(&d, &initial),
                "successors": successors,
            }))?;
        }
    }
    Ok(0)
}

/// What a sensing branch settled about one sensed fluent.
fn sensing_label(d: &Domain, f: FluentId, sit: &Situation) -> String {
    let cond = TestCondition::new(vec![FluentLiteral::pos(f)])
        .expect("a single literal cannot contradict itself");
    match truth_in_situation(sit, &cond) {
        Ok(ThreeValued::True) => format!("knows {}", d.fluent_name(f)),
        Ok(ThreeValued::False) => format!("knows -{}", d.fluent_name(f)),
        _ => format!("{} unresolved", d.fluent_name(f)),
    }
}

// ---------------------------------------------------------------------------
// translate

fn cmd_translate(
    domain: &Path,
    query: Option<String>,
    flags: &RunFlags,
    out: &Output,
) -> Result<u8> {
    let d = load_domain(domain, flags)?;
    let q = optional_query(&d, query, flags)?;

    let mut program = translate_domain(&d)?;
    let mut grounded = false;
    if let Some(q) = &q {
        program.rules.extend(translate_query_rules(&d, q)?.rules.rules);
        if !flags.emit_schematic {
            program = ground(&d, &program, q, depth_option(flags), flags.full_universe)?;
            grounded = true;
        }
    }

    match out.format {
        Format::Text => print!("{}", render_program(&program)),
        Format::Json => {
            let rules: Vec<String> = program.rules.iter().map(ToString::to_string).collect();
            out.emit_json(&json!({
                "command": "translate",
                "grounded": grounded,
                "rules": rules,
            }))?;
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// worldviews

fn cmd_worldviews(program: &Path, out: &Output) -> Result<u8> {
    let text = read_file(program)?;
    let p = parse_elp(&text, &program.display().to_string())?;
    let views = world_views_with_budget(&p, DEFAULT_SEARCH_BUDGET)?;

    match out.format {
        Format::Text => {
            if views.is_empty() {
                println!("no world views");
            }
            for (i, w) in views.iter().enumerate() {
                println!("world view {}:", i + 1);
                for b in &w.belief_sets {
                    println!("  {}", belief_set_text(b));
                }
            }
        }
        Format::Json => {
            let rendered: Vec<Vec<Vec<String>>> = views
                .iter()
                .map(|w| {
                    w.belief_sets
                        .iter()
                        .map(|b| b.iter().map(ToString::to_string).collect())
                        .collect()
                })
                .collect();
            out.emit_json(&json!({
                "command": "worldviews",
                "world_views": rendered,
            }))?;
        }
    }
    Ok(if views.is_empty() { 3 } else { 0 })
}

fn belief_set_text(b: &BeliefSet) -> String {
    let atoms: Vec<String> = b.iter().map(ToString::to_string).collect();
    format!("{{{}}}", atoms.join(", "))
}

// ---------------------------------------------------------------------------
// crosscheck

fn cmd_crosscheck(
    domain: &Path,
    query: Option<String>,
    flags: &RunFlags,
    out: &Output,
) -> Result<u8> {
    let d = load_domain(domain, flags)?;
    let q = required_query(&d, query, flags)?;
    let report = crosscheck(&d, &q, depth_option(flags), &engine_config(flags))?;

    match out.format {
        Format::Text => {
            println!("semantic: {}", out.verdict(report.semantic.verdict));
            println!("program entails goal: {}", report.elp_entails_goal);
            println!("program entails negation: {}", report.elp_entails_negation);
            println!("grounding depth: {}", report.depth);
            let agreement = if report.agree {
                out.paint("32", "yes")
            } else {
                out.paint("31", "NO")
            };
            println!("agreement: {agreement}");
        }
        Format::Json => {
            out.emit_json(&json!({
                "command": "crosscheck",
                "semantic": report.semantic.verdict.as_str(),
                "entails_goal": report.elp_entails_goal,
                "entails_negation": report.elp_entails_negation,
                "depth": report.depth,
                "agree": report.agree,
            }))?;
        }
    }
    Ok(if report.agree { 0 } else { 4 })
}

// ---------------------------------------------------------------------------
// suite

enum CaseResult {
    Pass { verdict: Verdict },
    Fail { expected: Verdict, got: Verdict },
    Error { message: String },
}

fn cmd_suite(dir: &Path, flags: &RunFlags, out: &Output) -> Result<u8> {
    let mut files = Vec::new();
    collect_cases(dir, &mut files)?;
    if files.is_empty() {
        bail!("no .case files under {}", dir.display());
    }

    let mut results = Vec::new();
    for f in &files {
        let name = f.strip_prefix(dir).unwrap_or(f).display().to_string();
        let result = match try_case(f, flags) {
            Ok(r) => r,
            Err(e) => CaseResult::Error { message: format!("{e:#}") },
        };
        results.push((name, result));
    }
    let passed = results.iter().filter(|(_, r)| matches!(r, CaseResult::Pass { .. })).count();

    match out.format {
        Format::Text => {
            for (name, result) in &results {
                match result {
                    CaseResult::Pass { verdict } => {
                        println!("{} {} ({})", out.paint("32", "PASS"), name, verdict.as_str());
                    }
                    CaseResult::Fail { expected, got } => {
                        println!(
                            "{} {}: expected {}, got {}",
                            out.paint("31", "FAIL"),
                            name,
                            expected.as_str(),
                            got.as_str()
                        );
                    }
                    CaseResult::Error { message } => {
                        println!("{} {}: error: {}", out.paint("31", "FAIL"), name, message);
                    }
                }
            }
            println!("{passed}/{} cases passed", results.len());
        }
        Format::Json => {
            let cases: Vec<Value> = results
                .iter()
                .map(|(name, result)| match result {
                    CaseResult::Pass { verdict } => json!({
                        "name": name, "status": "pass", "verdict": verdict.as_str(),
                    }),
                    CaseResult::Fail { expected, got } => json!({
                        "name": name, "status": "fail",
                        "expected": expected.as_str(), "got": got.as_str(),
                    }),
                    CaseResult::Error { message } => json!({
                        "name": name, "status": "error", "message": message,
                    }),
                })
                .collect();
            out.emit_json(&json!({
                "command": "suite",
                "cases": cases,
                "passed": passed,
                "total": results.len(),
            }))?;
        }
    }
    Ok(if passed == results.len() { 0 } else { 4 })
}

fn collect_cases(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()
        .with_context(|| format!("cannot read {}", dir.display()))?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_cases(&p, out)?;
        } else if p.extension().is_some_and(|e| e == "case") {
            out.push(p);
        }
    }
    Ok(())
}

/// A case file holds `domain:` (path relative to the file), `query:` and
/// `expect:` lines; `#` starts a comment.
fn try_case(path: &Path, flags: &RunFlags) -> Result<CaseResult> {
    let text = read_file(path)?;
    let mut domain = None;
    let mut query = None;
    let mut expect = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| anyhow!("{}:{}: expected `key: value`", path.display(), idx + 1))?;
        let value = value.trim();
        match key.trim() {
            "domain" => domain = Some(value.to_string()),
            "query" => query = Some(value.to_string()),
            "expect" => {
                expect = Some(parse_verdict(value).ok_or_else(|| {
                    anyhow!("{}:{}: expect must be yes/no/unknown/failed", path.display(), idx + 1)
                })?)
            }
            other => bail!("{}:{}: unknown key `{other}`", path.display(), idx + 1),
        }
    }
    let domain = domain.ok_or_else(|| anyhow!("{}: missing `domain:` line", path.display()))?;
    let query = query.ok_or_else(|| anyhow!("{}: missing `query:` line", path.display()))?;
    let expected = expect.ok_or_else(|| anyhow!("{}: missing `expect:` line", path.display()))?;

    let domain_path = path.parent().unwrap_or(Path::new(".")).join(domain);
    let d = load_domain(&domain_path, flags)?;
    let q = parse_query(&query, &d, &path.display().to_string())?;
    let answer = entails(&d, &q, &engine_config(flags))?;
    Ok(if answer.verdict == expected {
        CaseResult::Pass { verdict: answer.verdict }
    } else {
        CaseResult::Fail { expected, got: answer.verdict }
    })
}
