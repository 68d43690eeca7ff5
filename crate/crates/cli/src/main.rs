//! `pbcplus2mdp`: compile an action description into an MDP and solve it.

mod error;
mod report;

use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use pbcplus::dtlpmln::{self, DecisionProblem, MarketingGraph};
use pbcplus::engine;
use pbcplus::lang::{ConstantKind, Formula, TimedAtom};
use pbcplus::mdp::{self, Check};
use pbcplus::parser::{format_formula, parse_formula, parse_timed_formula};
use pbcplus::transition::{check_assumptions, TransitionSystem};
use pbcplus::translator::{translate, translate_part, CompiledDescription, GAtom, GroundProgram, Part};

use error::{CliError, Kind};
use report::Format;

#[derive(Parser)]
#[command(name = "pbcplus2mdp", version, about = "Compile probabilistic action descriptions with utility laws into MDPs and solve them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Build the MDP even if the structural assumptions fail.
    #[arg(long, global = true)]
    unchecked: bool,
    /// Print the weighted program to standard error before running.
    #[arg(long, global = true)]
    dump_program: bool,
}

#[derive(Subcommand)]
enum Command {
    /// List the states.
    States(Input),
    /// List the action profiles.
    Actions(Input),
    /// Dump the transition system.
    Transitions(Input),
    /// Dump the MDP tensors.
    Mdp(Input),
    /// Check the structural assumptions.
    Check(Input),
    /// Compute an optimal policy.
    Solve(SolveArgs),
    /// Conditional probability and expected utility.
    Eval(EvalArgs),
    /// Maximum expected utility over decision atoms.
    Meu(MeuArgs),
    /// Maximum expected utility for a viral-marketing graph given as JSON.
    Market(MarketArgs),
}

#[derive(Args)]
struct Input {
    /// Description file, or `@simple`, `@blocks1`, `@blocks2`, `@blocks3`.
    input: String,
}

#[derive(Args)]
#[command(group(ArgGroup::new("criterion").required(true).args(["horizon", "gamma"])))]
struct SolveArgs {
    #[command(flatten)]
    input: Input,
    /// Finite horizon m.
    #[arg(long)]
    horizon: Option<usize>,
    /// Discount factor in (0,1) for the infinite horizon.
    #[arg(long)]
    gamma: Option<f64>,
    /// Value-iteration tolerance.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Formula selecting the initial states to report, e.g. "~P & ~Q".
    #[arg(long)]
    initial: Option<String>,
    /// Re-derive the optimum by exhaustive policy search on the program.
    #[arg(long, requires = "horizon")]
    verify: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    input: Input,
    /// Timed query formula, e.g. "1:P".
    #[arg(long)]
    query: Option<String>,
    /// Timed evidence formula, e.g. "0:~P & 0:A".
    #[arg(long)]
    evidence: Option<String>,
    /// Horizon; defaults to the smallest one mentioning every atom.
    #[arg(long)]
    horizon: Option<usize>,
}

#[derive(Args)]
struct MeuArgs {
    #[command(flatten)]
    input: Input,
    /// Number of steps to unfold.
    #[arg(long)]
    horizon: usize,
    /// Timed formula every considered model must satisfy.
    #[arg(long)]
    evidence: Option<String>,
    /// Comma-separated timed decision atoms; defaults to every action before the horizon.
    #[arg(long)]
    decisions: Option<String>,
}

#[derive(Args)]
struct MarketArgs {
    /// JSON file with `people`, `edges` and `reward`.
    graph: String,
}

fn read(path: &str) -> Result<String, CliError> {
    let bundled = match path {
        "@simple" => Some(pbcplus::domains::SIMPLE),
        "@blocks1" => Some(pbcplus::domains::BLOCKS1),
        "@blocks2" => Some(pbcplus::domains::BLOCKS2),
        "@blocks3" => Some(pbcplus::domains::BLOCKS3),
        _ => None,
    };
    match bundled {
        Some(text) => Ok(text.to_string()),
        None => std::fs::read_to_string(path).map_err(|e| CliError::new(Kind::Io, format!("{}: {}", path, e))),
    }
}

fn load(input: &Input) -> Result<CompiledDescription, CliError> {
    Ok(pbcplus::load(&read(&input.input)?)?)
}

struct Ctx {
    format: Format,
    unchecked: bool,
    dump_program: bool,
}

impl Ctx {
    fn dump(&self, p: &GroundProgram) {
        if self.dump_program {
            eprint!("{}", p.dump());
        }
    }

    fn build(&self, c: &CompiledDescription) -> Result<(mdp::Mdp, TransitionSystem), CliError> {
        self.dump(&translate_part(c, 1, Part::TransitionsOnly));
        let check = if self.unchecked { Check::Skip } else { Check::Enforce };
        Ok(mdp::build_mdp(c, check)?)
    }

    fn transition_system(&self, c: &CompiledDescription) -> Result<TransitionSystem, CliError> {
        self.dump(&translate_part(c, 1, Part::TransitionsOnly));
        Ok(TransitionSystem::build(c)?)
    }
}

fn timed(text: Option<&str>, c: &CompiledDescription) -> Result<Formula<TimedAtom>, CliError> {
    match text {
        None => Ok(Formula::True),
        Some(t) => Ok(parse_timed_formula(t, &c.description)?),
    }
}

fn show(f: &Formula<TimedAtom>) -> String {
    format_formula(f, &|a: &TimedAtom| format!("{}:{}", a.step, a.atom))
}

/// Smallest horizon whose program contains every atom of `fs`: fluents need
/// step `i`, actions and pf constants step `i + 1`.
fn needed_horizon(c: &CompiledDescription, fs: &[&Formula<TimedAtom>]) -> usize {
    fs.iter()
        .flat_map(|f| f.atoms())
        .map(|a| {
            let kind = c.constant(&a.atom.constant.ground_name()).map(|g| g.kind);
            match kind {
                Some(ConstantKind::Action) | Some(ConstantKind::Pf) => a.step + 1,
                _ => a.step,
            }
        })
        .max()
        .unwrap_or(0)
}

fn initial_states(ts: &TransitionSystem, c: &CompiledDescription, initial: Option<&str>) -> Result<Vec<usize>, CliError> {
    match initial {
        None => Ok(vec![]),
        Some(text) => {
            let f = parse_formula(text, &c.description)?;
            let found = ts.find_state(&f);
            if found.is_empty() {
                return Err(CliError::new(Kind::Infeasible, format!("no state satisfies {}", text)));
            }
            Ok(found)
        }
    }
}

fn solve(ctx: &Ctx, a: &SolveArgs) -> Result<String, CliError> {
    let c = load(&a.input)?;
    let (m, ts) = ctx.build(&c)?;
    let starts = initial_states(&ts, &c, a.initial.as_deref())?;
    let labels = |v: &[String]| v.to_vec();
    if let Some(h) = a.horizon {
        let pi = mdp::solve_finite(&m, h);
        let initial = starts
            .iter()
            .map(|&s| report::InitialValue { state: s, label: m.states[s].clone(), value: pi.values[0][s] })
            .collect();
        let verified = if a.verify {
            let targets: Vec<usize> = if starts.is_empty() { (0..m.n_states()).collect() } else { starts.clone() };
            let mut ok = true;
            for s in targets {
                match mdp::optimal_policy_via_lpmln(&c, &ts, s, h) {
                    Ok(opt) => ok &= (opt.value - pi.values[0][s]).abs() <= engine::TOLERANCE,
                    // states ruled out by the initial-state laws have no program-side value
                    Err(mdp::MdpError::Engine(engine::EngineError::ZeroProbability(_))) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            Some(ok)
        } else {
            None
        };
        let d = report::FinitePolicyDump {
            kind: "finite",
            horizon: h,
            states: labels(&m.states),
            actions: labels(&m.actions),
            policy: pi.actions,
            values: pi.values,
            initial,
            verified,
        };
        Ok(report::finite_policy(&d, ctx.format))
    } else {
        let gamma = a.gamma.expect("clap enforces horizon or gamma");
        let sp = mdp::solve_infinite(&m, gamma, a.epsilon)?;
        let initial = starts
            .iter()
            .map(|&s| report::InitialValue { state: s, label: m.states[s].clone(), value: sp.values[s] })
            .collect();
        let d = report::StationaryPolicyDump {
            kind: "stationary",
            gamma,
            epsilon: a.epsilon,
            iterations: sp.iterations,
            states: labels(&m.states),
            actions: labels(&m.actions),
            policy: sp.actions,
            values: sp.values,
            initial,
        };
        Ok(report::stationary_policy(&d, ctx.format))
    }
}

fn eval(ctx: &Ctx, a: &EvalArgs) -> Result<String, CliError> {
    let c = load(&a.input)?;
    let query = a.query.as_deref().map(|q| timed(Some(q), &c)).transpose()?;
    let evidence = timed(a.evidence.as_deref(), &c)?;
    let mut mentioned = vec![&evidence];
    mentioned.extend(query.as_ref());
    let h = a.horizon.unwrap_or_else(|| needed_horizon(&c, &mentioned));
    let p = translate(&c, h);
    ctx.dump(&p);
    let e = p.lower(&evidence)?;
    let models = engine::enumerate_conditioned(&p, &e)?;
    let probability = match &query {
        Some(q) => {
            let q = p.lower(q)?;
            Some(models.iter().filter(|r| r.interpretation.satisfies(&q)).map(|r| r.probability).sum())
        }
        None => None,
    };
    let d = report::EvalDump {
        horizon: h,
        evidence: show(&evidence),
        query: query.as_ref().map(show),
        probability,
        expected_utility: models.iter().map(|r| r.probability * r.utility).sum(),
        models: models.len(),
    };
    Ok(report::eval(&d, ctx.format))
}

fn decision_atoms(c: &CompiledDescription, p: &GroundProgram, text: Option<&str>, h: usize) -> Result<Vec<GAtom>, CliError> {
    match text {
        None => {
            let mut out = Vec::new();
            for i in 0..h {
                for g in c.actions() {
                    if let Some(atom) = p.signature.atom(Some(i), &g.name, "true") {
                        out.push(atom);
                    }
                }
            }
            Ok(out)
        }
        Some(list) => list
            .split(',')
            .map(|item| {
                let f = parse_timed_formula(item.trim(), &c.description)?;
                match p.lower(&f)? {
                    Formula::Atom(a) => Ok(a),
                    _ => Err(CliError::new(Kind::Validation, format!("decision {} is not a single atom", item.trim()))),
                }
            })
            .collect(),
    }
}

fn meu_report(dp: &DecisionProblem, r: dtlpmln::MeuResult, format: Format) -> String {
    let decisions: Vec<String> = (0..dp.decisions.len()).map(|i| dp.label(i)).collect();
    let chosen = decisions.iter().zip(&r.assignment).filter(|(_, &t)| t).map(|(l, _)| l.clone()).collect();
    let d = report::MeuDump {
        decisions,
        chosen,
        assignment: r.assignment,
        expected_utility: r.expected_utility,
        ties: r.ties,
        all: r.all.into_iter().map(|(assignment, expected_utility)| report::DecisionValue { assignment, expected_utility }).collect(),
    };
    report::meu(&d, format)
}

fn meu(ctx: &Ctx, a: &MeuArgs) -> Result<String, CliError> {
    let c = load(&a.input)?;
    let p = translate(&c, a.horizon);
    ctx.dump(&p);
    let evidence = p.lower(&timed(a.evidence.as_deref(), &c)?)?;
    let atoms = decision_atoms(&c, &p, a.decisions.as_deref(), a.horizon)?;
    let dp = DecisionProblem::new(p, atoms)?;
    let r = dtlpmln::meu(&dp, &evidence)?;
    Ok(meu_report(&dp, r, ctx.format))
}

fn market(ctx: &Ctx, a: &MarketArgs) -> Result<String, CliError> {
    let text = read(&a.graph)?;
    let g: MarketingGraph = serde_json::from_str(&text).map_err(|e| CliError::new(Kind::Parse, format!("{}: {}", a.graph, e)))?;
    let dp = g.decision_problem()?;
    ctx.dump(&dp.program);
    let r = dtlpmln::meu(&dp, &Formula::True)?;
    Ok(meu_report(&dp, r, ctx.format))
}

fn check(ctx: &Ctx, input: &Input) -> Result<String, CliError> {
    let c = load(input)?;
    let ts = ctx.transition_system(&c)?;
    let r = check_assumptions(&c, &ts)?;
    let out = match ctx.format {
        Format::Json => report::json(&r),
        Format::Tsv => {
            let mut out: String = r.violations.iter().map(|v| format!("{}\t{}\n", v.assumption, v.message)).collect();
            out.extend(r.notes.iter().map(|n| format!("note\t{}\n", n)));
            out
        }
        Format::Text => {
            let mut out = String::new();
            for n in 1..=3 {
                out.push_str(&format!("assumption {}: {}\n", n, if r.holds(n) { "holds" } else { "violated" }));
            }
            out.extend(r.violations.iter().map(|v| format!("  [{}] {}\n", v.assumption, v.message)));
            out.extend(r.notes.iter().map(|n| format!("note: {}\n", n)));
            out
        }
    };
    if r.ok() {
        Ok(out)
    } else {
        print!("{}", out);
        let first = &r.violations[0];
        Err(CliError::new(Kind::Assumption, format!("{} violation(s); first: [{}] {}", r.violations.len(), first.assumption, first.message)))
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let ctx = Ctx { format: cli.format, unchecked: cli.unchecked, dump_program: cli.dump_program };
    match &cli.command {
        Command::States(i) => {
            let ts = ctx.transition_system(&load(i)?)?;
            Ok(report::listing(&report::state_entries(&ts), "states", ctx.format))
        }
        Command::Actions(i) => {
            let ts = ctx.transition_system(&load(i)?)?;
            Ok(report::listing(&report::action_entries(&ts), "actions", ctx.format))
        }
        Command::Transitions(i) => {
            let ts = ctx.transition_system(&load(i)?)?;
            Ok(report::transitions(&ts, ctx.format))
        }
        Command::Mdp(i) => {
            let (m, ts) = ctx.build(&load(i)?)?;
            Ok(report::mdp(&m, &ts, ctx.format))
        }
        Command::Check(i) => check(&ctx, i),
        Command::Solve(a) => solve(&ctx, a),
        Command::Eval(a) => eval(&ctx, a),
        Command::Meu(a) => meu(&ctx, a),
        Command::Market(a) => market(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{}", e);
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let detail: Vec<&str> = msg
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty())
                .collect();
            let err = CliError::new(Kind::Usage, detail.join(" ").trim_start_matches("error: ").to_string());
            eprintln!("{}", err);
            return err.exit_code();
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e);
            e.exit_code()
        }
    }
}
