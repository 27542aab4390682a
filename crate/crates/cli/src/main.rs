mod render;

use std::io::{self, BufRead, IsTerminal, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qlam_core::machine::{self, Execution, MachineError, RuleTag, Status, StepRule};
use qlam_core::reducer::{self, Outcome};
use qlam_core::syntax::parse_with;
use qlam_core::{check_well_formed, parse, Calculus, RegisterState, Term};

/// Interpreter for the quantum lambda calculus.
#[derive(Parser)]
#[command(name = "qlam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Which calculus to use: `q` (linear, with `!`) or `i` (untyped).
    #[arg(long, global = true, value_enum, default_value_t = Model::Q)]
    model: Model,

    /// Step budget for the machine and the reducer.
    #[arg(long, global = true, env = "QLAM_MAX_STEPS", default_value_t = machine::DEFAULT_MAX_STEPS)]
    max_steps: usize,

    /// Print every step taken.
    #[arg(long, global = true)]
    trace: bool,

    /// Print results as JSON.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check well-formedness.
    Check(Input),
    /// Run the reversible machine.
    Run(Input),
    /// Reduce the register with the reduction rules.
    Reduce(Input),
    /// Run the machine and the reducer side by side and compare them.
    Verify(Input),
    /// Print the density matrix of the final register.
    Density(Input),
    /// Read expressions from standard input, one per line.
    Repl,
}

#[derive(Args)]
struct Input {
    /// Program file, or `-` for standard input.
    path: Option<PathBuf>,
    /// Program text given inline.
    #[arg(short = 'e', long = "expr", conflicts_with = "path")]
    expr: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Q,
    I,
}

impl Model {
    fn calculus(self) -> Calculus {
        match self {
            Model::Q => Calculus::Quantum,
            Model::I => Calculus::Intermediate,
        }
    }
}

const EXIT_ERROR: u8 = 1;
const EXIT_STUCK: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn status_code(status: Status) -> ExitCode {
    match status {
        Status::Halted => ExitCode::SUCCESS,
        Status::Stuck => ExitCode::from(EXIT_STUCK),
        Status::BudgetExceeded => ExitCode::from(EXIT_BUDGET),
    }
}

impl Input {
    fn source(&self) -> Result<String> {
        match (&self.path, &self.expr) {
            (_, Some(e)) => Ok(e.clone()),
            (Some(p), None) if p.as_os_str() == "-" => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s)?;
                Ok(s)
            }
            (Some(p), None) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
            (None, None) => bail!("no program given: pass a file or -e EXPR"),
        }
    }

    fn term(&self) -> Result<Term> {
        Ok(parse(&self.source()?)?)
    }
}

fn emit<T: serde::Serialize>(json: bool, value: &T, text: impl FnOnce(&T) -> String) -> Result<()> {
    let mut out = io::stdout().lock();
    if json {
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
    } else {
        write!(out, "{}", text(value))?;
    }
    Ok(())
}

fn rule_label(rule: &StepRule) -> String {
    match (rule.tag, rule.gate) {
        (RuleTag::Gate, Some(g)) => format!("U[{g}]"),
        (tag, _) => tag.name().to_string(),
    }
}

fn cmd_check(cli: &Cli, input: &Input) -> Result<ExitCode> {
    let t = input.term()?;
    let violations = match cli.model {
        Model::Q => check_well_formed(&t).err().unwrap_or_default(),
        Model::I => {
            machine::admit(&t, Calculus::Intermediate)?;
            Vec::new()
        }
    };
    let report = render::violations(&violations);
    emit(cli.json, &report, |r| {
        if r.ok {
            "ok\n".into()
        } else {
            r.violations
                .iter()
                .map(|v| format!("{}  {}  {}\n", v.path, v.kind, v.binder))
                .collect()
        }
    })?;
    Ok(if report.ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_ERROR) })
}

fn cmd_run(cli: &Cli, input: &Input) -> Result<ExitCode> {
    let t = input.term()?;
    let exec = Execution::new(&t, cli.model.calculus())?;
    let mut k = 0;
    let (trace, json) = (cli.trace, cli.json);
    let result = exec.run_observed(cli.max_steps, |_, rule, after| {
        k += 1;
        if trace && !json {
            println!("step {k}: {} at {} — {}", rule_label(rule), rule.path, render::trace_state(after));
        }
    })?;
    let report = render::machine_state(result.status.name(), result.steps, &result.state);
    emit(cli.json, &report, render::StateReport::text)?;
    Ok(status_code(result.status))
}

fn cmd_reduce(cli: &Cli, input: &Input) -> Result<ExitCode> {
    let t = input.term()?;
    let calculus = cli.model.calculus();
    machine::admit(&t, calculus)?;
    let r = reducer::reduce(RegisterState::single(t), calculus, cli.max_steps);
    let (status, code) = match &r.outcome {
        Outcome::Normal(_) => ("normal", ExitCode::SUCCESS),
        Outcome::Stuck(_) => ("stuck", ExitCode::from(EXIT_STUCK)),
        Outcome::Budget(_) => ("budget", ExitCode::from(EXIT_BUDGET)),
    };
    let report = render::register_state(status, r.steps, r.outcome.state());
    emit(cli.json, &report, render::StateReport::text)?;
    Ok(code)
}

fn cmd_verify(cli: &Cli, input: &Input) -> Result<ExitCode> {
    let t = input.term()?;
    if cli.model == Model::I {
        println!("not applicable: verification compares runs of λ_q programs only");
        return Ok(ExitCode::SUCCESS);
    }
    let a = reducer::agrees_with_machine(&t, cli.max_steps)?;
    let report = render::VerifyReport {
        status: a.status.name().into(),
        steps: a.steps,
        agrees: a.agrees(),
        divergence: a.divergence.as_ref().map(ToString::to_string),
    };
    emit(cli.json, &report, |r| match &r.divergence {
        Some(d) => format!("diverged at {d}\n"),
        None if r.status == Status::BudgetExceeded.name() => {
            format!("agree for {} steps, then the budget ran out\n", r.steps)
        }
        None => format!("agree: {} after {} steps\n", r.status, r.steps),
    })?;
    Ok(match (&a.divergence, a.status) {
        (Some(_), _) => ExitCode::from(EXIT_ERROR),
        (None, Status::BudgetExceeded) => ExitCode::from(EXIT_BUDGET),
        (None, _) => ExitCode::SUCCESS,
    })
}

fn cmd_density(cli: &Cli, input: &Input) -> Result<ExitCode> {
    let t = input.term()?;
    let r = machine::run(&t, cli.model.calculus(), cli.max_steps)?;
    let report = render::density(&r.state.density_matrix());
    emit(cli.json, &report, render::DensityReport::text)?;
    Ok(status_code(r.status))
}

/// Splits `let x = e` into `x` and `e`; `let` expressions with `in` are
/// ordinary input.
fn binding(line: &str) -> Option<(&str, &str)> {
    let rest = line.strip_prefix("let ")?;
    let (name, expr) = rest.split_once('=')?;
    let name = name.trim();
    let simple = !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'');
    (simple && !expr.contains(" in ")).then_some((name, expr.trim()))
}

fn repl_line(line: &str, env: &mut Vec<(String, Term)>, cli: &Cli) -> Result<Option<String>> {
    let lookup = |env: &[(String, Term)], name: &str| {
        env.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t.clone())
    };
    if let Some((name, expr)) = binding(line) {
        let t = parse_with(expr, &|n| lookup(env, n))?;
        if let Err(vs) = check_well_formed(&t) {
            return Err(MachineError::NotWellFormed(vs).into());
        }
        env.push((name.to_string(), t));
        return Ok(None);
    }
    let t = parse_with(line, &|n| lookup(env, n))?;
    machine::admit(&t, Calculus::Quantum)?;
    let r = reducer::reduce(RegisterState::single(t), Calculus::Quantum, cli.max_steps);
    Ok(Some(match r.outcome {
        Outcome::Normal(s) => s.to_string(),
        Outcome::Stuck(s) => format!("stuck after {} steps\n{s}", r.steps),
        Outcome::Budget(_) => format!("no normal form within {} steps\n", r.steps),
    }))
}

fn cmd_repl(cli: &Cli) -> Result<ExitCode> {
    let interactive = io::stdin().is_terminal();
    let mut env = Vec::new();
    let mut stdout = io::stdout();
    let mut lines = io::stdin().lock().lines();
    loop {
        if interactive {
            write!(stdout, "qlam> ")?;
            stdout.flush()?;
        }
        let Some(line) = lines.next().transpose()? else { break };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == ":quit" || line == ":q" {
            break;
        }
        match repl_line(line, &mut env, cli) {
            Ok(Some(out)) => write!(stdout, "{out}")?,
            Ok(None) => {}
            Err(e) => eprintln!("error: {e:#}"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check(i) => cmd_check(&cli, i),
        Command::Run(i) => cmd_run(&cli, i),
        Command::Reduce(i) => cmd_reduce(&cli, i),
        Command::Verify(i) => cmd_verify(&cli, i),
        Command::Density(i) => cmd_density(&cli, i),
        Command::Repl => cmd_repl(&cli),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
