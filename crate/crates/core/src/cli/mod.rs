// SPDX-License-Identifier: Apache-2.0

//! The `ctv` command line.

mod explain;
mod gen;
mod sim;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::circuitgen::Strategy;
use crate::term::{parse_goal_file, Defs, Goal, GoalFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_ABORT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ctv", version, about = "Symbolic verifier for multiplier compression trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prove goal files by bit-blasting and Add-3 rewriting.
    Verify(VerifyArgs),
    /// Generate a multiplier compression goal.
    Gen(GenArgs),
    /// Compare the two sides of a goal by concrete evaluation.
    Sim(SimArgs),
    /// Narrate every rewrite step of a proof attempt.
    Explain(ExplainArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Write the rewrite trace as JSON lines.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Re-evaluate every step under random environments (slow).
    #[arg(long)]
    check_steps: bool,
    /// Environments per step for --check-steps.
    #[arg(long, default_value_t = 100, value_name = "N")]
    envs: usize,
    /// Seed for --check-steps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra defines loaded before each goal file.
    #[arg(long, value_name = "FILE")]
    defs: Option<PathBuf>,
    /// Verify up to N files at once.
    #[arg(long, default_value_t = 1, value_name = "N")]
    jobs: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TreeArg {
    Linear,
    Wallace,
    Dadda,
}

impl From<TreeArg> for Strategy {
    fn from(t: TreeArg) -> Strategy {
        match t {
            TreeArg::Linear => Strategy::Linear,
            TreeArg::Wallace => Strategy::Wallace,
            TreeArg::Dadda => Strategy::Dadda,
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Operand width N of the N x N multiplier.
    #[arg(long)]
    width: usize,
    #[arg(long, value_enum, default_value = "linear")]
    tree: TreeArg,
    /// Cut inputs and rows to the columns they can occupy.
    #[arg(long)]
    tight_widths: bool,
    /// Output file; standard output if absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Print the dot diagram of every stage.
    #[arg(long)]
    diagram: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
}

#[derive(Args, Debug)]
struct SimArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "random")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1024)]
    trials: u64,
    /// Required in random mode.
    #[arg(long)]
    seed: Option<u64>,
    /// Input width per variable as NAME=W, or a bare W for all variables.
    #[arg(long = "var-width", value_name = "NAME=W")]
    var_width: Vec<String>,
    /// Width of variables not named by --var-width; defaults to the goal width.
    #[arg(long, value_name = "W")]
    default_width: Option<u32>,
    #[arg(long, value_name = "FILE")]
    defs: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExplainArgs {
    file: PathBuf,
    #[arg(long, value_name = "FILE")]
    defs: Option<PathBuf>,
    /// Items listed per expansion before eliding the rest.
    #[arg(long, default_value_t = 64, value_name = "N")]
    items: usize,
}

/// Run the command line with `args` (program name first). Returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ABORT } else { EXIT_OK };
            let text = if code == EXIT_OK {
                e.to_string()
            } else {
                e.render().to_string()
            };
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify(a) => verify::run(&a, out, err),
        Command::Gen(a) => gen::run(&a, out),
        Command::Sim(a) => sim::run(&a, out),
        Command::Explain(a) => explain::run(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "ctv: {msg}");
            EXIT_ABORT
        }
    }
}

fn color_enabled() -> bool {
    std::env::var("CTV_COLOR").is_ok_and(|v| v == "1")
}

/// Wrap `text` in an ANSI color when `CTV_COLOR=1`.
fn paint(text: &str, code: u8) -> String {
    if color_enabled() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

const GREEN: u8 = 32;
const RED: u8 = 31;
const YELLOW: u8 = 33;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_file(path: &Path) -> Result<GoalFile, String> {
    let text = read(path)?;
    parse_goal_file(&text).map_err(|e| format!("{}:{}:{}: {}", path.display(), e.line, e.col, e.message))
}

/// Definitions from `extra` followed by those of the goal file; a name
/// defined twice is an error.
fn load_goal(path: &Path, extra: Option<&Path>) -> Result<(Goal, Defs), String> {
    let file = parse_file(path)?;
    let mut defs = match extra {
        Some(p) => parse_file(p)?.def_map(),
        None => Defs::new(),
    };
    for d in &file.defs {
        if defs.insert(d.name.clone(), d.clone()).is_some() {
            return Err(format!("{}: {} is defined twice", path.display(), d.name));
        }
    }
    let goal = file.goal.ok_or_else(|| format!("{}: no goal form", path.display()))?;
    Ok((goal, defs))
}
