//! `dcfg`: validate, convert, parse, enumerate and pump displacement grammars.
//!
//! Every command prints one JSON document on stdout. Exit status is 0 on
//! success, 1 for a negative answer (invalid grammar, non-member, no
//! certificate) and 2 for usage, file or format errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};

use commands::Outcome;

#[derive(Parser)]
#[command(name = "dcfg", version, about = "Displacement context-free grammar toolkit")]
struct Cli {
    /// Upper bound on parse trees examined or printed.
    #[arg(long, global = true, default_value_t = 32)]
    max_trees: usize,
    /// Compact JSON; `--json false` pretty-prints it instead.
    #[arg(long, global = true, default_value_t = true, action = ArgAction::Set)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a grammar file for well-formedness.
    Validate { path: PathBuf },
    /// Convert to Chomsky normal form.
    Cnf {
        path: PathBuf,
        /// Output file; without it the grammar text goes into the payload.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Parse a word and print derivation trees.
    Parse {
        path: PathBuf,
        word: String,
        /// Print up to N trees instead of one.
        #[arg(long, value_name = "N")]
        all: Option<usize>,
    },
    /// List the words of the language up to a length.
    Generate {
        path: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Find a pumping certificate for a word.
    Pump {
        path: PathBuf,
        word: String,
        /// Exponents to verify by parsing the pumped words.
        #[arg(long, num_args = 1.., default_values_t = [0, 2, 3])]
        power: Vec<usize>,
        /// Selected positions (Ogden variant), e.g. `--select 0,3`.
        #[arg(long, value_delimiter = ',')]
        select: Vec<usize>,
    },
    /// Classify rank-1 constituents and pumps of a word's parse trees.
    Geometry { path: PathBuf, word: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { path } => commands::validate(path),
        Command::Cnf { path, out } => commands::cnf(path, out.as_deref()),
        Command::Parse { path, word, all } => commands::parse(path, word, all.unwrap_or(1)),
        Command::Generate { path, max_len } => commands::generate(path, *max_len),
        Command::Pump {
            path,
            word,
            power,
            select,
        } => commands::pump(path, word, power, select, cli.max_trees),
        Command::Geometry { path, word } => commands::geometry(path, word, cli.max_trees),
    };
    let Outcome { code, payload } = result.unwrap_or_else(|e| e.into());
    if let Some(payload) = payload {
        let text = if cli.json {
            serde_json::to_string(&payload)
        } else {
            serde_json::to_string_pretty(&payload)
        };
        println!("{}", text.expect("JSON values serialize"));
    }
    ExitCode::from(code)
}
