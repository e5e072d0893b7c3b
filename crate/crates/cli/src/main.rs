//! `aliasgraph` command-line driver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod corpus;
mod run;

use run::{Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "aliasgraph", version, about = "May-alias analysis over alias diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyse one program from an entry routine.
    Analyze {
        file: PathBuf,
        /// `Class.routine`, or a routine name unique in the program.
        #[arg(long, default_value = "main")]
        entry: String,
        /// Creations per site inside a fixpoint before summarising.
        #[arg(long, default_value_t = 1)]
        cap: u32,
        #[arg(long, default_value_t = 1000)]
        max_iters: u32,
        /// Longest diagram path considered by queries.
        #[arg(long, default_value_t = 6)]
        max_path_len: usize,
        /// Report pairs at every labeled instruction.
        #[arg(long)]
        points: bool,
        /// Report (and query) at this label; repeatable.
        #[arg(long)]
        at: Vec<String>,
        /// Path whose aliases to list; repeatable.
        #[arg(long)]
        query: Vec<String>,
        /// Check the list-copying properties P1–P5.
        #[arg(long)]
        deutsch: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Standard output format.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run every `.oo` file of a directory against its `.expected.json`.
    Corpus { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { file, entry, cap, max_iters, max_path_len, points, at, query, deutsch, dot, json, format } => {
            let cfg = RunConfig {
                input: file,
                entry,
                cap,
                max_iters,
                max_path_len,
                format,
                points,
                at,
                queries: query,
                deutsch,
                json,
                dot,
            };
            run::run(&cfg)
        }
        Command::Corpus { dir } => corpus::run_corpus(&dir).map(|results| {
            print!("{}", corpus::summary(&results));
            let failed = results.iter().any(|r| matches!(r.status, corpus::Status::Fail(_)));
            for r in &results {
                if let corpus::Status::Skip(why) = &r.status {
                    eprintln!("warning: skipped {}: {why}", r.name);
                }
            }
            u8::from(failed)
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(run::EXIT_PARSE)
        }
    }
}
