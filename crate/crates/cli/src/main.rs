//! `pittlab`: parameter sweeps over the Pitt, Zygmund, Bochkarev, Hardy and
//! Stein-Weiss inequality evaluators, written as csv, jsonl or plot data.

mod commands;
mod config;
mod error;
mod record;

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::record::{Format, ResultRecord};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn common_args(cmd: Command) -> Command {
    cmd.arg(
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .help("TOML experiment file"),
    )
    .arg(
        Arg::new("seed")
            .long("seed")
            .value_name("U64")
            .value_parser(clap::value_parser!(u64))
            .help("seed for randomized inputs"),
    )
    .arg(
        Arg::new("out")
            .long("out")
            .value_name("FILE")
            .help("append results to FILE instead of stdout"),
    )
    .arg(
        Arg::new("format")
            .long("format")
            .value_name("FMT")
            .default_value("jsonl")
            .help("csv | jsonl | plotdata"),
    )
    .arg(
        Arg::new("jobs")
            .long("jobs")
            .value_name("N")
            .value_parser(clap::value_parser!(usize))
            .help("worker threads (default: all cores)"),
    )
}

fn cli() -> Command {
    let mut app = Command::new("pittlab")
        .version(VERSION)
        .about("Numerical experiments for vector-valued Pitt inequalities and their limiting cases")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for spec in commands::COMMANDS {
        let mut sub = common_args(Command::new(spec.name).about(spec.about));
        for k in spec.keys {
            let help = match k.default {
                Some(d) => format!("{} [default: {d}]", k.help),
                None => k.help.to_string(),
            };
            sub = sub.arg(
                Arg::new(k.key)
                    .long(k.key)
                    .value_name("VALUES")
                    .allow_hyphen_values(true)
                    .action(ArgAction::Set)
                    .help(help),
            );
        }
        app = app.subcommand(sub);
    }
    app.subcommand(
        common_args(
            Command::new("report")
                .about("Re-emit a jsonl results file from any inequality experiment as csv, jsonl or plot data"),
        )
        .arg(
            Arg::new("input")
                .long("input")
                .value_name("FILE")
                .required(true)
                .help("jsonl results"),
        ),
    )
}

fn format_of(m: &ArgMatches) -> Result<Format, CliError> {
    m.get_one::<String>("format")
        .map(String::as_str)
        .unwrap_or("jsonl")
        .parse()
}

fn run_command(name: &str, m: &ArgMatches) -> Result<Vec<ResultRecord>, CliError> {
    let spec = commands::spec(name).ok_or_else(|| CliError::usage(format!("unknown command `{name}`")))?;
    let flags: BTreeMap<String, String> = spec
        .keys
        .iter()
        .filter_map(|k| m.get_one::<String>(k.key).map(|v| (k.key.to_string(), v.clone())))
        .collect();
    let cfg = ExperimentConfig::load(
        name,
        spec.keys,
        m.get_one::<String>("config").map(String::as_str),
        &flags,
        m.get_one::<u64>("seed").copied(),
        m.get_one::<String>("out").cloned(),
    )?;
    let points = cfg.points();
    if cfg.seed.is_none() && points.iter().any(|p| commands::needs_seed(name, p)) {
        return Err(CliError::usage(format!("`{name}` draws random inputs; pass --seed")));
    }
    let timestamp = record::timestamp()?;
    let eval = || -> Vec<Result<ResultRecord, CliError>> {
        points
            .par_iter()
            .map(|p| {
                let outputs = commands::evaluate(name, p, &cfg.quad, cfg.seed)?;
                Ok(ResultRecord {
                    timestamp: timestamp.clone(),
                    command: name.to_string(),
                    params: p.clone(),
                    outputs,
                    version: VERSION.to_string(),
                    seed: cfg.seed,
                })
            })
            .collect()
    };
    let results = match m.get_one::<usize>("jobs") {
        Some(&jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| CliError::internal(e.to_string()))?
            .install(eval),
        None => eval(),
    };
    results.into_iter().collect()
}

fn emit(records: &[ResultRecord], format: Format, out: Option<&String>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
            let mut buf = Vec::new();
            record::write_records(records, format, fresh, &mut buf)?;
            if buf.is_empty() {
                return Ok(());
            }
            let mut file = std::fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| CliError::usage(format!("cannot open `{path}`: {e}")))?;
            file.write_all(&buf)?;
            file.flush()?;
        }
        None => {
            let mut buf = Vec::new();
            record::write_records(records, format, true, &mut buf)?;
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(&buf)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn run() -> Result<(), CliError> {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion
                | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let (name, m) = matches
        .subcommand()
        .ok_or_else(|| CliError::usage("missing subcommand"))?;
    let format = format_of(m)?;
    let records = if name == "report" {
        let input = m.get_one::<String>("input").expect("required");
        let src = std::fs::read_to_string(input).map_err(|e| CliError::usage(format!("cannot read `{input}`: {e}")))?;
        record::read_jsonl(&src)?
    } else {
        run_command(name, m)?
    };
    emit(&records, format, m.get_one::<String>("out"))
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pittlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
