mod args;
mod commands;
mod error;
mod instance;
mod output;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::Value;
use srbm2d::Srbm;

use args::{Cli, Command, Format};
use error::CliError;
use output::{Envelope, Outcome};

fn run(cli: &Cli, name: &mut String) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Config(format!("--tol must be positive, got {}", cli.tol)));
    }
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| CliError::Parse("--input FILE is required".into()))?;
    let file = instance::load(path)?;
    *name = file.name.clone();
    if cli.command == Command::Validate {
        return Ok(commands::validate(&file.data));
    }
    let s = Srbm::new(file.data)?.with_tol(cli.tol);
    match cli.command {
        Command::Validate => unreachable!(),
        Command::Points => commands::points(&s),
        Command::Rate => commands::rate(&s, cli),
        Command::ProductForm => commands::product_form(&s),
        Command::Tail => commands::tail(&s, cli.measure),
        Command::Simulate => commands::simulate(&s, cli),
        Command::Oracle => commands::oracle(&s, cli),
        Command::Plot => commands::plot(&s, cli),
    }
}

fn emit(cli: &Cli, name: &str, start: Instant, out: &Outcome) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    if let Some(dir) = &cli.out {
        for p in output::write_tables(dir, &out.tables)? {
            eprintln!("wrote {p}");
        }
    }
    match cli.format {
        Format::Json => {
            let env = Envelope {
                command: cli.command.name(),
                instance: name,
                wall_time_s: start.elapsed().as_secs_f64(),
                payload: out.payload.clone(),
                warnings: &out.warnings,
                error: out.failure.as_ref().map(|e| (e.exit_code(), e.to_string())),
            };
            stdout.write_all(env.to_json().as_bytes())?;
        }
        Format::Human => {
            writeln!(stdout, "{} {name}", cli.command.name())?;
            stdout.write_all(output::human(&out.payload).as_bytes())?;
            let tabular = matches!(cli.command, Command::Rate | Command::Oracle);
            if tabular && cli.out.is_none() {
                for t in &out.tables {
                    writeln!(stdout)?;
                    stdout.write_all(output::aligned(t).as_bytes())?;
                }
            }
            for w in &out.warnings {
                writeln!(stdout, "warning: {w}")?;
            }
        }
        Format::Csv => {
            if cli.out.is_none() {
                if out.tables.is_empty() {
                    stdout.write_all(output::flatten(&out.payload).to_csv()?.as_bytes())?;
                } else if out.tables.len() == 1 {
                    stdout.write_all(out.tables[0].to_csv()?.as_bytes())?;
                } else {
                    for (k, t) in out.tables.iter().enumerate() {
                        if k > 0 {
                            writeln!(stdout)?;
                        }
                        writeln!(stdout, "# {}", t.file)?;
                        stdout.write_all(t.to_csv()?.as_bytes())?;
                    }
                }
            }
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    Ok(())
}

fn fail(cli: &Cli, name: &str, start: Instant, e: &CliError, printed: bool) -> ExitCode {
    eprintln!("srbm2d {}: {e}", cli.command.name());
    if cli.format == Format::Json && !printed {
        let env = Envelope {
            command: cli.command.name(),
            instance: name,
            wall_time_s: start.elapsed().as_secs_f64(),
            payload: Value::Null,
            warnings: &[],
            error: Some((e.exit_code(), e.to_string())),
        };
        print!("{}", env.to_json());
    }
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut name = String::new();
    match run(&cli, &mut name) {
        Err(e) => fail(&cli, &name, start, &e, false),
        Ok(out) => {
            if let Err(e) = emit(&cli, &name, start, &out) {
                return fail(&cli, &name, start, &e, false);
            }
            match &out.failure {
                // the report already carries the error
                Some(e) => fail(&cli, &name, start, e, true),
                None => ExitCode::SUCCESS,
            }
        }
    }
}
