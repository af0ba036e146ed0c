mod commands;
mod config;
mod error;
mod record;
mod reproduce;

use config::RunConfig;
use error::{CliError, EXIT_CONFIG};

const THREADS_VAR: &str = "TWISTCHAIN_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::invalid(THREADS_VAR, &raw, "expected a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot configure thread pool: {e}")))
}

fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    let outcome = commands::run(cfg)?;
    let failed = outcome.failed_checks();
    let total = outcome.checks.len();
    for c in &outcome.checks {
        println!(
            "[{}] {}: {} {} {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            record::format_float(c.value),
            c.relation,
            record::format_float(c.tolerance)
        );
    }
    let record = outcome.into_record(cfg.command, cfg.target.clone(), cfg.echo());
    for path in record::write_outputs(&record, &cfg.out_dir()?, &cfg.format()?)? {
        println!("wrote {}", path.display());
    }
    if failed > 0 {
        return Err(CliError::ChecksFailed { failed, total });
    }
    Ok(())
}

fn main() {
    let matches = match config::cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let command = matches.subcommand_name().map(str::to_string);
    let result = configure_threads()
        .and_then(|_| RunConfig::load(&matches))
        .and_then(|cfg| {
            cfg.format()?;
            execute(&cfg)
        });
    if let Err(e) = result {
        let rec = e.record(command.as_deref());
        eprintln!("{}", serde_json::to_string(&rec).unwrap_or_else(|_| e.to_string()));
        std::process::exit(e.exit_code());
    }
}
