use std::process::ExitCode;

use mfa_cli::{parse_config, run, CliError, EXIT_OK};

fn main() -> ExitCode {
    if let Some(threads) = std::env::var("MFA_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Ignore a second initialisation; the pool is global.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let code = match parse_config(std::env::args_os()) {
        Ok(config) => run(&config),
        Err(CliError::Display(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
