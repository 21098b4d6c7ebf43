use clap::Parser;

fn main() -> std::process::ExitCode {
    let cli = rulesat::cli::Cli::parse();
    match rulesat::cli::run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
