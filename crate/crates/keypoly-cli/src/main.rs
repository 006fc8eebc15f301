use clap::Parser;

use keypoly_cli::{execute, exit_code_for, Cli};

fn main() {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            if outcome.failed {
                std::process::exit(1);
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code_for(&err));
        }
    }
}
