use clap::Parser;

use herdsim::cli::{args::Cli, run};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("herdsim: {e}");
        std::process::exit(e.exit_code());
    }
}
