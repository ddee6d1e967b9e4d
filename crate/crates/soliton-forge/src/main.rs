use clap::Parser;
use soliton_forge::cli;

fn main() {
    let args = cli::Cli::parse();
    std::process::exit(cli::run(args));
}
