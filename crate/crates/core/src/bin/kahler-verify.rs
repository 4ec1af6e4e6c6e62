use clap::Parser;
use kahler_core::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
