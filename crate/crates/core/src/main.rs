use clap::Parser;

use redei_perm::cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
