use clap::Parser;

fn main() {
    std::process::exit(afcsim::cli::main_with_args(afcsim::cli::Args::parse()));
}
