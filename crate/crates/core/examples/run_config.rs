//! Runs a subcommand from an inline config exactly as the binary would and prints the
//! report summary. Pass a config path to use a file instead.

use afcsim::cli::{run, Command, ExperimentConfig};

fn main() -> afcsim::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::load(path.as_ref())?,
        None => ExperimentConfig::from_toml("seed = 3\n[comb]\nfinesse = 3.0\n")?,
    };
    let out = std::env::temp_dir().join("afcsim-example");
    let report = run(Command::Comb, &cfg, &out, None)?;
    println!("{}", serde_json::to_string_pretty(&report.summary).expect("summary serialises"));
    for p in &report.outputs {
        println!("wrote {}", p.display());
    }
    Ok(())
}
