// Drive the batch workflows from the JSON model files in `specs/`, writing
// samples and reports to a scratch directory.

use std::path::Path;

use splitchain::commands::{cmd_approx, cmd_perfect, PerfectAlgo};
use splitchain::spec_file::ModelSpecFile;
use splitchain::Strategy;

pub fn run_example() -> splitchain::Result<()> {
    let specs = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs");
    let out = std::env::temp_dir().join("splitchain-spec-example");
    std::fs::create_dir_all(&out)?;

    let map = ModelSpecFile::load(&specs.join("figure1_map.json"))?;
    let seed = map.seed.unwrap_or(0);
    let run = cmd_perfect(&map.model, PerfectAlgo::ReadOnce, 20_000, seed)?;
    run.write(&out.join("read_once.csv"), &out.join("read_once.json"))?;
    println!("read-once fit: {}", run.report.oracle["fit_to_pi"]);

    for (file, gamma) in [("drift5.json", 0.05), ("ar1.json", 0.1)] {
        let spec = ModelSpecFile::load(&specs.join(file))?;
        let run = cmd_approx(&spec.model, gamma, 5_000, Strategy::Forward, spec.seed.unwrap_or(0))?;
        let stem = file.trim_end_matches(".json");
        run.write(&out.join(format!("{stem}.csv")), &out.join(format!("{stem}.json")))?;
        let oracle = serde_json::to_string(&run.report.oracle)?;
        println!("{file}: M = {}, oracle {oracle}", run.report.parameters["M"]);
    }
    println!("outputs in {}", out.display());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code().into());
    }
}
