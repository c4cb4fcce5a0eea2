// Read-once coupling from the past over the threshold map of the example
// chain: the block coalescence rate, a stream of exact draws, and the
// diagnostic when single-step blocks can never coalesce.

use splitchain::fixtures;
use splitchain::oracle::{gof_report, stationary_exact};
use splitchain::perfect::{exact_block_law, RandomMapModel};
use splitchain::RngStream;

pub fn run_example() -> splitchain::Result<()> {
    let map = fixtures::figure1_map();
    let pi = stationary_exact(&map.transition_rows())?;

    let model = RandomMapModel::new(map.clone(), 2)?;
    let law = exact_block_law(&model)?;
    let est = model.estimate_block_epsilon(10_000, &mut RngStream::from_seed(1))?;
    println!(
        "k = 2: exact block coalescence {:.4}, estimated {:.4} +- {:.4}, nu = {:?}",
        law.epsilon, est.estimate, est.stderr, law.nu
    );

    let mut stream = model.read_once(RngStream::from_seed(42));
    let draws = stream.by_ref().take(100_000).collect::<splitchain::Result<Vec<_>>>()?;
    let fit = gof_report(&draws, &pi)?;
    println!(
        "{} draws from {} blocks, empirical TV {:.4}",
        draws.len(),
        stream.blocks_consumed(),
        fit.empirical_tv
    );

    let single = RandomMapModel::new(map, 1)?;
    match single.read_once(RngStream::from_seed(42)).with_block_cap(10_000).next_sample() {
        Err(e) => println!("k = 1: {e}"),
        Ok(x) => println!("k = 1 unexpectedly produced {x}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code().into());
    }
}
