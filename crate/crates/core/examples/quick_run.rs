//! Runs a short bandit experiment and prints the JSON result.

use sparse_regret::{run_experiment, AdversaryKind, Algorithm, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig::new(
        Algorithm::BanditTsallis,
        AdversaryKind::RandomSparse,
        64,
        4,
        200,
    )
    .replications(2)
    .seed(1)
    .stride(100);
    let result = run_experiment(&config)?;
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}
