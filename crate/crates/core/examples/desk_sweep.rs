//! Date-partitioned robustness sweep with a mid-corpus cheater shift.
//!
//! cargo run --release -p hawk-core --example desk_sweep -- <seed>

use hawk_core::robustness::{robustness_sweep, PARTITION_SIZE};
use hawk_core::PipelineConfig;
use hawk_replay::synth::{generate_corpus, BehaviorOverrides, CorpusSpec, ProfileKind, ProfileShift};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(7);
    let spec = |matches| CorpusSpec {
        matches,
        players: 10,
        cheaters: vec![(ProfileKind::Aimbot, 1.0)],
        shift: Some(ProfileShift {
            after_fraction: 0.5,
            sophistication: Some(0.3),
            overrides: BehaviorOverrides {
                reaction_mean: Some(0.14),
                headshot_bias: Some(0.55),
                ..BehaviorOverrides::default()
            },
        }),
        ..CorpusSpec::default()
    };
    let pool = generate_corpus(&spec(120), seed)?;
    let val = generate_corpus(&spec(30), seed + 1000)?;
    let test = generate_corpus(&spec(30), seed + 2000)?;
    let table = robustness_sweep(&pool, &val, &test, PARTITION_SIZE, &PipelineConfig::desk().with_seed(seed))?;
    print!("{}", table.to_csv());
    Ok(())
}
