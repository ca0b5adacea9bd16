//! Train and evaluate the full pipeline on a synthetic desk-scale corpus.
//!
//! cargo run --release -p hawk-core --example desk_run -- <sophistication> <seed> [objective]

use std::time::Instant;

use hawk_core::{dataset_samples, train_pipeline, PipelineConfig};
use hawk_replay::split::{split_dataset, SplitRatios};
use hawk_replay::synth::{generate_corpus, CorpusSpec, ProfileKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let args: Vec<String> = std::env::args().collect();
    let soph: f64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(0.0);
    let seed: u64 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(7);
    let objective = args.get(3).map(|s| s.parse()).transpose()?;
    let t = Instant::now();
    let spec = CorpusSpec {
        matches: 120,
        players: 10,
        cheaters: vec![(ProfileKind::Aimbot, 1.0)],
        sophistication: soph,
        ..CorpusSpec::default()
    };
    let corpus = generate_corpus(&spec, seed)?;
    let split = split_dataset(corpus, SplitRatios::new(0.6, 0.2, 0.2), false, seed)?;
    let mut cfg = PipelineConfig::desk().with_seed(seed);
    if let Some(o) = objective {
        cfg.objective = o;
    }
    let train = dataset_samples(&split.train, &cfg.features)?;
    let val = dataset_samples(&split.validation, &cfg.features)?;
    let test = dataset_samples(&split.test, &cfg.features)?;
    println!("data {:.1}s", t.elapsed().as_secs_f64());
    let bundle = train_pipeline(&train, &val, &cfg)?;
    println!("train {:.1}s", t.elapsed().as_secs_f64());
    let report = bundle.evaluate(&test)?;
    for (name, e) in &report.subsystems {
        println!(
            "{name:9} acc {:?} recall {:?} auc {:?} {:?}",
            e.metrics.accuracy, e.metrics.recall, e.auc, e.counts
        );
    }
    println!("mvin lambda {:?} eps {}", bundle.mvin.lambda, bundle.mvin.epsilon);
    println!("total {:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
