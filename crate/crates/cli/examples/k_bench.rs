use guda_cli::config::{RunConfig, Strategy};
use guda_cli::pipeline;
use std::path::PathBuf;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let task = args.get(1).cloned().unwrap_or("maze-medium".into());
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let seeds: Vec<u64> = args.get(3).map(|s| s.split(',').map(|x| x.parse().unwrap()).collect()).unwrap_or(vec![0]);
    let strategy = match args.get(4).map(|s| s.as_str()) {
        Some("random") => Strategy::Random,
        Some("none") => Strategy::None,
        _ => Strategy::Guda,
    };
    let out: PathBuf = std::env::temp_dir().join(format!("kb_{task}_{n}_{}", strategy.name()));
    let _ = std::fs::remove_dir_all(&out);
    let cfg = RunConfig {
        task: task.clone(),
        out,
        seeds: seeds.clone(),
        target_transitions: n,
        ..RunConfig::default()
    };
    let d = pipeline::run_demo(&cfg).unwrap();
    let rates: Vec<f64> = seeds
        .iter()
        .map(|&s| pipeline::run_cell(&cfg, strategy, s).unwrap().success_rate)
        .collect();
    println!(
        "{task} {} n={n} demo({} eps, {} trans, {} succ): success {:?}",
        strategy.name(), d.episodes, d.transitions, d.successful_episodes, rates
    );
}
