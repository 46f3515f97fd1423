use guda_cli::config::{RunConfig, Strategy};
use guda_cli::pipeline;

fn main() {
    for (task, n) in [("maze-umaze", 50_000), ("maze-medium", 10_000)] {
        for k in [6usize, 8, 10, 16] {
            let out = std::env::temp_dir().join(format!("kk_{task}_{k}"));
            let _ = std::fs::remove_dir_all(&out);
            let cfg = RunConfig {
                task: task.into(),
                out,
                seeds: vec![0, 1],
                segment_len: Some(k),
                target_transitions: n,
                ..RunConfig::default()
            };
            pipeline::run_demo(&cfg).unwrap();
            let rates: Vec<f64> = cfg
                .seeds
                .iter()
                .map(|&s| pipeline::run_cell(&cfg, Strategy::Guda, s).unwrap().success_rate)
                .collect();
            println!("{task} n={n} k={k}: {rates:?}");
        }
    }
}
