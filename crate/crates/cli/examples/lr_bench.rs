use guda_cli::config::RunConfig;
use guda_core::data::{read_dataset, RngStream};
use guda_core::env::EnvModel;
use guda_core::eval::rollout;
use guda_core::learner::{train_bc, PolicyNet, TrainConfig};

fn main() {
    let env = EnvModel::for_task("maze-umaze").unwrap();
    let ds = read_dataset("/tmp/trial/maze-umaze/guda/seed0/augmented.jsonl").unwrap();
    let norm = PolicyNet::normalization_for(&env);
    let _ = RunConfig::default();
    for lr in [1e-3, 3e-3, 1e-2, 3e-2] {
        let config = TrainConfig {
            learning_rate: lr,
            batch_size: 256,
            steps: 20_000,
            hidden: vec![64, 64],
            init_scale: 1.0,
            seed: 0,
        };
        let t0 = std::time::Instant::now();
        let (net, losses) = train_bc(&ds, &env.mdp, &config, norm.clone()).unwrap();
        let mut p = net;
        let (result, _) = rollout(&mut p, &env, 100, RngStream::new(900).derive(0xE0)).unwrap();
        println!(
            "lr {lr:.0e}: loss@1k {:.4} @5k {:.4} final {:.4} | success {:.2} mean return {:.2} | {:.1}s",
            losses[999], losses[4999], losses.last().unwrap(),
            result.success_rate(), result.mean_return,
            t0.elapsed().as_secs_f64()
        );
    }
}
