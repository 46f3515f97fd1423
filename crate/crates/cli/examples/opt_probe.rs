use guda_core::data::{read_dataset, RngStream};
use guda_core::env::EnvModel;
use guda_core::eval::rollout;
use guda_core::learner::{train_bc, PolicyNet, TrainConfig};

fn main() {
    let env = EnvModel::for_task("maze-umaze").unwrap();
    let ds = read_dataset("/tmp/kk_maze-umaze_16/maze-umaze/guda/seed0/augmented.jsonl").unwrap();
    let norm = PolicyNet::normalization_for(&env);
    for (lr, steps, hidden) in [
        (1e-3, 20_000, 64usize),
        (3e-3, 20_000, 64),
        (1e-2, 20_000, 64),
        (1e-3, 60_000, 64),
        (3e-3, 20_000, 128),
        (1e-2, 20_000, 128),
    ] {
        let config = TrainConfig {
            learning_rate: lr,
            batch_size: 256,
            steps,
            hidden: vec![hidden, hidden],
            init_scale: 1.0,
            seed: 0,
        };
        let (net, losses) = train_bc(&ds, &env.mdp, &config, norm.clone()).unwrap();
        let mut p = net;
        let (result, _) = rollout(&mut p, &env, 100, RngStream::new(0).derive(0xE0)).unwrap();
        println!(
            "lr {lr:.0e} steps {steps} hidden {hidden}: loss {:.4} success {:.2}",
            losses.last().unwrap(),
            result.success_rate()
        );
    }
}
