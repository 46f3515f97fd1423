use guda_core::data::{read_dataset, RngStream};
use guda_core::env::EnvModel;
use guda_core::eval::rollout;
use guda_core::learner::{train_bc, PolicyNet, TrainConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let file = args.get(1).expect("dataset path");
    let task = args.get(2).cloned().unwrap_or("maze-medium".into());
    let env = EnvModel::for_task(&task).unwrap();
    let ds = read_dataset(file).unwrap();
    for (label, kill_vel) in [("with-velocity", false), ("position-only", true)] {
        let (offset, mut scale) = PolicyNet::normalization_for(&env);
        if kill_vel {
            scale[2] = 0.0;
            scale[3] = 0.0;
        }
        let config = TrainConfig { seed: 0, ..TrainConfig::default() };
        let (net, losses) = train_bc(&ds, &env.mdp, &config, (offset, scale)).unwrap();
        let mut p = net;
        let (result, _) = rollout(&mut p, &env, 100, RngStream::new(0).derive(0xE0)).unwrap();
        println!(
            "{label}: final loss {:.4} success {:.2}",
            losses.last().unwrap(),
            result.success_rate()
        );
    }
}
