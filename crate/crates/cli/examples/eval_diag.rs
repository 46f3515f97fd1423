use guda_core::data::{RngStream, Vec2};
use guda_core::env::EnvModel;
use guda_core::eval::rollout;
use guda_core::learner::load_policy;
use std::collections::BTreeMap;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let task = args.get(1).cloned().unwrap_or("maze-umaze".into());
    let policy_path = args.get(2).expect("policy path");
    let env = EnvModel::for_task(&task).unwrap();
    let maze = env.maze().unwrap();
    let mut net = load_policy(policy_path).unwrap();
    let (result, trajs) = rollout(&mut net, &env, 100, RngStream::new(0).derive(0xE0)).unwrap();
    let mut end_cells: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut stuck = 0;
    for (i, t) in trajs.iter().enumerate() {
        if result.successes[i] { continue; }
        let last = &t.last().next_state;
        *end_cells.entry(maze.spec.cell_of(Vec2::new(last[0], last[1]))).or_default() += 1;
        let n = t.len();
        if n >= 50 {
            let a = &t.transitions[n - 50].state;
            if ((last[0] - a[0]).powi(2) + (last[1] - a[1]).powi(2)).sqrt() < 0.3 { stuck += 1; }
        }
    }
    println!("success {:.2}; failure end cells {:?}; stuck {}", result.success_rate(), end_cells, stuck);
    let arrow = |v: Vec2| -> String {
        if v.norm() < 0.03 { return " . ".into(); }
        let ang = (v.angle() / std::f64::consts::PI * 4.0).round() as i64;
        match ang { 0 => " > ", 1 => " v>", 2 => " v ", 3 => "<v ", 4 | -4 => " < ", -1 => " ^>", -2 => " ^ ", -3 => "<^ ", _ => " ? " }.into()
    };
    for vel in [Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(0.0, -1.0)] {
        println!("learned action field at velocity ({},{}):", vel.x, vel.y);
        for y in 0..maze.spec.height as i64 {
            let mut row = String::new();
            for x in 0..maze.spec.width as i64 {
                if maze.spec.is_wall_cell(x, y) { row.push_str(" ##"); continue; }
                let s = vec![x as f64 + 0.5, y as f64 + 0.5, vel.x, vel.y];
                let a = net.forward(&s).unwrap();
                row.push_str(&arrow(Vec2::new(a[0], a[1])));
            }
            println!("{row}");
        }
    }
}
