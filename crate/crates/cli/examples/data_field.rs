use guda_core::data::{read_dataset, Vec2};
use guda_core::env::EnvModel;
use std::collections::BTreeMap;

fn main() {
    let env = EnvModel::for_task("maze-medium").unwrap();
    let maze = env.maze().unwrap();
    let ds = read_dataset("/tmp/trial/maze-medium/guda/seed0/augmented.jsonl").unwrap();
    let mut sums: BTreeMap<(i64, i64), (Vec2, Vec2, usize)> = BTreeMap::new();
    for ep in ds.episodes.iter().skip(5) {
        for t in &ep.transitions {
            let c = maze.spec.cell_of(Vec2::new(t.state[0], t.state[1]));
            let e = sums.entry(c).or_insert((Vec2::ZERO, Vec2::ZERO, 0));
            e.0 = e.0 + Vec2::new(t.action[0], t.action[1]);
            e.1 = e.1 + Vec2::new(t.state[2], t.state[3]);
            e.2 += 1;
        }
    }
    let arrow = |v: Vec2| -> &'static str {
        if v.norm() < 0.05 { return " . "; }
        let ang = (v.angle() / std::f64::consts::PI * 4.0).round() as i64;
        match ang {
            0 => " > ", 1 => " v>", 2 => " v ", 3 => "<v ", 4 | -4 => " < ",
            -1 => " ^>", -2 => " ^ ", -3 => "<^ ", _ => " ? ",
        }
    };
    println!("mean ACTION per cell:        mean VELOCITY per cell:      field:");
    for y in 0..maze.spec.height as i64 {
        let mut r1 = String::new();
        let mut r2 = String::new();
        let mut r3 = String::new();
        for x in 0..maze.spec.width as i64 {
            if maze.spec.is_wall_cell(x, y) {
                r1.push_str(" ##");
                r2.push_str(" ##");
                r3.push_str(" ##");
            } else {
                let (a, v, n) = sums.get(&(x, y)).copied().unwrap_or((Vec2::ZERO, Vec2::ZERO, 1));
                r1.push_str(arrow(a * (1.0 / n as f64)));
                r2.push_str(arrow(v * (1.0 / n as f64)));
                let d = maze.spec.field.direction_at((x as usize, y as usize));
                r3.push_str(arrow(d));
            }
        }
        println!("{r1}   {r2}   {r3}");
    }
}
