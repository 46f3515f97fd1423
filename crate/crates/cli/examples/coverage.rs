use guda_core::data::{read_dataset, Vec2};
use guda_core::env::EnvModel;
use std::collections::BTreeMap;

fn main() {
    let env = EnvModel::for_task("maze-medium").unwrap();
    let maze = env.maze().unwrap();
    let ds = read_dataset("/tmp/trial/maze-medium/guda/seed0/augmented.jsonl").unwrap();
    let mut counts: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for ep in ds.episodes.iter().skip(5) {
        for t in &ep.transitions {
            let c = maze.spec.cell_of(Vec2::new(t.state[0], t.state[1]));
            *counts.entry(c).or_default() += 1;
        }
    }
    println!("augmented transition counts per cell (maze-medium, guided):");
    for y in 0..maze.spec.height as i64 {
        let row: Vec<String> = (0..maze.spec.width as i64)
            .map(|x| {
                if maze.spec.is_wall_cell(x, y) {
                    "  ####".to_string()
                } else {
                    format!("{:6}", counts.get(&(x, y)).copied().unwrap_or(0))
                }
            })
            .collect();
        println!("{}", row.join(""));
    }
    // Field directions for reference.
    println!("\nfield directions:");
    for y in 0..maze.spec.height as i64 {
        let row: Vec<String> = (0..maze.spec.width as i64)
            .map(|x| {
                if maze.spec.is_wall_cell(x, y) {
                    "##".to_string()
                } else {
                    let d = maze.spec.field.direction_at((x as usize, y as usize));
                    match (d.x as i64, d.y as i64) {
                        (1, 0) => " >".into(),
                        (-1, 0) => " <".into(),
                        (0, 1) => " v".into(),
                        (0, -1) => " ^".into(),
                        _ => " G".into(),
                    }
                }
            })
            .collect();
        println!("{}", row.join(""));
    }
}
