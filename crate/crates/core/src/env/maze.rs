//! Point-mass maze: grid-wall layouts, shortest-path fields, and
//! force-actuated point dynamics with sliding wall collisions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{EnvError, EnvOverrides};
use crate::data::Vec2;

// Cell size is 1.0 unit; rows in the layout text are y, columns are x.
pub const UMAZE_LAYOUT: &str = "\
#####
#G..#
###.#
#...#
#####";

pub const MEDIUM_LAYOUT: &str = "\
########
#G...#.#
#.##...#
#..#.#.#
##.#.#.#
#....#.#
#.###..#
########";

pub const LARGE_LAYOUT: &str = "\
############
#G.....#...#
#.####.#.#.#
#......#.#.#
#.##.###.#.#
#..#.....#.#
##.#.####..#
#..........#
############";

// Open rectangle used by the statistical checks: goal on the right-edge
// center so the shortest-path field is near-unidirectional.
pub const ARENA_LAYOUT: &str = "\
##############################
#............................#
#............................#
#............................#
#...........................G#
#............................#
#............................#
#............................#
#............................#
##############################";

/// Wall grid plus goal, start region, and precomputed shortest-path fields.
#[derive(Debug, Clone)]
pub struct MazeSpec {
    pub width: usize,
    pub height: usize,
    walls: Vec<bool>,
    pub goal_cell: (usize, usize),
    /// Goal position: center of the goal cell.
    pub goal: Vec2,
    /// Open cells excluding the goal cell; initial states are drawn here.
    pub start_cells: Vec<(usize, usize)>,
    pub field: ShortestPathField,
}

/// Hop-count distances and per-cell unit directions toward the goal.
#[derive(Debug, Clone)]
pub struct ShortestPathField {
    pub width: usize,
    pub height: usize,
    /// Hop count to the goal for open cells, `None` for walls.
    pub distance: Vec<Option<u32>>,
    /// Unit vector toward the minimal-distance neighbor; zero at the goal.
    pub direction: Vec<Vec2>,
}

impl ShortestPathField {
    fn idx(&self, cell: (usize, usize)) -> usize {
        cell.1 * self.width + cell.0
    }

    pub fn distance_at(&self, cell: (usize, usize)) -> Option<u32> {
        self.distance[self.idx(cell)]
    }

    pub fn direction_at(&self, cell: (usize, usize)) -> Vec2 {
        self.direction[self.idx(cell)]
    }
}

/// Breadth-first search from the goal cell over open cells, 4-connected.
/// Directions point toward the neighbor with minimal distance; ties break in
/// the fixed order +x, -x, +y, -y. The goal cell gets the zero vector.
pub fn shortest_path_field(
    width: usize,
    height: usize,
    walls: &[bool],
    goal_cell: (usize, usize),
) -> Result<ShortestPathField, EnvError> {
    let idx = |x: usize, y: usize| y * width + x;
    let mut distance: Vec<Option<u32>> = vec![None; width * height];
    let mut queue = std::collections::VecDeque::new();
    distance[idx(goal_cell.0, goal_cell.1)] = Some(0);
    queue.push_back(goal_cell);
    while let Some((x, y)) = queue.pop_front() {
        let d = distance[idx(x, y)].unwrap();
        let mut visit = |nx: usize, ny: usize| {
            if !walls[idx(nx, ny)] && distance[idx(nx, ny)].is_none() {
                distance[idx(nx, ny)] = Some(d + 1);
                queue.push_back((nx, ny));
            }
        };
        if x + 1 < width {
            visit(x + 1, y);
        }
        if x > 0 {
            visit(x - 1, y);
        }
        if y + 1 < height {
            visit(x, y + 1);
        }
        if y > 0 {
            visit(x, y - 1);
        }
    }
    for y in 0..height {
        for x in 0..width {
            if !walls[idx(x, y)] && distance[idx(x, y)].is_none() {
                return Err(EnvError::Layout(format!(
                    "open cell ({x}, {y}) cannot reach the goal"
                )));
            }
        }
    }

    const NEIGHBOR_ORDER: [(i64, i64, Vec2); 4] = [
        (1, 0, Vec2 { x: 1.0, y: 0.0 }),
        (-1, 0, Vec2 { x: -1.0, y: 0.0 }),
        (0, 1, Vec2 { x: 0.0, y: 1.0 }),
        (0, -1, Vec2 { x: 0.0, y: -1.0 }),
    ];
    let mut direction = vec![Vec2::ZERO; width * height];
    for y in 0..height {
        for x in 0..width {
            let here = match distance[idx(x, y)] {
                Some(d) if d > 0 => d,
                _ => continue,
            };
            let mut best = here;
            let mut dir = Vec2::ZERO;
            for (dx, dy, v) in NEIGHBOR_ORDER {
                let nx = x as i64 + dx;
                let ny = y as i64 + dy;
                if nx < 0 || ny < 0 || nx as usize >= width || ny as usize >= height {
                    continue;
                }
                if let Some(nd) = distance[idx(nx as usize, ny as usize)] {
                    if nd < best {
                        best = nd;
                        dir = v;
                    }
                }
            }
            direction[idx(x, y)] = dir;
        }
    }
    Ok(ShortestPathField {
        width,
        height,
        distance,
        direction,
    })
}

impl MazeSpec {
    /// Parse a layout: `#` wall, `.` open, `G` goal (open). Connectivity of
    /// every open cell to the goal is checked here.
    pub fn parse(text: &str) -> Result<MazeSpec, EnvError> {
        let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        if rows.is_empty() {
            return Err(EnvError::Layout("empty layout".into()));
        }
        let width = rows[0].chars().count();
        let height = rows.len();
        let mut walls = vec![false; width * height];
        let mut goal_cell = None;
        for (y, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(EnvError::Layout(format!("row {y} width differs")));
            }
            for (x, c) in row.chars().enumerate() {
                match c {
                    '#' => walls[y * width + x] = true,
                    '.' => {}
                    'G' => {
                        if goal_cell.replace((x, y)).is_some() {
                            return Err(EnvError::Layout("multiple goal cells".into()));
                        }
                    }
                    other => {
                        return Err(EnvError::Layout(format!("unexpected character '{other}'")));
                    }
                }
            }
        }
        let goal_cell = goal_cell.ok_or_else(|| EnvError::Layout("no goal cell".into()))?;
        let field = shortest_path_field(width, height, &walls, goal_cell)?;
        let mut start_cells = Vec::new();
        for y in 0..height {
            for x in 0..width {
                if !walls[y * width + x] && (x, y) != goal_cell {
                    start_cells.push((x, y));
                }
            }
        }
        if start_cells.is_empty() {
            return Err(EnvError::Layout("no open cells besides the goal".into()));
        }
        Ok(MazeSpec {
            width,
            height,
            walls,
            goal_cell,
            goal: Vec2::new(goal_cell.0 as f64 + 0.5, goal_cell.1 as f64 + 0.5),
            start_cells,
            field,
        })
    }

    pub fn is_wall_cell(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return true;
        }
        self.walls[y as usize * self.width + x as usize]
    }

    /// Whether the position lies in an open cell.
    pub fn position_open(&self, p: Vec2) -> bool {
        if !p.is_finite() {
            return false;
        }
        !self.is_wall_cell(p.x.floor() as i64, p.y.floor() as i64)
    }

    pub fn cell_of(&self, p: Vec2) -> (i64, i64) {
        (p.x.floor() as i64, p.y.floor() as i64)
    }

    pub fn open_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let width = self.width;
        self.walls
            .iter()
            .enumerate()
            .filter(|(_, w)| !**w)
            .map(move |(i, _)| (i % width, i / width))
    }

    /// Minimum clearance check: the axis-aligned square of half-width
    /// `radius` around `p` must not overlap any wall cell.
    pub fn clearance_ok(&self, p: Vec2, radius: f64) -> bool {
        if !p.is_finite() {
            return false;
        }
        let x0 = (p.x - radius).floor() as i64;
        let x1 = (p.x + radius).floor() as i64;
        let y0 = (p.y - radius).floor() as i64;
        let y1 = (p.y + radius).floor() as i64;
        for y in y0..=y1 {
            for x in x0..=x1 {
                if self.is_wall_cell(x, y) {
                    return false;
                }
            }
        }
        true
    }
}

/// Point-mass dynamics over a maze layout.
#[derive(Debug, Clone)]
pub struct MazeModel {
    pub spec: MazeSpec,
    pub dt: f64,
    pub friction: f64,
    pub v_max: f64,
    pub goal_radius: f64,
}

// Collision skin: a clamped position sits this far inside the open cell so
// it stays strictly out of the wall.
const WALL_SKIN: f64 = 1e-9;

impl MazeModel {
    pub fn new(spec: MazeSpec, overrides: EnvOverrides) -> MazeModel {
        MazeModel {
            spec,
            dt: overrides.dt.unwrap_or(0.1),
            friction: overrides.friction.unwrap_or(0.05),
            v_max: overrides.v_max.unwrap_or(2.0),
            goal_radius: overrides.goal_radius.unwrap_or(0.5),
        }
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        (
            Vec2::ZERO,
            Vec2::new(self.spec.width as f64, self.spec.height as f64),
        )
    }

    /// `v' = clamp_norm(v + a*dt - friction*v)`, then per-axis position
    /// integration with sliding collisions: a blocked axis clamps the
    /// position at the wall face and zeroes the normal velocity component,
    /// keeping the tangential one. The velocity clamp rescales by norm so the
    /// dynamics stay rotation-equivariant away from walls.
    pub fn step(&self, state: &[f64], action: &[f64]) -> Vec<f64> {
        let p = Vec2::new(state[0], state[1]);
        let v = Vec2::new(state[2], state[3]);
        let a = Vec2::new(action[0], action[1]);

        let mut vel = v + a * self.dt - v * self.friction;
        let speed = vel.norm();
        if speed > self.v_max {
            vel = vel * (self.v_max / speed);
        }

        let mut px = p.x;
        let mut py = p.y;

        let nx = px + vel.x * self.dt;
        if self.spec.is_wall_cell(nx.floor() as i64, py.floor() as i64) {
            if vel.x > 0.0 {
                px = nx.floor() - WALL_SKIN;
            } else if vel.x < 0.0 {
                px = nx.floor() + 1.0 + WALL_SKIN;
            }
            vel = Vec2::new(0.0, vel.y);
        } else {
            px = nx;
        }

        let ny = py + vel.y * self.dt;
        if self.spec.is_wall_cell(px.floor() as i64, ny.floor() as i64) {
            if vel.y > 0.0 {
                py = ny.floor() - WALL_SKIN;
            } else if vel.y < 0.0 {
                py = ny.floor() + 1.0 + WALL_SKIN;
            }
            vel = Vec2::new(vel.x, 0.0);
        } else {
            py = ny;
        }

        vec![px, py, vel.x, vel.y]
    }

    /// Sparse reward: 1 within `goal_radius` of the goal, else 0.
    pub fn reward(&self, state: &[f64], _action: &[f64]) -> f64 {
        let p = Vec2::new(state[0], state[1]);
        if (p - self.spec.goal).norm() <= self.goal_radius {
            1.0
        } else {
            0.0
        }
    }

    pub fn state_valid(&self, state: &[f64]) -> bool {
        state.len() == 4
            && state.iter().all(|v| v.is_finite())
            && self.spec.position_open(Vec2::new(state[0], state[1]))
    }

    pub fn state_success(&self, state: &[f64]) -> bool {
        (Vec2::new(state[0], state[1]) - self.spec.goal).norm() <= self.goal_radius
    }

    /// Uniform over start cells (open cells minus the goal cell), position
    /// uniform inside the cell with a 0.1 wall margin, zero velocity.
    pub fn sample_initial(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let (cx, cy) = self.spec.start_cells[rng.random_range(0..self.spec.start_cells.len())];
        let x = cx as f64 + rng.random_range(0.1..0.9);
        let y = cy as f64 + rng.random_range(0.1..0.9);
        vec![x, y, 0.0, 0.0]
    }
}
