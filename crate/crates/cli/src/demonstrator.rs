//! Scripted demonstration controllers: a waypoint follower steering the
//! point mass along the shortest-path field, a two-phase pure-pursuit
//! parker, and a get-behind-then-push soccer dribbler.
//!
//! Each controller exposes a `noise` knob that injects action noise and
//! occasional detour episodes, producing the successful-but-suboptimal
//! demonstrations the pipeline starts from. With zero noise each controller
//! solves its task reliably.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use guda_core::data::{wrap_angle, Vec2};
use guda_core::env::{EnvModel, TaskModel};
use guda_core::eval::Policy;

// Noise knob mapping. Mazes take heavy detours (the point mass recovers
// easily, so suboptimality has to come from wandering); the precision tasks
// get gentler action noise.
const MAZE_ACTION_NOISE: f64 = 0.8;
const MAZE_EVENT_PROB: f64 = 0.08;
const MAZE_DETOUR_STEPS: std::ops::Range<usize> = 20..50;
const PRECISION_ACTION_NOISE: f64 = 0.5;
const PRECISION_EVENT_PROB: f64 = 0.06;
const PRECISION_DETOUR_STEPS: std::ops::Range<usize> = 15..40;

/// Scripted controller for one task, usable anywhere a policy is.
pub struct Demonstrator {
    env: EnvModel,
    noise: f64,
    detour_left: usize,
    detour_dir: Vec2,
    parking_staged: bool,
    pushing: bool,
}

pub fn demonstrator_for(env: &EnvModel, noise: f64) -> Demonstrator {
    Demonstrator {
        env: env.clone(),
        noise,
        detour_left: 0,
        detour_dir: Vec2::ZERO,
        parking_staged: false,
        pushing: false,
    }
}

impl Demonstrator {
    fn noise_profile(&self) -> (f64, f64, std::ops::Range<usize>) {
        match self.env.model {
            TaskModel::Maze(_) => (MAZE_ACTION_NOISE, MAZE_EVENT_PROB, MAZE_DETOUR_STEPS),
            _ => (PRECISION_ACTION_NOISE, PRECISION_EVENT_PROB, PRECISION_DETOUR_STEPS),
        }
    }

    fn noisy(&self, mut action: Vec<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
        if self.noise > 0.0 {
            let (scale, _, _) = self.noise_profile();
            let normal = Normal::new(0.0, scale * self.noise).expect("positive std");
            for a in &mut action {
                *a += normal.sample(rng);
            }
        }
        for (a, (lo, hi)) in action
            .iter_mut()
            .zip(self.env.mdp.action_low.iter().zip(&self.env.mdp.action_high))
        {
            *a = a.clamp(*lo, *hi);
        }
        action
    }

    fn maybe_start_detour(&mut self, rng: &mut ChaCha8Rng) {
        let (_, event_prob, detour_steps) = self.noise_profile();
        if self.noise > 0.0 && self.detour_left == 0 && rng.random::<f64>() < event_prob * self.noise {
            self.detour_left = rng.random_range(detour_steps);
            let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            self.detour_dir = Vec2::from_angle(angle);
        }
    }

    fn act_maze(&mut self, state: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.maybe_start_detour(rng);
        let maze = self.env.maze().expect("maze controller on maze task");
        let p = Vec2::new(state[0], state[1]);
        let v = Vec2::new(state[2], state[3]);

        let target = if self.detour_left > 0 {
            self.detour_left -= 1;
            p + self.detour_dir * 2.0
        } else {
            let (cx, cy) = maze.spec.cell_of(p);
            let cell = (cx.max(0) as usize, cy.max(0) as usize);
            let dist = maze.spec.field.distance_at(cell).unwrap_or(0);
            if dist <= 1 {
                maze.spec.goal
            } else {
                // Center of the next cell along the shortest-path field.
                let dir = maze.spec.field.direction_at(cell);
                Vec2::new(cell.0 as f64 + 0.5, cell.1 as f64 + 0.5) + dir
            }
        };

        // Cruise below top speed: the resulting windows stay short enough to
        // re-anchor inside corridor cells.
        let v_des = (target - p).normalized() * (0.45 * maze.v_max);
        let force = (v_des - v) * 2.0;
        self.noisy(vec![force.x, force.y], rng)
    }

    fn act_parking(&mut self, state: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let p = Vec2::new(state[0], state[1]);
        let theta = state[2];
        let v = state[3];
        let spot = Vec2::new(state[4], state[5]);
        let spot_heading = state[6];

        self.maybe_start_detour(rng);
        let staging = spot - Vec2::from_angle(spot_heading) * 2.5;
        if !self.parking_staged && (p - staging).norm() < 0.6 {
            self.parking_staged = true;
        }
        let (target, cruise) = if self.detour_left > 0 {
            self.detour_left -= 1;
            (p + self.detour_dir * 2.0, 1.0)
        } else if self.parking_staged {
            (spot, 0.8)
        } else {
            (staging, 1.4)
        };

        let to_target = target - p;
        let dist = to_target.norm();
        let bearing_err = wrap_angle(to_target.angle() - theta);
        let steer = (2.5 * bearing_err).clamp(-1.0, 1.0);
        // Slow down on approach and when badly misaligned.
        let v_des = (0.8 * dist).clamp(0.15, cruise) * if bearing_err.abs() > 1.2 { 0.3 } else { 1.0 };
        let accel = (2.0 * (v_des - v)).clamp(-1.0, 1.0);
        self.noisy(vec![accel, steer], rng)
    }

    fn act_soccer(&mut self, state: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.maybe_start_detour(rng);
        let soccer = self.env.soccer().expect("soccer controller on soccer task");
        let p = Vec2::new(state[0], state[1]);
        let theta = state[2];
        let ball = Vec2::new(state[3], state[4]);
        let goal = soccer.goal_center;

        let push_dir = (goal - ball).normalized();
        let to_ball = ball - p;
        let dist = to_ball.norm();
        // 1 when the agent sits directly behind the ball relative to the goal.
        let alignment = to_ball.normalized().dot(push_dir);

        // Push-mode hysteresis: enter well aligned, keep pushing until badly
        // misaligned. Without it the controller dithers between pushing and
        // repositioning and runs out the horizon.
        if self.pushing {
            if alignment < 0.55 {
                self.pushing = false;
            }
        } else if alignment > 0.85 && dist < 1.6 {
            self.pushing = true;
        }

        let station = ball - push_dir * 0.8;
        let target = if self.detour_left > 0 {
            self.detour_left -= 1;
            self.pushing = false;
            p + self.detour_dir * 2.0
        } else if self.pushing {
            // Behind the ball: drive through it toward the goal. Aiming a
            // full unit past the ball keeps the bearing steady while the
            // ball jitters laterally.
            ball + push_dir * 1.0
        } else if dist < 1.6 {
            // Wrong side and close: walk around the ball toward the station,
            // staying outside contact range.
            let phi_agent = (p - ball).angle();
            let phi_station = (-push_dir).angle();
            let diff = wrap_angle(phi_station - phi_agent);
            if diff.abs() < 0.5 {
                station
            } else {
                ball + Vec2::from_angle(phi_agent + 0.7 * diff.signum()) * 1.0
            }
        } else {
            station
        };

        // Keep waypoints inside the field so the agent never walks out.
        let m = 0.3;
        let target = Vec2::new(
            target.x.clamp(soccer.field_min.x + m, soccer.field_max.x - m),
            target.y.clamp(soccer.field_min.y + m, soccer.field_max.y - m),
        );

        let to_target = target - p;
        let bearing_err = wrap_angle(to_target.angle() - theta);
        let turn = (3.0 * bearing_err).clamp(-1.0, 1.0);
        // Speed tapers with misalignment instead of gating hard, so pushes
        // keep their pace through small corrections.
        let forward = if bearing_err.abs() < 1.2 {
            (2.0 * to_target.norm()).clamp(0.3, 1.0) * bearing_err.cos().max(0.3)
        } else {
            0.05
        };
        self.noisy(vec![forward, turn], rng)
    }
}

impl Policy for Demonstrator {
    fn reset(&mut self, _rng: &mut ChaCha8Rng) {
        self.detour_left = 0;
        self.detour_dir = Vec2::ZERO;
        self.parking_staged = false;
        self.pushing = false;
    }

    fn act(&mut self, state: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self.env.model {
            TaskModel::Maze(_) => self.act_maze(state, rng),
            TaskModel::Parking(_) => self.act_parking(state, rng),
            TaskModel::Soccer(_) => self.act_soccer(state, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use guda_core::data::RngStream;
    use guda_core::eval::rollout;

    fn success_rate(task: &str, noise: f64, episodes: usize, seed: u64) -> f64 {
        let env = EnvModel::for_task(task).unwrap();
        let mut demo = demonstrator_for(&env, noise);
        let (result, _) = rollout(&mut demo, &env, episodes, RngStream::new(seed)).unwrap();
        result.success_rate()
    }

    #[test]
    fn noiseless_maze_controller_solves_every_layout() {
        for task in ["maze-umaze", "maze-medium", "maze-large"] {
            let rate = success_rate(task, 0.0, 50, 11);
            assert!(rate >= 0.9, "{task}: success rate {rate}");
        }
    }

    #[test]
    fn noiseless_parking_controller_parks() {
        let rate = success_rate("parking", 0.0, 50, 12);
        assert!(rate >= 0.9, "parking success rate {rate}");
    }

    #[test]
    fn noiseless_soccer_controller_scores() {
        let rate = success_rate("soccer", 0.0, 50, 13);
        assert!(rate >= 0.9, "soccer success rate {rate}");
    }

    #[test]
    fn noise_degrades_but_keeps_some_successes() {
        let rate = success_rate("maze-umaze", 0.5, 60, 14);
        assert!(rate > 0.05 && rate < 0.98, "noisy success rate {rate}");
    }
}
