//! 2D soccer: a differential-drive agent dribbles a ball into a fixed goal
//! region by walking into it. Ball contact is quasi-static: an overlapping
//! agent pushes the ball radially to contact distance, which keeps the
//! dynamics equivariant under rigid motions of agent and ball together.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::EnvOverrides;
use crate::data::{wrap_angle, Vec2};

/// State: `[agent_x, agent_y, heading, ball_x, ball_y]`.
/// Action: `[forward, turn]`, both in `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct SoccerModel {
    pub field_min: Vec2,
    pub field_max: Vec2,
    pub goal_center: Vec2,
    pub goal_radius: f64,
    pub agent_radius: f64,
    pub ball_radius: f64,
    pub speed_max: f64,
    pub turn_max: f64,
    pub dt: f64,
    /// Reward weights: agent-to-ball, ball-to-goal, and the scoring bonus.
    pub w_ball: f64,
    pub w_goal: f64,
    pub bonus: f64,
    pub min_separation: f64,
    pub init_margin: f64,
}

impl SoccerModel {
    pub fn standard(overrides: EnvOverrides) -> SoccerModel {
        SoccerModel {
            field_min: Vec2::ZERO,
            field_max: Vec2::new(16.0, 10.0),
            // Goal disc center sits on the long axis so reflection across it
            // maps the task onto itself.
            goal_center: Vec2::new(15.0, 5.0),
            goal_radius: 1.0,
            agent_radius: 0.3,
            ball_radius: 0.2,
            speed_max: overrides.v_max.unwrap_or(1.0),
            turn_max: 2.0,
            dt: overrides.dt.unwrap_or(0.1),
            w_ball: 0.3,
            w_goal: 1.0,
            bonus: 50.0,
            min_separation: 1.0,
            init_margin: 1.0,
        }
    }

    fn contact_distance(&self) -> f64 {
        self.agent_radius + self.ball_radius
    }

    /// Differential-drive step with radial ball pushing.
    pub fn step(&self, state: &[f64], action: &[f64]) -> Vec<f64> {
        let p = Vec2::new(state[0], state[1]);
        let theta = state[2];
        let ball = Vec2::new(state[3], state[4]);
        let v = action[0] * self.speed_max;
        let omega = action[1] * self.turn_max;

        let np = p + Vec2::from_angle(theta) * (v * self.dt);
        let ntheta = wrap_angle(theta + omega * self.dt);

        let to_ball = ball - np;
        let dist = to_ball.norm();
        let contact = self.contact_distance();
        let nball = if dist < contact {
            if dist < 1e-12 {
                // Degenerate overlap: push along the new heading.
                np + Vec2::from_angle(ntheta) * contact
            } else {
                np + to_ball * (contact / dist)
            }
        } else {
            ball
        };

        vec![np.x, np.y, ntheta, nball.x, nball.y]
    }

    /// `-(w_ball * |agent - ball| + w_goal * |ball - goal|)` plus the scoring
    /// bonus while the ball is inside the goal disc.
    pub fn reward(&self, state: &[f64], _action: &[f64]) -> f64 {
        let p = Vec2::new(state[0], state[1]);
        let ball = Vec2::new(state[3], state[4]);
        let mut r = -(self.w_ball * (p - ball).norm() + self.w_goal * (ball - self.goal_center).norm());
        if self.ball_in_goal(ball) {
            r += self.bonus;
        }
        r
    }

    pub fn ball_in_goal(&self, ball: Vec2) -> bool {
        (ball - self.goal_center).norm() <= self.goal_radius
    }

    fn in_field(&self, p: Vec2) -> bool {
        p.x >= self.field_min.x && p.x <= self.field_max.x && p.y >= self.field_min.y && p.y <= self.field_max.y
    }

    pub fn state_valid(&self, state: &[f64]) -> bool {
        state.len() == 5
            && state.iter().all(|v| v.is_finite())
            && self.in_field(Vec2::new(state[0], state[1]))
            && self.in_field(Vec2::new(state[3], state[4]))
    }

    pub fn state_success(&self, state: &[f64]) -> bool {
        self.ball_in_goal(Vec2::new(state[3], state[4]))
    }

    /// Agent and ball uniform in the field interior with minimum separation;
    /// the ball never starts inside the goal disc.
    pub fn sample_initial(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let m = self.init_margin;
        let draw_point = |rng: &mut ChaCha8Rng| {
            Vec2::new(
                rng.random_range(self.field_min.x + m..self.field_max.x - m),
                rng.random_range(self.field_min.y + m..self.field_max.y - m),
            )
        };
        loop {
            let agent = draw_point(rng);
            let ball = draw_point(rng);
            if (agent - ball).norm() < self.min_separation || self.ball_in_goal(ball) {
                continue;
            }
            let heading = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            return vec![agent.x, agent.y, heading, ball.x, ball.y];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::RngStream;

    fn model() -> SoccerModel {
        SoccerModel::standard(EnvOverrides::default())
    }

    #[test]
    fn agent_drives_along_heading() {
        let m = model();
        let s = vec![4.0, 5.0, 0.0, 10.0, 5.0];
        let next = m.step(&s, &[1.0, 0.0]);
        assert!((next[0] - 4.1).abs() < 1e-12);
        assert_eq!(next[1], 5.0);
        // Ball far away: untouched.
        assert_eq!(&next[3..], &s[3..]);
    }

    #[test]
    fn overlapping_ball_is_pushed_to_contact() {
        let m = model();
        let s = vec![4.0, 5.0, 0.0, 4.45, 5.0, ];
        let next = m.step(&s, &[1.0, 0.0]);
        let agent = Vec2::new(next[0], next[1]);
        let ball = Vec2::new(next[3], next[4]);
        assert!(((ball - agent).norm() - m.contact_distance()).abs() < 1e-12);
        // Pushed radially: same y.
        assert_eq!(next[4], 5.0);
        assert!(next[3] > s[3]);
    }

    #[test]
    fn reward_includes_bonus_inside_goal() {
        let m = model();
        let scored = vec![14.0, 5.0, 0.0, 15.0, 5.0];
        let not_scored = vec![14.0, 5.0, 0.0, 8.0, 5.0];
        assert!(m.reward(&scored, &[0.0, 0.0]) > m.reward(&not_scored, &[0.0, 0.0]) + m.bonus / 2.0);
        assert!(m.state_success(&scored));
        assert!(!m.state_success(&not_scored));
    }

    #[test]
    fn initial_draws_respect_separation_and_goal_exclusion() {
        let m = model();
        let mut rng = RngStream::new(21).rng();
        for _ in 0..2000 {
            let s = m.sample_initial(&mut rng);
            assert!(m.state_valid(&s));
            let agent = Vec2::new(s[0], s[1]);
            let ball = Vec2::new(s[3], s[4]);
            assert!((agent - ball).norm() >= m.min_separation);
            assert!(!m.ball_in_goal(ball));
        }
    }
}
