//! Kinematic-car parking: bicycle-model dynamics in an open lot with a row
//! of parking spots. States are goal-conditioned (the target spot pose rides
//! in the state vector) and the dynamics never read the goal components.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

use super::EnvOverrides;
use crate::data::{wrap_angle, Vec2};

/// State: `[x, y, heading, speed, goal_x, goal_y, goal_heading]`.
/// Action: `[accel, steer]`, both in `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct ParkingModel {
    pub lot_min: Vec2,
    pub lot_max: Vec2,
    /// Spot center poses: `(position, heading)`.
    pub spots: Vec<(Vec2, f64)>,
    pub start_pose: (Vec2, f64),
    pub dt: f64,
    pub wheelbase: f64,
    pub v_max: f64,
    pub accel_max: f64,
    pub steer_max: f64,
    /// Dense reward weights for distance and heading misalignment.
    pub w_dist: f64,
    pub w_heading: f64,
    /// Success tolerances on the final pose.
    pub pos_tol: f64,
    pub heading_tol: f64,
}

impl ParkingModel {
    pub fn standard(overrides: EnvOverrides) -> ParkingModel {
        let spot_xs = [8.0, 10.0, 12.0, 14.0, 16.0];
        ParkingModel {
            lot_min: Vec2::ZERO,
            lot_max: Vec2::new(24.0, 10.0),
            spots: spot_xs
                .iter()
                .map(|&x| (Vec2::new(x, 8.5), FRAC_PI_2))
                .collect(),
            start_pose: (Vec2::new(12.0, 2.0), FRAC_PI_2),
            dt: overrides.dt.unwrap_or(0.1),
            wheelbase: 1.0,
            v_max: overrides.v_max.unwrap_or(2.0),
            accel_max: 1.0,
            steer_max: 0.6,
            w_dist: 1.0,
            w_heading: 0.5,
            pos_tol: 0.25,
            heading_tol: 0.26,
        }
    }

    /// Kinematic bicycle step:
    /// `p' = p + v*dt*(cos th, sin th)`, `th' = th + (v/L)*tan(delta)*dt`,
    /// `v' = clamp(v + a*dt)`. Goal components pass through untouched.
    pub fn step(&self, state: &[f64], action: &[f64]) -> Vec<f64> {
        let (x, y, theta, v) = (state[0], state[1], state[2], state[3]);
        let accel = action[0] * self.accel_max;
        let delta = action[1] * self.steer_max;

        let nx = x + v * self.dt * theta.cos();
        let ny = y + v * self.dt * theta.sin();
        let ntheta = wrap_angle(theta + v / self.wheelbase * delta.tan() * self.dt);
        let nv = (v + accel * self.dt).clamp(-self.v_max, self.v_max);

        vec![nx, ny, ntheta, nv, state[4], state[5], state[6]]
    }

    /// Dense alignment reward against the goal pose carried in the state:
    /// `-(w_d * |p - p_spot| + w_h * (1 - cos(heading - spot_heading)))`.
    pub fn reward(&self, state: &[f64], _action: &[f64]) -> f64 {
        let p = Vec2::new(state[0], state[1]);
        let spot = Vec2::new(state[4], state[5]);
        let heading_err = 1.0 - (state[2] - state[6]).cos();
        -(self.w_dist * (p - spot).norm() + self.w_heading * heading_err)
    }

    pub fn state_valid(&self, state: &[f64]) -> bool {
        if state.len() != 7 || !state.iter().all(|v| v.is_finite()) {
            return false;
        }
        let p = Vec2::new(state[0], state[1]);
        p.x >= self.lot_min.x
            && p.x <= self.lot_max.x
            && p.y >= self.lot_min.y
            && p.y <= self.lot_max.y
            && state[3].abs() <= self.v_max + 1e-9
    }

    /// Pose within tolerance of the goal spot carried in the state.
    pub fn state_success(&self, state: &[f64]) -> bool {
        let p = Vec2::new(state[0], state[1]);
        let spot = Vec2::new(state[4], state[5]);
        (p - spot).norm() <= self.pos_tol && wrap_angle(state[2] - state[6]).abs() <= self.heading_tol
    }

    /// Fixed start pose; the goal spot is drawn uniformly from the spot list.
    pub fn sample_initial(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let (spot, heading) = self.spots[rng.random_range(0..self.spots.len())];
        vec![
            self.start_pose.0.x,
            self.start_pose.0.y,
            self.start_pose.1,
            0.0,
            spot.x,
            spot.y,
            heading,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::RngStream;

    fn model() -> ParkingModel {
        ParkingModel::standard(EnvOverrides::default())
    }

    #[test]
    fn straight_line_kinematics() {
        let m = model();
        // delta = 0, v = 1, theta = 0: position advances +0.1 in x.
        let s = vec![5.0, 5.0, 0.0, 1.0, 10.0, 8.5, FRAC_PI_2];
        let next = m.step(&s, &[0.0, 0.0]);
        assert!((next[0] - 5.1).abs() < 1e-12);
        assert_eq!(next[1], 5.0);
        assert_eq!(next[2], 0.0);
        assert_eq!(next[3], 1.0);
    }

    #[test]
    fn steering_turns_heading() {
        let m = model();
        let s = vec![5.0, 5.0, 0.0, 1.0, 10.0, 8.5, FRAC_PI_2];
        let next = m.step(&s, &[0.0, 1.0]);
        let expected = (1.0f64 / 1.0) * (0.6f64).tan() * 0.1;
        assert!((next[2] - expected).abs() < 1e-12);
    }

    #[test]
    fn reward_is_zero_at_spot_pose() {
        let m = model();
        let s = vec![10.0, 8.5, FRAC_PI_2, 0.0, 10.0, 8.5, FRAC_PI_2];
        assert_eq!(m.reward(&s, &[0.0, 0.0]), 0.0);
        // Anywhere else is negative.
        let s2 = vec![9.0, 7.0, 0.0, 0.0, 10.0, 8.5, FRAC_PI_2];
        assert!(m.reward(&s2, &[0.0, 0.0]) < 0.0);
    }

    #[test]
    fn goal_components_pass_through_step() {
        let m = model();
        let s1 = vec![5.0, 5.0, 0.3, 1.0, 8.0, 8.5, FRAC_PI_2];
        let mut s2 = s1.clone();
        s2[4] = 16.0;
        let n1 = m.step(&s1, &[0.5, -0.25]);
        let n2 = m.step(&s2, &[0.5, -0.25]);
        // Physical components identical bitwise; goal mirrors the input.
        assert_eq!(&n1[..4], &n2[..4]);
        assert_eq!(&n1[4..], &s1[4..]);
        assert_eq!(&n2[4..], &s2[4..]);
    }

    #[test]
    fn start_pose_constant_goal_uniform() {
        let m = model();
        let mut rng = RngStream::new(9).rng();
        let mut counts = vec![0usize; m.spots.len()];
        for _ in 0..5000 {
            let s = m.sample_initial(&mut rng);
            assert_eq!(&s[..4], &[12.0, 2.0, FRAC_PI_2, 0.0]);
            let i = m
                .spots
                .iter()
                .position(|(p, _)| p.x == s[4] && p.y == s[5])
                .unwrap();
            counts[i] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / 5000.0;
            assert!((freq - 0.2).abs() < 0.05);
        }
    }

    #[test]
    fn success_needs_full_pose() {
        let m = model();
        let parked = vec![10.1, 8.4, FRAC_PI_2 + 0.1, 0.1, 10.0, 8.5, FRAC_PI_2];
        assert!(m.state_success(&parked));
        let offset = vec![10.4, 8.1, FRAC_PI_2, 0.1, 10.0, 8.5, FRAC_PI_2];
        assert!(!m.state_success(&offset));
        let misaligned = vec![10.1, 8.4, FRAC_PI_2 + 0.5, 0.1, 10.0, 8.5, FRAC_PI_2];
        assert!(!m.state_success(&misaligned));
    }
}
