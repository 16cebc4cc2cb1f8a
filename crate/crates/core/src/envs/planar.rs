//! Planar obstacle-reach task with uncertain obstacle dimensions.
//!
//! A point mass must reach a goal behind an axis-aligned box obstacle whose
//! half-extents are the uncertain dynamics parameters. The planner simulates
//! with *believed* extents sampled from `psi`; the world blocks and scores
//! with the *true* extents, so the value of modelling uncertainty in the
//! collision-relevant dimension is exactly what the benchmark measures.
//!
//! State layout: `[x, y, vx, vy, contact]` where `contact` is 1.0 when the
//! previous step was blocked by the obstacle.

use super::Environment;

pub const DT: f64 = 0.05;
pub const DAMPING: f64 = 0.1;
pub const COLLISION_PENALTY: f64 = 100.0;

#[derive(Debug, Clone)]
pub struct Planar {
    pub start: [f64; 2],
    pub goal: [f64; 2],
    pub obstacle_center: [f64; 2],
    /// True half-extents `(w_x, w_y)`.
    pub true_half_extents: [f64; 2],
    pub speed_limit: f64,
    pub force_limit: f64,
}

impl Default for Planar {
    fn default() -> Self {
        // A thin wall across the straight-line path; the agent has to round
        // one of its ends. The y extent decides how far out that detour must
        // go, the x extent barely matters once clear of the wall.
        Self {
            start: [0.0, 0.0],
            goal: [2.0, 0.0],
            obstacle_center: [1.0, 0.0],
            true_half_extents: [0.1, 0.4],
            speed_limit: 2.0,
            force_limit: 2.0,
        }
    }
}

fn point_in_box(p: [f64; 2], center: [f64; 2], half: &[f64]) -> bool {
    (p[0] - center[0]).abs() < half[0] && (p[1] - center[1]).abs() < half[1]
}

/// Segment-vs-AABB test via the slab method; endpoints touching count as hits.
fn segment_hits_box(p0: [f64; 2], p1: [f64; 2], center: [f64; 2], half: &[f64]) -> bool {
    let mut t_min = 0.0_f64;
    let mut t_max = 1.0_f64;
    for axis in 0..2 {
        let d = p1[axis] - p0[axis];
        let lo = center[axis] - half[axis];
        let hi = center[axis] + half[axis];
        if d.abs() < 1e-15 {
            if p0[axis] < lo || p0[axis] > hi {
                return false;
            }
        } else {
            let mut t0 = (lo - p0[axis]) / d;
            let mut t1 = (hi - p0[axis]) / d;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_min = t_min.max(t0);
            t_max = t_max.min(t1);
            if t_min > t_max {
                return false;
            }
        }
    }
    true
}

impl Planar {
    fn dist_to_goal(&self, s: &[f64]) -> f64 {
        ((s[0] - self.goal[0]).powi(2) + (s[1] - self.goal[1]).powi(2)).sqrt()
    }
}

impl Environment for Planar {
    fn name(&self) -> &'static str {
        "planar"
    }

    fn state_dim(&self) -> usize {
        5
    }

    fn action_dim(&self) -> usize {
        2
    }

    fn action_limit(&self) -> f64 {
        self.force_limit
    }

    fn theta_dim(&self) -> usize {
        2
    }

    fn true_theta(&self) -> Vec<f64> {
        self.true_half_extents.to_vec()
    }

    fn initial_state(&self) -> Vec<f64> {
        vec![self.start[0], self.start[1], 0.0, 0.0, 0.0]
    }

    fn step(&self, s: &[f64], a: &[f64], theta: &[f64]) -> Vec<f64> {
        let ax = a[0].clamp(-self.force_limit, self.force_limit);
        let ay = a[1].clamp(-self.force_limit, self.force_limit);
        let damp = 1.0 - DAMPING * DT;
        let mut vx = damp * s[2] + ax * DT;
        let mut vy = damp * s[3] + ay * DT;
        let speed = (vx * vx + vy * vy).sqrt();
        if speed > self.speed_limit {
            let scale = self.speed_limit / speed;
            vx *= scale;
            vy *= scale;
        }
        let p0 = [s[0], s[1]];
        let p1 = [s[0] + vx * DT, s[1] + vy * DT];
        if segment_hits_box(p0, p1, self.obstacle_center, theta) {
            // blocking collision: stay put, kill velocity, flag the contact
            vec![p0[0], p0[1], 0.0, 0.0, 1.0]
        } else {
            vec![p1[0], p1[1], vx, vy, 0.0]
        }
    }

    fn instant_cost(&self, s: &[f64], theta: &[f64]) -> f64 {
        let contact = s[4] > 0.5 || point_in_box([s[0], s[1]], self.obstacle_center, theta);
        self.dist_to_goal(s) + if contact { COLLISION_PENALTY } else { 0.0 }
    }

    fn reward(&self, s: &[f64], a: &[f64]) -> f64 {
        let ax = a[0].clamp(-self.force_limit, self.force_limit);
        let ay = a[1].clamp(-self.force_limit, self.force_limit);
        let penalty = if s[4] > 0.5 { COLLISION_PENALTY } else { 0.0 };
        -self.dist_to_goal(s) - penalty - 0.001 * (ax * ax + ay * ay)
    }

    fn in_true_collision(&self, s: &[f64]) -> bool {
        s[4] > 0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn env() -> Planar {
        Planar::default()
    }

    #[test]
    fn rest_state_unchanged() {
        let e = env();
        let s = e.initial_state();
        let s1 = e.step(&s, &[0.0, 0.0], &e.true_theta());
        assert_eq!(s, s1);
    }

    #[test]
    fn free_space_step_from_rest() {
        let e = env();
        let s1 = e.step(&e.initial_state(), &[1.0, 0.0], &e.true_theta());
        assert_relative_eq!(s1[2], 0.05, epsilon = 1e-12);
        assert_relative_eq!(s1[3], 0.0, epsilon = 1e-12);
        assert_relative_eq!(s1[0], 0.0025, epsilon = 1e-12);
    }

    #[test]
    fn motion_into_obstacle_is_blocked() {
        let e = env();
        // just left of the wall, moving right
        let s = vec![0.85, 0.0, 1.0, 0.0, 0.0];
        let s1 = e.step(&s, &[2.0, 0.0], &e.true_theta());
        assert_eq!(&s1[0..2], &s[0..2]);
        assert_eq!(&s1[2..4], &[0.0, 0.0]);
        assert!(e.in_true_collision(&s1));
    }

    #[test]
    fn reward_examples() {
        let e = env();
        let at_goal = vec![e.goal[0], e.goal[1], 0.0, 0.0, 0.0];
        assert_eq!(e.reward(&at_goal, &[0.0, 0.0]), 0.0);
        let contact = vec![0.85, 0.0, 0.0, 0.0, 1.0];
        assert!(e.reward(&contact, &[0.0, 0.0]) <= -COLLISION_PENALTY);
    }

    #[test]
    fn reward_monotone_in_distance() {
        let e = env();
        let mut last = f64::NEG_INFINITY;
        for i in 0..20 {
            let x = -1.0 + 0.1 * i as f64; // approach from free space on the left
            let r = e.reward(&[x, -1.0, 0.0, 0.0, 0.0], &[0.0, 0.0]);
            assert!(r > last);
            last = r;
        }
    }

    #[test]
    fn never_inside_true_obstacle() {
        let e = env();
        let theta = e.true_theta();
        let mut s = e.initial_state();
        // drive straight at the wall for a while
        for _ in 0..200 {
            s = e.step(&s, &[2.0, 0.0], &theta);
            assert!(!point_in_box([s[0], s[1]], e.obstacle_center, &theta));
        }
    }

    #[test]
    fn segment_test_covers_fast_pass_through() {
        // segment fully crossing the box in one step must register
        assert!(segment_hits_box([0.5, 0.0], [1.5, 0.0], [1.0, 0.0], &[0.1, 0.4]));
        assert!(!segment_hits_box([0.5, 0.6], [1.5, 0.6], [1.0, 0.0], &[0.1, 0.4]));
    }
}
