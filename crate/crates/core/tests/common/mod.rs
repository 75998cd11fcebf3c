//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

/// Positive solution of `-u'' = u⁵` on `[0, 1]` with `u(0) = u(1) = 0`,
/// by shooting: `-v'' = v⁵`, `v(0) = 0`, `v'(0) = 1` is integrated with RK4
/// to its first positive zero `z`, and `u(t) = sqrt(z) v(z t)`.
pub struct Shooting {
    z: f64,
    h: f64,
    /// `(v, v')` at `k h`.
    states: Vec<(f64, f64)>,
}

fn rhs((v, w): (f64, f64)) -> (f64, f64) {
    (w, -v.powi(5))
}

fn rk4(y: (f64, f64), h: f64) -> (f64, f64) {
    let k1 = rhs(y);
    let k2 = rhs((y.0 + 0.5 * h * k1.0, y.1 + 0.5 * h * k1.1));
    let k3 = rhs((y.0 + 0.5 * h * k2.0, y.1 + 0.5 * h * k2.1));
    let k4 = rhs((y.0 + h * k3.0, y.1 + h * k3.1));
    (
        y.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        y.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}

impl Shooting {
    pub fn new(h: f64) -> Self {
        let mut states = vec![(0.0, 1.0)];
        loop {
            let y = *states.last().unwrap();
            let next = rk4(y, h);
            if next.0 <= 0.0 {
                // Bisect the partial step that lands on v = 0.
                let (mut lo, mut hi) = (0.0, h);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if rk4(y, mid).0 > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let z = (states.len() - 1) as f64 * h + 0.5 * (lo + hi);
                states.push(next);
                return Self { z, h, states };
            }
            states.push(next);
            assert!(states.len() < 100_000_000, "no zero found");
        }
    }

    /// First positive zero of `v`.
    pub fn first_zero(&self) -> f64 {
        self.z
    }

    /// `v(x)` for `0 <= x <= z` by an RK4 step from the nearest stored node.
    pub fn v(&self, x: f64) -> f64 {
        let k = ((x / self.h).floor() as usize).min(self.states.len() - 2);
        rk4(self.states[k], x - k as f64 * self.h).0
    }

    /// `v'(x)`.
    pub fn dv(&self, x: f64) -> f64 {
        let k = ((x / self.h).floor() as usize).min(self.states.len() - 2);
        rk4(self.states[k], x - k as f64 * self.h).1
    }

    /// `u(t) = sqrt(z) v(z t)` on `[0, 1]`.
    pub fn u(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        self.z.sqrt() * self.v(self.z * t)
    }
}

/// `max |a - b| / max |b|`.
pub fn relative_sup_distance(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let den = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
    num / den
}
