//! Seeded random grid functions used by the geometry probe and the
//! randomized verification suite.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::GridFunction;

pub type SuiteRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Σ_{k=1}^{modes} c_k sin(kπt/T)` with `c_k ~ U(-1, 1) / k`; zero at both ends.
pub fn random_sine_combo(rng: &mut SuiteRng, n: usize, t_end: f64, modes: usize) -> GridFunction {
    let coeffs: Vec<f64> = (1..=modes).map(|k| rng.random_range(-1.0..1.0) / k as f64).collect();
    let mut u = GridFunction::from_fn(n, t_end, |t| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * ((k + 1) as f64 * PI * t / t_end).sin())
            .sum()
    });
    pin_ends(&mut u);
    u
}

/// Smooth compactly supported bump `(1 - z²)³`, `z = (t - c)/w`, with random
/// centre and width inside `(0, T)` and a random amplitude in `[0.5, 2]`.
pub fn random_bump(rng: &mut SuiteRng, n: usize, t_end: f64) -> GridFunction {
    let w = rng.random_range(0.1..0.5) * t_end;
    let c = rng.random_range(w..t_end - w);
    let amp = rng.random_range(0.5..2.0);
    let mut u = GridFunction::from_fn(n, t_end, |t| {
        let z = (t - c) / w;
        if z.abs() < 1.0 {
            amp * (1.0 - z * z).powi(3)
        } else {
            0.0
        }
    });
    pin_ends(&mut u);
    u
}

/// `sin(πT/T)` is not exactly zero in floating point; boundary samples of
/// zero-trace samples are set to zero explicitly.
fn pin_ends(u: &mut GridFunction) {
    let mut v = u.values().to_vec();
    let n = v.len();
    v[0] = 0.0;
    v[n - 1] = 0.0;
    *u = u.with_values(v);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_zero_trace_and_deterministic() {
        let a = random_sine_combo(&mut seeded(7), 65, 2.0, 5);
        let b = random_sine_combo(&mut seeded(7), 65, 2.0, 5);
        assert_eq!(a, b);
        assert_eq!(a.t_end(), 2.0);
        assert_eq!((a.values()[0], a.values()[64]), (0.0, 0.0));
        let c = random_bump(&mut seeded(3), 65, 1.0);
        assert_eq!((c.values()[0], c.values()[64]), (0.0, 0.0));
        assert!(!c.is_zero());
    }
}
