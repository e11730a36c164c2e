//! Random trigonometric test fields.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{FieldExpr, Phase};

/// Modes `(kq, kp)` with `|kq|, |kp| ≤ degree` in the half-plane
/// `kq > 0 or (kq = 0 and kp > 0)`; each real mode appears once.
pub fn half_plane_modes(degree: i32) -> Vec<(i32, i32)> {
    let mut modes = Vec::new();
    for kq in 0..=degree {
        for kp in -degree..=degree {
            if kq > 0 || kp > 0 {
                modes.push((kq, kp));
            }
        }
    }
    modes
}

/// A zero-mean trigonometric field with `n_modes` distinct modes of degree at
/// most `degree`, random phases, and amplitudes uniform in
/// `[-1/n_modes, 1/n_modes]` (so `sup |f| ≤ 1`).
pub fn random_trig_field<R: Rng + ?Sized>(rng: &mut R, degree: i32, n_modes: usize) -> FieldExpr {
    let mut modes = half_plane_modes(degree);
    modes.shuffle(rng);
    let n = n_modes.min(modes.len()).max(1);
    let terms: Vec<FieldExpr> = modes[..n]
        .iter()
        .map(|&(kq, kp)| {
            let phase = if rng.gen_bool(0.5) { Phase::Cos } else { Phase::Sin };
            let amp: f64 = rng.gen_range(-1.0..1.0) / n as f64;
            FieldExpr::trig(kq, kp, phase).scale(amp)
        })
        .collect();
    FieldExpr::sum_of(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn modes_and_bounds() {
        assert_eq!(half_plane_modes(1).len(), 4);
        assert_eq!(half_plane_modes(2).len(), 12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let f = random_trig_field(&mut rng, 2, 4);
            assert!(f.sup_bound() <= 1.0 + 1e-15);
            assert!(sample(&f, 16).mean().abs() < 1e-14);
        }
    }
}
