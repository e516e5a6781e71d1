//! Seeded random draws of valid parameters for every state family.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::ComplexMatrix;
use crate::spec::StateSpec;
use crate::states::{weyl2_bell_weights, DensityMatrix};

/// A ChaCha8 generator for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Weyl coefficients drawn uniformly from the PSD tetrahedron.
pub fn weyl2_t(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let t = [
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        ];
        if weyl2_bell_weights(t[0], t[1], t[2])
            .iter()
            .all(|(_, w)| *w >= 0.0)
        {
            return t;
        }
    }
}

/// A point of the probability simplex, randomly sharpened so that large
/// single weights are common.
pub fn simplex(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let gamma: f64 = rng.gen_range(1.0..5.0);
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            (-u.ln()).powf(gamma)
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Strictly positive Schmidt amplitudes with unit 2-norm.
pub fn schmidt(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..1.0)).collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.iter().map(|x| x / norm).collect()
}

/// Alpha in `(1, 6)`.
pub fn alpha_gt_one(rng: &mut impl Rng) -> f64 {
    rng.gen_range(1.0 + 1e-3..6.0)
}

/// Angle in `(0, π/4]`.
pub fn angle(rng: &mut impl Rng) -> f64 {
    FRAC_PI_4 - rng.gen_range(0.0..FRAC_PI_4)
}

/// `AA†/Tr(AA†)` with uniformly drawn complex entries.
pub fn density(da: usize, db: usize, rng: &mut impl Rng) -> DensityMatrix<f64> {
    let n = da * db;
    let a = ComplexMatrix::from_fn(n, n, |_, _| {
        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = &a * &a.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part(), da, db)
        .expect("Gram matrix is a state")
}

/// A valid spec of a family that has closed-form conditional entropies.
pub fn closed_form_spec(rng: &mut impl Rng) -> StateSpec {
    match rng.gen_range(0..6) {
        0 => StateSpec::werner2(rng.gen_range(0.0..=1.0)),
        1 => StateSpec::weyl2(weyl2_t(rng)),
        2 => StateSpec::isotropic(rng.gen_range(2..=5), rng.gen_range(0.0..=1.0)),
        3 => StateSpec::werner_d(rng.gen_range(2..=5), rng.gen_range(-1.0..=1.0)),
        4 => StateSpec::rank_deficient(rng.gen_range(2..=5), rng.gen_range(1e-6..=1.0)),
        _ => {
            let d = rng.gen_range(2..=4);
            StateSpec::gen_bell(d, simplex(d * d, rng))
        }
    }
}

/// A valid spec from any family.
pub fn any_spec(rng: &mut impl Rng) -> StateSpec {
    match rng.gen_range(0..9) {
        0 => StateSpec::non_weyl(angle(rng), rng.gen_range(0.0..=1.0)),
        1 => {
            let d = rng.gen_range(2..=4);
            StateSpec::noisy_schmidt(&schmidt(d, rng), rng.gen_range(0.0..=1.0))
        }
        2 => {
            let d = rng.gen_range(2..=3);
            StateSpec::weyl_d(d, weyl_d_coefficients(d, rng))
        }
        _ => closed_form_spec(rng),
    }
}

/// Weyl coefficients with `Σ|wᵢ| ≤ 1/2`, which keeps the state positive
/// because every `gᵢ⊗gᵢ` has operator norm at most 2.
pub fn weyl_d_coefficients(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..d * d - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let l1: f64 = raw.iter().map(|x: &f64| x.abs()).sum();
    let radius = rng.gen_range(0.0..0.5);
    raw.iter().map(|x| x * radius / l1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::make_state;

    #[test]
    fn every_draw_is_a_valid_state() {
        let mut rng = rng_for(1, 0);
        for _ in 0..300 {
            let spec = any_spec(&mut rng);
            assert!(make_state::<f64>(&spec).is_ok(), "{spec}");
        }
    }

    #[test]
    fn simplex_is_normalized() {
        let mut rng = rng_for(2, 0);
        for n in [4, 9, 16] {
            let s = simplex(n, &mut rng);
            assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(s.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let a: f64 = rng_for(42, 3).gen();
        let b: f64 = rng_for(42, 3).gen();
        let c: f64 = rng_for(42, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
