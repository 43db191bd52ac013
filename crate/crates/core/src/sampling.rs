//! Seeded sampling of points, jets and group data. Every randomised check
//! in the toolkit draws from these so a single integer seed reproduces a
//! whole run.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gl2::{h_matrix, Mat2};
use crate::hflat::HJet;
use crate::jets::FieldJet;
use crate::linalg::MatN;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn point_in_cube(rng: &mut ChaCha8Rng, half_width: f64) -> [f64; 4] {
    std::array::from_fn(|_| rng.random_range(-half_width..half_width))
}

/// Random values and gradients in `[-1, 1]`; Hessians stay zero (1-jet).
pub fn field_jet_1(rng: &mut ChaCha8Rng) -> FieldJet {
    let mut jet = FieldJet::zero([0.0; 4]);
    for f in 0..4 {
        jet.field_mut(f).value = rng.random_range(-1.0..1.0);
        jet.field_mut(f).grad = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    }
    jet
}

/// Random group-valued 1-jet: `h` in the unit-triangular group and
/// tangent-pattern partials.
pub fn h_valued_jet(rng: &mut ChaCha8Rng) -> HJet {
    let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let h = h_matrix(v[0], v[1], v[2], v[3]);
    let id = MatN::identity(4);
    let dh = (0..4)
        .map(|_| {
            let g: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            h_matrix(g[0], g[1], g[2], g[3]).sub(&id)
        })
        .collect();
    HJet::new(h, dh).expect("shapes fixed")
}

/// Invertible 2x2 with determinant bounded away from zero.
pub fn invertible_mat2(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let m = Mat2([
            [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)],
            [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)],
        ]);
        if m.det().abs() > 0.3 {
            return m;
        }
    }
}

pub fn quad(rng: &mut ChaCha8Rng, half_width: f64) -> [f64; 4] {
    std::array::from_fn(|_| rng.random_range(-half_width..half_width))
}
