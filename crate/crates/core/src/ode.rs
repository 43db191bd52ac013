//! Correspondence between fourth-order ODEs `x'''' = F(y, x, x', x'', x''')`
//! and cone-adapted framings: evaluates the frame coefficients
//! `alpha, beta, gamma, delta` from a 3-jet of `F` at a point of the
//! hypersurface `y = 0`, applies the fixed rescaling that matches the
//! normalised framing, and converts to `(A, B, C, D)`.
//!
//! The evaluation works in a local Taylor truncation of degree 3 around the
//! point: every value read off at the end depends only on jet coefficients
//! the input determines, so the truncated arithmetic is exact for them.
//! (`X^2(d3 F)` consumes one jet order per application of the total
//! derivative, which is why order 3 is required.)

use crate::error::{Error, Result};
use crate::gl2::{h_from_alpha, FrameCoeffs, HParams};
use crate::linalg::MatN;
use crate::series::{IndexSet, TruncPoly};

/// Variable order in all five-variable jets: `(y, x0, x1, x2, x3)`.
pub const JET_VARS: usize = 5;
const JET_ORDER: usize = 3;

/// 3-jet of the right-hand side `F` at a point with `y = 0`: the base point
/// `(x0, x1, x2, x3)` and one value per multi-index of total order <= 3.
#[derive(Debug, Clone)]
pub struct OdeJet3 {
    point: [f64; 4],
    /// Dense over `IndexSet::get(5, 3)` slots.
    partials: Vec<f64>,
}

impl OdeJet3 {
    /// Builds from a complete table of partial derivatives; the callback is
    /// invoked once per multi-index `[y, x0, x1, x2, x3]`.
    pub fn from_fn(point: [f64; 4], mut partial: impl FnMut(&[u8]) -> f64) -> OdeJet3 {
        let ctx = IndexSet::get(JET_VARS, JET_ORDER);
        let partials = (0..ctx.len()).map(|s| partial(ctx.exponents(s))).collect();
        OdeJet3 { point, partials }
    }

    /// Builds from explicit `(multi-index, value)` entries. Every
    /// multi-index of order <= 3 must be present.
    pub fn from_entries(point: [f64; 4], entries: &[([u8; 5], f64)]) -> Result<OdeJet3> {
        let ctx = IndexSet::get(JET_VARS, JET_ORDER);
        let mut partials = vec![f64::NAN; ctx.len()];
        for (m, v) in entries {
            let slot = ctx
                .slot(m)
                .ok_or_else(|| Error::InvalidArgument(format!("multi-index {m:?} above order 3")))?;
            partials[slot] = *v;
        }
        for (slot, v) in partials.iter().enumerate() {
            if v.is_nan() {
                return Err(Error::IncompleteJet(format!("{:?}", ctx.exponents(slot))));
            }
        }
        Ok(OdeJet3 { point, partials })
    }

    pub fn point(&self) -> [f64; 4] {
        self.point
    }

    /// Taylor polynomial of `F` around the base point (factorials applied).
    fn taylor(&self) -> TruncPoly {
        let ctx = IndexSet::get(JET_VARS, JET_ORDER);
        let mut f = TruncPoly::zero(JET_VARS, JET_ORDER);
        for (slot, &v) in self.partials.iter().enumerate() {
            let m = ctx.exponents(slot);
            let mut factorial = 1.0;
            for &e in m {
                for k in 2..=e {
                    factorial *= k as f64;
                }
            }
            f.set_coeff_slot(slot, v / factorial);
        }
        f
    }
}

/// Output of the correspondence: raw frame coefficients as displayed, the
/// rescaled quadruple matching the normalised framing, and the group
/// element they determine.
#[derive(Debug, Clone)]
pub struct OdeCorrespondence {
    pub raw: FrameCoeffs,
    pub rescaled: FrameCoeffs,
    pub h: MatN,
    pub params: HParams,
}

/// Total derivative on local truncations:
/// `X(G) = dG/dy + x1 dG/dx0 + x2 dG/dx1 + x3 dG/dx2 + F dG/dx3`,
/// with the coordinate functions expanded around the base point.
fn total_derivative(f: &TruncPoly, coords: &[TruncPoly; 3], g: &TruncPoly) -> TruncPoly {
    g.partial(0)
        .add(&coords[0].mul(&g.partial(1)))
        .add(&coords[1].mul(&g.partial(2)))
        .add(&coords[2].mul(&g.partial(3)))
        .add(&f.mul(&g.partial(4)))
}

/// Evaluates the frame coefficients of the fourth-order-ODE correspondence
/// from a complete 3-jet of `F` restricted to `y = 0`.
pub fn ode_correspondence(jet: &OdeJet3) -> OdeCorrespondence {
    let f = jet.taylor();
    let coords = [
        TruncPoly::coordinate(JET_VARS, JET_ORDER, 2, jet.point[1]),
        TruncPoly::coordinate(JET_VARS, JET_ORDER, 3, jet.point[2]),
        TruncPoly::coordinate(JET_VARS, JET_ORDER, 4, jet.point[3]),
    ];
    let x = |g: &TruncPoly| total_derivative(&f, &coords, g);

    let f3 = f.partial(4);
    let f2 = f.partial(3);
    let f1 = f.partial(2);
    let xf3 = x(&f3);
    let f3sq = f3.mul(&f3);
    let k = f2
        .scale(-1.0)
        .add(&xf3.scale(1.5))
        .sub(&f3sq.scale(3.0 / 8.0));

    let alpha = f3.value();
    let beta = 7.0 / 20.0 * f2.value() - 3.0 / 20.0 * xf3.value() + 9.0 / 40.0 * f3sq.value();
    let gamma = f2.value() + 7.0 / 10.0 * k.value();
    let delta = f1.value() - 3.0 / 10.0 * x(&k).value() - x(&f2).value()
        + 21.0 / 40.0 * k.value() * f3.value()
        - 27.0 / 16.0 * xf3.value() * f3.value()
        - 3.0 / 4.0 * f2.value() * f3.value()
        + 3.0 / 4.0 * x(&xf3).value()
        + 27.0 / 64.0 * f3sq.value() * f3.value();

    let raw = FrameCoeffs {
        alpha,
        beta,
        gamma,
        delta,
    };
    // Constants read off the final display of the normalised framing.
    let rescaled = FrameCoeffs {
        alpha: 0.5 * alpha,
        beta: 4.0 / 3.0 * beta,
        gamma: 2.0 * gamma,
        delta: 4.0 / 3.0 * delta,
    };
    let (h, params) = h_from_alpha(&rescaled);
    OdeCorrespondence {
        raw,
        rescaled,
        h,
        params,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{ode_frame_coefficients, RatPoly, Rational};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Hands the exact jet of a rational polynomial to the numeric path.
    fn jet_of(f: &RatPoly, point: [f64; 4], rational_point: &[Rational; 5]) -> OdeJet3 {
        OdeJet3::from_fn(point, |m| {
            f.partial_multi(m).eval(rational_point).to_f64()
        })
    }

    #[test]
    fn zero_rhs_gives_zero_structure() {
        let jet = OdeJet3::from_fn([0.3, -0.2, 0.8, 0.5], |_| 0.0);
        let out = ode_correspondence(&jet);
        assert_eq!(out.raw.alpha, 0.0);
        assert_eq!(out.raw.beta, 0.0);
        assert_eq!(out.raw.gamma, 0.0);
        assert_eq!(out.raw.delta, 0.0);
        assert_eq!(
            (out.params.a, out.params.b, out.params.c, out.params.d),
            (0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn x3_squared_at_unit_point() {
        // F = x3^2 with x3 = 1: alpha = dF/dx3 = 2.
        let f = RatPoly::var(4).mul(&RatPoly::var(4));
        let mut rp = [Rational::zero(); 5];
        rp[4] = Rational::int(1);
        let jet = jet_of(&f, [0.0, 0.0, 0.0, 1.0], &rp);
        let out = ode_correspondence(&jet);
        assert_relative_eq!(out.raw.alpha, 2.0);
    }

    #[test]
    fn x2_rhs_matches_the_exact_rationals() {
        let f = RatPoly::var(3);
        let rp = [Rational::zero(); 5];
        let jet = jet_of(&f, [0.0; 4], &rp);
        let out = ode_correspondence(&jet);
        // The symbolic route is exact as fractions.
        let oracle = ode_frame_coefficients(&f, &rp);
        assert_eq!(oracle[0], Rational::zero());
        assert_eq!(oracle[1], Rational::new(7, 20));
        assert_eq!(oracle[2], Rational::new(3, 10));
        assert_eq!(oracle[3], Rational::zero());
        // The double-precision route agrees to rounding error.
        let vals = [out.raw.alpha, out.raw.beta, out.raw.gamma, out.raw.delta];
        for (v, o) in vals.iter().zip(&oracle) {
            assert!((v - o.to_f64()).abs() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn random_polynomial_rhs_agrees_with_the_symbolic_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..20 {
            // Sparse integer polynomial of degree <= 3 in the five variables.
            let mut f = RatPoly::zero();
            for _ in 0..6 {
                let mut m = [0u8; 5];
                let mut degree_left = 3u8;
                for slot in m.iter_mut() {
                    let e = rng.random_range(0..=degree_left.min(2));
                    *slot = e;
                    degree_left -= e;
                }
                f = f.add(&RatPoly::monomial(m, Rational::int(rng.random_range(-3..=3))));
            }
            // Small rational point with y = 0.
            let mut rp = [Rational::zero(); 5];
            let mut point = [0.0; 4];
            for i in 0..4 {
                let num = rng.random_range(-2..=2);
                rp[i + 1] = Rational::new(num, 2);
                point[i] = rp[i + 1].to_f64();
            }
            let jet = jet_of(&f, point, &rp);
            let out = ode_correspondence(&jet);
            let oracle = ode_frame_coefficients(&f, &rp);
            let vals = [out.raw.alpha, out.raw.beta, out.raw.gamma, out.raw.delta];
            for (v, o) in vals.iter().zip(&oracle) {
                let expect = o.to_f64();
                assert!(
                    (v - expect).abs() <= 1e-12 * (1.0 + expect.abs()),
                    "engine {v} vs oracle {expect}"
                );
            }
        }
    }

    #[test]
    fn rescaling_constants_are_applied() {
        let f = RatPoly::var(3);
        let rp = [Rational::zero(); 5];
        let jet = jet_of(&f, [0.0; 4], &rp);
        let out = ode_correspondence(&jet);
        assert_relative_eq!(out.rescaled.beta, 4.0 / 3.0 * out.raw.beta);
        assert_relative_eq!(out.rescaled.gamma, 2.0 * out.raw.gamma);
        // (A, B, C, D) comes from the rescaled quadruple.
        assert_relative_eq!(out.params.b, -out.rescaled.beta);
        assert_relative_eq!(out.params.c, -out.rescaled.gamma);
    }

    #[test]
    fn incomplete_jets_are_rejected() {
        let entries = [([0u8, 0, 0, 0, 0], 1.0), ([1u8, 0, 0, 0, 0], 2.0)];
        match OdeJet3::from_entries([0.0; 4], &entries) {
            Err(Error::IncompleteJet(_)) => {}
            other => panic!("expected IncompleteJet, got {other:?}"),
        }
        let above = [([4u8, 0, 0, 0, 0], 1.0)];
        assert!(OdeJet3::from_entries([0.0; 4], &above).is_err());
    }
}
