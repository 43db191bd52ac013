//! Formal power-series solver for the quasi-linear system: starting from
//! order-one seed data, the four residual series are expanded degree by
//! degree and each new coefficient layer is obtained as the minimum-norm
//! solution of the affine conditions it must satisfy. The system is not
//! Cauchy-Kovalevskaya in any single coordinate (only two equations carry
//! `d_3` derivatives), so least squares over the whole layer replaces a
//! marching scheme.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::FieldJet;
use crate::linalg::{min_norm_lstsq, svd_rank, RANK_RTOL};
use crate::pde::residual_matrix;
use crate::series::TruncPoly;

/// Default residual tolerance for the linear solves.
pub const PROLONG_TOL: f64 = 1e-10;

/// Hard cap on the expansion order; keeps unknown counts at desk scale.
pub const MAX_ORDER: usize = 6;

/// Order-one jet data for the four fields at the expansion point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub values: [f64; 4],
    /// `gradients[field][direction]`.
    pub gradients: [[f64; 4]; 4],
}

/// Truncated series for the four fields.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    /// `A, B, C, D` in order.
    pub fields: [TruncPoly; 4],
    pub order: usize,
}

/// Linear-solve statistics for one prolongation layer.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OrderReport {
    /// Degree of the coefficients solved for.
    pub degree: usize,
    pub unknowns: usize,
    /// Independent conditions (rank of the layer matrix).
    pub independent: usize,
    /// Free coefficients left in the layer.
    pub dof: usize,
    /// Max residual coefficient through `degree - 1` after the solve.
    pub residual_after: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProlongationReport {
    pub seed_residual: [f64; 4],
    pub orders: Vec<OrderReport>,
}

/// The four residual series of a field quadruple; coefficients are valid
/// through total degree `cap - 1` (one derivative is consumed).
pub fn residual_series(fields: &[TruncPoly; 4]) -> [TruncPoly; 4] {
    let [a, b, c, d] = fields;
    let nv = a.nvars();
    let cap = a.max_deg();
    let one = TruncPoly::constant(nv, cap, 1.0);
    let a2 = a.mul(a);
    let a3 = a2.mul(a);

    // Framing columns: col[i][k] is the d_k coefficient of V_i.
    let zero = TruncPoly::zero(nv, cap);
    let col: [[TruncPoly; 4]; 4] = [
        [one.clone(), zero.clone(), zero.clone(), zero.clone()],
        [a.scale(-1.0), one.clone(), zero.clone(), zero.clone()],
        [a2.sub(b), a.scale(-1.0), one.clone(), zero.clone()],
        [
            d.scale(-1.0).add(&c.add(b).mul(a)).sub(&a3),
            a2.sub(c),
            a.scale(-1.0),
            one.clone(),
        ],
    ];

    let dirderiv = |i: usize, f: &TruncPoly| -> TruncPoly {
        let mut out = TruncPoly::zero(nv, cap);
        for (k, ck) in col[i].iter().enumerate() {
            out = out.add(&ck.mul(&f.partial(k)));
        }
        out
    };

    let v = |i: usize, f: &TruncPoly| dirderiv(i, f);

    let r0 = v(2, d)
        .sub(&v(3, b))
        .sub(&a.mul(&v(2, b)))
        .sub(&c.mul(&v(2, a)))
        .add(&a.mul(&v(3, a)))
        .add(&a2.mul(&v(2, a)));
    let r1 = v(1, d)
        .scale(2.0)
        .sub(&v(2, c))
        .sub(&a.mul(&v(1, b)).scale(2.0))
        .sub(&v(3, a))
        .add(&a.mul(&v(2, a)))
        .add(&a2.mul(&v(1, a)).scale(2.0))
        .sub(&c.mul(&v(1, a)).scale(2.0));
    let r2 = v(0, d)
        .sub(&v(1, c).scale(2.0))
        .add(&v(1, b).scale(3.0))
        .sub(&a.mul(&v(0, b)))
        .sub(&v(2, a).scale(2.0))
        .sub(&a.mul(&v(1, a)))
        .sub(&c.mul(&v(0, a)))
        .add(&a2.mul(&v(0, a)));
    let r3 = v(0, c)
        .sub(&v(0, b).scale(2.0))
        .add(&v(1, a))
        .add(&a.mul(&v(0, a)));
    [r0, r1, r2, r3]
}

/// Residual coefficients of exactly total degree `d`, flattened `[eq][slot]`.
fn residual_degree_coeffs(fields: &[TruncPoly; 4], d: usize) -> Vec<f64> {
    let r = residual_series(fields);
    let ctx = fields[0].ctx().clone();
    let slots = ctx.slots_of_degree(d);
    let mut out = Vec::with_capacity(4 * slots.len());
    for eq in &r {
        for &s in slots {
            out.push(eq.coeff_slot(s));
        }
    }
    out
}

fn fields_from_seed(seed: &Seed, cap: usize) -> [TruncPoly; 4] {
    std::array::from_fn(|f| {
        let mut p = TruncPoly::constant(4, cap, seed.values[f]);
        for dir in 0..4 {
            let mut m = [0u8; 4];
            m[dir] = 1;
            p.set_coeff(&m, seed.gradients[f][dir]);
        }
        p
    })
}

/// Prolongs seed data to a degree-`order` series, layer by layer, solving
/// each layer by minimum-norm least squares. Errors when the seed violates
/// the order-zero equations or a layer cannot be satisfied within `tol`.
pub fn prolong(seed: &Seed, order: usize, tol: f64) -> Result<(SeriesSolution, ProlongationReport)> {
    if order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "order {order} exceeds the desk-scale cap {MAX_ORDER}"
        )));
    }
    if order < 1 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let mut fields = fields_from_seed(seed, order);
    let ctx = fields[0].ctx().clone();

    // Order-zero admissibility of the seed.
    let seed_res = residual_degree_coeffs(&fields, 0);
    let violated: Vec<usize> = seed_res
        .iter()
        .enumerate()
        .filter(|(_, r)| r.abs() > tol)
        .map(|(i, _)| i + 1)
        .collect();
    if !violated.is_empty() {
        return Err(Error::InconsistentSeed {
            equations: violated,
            residuals: seed_res,
        });
    }
    let seed_residual = [seed_res[0], seed_res[1], seed_res[2], seed_res[3]];

    let mut orders = Vec::new();
    for target in 2..=order {
        let slots: Vec<usize> = ctx.slots_of_degree(target).to_vec();
        let unknowns = 4 * slots.len();
        let base = residual_degree_coeffs(&fields, target - 1);
        let rows = base.len();
        // Affine in the top layer: column = response to a unit coefficient.
        let mut m = DMatrix::zeros(rows, unknowns);
        for f in 0..4 {
            for (si, &slot) in slots.iter().enumerate() {
                fields[f].set_coeff_slot(slot, 1.0);
                let probe = residual_degree_coeffs(&fields, target - 1);
                fields[f].set_coeff_slot(slot, 0.0);
                for (row, (p, b)) in probe.iter().zip(&base).enumerate() {
                    m[(row, f * slots.len() + si)] = p - b;
                }
            }
        }
        let rhs = DVector::from_iterator(rows, base.iter().map(|b| -b));
        let (x, _) = min_norm_lstsq(&m, &rhs);
        let rank = svd_rank(&m, RANK_RTOL);
        for f in 0..4 {
            for (si, &slot) in slots.iter().enumerate() {
                fields[f].set_coeff_slot(slot, x[f * slots.len() + si]);
            }
        }
        let mut residual_after = 0.0f64;
        for p in residual_series(&fields).iter() {
            residual_after = residual_after.max(p.max_abs_through(target - 1));
        }
        if residual_after > tol {
            return Err(Error::ProlongationStalled {
                degree: target,
                residual: residual_after,
                tol,
            });
        }
        orders.push(OrderReport {
            degree: target,
            unknowns,
            independent: rank,
            dof: unknowns - rank,
            residual_after,
        });
    }
    Ok((
        SeriesSolution { fields, order },
        ProlongationReport {
            seed_residual,
            orders,
        },
    ))
}

/// Independent re-substitution: max absolute residual coefficient through
/// total degree `order - 1`.
pub fn verify_series(s: &SeriesSolution) -> f64 {
    residual_series(&s.fields)
        .iter()
        .map(|p| p.max_abs_through(s.order - 1))
        .fold(0.0, f64::max)
}

/// The 2-jet of the series at the expansion point.
pub fn origin_jet(s: &SeriesSolution) -> FieldJet {
    let mut jet = FieldJet::zero([0.0; 4]);
    for f in 0..4 {
        let p = &s.fields[f];
        jet.field_mut(f).value = p.value();
        for i in 0..4 {
            let mut m = [0u8; 4];
            m[i] = 1;
            jet.field_mut(f).grad[i] = p.coeff(&m);
            for j in i..4 {
                let mut mm = [0u8; 4];
                mm[i] += 1;
                mm[j] += 1;
                let factor = if i == j { 2.0 } else { 1.0 };
                jet.field_mut(f).set_hess(i, j, factor * p.coeff(&mm));
            }
        }
    }
    jet
}

/// Order-one data of an existing solution, for re-seeding.
pub fn seed_of(s: &SeriesSolution) -> Seed {
    let jet = origin_jet(s);
    Seed {
        values: jet.values(),
        gradients: jet.gradients(),
    }
}

/// Random seed satisfying the order-zero equations: gradients are sampled
/// uniformly and then corrected by the minimum-norm shift onto the kernel
/// of the residual map at the sampled values.
pub fn admissible_seed(rng: &mut impl Rng) -> Seed {
    let values: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let grad: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
    let r = residual_matrix(values);
    let g = DVector::from_vec(grad);
    let rhs = &r * &g;
    let (shift, _) = min_norm_lstsq(&r, &rhs);
    let corrected = g - shift;
    let mut gradients = [[0.0; 4]; 4];
    for f in 0..4 {
        for u in 0..4 {
            gradients[f][u] = corrected[f * 4 + u];
        }
    }
    Seed { values, gradients }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{Cubic, Fixture};
    use crate::lax::commutator_from_jet;
    use crate::pde::{bracket_span_check, residuals, spencer_bridge};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero_seed() -> Seed {
        Seed {
            values: [0.0; 4],
            gradients: [[0.0; 4]; 4],
        }
    }

    #[test]
    fn zero_seed_prolongs_to_the_zero_series() {
        let (sol, report) = prolong(&zero_seed(), 4, PROLONG_TOL).unwrap();
        assert_eq!(verify_series(&sol), 0.0);
        for f in &sol.fields {
            assert_eq!(f.max_abs_through(4), 0.0);
        }
        assert_eq!(report.orders.len(), 3);
    }

    #[test]
    fn constant_seed_stays_constant() {
        let seed = Seed {
            values: [0.7, -0.2, 0.4, 1.1],
            gradients: [[0.0; 4]; 4],
        };
        let (sol, _) = prolong(&seed, 4, PROLONG_TOL).unwrap();
        for (f, p) in sol.fields.iter().enumerate() {
            assert_eq!(p.value(), seed.values[f]);
            // Minimum-norm completion adds nothing above order zero.
            let mut above = 0.0f64;
            for (m, c) in p.iter_nonzero() {
                if m.iter().any(|&e| e > 0) {
                    above = above.max(c.abs());
                }
            }
            assert!(above < 1e-12);
        }
    }

    #[test]
    fn fixture_seed_prolongs_with_vanishing_residual() {
        // A = f(x^0) expanded at x^0 = 0.5.
        let f = Cubic([0.3, -0.8, 0.5, 0.2]);
        let seed = Seed {
            values: [f.eval(0.5), 0.0, 0.0, 0.0],
            gradients: [
                [f.deriv(0.5), 0.0, 0.0, 0.0],
                [0.0; 4],
                [0.0; 4],
                [0.0; 4],
            ],
        };
        let (sol, report) = prolong(&seed, 4, PROLONG_TOL).unwrap();
        assert!(verify_series(&sol) <= PROLONG_TOL);
        for o in &report.orders {
            assert!(o.residual_after <= PROLONG_TOL);
        }
    }

    #[test]
    fn random_admissible_seeds_solve_through_the_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..3 {
            let seed = admissible_seed(&mut rng);
            let (sol, _) = prolong(&seed, 4, PROLONG_TOL).unwrap();
            assert!(verify_series(&sol) <= PROLONG_TOL);
        }
    }

    #[test]
    fn extracted_origin_jets_satisfy_the_downstream_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let seed = admissible_seed(&mut rng);
        let (sol, _) = prolong(&seed, 4, PROLONG_TOL).unwrap();
        let jet = origin_jet(&sol);
        assert!(residuals(&jet).max_abs() <= 1e-9);
        let bridge = spencer_bridge(&jet).unwrap();
        assert!(bridge.spencer_norm <= 1e-9);
        assert!(bracket_span_check(&jet, &[-2.0, -1.0, 0.0, 1.0, 2.0]) <= 1e-9);
        assert!(commutator_from_jet(&jet, 6).max_abs_coeff() <= 1e-7);
    }

    #[test]
    fn layer_counts_echo_the_general_solution_size() {
        // Constant-coefficient layers at the zero seed: every condition is
        // independent and the leftover freedom per degree k matches the
        // coefficient count of four functions of three variables.
        let (_, report) = prolong(&zero_seed(), 4, PROLONG_TOL).unwrap();
        for o in &report.orders {
            let k = o.degree;
            assert_eq!(o.unknowns, 4 * (k + 3) * (k + 2) * (k + 1) / 6); // 4 C(k+3, 3)
            assert_eq!(o.independent, 4 * (k + 2) * (k + 1) * k / 6); // 4 C(k+2, 3)
            assert_eq!(o.dof, 4 * (k + 2) * (k + 1) / 2); // 4 C(k+2, 2)
        }
    }

    #[test]
    fn reseeding_reproduces_the_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let seed = admissible_seed(&mut rng);
        let (sol, _) = prolong(&seed, 3, PROLONG_TOL).unwrap();
        let (sol2, _) = prolong(&seed_of(&sol), 3, PROLONG_TOL).unwrap();
        for (p, q) in sol.fields.iter().zip(&sol2.fields) {
            let mut diff = 0.0f64;
            for (m, c) in p.iter_nonzero() {
                diff = diff.max((c - q.coeff(m)).abs());
            }
            assert!(diff <= 1e-10);
        }
    }

    #[test]
    fn inconsistent_seed_names_the_violated_equation() {
        // B with gradient only in x^3 makes the first equation -1 at order 0.
        let seed = Seed {
            values: [0.0; 4],
            gradients: [[0.0; 4], [0.0, 0.0, 0.0, 1.0], [0.0; 4], [0.0; 4]],
        };
        match prolong(&seed, 3, PROLONG_TOL) {
            Err(Error::InconsistentSeed { equations, .. }) => {
                assert_eq!(equations, vec![1]);
            }
            other => panic!("expected InconsistentSeed, got {other:?}"),
        }
    }

    #[test]
    fn verify_detects_an_injected_monomial() {
        let (mut sol, _) = prolong(&zero_seed(), 3, PROLONG_TOL).unwrap();
        sol.fields[1].set_coeff(&[0, 0, 0, 1], 1.0); // B = x^3 coordinate
        assert!(verify_series(&sol) >= 0.5);
    }

    #[test]
    fn order_cap_is_enforced() {
        assert!(prolong(&zero_seed(), MAX_ORDER + 1, PROLONG_TOL).is_err());
    }

    #[test]
    fn series_residuals_match_pointwise_residuals_on_fixture_jets() {
        // The series expansion of a fixture around a point reproduces the
        // pointwise residual implementation at order zero.
        let fx = Fixture::BOfX3 {
            coeffs: [0.0, 1.0, 0.0, 0.0],
        };
        let jet = fx.jet([0.0; 4]);
        let seedlike = fields_from_seed(
            &Seed {
                values: jet.values(),
                gradients: jet.gradients(),
            },
            2,
        );
        let r = residual_series(&seedlike);
        let pointwise = residuals(&jet);
        for (eq, series) in r.iter().enumerate() {
            assert!((series.value() - pointwise.0[eq]).abs() < 1e-13);
        }
    }
}
