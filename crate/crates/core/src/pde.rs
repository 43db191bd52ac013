//! The quasi-linear first-order system in the group coordinates
//! `A, B, C, D`: the framing dual to `h dx`, the four residual equations,
//! frame structure constants with their four combinations, the bracket-span
//! test on the cone field, the principal symbol, and the bridge to the
//! Spencer torsion test.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::gl2::{gl2_lie_algebra, h_matrix, BinaryCubic};
use crate::hflat::{torsion_residual, HJet};
use crate::jets::FieldJet;
use crate::linalg::{min_norm_lstsq, MatN};

/// Residuals of the four equations, in display order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualVec(pub [f64; 4]);

impl ResidualVec {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|r| r * r).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |a, r| a.max(r.abs()))
    }
}

/// Columns of the framing dual to `h dx`:
/// `V_0 = d_0`, `V_1 = d_1 - A d_0`, `V_2 = d_2 - A d_1 - (B - A^2) d_0`,
/// `V_3 = d_3 - A d_2 - (C - A^2) d_1 - (D - (C + B) A + A^3) d_0`.
pub fn framing(values: [f64; 4]) -> MatN {
    let [a, b, c, d] = values;
    MatN::from_rows(&[
        vec![
            1.0,
            -a,
            a * a - b,
            -d + (c + b) * a - a * a * a,
        ],
        vec![0.0, 1.0, -a, a * a - c],
        vec![0.0, 0.0, 1.0, -a],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("fixed shape")
}

/// Partial derivatives of the framing columns with respect to the four
/// field values; index order `(A, B, C, D)`.
pub fn framing_field_jacobian(values: [f64; 4]) -> [MatN; 4] {
    let [a, b, c, _d] = values;
    let mut d_a = MatN::zeros(4);
    d_a.set_entry(0, 1, -1.0);
    d_a.set_entry(0, 2, 2.0 * a);
    d_a.set_entry(1, 2, -1.0);
    d_a.set_entry(0, 3, (c + b) - 3.0 * a * a);
    d_a.set_entry(1, 3, 2.0 * a);
    d_a.set_entry(2, 3, -1.0);

    let mut d_b = MatN::zeros(4);
    d_b.set_entry(0, 2, -1.0);
    d_b.set_entry(0, 3, a);

    let mut d_c = MatN::zeros(4);
    d_c.set_entry(0, 3, a);
    d_c.set_entry(1, 3, -1.0);

    let mut d_d = MatN::zeros(4);
    d_d.set_entry(0, 3, -1.0);

    [d_a, d_b, d_c, d_d]
}

/// Directional derivative `V_i(f)` of field `f` from a 1-jet:
/// contraction of column `i` of the framing with the gradient.
fn frame_derivative(frame: &MatN, grad: &[f64; 4], i: usize) -> f64 {
    (0..4).map(|k| frame.entry(k, i) * grad[k]).sum()
}

/// The four residuals evaluated on a 1-jet, in display order.
pub fn residuals(jet: &FieldJet) -> ResidualVec {
    let values = jet.values();
    let [a, _b, c, _d] = values;
    let frame = framing(values);
    let v = |i: usize, f: &[f64; 4]| frame_derivative(&frame, f, i);
    let (ga, gb, gc, gd) = (&jet.a.grad, &jet.b.grad, &jet.c.grad, &jet.d.grad);

    let r0 = v(2, gd) - v(3, gb) - a * v(2, gb) - c * v(2, ga) + a * v(3, ga) + a * a * v(2, ga);
    let r1 = 2.0 * v(1, gd) - v(2, gc) - 2.0 * a * v(1, gb) - v(3, ga)
        + a * v(2, ga)
        + 2.0 * a * a * v(1, ga)
        - 2.0 * c * v(1, ga);
    let r2 = v(0, gd) - 2.0 * v(1, gc) + 3.0 * v(1, gb) - a * v(0, gb) - 2.0 * v(2, ga)
        - a * v(1, ga)
        - c * v(0, ga)
        + a * a * v(0, ga);
    let r3 = v(0, gc) - 2.0 * v(0, gb) + v(1, ga) + a * v(0, ga);
    ResidualVec([r0, r1, r2, r3])
}

/// Structure constants `[V_i, V_j] = sum_k c_{ij}^k V_k`, antisymmetric in
/// `(i, j)` by storage (pairs `i < j` in lexicographic order).
#[derive(Debug, Clone)]
pub struct StructureConstants {
    /// `c[pair][k]`, pairs (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).
    c: [[f64; 4]; 6],
}

fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < 4);
    i * 4 - i * (i + 1) / 2 + (j - i - 1)
}

impl StructureConstants {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => self.c[pair_index(i, j)][k],
            Ordering::Greater => -self.c[pair_index(j, i)][k],
            Ordering::Equal => 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.c
            .iter()
            .flatten()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }
}

/// Coordinate components of `[V_i, V_j]` from a 1-jet: the framing columns
/// are differentiated through the field gradients by the chain rule.
fn bracket_components(jet: &FieldJet, frame: &MatN, jac: &[MatN; 4], i: usize, j: usize) -> [f64; 4] {
    let grads = jet.gradients();
    // d_u col_j = sum_f (dV/df)[., j] * grad_f[u]
    let dcol = |col: usize, u: usize| -> [f64; 4] {
        let mut out = [0.0; 4];
        for f in 0..4 {
            for (row, slot) in out.iter_mut().enumerate() {
                *slot += jac[f].entry(row, col) * grads[f][u];
            }
        }
        out
    };
    let mut w = [0.0; 4];
    for u in 0..4 {
        let vi_u = frame.entry(u, i);
        let vj_u = frame.entry(u, j);
        let dj = dcol(j, u);
        let di = dcol(i, u);
        for k in 0..4 {
            w[k] += vi_u * dj[k] - vj_u * di[k];
        }
    }
    w
}

/// Solves the unitriangular framing for the structure constants of all
/// pairs `i < j`.
pub fn structure_constants(jet: &FieldJet) -> StructureConstants {
    let frame = framing(jet.values());
    let jac = framing_field_jacobian(jet.values());
    let mut c = [[0.0; 4]; 6];
    for i in 0..4 {
        for j in (i + 1)..4 {
            let w = bracket_components(jet, &frame, &jac, i, j);
            // Back substitution against the upper unitriangular framing.
            let mut x = [0.0; 4];
            for row in (0..4).rev() {
                let mut acc = w[row];
                for col in (row + 1)..4 {
                    acc -= frame.entry(row, col) * x[col];
                }
                x[row] = acc;
            }
            c[pair_index(i, j)] = x;
        }
    }
    StructureConstants { c }
}

/// The four combinations of structure constants that express
/// torsion-freeness, in display order.
pub fn c_equations(c: &StructureConstants) -> [f64; 4] {
    [
        c.get(2, 3, 0),
        c.get(2, 3, 1) - 2.0 * c.get(1, 3, 0),
        c.get(2, 3, 2) - 2.0 * c.get(1, 3, 1) + c.get(0, 3, 0) + 3.0 * c.get(1, 2, 0),
        c.get(2, 3, 3) - 2.0 * c.get(1, 3, 2) + c.get(0, 3, 1) + 3.0 * c.get(1, 2, 1)
            - 2.0 * c.get(0, 2, 0),
    ]
}

/// Least-squares distance of `[V(l), V'(l)]` to `span{V, V', V''}` at each
/// sample of the spectral parameter, maximised over the samples.
/// `V(l) = l^3 V_0 + 3 l^2 V_1 + 3 l V_2 + V_3`.
pub fn bracket_span_check(jet: &FieldJet, lambda_samples: &[f64]) -> f64 {
    let frame = framing(jet.values());
    let jac = framing_field_jacobian(jet.values());
    let grads = jet.gradients();
    let col = |i: usize| -> [f64; 4] { std::array::from_fn(|k| frame.entry(k, i)) };
    let dcol = |i: usize, u: usize| -> [f64; 4] {
        let mut out = [0.0; 4];
        for f in 0..4 {
            for (row, slot) in out.iter_mut().enumerate() {
                *slot += jac[f].entry(row, i) * grads[f][u];
            }
        }
        out
    };
    let combine = |w: [f64; 4], lam: f64| -> ([f64; 4], [f64; 4], [f64; 4]) {
        // V(l), V'(l), V''(l) weights on columns 0..3.
        let v = [lam.powi(3) * w[0], 3.0 * lam * lam * w[1], 3.0 * lam * w[2], w[3]];
        let dv = [3.0 * lam * lam * w[0], 6.0 * lam * w[1], 3.0 * w[2], 0.0];
        let ddv = [6.0 * lam * w[0], 6.0 * w[1], 0.0, 0.0];
        (v, dv, ddv)
    };
    let mut worst = 0.0f64;
    for &lam in lambda_samples {
        let (wv, wdv, wddv) = combine([1.0, 1.0, 1.0, 1.0], lam);
        // Assemble the three span vectors and the two fields to bracket.
        let assemble = |w: &[f64; 4]| -> [f64; 4] {
            let mut out = [0.0; 4];
            for i in 0..4 {
                let ci = col(i);
                for k in 0..4 {
                    out[k] += w[i] * ci[k];
                }
            }
            out
        };
        let v_vec = assemble(&wv);
        let dv_vec = assemble(&wdv);
        let ddv_vec = assemble(&wddv);
        // Bracket [V, V'] with coefficient functions differentiated by the
        // chain rule; weights are constants in x.
        let mut bracket = [0.0; 4];
        for u in 0..4 {
            let mut v_u = 0.0;
            let mut dv_u = 0.0;
            for i in 0..4 {
                v_u += wv[i] * frame.entry(u, i);
                dv_u += wdv[i] * frame.entry(u, i);
            }
            for i in 0..4 {
                let di = dcol(i, u);
                for k in 0..4 {
                    bracket[k] += v_u * wdv[i] * di[k] - dv_u * wv[i] * di[k];
                }
            }
        }
        let span = DMatrix::from_fn(4, 3, |r, c| match c {
            0 => v_vec[r],
            1 => dv_vec[r],
            _ => ddv_vec[r],
        });
        let b = DVector::from_column_slice(&bracket);
        let (_, defect) = min_norm_lstsq(&span, &b);
        worst = worst.max(defect);
    }
    worst
}

/// Principal symbol of the linearised system at covector `xi`: entry
/// `(r, f)` is the coefficient of the `xi`-directional derivative of field
/// `f` in equation `r`. Quasi-linearity makes it a function of the values
/// alone, extracted here by probing the residuals with unit gradients.
pub fn principal_symbol(values: [f64; 4], xi: [f64; 4]) -> MatN {
    let mut jet = FieldJet::zero([0.0; 4]);
    jet.a.value = values[0];
    jet.b.value = values[1];
    jet.c.value = values[2];
    jet.d.value = values[3];
    MatN::from_fn(4, |r, f| {
        let mut probe = jet;
        probe.field_mut(f).grad = xi;
        residuals(&probe).0[r]
    })
}

/// The binary cubic paired with a covector: `f_xi(s, t) = xi(V(s, t))` with
/// `V(s, t) = s^3 V_0 + 3 s^2 t V_1 + 3 s t^2 V_2 + t^3 V_3`.
pub fn xi_cubic(values: [f64; 4], xi: [f64; 4]) -> BinaryCubic {
    let frame = framing(values);
    let pair = |i: usize| -> f64 { (0..4).map(|k| xi[k] * frame.entry(k, i)).sum() };
    BinaryCubic::new([pair(0), 3.0 * pair(1), 3.0 * pair(2), pair(3)])
}

/// Covector whose paired cubic equals `p`, solved from the unitriangular
/// transposed framing. Used to construct characteristic covectors.
pub fn covector_for_cubic(values: [f64; 4], p: &BinaryCubic) -> [f64; 4] {
    let frame = framing(values);
    // xi^T frame = (p0, p1/3, p2/3, p3); frame^T is lower unitriangular.
    let rhs = [p.p[0], p.p[1] / 3.0, p.p[2] / 3.0, p.p[3]];
    let mut xi = [0.0; 4];
    for row in 0..4 {
        let mut acc = rhs[row];
        for col in 0..row {
            acc -= frame.entry(col, row) * xi[col];
        }
        xi[row] = acc; // frame[(row, row)] = 1
    }
    xi
}

/// Norms of the Spencer torsion residual and the explicit system residual
/// for the same 1-jet; the two zero sets coincide.
#[derive(Debug, Clone, Copy)]
pub struct BridgeReport {
    pub spencer_norm: f64,
    pub residual_norm: f64,
}

/// Runs the Spencer test on `h = h_matrix(A, B, C, D)` with
/// `dh[i] = h_matrix(A_i, B_i, C_i, D_i) - I` and the image Lie algebra of
/// the cubic representation, next to the explicit residuals.
pub fn spencer_bridge(jet: &FieldJet) -> Result<BridgeReport> {
    let report = torsion_residual(&h_jet_of(jet), &gl2_lie_algebra())?;
    Ok(BridgeReport {
        spencer_norm: report.norm,
        residual_norm: residuals(jet).norm(),
    })
}

/// The group-valued 1-jet carried by a field jet.
pub fn h_jet_of(jet: &FieldJet) -> HJet {
    let [a, b, c, d] = jet.values();
    let h = h_matrix(a, b, c, d);
    let id = MatN::identity(4);
    let dh = (0..4)
        .map(|i| {
            h_matrix(
                jet.a.grad[i],
                jet.b.grad[i],
                jet.c.grad[i],
                jet.d.grad[i],
            )
            .sub(&id)
        })
        .collect();
    HJet::new(h, dh).expect("shapes fixed")
}

/// Matrix of the residual map on the 16 first-derivative entries for a
/// fixed 0-jet; column `f * 4 + u` is the response to a unit `d_u` of field
/// `f`. The map is linear, so unit probes are exact.
pub fn residual_matrix(values: [f64; 4]) -> DMatrix<f64> {
    probe_matrix(values, 4, |jet| residuals(jet).0.to_vec())
}

/// Matrix of the four structure-constant combinations on the same space.
pub fn c_equation_matrix(values: [f64; 4]) -> DMatrix<f64> {
    probe_matrix(values, 4, |jet| {
        c_equations(&structure_constants(jet)).to_vec()
    })
}

/// Matrix of the Spencer residual components on the same space.
pub fn spencer_matrix(values: [f64; 4]) -> DMatrix<f64> {
    probe_matrix(values, 24, |jet| {
        let report = torsion_residual(&h_jet_of(jet), &gl2_lie_algebra())
            .expect("unit-triangular h is invertible");
        report.residual.as_vector().iter().copied().collect()
    })
}

fn probe_matrix(
    values: [f64; 4],
    rows: usize,
    eval: impl Fn(&FieldJet) -> Vec<f64>,
) -> DMatrix<f64> {
    let mut base = FieldJet::zero([0.0; 4]);
    base.a.value = values[0];
    base.b.value = values[1];
    base.c.value = values[2];
    base.d.value = values[3];
    let mut m = DMatrix::zeros(rows, 16);
    for f in 0..4 {
        for u in 0..4 {
            let mut probe = base;
            probe.field_mut(f).grad[u] = 1.0;
            let r = eval(&probe);
            for (row, &v) in r.iter().enumerate() {
                m[(row, f * 4 + u)] = v;
            }
        }
    }
    m
}
