//! Binary cubics and the groups acting on them: the cone of perfect cubes,
//! the twisted cubic, the degree-three symmetric-power action of
//! `GL(2, R)` with its Lie algebra, the unit-triangular group `H` in its
//! four coordinates `A, B, C, D`, the Heisenberg embedding, and the
//! coframe constructions attached to fourth-order ODEs.

use crate::error::{Error, Result};
use crate::linalg::{svd_rank, MatN, Subspace, RANK_RTOL};

/// 2x2 real matrix acting on the variables of binary forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let d = self.det();
        if !d.is_finite() || d.abs() < 1e-300 {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        let [[a, b], [c, dd]] = self.0;
        Ok(Mat2([[dd / d, -b / d], [-c / d, a / d]]))
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = self.0[i][0] * other.0[0][j] + self.0[i][1] * other.0[1][j];
            }
        }
        Mat2(out)
    }
}

/// Binary cubic `p0 x^3 + p1 x^2 y + p2 x y^2 + p3 y^3` in the monomial basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryCubic {
    pub p: [f64; 4],
}

impl BinaryCubic {
    pub fn new(p: [f64; 4]) -> Self {
        BinaryCubic { p }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.p[0] * x * x * x + self.p[1] * x * x * y + self.p[2] * x * y * y + self.p[3] * y * y * y
    }

    /// Discriminant `18abcd - 4b^3 d + b^2 c^2 - 4ac^3 - 27a^2 d^2` of
    /// `a s^3 + b s^2 t + c s t^2 + d t^3`.
    pub fn discriminant(&self) -> f64 {
        let [a, b, c, d] = self.p;
        18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c
            - 27.0 * a * a * d * d
    }
}

/// Point of the cone of perfect cubes: coefficients of `(s x + t y)^3`.
pub fn cone_point(s: f64, t: f64) -> [f64; 4] {
    [s * s * s, 3.0 * s * s * t, 3.0 * s * t * t, t * t * t]
}

/// The three quadrics cutting out the twisted cubic curve in `RP^3`.
pub fn twisted_cubic_eval(x: f64, y: f64, z: f64, w: f64) -> [f64; 3] {
    [x * z - y * y, y * w - z * z, x * w - y * z]
}

/// The twisted-cubic equations after undoing the binomial weights of the
/// cone parametrisation: `(X, Y, Z, W) = (v0, v1/3, v2/3, v3)` lies on the
/// curve exactly when `v` lies on the cone.
pub fn cone_equations(v: [f64; 4]) -> [f64; 3] {
    twisted_cubic_eval(v[0], v[1] / 3.0, v[2] / 3.0, v[3])
}

// Coefficients of the product of two binary forms, both stored as
// [c_0, .., c_d] for sum c_i x^{d-i} y^i.
fn form_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn linear_power(l: [f64; 2], k: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..k {
        out = form_mul(&out, &l);
    }
    out
}

/// Matrix of the induced action on binary cubics in the monomial basis
/// `x^{3-i} y^i -> e_{i+1}`, using the substitution action
/// `(rho(g) p)(v) = p(g^{-1} v)`.
pub fn sym3_action(g: &Mat2) -> Result<MatN> {
    let gi = g.inverse()?.0;
    let mut m = MatN::zeros(4);
    for j in 0..4 {
        // Image of x^{3-j} y^j under substitution.
        let lx = [gi[0][0], gi[0][1]];
        let ly = [gi[1][0], gi[1][1]];
        let col = form_mul(&linear_power(lx, 3 - j), &linear_power(ly, j));
        for (k, &v) in col.iter().enumerate() {
            m.set_entry(k, j, v);
        }
    }
    Ok(m)
}

/// Differential of the action at the identity along a 2x2 direction:
/// `rho'(a) p = -(dp/dx (a11 x + a12 y) + dp/dy (a21 x + a22 y))`,
/// computed exactly on the monomial basis.
pub fn sym3_differential(a: &Mat2) -> MatN {
    let [[a00, a01], [a10, a11]] = a.0;
    let mut m = MatN::zeros(4);
    for j in 0..4usize {
        let xdeg = (3 - j) as f64;
        let diag = -xdeg * a00 - (j as f64) * a11;
        m.set_entry(j, j, diag);
        if j + 1 < 4 {
            m.set_entry(j + 1, j, -xdeg * a01);
        }
        if j >= 1 {
            m.set_entry(j - 1, j, -(j as f64) * a10);
        }
    }
    m
}

/// Basis of the image Lie algebra inside `gl(4)`: the differentials of the
/// action along the four elementary 2x2 directions.
pub fn gl2_lie_algebra() -> Subspace {
    let dirs = [
        Mat2([[1.0, 0.0], [0.0, 0.0]]),
        Mat2([[0.0, 1.0], [0.0, 0.0]]),
        Mat2([[0.0, 0.0], [1.0, 0.0]]),
        Mat2([[0.0, 0.0], [0.0, 1.0]]),
    ];
    let basis = dirs.iter().map(sym3_differential).collect();
    Subspace::new(4, basis).expect("the faithful representation has a 4-dimensional algebra")
}

/// Unit upper-triangular element of the group `H` with rows
/// `(1, A, B, D), (0, 1, A, C), (0, 0, 1, A), (0, 0, 0, 1)`.
pub fn h_matrix(a: f64, b: f64, c: f64, d: f64) -> MatN {
    MatN::from_rows(&[
        vec![1.0, a, b, d],
        vec![0.0, 1.0, a, c],
        vec![0.0, 0.0, 1.0, a],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("fixed shape")
}

/// Lie algebra of `H`: derivatives of `h_matrix` at the identity along the
/// four coordinates.
pub fn h_lie_algebra() -> Subspace {
    let id = MatN::identity(4);
    let basis = vec![
        h_matrix(1.0, 0.0, 0.0, 0.0).sub(&id),
        h_matrix(0.0, 1.0, 0.0, 0.0).sub(&id),
        h_matrix(0.0, 0.0, 1.0, 0.0).sub(&id),
        h_matrix(0.0, 0.0, 0.0, 1.0).sub(&id),
    ];
    Subspace::new(4, basis).expect("coordinate directions are independent")
}

/// Checks the `H`-pattern: unit upper-triangular with equal entries on the
/// first superdiagonal. Returns the largest pattern defect.
pub fn h_pattern_defect(m: &MatN) -> f64 {
    let mut defect = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let e = m.entry(i, j);
            if i == j {
                defect = defect.max((e - 1.0).abs());
            } else if i > j {
                defect = defect.max(e.abs());
            }
        }
    }
    let a = m.entry(0, 1);
    defect = defect.max((m.entry(1, 2) - a).abs());
    defect = defect.max((m.entry(2, 3) - a).abs());
    defect
}

/// Faithful four-dimensional representation of the continuous Heisenberg
/// group, an embedding onto the `C = A^2/2` subgroup pattern of `H`.
pub fn heisenberg_embed(a: f64, b: f64, c: f64) -> MatN {
    MatN::from_rows(&[
        vec![1.0, a, 0.5 * a * a + b, a * a * a / 6.0 + a * b - c],
        vec![0.0, 1.0, a, 0.5 * a * a],
        vec![0.0, 0.0, 1.0, a],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("fixed shape")
}

/// Group law of the 3x3 unit upper-triangular realisation
/// `(a, b, c) = [[1, a, c], [0, 1, b], [0, 0, 1]]`.
pub fn heisenberg_compose(g1: (f64, f64, f64), g2: (f64, f64, f64)) -> (f64, f64, f64) {
    (g1.0 + g2.0, g1.1 + g2.1, g1.2 + g2.2 + g1.0 * g2.1)
}

/// Coefficient quadruple of a cone-adapted framing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// The `(A, B, C, D)` coordinates of an element of `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// The dual coframe matrix determined by a framing with coefficients
/// `(alpha, beta, gamma, delta)`, together with the `(A, B, C, D)` for which
/// `h_matrix` reproduces it entrywise.
pub fn h_from_alpha(fc: &FrameCoeffs) -> (MatN, HParams) {
    let FrameCoeffs {
        alpha,
        beta,
        gamma,
        delta,
    } = *fc;
    let m = MatN::from_rows(&[
        vec![
            1.0,
            -alpha,
            -beta + alpha * alpha,
            -delta + alpha * (gamma + beta) - alpha * alpha * alpha,
        ],
        vec![0.0, 1.0, -alpha, -gamma + alpha * alpha],
        vec![0.0, 0.0, 1.0, -alpha],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("fixed shape");
    let params = HParams {
        a: -alpha,
        b: alpha * alpha - beta,
        c: alpha * alpha - gamma,
        d: alpha * (gamma + beta) - alpha * alpha * alpha - delta,
    };
    (m, params)
}

/// Framing columns `V_0 = d_0`, `V_1 = d_1 + alpha d_0`,
/// `V_2 = d_2 + alpha d_1 + beta d_0`,
/// `V_3 = d_3 + alpha d_2 + gamma d_1 + delta d_0`;
/// column `j` holds the coefficients of `V_j` in the coordinate frame.
pub fn framing_from_alpha(fc: &FrameCoeffs) -> MatN {
    MatN::from_rows(&[
        vec![1.0, fc.alpha, fc.beta, fc.delta],
        vec![0.0, 1.0, fc.alpha, fc.gamma],
        vec![0.0, 0.0, 1.0, fc.alpha],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("fixed shape")
}

/// Coframe built from two sets of reciprocal derivative values: row `k`
/// (counting the number of `b` factors) and column `i` carry the symmetrised
/// products over the index set `{0..3} \ {i}`, weighted by `1 / C(3, k)`.
#[derive(Debug, Clone)]
pub struct FkCoframe {
    pub matrix: MatN,
    pub rank: usize,
}

impl FkCoframe {
    pub fn is_full_rank(&self) -> bool {
        self.rank == 4
    }
}

pub fn fk_coframe(a: [f64; 4], b: [f64; 4]) -> FkCoframe {
    let binom3 = [1.0, 3.0, 3.0, 1.0];
    let mut m = MatN::zeros(4);
    for col in 0..4 {
        let others: Vec<usize> = (0..4).filter(|&j| j != col).collect();
        for row in 0..4 {
            // Sum over all ways to pick `row` of the three indices as b's.
            let mut sum = 0.0;
            for mask in 0..8u32 {
                if mask.count_ones() as usize != row {
                    continue;
                }
                let mut prod = 1.0;
                for (bit, &j) in others.iter().enumerate() {
                    prod *= if mask & (1 << bit) != 0 { b[j] } else { a[j] };
                }
                sum += prod;
            }
            m.set_entry(row, col, sum / binom3[row]);
        }
    }
    let rank = svd_rank(m.as_dmatrix(), RANK_RTOL);
    FkCoframe { matrix: m, rank }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_mat2(rng: &mut ChaCha8Rng) -> Mat2 {
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

    #[test]
    fn cone_point_examples() {
        assert_eq!(cone_point(1.0, 0.0), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(cone_point(0.0, 1.0), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(cone_point(1.0, 1.0), [1.0, 3.0, 3.0, 1.0]);
    }

    #[test]
    fn twisted_cubic_contains_monomial_curve() {
        // (s^3, s^2 t, s t^2, t^3) for (s, t) = (2, 1).
        assert_eq!(twisted_cubic_eval(8.0, 4.0, 2.0, 1.0), [0.0, 0.0, 0.0]);
        assert_eq!(twisted_cubic_eval(1.0, 1.0, 1.0, 1.0), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn cone_points_satisfy_rescaled_equations() {
        // Raw cone point fails the twisted-cubic equations...
        let v = cone_point(1.0, 1.0);
        let p = twisted_cubic_eval(v[0], v[1], v[2], v[3]);
        assert_relative_eq!(p[0], -6.0);
        // ...but the binomial rescaling lands on the curve.
        assert_eq!(cone_equations(v), [0.0, 0.0, 0.0]);
        let v = cone_point(-1.3, 0.7);
        let q = cone_equations(v);
        for e in q {
            assert!(e.abs() < 1e-12);
        }
    }

    #[test]
    fn sym3_of_identity_and_diagonal() {
        let id = sym3_action(&Mat2::identity()).unwrap();
        assert!(id.sub(&MatN::identity(4)).max_abs() < 1e-15);

        let (l, m) = (2.0, 0.5);
        let g = Mat2([[l, 0.0], [0.0, m]]);
        let rho = sym3_action(&g).unwrap();
        let expect = [
            l.powi(-3),
            l.powi(-2) * m.powi(-1),
            l.powi(-1) * m.powi(-2),
            m.powi(-3),
        ];
        for k in 0..4 {
            assert_relative_eq!(rho.entry(k, k), expect[k], epsilon = 1e-14);
            for j in 0..4 {
                if j != k {
                    assert!(rho.entry(k, j).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn sym3_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let g1 = random_mat2(&mut rng);
            let g2 = random_mat2(&mut rng);
            let lhs = sym3_action(&g1.mul(&g2)).unwrap();
            let rhs = sym3_action(&g1).unwrap().mul(&sym3_action(&g2).unwrap());
            assert!(lhs.sub(&rhs).max_abs() < 1e-10 * (1.0 + rhs.max_abs()));
        }
    }

    #[test]
    fn action_preserves_the_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let g = random_mat2(&mut rng);
            let (s, t) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let v = cone_point(s, t);
            let image = sym3_action(&g).unwrap().mul_vec(&v);
            let scale = image.iter().fold(1.0f64, |a, x| a.max(x.abs()));
            for e in cone_equations([image[0], image[1], image[2], image[3]]) {
                assert!(e.abs() <= 1e-9 * scale * scale);
            }
        }
    }

    #[test]
    fn differential_along_identity_is_minus_three() {
        let d = sym3_differential(&Mat2::identity());
        assert!(d.sub(&MatN::identity(4).scale(-3.0)).max_abs() < 1e-15);
    }

    #[test]
    fn differential_matches_finite_difference_of_action() {
        let dirs = [
            Mat2([[1.0, 0.0], [0.0, 0.0]]),
            Mat2([[0.0, 1.0], [0.0, 0.0]]),
            Mat2([[0.0, 0.0], [1.0, 0.0]]),
            Mat2([[0.0, 0.0], [0.0, 1.0]]),
        ];
        let eps = 1e-6;
        for a in &dirs {
            // First order in eps: exp(eps a) = I + eps a exactly for the
            // elementary nilpotent directions; for the diagonal ones use exp.
            let ea = Mat2([
                [(eps * a.0[0][0]).exp(), eps * a.0[0][1]],
                [eps * a.0[1][0], (eps * a.0[1][1]).exp()],
            ]);
            let rho = sym3_action(&ea).unwrap();
            let fd = rho.sub(&MatN::identity(4)).scale(1.0 / eps);
            let exact = sym3_differential(a);
            assert!(fd.sub(&exact).max_abs() < 1e-5);
        }
    }

    #[test]
    fn lie_algebra_is_four_dimensional_and_closed() {
        let g = gl2_lie_algebra();
        assert_eq!(g.dim(), 4);
        for x in g.basis() {
            for y in g.basis() {
                let br = x.bracket(y);
                assert!(g.distance(&br) < 1e-10 * (1.0 + br.max_abs()));
            }
        }
    }

    #[test]
    fn exp_of_algebra_matches_action_of_exp() {
        // rho(exp(a)) = exp(rho'(a)) on a generic direction.
        let a = Mat2([[0.3, -0.2], [0.5, 0.1]]);
        let lhs = expm(&sym3_differential(&a));
        let mut e2 = Mat2::identity();
        let mut term = Mat2::identity();
        for k in 1..30 {
            let t = term.mul(&a);
            term = Mat2([
                [t.0[0][0] / k as f64, t.0[0][1] / k as f64],
                [t.0[1][0] / k as f64, t.0[1][1] / k as f64],
            ]);
            e2 = Mat2([
                [e2.0[0][0] + term.0[0][0], e2.0[0][1] + term.0[0][1]],
                [e2.0[1][0] + term.0[1][0], e2.0[1][1] + term.0[1][1]],
            ]);
        }
        // The substitution action inverts, so exp(rho'(a)) = rho(exp(a)).
        let rhs = sym3_action(&e2).unwrap();
        assert!(lhs.sub(&rhs).max_abs() < 1e-9);
    }

    #[test]
    fn h_closure_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let v: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
            let h1 = h_matrix(v[0], v[1], v[2], v[3]);
            let h2 = h_matrix(v[4], v[5], v[6], v[7]);
            assert_eq!(h_pattern_defect(&h1.mul(&h2)), 0.0);
            let (inv, _) = h1.try_inverse().unwrap();
            assert!(h_pattern_defect(&inv) < 1e-12);
            assert_relative_eq!(inv.entry(0, 1), -v[0], epsilon = 1e-12);
        }
    }

    #[test]
    fn h_lie_algebra_dimension() {
        assert_eq!(h_lie_algebra().dim(), 4);
    }

    #[test]
    fn heisenberg_identity_and_pattern() {
        assert_eq!(
            heisenberg_embed(0.0, 0.0, 0.0)
                .sub(&MatN::identity(4))
                .max_abs(),
            0.0
        );
        let m = heisenberg_embed(1.3, -0.4, 0.8);
        assert_eq!(h_pattern_defect(&m), 0.0);
        // A = a and C = a^2/2.
        assert_relative_eq!(m.entry(1, 3), 0.5 * 1.3 * 1.3);
    }

    #[test]
    fn heisenberg_embedding_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let g1 = (
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let g2 = (
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let lhs = heisenberg_embed(g1.0, g1.1, g1.2).mul(&heisenberg_embed(g2.0, g2.1, g2.2));
            let c = heisenberg_compose(g1, g2);
            let rhs = heisenberg_embed(c.0, c.1, c.2);
            assert!(lhs.sub(&rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn h_from_alpha_matches_h_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let fc = FrameCoeffs {
                alpha: rng.random_range(-1.5..1.5),
                beta: rng.random_range(-1.5..1.5),
                gamma: rng.random_range(-1.5..1.5),
                delta: rng.random_range(-1.5..1.5),
            };
            let (m, p) = h_from_alpha(&fc);
            let hm = h_matrix(p.a, p.b, p.c, p.d);
            assert!(m.sub(&hm).max_abs() < 1e-12);
        }
        // Worked instance alpha = 1, rest 0.
        let (m, p) = h_from_alpha(&FrameCoeffs {
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.0,
            delta: 0.0,
        });
        assert_eq!((p.a, p.b, p.c, p.d), (-1.0, 1.0, 1.0, -1.0));
        assert_eq!(m.entry(0, 3), -1.0);
    }

    #[test]
    fn coframe_framing_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let fc = FrameCoeffs {
                alpha: rng.random_range(-1.5..1.5),
                beta: rng.random_range(-1.5..1.5),
                gamma: rng.random_range(-1.5..1.5),
                delta: rng.random_range(-1.5..1.5),
            };
            let (h, _) = h_from_alpha(&fc);
            let v = framing_from_alpha(&fc);
            let prod = h.mul(&v);
            assert!(prod.sub(&MatN::identity(4)).max_abs() < 1e-12);
        }
        // alpha = 1 alone: V_1 = d_1 + d_0.
        let v = framing_from_alpha(&FrameCoeffs {
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.0,
            delta: 0.0,
        });
        assert_eq!(v.entry(0, 1), 1.0);
        assert_eq!(v.entry(1, 1), 1.0);
    }

    #[test]
    fn fk_coframe_degenerate_inputs() {
        let fk = fk_coframe([1.0, 1.0, 1.0, 1.0], [0.0, 0.0, 0.0, 0.0]);
        // First row all ones, everything below zero.
        for c in 0..4 {
            assert_eq!(fk.matrix.entry(0, c), 1.0);
            for r in 1..4 {
                assert_eq!(fk.matrix.entry(r, c), 0.0);
            }
        }
        assert_eq!(fk.rank, 1);
        assert!(!fk.is_full_rank());

        let fk = fk_coframe([1.0; 4], [1.0; 4]);
        for r in 0..4 {
            for c in 0..4 {
                assert_relative_eq!(fk.matrix.entry(r, c), 1.0, epsilon = 1e-14);
            }
        }
        assert_eq!(fk.rank, 1);
    }

    #[test]
    fn fk_coframe_generic_inputs_are_finite_and_patterned() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.5..2.0));
        let b: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.5..2.0));
        let fk = fk_coframe(a, b);
        assert!(fk.matrix.max_abs().is_finite());
        // Entry (0, 0) is a1 a2 a3; entry (3, 0) is b1 b2 b3.
        assert_relative_eq!(fk.matrix.entry(0, 0), a[1] * a[2] * a[3], epsilon = 1e-12);
        assert_relative_eq!(fk.matrix.entry(3, 0), b[1] * b[2] * b[3], epsilon = 1e-12);
        // Entry (1, 0): (a1 a2 b3 + a1 b2 a3 + b1 a2 a3) / 3.
        let expect = (a[1] * a[2] * b[3] + a[1] * b[2] * a[3] + b[1] * a[2] * a[3]) / 3.0;
        assert_relative_eq!(fk.matrix.entry(1, 0), expect, epsilon = 1e-12);
    }

    #[test]
    fn discriminant_detects_multiple_roots() {
        // (s - t)^2 (s + 2t) = s^3 - 3 s t^2 + 2 t^3.
        let double = BinaryCubic::new([1.0, 0.0, -3.0, 2.0]);
        assert_relative_eq!(double.discriminant(), 0.0, epsilon = 1e-12);
        // s^3 + t^3: one real root pair over RP^1, negative discriminant.
        let simple = BinaryCubic::new([1.0, 0.0, 0.0, 1.0]);
        assert_relative_eq!(simple.discriminant(), -27.0);
        // s t (s + t) = s^2 t + s t^2: distinct real roots, positive disc.
        let split = BinaryCubic::new([0.0, 1.0, 1.0, 0.0]);
        assert_relative_eq!(split.discriminant(), 1.0);
    }
}
