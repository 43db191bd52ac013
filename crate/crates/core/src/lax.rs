//! The dispersionless Lax pair: vector fields `L0`, `L1` on
//! `R^4 x R_lambda` whose components are polynomials in the spectral
//! coordinate, their commutator evaluated pointwise from 2-jets, and a
//! composed-flow tracer for the commuting integral surfaces.
//!
//! The coefficient displays are assembled once, generically over a scalar
//! ring, and instantiated both with plain values (for flows) and with
//! value-plus-gradient duals (for the commutator, which differentiates the
//! first-derivative terms inside `N` and `M`).

use crate::error::{Error, Result};
use crate::jets::{FieldJet, Fixture};

/// Polynomial in the spectral coordinate with numeric coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaPoly {
    c: Vec<f64>,
}

impl LambdaPoly {
    pub fn new(coeffs: Vec<f64>) -> LambdaPoly {
        let mut p = LambdaPoly { c: coeffs };
        p.trim();
        p
    }

    pub fn zero() -> LambdaPoly {
        LambdaPoly { c: Vec::new() }
    }

    fn trim(&mut self) {
        while matches!(self.c.last(), Some(&x) if x == 0.0) {
            self.c.pop();
        }
    }

    /// Degree of the trimmed polynomial; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &c| acc * lambda + c)
    }

    pub fn deriv(&self) -> LambdaPoly {
        if self.c.len() <= 1 {
            return LambdaPoly::zero();
        }
        LambdaPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &LambdaPoly) -> LambdaPoly {
        let mut c = vec![0.0; self.c.len().max(other.c.len())];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = self.coeff(k) + other.coeff(k);
        }
        LambdaPoly::new(c)
    }

    pub fn sub(&self, other: &LambdaPoly) -> LambdaPoly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> LambdaPoly {
        LambdaPoly::new(self.c.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &LambdaPoly) -> LambdaPoly {
        if self.c.is_empty() || other.c.is_empty() {
            return LambdaPoly::zero();
        }
        let mut c = vec![0.0; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in other.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        LambdaPoly::new(c)
    }

    pub fn truncated(&self, cap: usize) -> LambdaPoly {
        LambdaPoly::new(self.c.iter().copied().take(cap + 1).collect())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.c.iter().fold(0.0f64, |a, c| a.max(c.abs()))
    }
}

/// Vector field on `R^4 x R_lambda` with `LambdaPoly` components.
#[derive(Debug, Clone)]
pub struct LambdaVectorField {
    /// Components on `d_0 .. d_3`.
    pub spatial: [LambdaPoly; 4],
    /// Component on `d_lambda`.
    pub lambda: LambdaPoly,
}

impl LambdaVectorField {
    pub fn max_abs_coeff(&self) -> f64 {
        self.spatial
            .iter()
            .chain(std::iter::once(&self.lambda))
            .fold(0.0f64, |a, p| a.max(p.max_abs_coeff()))
    }

    /// Numeric value at a fixed spectral coordinate: `(d_0..d_3, d_lambda)`.
    pub fn eval(&self, lambda: f64) -> [f64; 5] {
        [
            self.spatial[0].eval(lambda),
            self.spatial[1].eval(lambda),
            self.spatial[2].eval(lambda),
            self.spatial[3].eval(lambda),
            self.lambda.eval(lambda),
        ]
    }
}

// Scalar ring abstraction so the coefficient displays are written once.
trait Ring:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
}

impl Ring for f64 {
    fn from_f64(v: f64) -> f64 {
        v
    }
}

/// Value with spatial gradient; products follow the Leibniz rule.
#[derive(Debug, Clone, Copy)]
struct Dual {
    v: f64,
    g: [f64; 4],
}

impl std::ops::Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            g: std::array::from_fn(|i| self.g[i] + o.g[i]),
        }
    }
}

impl std::ops::Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual {
            v: self.v - o.v,
            g: std::array::from_fn(|i| self.g[i] - o.g[i]),
        }
    }
}

impl std::ops::Mul for Dual {
    type Output = Dual;
    #[allow(clippy::suspicious_arithmetic_impl)] // Leibniz rule
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            g: std::array::from_fn(|i| self.v * o.g[i] + self.g[i] * o.v),
        }
    }
}

impl std::ops::Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            v: -self.v,
            g: std::array::from_fn(|i| -self.g[i]),
        }
    }
}

impl Ring for Dual {
    fn from_f64(v: f64) -> Dual {
        Dual { v, g: [0.0; 4] }
    }
}

/// Field values and first derivatives in a generic scalar.
struct Quantities<S> {
    a: S,
    b: S,
    c: S,
    d: S,
    /// `da[i] = d_i A`, and likewise for `B` and `C`. Derivatives of `D`
    /// do not occur in any spectral coefficient.
    da: [S; 4],
    db: [S; 4],
    dc: [S; 4],
}

impl Quantities<f64> {
    fn from_jet(jet: &FieldJet) -> Self {
        Quantities {
            a: jet.a.value,
            b: jet.b.value,
            c: jet.c.value,
            d: jet.d.value,
            da: jet.a.grad,
            db: jet.b.grad,
            dc: jet.c.grad,
        }
    }
}

impl Quantities<Dual> {
    /// First derivatives become duals whose gradients are Hessian rows,
    /// which is where the 2-jet requirement enters.
    fn from_jet(jet: &FieldJet) -> Self {
        let value = |f: usize| Dual {
            v: jet.field(f).value,
            g: jet.field(f).grad,
        };
        let deriv = |f: usize, i: usize| Dual {
            v: jet.field(f).grad[i],
            g: std::array::from_fn(|u| jet.field(f).hess(i, u)),
        };
        Quantities {
            a: value(0),
            b: value(1),
            c: value(2),
            d: value(3),
            da: std::array::from_fn(|i| deriv(0, i)),
            db: std::array::from_fn(|i| deriv(1, i)),
            dc: std::array::from_fn(|i| deriv(2, i)),
        }
    }
}

// Components as coefficient lists over the ring; index 0..3 spatial, 4 the
// d_lambda slot.
fn l0_components<S: Ring>(q: &Quantities<S>) -> [Vec<S>; 5] {
    let k = S::from_f64;
    let half = k(0.5);
    let (a, b, c, d) = (q.a, q.b, q.c, q.d);
    let n0 = half * a * a * q.da[1] - a * b * q.da[0] + a * q.da[2] - a * q.db[1]
        - half * d * q.da[0]
        - half * q.dc[2]
        + half * a * q.dc[1]
        + half * b * q.dc[0]
        - half * c * q.da[1]
        + half * a * c * q.da[0]
        + half * q.da[3];
    let n1 = k(3.0) * q.db[1] - q.dc[1] - a * q.da[1] - a * q.dc[0] + k(2.0) * b * q.da[0]
        - k(2.0) * q.da[2];
    let n2 = q.dc[0] - q.da[1];
    [
        vec![-d + a * c, -(k(2.0) * a * a), k(4.0) * a, k(-2.0)],
        vec![-c, k(2.0) * a, k(-3.0)],
        vec![],
        vec![k(1.0)],
        vec![n0, n1, n2],
    ]
}

fn l1_components<S: Ring>(q: &Quantities<S>) -> [Vec<S>; 5] {
    let k = S::from_f64;
    let half = k(0.5);
    let (a, b) = (q.a, q.b);
    let m0 = half * a * q.da[1] + half * a * q.dc[0] - b * q.da[0] + q.da[2] - q.db[1];
    let m1 = half * q.da[1] - half * q.dc[0];
    [
        vec![-b + a * a, -(k(2.0) * a), k(1.0)],
        vec![-a, k(2.0)],
        vec![k(1.0)],
        vec![],
        vec![m0, m1],
    ]
}

fn to_numeric(parts: [Vec<f64>; 5]) -> LambdaVectorField {
    let [c0, c1, c2, c3, cl] = parts;
    LambdaVectorField {
        spatial: [
            LambdaPoly::new(c0),
            LambdaPoly::new(c1),
            LambdaPoly::new(c2),
            LambdaPoly::new(c3),
        ],
        lambda: LambdaPoly::new(cl),
    }
}

/// `L0` assembled from a 1-jet.
pub fn build_l0(jet: &FieldJet) -> LambdaVectorField {
    to_numeric(l0_components(&Quantities::<f64>::from_jet(jet)))
}

/// `L1` assembled from a 1-jet.
pub fn build_l1(jet: &FieldJet) -> LambdaVectorField {
    to_numeric(l1_components(&Quantities::<f64>::from_jet(jet)))
}

// Value and gradient views of a dual coefficient list.
fn values(p: &[Dual]) -> LambdaPoly {
    LambdaPoly::new(p.iter().map(|d| d.v).collect())
}

fn gradient(p: &[Dual], dir: usize) -> LambdaPoly {
    LambdaPoly::new(p.iter().map(|d| d.g[dir]).collect())
}

/// `[L0, L1]` evaluated at the base point of a full 2-jet, with the
/// resulting polynomials truncated above `lambda_degree_cap`.
pub fn commutator_from_jet(jet: &FieldJet, lambda_degree_cap: usize) -> LambdaVectorField {
    let q = Quantities::<Dual>::from_jet(jet);
    let f = l0_components(&q);
    let g = l1_components(&q);
    let component = |k: usize| -> LambdaPoly {
        let mut out = LambdaPoly::zero();
        // sum_b F^b d_b(G^k) - G^b d_b(F^k), b over x directions and lambda.
        for b in 0..4 {
            out = out.add(&values(&f[b]).mul(&gradient(&g[k], b)));
            out = out.sub(&values(&g[b]).mul(&gradient(&f[k], b)));
        }
        out = out.add(&values(&f[4]).mul(&values(&g[k]).deriv()));
        out = out.sub(&values(&g[4]).mul(&values(&f[k]).deriv()));
        out.truncated(lambda_degree_cap)
    };
    LambdaVectorField {
        spatial: [component(0), component(1), component(2), component(3)],
        lambda: component(4),
    }
}

/// Commutator at a point of an analytic fixture (which supplies the 2-jet).
pub fn commutator(
    fields: &Fixture,
    point: [f64; 4],
    lambda_degree_cap: usize,
) -> LambdaVectorField {
    commutator_from_jet(&fields.jet(point), lambda_degree_cap)
}

#[derive(Debug, Clone, Copy)]
enum Leg {
    L0,
    L1,
}

fn field_at(fixture: &Fixture, leg: Leg, state: [f64; 5]) -> [f64; 5] {
    let jet = fixture.jet([state[0], state[1], state[2], state[3]]);
    let lf = match leg {
        Leg::L0 => build_l0(&jet),
        Leg::L1 => build_l1(&jet),
    };
    lf.eval(state[4])
}

fn rk4_flow(fixture: &Fixture, leg: Leg, mut y: [f64; 5], time: f64, step: f64) -> [f64; 5] {
    if time == 0.0 {
        return y;
    }
    let nsteps = (time.abs() / step).ceil().max(1.0) as usize;
    let h = time / nsteps as f64;
    let axpy = |y: &[f64; 5], k: &[f64; 5], s: f64| -> [f64; 5] {
        std::array::from_fn(|i| y[i] + s * k[i])
    };
    for _ in 0..nsteps {
        let k1 = field_at(fixture, leg, y);
        let k2 = field_at(fixture, leg, axpy(&y, &k1, 0.5 * h));
        let k3 = field_at(fixture, leg, axpy(&y, &k2, 0.5 * h));
        let k4 = field_at(fixture, leg, axpy(&y, &k3, h));
        y = std::array::from_fn(|i| {
            y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        });
    }
    y
}

/// Endpoints of the two composed flows and their distance.
#[derive(Debug, Clone, Copy)]
pub struct FlowTrace {
    /// Flow of `L1` for time `s`, then `L0` for time `t`.
    pub forward: [f64; 5],
    /// Flow of `L0` for time `t`, then `L1` for time `s`.
    pub reversed: [f64; 5],
    pub discrepancy: f64,
}

/// Integrates both orderings of the two flows with classical fourth-order
/// steps of the given size. Commutation of the endpoints is only guaranteed
/// for exact-solution fixtures.
pub fn flow_trace(
    fixture: &Fixture,
    start: ([f64; 4], f64),
    times: (f64, f64),
    step: f64,
) -> Result<FlowTrace> {
    if step <= 0.0 {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let y0 = [start.0[0], start.0[1], start.0[2], start.0[3], start.1];
    let (s, t) = times;
    let forward = rk4_flow(fixture, Leg::L0, rk4_flow(fixture, Leg::L1, y0, s, step), t, step);
    let reversed = rk4_flow(fixture, Leg::L1, rk4_flow(fixture, Leg::L0, y0, t, step), s, step);
    let discrepancy = forward
        .iter()
        .zip(&reversed)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(FlowTrace {
        forward,
        reversed,
        discrepancy,
    })
}

/// Sampled polyline of the composed forward flow, one row `(x, lambda)` per
/// integrator step, for external plotting.
pub fn trace_polyline(
    fixture: &Fixture,
    start: ([f64; 4], f64),
    times: (f64, f64),
    step: f64,
) -> Result<Vec<[f64; 5]>> {
    if step <= 0.0 {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let mut rows = Vec::new();
    let mut y = [start.0[0], start.0[1], start.0[2], start.0[3], start.1];
    rows.push(y);
    for (leg, time) in [(Leg::L1, times.0), (Leg::L0, times.1)] {
        if time == 0.0 {
            continue;
        }
        let nsteps = (time.abs() / step).ceil().max(1.0) as usize;
        let h = time / nsteps as f64;
        for _ in 0..nsteps {
            y = rk4_flow(fixture, leg, y, h, step.min(h.abs()));
            rows.push(y);
        }
    }
    Ok(rows)
}
