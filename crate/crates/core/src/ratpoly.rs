//! Exact rational arithmetic on sparse polynomials over the five jet-space
//! coordinates `(y, x0, x1, x2, x3)`. This is the independent symbolic route
//! for the fourth-order-ODE correspondence: total derivatives are applied to
//! global polynomials with no truncation, and results are evaluated at a
//! rational point only at the very end.

use std::collections::BTreeMap;

/// Reduced fraction over `i128`. Desk-scale inputs keep the integers tiny;
/// arithmetic panics on overflow rather than silently losing exactness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Rational {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn int(v: i128) -> Rational {
        Rational { num: v, den: 1 }
    }

    pub fn zero() -> Rational {
        Rational::int(0)
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn add(&self, o: &Rational) -> Rational {
        Rational::new(
            self.num
                .checked_mul(o.den)
                .and_then(|l| o.num.checked_mul(self.den).and_then(|r| l.checked_add(r)))
                .expect("rational overflow"),
            self.den.checked_mul(o.den).expect("rational overflow"),
        )
    }

    pub fn sub(&self, o: &Rational) -> Rational {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Rational) -> Rational {
        Rational::new(
            self.num.checked_mul(o.num).expect("rational overflow"),
            self.den.checked_mul(o.den).expect("rational overflow"),
        )
    }

    pub fn neg(&self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Sparse polynomial in five variables with rational coefficients;
/// exponent keys are `[y, x0, x1, x2, x3]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    terms: BTreeMap<[u8; 5], Rational>,
}

impl RatPoly {
    pub fn zero() -> RatPoly {
        RatPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rational) -> RatPoly {
        let mut p = RatPoly::zero();
        if !c.is_zero() {
            p.terms.insert([0; 5], c);
        }
        p
    }

    /// The coordinate function for slot `var` (0 = y, 1..4 = x0..x3).
    pub fn var(var: usize) -> RatPoly {
        let mut m = [0u8; 5];
        m[var] = 1;
        RatPoly::monomial(m, Rational::int(1))
    }

    pub fn monomial(m: [u8; 5], c: Rational) -> RatPoly {
        let mut p = RatPoly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    fn insert(&mut self, m: [u8; 5], c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &RatPoly) -> RatPoly {
        let mut out = self.clone();
        for (&m, c) in &o.terms {
            out.insert(m, *c);
        }
        out
    }

    pub fn sub(&self, o: &RatPoly) -> RatPoly {
        self.add(&o.scale(&Rational::int(-1)))
    }

    pub fn scale(&self, s: &Rational) -> RatPoly {
        if s.is_zero() {
            return RatPoly::zero();
        }
        RatPoly {
            terms: self
                .terms
                .iter()
                .map(|(&m, c)| (m, c.mul(s)))
                .collect(),
        }
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        let mut out = RatPoly::zero();
        for (&ma, ca) in &self.terms {
            for (&mb, cb) in &o.terms {
                let m: [u8; 5] = std::array::from_fn(|i| ma[i] + mb[i]);
                out.insert(m, ca.mul(cb));
            }
        }
        out
    }

    pub fn partial(&self, var: usize) -> RatPoly {
        let mut out = RatPoly::zero();
        for (&m, c) in &self.terms {
            if m[var] == 0 {
                continue;
            }
            let mut lower = m;
            lower[var] -= 1;
            out.insert(lower, c.mul(&Rational::int(m[var] as i128)));
        }
        out
    }

    pub fn eval(&self, point: &[Rational; 5]) -> Rational {
        let mut total = Rational::zero();
        for (&m, c) in &self.terms {
            let mut term = *c;
            for (v, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&point[v]);
                }
            }
            total = total.add(&term);
        }
        total
    }

    /// Iterated partial derivative indexed by a multi-index, used to hand
    /// exact jets to the floating-point evaluation path.
    pub fn partial_multi(&self, m: &[u8]) -> RatPoly {
        let mut p = self.clone();
        for (var, &e) in m.iter().enumerate() {
            for _ in 0..e {
                p = p.partial(var);
            }
        }
        p
    }
}

/// The total-derivative operator attached to a polynomial right-hand side:
/// `X(G) = dG/dy + x1 dG/dx0 + x2 dG/dx1 + x3 dG/dx2 + F dG/dx3`.
pub fn total_derivative(f: &RatPoly, g: &RatPoly) -> RatPoly {
    g.partial(0)
        .add(&RatPoly::var(2).mul(&g.partial(1)))
        .add(&RatPoly::var(3).mul(&g.partial(2)))
        .add(&RatPoly::var(4).mul(&g.partial(3)))
        .add(&f.mul(&g.partial(4)))
}

/// Frame coefficients of the ODE correspondence evaluated symbolically:
/// exact rationals for `alpha, beta, gamma, delta` at a rational point of
/// `{y = 0}`.
pub fn ode_frame_coefficients(f: &RatPoly, point: &[Rational; 5]) -> [Rational; 4] {
    let f3 = f.partial(4);
    let f2 = f.partial(3);
    let f1 = f.partial(2);
    let xf3 = total_derivative(f, &f3);
    let f3sq = f3.mul(&f3);
    let k = f2
        .scale(&Rational::int(-1))
        .add(&xf3.scale(&Rational::new(3, 2)))
        .sub(&f3sq.scale(&Rational::new(3, 8)));
    let alpha = f3.clone();
    let beta = f2
        .scale(&Rational::new(7, 20))
        .sub(&xf3.scale(&Rational::new(3, 20)))
        .add(&f3sq.scale(&Rational::new(9, 40)));
    let gamma = f2.add(&k.scale(&Rational::new(7, 10)));
    let delta = f1
        .sub(&total_derivative(f, &k).scale(&Rational::new(3, 10)))
        .sub(&total_derivative(f, &f2))
        .add(&k.mul(&f3).scale(&Rational::new(21, 40)))
        .sub(&xf3.mul(&f3).scale(&Rational::new(27, 16)))
        .sub(&f2.mul(&f3).scale(&Rational::new(3, 4)))
        .add(&total_derivative(f, &xf3).scale(&Rational::new(3, 4)))
        .add(&f3sq.mul(&f3).scale(&Rational::new(27, 64)));
    [
        alpha.eval(point),
        beta.eval(point),
        gamma.eval(point),
        delta.eval(point),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_normalisation() {
        let r = Rational::new(6, -4);
        assert_eq!(r.numer(), -3);
        assert_eq!(r.denom(), 2);
        assert_eq!(Rational::new(7, 20).to_f64(), 0.35);
        let s = Rational::new(1, 3).add(&Rational::new(1, 6));
        assert_eq!(s, Rational::new(1, 2));
    }

    #[test]
    fn polynomial_ring_basics() {
        // (x3)^2 differentiated twice in x3 gives 2.
        let f = RatPoly::var(4).mul(&RatPoly::var(4));
        let d2 = f.partial(4).partial(4);
        assert_eq!(d2, RatPoly::constant(Rational::int(2)));
    }

    #[test]
    fn total_derivative_acts_as_expected() {
        // X(x0) = x1, X(x3) = F.
        let f = RatPoly::var(3); // F = x2
        assert_eq!(total_derivative(&f, &RatPoly::var(1)), RatPoly::var(2));
        assert_eq!(total_derivative(&f, &RatPoly::var(4)), f.clone());
    }

    #[test]
    fn frame_coefficients_for_f_equals_x2() {
        let f = RatPoly::var(3);
        let origin = [Rational::zero(); 5];
        let [a, b, g, d] = ode_frame_coefficients(&f, &origin);
        assert_eq!(a, Rational::zero());
        assert_eq!(b, Rational::new(7, 20));
        assert_eq!(g, Rational::new(3, 10));
        assert_eq!(d, Rational::zero());
    }

    #[test]
    fn frame_coefficients_for_f_equals_x3_squared() {
        let f = RatPoly::var(4).mul(&RatPoly::var(4));
        let mut point = [Rational::zero(); 5];
        point[4] = Rational::int(1); // x3 = 1
        let [a, _, _, _] = ode_frame_coefficients(&f, &point);
        assert_eq!(a, Rational::int(2));
    }
}
