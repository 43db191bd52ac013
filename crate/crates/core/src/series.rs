//! Truncated multivariate power series with dense coefficient storage.
//! Arithmetic truncates above the degree cap; coefficients below the cap are
//! exact. Used with four variables by the prolongation solver and with five
//! variables by the jet-space total-derivative evaluation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Enumeration of all multi-indices with `nvars` slots and total degree up
/// to `max_deg`, graded lexicographic, with a packed-radix lookup table.
#[derive(Debug)]
pub struct IndexSet {
    nvars: usize,
    max_deg: usize,
    exponents: Vec<Vec<u8>>,
    degree: Vec<usize>,
    /// Slot index by mixed-radix key, usize::MAX for out-of-cap keys.
    lookup: Vec<usize>,
    /// Slot ranges grouped by total degree.
    by_degree: Vec<Vec<usize>>,
}

impl IndexSet {
    fn build(nvars: usize, max_deg: usize) -> IndexSet {
        let radix = max_deg + 1;
        let mut exponents = Vec::new();
        let mut current = vec![0u8; nvars];
        // Graded enumeration: all indices of degree d, for d = 0..=max_deg.
        fn rec(
            slot: usize,
            remaining: usize,
            current: &mut Vec<u8>,
            nvars: usize,
            out: &mut Vec<Vec<u8>>,
        ) {
            if slot == nvars - 1 {
                current[slot] = remaining as u8;
                out.push(current.clone());
                return;
            }
            for e in 0..=remaining {
                current[slot] = e as u8;
                rec(slot + 1, remaining - e, current, nvars, out);
            }
        }
        for d in 0..=max_deg {
            rec(0, d, &mut current, nvars, &mut exponents);
        }
        let key = |m: &[u8]| -> usize {
            m.iter().fold(0usize, |acc, &e| acc * radix + e as usize)
        };
        let mut lookup = vec![usize::MAX; radix.pow(nvars as u32)];
        let mut degree = Vec::with_capacity(exponents.len());
        let mut by_degree: Vec<Vec<usize>> = vec![Vec::new(); max_deg + 1];
        for (i, m) in exponents.iter().enumerate() {
            lookup[key(m)] = i;
            let d: usize = m.iter().map(|&e| e as usize).sum();
            degree.push(d);
            by_degree[d].push(i);
        }
        IndexSet {
            nvars,
            max_deg,
            exponents,
            degree,
            lookup,
            by_degree,
        }
    }

    /// Shared instance per `(nvars, max_deg)`; tables are immutable after
    /// construction.
    pub fn get(nvars: usize, max_deg: usize) -> Arc<IndexSet> {
        type Registry = Mutex<HashMap<(usize, usize), Arc<IndexSet>>>;
        static REGISTRY: OnceLock<Registry> = OnceLock::new();
        let registry = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = registry.lock().expect("registry lock");
        map.entry((nvars, max_deg))
            .or_insert_with(|| Arc::new(IndexSet::build(nvars, max_deg)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_deg(&self) -> usize {
        self.max_deg
    }

    pub fn exponents(&self, slot: usize) -> &[u8] {
        &self.exponents[slot]
    }

    pub fn degree_of(&self, slot: usize) -> usize {
        self.degree[slot]
    }

    pub fn slots_of_degree(&self, d: usize) -> &[usize] {
        &self.by_degree[d]
    }

    pub fn slot(&self, m: &[u8]) -> Option<usize> {
        let radix = self.max_deg + 1;
        let mut key = 0usize;
        for &e in m {
            if e as usize > self.max_deg {
                return None;
            }
            key = key * radix + e as usize;
        }
        match self.lookup[key] {
            usize::MAX => None,
            s => Some(s),
        }
    }

    fn product_slot(&self, a: usize, b: usize) -> Option<usize> {
        if self.degree[a] + self.degree[b] > self.max_deg {
            return None;
        }
        let sum: Vec<u8> = self.exponents[a]
            .iter()
            .zip(&self.exponents[b])
            .map(|(x, y)| x + y)
            .collect();
        self.slot(&sum)
    }
}

/// Truncated power series: dense coefficients over an [`IndexSet`].
#[derive(Clone)]
pub struct TruncPoly {
    ctx: Arc<IndexSet>,
    coeffs: Vec<f64>,
}

impl std::fmt::Debug for TruncPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                terms.push(format!("{c:.4e}*x^{:?}", self.ctx.exponents(i)));
            }
        }
        write!(f, "TruncPoly[{}]", terms.join(" + "))
    }
}

impl TruncPoly {
    pub fn zero(nvars: usize, max_deg: usize) -> Self {
        let ctx = IndexSet::get(nvars, max_deg);
        let len = ctx.len();
        TruncPoly {
            ctx,
            coeffs: vec![0.0; len],
        }
    }

    pub fn constant(nvars: usize, max_deg: usize, v: f64) -> Self {
        let mut p = TruncPoly::zero(nvars, max_deg);
        p.coeffs[0] = v;
        p
    }

    /// The monomial `coeff * x^m`.
    pub fn monomial(nvars: usize, max_deg: usize, m: &[u8], coeff: f64) -> Self {
        let mut p = TruncPoly::zero(nvars, max_deg);
        let slot = p.ctx.slot(m).expect("exponent within cap");
        p.coeffs[slot] = coeff;
        p
    }

    /// The affine coordinate function `offset + x_var`.
    pub fn coordinate(nvars: usize, max_deg: usize, var: usize, offset: f64) -> Self {
        let mut p = TruncPoly::constant(nvars, max_deg, offset);
        let mut m = vec![0u8; nvars];
        m[var] = 1;
        let slot = p.ctx.slot(&m).expect("degree one within cap");
        p.coeffs[slot] = 1.0;
        p
    }

    pub fn nvars(&self) -> usize {
        self.ctx.nvars()
    }

    pub fn max_deg(&self) -> usize {
        self.ctx.max_deg()
    }

    pub fn ctx(&self) -> &Arc<IndexSet> {
        &self.ctx
    }

    pub fn coeff(&self, m: &[u8]) -> f64 {
        self.ctx.slot(m).map_or(0.0, |s| self.coeffs[s])
    }

    pub fn coeff_slot(&self, slot: usize) -> f64 {
        self.coeffs[slot]
    }

    pub fn set_coeff(&mut self, m: &[u8], v: f64) {
        let slot = self.ctx.slot(m).expect("exponent within cap");
        self.coeffs[slot] = v;
    }

    pub fn set_coeff_slot(&mut self, slot: usize, v: f64) {
        self.coeffs[slot] = v;
    }

    /// Constant term, the value at the expansion point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn assert_compatible(&self, other: &TruncPoly) {
        assert!(
            Arc::ptr_eq(&self.ctx, &other.ctx),
            "series contexts differ: ({}, {}) vs ({}, {})",
            self.nvars(),
            self.max_deg(),
            other.nvars(),
            other.max_deg()
        );
    }

    pub fn add(&self, other: &TruncPoly) -> TruncPoly {
        self.assert_compatible(other);
        TruncPoly {
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &TruncPoly) -> TruncPoly {
        self.assert_compatible(other);
        TruncPoly {
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> TruncPoly {
        TruncPoly {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    /// Truncating product: coefficients above the cap are dropped.
    pub fn mul(&self, other: &TruncPoly) -> TruncPoly {
        self.assert_compatible(other);
        let mut out = vec![0.0; self.coeffs.len()];
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb == 0.0 {
                    continue;
                }
                if let Some(slot) = self.ctx.product_slot(a, b) {
                    out[slot] += ca * cb;
                }
            }
        }
        TruncPoly {
            ctx: self.ctx.clone(),
            coeffs: out,
        }
    }

    /// Formal partial derivative; exact on stored coefficients, so the
    /// result is trustworthy one degree below the cap.
    pub fn partial(&self, var: usize) -> TruncPoly {
        let mut out = TruncPoly {
            ctx: self.ctx.clone(),
            coeffs: vec![0.0; self.coeffs.len()],
        };
        for (slot, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let m = self.ctx.exponents(slot);
            let e = m[var];
            if e == 0 {
                continue;
            }
            let mut lower = m.to_vec();
            lower[var] -= 1;
            let target = self.ctx.slot(&lower).expect("lower degree stays in cap");
            out.coeffs[target] += c * e as f64;
        }
        out
    }

    /// Largest absolute coefficient of total degree at most `d`.
    pub fn max_abs_through(&self, d: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(slot, _)| self.ctx.degree_of(*slot) <= d)
            .fold(0.0f64, |acc, (_, c)| acc.max(c.abs()))
    }

    /// Zeroes all coefficients of total degree above `d`.
    pub fn truncated(&self, d: usize) -> TruncPoly {
        let mut out = self.clone();
        for (slot, c) in out.coeffs.iter_mut().enumerate() {
            if self.ctx.degree_of(slot) > d {
                *c = 0.0;
            }
        }
        out
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (&[u8], f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(slot, &c)| (self.ctx.exponents(slot), c))
    }

    /// Evaluates the polynomial at a displacement from the expansion point.
    pub fn eval(&self, xi: &[f64]) -> f64 {
        let mut total = 0.0;
        for (slot, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let m = self.ctx.exponents(slot);
            let mut term = c;
            for (v, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    term *= xi[v];
                }
            }
            total += term;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn index_set_counts() {
        let s = IndexSet::get(4, 3);
        // C(3+4, 4) multi-indices of degree <= 3 in 4 variables: 35.
        assert_eq!(s.len(), 35);
        assert_eq!(s.slots_of_degree(0).len(), 1);
        assert_eq!(s.slots_of_degree(1).len(), 4);
        assert_eq!(s.slots_of_degree(2).len(), 10);
        assert_eq!(s.slots_of_degree(3).len(), 20);
        let s5 = IndexSet::get(5, 3);
        assert_eq!(s5.len(), 56);
    }

    #[test]
    fn product_truncates_above_cap() {
        // (1 + x)^2 at cap 1 keeps only 1 + 2x.
        let x = TruncPoly::coordinate(2, 1, 0, 1.0);
        let sq = x.mul(&x);
        assert_relative_eq!(sq.coeff(&[0, 0]), 1.0);
        assert_relative_eq!(sq.coeff(&[1, 0]), 2.0);
    }

    #[test]
    fn arithmetic_and_partial_derivatives() {
        // p = 3 + 2 x0 x1 + x1^3 over cap 3.
        let mut p = TruncPoly::constant(2, 3, 3.0);
        p.set_coeff(&[1, 1], 2.0);
        p.set_coeff(&[0, 3], 1.0);
        let dp0 = p.partial(0);
        assert_relative_eq!(dp0.coeff(&[0, 1]), 2.0);
        assert_eq!(dp0.coeff(&[0, 3]), 0.0);
        let dp1 = p.partial(1);
        assert_relative_eq!(dp1.coeff(&[1, 0]), 2.0);
        assert_relative_eq!(dp1.coeff(&[0, 2]), 3.0);

        let q = p.mul(&p);
        assert_relative_eq!(q.coeff(&[0, 0]), 9.0);
        assert_relative_eq!(q.coeff(&[1, 1]), 12.0);
    }

    #[test]
    fn evaluation_matches_horner_on_a_cubic() {
        let mut p = TruncPoly::zero(3, 3);
        p.set_coeff(&[0, 0, 0], 1.0);
        p.set_coeff(&[1, 0, 0], -2.0);
        p.set_coeff(&[0, 2, 1], 4.0);
        let xi = [0.3, -0.5, 0.7];
        let expect = 1.0 - 2.0 * 0.3 + 4.0 * 0.25 * 0.7;
        assert_relative_eq!(p.eval(&xi), expect, epsilon = 1e-14);
    }

    #[test]
    fn truncation_and_degree_extraction() {
        let mut p = TruncPoly::zero(2, 4);
        p.set_coeff(&[2, 0], 5.0);
        p.set_coeff(&[2, 2], -7.0);
        assert_eq!(p.max_abs_through(2), 5.0);
        assert_eq!(p.max_abs_through(4), 7.0);
        let t = p.truncated(2);
        assert_eq!(t.coeff(&[2, 2]), 0.0);
        assert_eq!(t.coeff(&[2, 0]), 5.0);
    }
}
