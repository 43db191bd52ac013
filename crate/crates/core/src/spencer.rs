//! The `(0,2)` Spencer slot: vector-valued 2-forms, the skew-symmetrisation
//! map `delta`, bases for its image on a subspace, and the quotient
//! projection / section used by the torsion test.
//!
//! A `gl(V)`-valued 1-form at a point is a triple tensor `T` in
//! `V* ⊗ V* ⊗ V`; `delta T (e_i, e_j) = T(e_i) e_j - T(e_j) e_i`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, MatN, Subspace, RANK_RTOL};

/// A `gl(V)`-valued 1-form at a point: `psi[i]` is the n x n matrix paired
/// with the coordinate covector `dx^i`.
#[derive(Debug, Clone)]
pub struct ConnectionValued {
    psi: Vec<MatN>,
}

impl ConnectionValued {
    pub fn new(psi: Vec<MatN>) -> Result<Self> {
        let n = psi.len();
        for m in &psi {
            if m.n() != n {
                return Err(Error::Dimension {
                    context: "ConnectionValued::new",
                    expected: n,
                    got: m.n(),
                });
            }
        }
        Ok(ConnectionValued { psi })
    }

    pub fn zero(n: usize) -> Self {
        ConnectionValued {
            psi: (0..n).map(|_| MatN::zeros(n)).collect(),
        }
    }

    /// `e^i ⊗ a`: the 1-form with matrix `a` in slot `i` and zero elsewhere.
    pub fn basis_tensor(n: usize, i: usize, a: &MatN) -> Self {
        let mut psi: Vec<MatN> = (0..n).map(|_| MatN::zeros(n)).collect();
        psi[i] = a.clone();
        ConnectionValued { psi }
    }

    pub fn n(&self) -> usize {
        self.psi.len()
    }

    pub fn component(&self, i: usize) -> &MatN {
        &self.psi[i]
    }

    pub fn components(&self) -> &[MatN] {
        &self.psi
    }

    pub fn add(&self, other: &ConnectionValued) -> ConnectionValued {
        ConnectionValued {
            psi: self
                .psi
                .iter()
                .zip(&other.psi)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> ConnectionValued {
        ConnectionValued {
            psi: self.psi.iter().map(|m| m.scale(s)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.psi.iter().fold(0.0f64, |a, m| a.max(m.max_abs()))
    }
}

/// Vector-valued 2-form with components `tau^k_{ij} = -tau^k_{ji}`.
/// Only the strictly upper pairs `i < j` are stored, so antisymmetry cannot
/// be violated by construction.
#[derive(Debug, Clone)]
pub struct TorsionTensor {
    n: usize,
    /// Layout: `comps[pair * n + k]` with pairs `(0,1), (0,2), ..` in
    /// lexicographic order.
    comps: Vec<f64>,
}

impl TorsionTensor {
    pub fn zero(n: usize) -> Self {
        TorsionTensor {
            n,
            comps: vec![0.0; n * n * (n - 1) / 2],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_components(&self) -> usize {
        self.comps.len()
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Component `tau^k_{ij}` for any index order; the sign flips with the
    /// pair orientation and the diagonal is zero.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => self.comps[self.pair_index(i, j) * self.n + k],
            Ordering::Greater => -self.comps[self.pair_index(j, i) * self.n + k],
            Ordering::Equal => 0.0,
        }
    }

    pub fn set_upper(&mut self, i: usize, j: usize, k: usize, v: f64) {
        assert!(i < j, "only strictly upper components are stored");
        let idx = self.pair_index(i, j) * self.n + k;
        self.comps[idx] = v;
    }

    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.comps)
    }

    pub fn from_vector(n: usize, v: &DVector<f64>) -> Result<Self> {
        let exp = n * n * (n - 1) / 2;
        if v.len() != exp {
            return Err(Error::Dimension {
                context: "TorsionTensor::from_vector",
                expected: exp,
                got: v.len(),
            });
        }
        Ok(TorsionTensor {
            n,
            comps: v.iter().copied().collect(),
        })
    }

    pub fn norm(&self) -> f64 {
        self.comps.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    pub fn add(&self, other: &TorsionTensor) -> TorsionTensor {
        TorsionTensor {
            n: self.n,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> TorsionTensor {
        TorsionTensor {
            n: self.n,
            comps: self.comps.iter().map(|x| x * s).collect(),
        }
    }
}

/// The natural skew-symmetrisation `delta`:
/// `(delta T)^k_{ij} = (T.psi[i])^k_j - (T.psi[j])^k_i`.
pub fn skew_symmetrize(t: &ConnectionValued) -> TorsionTensor {
    let n = t.n();
    let mut out = TorsionTensor::zero(n);
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                let v = t.component(i).entry(k, j) - t.component(j).entry(k, i);
                out.set_upper(i, j, k, v);
            }
        }
    }
    out
}

/// Spanning set and reduced basis of `delta(V* ⊗ A)`.
#[derive(Debug, Clone)]
pub struct DeltaImage {
    /// `delta(e^i ⊗ a_r)` for all `i`, `r` — possibly linearly dependent.
    pub spanning: Vec<TorsionTensor>,
    /// Orthonormal basis of the span.
    pub basis: Vec<TorsionTensor>,
    pub rank: usize,
}

/// Image of `delta` restricted to `V* ⊗ A`.
pub fn delta_image_basis(a: &Subspace) -> DeltaImage {
    let n = a.n();
    let mut spanning = Vec::with_capacity(n * a.dim());
    for i in 0..n {
        for b in a.basis() {
            spanning.push(skew_symmetrize(&ConnectionValued::basis_tensor(n, i, b)));
        }
    }
    if spanning.is_empty() {
        return DeltaImage {
            spanning,
            basis: Vec::new(),
            rank: 0,
        };
    }
    let ncomp = spanning[0].num_components();
    let m = DMatrix::from_fn(ncomp, spanning.len(), |r, c| spanning[c].comps[r]);
    let q = linalg::orthonormal_image(&m, RANK_RTOL);
    let rank = q.ncols();
    let basis = (0..rank)
        .map(|c| TorsionTensor::from_vector(n, &q.column(c).into_owned()).expect("component count"))
        .collect();
    DeltaImage { spanning, basis, rank }
}

/// Result of projecting a torsion tensor onto the complement of a span.
#[derive(Debug, Clone)]
pub struct Projection {
    pub residual_norm: f64,
    pub residual: TorsionTensor,
}

/// Component of `tau` orthogonal to `span(image)` in the Euclidean inner
/// product on stored components, together with its norm. The norm vanishes
/// exactly when `tau` lies in the span, independently of the inner product.
pub fn project_residual(tau: &TorsionTensor, image: &[TorsionTensor]) -> Projection {
    if image.is_empty() {
        return Projection {
            residual_norm: tau.norm(),
            residual: tau.clone(),
        };
    }
    let ncomp = tau.num_components();
    let m = DMatrix::from_fn(ncomp, image.len(), |r, c| image[c].comps[r]);
    let b = tau.as_vector();
    let (x, _) = linalg::min_norm_lstsq(&m, &b);
    let res_vec = &b - &m * x;
    let residual = TorsionTensor::from_vector(tau.n(), &res_vec).expect("component count");
    Projection {
        residual_norm: res_vec.norm(),
        residual,
    }
}

/// Solves `delta(beta) = tau` for `beta` taking values in `A`, returning the
/// minimum-norm solution. Errors when `tau` is not in the image within `tol`.
pub fn solve_in_image(tau: &TorsionTensor, a: &Subspace, tol: f64) -> Result<ConnectionValued> {
    let n = a.n();
    if tau.n() != n {
        return Err(Error::Dimension {
            context: "solve_in_image",
            expected: n,
            got: tau.n(),
        });
    }
    let m_dim = a.dim();
    let ncomp = tau.num_components();
    if m_dim == 0 {
        if tau.norm() <= tol {
            return Ok(ConnectionValued::zero(n));
        }
        return Err(Error::NotInImage {
            residual: tau.norm(),
            tol,
        });
    }
    // Column (i, r) is delta(e^i ⊗ a_r); unknowns x_{i,r}.
    let mut cols = Vec::with_capacity(n * m_dim);
    for i in 0..n {
        for b in a.basis() {
            cols.push(skew_symmetrize(&ConnectionValued::basis_tensor(n, i, b)));
        }
    }
    let mat = DMatrix::from_fn(ncomp, cols.len(), |r, c| cols[c].comps[r]);
    let b = tau.as_vector();
    let (x, res) = linalg::min_norm_lstsq(&mat, &b);
    if res > tol {
        return Err(Error::NotInImage { residual: res, tol });
    }
    let mut psi: Vec<MatN> = (0..n).map(|_| MatN::zeros(n)).collect();
    for i in 0..n {
        for (r, basis_elem) in a.basis().iter().enumerate() {
            let coeff = x[i * m_dim + r];
            psi[i] = psi[i].add(&basis_elem.scale(coeff));
        }
    }
    ConnectionValued::new(psi)
}
