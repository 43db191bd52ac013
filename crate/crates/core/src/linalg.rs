//! Dense small-dimension linear algebra shared by every module: square
//! matrices with condition reporting, subspaces of `V* ⊗ V` given by explicit
//! bases, and the SVD-based rank / least-squares / principal-angle kernels.

use nalgebra::{DMatrix, DVector};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative singular-value threshold for all rank decisions: a singular value
/// counts as zero when it is below `RANK_RTOL * sigma_max`.
pub const RANK_RTOL: f64 = 1e-10;

/// Square real matrix of configurable size (default use is 4x4).
#[derive(Debug, Clone, PartialEq)]
pub struct MatN {
    m: DMatrix<f64>,
}

impl MatN {
    pub fn zeros(n: usize) -> Self {
        MatN {
            m: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        MatN {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        MatN {
            m: DMatrix::from_fn(n, n, f),
        }
    }

    /// Builds from row slices; every row must have the same length as the
    /// number of rows and every entry must be finite.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::Dimension {
                    context: "MatN::from_rows",
                    expected: n,
                    got: row.len(),
                });
            }
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("MatN::from_rows"));
        }
        Ok(MatN { m })
    }

    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                context: "MatN::from_dmatrix",
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("MatN::from_dmatrix"));
        }
        Ok(MatN { m })
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: f64) {
        self.m[(i, j)] = v;
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn mul(&self, other: &MatN) -> MatN {
        MatN { m: &self.m * &other.m }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(v);
        (&self.m * x).iter().copied().collect()
    }

    pub fn add(&self, other: &MatN) -> MatN {
        MatN { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &MatN) -> MatN {
        MatN { m: &self.m - &other.m }
    }

    pub fn scale(&self, s: f64) -> MatN {
        MatN { m: &self.m * s }
    }

    pub fn transpose(&self) -> MatN {
        MatN { m: self.m.transpose() }
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    /// Commutator `[self, other] = self*other - other*self`.
    pub fn bracket(&self, other: &MatN) -> MatN {
        MatN {
            m: &self.m * &other.m - &other.m * &self.m,
        }
    }

    /// 2-norm condition number, `inf` when singular to working precision.
    pub fn condition(&self) -> f64 {
        let sv = self.m.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        if smin <= 0.0 {
            f64::INFINITY
        } else {
            smax / smin
        }
    }

    /// Inverse together with the condition estimate used to accept it.
    pub fn try_inverse(&self) -> Result<(MatN, f64)> {
        let cond = self.condition();
        match self.m.clone().try_inverse() {
            Some(inv) if cond.is_finite() && cond < 1.0 / RANK_RTOL => Ok((MatN { m: inv }, cond)),
            _ => Err(Error::Singular { condition: cond }),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    /// Entries flattened row-major, the component order used when a matrix is
    /// viewed as a vector in `V* ⊗ V`.
    pub fn flatten(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.m[(i, j)]);
            }
        }
        out
    }

    pub fn from_flat(n: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != n * n {
            return Err(Error::Dimension {
                context: "MatN::from_flat",
                expected: n * n,
                got: flat.len(),
            });
        }
        Ok(MatN::from_fn(n, |i, j| flat[i * n + j]))
    }
}

impl Serialize for MatN {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.n();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self.m[(i, j)]).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatN {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        MatN::from_rows(&rows).map_err(D::Error::custom)
    }
}

/// Linear subspace of `V* ⊗ V` presented by a linearly independent basis of
/// matrices. Independence is verified at construction.
#[derive(Debug, Clone)]
pub struct Subspace {
    n: usize,
    basis: Vec<MatN>,
}

impl Subspace {
    /// `n` is carried explicitly so the zero-dimensional subspace stays typed.
    pub fn new(n: usize, basis: Vec<MatN>) -> Result<Self> {
        for b in &basis {
            if b.n() != n {
                return Err(Error::Dimension {
                    context: "Subspace::new",
                    expected: n,
                    got: b.n(),
                });
            }
        }
        if !basis.is_empty() {
            let cols: Vec<Vec<f64>> = basis.iter().map(|b| b.flatten()).collect();
            let m = DMatrix::from_fn(n * n, basis.len(), |i, j| cols[j][i]);
            let rank = svd_rank(&m, RANK_RTOL);
            if rank < basis.len() {
                return Err(Error::DependentBasis {
                    rank,
                    expected: basis.len(),
                });
            }
        }
        Ok(Subspace { n, basis })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[MatN] {
        &self.basis
    }

    /// Matrix whose columns are the flattened basis elements.
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        let n2 = self.n * self.n;
        DMatrix::from_fn(n2, self.basis.len(), |i, j| self.basis[j].flatten()[i])
    }

    /// Distance of `m` to the span, in the Frobenius norm on components.
    pub fn distance(&self, m: &MatN) -> f64 {
        if self.basis.is_empty() {
            return m.frobenius_norm();
        }
        let a = self.basis_matrix();
        let b = DVector::from_vec(m.flatten());
        let (_, res) = min_norm_lstsq(&a, &b);
        res
    }

    /// Span equality via mutual containment at the working rank tolerance.
    pub fn same_span(&self, other: &Subspace) -> bool {
        if self.n != other.n || self.dim() != other.dim() {
            return false;
        }
        let scale = |s: &Subspace| {
            s.basis
                .iter()
                .map(|b| b.frobenius_norm())
                .fold(1.0f64, f64::max)
        };
        let tol = 1e-8 * scale(self).max(scale(other));
        self.basis.iter().all(|b| other.distance(b) <= tol)
            && other.basis.iter().all(|b| self.distance(b) <= tol)
    }
}

/// Rank with the relative singular-value threshold `rtol * sigma_max`.
pub fn svd_rank(m: &DMatrix<f64>, rtol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rtol * smax).count()
}

/// Minimum-norm least-squares solution of `a x = b` via the SVD
/// pseudo-inverse; returns `(x, ||a x - b||)`.
pub fn min_norm_lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    if a.ncols() == 0 {
        return (DVector::zeros(0), b.norm());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = if smax > 0.0 { RANK_RTOL * smax } else { f64::MAX };
    let x = svd
        .solve(b, eps)
        .expect("SVD factors requested at construction");
    let res = (a * &x - b).norm();
    (x, res)
}

/// Orthonormal basis for the null space of `a` (columns of the result).
pub fn nullspace(a: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let ncols = a.ncols();
    if ncols == 0 {
        return DMatrix::zeros(0, 0);
    }
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("V^T requested");
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| smax > 0.0 && s > rtol * smax)
        .count();
    // Rows of V^T beyond the rank span the kernel; nalgebra orders the
    // singular values descending. V^T has min(nrows, ncols) rows, so kernel
    // directions past that count are reconstructed by completing the basis.
    let kdim = ncols - rank;
    let mut basis = DMatrix::zeros(ncols, kdim);
    let available = v_t.nrows();
    let mut filled = 0;
    for r in rank..available {
        basis.set_column(filled, &v_t.row(r).transpose());
        filled += 1;
    }
    if filled < kdim {
        // Wide matrix with fewer singular vectors than kernel dimensions:
        // complete by projecting coordinate vectors off the known span.
        let mut known: Vec<DVector<f64>> = (0..filled).map(|c| basis.column(c).into_owned()).collect();
        let mut rows: Vec<DVector<f64>> = (0..v_t.nrows())
            .map(|r| v_t.row(r).transpose().into_owned())
            .collect();
        known.append(&mut rows);
        for j in 0..ncols {
            if filled == kdim {
                break;
            }
            let mut v = DVector::zeros(ncols);
            v[j] = 1.0;
            for k in &known {
                let p = k.dot(&v);
                v -= k * p;
            }
            let nrm = v.norm();
            if nrm > 1e-8 {
                v /= nrm;
                basis.set_column(filled, &v);
                known.push(v);
                filled += 1;
            }
        }
        assert_eq!(filled, kdim, "kernel completion failed");
    }
    basis
}

/// Orthonormal basis of the column space of `a` (via thin SVD).
pub fn orthonormal_image(a: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    if a.ncols() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("U requested");
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| smax > 0.0 && s > rtol * smax)
        .count();
    u.columns(0, rank).into_owned()
}

/// Sine of the largest principal angle between the column spans of two
/// orthonormal-column matrices. Computed as the spectral norm of
/// `(I - Q1 Q1^T) Q2`, which stays accurate for angles near zero where the
/// cosine formulation loses all precision.
pub fn max_principal_angle_sin(q1: &DMatrix<f64>, q2: &DMatrix<f64>) -> f64 {
    if q1.ncols() != q2.ncols() {
        return 1.0;
    }
    if q2.ncols() == 0 {
        return 0.0;
    }
    let proj = q2 - q1 * (q1.transpose() * q2);
    let sv = proj.singular_values();
    let s = sv.max();
    // The symmetric quantity caps at 1.
    s.min(1.0)
}

/// Matrix exponential via scaling and squaring on a plain Taylor series;
/// ample for the well-scaled 2x2 and 4x4 arguments used in the toolkit.
pub fn expm(a: &MatN) -> MatN {
    let n = a.n();
    let norm = a.max_abs();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(1.0 / f64::powi(2.0, squarings as i32));
    let mut term = MatN::identity(n);
    let mut sum = MatN::identity(n);
    for k in 1..=20 {
        term = term.mul(&scaled).scale(1.0 / k as f64);
        sum = sum.add(&term);
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    result
}
