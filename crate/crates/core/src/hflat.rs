//! Pointwise torsion test for coframings `h dx`: pull back the Maurer-Cartan
//! form, skew-symmetrise, and project onto the complement of
//! `delta(V* ⊗ Ad(h^{-1}) g)`. A vanishing residual is equivalent to the
//! existence of a torsion-free compatible connection, which
//! [`recover_connection`] produces explicitly.

use crate::error::{Error, Result};
use crate::linalg::{MatN, Subspace};
use crate::spencer::{
    delta_image_basis, project_residual, skew_symmetrize, solve_in_image, ConnectionValued,
    TorsionTensor,
};

/// Tolerance for declaring a structure torsion-free, applied relative to
/// `||tau|| + 1` so it acts absolutely for small torsion candidates.
pub const TORSION_TOL: f64 = 1e-9;

/// Max-norm bound for the closure identity checked by
/// [`recover_connection`] before it returns.
pub const VERIFY_TOL: f64 = 1e-9;

/// 1-jet of a group-valued map: the value `h` and the coordinate partials
/// `dh[i]`.
#[derive(Debug, Clone)]
pub struct HJet {
    pub h: MatN,
    pub dh: Vec<MatN>,
}

impl HJet {
    pub fn new(h: MatN, dh: Vec<MatN>) -> Result<Self> {
        let n = h.n();
        if dh.len() != n {
            return Err(Error::Dimension {
                context: "HJet::new",
                expected: n,
                got: dh.len(),
            });
        }
        for m in &dh {
            if m.n() != n {
                return Err(Error::Dimension {
                    context: "HJet::new",
                    expected: n,
                    got: m.n(),
                });
            }
        }
        Ok(HJet { h, dh })
    }

    pub fn n(&self) -> usize {
        self.h.n()
    }
}

/// `psi[i] = h^{-1} dh[i]`, the pullback of the Maurer-Cartan form.
pub fn maurer_cartan_pullback(jet: &HJet) -> Result<ConnectionValued> {
    let (hinv, _cond) = jet.h.try_inverse()?;
    let psi = jet.dh.iter().map(|d| hinv.mul(d)).collect();
    ConnectionValued::new(psi)
}

/// `Ad(h^{-1})` applied to a subspace basis: `{h^{-1} a_r h}`.
pub fn adjoint_conjugate(h: &MatN, g: &Subspace) -> Result<Subspace> {
    let (hinv, _) = h.try_inverse()?;
    let basis = g.basis().iter().map(|a| hinv.mul(a).mul(h)).collect();
    Subspace::new(g.n(), basis)
}

/// Outcome of the pointwise torsion test.
#[derive(Debug, Clone)]
pub struct TorsionReport {
    /// Euclidean norm of the component of `tau_h` outside the image.
    pub norm: f64,
    pub residual: TorsionTensor,
    /// The full torsion candidate `tau_h = delta(psi_h)`.
    pub tau: TorsionTensor,
}

impl TorsionReport {
    /// The membership decision at [`TORSION_TOL`], relative to `||tau|| + 1`.
    pub fn is_torsion_free(&self) -> bool {
        self.norm <= TORSION_TOL * (self.tau.norm() + 1.0)
    }
}

/// Projects `tau_h` onto the complement of `delta(V* ⊗ Ad(h^{-1}) g)`.
/// A zero norm is equivalent to torsion-freeness of the structure defined
/// by `h` at the point.
pub fn torsion_residual(jet: &HJet, g: &Subspace) -> Result<TorsionReport> {
    let psi = maurer_cartan_pullback(jet)?;
    let tau = skew_symmetrize(&psi);
    let conjugated = adjoint_conjugate(&jet.h, g)?;
    let image = delta_image_basis(&conjugated);
    let projection = project_residual(&tau, &image.basis);
    Ok(TorsionReport {
        norm: projection.residual_norm,
        residual: projection.residual,
        tau,
    })
}

/// Recovers a compatible connection: a `g`-valued 1-form `alpha` with
/// `delta(psi_h + Ad(h^{-1}) alpha) = 0`, from `alpha = -h beta h^{-1}` where
/// `delta(beta) = tau_h` in `V* ⊗ Ad(h^{-1}) g`. The closure identity is
/// verified before returning.
pub fn recover_connection(jet: &HJet, g: &Subspace) -> Result<ConnectionValued> {
    let psi = maurer_cartan_pullback(jet)?;
    let tau = skew_symmetrize(&psi);
    let tol = TORSION_TOL * (tau.norm() + 1.0);
    let conjugated = adjoint_conjugate(&jet.h, g)?;
    let beta = solve_in_image(&tau, &conjugated, tol).map_err(|e| match e {
        Error::NotInImage { residual, tol } => Error::TorsionPresent { residual, tol },
        other => other,
    })?;
    let (hinv, _) = jet.h.try_inverse()?;
    let alpha = ConnectionValued::new(
        beta.components()
            .iter()
            .map(|b| jet.h.mul(b).mul(&hinv).scale(-1.0))
            .collect(),
    )?;
    // Closure: psi + Ad(h^{-1}) alpha = psi - beta must be delta-closed.
    let corrected = ConnectionValued::new(
        psi.components()
            .iter()
            .zip(beta.components())
            .map(|(p, b)| p.sub(b))
            .collect(),
    )?;
    let defect = skew_symmetrize(&corrected).max_abs();
    if defect > VERIFY_TOL {
        return Err(Error::VerificationFailed {
            defect,
            tol: VERIFY_TOL,
        });
    }
    Ok(alpha)
}
