//! Anisotropic poroelastic constitutive algebra in contracted notation.
//!
//! A material is described by a symmetric 6x6 drained stiffness `M`, a
//! contracted Biot coupling vector `alpha`, and a scalar Biot modulus
//! `M_b`. The constitutive map takes a strain/pressure pair to a
//! stress/fluid-content pair:
//!
//! ```text
//! stress        = M * strain - alpha * pressure
//! fluid_content = alpha . strain + pressure / M_b
//! ```
//!
//! Stacking both relations gives a 7x7 matrix `A` with blocks
//! `[[M, -alpha], [alpha^T, 1/M_b]]`. The coupling blocks are
//! skew-paired, so the quadratic form `gamma^T A gamma` reduces to
//! `strain^T M strain + pressure^2 / M_b` — twice the stored energy
//! density — independent of `alpha`.

use nalgebra::{Matrix6, Vector6};

use crate::contracted::{Matrix7, StrainPressure, StressFluidContent, Vector7};
use crate::error::{Error, Result};

/// Condition-number ceiling for constitutive inversions.
pub const CONDITION_LIMIT: f64 = 1e14;

/// Relative eigenvalue tolerance for the positive-definiteness check.
const SPD_TOLERANCE: f64 = 1e-12;

/// Drained stiffness, Biot coupling vector, and Biot modulus of one phase.
///
/// Units are SI: stiffness and modulus in Pa, coupling dimensionless.
#[derive(Debug, Clone, PartialEq)]
pub struct PoroelasticMaterial {
    /// Symmetric positive-definite 6x6 drained stiffness (Pa).
    pub stiffness: Matrix6<f64>,
    /// Contracted Biot effective-stress coefficient tensor.
    pub biot_alpha: Vector6<f64>,
    /// Biot modulus (Pa), must be positive.
    pub biot_modulus: f64,
}

/// Outcome of material validation. Collects every failure rather than
/// stopping at the first, so a report can show all problems at once.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MaterialValidation {
    /// Largest absolute difference between the stiffness matrix and its
    /// transpose, as stored.
    pub max_asymmetry: f64,
    /// Smallest eigenvalue of the symmetrized stiffness.
    pub min_stiffness_eigenvalue: f64,
    pub biot_modulus: f64,
    pub failures: Vec<String>,
}

impl MaterialValidation {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

impl PoroelasticMaterial {
    /// Isotropic material from Lame parameters, a volumetric coupling
    /// coefficient `alpha0` (applied to the three normal components), and
    /// the Biot modulus.
    pub fn isotropic(lambda: f64, mu: f64, alpha0: f64, biot_modulus: f64) -> Self {
        let mut m = Matrix6::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = lambda;
            }
            m[(i, i)] = lambda + 2.0 * mu;
            // Engineering shear strains make the shear diagonal mu, not 2*mu.
            m[(i + 3, i + 3)] = mu;
        }
        let mut alpha = Vector6::zeros();
        alpha[0] = alpha0;
        alpha[1] = alpha0;
        alpha[2] = alpha0;
        PoroelasticMaterial {
            stiffness: m,
            biot_alpha: alpha,
            biot_modulus,
        }
    }

    /// Checks symmetry (exact, as stored), positive definiteness of the
    /// stiffness, positivity of the Biot modulus, and finiteness of all
    /// entries. Never aborts; every failure is collected.
    pub fn validate(&self) -> MaterialValidation {
        let mut failures = Vec::new();

        let finite = self.stiffness.iter().all(|v| v.is_finite())
            && self.biot_alpha.iter().all(|v| v.is_finite())
            && self.biot_modulus.is_finite();
        if !finite {
            failures.push("material contains non-finite entries".to_string());
        }

        let mut max_asymmetry: f64 = 0.0;
        for i in 0..6 {
            for j in (i + 1)..6 {
                max_asymmetry = max_asymmetry.max((self.stiffness[(i, j)] - self.stiffness[(j, i)]).abs());
            }
        }
        if max_asymmetry != 0.0 || max_asymmetry.is_nan() {
            failures.push(format!(
                "stiffness is not symmetric (max |M_ij - M_ji| = {max_asymmetry:.3e})"
            ));
        }

        let max_abs = self.stiffness.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let sym = (self.stiffness + self.stiffness.transpose()) / 2.0;
        let min_eig = if finite {
            sym.symmetric_eigen()
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |m, &v| m.min(v))
        } else {
            f64::NAN
        };
        if !(min_eig > -SPD_TOLERANCE * max_abs) || min_eig <= 0.0 {
            failures.push(format!(
                "stiffness is not positive definite (min eigenvalue = {min_eig:.3e})"
            ));
        }

        if !(self.biot_modulus > 0.0) {
            failures.push(format!(
                "Biot modulus must be positive (got {:.3e})",
                self.biot_modulus
            ));
        }

        MaterialValidation {
            max_asymmetry,
            min_stiffness_eigenvalue: min_eig,
            biot_modulus: self.biot_modulus,
            failures,
        }
    }

    /// Validates and returns the material, or an input error listing every
    /// failed check.
    pub fn validated(self) -> Result<Self> {
        let v = self.validate();
        if v.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidMaterial {
                phase: None,
                failures: v.failures,
            })
        }
    }
}

/// 7x7 constitutive matrix (or its inverse). Mixed units: Pa in the
/// stiffness block, dimensionless coupling, 1/Pa in the corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoroMatrix7(pub Matrix7);

impl PoroMatrix7 {
    pub fn zeros() -> Self {
        PoroMatrix7(Matrix7::zeros())
    }

    /// Upper-left 6x6 block.
    pub fn stiffness_block(&self) -> Matrix6<f64> {
        self.0.fixed_view::<6, 6>(0, 0).into_owned()
    }

    /// Upper-right 6x1 coupling column.
    pub fn coupling_column(&self) -> Vector6<f64> {
        self.0.fixed_view::<6, 1>(0, 6).into_owned()
    }

    /// Lower-left 1x6 coupling row, returned as a vector.
    pub fn coupling_row(&self) -> Vector6<f64> {
        self.0.fixed_view::<1, 6>(6, 0).transpose()
    }

    /// Scalar (7,7) entry.
    pub fn corner(&self) -> f64 {
        self.0[(6, 6)]
    }

    pub fn mul_vec7(&self, v: &Vector7) -> Vector7 {
        self.0 * v
    }

    /// Quadratic form `v^T A v`.
    pub fn quadratic_form(&self, v: &Vector7) -> f64 {
        v.dot(&(self.0 * v))
    }

    /// Symmetric part of the matrix; the quadratic form only sees this.
    pub fn symmetric_part(&self) -> Matrix7 {
        (self.0 + self.0.transpose()) / 2.0
    }
}

/// Compliance-side parameters read off the inverse constitutive matrix:
/// the 6x6 compliance block, the scalar storage compliance (the inverse
/// matrix's corner entry), and the Skempton-type pore-pressure vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplianceForm {
    /// Upper-left 6x6 block of the inverse (1/Pa).
    pub compliance: Matrix6<f64>,
    /// Corner entry of the inverse (Pa): generalized Hooke constant.
    pub hooke_constant: f64,
    /// Skempton-type coupling vector, scaled so the inverse matrix's
    /// coupling column equals `hooke_constant * skempton / 3`.
    pub skempton: Vector6<f64>,
}

/// Stacks the constitutive relations into the 7x7 matrix
/// `[[M, -alpha], [alpha^T, 1/M_b]]`.
pub fn assemble_a(m: &PoroelasticMaterial) -> PoroMatrix7 {
    let mut a = Matrix7::zeros();
    a.fixed_view_mut::<6, 6>(0, 0).copy_from(&m.stiffness);
    a.fixed_view_mut::<6, 1>(0, 6).copy_from(&(-m.biot_alpha));
    a.fixed_view_mut::<1, 6>(6, 0)
        .copy_from(&m.biot_alpha.transpose());
    a[(6, 6)] = 1.0 / m.biot_modulus;
    PoroMatrix7(a)
}

/// Evaluates the constitutive map directly (without assembling the
/// matrix): `stress = M e - alpha p`, `fluid_content = alpha . e + p/M_b`.
pub fn apply_constitutive(m: &PoroelasticMaterial, g: &StrainPressure) -> StressFluidContent {
    use crate::contracted::StressVector;
    StressFluidContent {
        stress: StressVector(m.stiffness * g.strain.0 - m.biot_alpha * g.pressure),
        fluid_content: m.biot_alpha.dot(&g.strain.0) + g.pressure / m.biot_modulus,
    }
}

/// Stored energy density of a conjugate pair: `U = (stress . strain +
/// pressure * fluid_content) / 2`. For a consistent pair `kappa = A gamma`
/// this equals `(e^T M e + p^2/M_b) / 2` and is strictly positive for
/// nonzero states of a valid material.
pub fn strain_energy(kappa: &StressFluidContent, gamma: &StrainPressure) -> f64 {
    0.5 * kappa.pair(gamma)
}

/// Condition estimate of a 7x7 matrix after symmetric diagonal (Jacobi)
/// equilibration. The rescaling removes the Pa-vs-1/Pa unit disparity
/// between blocks, which would otherwise dominate the raw condition
/// number regardless of how well-posed the material is.
pub fn equilibrated_condition(a: &Matrix7) -> f64 {
    let mut scale = [1.0f64; 7];
    for i in 0..7 {
        let d = a[(i, i)].abs();
        if d > 0.0 && d.is_finite() {
            scale[i] = 1.0 / d.sqrt();
        }
    }
    let mut s = *a;
    for i in 0..7 {
        for j in 0..7 {
            s[(i, j)] *= scale[i] * scale[j];
        }
    }
    let sv = s.svd(false, false).singular_values;
    let max = sv.iter().fold(0.0f64, |m, &v| m.max(v));
    let min = sv.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverts a 7x7 constitutive matrix and reads off the compliance-form
/// parameters, using the default condition ceiling.
pub fn invert_a(a: &PoroMatrix7) -> Result<(PoroMatrix7, ComplianceForm)> {
    invert_a_with_limit(a, CONDITION_LIMIT)
}

/// As [`invert_a`] but with an explicit condition ceiling (the effective
/// lower-bound assembly uses a tighter one).
pub fn invert_a_with_limit(a: &PoroMatrix7, limit: f64) -> Result<(PoroMatrix7, ComplianceForm)> {
    let cond = equilibrated_condition(&a.0);
    if !cond.is_finite() {
        return Err(Error::Singular(
            "7x7 constitutive matrix is numerically singular".to_string(),
        ));
    }
    if cond > limit {
        return Err(Error::IllConditioned {
            condition: cond,
            threshold: limit,
        });
    }

    // Block inversion via the Schur complement of the 6x6 block: with
    // A = [[K, b], [c^T, d]],
    //   s_c   = d - c^T K^-1 b
    //   inv   = [[K^-1 + (K^-1 b)(c^T K^-1)/s_c, -(K^-1 b)/s_c],
    //            [-(c^T K^-1)/s_c,                1/s_c        ]]
    let k = a.stiffness_block();
    let b = a.coupling_column();
    let c = a.coupling_row();
    let d = a.corner();

    let k_inv = k
        .try_inverse()
        .ok_or_else(|| Error::Singular("6x6 stiffness block is singular".to_string()))?;
    let k_inv_b = k_inv * b;
    let ct_k_inv = (k_inv.transpose() * c).transpose();
    let s_c = d - c.dot(&k_inv_b);
    if s_c == 0.0 || !s_c.is_finite() {
        return Err(Error::Singular(
            "scalar Schur complement vanishes".to_string(),
        ));
    }

    let mut inv = Matrix7::zeros();
    let p = k_inv + k_inv_b * ct_k_inv / s_c;
    inv.fixed_view_mut::<6, 6>(0, 0).copy_from(&p);
    inv.fixed_view_mut::<6, 1>(0, 6).copy_from(&(-k_inv_b / s_c));
    inv.fixed_view_mut::<1, 6>(6, 0).copy_from(&(-ct_k_inv / s_c));
    inv[(6, 6)] = 1.0 / s_c;

    let inverse = PoroMatrix7(inv);
    let hooke_constant = inverse.corner();
    let form = ComplianceForm {
        compliance: inverse.stiffness_block(),
        hooke_constant,
        skempton: inverse.coupling_column() * 3.0 / hooke_constant,
    };
    Ok((inverse, form))
}
