//! Contracted six-component representation of symmetric second-order
//! tensors, plus the seven-component vectors that pair a strain with a
//! pore pressure (and a stress with a fluid-content increment).
//!
//! Index convention (0-based component, classical 1-based label):
//!
//! | component | tensor pair | classical |
//! |-----------|-------------|-----------|
//! | 0         | (0,0)       | 11 -> 1   |
//! | 1         | (1,1)       | 22 -> 2   |
//! | 2         | (2,2)       | 33 -> 3   |
//! | 3         | (1,2),(2,1) | 23 -> 4   |
//! | 4         | (2,0),(0,2) | 31 -> 5   |
//! | 5         | (0,1),(1,0) | 12 -> 6   |
//!
//! Strain vectors carry *engineering* shear components (twice the tensor
//! shear), stress vectors carry the tensor shear unchanged. With that
//! choice the contracted dot product of a stress with a strain equals the
//! full double contraction of the underlying tensors, so energy densities
//! can be computed directly on the six-component vectors.

use nalgebra::{Matrix3, SMatrix, SVector, Vector6};

pub type Vector7 = SVector<f64, 7>;
pub type Matrix7 = SMatrix<f64, 7, 7>;

/// Maps a pair of tensor indices (0-based, each in `0..3`) to the
/// contracted component in `0..6`.
pub fn contract_index(i: usize, j: usize) -> usize {
    assert!(i < 3 && j < 3, "tensor indices must be in 0..3");
    if i == j {
        i
    } else {
        6 - i - j
    }
}

/// Inverse of [`contract_index`]: the canonical tensor index pair for a
/// contracted component in `0..6`. Off-diagonal components return the
/// smaller index first: 3 -> (1,2), 4 -> (0,2), 5 -> (0,1).
pub fn expand_index(beta: usize) -> (usize, usize) {
    match beta {
        0 | 1 | 2 => (beta, beta),
        3 => (1, 2),
        4 => (0, 2),
        5 => (0, 1),
        _ => panic!("contracted index must be in 0..6"),
    }
}

/// Symmetric strain tensor in contracted form with engineering shears:
/// `[e11, e22, e33, 2*e23, 2*e31, 2*e12]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainVector(pub Vector6<f64>);

/// Symmetric stress tensor in contracted form:
/// `[s11, s22, s33, s23, s31, s12]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressVector(pub Vector6<f64>);

impl StrainVector {
    pub fn zeros() -> Self {
        StrainVector(Vector6::zeros())
    }

    /// Contracts a (symmetric) 3x3 strain tensor. The shear slots receive
    /// the sum of the two off-diagonal entries, i.e. twice the tensor
    /// shear when the input is symmetric.
    pub fn from_tensor(t: &Matrix3<f64>) -> Self {
        StrainVector(Vector6::new(
            t[(0, 0)],
            t[(1, 1)],
            t[(2, 2)],
            t[(1, 2)] + t[(2, 1)],
            t[(2, 0)] + t[(0, 2)],
            t[(0, 1)] + t[(1, 0)],
        ))
    }

    /// Expands back to the symmetric 3x3 tensor (halving the engineering
    /// shears).
    pub fn to_tensor(&self) -> Matrix3<f64> {
        let v = &self.0;
        Matrix3::new(
            v[0],
            v[5] / 2.0,
            v[4] / 2.0,
            v[5] / 2.0,
            v[1],
            v[3] / 2.0,
            v[4] / 2.0,
            v[3] / 2.0,
            v[2],
        )
    }

    /// Trace of the underlying tensor (volumetric strain).
    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }
}

impl StressVector {
    pub fn zeros() -> Self {
        StressVector(Vector6::zeros())
    }

    /// Contracts a (symmetric) 3x3 stress tensor; off-diagonal slots take
    /// the mean of the two entries.
    pub fn from_tensor(t: &Matrix3<f64>) -> Self {
        StressVector(Vector6::new(
            t[(0, 0)],
            t[(1, 1)],
            t[(2, 2)],
            (t[(1, 2)] + t[(2, 1)]) / 2.0,
            (t[(2, 0)] + t[(0, 2)]) / 2.0,
            (t[(0, 1)] + t[(1, 0)]) / 2.0,
        ))
    }

    pub fn to_tensor(&self) -> Matrix3<f64> {
        let v = &self.0;
        Matrix3::new(
            v[0], v[5], v[4], v[5], v[1], v[3], v[4], v[3], v[2],
        )
    }

    /// Double contraction with a strain: equals the tensor contraction
    /// `s_ij e_ij` thanks to the engineering-shear convention.
    pub fn contract(&self, strain: &StrainVector) -> f64 {
        self.0.dot(&strain.0)
    }
}

/// Strain paired with a pore pressure: the independent variables of the
/// constitutive map, stacked as a 7-vector `[strain; pressure]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainPressure {
    pub strain: StrainVector,
    pub pressure: f64,
}

/// Stress paired with a fluid-content increment: the conjugate response
/// variables, stacked as a 7-vector `[stress; fluid_content]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressFluidContent {
    pub stress: StressVector,
    pub fluid_content: f64,
}

impl StrainPressure {
    pub fn zeros() -> Self {
        StrainPressure {
            strain: StrainVector::zeros(),
            pressure: 0.0,
        }
    }

    pub fn to_vector7(&self) -> Vector7 {
        let mut v = Vector7::zeros();
        v.fixed_rows_mut::<6>(0).copy_from(&self.strain.0);
        v[6] = self.pressure;
        v
    }

    pub fn from_vector7(v: &Vector7) -> Self {
        StrainPressure {
            strain: StrainVector(v.fixed_rows::<6>(0).into_owned()),
            pressure: v[6],
        }
    }
}

impl StressFluidContent {
    pub fn zeros() -> Self {
        StressFluidContent {
            stress: StressVector::zeros(),
            fluid_content: 0.0,
        }
    }

    pub fn to_vector7(&self) -> Vector7 {
        let mut v = Vector7::zeros();
        v.fixed_rows_mut::<6>(0).copy_from(&self.stress.0);
        v[6] = self.fluid_content;
        v
    }

    pub fn from_vector7(v: &Vector7) -> Self {
        StressFluidContent {
            stress: StressVector(v.fixed_rows::<6>(0).into_owned()),
            fluid_content: v[6],
        }
    }

    /// Pairing with the conjugate variables: `stress : strain +
    /// fluid_content * pressure`. Twice the stored energy density of a
    /// consistent state.
    pub fn pair(&self, gamma: &StrainPressure) -> f64 {
        self.stress.contract(&gamma.strain) + self.fluid_content * gamma.pressure
    }
}
