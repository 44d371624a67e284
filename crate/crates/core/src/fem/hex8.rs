//! Trilinear eight-node hexahedral element on an axis-aligned box with
//! constant edge lengths, integrated with 2x2x2 Gauss quadrature.
//!
//! The Jacobian is diagonal and constant, so all element matrices are
//! precomputed once per grid and reused for every element. Strain rows
//! follow the contracted convention with engineering shears:
//! `[e_xx, e_yy, e_zz, g_yz, g_zx, g_xy]`. Element degrees of freedom are
//! interleaved per node: column `3a + d` is component `d` of node `a`.
//!
//! Two properties worth noting because later stages lean on them:
//! affine displacement fields are reproduced exactly (their strain is
//! exact at every quadrature point), and the centroid strain operator
//! equals the exact volume average of the strain over the element.

use nalgebra::{Matrix6, SMatrix, SVector, Vector6};

/// Reference corner signs, matching `Grid3::element_nodes` order.
const XI: [f64; 8] = [-1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0];
const ETA: [f64; 8] = [-1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0];
const ZETA: [f64; 8] = [-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0];

pub type BMatrix = SMatrix<f64, 6, 24>;
pub type ElementMatrix = SMatrix<f64, 24, 24>;
pub type ElementVector = SVector<f64, 24>;

/// Strain-displacement matrix at reference coordinates (xi, eta, zeta)
/// for an element with the given physical edge lengths.
pub fn b_matrix(spacing: [f64; 3], xi: f64, eta: f64, zeta: f64) -> BMatrix {
    let [hx, hy, hz] = spacing;
    let mut b = BMatrix::zeros();
    for a in 0..8 {
        // d/dx = (2/hx) d/dxi of N_a = (1 + xi XI)(1 + eta ETA)(1 + zeta ZETA)/8.
        let dndx = XI[a] * (1.0 + eta * ETA[a]) * (1.0 + zeta * ZETA[a]) / (4.0 * hx);
        let dndy = ETA[a] * (1.0 + xi * XI[a]) * (1.0 + zeta * ZETA[a]) / (4.0 * hy);
        let dndz = ZETA[a] * (1.0 + xi * XI[a]) * (1.0 + eta * ETA[a]) / (4.0 * hz);
        let c = 3 * a;
        b[(0, c)] = dndx;
        b[(1, c + 1)] = dndy;
        b[(2, c + 2)] = dndz;
        // Engineering shears: g_yz = du_y/dz + du_z/dy, etc.
        b[(3, c + 1)] = dndz;
        b[(3, c + 2)] = dndy;
        b[(4, c)] = dndz;
        b[(4, c + 2)] = dndx;
        b[(5, c)] = dndy;
        b[(5, c + 1)] = dndx;
    }
    b
}

/// Precomputed element geometry shared by every element of a grid.
#[derive(Debug, Clone)]
pub struct Hex8 {
    pub volume: f64,
    /// Quadrature weight times Jacobian determinant (equal at all points).
    pub weight: f64,
    pub b_gauss: [BMatrix; 8],
    /// Also the exact volume-average strain operator.
    pub b_centroid: BMatrix,
}

impl Hex8 {
    pub fn new(spacing: [f64; 3]) -> Self {
        let g = 1.0 / 3.0f64.sqrt();
        let volume = spacing[0] * spacing[1] * spacing[2];
        let b_gauss = std::array::from_fn(|q| {
            b_matrix(spacing, g * XI[q], g * ETA[q], g * ZETA[q])
        });
        Hex8 {
            volume,
            weight: volume / 8.0,
            b_gauss,
            b_centroid: b_matrix(spacing, 0.0, 0.0, 0.0),
        }
    }

    /// Full 2x2x2-quadrature stiffness for one material.
    pub fn stiffness(&self, m: &Matrix6<f64>) -> ElementMatrix {
        let mut k = ElementMatrix::zeros();
        for b in &self.b_gauss {
            k += b.transpose() * m * b * self.weight;
        }
        k
    }

    /// Consistent nodal load of a constant element stress `c`:
    /// the exact integral of B^T c over the element.
    pub fn eigenload(&self, c: &Vector6<f64>) -> ElementVector {
        self.b_centroid.transpose() * c * self.volume
    }

    /// Exact element-average strain of the nodal displacement vector.
    pub fn average_strain(&self, ue: &ElementVector) -> Vector6<f64> {
        self.b_centroid * ue
    }

    /// Exact integral over the element of `strain^T M strain` for the
    /// trilinear field defined by `ue` (2x2x2 quadrature, which is exact
    /// for this integrand on a constant-Jacobian box).
    pub fn strain_energy_integral(&self, m: &Matrix6<f64>, ue: &ElementVector) -> f64 {
        let mut acc = 0.0;
        for b in &self.b_gauss {
            let e = b * ue;
            acc += e.dot(&(m * e)) * self.weight;
        }
        acc
    }
}
