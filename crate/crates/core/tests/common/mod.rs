//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here is deliberately self-contained: the dense linear
//! algebra (Gauss elimination, full-tensor contraction, laminate series
//! model) is written from scratch so it can serve as an oracle for the
//! library's own routines.

#![allow(dead_code)]

use std::path::Path;

use nalgebra::{Matrix6, Vector6};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use porobound::material::PoroelasticMaterial;
use porobound::microstructure::Microstructure;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense random symmetric positive-definite material with full coupling.
pub fn anisotropic_material(rng: &mut ChaCha8Rng) -> PoroelasticMaterial {
    let g = Matrix6::from_fn(|_, _| rng.random_range(-1.0..1.0));
    let stiffness = g.transpose() * g + Matrix6::identity() * 0.2;
    let stiffness = (stiffness + stiffness.transpose()) / 2.0;
    PoroelasticMaterial {
        stiffness,
        biot_alpha: Vector6::from_fn(|_, _| rng.random_range(0.0..0.9)),
        biot_modulus: rng.random_range(0.5..3.0),
    }
}

pub fn homogeneous(dims: [usize; 3], mat: PoroelasticMaterial) -> Microstructure {
    let n = dims[0] * dims[1] * dims[2];
    Microstructure::new(dims, [1.0, 1.0, 1.0], vec![0; n], vec![mat]).unwrap()
}

/// Two random anisotropic phases on a random voxel pattern.
pub fn two_phase_random(dims: [usize; 3], rng: &mut ChaCha8Rng) -> Microstructure {
    let a = anisotropic_material(rng);
    let b = anisotropic_material(rng);
    random_pattern(dims, a, b, rng)
}

/// Two-phase medium where the second phase is the first with a 10:1
/// ratio in every constitutive parameter group: stiffness, Biot
/// coupling, and Biot modulus.
pub fn two_phase_contrast(dims: [usize; 3], rng: &mut ChaCha8Rng) -> Microstructure {
    let a = anisotropic_material(rng);
    let b = PoroelasticMaterial {
        stiffness: a.stiffness / 10.0,
        biot_alpha: a.biot_alpha / 10.0,
        biot_modulus: a.biot_modulus / 10.0,
    };
    random_pattern(dims, a, b, rng)
}

fn random_pattern(
    dims: [usize; 3],
    a: PoroelasticMaterial,
    b: PoroelasticMaterial,
    rng: &mut ChaCha8Rng,
) -> Microstructure {
    let n = dims[0] * dims[1] * dims[2];
    let voxels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    Microstructure::new(dims, [1.0, 1.0, 1.0], voxels, vec![a, b]).unwrap()
}

/// Direct, index-by-index assembly of the 7x7 constitutive matrix
/// [[M, -alpha], [alpha^T, 1/M_b]] as a plain array.
pub fn assemble_oracle(m: &PoroelasticMaterial) -> [[f64; 7]; 7] {
    let mut a = [[0.0; 7]; 7];
    for r in 0..6 {
        for c in 0..6 {
            a[r][c] = m.stiffness[(r, c)];
        }
        a[r][6] = -m.biot_alpha[r];
        a[6][r] = m.biot_alpha[r];
    }
    a[6][6] = 1.0 / m.biot_modulus;
    a
}

/// Gauss elimination with partial pivoting on a dense square system.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[pivot][k].abs() == 0.0 {
            return None;
        }
        a.swap(k, pivot);
        b.swap(k, pivot);
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in (k + 1)..n {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    Some(x)
}

/// Dense inverse via Gauss elimination column by column.
pub fn gauss_invert7(a: &[[f64; 7]; 7]) -> Option<[[f64; 7]; 7]> {
    let rows: Vec<Vec<f64>> = a.iter().map(|r| r.to_vec()).collect();
    let mut inv = [[0.0; 7]; 7];
    for c in 0..7 {
        let mut e = vec![0.0; 7];
        e[c] = 1.0;
        let x = gauss_solve(rows.clone(), e)?;
        for r in 0..7 {
            inv[r][c] = x[r];
        }
    }
    Some(inv)
}

// ---------------------------------------------------------------------
// Full-tensor oracle: contraction convention written out independently.
// ---------------------------------------------------------------------

/// Contracted index of the tensor pair (i, j): order xx, yy, zz, yz, zx,
/// xy.
pub fn tensor_pair_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) => 3,
        (0, 2) => 4,
        (0, 1) => 5,
        _ => unreachable!("tensor indices must be < 3"),
    }
}

pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];

/// Builds the fully symmetric 4th-order tensor whose pair matrix is
/// `c6`: C[i][j][k][l] = c6[pair(i,j)][pair(k,l)].
pub fn full_tensor_from_pairs(c6: &[[f64; 6]; 6]) -> Tensor4 {
    let mut c = [[[[0.0; 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    c[i][j][k][l] = c6[tensor_pair_index(i, j)][tensor_pair_index(k, l)];
                }
            }
        }
    }
    c
}

/// sigma_ij = C_ijkl e_kl by brute-force quadruple contraction.
pub fn tensor_apply(c: &Tensor4, e: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    s[i][j] += c[i][j][k][l] * e[k][l];
                }
            }
        }
    }
    s
}

// ---------------------------------------------------------------------
// Dense 1D two-layer laminate oracle.
// ---------------------------------------------------------------------

/// Two-phase laminate (layers normal to z) whose phases have no coupling
/// between the in-plane strain components (xx, yy, xy) and the
/// across-layer ones (zz, yz, zx). For such media the classical series
/// model below is the exact solution of the traction-type problem.
pub fn laminate_phases() -> [PoroelasticMaterial; 2] {
    // Contracted component order: xx, yy, zz, yz, zx, xy.
    let build = |c00: f64, c11: f64, c01: f64, c55: f64, c22: f64, c33: f64, c44: f64,
                 c23: f64, c34: f64, az: f64, ayz: f64, mb: f64| {
        let mut s = Matrix6::zeros();
        s[(0, 0)] = c00;
        s[(1, 1)] = c11;
        s[(0, 1)] = c01;
        s[(1, 0)] = c01;
        s[(5, 5)] = c55;
        s[(2, 2)] = c22;
        s[(3, 3)] = c33;
        s[(4, 4)] = c44;
        s[(2, 3)] = c23;
        s[(3, 2)] = c23;
        s[(3, 4)] = c34;
        s[(4, 3)] = c34;
        let mut alpha = Vector6::zeros();
        alpha[2] = az;
        alpha[3] = ayz;
        PoroelasticMaterial {
            stiffness: s,
            biot_alpha: alpha,
            biot_modulus: mb,
        }
    };
    let stiff = build(
        4.0, 3.6, 1.2, 1.5, 5.0, 1.8, 1.6, 0.4, 0.3, 0.9, 0.15, 2.5,
    );
    let soft = build(
        0.5, 0.45, 0.15, 0.2, 0.55, 0.22, 0.2, 0.05, 0.04, 0.25, 0.04, 0.4,
    );
    [stiff, soft]
}

/// 1x1x8 column: four voxels of each phase, stacked as two layers.
pub fn laminate_microstructure() -> Microstructure {
    let [stiff, soft] = laminate_phases();
    Microstructure::new(
        [1, 1, 8],
        [1.0, 1.0, 1.0],
        vec![0, 0, 0, 0, 1, 1, 1, 1],
        vec![stiff, soft],
    )
    .unwrap()
}

/// Series response of a two-layer laminate under a prescribed uniform
/// generalized stress state (sigma0, zeta0), with the fluid content
/// fixed pointwise. Unknowns: three in-plane strain components shared by
/// both layers plus three across-layer components per layer. Equations:
/// across-layer stresses match sigma0 in each layer (traction
/// continuity); volume-averaged in-plane stresses match sigma0. Returns
/// the volume-averaged (strain, pressure) 7-vector.
pub fn laminate_oracle_column(
    phases: &[PoroelasticMaterial; 2],
    fractions: [f64; 2],
    kappa0: &[f64; 7],
) -> [f64; 7] {
    const IP: [usize; 3] = [0, 1, 5];
    const OOP: [usize; 3] = [2, 3, 4];
    let zeta0 = kappa0[6];

    // Undrained moduli and eigenstress from eliminating the pressure:
    // p = M_b (zeta0 - alpha . eps).
    let mut m_u = [[[0.0f64; 6]; 6]; 2];
    let mut eig = [[0.0f64; 6]; 2];
    for l in 0..2 {
        let ph = &phases[l];
        for r in 0..6 {
            for c in 0..6 {
                m_u[l][r][c] =
                    ph.stiffness[(r, c)] + ph.biot_modulus * ph.biot_alpha[r] * ph.biot_alpha[c];
            }
            eig[l][r] = ph.biot_modulus * zeta0 * ph.biot_alpha[r];
        }
    }

    // Unknown layout: x[0..3] shared in-plane strains (order IP),
    // x[3..6] layer-0 across-layer strains (order OOP), x[6..9] layer-1.
    let col_of = |l: usize, comp: usize| -> Option<usize> {
        if let Some(k) = IP.iter().position(|&c| c == comp) {
            Some(k)
        } else {
            OOP.iter().position(|&c| c == comp).map(|k| 3 + 3 * l + k)
        }
    };

    let mut a = vec![vec![0.0f64; 9]; 9];
    let mut b = vec![0.0f64; 9];
    let mut row = 0;
    for l in 0..2 {
        for &c in &OOP {
            for comp in 0..6 {
                a[row][col_of(l, comp).unwrap()] += m_u[l][c][comp];
            }
            b[row] = kappa0[c] + eig[l][c];
            row += 1;
        }
    }
    for &c in &IP {
        for l in 0..2 {
            for comp in 0..6 {
                a[row][col_of(l, comp).unwrap()] += fractions[l] * m_u[l][c][comp];
            }
            b[row] += fractions[l] * eig[l][c];
        }
        b[row] += kappa0[c];
        row += 1;
    }
    assert_eq!(row, 9);
    let x = gauss_solve(a, b).expect("laminate oracle system is nonsingular");

    let mut eps = [[0.0f64; 6]; 2];
    for l in 0..2 {
        for comp in 0..6 {
            eps[l][comp] = x[col_of(l, comp).unwrap()];
        }
    }
    let mut out = [0.0f64; 7];
    for comp in 0..6 {
        out[comp] = fractions[0] * eps[0][comp] + fractions[1] * eps[1][comp];
    }
    for l in 0..2 {
        let ph = &phases[l];
        let adote: f64 = (0..6).map(|c| ph.biot_alpha[c] * eps[l][c]).sum();
        out[6] += fractions[l] * ph.biot_modulus * (zeta0 - adote);
    }
    out
}

// ---------------------------------------------------------------------
// RVE documents on disk for CLI-level tests.
// ---------------------------------------------------------------------

/// Writes an RVE JSON document with inline voxels.
pub fn write_rve_json(
    path: &Path,
    dims: [usize; 3],
    spacing: [f64; 3],
    phases: &[PoroelasticMaterial],
    voxels: &[u8],
) {
    let phase_values: Vec<serde_json::Value> = phases
        .iter()
        .map(|p| {
            let mut stiffness = Vec::with_capacity(36);
            for r in 0..6 {
                for c in 0..6 {
                    stiffness.push(p.stiffness[(r, c)]);
                }
            }
            serde_json::json!({
                "stiffness": stiffness,
                "biot_alpha": (0..6).map(|k| p.biot_alpha[k]).collect::<Vec<f64>>(),
                "biot_modulus_pa": p.biot_modulus,
            })
        })
        .collect();
    let doc = serde_json::json!({
        "dims": dims,
        "spacing_m": spacing,
        "phases": phase_values,
        "voxels": voxels.iter().map(|&v| v as u32).collect::<Vec<u32>>(),
    });
    std::fs::write(path, serde_json::to_vec_pretty(&doc).unwrap()).unwrap();
}
