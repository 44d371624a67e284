//! Shared fixtures for unit tests: deterministic random materials and a
//! few structured microstructures with known exact behavior.

use nalgebra::{Matrix6, Vector6};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::material::PoroelasticMaterial;
use crate::microstructure::Microstructure;

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
    let n = dims[0] * dims[1] * dims[2];
    let voxels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    Microstructure::new(dims, [1.0, 1.0, 1.0], voxels, vec![a, b]).unwrap()
}

/// 1x1x8 layered stack of two phases whose stiffness is diagonal and
/// whose coupling acts only across the layers (z). With no in-plane
/// Poisson coupling, uniform across-layer loads leave every layer in a
/// uniform state, so per-layer responses follow the dense 7x7 solve of
/// each phase exactly — the classical series composition.
pub fn decoupled_laminate() -> Microstructure {
    let phase = |normal: [f64; 3], shear: [f64; 3], alpha_z: f64, mb: f64| {
        let mut alpha = Vector6::zeros();
        alpha[2] = alpha_z;
        PoroelasticMaterial {
            stiffness: Matrix6::from_diagonal(&Vector6::new(
                normal[0], normal[1], normal[2], shear[0], shear[1], shear[2],
            )),
            biot_alpha: alpha,
            biot_modulus: mb,
        }
    };
    let stiff = phase([2.0, 2.0, 3.0], [1.0, 1.0, 1.0], 0.8, 2.0);
    let soft = phase([1.0, 1.0, 0.5], [0.4, 0.4, 0.4], 0.3, 0.5);
    let voxels = vec![0, 0, 0, 1, 1, 0, 1, 1];
    Microstructure::new([1, 1, 8], [1.0, 1.0, 1.0], voxels, vec![stiff, soft]).unwrap()
}
