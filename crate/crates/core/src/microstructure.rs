//! Voxelized representative volume elements: ingestion, validation,
//! volume fractions, and two-point phase statistics.
//!
//! A microstructure is a regular grid of `nx * ny * nz` voxels, each
//! assigned one of up to 256 phases, with per-axis voxel spacing in
//! meters. Voxels are stored x-fastest: index = x + nx*(y + ny*z).
//!
//! The statistics here are spatial (translation) averages with periodic
//! wrap, the single-specimen surrogate for ensemble probabilities. The
//! homogeneity score quantifies how far subwindow statistics drift from
//! the whole-grid statistics: 0 for perfectly periodic media, large for
//! graded ones.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::material::PoroelasticMaterial;

#[derive(Debug, Clone)]
pub struct Microstructure {
    /// Grid dimensions (nx, ny, nz), all positive.
    pub dims: [usize; 3],
    /// Voxel spacing (hx, hy, hz) in meters, all positive.
    pub spacing: [f64; 3],
    /// Phase id per voxel, x-fastest ordering.
    pub voxels: Vec<u8>,
    /// Phase materials; every voxel id indexes into this list.
    pub phases: Vec<PoroelasticMaterial>,
}

/// Two-point phase probabilities at one voxel shift: `prob[a][b]` is the
/// probability that a voxel has phase `a` and the voxel at `+shift`
/// (periodic wrap) has phase `b`.
#[derive(Debug, Clone)]
pub struct TwoPointTable {
    pub shift: [i64; 3],
    pub prob: Vec<Vec<f64>>,
}

/// Subwindow-dispersion diagnostic of statistical homogeneity.
#[derive(Debug, Clone)]
pub struct HomogeneityReport {
    pub subdivisions: usize,
    pub shifts: Vec<[i64; 3]>,
    /// Max over shifts of `per_shift`.
    pub score: f64,
    /// Per shift: max over subwindows and phase pairs of the absolute
    /// deviation of the subwindow two-point estimate from the whole-grid
    /// estimate.
    pub per_shift: Vec<f64>,
}

fn geometric_checks(
    dims: [usize; 3],
    spacing: [f64; 3],
    voxels: &[u8],
    phase_count: usize,
) -> Result<()> {
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::InvalidArgument(format!(
            "grid dimensions must be positive (got {dims:?})"
        )));
    }
    if spacing.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "voxel spacing must be positive and finite (got {spacing:?})"
        )));
    }
    let expected = dims[0] * dims[1] * dims[2];
    if voxels.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: voxels.len(),
        });
    }
    if phase_count == 0 {
        return Err(Error::InvalidArgument(
            "at least one phase material is required".to_string(),
        ));
    }
    for (i, &p) in voxels.iter().enumerate() {
        if (p as usize) >= phase_count {
            return Err(Error::UnknownPhase {
                voxel: i,
                phase: p as usize,
                phase_count,
            });
        }
    }
    Ok(())
}

impl Microstructure {
    pub fn new(
        dims: [usize; 3],
        spacing: [f64; 3],
        voxels: Vec<u8>,
        phases: Vec<PoroelasticMaterial>,
    ) -> Result<Self> {
        geometric_checks(dims, spacing, &voxels, phases.len())?;
        for (i, phase) in phases.iter().enumerate() {
            let v = phase.validate();
            if !v.is_valid() {
                return Err(Error::InvalidMaterial {
                    phase: Some(i),
                    failures: v.failures,
                });
            }
        }
        Ok(Microstructure {
            dims,
            spacing,
            voxels,
            phases,
        })
    }

    pub fn voxel_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn voxel_volume(&self) -> f64 {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    pub fn total_volume(&self) -> f64 {
        self.voxel_count() as f64 * self.voxel_volume()
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    #[inline]
    pub fn phase_at(&self, x: usize, y: usize, z: usize) -> usize {
        self.voxels[self.index(x, y, z)] as usize
    }

    pub fn material_at(&self, x: usize, y: usize, z: usize) -> &PoroelasticMaterial {
        &self.phases[self.phase_at(x, y, z)]
    }

    /// Per-phase volume fraction (voxel count over total count).
    pub fn volume_fractions(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.phases.len()];
        for &p in &self.voxels {
            counts[p as usize] += 1;
        }
        let n = self.voxel_count() as f64;
        counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Exact two-point probability table at the given voxel shift,
    /// counting over all voxels with periodic wrap.
    pub fn two_point_probability(&self, shift: [i64; 3]) -> TwoPointTable {
        let prob = two_point_on_window(
            self.dims,
            [0, 0, 0],
            shift,
            self.phases.len(),
            |x, y, z| self.phase_at(x, y, z),
        );
        TwoPointTable { shift, prob }
    }

    /// Splits the grid into `subdivisions^3` equal subwindows, computes the
    /// two-point table of each (periodic within the subwindow) for every
    /// shift, and reports the worst absolute deviation from the whole-grid
    /// table. Requires every dimension divisible by `subdivisions`.
    pub fn homogeneity_score(
        &self,
        subdivisions: usize,
        shifts: &[[i64; 3]],
    ) -> Result<HomogeneityReport> {
        if subdivisions < 2 {
            return Err(Error::InvalidArgument(format!(
                "subdivisions must be at least 2 (got {subdivisions})"
            )));
        }
        if self.dims.iter().any(|&d| d % subdivisions != 0) {
            return Err(Error::InvalidArgument(format!(
                "grid dimensions {:?} are not divisible by {subdivisions} subdivisions",
                self.dims
            )));
        }
        let wdims = [
            self.dims[0] / subdivisions,
            self.dims[1] / subdivisions,
            self.dims[2] / subdivisions,
        ];

        let mut per_shift = Vec::with_capacity(shifts.len());
        for &shift in shifts {
            let whole = self.two_point_probability(shift).prob;
            let mut worst = 0.0f64;
            for wz in 0..subdivisions {
                for wy in 0..subdivisions {
                    for wx in 0..subdivisions {
                        let origin = [wx * wdims[0], wy * wdims[1], wz * wdims[2]];
                        let local =
                            two_point_on_window(wdims, origin, shift, self.phases.len(), |x, y, z| {
                                self.phase_at(x, y, z)
                            });
                        for a in 0..self.phases.len() {
                            for b in 0..self.phases.len() {
                                worst = worst.max((local[a][b] - whole[a][b]).abs());
                            }
                        }
                    }
                }
            }
            per_shift.push(worst);
        }
        let score = per_shift.iter().fold(0.0f64, |m, &v| m.max(v));
        Ok(HomogeneityReport {
            subdivisions,
            shifts: shifts.to_vec(),
            score,
            per_shift,
        })
    }
}

/// Exact two-point counting over a window of `dims` voxels starting at
/// `origin` (in the coordinates accepted by `phase_of`), wrapping the
/// shifted point periodically *within the window*.
fn two_point_on_window(
    dims: [usize; 3],
    origin: [usize; 3],
    shift: [i64; 3],
    n_phases: usize,
    phase_of: impl Fn(usize, usize, usize) -> usize,
) -> Vec<Vec<f64>> {
    // Precompute wrapped target coordinates per axis.
    let wrap = |n: usize, r: i64| -> Vec<usize> {
        (0..n)
            .map(|i| (i as i64 + r).rem_euclid(n as i64) as usize)
            .collect()
    };
    let xs = wrap(dims[0], shift[0]);
    let ys = wrap(dims[1], shift[1]);
    let zs = wrap(dims[2], shift[2]);

    let mut counts = vec![vec![0u64; n_phases]; n_phases];
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                let a = phase_of(origin[0] + x, origin[1] + y, origin[2] + z);
                let b = phase_of(origin[0] + xs[x], origin[1] + ys[y], origin[2] + zs[z]);
                counts[a][b] += 1;
            }
        }
    }
    let n = (dims[0] * dims[1] * dims[2]) as f64;
    counts
        .iter()
        .map(|row| row.iter().map(|&c| c as f64 / n).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// File ingestion
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct RveFile {
    dims: [usize; 3],
    spacing_m: [f64; 3],
    phases: Vec<PhaseSpec>,
    voxels: VoxelsSpec,
}

#[derive(Deserialize)]
struct PhaseSpec {
    /// 36 entries, row-major 6x6.
    stiffness: Vec<f64>,
    biot_alpha: [f64; 6],
    biot_modulus_pa: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VoxelsSpec {
    /// Phase ids inline, x-fastest.
    Inline(Vec<u32>),
    /// Relative path to a raw unsigned-8-bit file, same length/ordering.
    Path(String),
}

impl PhaseSpec {
    fn into_material(self, phase: usize) -> Result<PoroelasticMaterial> {
        if self.stiffness.len() != 36 {
            return Err(Error::Parse(format!(
                "phase {phase}: stiffness must have 36 entries (row-major 6x6), got {}",
                self.stiffness.len()
            )));
        }
        let stiffness = nalgebra::Matrix6::from_row_slice(&self.stiffness);
        Ok(PoroelasticMaterial {
            stiffness,
            biot_alpha: nalgebra::Vector6::from_row_slice(&self.biot_alpha),
            biot_modulus: self.biot_modulus_pa,
        })
    }
}

struct RveParts {
    dims: [usize; 3],
    spacing: [f64; 3],
    voxels: Vec<u8>,
    phases: Vec<PoroelasticMaterial>,
}

fn read_rve_parts(path: &Path) -> Result<RveParts> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: RveFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;

    let voxels: Vec<u8> = match file.voxels {
        VoxelsSpec::Inline(ids) => {
            let mut out = Vec::with_capacity(ids.len());
            for (i, id) in ids.iter().enumerate() {
                if *id > u8::MAX as u32 {
                    return Err(Error::UnknownPhase {
                        voxel: i,
                        phase: *id as usize,
                        phase_count: file.phases.len(),
                    });
                }
                out.push(*id as u8);
            }
            out
        }
        VoxelsSpec::Path(rel) => {
            let raw_path = path.parent().unwrap_or(Path::new(".")).join(rel);
            std::fs::read(&raw_path).map_err(|source| Error::Io {
                path: raw_path.clone(),
                source,
            })?
        }
    };

    let mut phases = Vec::with_capacity(file.phases.len());
    for (i, spec) in file.phases.into_iter().enumerate() {
        phases.push(spec.into_material(i)?);
    }
    Ok(RveParts {
        dims: file.dims,
        spacing: file.spacing_m,
        voxels,
        phases,
    })
}

/// Loads and fully validates a microstructure from a JSON document. A
/// string-valued `voxels` field is resolved relative to the document's
/// directory and read as raw bytes.
pub fn load_rve(path: &Path) -> Result<Microstructure> {
    let parts = read_rve_parts(path)?;
    Microstructure::new(parts.dims, parts.spacing, parts.voxels, parts.phases)
}

/// Per-phase validation outcome of an RVE document. Unlike [`load_rve`]
/// this collects material failures instead of aborting on the first one;
/// geometric defects (bad dims, out-of-range phase ids) still error.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RveValidation {
    pub dims: [usize; 3],
    pub volume_fractions: Vec<f64>,
    pub phases: Vec<crate::material::MaterialValidation>,
    pub valid: bool,
}

pub fn validate_rve(path: &Path) -> Result<RveValidation> {
    let parts = read_rve_parts(path)?;
    geometric_checks(parts.dims, parts.spacing, &parts.voxels, parts.phases.len())?;

    let mut counts = vec![0usize; parts.phases.len()];
    for &p in &parts.voxels {
        counts[p as usize] += 1;
    }
    let n = parts.voxels.len() as f64;
    let volume_fractions = counts.iter().map(|&c| c as f64 / n).collect();

    let reports: Vec<_> = parts.phases.iter().map(|m| m.validate()).collect();
    let valid = reports.iter().all(|r| r.is_valid());
    Ok(RveValidation {
        dims: parts.dims,
        volume_fractions,
        phases: reports,
        valid,
    })
}
