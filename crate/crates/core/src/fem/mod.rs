//! Finite-element solution of the two homogeneous-boundary-condition
//! poroelastic problems on a voxel grid, plus the volume/surface
//! averaging operators used to assemble and verify effective properties.
//!
//! Both problem families reduce to a symmetric positive-definite
//! elasticity solve with per-element eigenstress loads:
//!
//! * displacement-pressure case: affine displacement `u = e0 x` on every
//!   boundary node and uniform interior pressure `p0` (the unique
//!   steady-state pressure field matching a constant boundary datum),
//!   which enters the drained-stiffness solve as the eigenstress
//!   `-alpha p0`;
//! * traction-fluid-content case: consistent nodal loads of the uniform
//!   traction `s0 n`, with fluid content held at `zeta0` everywhere
//!   (locally undrained closure), which eliminates pressure pointwise as
//!   `p = M_b (zeta0 - alpha . strain)` and yields the undrained
//!   stiffness `M + M_b alpha alpha^T` with eigenstress
//!   `-M_b zeta0 alpha`; rigid-body motion is removed by a 3-2-1 pin.
//!
//! Solves start from an affine predictor (the boundary datum itself, or
//! a uniform-field estimate for traction cases), which is the exact
//! solution on homogeneous media — those cases converge in zero
//! iterations and are exact to machine precision.

pub mod hex8;
pub mod mesh;
pub mod pcg;

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::contracted::{
    StrainPressure, StrainVector, StressFluidContent, StressVector, Vector7,
};
use crate::error::Result;
use crate::material::{apply_constitutive, assemble_a};
use crate::microstructure::Microstructure;
use hex8::{ElementMatrix, ElementVector, Hex8};
use mesh::Grid3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcFamily {
    DisplacementPressure,
    TractionFluidContent,
}

impl BcFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            BcFamily::DisplacementPressure => "displacement-pressure",
            BcFamily::TractionFluidContent => "traction-fluid-content",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Relative residual tolerance of the conjugate-gradient solve.
    pub tol: f64,
    /// Iteration cap as a multiple of sqrt(number of unknowns).
    pub max_iter_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter_factor: 50.0,
        }
    }
}

/// Solved fields of one canonical case, with per-element constitutive
/// state and the diagnostics needed by the bound assembly.
#[derive(Debug, Clone)]
pub struct FieldSolution {
    pub family: BcFamily,
    /// The unit (or arbitrary) loading vector that drove this case.
    pub loading: Vector7,
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    /// Nodal displacements, 3 per node.
    pub displacement: Vec<f64>,
    /// Per-element pressure.
    pub pressure: Vec<f64>,
    /// Per-element strain/pressure state (exact element averages).
    pub element_gamma: Vec<StrainPressure>,
    /// Per-element stress/fluid-content state.
    pub element_kappa: Vec<StressFluidContent>,
    /// Assembled nodal forces from the element stress fields, 3 per node.
    pub internal_force: Vec<f64>,
    /// Relative residual of the linear solve.
    pub residual_norm: f64,
    pub iterations: usize,
    /// Norm of the reaction forces at the rigid-body pins, relative to the
    /// load norm (always 0 for displacement-pressure cases).
    pub pin_reaction_norm: f64,
    /// Volume average of the energy density `(stress:strain + p zeta)/2`,
    /// integrated with full quadrature (not from element averages).
    pub mean_energy_density: f64,
}

impl FieldSolution {
    pub fn case_label(&self) -> String {
        // Identify a canonical unit loading if this is one.
        let nonzero: Vec<usize> = (0..7).filter(|&i| self.loading[i] != 0.0).collect();
        match nonzero.as_slice() {
            [k] if self.loading[*k] == 1.0 => format!("{}-{}", self.family.as_str(), k + 1),
            _ => format!("{}-custom", self.family.as_str()),
        }
    }

    pub fn element_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn total_volume(&self) -> f64 {
        self.element_count() as f64 * self.spacing[0] * self.spacing[1] * self.spacing[2]
    }
}

/// Per-grid assembled machinery: one stiffness and eigenstress load per
/// phase (elements are congruent, so these are shared by every element of
/// the same phase).
struct ElasticSystem<'a> {
    micro: &'a Microstructure,
    grid: Grid3,
    hex: Hex8,
    elem_nodes: Vec<[usize; 8]>,
    ke: Vec<ElementMatrix>,
    eigenload: Vec<ElementVector>,
}

struct SolveOutput {
    u: Vec<f64>,
    iterations: usize,
    residual: f64,
    rhs_norm: f64,
}

impl<'a> ElasticSystem<'a> {
    fn new(
        micro: &'a Microstructure,
        phase_matrix: impl Fn(usize) -> Matrix6<f64>,
        phase_eigenstress: impl Fn(usize) -> Vector6<f64>,
    ) -> Self {
        let grid = Grid3::new(micro.dims, micro.spacing);
        let hex = Hex8::new(micro.spacing);
        let ke = (0..micro.phases.len())
            .map(|p| hex.stiffness(&phase_matrix(p)))
            .collect();
        let eigenload = (0..micro.phases.len())
            .map(|p| hex.eigenload(&phase_eigenstress(p)))
            .collect();
        ElasticSystem {
            micro,
            elem_nodes: grid.all_element_nodes(),
            grid,
            hex,
            ke,
            eigenload,
        }
    }

    fn ndof(&self) -> usize {
        3 * self.grid.node_count()
    }

    #[inline]
    fn gather(&self, e: usize, x: &[f64]) -> ElementVector {
        let mut ue = ElementVector::zeros();
        for (a, &n) in self.elem_nodes[e].iter().enumerate() {
            ue[3 * a] = x[3 * n];
            ue[3 * a + 1] = x[3 * n + 1];
            ue[3 * a + 2] = x[3 * n + 2];
        }
        ue
    }

    #[inline]
    fn scatter_add(&self, e: usize, fe: &ElementVector, y: &mut [f64]) {
        for (a, &n) in self.elem_nodes[e].iter().enumerate() {
            y[3 * n] += fe[3 * a];
            y[3 * n + 1] += fe[3 * a + 1];
            y[3 * n + 2] += fe[3 * a + 2];
        }
    }

    /// y = K x over all degrees of freedom, element by element.
    fn apply_full(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for e in 0..self.elem_nodes.len() {
            let ue = self.gather(e, x);
            let fe = self.ke[self.micro.voxels[e] as usize] * ue;
            self.scatter_add(e, &fe, y);
        }
    }

    fn assemble_eigenloads(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.ndof()];
        for e in 0..self.elem_nodes.len() {
            let load = self.eigenload[self.micro.voxels[e] as usize];
            self.scatter_add(e, &load, &mut b);
        }
        b
    }

    fn assemble_diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.ndof()];
        for e in 0..self.elem_nodes.len() {
            let ke = &self.ke[self.micro.voxels[e] as usize];
            for (a, &n) in self.elem_nodes[e].iter().enumerate() {
                for c in 0..3 {
                    d[3 * n + c] += ke[(3 * a + c, 3 * a + c)];
                }
            }
        }
        d
    }

    /// Solves `K u = f_ext + eigenloads` with the given fixed degrees of
    /// freedom. `u0` supplies both the fixed values and the initial guess
    /// for the free ones.
    fn solve(
        &self,
        is_fixed: &[bool],
        f_ext: &[f64],
        u0: &[f64],
        opts: &SolverOptions,
    ) -> Result<SolveOutput> {
        let ndof = self.ndof();
        let free: Vec<usize> = (0..ndof).filter(|&d| !is_fixed[d]).collect();
        if free.is_empty() {
            return Ok(SolveOutput {
                u: u0.to_vec(),
                iterations: 0,
                residual: 0.0,
                rhs_norm: 0.0,
            });
        }

        // Right-hand side on the free set, with the fixed-value column
        // contribution moved over: b_f = (f_ext + eig - K u_fixed)|_free.
        let mut b_full = self.assemble_eigenloads();
        for (b, f) in b_full.iter_mut().zip(f_ext) {
            *b += f;
        }
        let mut u_fixed = vec![0.0; ndof];
        for d in 0..ndof {
            if is_fixed[d] {
                u_fixed[d] = u0[d];
            }
        }
        let mut k_u_fixed = vec![0.0; ndof];
        self.apply_full(&u_fixed, &mut k_u_fixed);

        let b_free: Vec<f64> = free.iter().map(|&d| b_full[d] - k_u_fixed[d]).collect();
        let diag_full = self.assemble_diagonal();
        let diag_free: Vec<f64> = free.iter().map(|&d| diag_full[d]).collect();
        let mut x: Vec<f64> = free.iter().map(|&d| u0[d]).collect();

        let mut xfull = u_fixed; // reuse: fixed values stay in place
        let mut yfull = vec![0.0; ndof];
        // The operator restricted to free DOFs: scatter (zeros at fixed),
        // apply, gather.
        let apply_free = |xf: &[f64], yf: &mut [f64]| {
            for (k, &d) in free.iter().enumerate() {
                xfull[d] = xf[k];
            }
            for d in 0..ndof {
                if is_fixed[d] {
                    xfull[d] = 0.0;
                }
            }
            self.apply_full(&xfull, &mut yfull);
            for (k, &d) in free.iter().enumerate() {
                yf[k] = yfull[d];
            }
        };

        let max_iter = ((opts.max_iter_factor * (free.len() as f64).sqrt()).ceil() as usize).max(1);
        let rhs_norm = b_free.iter().map(|v| v * v).sum::<f64>().sqrt();
        let outcome = pcg::solve(apply_free, &diag_free, &b_free, &mut x, opts.tol, max_iter)?;

        let mut u = u0.to_vec();
        for (k, &d) in free.iter().enumerate() {
            u[d] = x[k];
        }
        Ok(SolveOutput {
            u,
            iterations: outcome.iterations,
            residual: outcome.relative_residual,
            rhs_norm,
        })
    }
}

/// Solves the affine-displacement / uniform-pressure case driven by
/// `gamma0 = (strain e0, pressure p0)`: every boundary node is fixed at
/// `u = e0 x`, the interior pressure is `p0`, and the drained elasticity
/// problem is solved with the eigenstress `-alpha p0`.
pub fn solve_displacement_pressure_case(
    micro: &Microstructure,
    gamma0: &StrainPressure,
    opts: &SolverOptions,
) -> Result<FieldSolution> {
    let p0 = gamma0.pressure;
    let sys = ElasticSystem::new(
        micro,
        |p| micro.phases[p].stiffness,
        |p| micro.phases[p].biot_alpha * p0,
    );

    let eps0 = gamma0.strain.to_tensor();
    let n_nodes = sys.grid.node_count();
    let mut u0 = vec![0.0; 3 * n_nodes];
    let mut is_fixed = vec![false; 3 * n_nodes];
    for n in 0..n_nodes {
        let coords = sys.grid.node_coords(n);
        let xp = sys.grid.node_position(coords);
        let u = eps0 * Vector3::new(xp[0], xp[1], xp[2]);
        u0[3 * n] = u[0];
        u0[3 * n + 1] = u[1];
        u0[3 * n + 2] = u[2];
        if sys.grid.is_boundary_node(coords) {
            is_fixed[3 * n] = true;
            is_fixed[3 * n + 1] = true;
            is_fixed[3 * n + 2] = true;
        }
    }

    let f_ext = vec![0.0; 3 * n_nodes];
    let out = sys.solve(&is_fixed, &f_ext, &u0, opts)?;

    // Post-process element states and the Gauss-consistent energy.
    let n_elem = sys.elem_nodes.len();
    let mut pressure = vec![0.0; n_elem];
    let mut element_gamma = Vec::with_capacity(n_elem);
    let mut element_kappa = Vec::with_capacity(n_elem);
    let mut internal_force = vec![0.0; 3 * n_nodes];
    let mut energy = 0.0;
    for e in 0..n_elem {
        let phase = micro.voxels[e] as usize;
        let mat = &micro.phases[phase];
        let ue = sys.gather(e, &out.u);
        let eps_bar = sys.hex.average_strain(&ue);
        let gamma = StrainPressure {
            strain: StrainVector(eps_bar),
            pressure: p0,
        };
        let kappa = apply_constitutive(mat, &gamma);
        pressure[e] = p0;
        element_gamma.push(gamma);
        element_kappa.push(kappa);

        let ke_ue = sys.ke[phase] * ue;
        let fe = ke_ue - sys.eigenload[phase];
        sys.scatter_add(e, &fe, &mut internal_force);
        // Energy density integrand reduces to e^T M e + p^2/M_b.
        energy += ue.dot(&ke_ue) + sys.hex.volume * p0 * p0 / mat.biot_modulus;
    }
    let volume = sys.grid.volume();

    Ok(FieldSolution {
        family: BcFamily::DisplacementPressure,
        loading: gamma0.to_vector7(),
        dims: micro.dims,
        spacing: micro.spacing,
        displacement: out.u,
        pressure,
        element_gamma,
        element_kappa,
        internal_force,
        residual_norm: out.residual,
        iterations: out.iterations,
        pin_reaction_norm: 0.0,
        mean_energy_density: energy / (2.0 * volume),
    })
}

/// Solves the uniform-traction / uniform-fluid-content case driven by
/// `kappa0 = (stress s0, fluid content zeta0)`: consistent nodal loads of
/// `t = s0 n` on the boundary, fluid content `zeta0` everywhere
/// (eliminating pressure into the undrained stiffness), rigid-body modes
/// pinned by the 3-2-1 rule.
pub fn solve_traction_fluid_content_case(
    micro: &Microstructure,
    kappa0: &StressFluidContent,
    opts: &SolverOptions,
) -> Result<FieldSolution> {
    let zeta0 = kappa0.fluid_content;
    let sigma0 = kappa0.stress.to_tensor();
    let sys = ElasticSystem::new(
        micro,
        |p| {
            let m = &micro.phases[p];
            m.stiffness + m.biot_alpha * m.biot_alpha.transpose() * m.biot_modulus
        },
        |p| {
            let m = &micro.phases[p];
            m.biot_alpha * (m.biot_modulus * zeta0)
        },
    );
    let n_nodes = sys.grid.node_count();

    // Consistent nodal loads of the constant traction s0 n per face.
    let mut f_ext = vec![0.0; 3 * n_nodes];
    for face in sys.grid.boundary_faces() {
        let n = Vector3::new(face.normal[0], face.normal[1], face.normal[2]);
        let t = sigma0 * n * (face.area / 4.0);
        for &node in &face.nodes {
            f_ext[3 * node] += t[0];
            f_ext[3 * node + 1] += t[1];
            f_ext[3 * node + 2] += t[2];
        }
    }

    // 3-2-1 rigid-body pin: all components at (0,0,0), the two transverse
    // components on the +x corner, one on the +y corner.
    let [nx, ny, _] = micro.dims;
    let node_a = sys.grid.node_index(0, 0, 0);
    let node_b = sys.grid.node_index(nx, 0, 0);
    let node_c = sys.grid.node_index(0, ny, 0);
    let pins = [
        3 * node_a,
        3 * node_a + 1,
        3 * node_a + 2,
        3 * node_b + 1,
        3 * node_b + 2,
        3 * node_c + 2,
    ];
    let mut is_fixed = vec![false; 3 * n_nodes];
    for &d in &pins {
        is_fixed[d] = true;
    }

    // Affine initial guess from the volume-averaged constitutive matrix:
    // gamma_hat = mean(A)^-1 kappa0. Written in the upper-triangular
    // gradient form, the guess satisfies all six pins exactly.
    let fractions = micro.volume_fractions();
    let mut a_mean = crate::contracted::Matrix7::zeros();
    for (p, &f) in fractions.iter().enumerate() {
        a_mean += assemble_a(&micro.phases[p]).0 * f;
    }
    let gamma_hat = a_mean
        .lu()
        .solve(&kappa0.to_vector7())
        .unwrap_or_else(Vector7::zeros);
    let g = Matrix3::new(
        gamma_hat[0],
        gamma_hat[5],
        gamma_hat[4],
        0.0,
        gamma_hat[1],
        gamma_hat[3],
        0.0,
        0.0,
        gamma_hat[2],
    );
    let mut u0 = vec![0.0; 3 * n_nodes];
    for n in 0..n_nodes {
        let xp = sys.grid.node_position(sys.grid.node_coords(n));
        let u = g * Vector3::new(xp[0], xp[1], xp[2]);
        u0[3 * n] = u[0];
        u0[3 * n + 1] = u[1];
        u0[3 * n + 2] = u[2];
    }

    let out = sys.solve(&is_fixed, &f_ext, &u0, opts)?;

    let n_elem = sys.elem_nodes.len();
    let mut pressure = vec![0.0; n_elem];
    let mut element_gamma = Vec::with_capacity(n_elem);
    let mut element_kappa = Vec::with_capacity(n_elem);
    let mut internal_force = vec![0.0; 3 * n_nodes];
    let mut energy = 0.0;
    for e in 0..n_elem {
        let phase = micro.voxels[e] as usize;
        let mat = &micro.phases[phase];
        let ue = sys.gather(e, &out.u);
        let eps_bar = sys.hex.average_strain(&ue);
        // Pressure recovered from the fixed fluid content; linear in the
        // strain, so the element value is the exact element average.
        let p = mat.biot_modulus * (zeta0 - mat.biot_alpha.dot(&eps_bar));
        let gamma = StrainPressure {
            strain: StrainVector(eps_bar),
            pressure: p,
        };
        let kappa = apply_constitutive(mat, &gamma);
        pressure[e] = p;
        element_gamma.push(gamma);
        element_kappa.push(kappa);

        let ke_ue = sys.ke[phase] * ue;
        let fe = ke_ue - sys.eigenload[phase];
        sys.scatter_add(e, &fe, &mut internal_force);
        // Pointwise energy with p = M_b (zeta0 - alpha.e):
        // e^T M_u e - 2 M_b zeta0 alpha.e + M_b zeta0^2.
        energy += ue.dot(&ke_ue) - 2.0 * sys.eigenload[phase].dot(&ue)
            + sys.hex.volume * mat.biot_modulus * zeta0 * zeta0;
    }
    let volume = sys.grid.volume();

    // Reactions at the pins, relative to the load scale; self-equilibrated
    // loads should leave these at solver-tolerance level.
    let reaction_sq: f64 = pins
        .iter()
        .map(|&d| {
            let r = internal_force[d] - f_ext[d];
            r * r
        })
        .sum();
    let pin_reaction_norm = if out.rhs_norm > 0.0 {
        reaction_sq.sqrt() / out.rhs_norm
    } else {
        reaction_sq.sqrt()
    };

    Ok(FieldSolution {
        family: BcFamily::TractionFluidContent,
        loading: kappa0.to_vector7(),
        dims: micro.dims,
        spacing: micro.spacing,
        displacement: out.u,
        pressure,
        element_gamma,
        element_kappa,
        internal_force,
        residual_norm: out.residual,
        iterations: out.iterations,
        pin_reaction_norm,
        mean_energy_density: energy / (2.0 * volume),
    })
}

/// A quantity computed by two independent routes: element-volume
/// averaging and a boundary integral. Their agreement is the numerical
/// statement of the averaging theorems.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceVolumePair<T> {
    pub volume: T,
    pub surface: T,
}

/// Volume average of the element strain/pressure states.
pub fn average_gamma(sol: &FieldSolution) -> StrainPressure {
    let mut acc = Vector7::zeros();
    for g in &sol.element_gamma {
        acc += g.to_vector7();
    }
    StrainPressure::from_vector7(&(acc / sol.element_gamma.len() as f64))
}

/// Volume average of the element stress/fluid-content states.
pub fn average_kappa(sol: &FieldSolution) -> StressFluidContent {
    let mut acc = Vector7::zeros();
    for k in &sol.element_kappa {
        acc += k.to_vector7();
    }
    StressFluidContent::from_vector7(&(acc / sol.element_kappa.len() as f64))
}

/// Average strain two ways: the mean of element strains, and the
/// boundary integral `(1/2V) int (u n + n u) dS` evaluated with the
/// face quadrature that is exact for the interpolated displacement.
pub fn average_strain(sol: &FieldSolution) -> SurfaceVolumePair<StrainVector> {
    let volume_avg = average_gamma(sol).strain;

    let grid = Grid3::new(sol.dims, sol.spacing);
    let v = grid.volume();
    let mut g = Matrix3::zeros();
    for face in grid.boundary_faces() {
        let w = face.area / 4.0;
        for &node in &face.nodes {
            for i in 0..3 {
                for j in 0..3 {
                    g[(i, j)] += w * sol.displacement[3 * node + i] * face.normal[j];
                }
            }
        }
    }
    let tensor = (g + g.transpose()) / (2.0 * v);
    SurfaceVolumePair {
        volume: volume_avg,
        surface: StrainVector::from_tensor(&tensor),
    }
}

/// Average stress two ways: the mean of element stresses, and the
/// boundary moment `(1/2V) sum_b (x f + f x)` over boundary nodes using
/// the assembled internal forces (plus the body-force moment when a
/// per-element body force is supplied).
pub fn average_stress(
    sol: &FieldSolution,
    body_force: Option<&[[f64; 3]]>,
) -> SurfaceVolumePair<StressVector> {
    let volume_avg = {
        let mut acc = Vector6::zeros();
        for k in &sol.element_kappa {
            acc += k.stress.0;
        }
        StressVector(acc / sol.element_kappa.len() as f64)
    };

    let grid = Grid3::new(sol.dims, sol.spacing);
    let v = grid.volume();
    let mut g = Matrix3::zeros();
    for n in 0..grid.node_count() {
        let coords = grid.node_coords(n);
        if !grid.is_boundary_node(coords) {
            continue;
        }
        let x = grid.node_position(coords);
        for i in 0..3 {
            for j in 0..3 {
                g[(i, j)] += sol.internal_force[3 * n + i] * x[j];
            }
        }
    }
    if let Some(f) = body_force {
        let ve = grid.spacing[0] * grid.spacing[1] * grid.spacing[2];
        let mut e = 0;
        for ez in 0..grid.dims[2] {
            for ey in 0..grid.dims[1] {
                for ex in 0..grid.dims[0] {
                    let xc = [
                        (ex as f64 + 0.5) * grid.spacing[0],
                        (ey as f64 + 0.5) * grid.spacing[1],
                        (ez as f64 + 0.5) * grid.spacing[2],
                    ];
                    for i in 0..3 {
                        for j in 0..3 {
                            g[(i, j)] += ve * f[e][i] * xc[j];
                        }
                    }
                    e += 1;
                }
            }
        }
    }
    let tensor = (g + g.transpose()) / (2.0 * v);
    SurfaceVolumePair {
        volume: volume_avg,
        surface: StressVector::from_tensor(&tensor),
    }
}
