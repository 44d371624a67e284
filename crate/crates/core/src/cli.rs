//! Command-line frontend: argument parsing, orchestration, and report
//! emission.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure. A partial
//! report is still written when one bound family fails and the other
//! succeeds. `POROBOUND_THREADS` caps the case-level parallelism (0 or
//! unset selects the default pool).

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bounds::{
    lower_bound, reuss_estimate, upper_bound, voigt_estimate, BoundsResult, FamilyRun,
    FamilySelection, OrderingReport,
};
use crate::error::{Error, Result};
use crate::fem::SolverOptions;
use crate::microstructure::{load_rve, validate_rve, Microstructure};
use crate::report::{
    sha256_hex, to_canonical_json, BoundsSection, ConfigSection, HomogeneitySection,
    InputSection, PhaseValidationSection, Report, StatsSection, TwoPointSection,
    ValidationSection, REPORT_SCHEMA,
};

#[derive(Debug, Parser)]
#[command(
    name = "porobound",
    version,
    about = "Bounds on effective poroelastic constitutive matrices of voxelized RVEs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an RVE document: geometry, phase references, and material
    /// admissibility. Writes a validation report.
    Validate {
        /// RVE document (JSON).
        rve: PathBuf,
    },
    /// Two-point phase statistics and the homogeneity score.
    Stats {
        /// RVE document (JSON).
        rve: PathBuf,
        /// Lattice shifts as "x,y,z;x,y,z;...".
        #[arg(long, default_value = "0,0,0;1,0,0;0,1,0;0,0,1")]
        shifts: String,
        /// Subdivisions per axis for the subwindow dispersion score.
        #[arg(long, default_value_t = 2)]
        subdiv: usize,
        /// Report destination (defaults to standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the canonical boundary-value cases and assemble the bound
    /// matrices.
    Bounds {
        /// RVE document (JSON).
        rve: PathBuf,
        /// Which boundary-condition family to run.
        #[arg(long, value_enum, default_value_t = BcChoice::Both)]
        bc: BcChoice,
        /// Relative residual tolerance of the linear solver.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Iteration cap factor: cap = factor * sqrt(free unknowns).
        #[arg(long, default_value_t = 50.0)]
        max_iter_factor: f64,
        /// Report destination (defaults to standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BcChoice {
    DisplacementPressure,
    TractionFluidContent,
    Both,
}

impl BcChoice {
    fn selection(self) -> FamilySelection {
        match self {
            BcChoice::DisplacementPressure => FamilySelection::DisplacementPressure,
            BcChoice::TractionFluidContent => FamilySelection::TractionFluidContent,
            BcChoice::Both => FamilySelection::Both,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            BcChoice::DisplacementPressure => "displacement-pressure",
            BcChoice::TractionFluidContent => "traction-fluid-content",
            BcChoice::Both => "both",
        }
    }
}

pub fn default_shifts() -> Vec<[i64; 3]> {
    vec![[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
}

pub fn parse_shifts(text: &str) -> Result<Vec<[i64; 3]>> {
    let mut shifts = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let comps: Vec<&str> = part.split(',').map(str::trim).collect();
        if comps.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "shift '{part}' must have three comma-separated components"
            )));
        }
        let mut shift = [0i64; 3];
        for (k, c) in comps.iter().enumerate() {
            shift[k] = c.parse().map_err(|_| {
                Error::InvalidArgument(format!("shift component '{c}' is not an integer"))
            })?;
        }
        shifts.push(shift);
    }
    if shifts.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one shift is required".to_string(),
        ));
    }
    Ok(shifts)
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>> {
    match std::env::var("POROBOUND_THREADS") {
        Err(_) => Ok(None),
        Ok(text) => {
            let n: usize = text.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!(
                    "POROBOUND_THREADS must be a non-negative integer, got '{text}'"
                ))
            })?;
            if n == 0 {
                Ok(None)
            } else {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
                Ok(Some(pool))
            }
        }
    }
}

fn in_pool<T: Send>(pool: &Option<rayon::ThreadPool>, f: impl FnOnce() -> T + Send) -> T {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

fn emit(report: &Report, out: Option<&Path>) -> Result<()> {
    let bytes = to_canonical_json(report)?;
    match out {
        Some(path) => std::fs::write(path, &bytes).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn empty_report(input: InputSection, config: ConfigSection) -> Report {
    Report {
        schema: REPORT_SCHEMA.to_string(),
        input,
        config,
        volume_fractions: Vec::new(),
        validation: None,
        statistics: None,
        bounds: None,
        homogeneity: None,
        error: None,
    }
}

fn run_validate(rve: &Path) -> Result<i32> {
    let validation = validate_rve(rve)?;
    let input = InputSection {
        path: rve.display().to_string(),
        sha256: sha256_hex(rve)?,
    };
    let config = ConfigSection {
        command: "validate".to_string(),
        input_path: rve.display().to_string(),
        output_path: None,
        bc_family: None,
        solver_tol: None,
        max_iter_factor: None,
        shifts: None,
        subdivisions: None,
    };
    let valid = validation.valid;
    let mut report = empty_report(input, config);
    report.volume_fractions = validation.volume_fractions.clone();
    report.validation = Some(ValidationSection {
        valid,
        phases: validation
            .phases
            .into_iter()
            .enumerate()
            .map(|(phase, r)| PhaseValidationSection { phase, report: r })
            .collect(),
    });
    if !valid {
        report.error = Some("material validation failed".to_string());
    }
    emit(&report, None)?;
    Ok(if valid { 0 } else { 2 })
}

fn run_stats(rve: &Path, shifts_text: &str, subdiv: usize, out: Option<&Path>) -> Result<i32> {
    let micro = load_rve(rve)?;
    let shifts = parse_shifts(shifts_text)?;
    let homogeneity = micro.homogeneity_score(subdiv, &shifts)?;

    let tables: Vec<TwoPointSection> = shifts
        .iter()
        .map(|&s| TwoPointSection::from_table(&micro.two_point_probability(s)))
        .collect();

    let input = InputSection {
        path: rve.display().to_string(),
        sha256: sha256_hex(rve)?,
    };
    let config = ConfigSection {
        command: "stats".to_string(),
        input_path: rve.display().to_string(),
        output_path: out.map(|p| p.display().to_string()),
        bc_family: None,
        solver_tol: None,
        max_iter_factor: None,
        shifts: Some(shifts.clone()),
        subdivisions: Some(subdiv),
    };
    let mut report = empty_report(input, config);
    report.volume_fractions = micro.volume_fractions();
    report.statistics = Some(StatsSection { two_point: tables });
    report.homogeneity = Some(HomogeneitySection::from_report(&homogeneity));
    emit(&report, out)?;
    Ok(0)
}

fn run_bounds(
    rve: &Path,
    bc: BcChoice,
    tol: f64,
    max_iter_factor: f64,
    out: Option<&Path>,
) -> Result<i32> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "solver tolerance must be positive and finite, got {tol}"
        )));
    }
    if !(max_iter_factor > 0.0) || !max_iter_factor.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "iteration cap factor must be positive and finite, got {max_iter_factor}"
        )));
    }
    let micro = load_rve(rve)?;
    let input = InputSection {
        path: rve.display().to_string(),
        sha256: sha256_hex(rve)?,
    };
    let solver = SolverOptions {
        tol,
        max_iter_factor,
    };
    let selection = bc.selection();
    let pool = thread_pool()?;

    let mut error_note: Option<String> = None;
    let mut exit = 0;
    let note_failure = |note: &mut Option<String>, exit: &mut i32, e: Error| {
        *exit = (*exit).max(e.exit_code());
        if note.is_none() {
            *note = Some(e.to_string());
        }
    };

    let total = Instant::now();
    let upper: Option<FamilyRun> = if selection.runs_upper() {
        let t = Instant::now();
        let r = in_pool(&pool, || upper_bound(&micro, &solver));
        eprintln!(
            "timing: displacement-pressure family {:.3}s",
            t.elapsed().as_secs_f64()
        );
        match r {
            Ok(f) => Some(f),
            Err(e) => {
                note_failure(&mut error_note, &mut exit, e);
                None
            }
        }
    } else {
        None
    };
    let lower: Option<FamilyRun> = if selection.runs_lower() {
        let t = Instant::now();
        let r = in_pool(&pool, || lower_bound(&micro, &solver));
        eprintln!(
            "timing: traction-fluid-content family {:.3}s",
            t.elapsed().as_secs_f64()
        );
        match r {
            Ok(f) => Some(f),
            Err(e) => {
                note_failure(&mut error_note, &mut exit, e);
                None
            }
        }
    } else {
        None
    };

    let a_voigt = selection.runs_upper().then(|| voigt_estimate(&micro));
    let a_reuss = if selection.runs_lower() {
        match reuss_estimate(&micro) {
            Ok(m) => Some(m),
            Err(e) => {
                note_failure(&mut error_note, &mut exit, e);
                None
            }
        }
    } else {
        None
    };

    let ordering = OrderingReport {
        upper_vs_lower: match (&upper, &lower) {
            (Some(u), Some(l)) => Some(crate::bounds::ordering_check(&u.matrix, &l.matrix)),
            _ => None,
        },
        voigt_vs_upper: match (&a_voigt, &upper) {
            (Some(v), Some(u)) => Some(crate::bounds::ordering_check(v, &u.matrix)),
            _ => None,
        },
        lower_vs_reuss: match (&lower, &a_reuss) {
            (Some(l), Some(r)) => Some(crate::bounds::ordering_check(&l.matrix, r)),
            _ => None,
        },
    };
    let effective_alpha = upper
        .as_ref()
        .map(|u| crate::bounds::effective_alpha(&u.matrix));
    let result = BoundsResult {
        upper,
        lower,
        a_voigt,
        a_reuss,
        ordering,
        effective_alpha,
    };
    eprintln!("timing: total {:.3}s", total.elapsed().as_secs_f64());

    let config = ConfigSection {
        command: "bounds".to_string(),
        input_path: rve.display().to_string(),
        output_path: out.map(|p| p.display().to_string()),
        bc_family: Some(bc.as_str().to_string()),
        solver_tol: Some(tol),
        max_iter_factor: Some(max_iter_factor),
        shifts: None,
        subdivisions: None,
    };
    let mut report = empty_report(input, config);
    report.volume_fractions = micro.volume_fractions();
    report.bounds = Some(BoundsSection::from_result(&result));
    report.homogeneity = homogeneity_diagnostic(&micro);
    if let Some(note) = &error_note {
        eprintln!("error: {note} (partial report emitted)");
    }
    report.error = error_note;
    emit(&report, out)?;
    Ok(exit)
}

/// Best-effort homogeneity score with the default shifts and a 2x2x2
/// subdivision; null when the grid cannot be subdivided evenly.
fn homogeneity_diagnostic(micro: &Microstructure) -> Option<HomogeneitySection> {
    micro
        .homogeneity_score(2, &default_shifts())
        .ok()
        .map(|r| HomogeneitySection::from_report(&r))
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Validate { rve } => run_validate(&rve),
        Command::Stats {
            rve,
            shifts,
            subdiv,
            out,
        } => run_stats(&rve, &shifts, subdiv, out.as_deref()),
        Command::Bounds {
            rve,
            bc,
            tol,
            max_iter_factor,
            out,
        } => run_bounds(&rve, bc, tol, max_iter_factor, out.as_deref()),
    }
}
