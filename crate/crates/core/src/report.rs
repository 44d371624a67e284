//! Machine-readable run reports and their deterministic serialization.
//!
//! Reports are JSON documents with a versioned `schema` field. Every
//! floating-point number is written with 17 significant digits in
//! scientific notation, so a report is a pure function of the input file
//! and the run configuration: repeated runs produce byte-identical
//! bytes. Wall-clock timings are printed to standard error instead of
//! being embedded for the same reason.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::bounds::{BoundsResult, CaseDiagnostics, EffectiveAlpha, OrderingReport};
use crate::contracted::Matrix7;
use crate::error::{Error, Result};
use crate::material::MaterialValidation;
use crate::microstructure::{HomogeneityReport, TwoPointTable};

pub const REPORT_SCHEMA: &str = "porobound-report-v1";

/// Row-major dense matrix payload with explicit shape.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix7(m: &Matrix7) -> Self {
        let mut data = Vec::with_capacity(49);
        for i in 0..7 {
            for j in 0..7 {
                data.push(m[(i, j)]);
            }
        }
        MatrixJson {
            rows: 7,
            cols: 7,
            data,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        MatrixJson {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputSection {
    pub path: String,
    /// SHA-256 of the document bytes, lowercase hex.
    pub sha256: String,
}

/// Echo of the run configuration; fields not applicable to the command
/// are null.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigSection {
    pub command: String,
    pub input_path: String,
    pub output_path: Option<String>,
    pub bc_family: Option<String>,
    pub solver_tol: Option<f64>,
    pub max_iter_factor: Option<f64>,
    pub shifts: Option<Vec<[i64; 3]>>,
    pub subdivisions: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseValidationSection {
    pub phase: usize,
    pub report: MaterialValidation,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationSection {
    pub valid: bool,
    pub phases: Vec<PhaseValidationSection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoPointSection {
    pub shift: [i64; 3],
    /// Phase-pair probability table, rows = phase at x, cols = phase at
    /// x + shift.
    pub table: MatrixJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct HomogeneitySection {
    pub subdivisions: usize,
    pub shifts: Vec<[i64; 3]>,
    pub score: f64,
    pub per_shift: Vec<f64>,
}

impl HomogeneitySection {
    pub fn from_report(r: &HomogeneityReport) -> Self {
        HomogeneitySection {
            subdivisions: r.subdivisions,
            shifts: r.shifts.clone(),
            score: r.score,
            per_shift: r.per_shift.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsSection {
    pub two_point: Vec<TwoPointSection>,
}

impl TwoPointSection {
    pub fn from_table(t: &TwoPointTable) -> Self {
        TwoPointSection {
            shift: t.shift,
            table: MatrixJson::from_rows(&t.prob),
        }
    }
}

/// One bound family's outputs; null when the family was not selected or
/// its solve failed.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsSection {
    pub a_upper: Option<MatrixJson>,
    pub a_lower: Option<MatrixJson>,
    pub a_voigt: Option<MatrixJson>,
    pub a_reuss: Option<MatrixJson>,
    /// Volume-averaged compliance assembled by the traction family
    /// before inversion.
    pub lower_compliance: Option<MatrixJson>,
    pub upper_cases: Option<Vec<CaseDiagnostics>>,
    pub lower_cases: Option<Vec<CaseDiagnostics>>,
    pub ordering: OrderingReport,
    pub effective_alpha: Option<EffectiveAlpha>,
}

impl BoundsSection {
    pub fn from_result(r: &BoundsResult) -> Self {
        BoundsSection {
            a_upper: r
                .upper
                .as_ref()
                .map(|f| MatrixJson::from_matrix7(&f.matrix.0)),
            a_lower: r
                .lower
                .as_ref()
                .map(|f| MatrixJson::from_matrix7(&f.matrix.0)),
            a_voigt: r.a_voigt.as_ref().map(|m| MatrixJson::from_matrix7(&m.0)),
            a_reuss: r.a_reuss.as_ref().map(|m| MatrixJson::from_matrix7(&m.0)),
            lower_compliance: r
                .lower
                .as_ref()
                .and_then(|f| f.compliance.as_ref())
                .map(|m| MatrixJson::from_matrix7(&m.0)),
            upper_cases: r.upper.as_ref().map(|f| f.cases.clone()),
            lower_cases: r.lower.as_ref().map(|f| f.cases.clone()),
            ordering: r.ordering.clone(),
            effective_alpha: r.effective_alpha.clone(),
        }
    }
}

/// Top-level report document. Sections not produced by the command are
/// null; `error` carries the first numerical failure when a partial
/// report is emitted.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: String,
    pub input: InputSection,
    pub config: ConfigSection,
    pub volume_fractions: Vec<f64>,
    pub validation: Option<ValidationSection>,
    pub statistics: Option<StatsSection>,
    pub bounds: Option<BoundsSection>,
    pub homogeneity: Option<HomogeneitySection>,
    pub error: Option<String>,
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        use std::fmt::Write as _;
        write!(hex, "{byte:02x}").expect("writing to String cannot fail");
    }
    Ok(hex)
}

// ---------------------------------------------------------------------------
// Deterministic serialization
// ---------------------------------------------------------------------------

/// Pretty JSON formatter that renders every f64 with 17 significant
/// digits (`{:.16e}`), which round-trips exactly and is independent of
/// the value's provenance. Non-finite values become null.
struct FixedFloatFormatter<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Formatter for FixedFloatFormatter<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.begin_object_key(writer, first)
    }

    fn end_object_key<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.end_object_key(writer)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.pretty.end_object_value(writer)
    }
}

/// Serializes any report value to its canonical byte representation
/// (pretty JSON, fixed float formatting, trailing newline).
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let formatter = FixedFloatFormatter {
        pretty: PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, formatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("report serialization: {e}")))?;
    out.push(b'\n');
    Ok(out)
}
