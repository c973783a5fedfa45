//! Strict, versioned JSON schemas for problems, measures and reports, plus
//! the CSV table emitter.
//!
//! Every input file carries `"schema": "measure-duality/v1"` and unknown
//! keys are rejected: fixtures double as regression oracles, so silent
//! defaulting is forbidden. Floats round-trip exactly through JSON; the CSV
//! emitter pins 12 significant digits, LF line endings and a stable column
//! order.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::integrand::ConvexIntegrand;
use crate::measure::DiscreteMeasure;
use crate::operator::{BoundaryRule, ConstraintOperator, OperatorName, SourceTerm};
use crate::primal_dual::Problem;

pub const SCHEMA: &str = "measure-duality/v1";

fn check_schema(schema: &str) -> Result<()> {
    if schema != SCHEMA {
        return Err(Error::Domain(format!(
            "unsupported schema '{schema}', expected '{SCHEMA}'"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub shape: Vec<usize>,
    pub extent: Vec<[f64; 2]>,
}

impl GridSpec {
    pub fn to_grid(&self) -> Result<Grid> {
        if self.dim != self.shape.len() {
            return Err(Error::DimensionMismatch(
                "grid dim does not match its shape".into(),
            ));
        }
        Grid::new(
            self.shape.clone(),
            self.extent.iter().map(|e| (e[0], e[1])).collect(),
        )
    }

    pub fn from_grid(grid: &Grid) -> Self {
        Self {
            dim: grid.dim(),
            shape: grid.shape().to_vec(),
            extent: grid.extent().iter().map(|&(lo, hi)| [lo, hi]).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedSpec {
    /// `[x, z, f]` samples on a complete grid.
    pub points: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrandSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Grid sample of the weight for `weighted_abs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tabulated: Option<TabulatedSpec>,
    /// Optional smoothing scale applied after construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mollify: Option<f64>,
    /// Optional growth-constant override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_constant: Option<f64>,
}

impl IntegrandSpec {
    pub fn to_integrand(&self, grid: &Grid, dimension: usize) -> Result<ConvexIntegrand> {
        let base = match (&self.builtin, &self.tabulated) {
            (Some(name), None) => match name.as_str() {
                "abs" => ConvexIntegrand::abs(dimension),
                "area" => ConvexIntegrand::area(dimension),
                "huber" => {
                    let gamma = self.gamma.ok_or_else(|| {
                        Error::Domain("huber integrand needs a gamma field".into())
                    })?;
                    ConvexIntegrand::huber(dimension, gamma)?
                }
                "weighted_abs" => {
                    let weights = self.weights.clone().ok_or_else(|| {
                        Error::Domain("weighted_abs needs a weights field".into())
                    })?;
                    if dimension != 1 {
                        return Err(Error::Domain(
                            "weighted_abs supports scalar fields only".into(),
                        ));
                    }
                    ConvexIntegrand::weighted_abs(grid.clone(), weights)?
                }
                other => {
                    return Err(Error::Domain(format!(
                        "unknown builtin integrand '{other}'"
                    )))
                }
            },
            (None, Some(tab)) => {
                if dimension != 1 {
                    return Err(Error::Domain(
                        "tabulated integrands support scalar fields only".into(),
                    ));
                }
                let points: Vec<(f64, f64, f64)> =
                    tab.points.iter().map(|p| (p[0], p[1], p[2])).collect();
                ConvexIntegrand::tabulated(&points)?
            }
            _ => {
                return Err(Error::Domain(
                    "integrand needs exactly one of 'builtin' or 'tabulated'".into(),
                ))
            }
        };
        if self.gamma.is_some() && self.builtin.as_deref() != Some("huber") {
            return Err(Error::Domain("gamma is only valid for huber".into()));
        }
        if self.weights.is_some() && self.builtin.as_deref() != Some("weighted_abs") {
            return Err(Error::Domain(
                "weights are only valid for weighted_abs".into(),
            ));
        }
        let base = match self.growth_constant {
            Some(m) => base.with_growth_constant(m)?,
            None => base,
        };
        match self.mollify {
            Some(delta) => base.mollify(delta),
            None => Ok(base),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomOperatorSpec {
    pub rows: usize,
    pub cols: usize,
    pub triplets: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomOperatorSpec>,
}

impl OperatorSpec {
    pub fn to_operator(&self, grid: &Grid) -> Result<ConstraintOperator> {
        match (&self.name, &self.custom) {
            (Some(name), None) => {
                let op_name = match name.as_str() {
                    "gradient_1d" => OperatorName::Gradient1d,
                    "divergence_2d" => OperatorName::Divergence2d,
                    "curl_2d" => OperatorName::Curl2d,
                    "symmetric_gradient_2d" => OperatorName::SymmetricGradient2d,
                    other => return Err(Error::Domain(format!("unknown operator '{other}'"))),
                };
                let boundary = match self.boundary.as_deref() {
                    Some("periodic") => BoundaryRule::Periodic,
                    Some("zero") => BoundaryRule::Zero,
                    Some(other) => {
                        return Err(Error::Domain(format!("unknown boundary rule '{other}'")))
                    }
                    None => return Err(Error::Domain("operator needs a boundary rule".into())),
                };
                ConstraintOperator::build(op_name, grid, boundary)
            }
            (None, Some(custom)) => {
                ConstraintOperator::custom(grid, custom.rows, custom.cols, &custom.triplets)
            }
            _ => Err(Error::Domain(
                "operator needs exactly one of 'name' or 'custom'".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBody {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub grid: GridSpec,
    pub integrand: IntegrandSpec,
    pub operator: OperatorSpec,
    pub tau: Vec<f64>,
    pub u0: Vec<f64>,
}

impl ProblemBody {
    pub fn to_problem(&self) -> Result<Problem> {
        let grid = self.grid.to_grid()?;
        let operator = self.operator.to_operator(&grid)?;
        let integrand = self
            .integrand
            .to_integrand(&grid, operator.primal_components())?;
        let source = SourceTerm::new(&operator, self.tau.clone(), self.u0.clone())?;
        Problem::new(grid, integrand, operator, source)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub grid: GridSpec,
    pub integrand: IntegrandSpec,
    pub operator: OperatorSpec,
    pub tau: Vec<f64>,
    pub u0: Vec<f64>,
}

impl ProblemFile {
    pub fn body(&self) -> ProblemBody {
        ProblemBody {
            name: self.name.clone(),
            grid: self.grid.clone(),
            integrand: self.integrand.clone(),
            operator: self.operator.clone(),
            tau: self.tau.clone(),
            u0: self.u0.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub cell: usize,
    pub mass: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureBody {
    pub grid: GridSpec,
    /// Per-cell density vectors.
    pub density: Vec<Vec<f64>>,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
}

impl MeasureBody {
    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        let grid = self.grid.to_grid()?;
        let n = grid.n_cells();
        if self.density.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} density rows for {} cells",
                self.density.len(),
                n
            )));
        }
        let components = self.density.first().map(|d| d.len()).unwrap_or(0);
        if components == 0 || self.density.iter().any(|d| d.len() != components) {
            return Err(Error::DimensionMismatch(
                "density rows must share one positive component count".into(),
            ));
        }
        let flat: Vec<f64> = self.density.iter().flatten().copied().collect();
        let mut mu = DiscreteMeasure::from_density(grid, components, flat)?;
        for atom in &self.atoms {
            mu = mu.with_atom(atom.cell, atom.mass.clone())?;
        }
        Ok(mu)
    }

    pub fn from_measure(mu: &DiscreteMeasure) -> Self {
        let n = mu.grid().n_cells();
        Self {
            grid: GridSpec::from_grid(mu.grid()),
            density: (0..n).map(|c| mu.density_at(c).to_vec()).collect(),
            atoms: mu
                .atoms()
                .iter()
                .map(|a| AtomSpec {
                    cell: a.cell,
                    mass: a.mass.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub schema: String,
    pub grid: GridSpec,
    pub density: Vec<Vec<f64>>,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
}

/// Bundle for the gap / pairing / check-optimality commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub problem: ProblemBody,
    pub measure: MeasureBody,
    pub wstar: Vec<f64>,
}

/// Bundle for the relax command (no dual field involved).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub problem: ProblemBody,
    pub measure: MeasureBody,
}

/// Pointwise query bundle for the conjugate / recession commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointQueryFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    pub integrand: IntegrandSpec,
    /// Spatial point the integrand is frozen at.
    pub x: Vec<f64>,
    /// Query vectors (z* for conjugates, z for recessions).
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(Error::Io)
}

pub fn load_problem(path: &Path) -> Result<(Problem, String)> {
    let text = read_to_string(path)?;
    let file: ProblemFile = serde_json::from_str(&text)?;
    check_schema(&file.schema)?;
    let name = file.name.clone().unwrap_or_else(|| file_stem(path));
    Ok((file.body().to_problem()?, name))
}

pub fn load_measure(path: &Path) -> Result<DiscreteMeasure> {
    let text = read_to_string(path)?;
    let file: MeasureFile = serde_json::from_str(&text)?;
    check_schema(&file.schema)?;
    MeasureBody {
        grid: file.grid,
        density: file.density,
        atoms: file.atoms,
    }
    .to_measure()
}

pub fn load_pair(path: &Path) -> Result<(Problem, DiscreteMeasure, Vec<f64>, String)> {
    let text = read_to_string(path)?;
    let file: PairFile = serde_json::from_str(&text)?;
    check_schema(&file.schema)?;
    let name = file.name.clone().unwrap_or_else(|| file_stem(path));
    let problem = file.problem.to_problem()?;
    let measure = file.measure.to_measure()?;
    Ok((problem, measure, file.wstar, name))
}

pub fn load_relax(path: &Path) -> Result<(Problem, DiscreteMeasure, String)> {
    let text = read_to_string(path)?;
    let file: RelaxFile = serde_json::from_str(&text)?;
    check_schema(&file.schema)?;
    let name = file.name.clone().unwrap_or_else(|| file_stem(path));
    Ok((file.problem.to_problem()?, file.measure.to_measure()?, name))
}

pub fn load_point_query(path: &Path) -> Result<(ConvexIntegrand, Vec<f64>, Vec<Vec<f64>>)> {
    let text = read_to_string(path)?;
    let file: PointQueryFile = serde_json::from_str(&text)?;
    check_schema(&file.schema)?;
    let grid = match &file.grid {
        Some(spec) => spec.to_grid()?,
        None => Grid::uniform_1d(1),
    };
    let dimension = file
        .dimension
        .or_else(|| file.points.first().map(|p| p.len()))
        .ok_or_else(|| Error::Domain("query needs points or a dimension".into()))?;
    if file.points.iter().any(|p| p.len() != dimension) {
        return Err(Error::DimensionMismatch(
            "query points must share one dimension".into(),
        ));
    }
    let integrand = file.integrand.to_integrand(&grid, dimension)?;
    Ok((integrand, file.x.clone(), file.points))
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unnamed".to_string())
}

/// Write atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Format with 12 significant digits; infinities keep their markers.
pub fn format_sig12(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.11e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "n-a",
        }
    }
}

/// One row of the summary table.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub fixture: String,
    pub f_bar: f64,
    pub r: f64,
    pub gap: f64,
    pub ac_residual: Option<f64>,
    pub singular_residual: Option<f64>,
    pub verdict: Verdict,
}

impl ReportRow {
    /// Summary row for a solve report (no pointwise residuals).
    pub fn from_solve(fixture: &str, report: &crate::primal_dual::SolveReport) -> Self {
        Self {
            fixture: fixture.to_string(),
            f_bar: report.primal_energy,
            r: report.certificate.r_value.to_f64(),
            gap: report.gap,
            ac_residual: None,
            singular_residual: None,
            verdict: if report.converged {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        }
    }

    /// Summary row for an optimality report.
    pub fn from_optimality(
        fixture: &str,
        f_bar: f64,
        report: &crate::pairing::OptimalityReport,
    ) -> Self {
        Self {
            fixture: fixture.to_string(),
            f_bar,
            r: f_bar - report.gap,
            gap: report.gap,
            ac_residual: Some(report.ac_residual),
            singular_residual: Some(report.singular_residual),
            verdict: if report.pass {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        }
    }
}

/// One row per sequence step: `step,pairing_error,area,total_variation`.
pub fn sequence_report_csv(report: &crate::measure::MeasureSequenceReport) -> String {
    let mut out = String::from("step,pairing_error,area,total_variation\n");
    for (i, ((err, area), tv)) in report
        .pairing_errors
        .iter()
        .zip(&report.area_values)
        .zip(&report.tv_values)
        .enumerate()
    {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i,
            format_sig12(*err),
            format_sig12(*area),
            format_sig12(*tv)
        ));
    }
    out
}

/// Emit the stable-column CSV: `fixture,F_bar,R,gap,ac_residual,
/// singular_residual,verdict`, UTF-8, LF endings, 12 significant digits.
pub fn emit_table(rows: &[ReportRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Domain("emit_table needs at least one report".into()));
    }
    let mut out = String::from("fixture,F_bar,R,gap,ac_residual,singular_residual,verdict\n");
    for row in rows {
        let opt = |v: Option<f64>| v.map(format_sig12).unwrap_or_else(|| "n-a".to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.fixture,
            format_sig12(row.f_bar),
            format_sig12(row.r),
            format_sig12(row.gap),
            opt(row.ac_residual),
            opt(row.singular_residual),
            row.verdict.as_str()
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Region;

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{
            "schema": "measure-duality/v1",
            "grid": {"dim": 1, "shape": [4], "extent": [[0.0, 1.0]]},
            "density": [[0.0],[0.0],[0.0],[0.0]],
            "surprise": 1
        }"#;
        let parsed: std::result::Result<MeasureFile, _> = serde_json::from_str(text);
        assert!(parsed.is_err());
    }

    #[test]
    fn schema_version_is_enforced() {
        assert!(check_schema("measure-duality/v1").is_ok());
        assert!(check_schema("measure-duality/v2").is_err());
    }

    #[test]
    fn measures_round_trip_through_json() {
        let g = Grid::uniform_1d(8);
        let density: Vec<f64> = (0..8).map(|c| 0.1 * c as f64 - 0.3).collect();
        let mu = DiscreteMeasure::from_density(g.clone(), 1, density)
            .unwrap()
            .with_atom(5, vec![0.625])
            .unwrap();
        let body = MeasureBody::from_measure(&mu);
        let text = serde_json::to_string(&body).unwrap();
        let back: MeasureBody = serde_json::from_str(&text).unwrap();
        let mu2 = back.to_measure().unwrap();
        let panel = crate::measure::default_panel(&g, 1);
        for phi in &panel {
            assert_eq!(mu.weak_star_pair(phi), mu2.weak_star_pair(phi));
        }
        assert_eq!(
            mu.total_variation(Region::All),
            mu2.total_variation(Region::All)
        );
    }

    #[test]
    fn csv_has_stable_columns_and_markers() {
        let rows = vec![ReportRow {
            fixture: "demo".into(),
            f_bar: 0.5,
            r: f64::NEG_INFINITY,
            gap: f64::INFINITY,
            ac_residual: None,
            singular_residual: Some(1e-9),
            verdict: Verdict::Fail,
        }];
        let csv = emit_table(&rows).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "fixture,F_bar,R,gap,ac_residual,singular_residual,verdict"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("demo,5.00000000000e-1,-inf,inf,n-a,"));
        assert!(row.ends_with(",fail"));
        assert!(!csv.contains('\r'));
        assert!(emit_table(&[]).is_err());
    }

    #[test]
    fn sequence_report_csv_has_one_row_per_step() {
        let g = Grid::uniform_1d(8);
        let mu = DiscreteMeasure::from_density(g.clone(), 1, vec![0.5; 8]).unwrap();
        let panel = crate::measure::default_panel(&g, 1);
        let report =
            crate::measure::sequence_diagnostic(&[mu.clone(), mu.clone(), mu.clone()], &mu, &panel)
                .unwrap();
        let csv = sequence_report_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "step,pairing_error,area,total_variation");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,"));
    }

    #[test]
    fn integrand_specs_validate_their_fields() {
        let g = Grid::uniform_1d(2);
        let bad = IntegrandSpec {
            builtin: Some("area".into()),
            gamma: Some(0.5),
            weights: None,
            tabulated: None,
            mollify: None,
            growth_constant: None,
        };
        assert!(bad.to_integrand(&g, 1).is_err());
        let huber = IntegrandSpec {
            builtin: Some("huber".into()),
            gamma: Some(0.5),
            weights: None,
            tabulated: None,
            mollify: None,
            growth_constant: None,
        };
        assert!(huber.to_integrand(&g, 1).is_ok());
    }
}
