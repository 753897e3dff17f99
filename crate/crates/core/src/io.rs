//! CSV ingestion of empirical series, experiment files and run manifests.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::ExperimentGrid;
use crate::sample::RegressionSample;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Monthly,
    Quarterly,
    Yearly,
}

impl std::str::FromStr for Frequency {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monthly" => Ok(Frequency::Monthly),
            "quarterly" => Ok(Frequency::Quarterly),
            "yearly" | "annual" => Ok(Frequency::Yearly),
            other => Err(Error::Config(format!("unknown frequency `{other}` (monthly|quarterly|yearly)"))),
        }
    }
}

/// Column names to read, and the minimum number of rows accepted.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvSchema {
    pub date_col: String,
    pub y_col: String,
    pub x_col: String,
    pub min_rows: usize,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            date_col: "date".into(),
            y_col: "y".into(),
            x_col: "x".into(),
            min_rows: 10,
        }
    }
}

/// One row per date: the return `y_t` realized over the period ending at
/// that date and the predictor level `x_t` observed at it. The return of
/// the first row may be missing since it is never used.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalDataset {
    pub dates: Vec<String>,
    pub y: Vec<Option<f64>>,
    pub x: Vec<f64>,
    pub frequency: Option<Frequency>,
}

impl EmpiricalDataset {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Pairs `y_t` with `x_{t-1}` for `t = 1..n-1` and keeps every level.
    pub fn to_sample(&self) -> Result<RegressionSample> {
        let y: Vec<f64> = self.y[1..].iter().map(|v| v.expect("checked at parse time")).collect();
        RegressionSample::with_levels(y, self.x.clone())
    }

    /// Write the dataset back as CSV with full float precision.
    pub fn write_csv<W: Write>(&self, schema: &CsvSchema, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record([&schema.date_col, &schema.y_col, &schema.x_col])
            .map_err(io)?;
        for i in 0..self.len() {
            let y = self.y[i].map(|v| v.to_string()).unwrap_or_default();
            out.write_record([self.dates[i].clone(), y, self.x[i].to_string()])
                .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Numeric labels compare as numbers, anything else (ISO dates) as text.
fn date_after(next: &str, prev: &str) -> bool {
    match (next.parse::<f64>(), prev.parse::<f64>()) {
        (Ok(a), Ok(b)) => a > b,
        _ => next > prev,
    }
}

fn parse_field(raw: &str, row: usize, column: &str) -> Result<Option<f64>> {
    let s = raw.trim();
    if s.is_empty() {
        return Ok(None);
    }
    let v: f64 = s.parse().map_err(|_| Error::Parse {
        row,
        column: column.to_string(),
        message: format!("`{s}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            column: column.to_string(),
            message: format!("`{s}` is not finite"),
        });
    }
    Ok(Some(v))
}

/// Parse from any reader. Row numbers in errors count data rows from 1.
pub fn parse_csv_reader<R: Read>(reader: R, schema: &CsvSchema) -> Result<EmpiricalDataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Io(e.to_string()))?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Config(format!(
                "column `{name}` not found; available columns: {}",
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
    };
    let (di, yi, xi) = (find(&schema.date_col)?, find(&schema.y_col)?, find(&schema.x_col)?);

    let mut dates: Vec<String> = Vec::new();
    let mut y = Vec::new();
    let mut x = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        let get = |j: usize| rec.get(j).unwrap_or("");
        let date = get(di).to_string();
        if date.is_empty() {
            return Err(Error::Parse {
                row,
                column: schema.date_col.clone(),
                message: "missing date".into(),
            });
        }
        let yv = parse_field(get(yi), row, &schema.y_col)?;
        if yv.is_none() && row > 1 {
            return Err(Error::Parse {
                row,
                column: schema.y_col.clone(),
                message: "missing value".into(),
            });
        }
        let xv = parse_field(get(xi), row, &schema.x_col)?.ok_or_else(|| Error::Parse {
            row,
            column: schema.x_col.clone(),
            message: "missing value".into(),
        })?;
        if let Some(prev) = dates.last() {
            if !date_after(&date, prev) {
                return Err(Error::Parse {
                    row,
                    column: schema.date_col.clone(),
                    message: format!("dates must be strictly increasing (`{date}` after `{prev}`)"),
                });
            }
        }
        dates.push(date);
        y.push(yv);
        x.push(xv);
    }
    let required = schema.min_rows.max(3);
    if dates.len() < required {
        return Err(Error::InsufficientData {
            found: dates.len(),
            required,
        });
    }
    Ok(EmpiricalDataset {
        dates,
        y,
        x,
        frequency: None,
    })
}

pub fn parse_csv(path: &Path, schema: &CsvSchema) -> Result<EmpiricalDataset> {
    let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_csv_reader(f, schema)
}

/// Everything needed to rerun a table bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub experiment: ExperimentGrid,
}

impl RunManifest {
    pub fn new(experiment: ExperimentGrid) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            experiment,
        }
    }
}

/// Parse an experiment file. A run manifest is accepted too, in which case
/// its embedded experiment is returned. The grid is validated.
pub fn parse_experiment(text: &str) -> Result<ExperimentGrid> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
    let is_manifest = value.get("experiment").is_some() && value.get("tool").is_some();
    let grid = if is_manifest {
        serde_json::from_value::<RunManifest>(value)
            .map_err(|e| Error::Config(format!("manifest: {e}")))?
            .experiment
    } else {
        serde_json::from_value::<ExperimentGrid>(value).map_err(|e| Error::Config(format!("experiment file: {e}")))?
    };
    grid.validate()?;
    Ok(grid)
}

pub fn load_experiment(path: &Path) -> Result<ExperimentGrid> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_experiment(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema(min_rows: usize) -> CsvSchema {
        CsvSchema {
            min_rows,
            ..CsvSchema::default()
        }
    }

    #[test]
    fn three_rows() {
        let text = "date,y,x\n2000-01,0.1,1.5\n2000-02,0.2,1.6\n2000-03,-0.1,1.4\n";
        let d = parse_csv_reader(text.as_bytes(), &schema(3)).unwrap();
        assert_eq!(d.len(), 3);
        assert!(matches!(
            parse_csv_reader(text.as_bytes(), &schema(10)),
            Err(Error::InsufficientData { found: 3, required: 10 })
        ));
    }

    #[test]
    fn lag_alignment() {
        let text = "date,y,x\n0,,10\n1,1,11\n2,2,12\n3,3,13\n";
        let d = parse_csv_reader(text.as_bytes(), &schema(3)).unwrap();
        let s = d.to_sample().unwrap();
        assert_eq!(s.y(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.x().unwrap(), &[10.0, 11.0, 12.0]);
        assert_eq!(s.x_level().unwrap(), &[10.0, 11.0, 12.0, 13.0]);
    }

    #[test]
    fn blank_cell_names_row() {
        let text = "date,y,x\n1,0.1,1\n2,0.2,\n3,0.3,2\n";
        let err = parse_csv_reader(text.as_bytes(), &schema(3)).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                row: 2,
                column: "x".into(),
                message: "missing value".into()
            }
        );
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn malformed_and_unordered() {
        let bad = "date,y,x\n1,0.1,1\n2,abc,2\n3,0.3,2\n";
        assert!(matches!(
            parse_csv_reader(bad.as_bytes(), &schema(3)),
            Err(Error::Parse { row: 2, .. })
        ));
        let unordered = "date,y,x\n2,0.1,1\n1,0.2,2\n3,0.3,2\n";
        assert!(matches!(
            parse_csv_reader(unordered.as_bytes(), &schema(3)),
            Err(Error::Parse { row: 2, .. })
        ));
        let numeric = "date,y,x\n9,0.1,1\n10,0.2,2\n11,0.3,2\n";
        assert!(parse_csv_reader(numeric.as_bytes(), &schema(3)).is_ok());
        let missing_col = "date,ret,x\n1,0.1,1\n";
        assert!(matches!(
            parse_csv_reader(missing_col.as_bytes(), &schema(3)),
            Err(Error::Config(m)) if m.contains("`y`")
        ));
    }

    #[test]
    fn round_trip_full_precision() {
        let text = "date,y,x\n1,,0.1\n2,0.30000000000000004,-1e-300\n3,3.141592653589793,2.718281828459045\n";
        let d = parse_csv_reader(text.as_bytes(), &schema(3)).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&schema(3), &mut buf).unwrap();
        let again = parse_csv_reader(buf.as_slice(), &schema(3)).unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = r#"{"dgp_kind":"continuous","beta_values":[0],"kappa_values":[0],"T_values":[5],
            "vol_modl":["CNST"],"methods":[{"test":"hybrid"}]}"#;
        let err = parse_experiment(text).unwrap_err().to_string();
        assert!(err.contains("vol_modl"), "{err}");
    }

    #[test]
    fn manifest_round_trip() {
        let text = r#"{"dgp_kind":"continuous","beta_values":[0],"kappa_values":[0],"T_values":[5],
            "vol_models":["CNST"],"methods":[{"test":"tq","q":8},{"test":"hybrid"}],"n_reps":10}"#;
        let grid = parse_experiment(text).unwrap();
        let manifest = serde_json::to_string_pretty(&RunManifest::new(grid.clone())).unwrap();
        assert_eq!(parse_experiment(&manifest).unwrap(), grid);
    }
}
