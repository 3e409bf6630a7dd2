use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub property: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(property: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Verdict { property: property.into(), passed, detail: detail.into() }
    }
}

/// One table of results: fixed column order for CSV, objects in JSON.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn objects(&self) -> Vec<BTreeMap<&'static str, Value>> {
        self.rows.iter().map(|r| self.columns.iter().copied().zip(r.iter().cloned()).collect()).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        let err = |e: csv::Error| CliError::runtime(format!("csv: {e}"));
        out.write_record(&self.columns).map_err(err)?;
        for r in &self.rows {
            out.write_record(r.iter().map(|v| match v {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            }))
            .map_err(err)?;
        }
        out.flush().map_err(|e| CliError::runtime(format!("csv: {e}")))
    }
}

#[derive(Debug)]
pub struct Report {
    pub experiment: String,
    pub preset: Option<String>,
    pub config: RunConfig,
    pub checkpoints: Table,
    pub verdicts: Vec<Verdict>,
    pub tolerances: BTreeMap<String, f64>,
    /// Command-specific payload such as a derivation tree.
    pub data: Option<Value>,
}

#[derive(Serialize)]
struct Json<'a> {
    experiment: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<&'a str>,
    config_echo: &'a RunConfig,
    checkpoints: Vec<BTreeMap<&'static str, Value>>,
    verdicts: &'a [Verdict],
    tolerances: &'a BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    data: Option<&'a Value>,
}

impl Report {
    pub fn new(experiment: &str, config: &RunConfig, checkpoints: Table) -> Self {
        Report {
            experiment: experiment.into(),
            preset: None,
            config: config.clone(),
            checkpoints,
            verdicts: Vec::new(),
            tolerances: BTreeMap::new(),
            data: None,
        }
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.into(), value);
    }

    pub fn to_json(&self) -> String {
        let j = Json {
            experiment: &self.experiment,
            preset: self.preset.as_deref(),
            config_echo: &self.config,
            checkpoints: self.checkpoints.objects(),
            verdicts: &self.verdicts,
            tolerances: &self.tolerances,
            data: self.data.as_ref(),
        };
        serde_json::to_string_pretty(&j).expect("report serializes") + "\n"
    }

    /// Writes `<dir>/<experiment>.json` and `<dir>/<experiment>.csv`.
    pub fn write_to(&self, dir: &Path) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::runtime(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(dir.join(format!("{}.json", self.experiment)), self.to_json()).map_err(io)?;
        let f = std::fs::File::create(dir.join(format!("{}.csv", self.experiment))).map_err(io)?;
        self.checkpoints.write_csv(std::io::BufWriter::new(f))
    }

    /// One line per verdict.
    pub fn summary(&self) -> String {
        self.verdicts
            .iter()
            .map(|v| format!("{} {}: {}\n", if v.passed { "PASS" } else { "FAIL" }, v.property, v.detail))
            .collect()
    }
}
