use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use super::{CliError, Outcome, RunConfig};

/// Column-oriented CSV payload; numbers use the shortest round-trip form.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self { columns: columns.iter().map(|(n, u)| (n.to_string(), u.to_string())).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| fmt_num(v)).collect());
    }

    pub fn push_text(&mut self, values: Vec<String>) {
        self.rows.push(values);
    }

    fn units_comment(&self) -> String {
        let cols: Vec<String> = self
            .columns
            .iter()
            .map(|(n, u)| if u.is_empty() { n.clone() } else { format!("{n} [{u}]") })
            .collect();
        format!("# columns: {}\n", cols.join(", "))
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|(n, _)| n.as_str())).map_err(io_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(io_err)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Config(e.to_string()))?)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(self.units_comment() + &body)
    }
}

/// Shortest round-trip text; scientific outside [1e-4, 1e7).
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !v.is_finite() || (1e-4..1e7).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("output: {e}"))
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Manifest {
    /// Defaults the command filled in.
    pub resolved: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, Value>,
    pub results: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn resolve(&mut self, key: &str, v: impl Serialize) {
        self.resolved.insert(key.into(), json(v));
    }

    pub fn tolerance(&mut self, key: &str, v: impl Serialize) {
        self.tolerances.insert(key.into(), json(v));
    }

    pub fn result(&mut self, key: &str, v: impl Serialize) {
        self.results.insert(key.into(), json(v));
    }
}

fn json(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub(super) fn write_artifacts(dir: &Path, name: &str, outcome: &Outcome, cfg: &RunConfig, gnuplot: bool) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(format!("{}: {e}", dir.display())))?;
    let csv_name = format!("{name}.csv");
    let mut outputs = vec![csv_name.clone(), format!("{name}.json")];
    std::fs::write(dir.join(&csv_name), outcome.table.to_csv()?).map_err(io_err)?;
    if gnuplot {
        let script = gnuplot_script(&csv_name, &outcome.table);
        outputs.push(format!("{name}.gp"));
        std::fs::write(dir.join(format!("{name}.gp")), script).map_err(io_err)?;
    }
    let m = &outcome.manifest;
    let doc = serde_json::json!({
        "command": name,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "resolved": m.resolved,
        "tolerances": m.tolerances,
        "results": m.results,
        "warnings": m.warnings,
        "outputs": outputs,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(io_err)? + "\n";
    std::fs::write(dir.join(format!("{name}.json")), text).map_err(io_err)
}

fn gnuplot_script(csv_name: &str, table: &Table) -> String {
    let numeric = table.rows.first().map_or(false, |r| r.iter().all(|v| v.parse::<f64>().is_ok()));
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    if let Some((x, u)) = table.columns.first() {
        s += &format!("set xlabel '{x}{}'\n", if u.is_empty() { String::new() } else { format!(" [{u}]") });
    }
    if !numeric || table.columns.len() < 2 {
        s += &format!("# '{csv_name}' is not a plottable numeric table\n");
        return s;
    }
    let curves: Vec<String> = (2..=table.columns.len())
        .map(|c| if c == 2 { format!("'{csv_name}' using 1:{c} with lines") } else { format!("'' using 1:{c} with lines") })
        .collect();
    s + "plot " + &curves.join(", \\\n     ") + "\npause -1\n"
}
