use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// One asserted inequality `measured ≤ bound`, aggregated over rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub count: usize,
    pub failures: usize,
    /// Largest `measured / bound` seen.
    pub worst_ratio: f64,
}

impl Check {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string(), count: 0, failures: 0, worst_ratio: 0.0 }
    }

    pub fn record(&mut self, measured: f64, bound: f64) {
        self.count += 1;
        let ok = measured <= bound;
        if !ok {
            self.failures += 1;
        }
        let ratio = if bound > 0.0 {
            measured / bound
        } else if ok {
            0.0
        } else {
            f64::INFINITY
        };
        if ratio.is_nan() || ratio > self.worst_ratio {
            self.worst_ratio = ratio;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Which columns an SVG rendering plots, and the guide line slope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub x: String,
    pub y: String,
    pub slope: Option<f64>,
}

/// Tabulated experiment output.
///
/// Rows are in canonical order, so a report is fully determined by the
/// configuration that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub id: String,
    pub seed: u64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Map<String, Value>,
    pub checks: Vec<Check>,
    pub plot: Option<PlotSpec>,
}

impl ExperimentReport {
    pub fn new(id: &str, seed: u64, columns: &[&str]) -> Self {
        Self {
            id: id.to_string(),
            seed,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Map::new(),
            checks: Vec::new(),
            plot: None,
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn meta<V: Into<Value>>(&mut self, key: &str, value: V) {
        self.metadata.insert(key.to_string(), value.into());
    }

    /// Real-valued metadata entry; non-finite values are stored as strings.
    pub fn meta_f64(&mut self, key: &str, value: f64) {
        self.metadata.insert(key.to_string(), float_json(value));
    }

    pub fn with_plot(mut self, x: &str, y: &str, slope: Option<f64>) -> Self {
        self.plot = Some(PlotSpec { x: x.to_string(), y: y.to_string(), slope });
        self
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn violations(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"meta": {...}, "rows": [{column: value, ...}, ...]}`; non-finite
    /// values are written as the strings `"inf"`, `"-inf"` and `"NaN"`.
    pub fn to_json_value(&self) -> Value {
        let mut meta = Map::new();
        meta.insert("id".into(), Value::from(self.id.clone()));
        meta.insert("seed".into(), Value::from(self.seed));
        meta.insert("columns".into(), serde_json::to_value(&self.columns).expect("strings"));
        meta.insert("metadata".into(), Value::Object(self.metadata.clone()));
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("name".into(), Value::from(c.name.clone()));
                m.insert("count".into(), Value::from(c.count));
                m.insert("failures".into(), Value::from(c.failures));
                m.insert("worst_ratio".into(), float_json(c.worst_ratio));
                Value::Object(m)
            })
            .collect();
        meta.insert("checks".into(), Value::Array(checks));
        meta.insert("plot".into(), serde_json::to_value(&self.plot).expect("plot spec"));
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(self.columns.iter().cloned().zip(r.iter().map(|v| float_json(*v))).collect())
            })
            .collect();
        let mut root = Map::new();
        root.insert("meta".into(), Value::Object(meta));
        root.insert("rows".into(), Value::Array(rows));
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("finite JSON tree");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text)?;
        let bad = |what: &str| Error::Parse(format!("report JSON: {what}"));
        let meta = root.get("meta").and_then(Value::as_object).ok_or_else(|| bad("missing meta"))?;
        let id = meta.get("id").and_then(Value::as_str).ok_or_else(|| bad("missing id"))?;
        let seed = meta.get("seed").and_then(Value::as_u64).ok_or_else(|| bad("missing seed"))?;
        let columns: Vec<String> =
            serde_json::from_value(meta.get("columns").cloned().ok_or_else(|| bad("missing columns"))?)?;
        let metadata = meta
            .get("metadata")
            .and_then(Value::as_object)
            .cloned()
            .ok_or_else(|| bad("missing metadata"))?;
        let mut checks = Vec::new();
        for c in meta.get("checks").and_then(Value::as_array).ok_or_else(|| bad("missing checks"))? {
            checks.push(Check {
                name: c.get("name").and_then(Value::as_str).ok_or_else(|| bad("check name"))?.to_string(),
                count: c.get("count").and_then(Value::as_u64).ok_or_else(|| bad("check count"))? as usize,
                failures: c.get("failures").and_then(Value::as_u64).ok_or_else(|| bad("check failures"))? as usize,
                worst_ratio: parse_float(c.get("worst_ratio").ok_or_else(|| bad("check ratio"))?)?,
            });
        }
        let plot: Option<PlotSpec> = serde_json::from_value(meta.get("plot").cloned().unwrap_or(Value::Null))?;
        let mut rows = Vec::new();
        for r in root.get("rows").and_then(Value::as_array).ok_or_else(|| bad("missing rows"))? {
            let obj = r.as_object().ok_or_else(|| bad("row is not an object"))?;
            let row = columns
                .iter()
                .map(|c| parse_float(obj.get(c).ok_or_else(|| bad(&format!("row lacks `{c}`")))?))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { id: id.to_string(), seed, columns, rows, metadata, checks, plot })
    }
}

/// JSON number, or `"inf"`, `"-inf"`, `"NaN"` for non-finite values.
pub fn float_json(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v.is_nan() {
        Value::from("NaN")
    } else if v > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

fn parse_float(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("number {n}"))),
        Value::String(s) => s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}"))),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_aggregate() {
        let mut c = Check::new("x");
        c.record(1.0, 2.0);
        c.record(0.0, 0.0);
        assert!(c.passed());
        assert_eq!(c.worst_ratio, 0.5);
        c.record(3.0, 2.0);
        assert!(!c.passed());
        assert_eq!((c.count, c.failures, c.worst_ratio), (3, 1, 1.5));
    }

    #[test]
    fn json_round_trip_with_non_finite_values() {
        let mut r = ExperimentReport::new("demo", 7, &["a", "b"]).with_plot("a", "b", Some(0.5));
        r.push_row(vec![1.0, f64::INFINITY]);
        r.push_row(vec![0.1 + 0.2, -0.0]);
        r.meta("dims", vec![2, 4]);
        r.meta_f64("c", f64::NAN);
        let mut c = Check::new("bound");
        c.record(1.0, 3.0);
        r.checks.push(c);
        let text = r.to_json();
        let back = ExperimentReport::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.rows[0][1], f64::INFINITY);
        assert_eq!(back.rows[1][0], 0.1 + 0.2);
        assert_eq!(r.to_csv(), "a,b\n1.0,inf\n0.30000000000000004,-0.0\n");
    }
}
