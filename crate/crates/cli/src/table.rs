//! Result tables and long-format series, written as RFC 4180 CSV.

use std::path::Path;

use serde::Serialize;

/// One checked or reported quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub parameters: String,
    pub metric: String,
    pub value: f64,
    /// Human-readable acceptance rule, empty for informational rows.
    pub criterion: String,
    pub pass: Option<bool>,
}

/// One point of a plot-ready series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub experiment: String,
    pub series: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub config_hash: String,
    pub rows: Vec<Row>,
    pub series: Vec<SeriesPoint>,
    /// Wall-clock seconds per experiment, kept out of the reproducible columns.
    pub timings: Vec<(String, f64)>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    experiment: &'a str,
    parameters: &'a str,
    metric: &'a str,
    value: String,
    criterion: &'a str,
    pass: &'a str,
    config_hash: &'a str,
    elapsed_s: String,
}

#[derive(Serialize)]
struct CsvPoint<'a> {
    experiment: &'a str,
    series: &'a str,
    x: String,
    y: String,
    config_hash: &'a str,
}

/// Timing column excluded from reproducibility comparisons.
pub const TIMING_COLUMN: &str = "elapsed_s";

fn num(v: f64) -> String {
    format!("{v:.15e}")
}

impl ResultTable {
    pub fn new(config_hash: &str) -> Self {
        Self { config_hash: config_hash.to_string(), ..Self::default() }
    }

    pub fn info(&mut self, experiment: &str, parameters: impl Into<String>, metric: &str, value: f64) {
        self.rows.push(Row {
            experiment: experiment.into(),
            parameters: parameters.into(),
            metric: metric.into(),
            value,
            criterion: String::new(),
            pass: None,
        });
    }

    pub fn check(&mut self, experiment: &str, parameters: impl Into<String>, metric: &str, value: f64, criterion: impl Into<String>, pass: bool) {
        self.rows.push(Row {
            experiment: experiment.into(),
            parameters: parameters.into(),
            metric: metric.into(),
            value,
            criterion: criterion.into(),
            pass: Some(pass && value.is_finite()),
        });
    }

    /// `value <= tol`.
    pub fn at_most(&mut self, experiment: &str, parameters: impl Into<String>, metric: &str, value: f64, tol: f64) {
        self.check(experiment, parameters, metric, value, format!("<= {tol:e}"), value <= tol);
    }

    /// `lo <= value <= hi`.
    pub fn within(&mut self, experiment: &str, parameters: impl Into<String>, metric: &str, value: f64, lo: f64, hi: f64) {
        self.check(experiment, parameters, metric, value, format!("in [{lo}, {hi}]"), (lo..=hi).contains(&value));
    }

    pub fn point(&mut self, experiment: &str, series: &str, x: f64, y: f64) {
        self.series.push(SeriesPoint { experiment: experiment.into(), series: series.into(), x, y });
    }

    pub fn timing(&mut self, experiment: &str, seconds: f64) {
        self.timings.push((experiment.to_string(), seconds));
    }

    pub fn elapsed(&self, experiment: &str) -> Option<f64> {
        self.timings.iter().filter(|(e, _)| e == experiment).map(|(_, t)| *t).reduce(|a, b| a + b)
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass != Some(false))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.pass == Some(false))
    }

    pub fn rows_of<'a>(&'a self, experiment: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.experiment == experiment)
    }

    pub fn append(&mut self, other: ResultTable) {
        self.rows.extend(other.rows);
        self.series.extend(other.series);
        self.timings.extend(other.timings);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            let elapsed = self.elapsed(&r.experiment).map(num).unwrap_or_default();
            w.serialize(CsvRow {
                experiment: &r.experiment,
                parameters: &r.parameters,
                metric: &r.metric,
                value: num(r.value),
                criterion: &r.criterion,
                pass: match r.pass {
                    Some(true) => "true",
                    Some(false) => "false",
                    None => "",
                },
                config_hash: &self.config_hash,
                elapsed_s: elapsed,
            })
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }

    pub fn series_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &self.series {
            w.serialize(CsvPoint { experiment: &p.experiment, series: &p.series, x: num(p.x), y: num(p.y), config_hash: &self.config_hash })
                .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }

    /// Writes `<name>.csv` and `<name>_series.csv` into `dir`.
    pub fn write(&self, dir: &Path, name: &str) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{name}.csv")), self.to_csv())?;
        std::fs::write(dir.join(format!("{name}_series.csv")), self.series_csv())?;
        Ok(())
    }
}

/// The CSV with the timing column removed, for reproducibility comparisons.
pub fn strip_timing(csv_text: &str) -> Result<Vec<Vec<String>>, csv::Error> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = r.headers()?.clone();
    let keep: Vec<usize> = headers.iter().enumerate().filter(|(_, h)| *h != TIMING_COLUMN).map(|(i, _)| i).collect();
    let mut out = vec![keep.iter().map(|&i| headers[i].to_string()).collect()];
    for rec in r.records() {
        let rec = rec?;
        out.push(keep.iter().map(|&i| rec[i].to_string()).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_the_contract_columns() {
        let mut t = ResultTable::new("abc");
        t.at_most("e", "n=1", "defect", 1e-12, 1e-10);
        t.within("e", "", "factor", 3.0, 1.6, 2.6);
        t.info("e", "", "note, with comma", 0.5);
        t.timing("e", 1.25);
        let text = t.to_csv();
        let first = text.lines().next().unwrap();
        assert_eq!(first, "experiment,parameters,metric,value,criterion,pass,config_hash,elapsed_s");
        assert!(text.contains("\"note, with comma\""));
        assert!(!t.all_pass());
        assert_eq!(t.failures().count(), 1);
    }

    #[test]
    fn timing_is_stripped() {
        let mut a = ResultTable::new("h");
        a.info("e", "", "m", 1.0);
        let mut b = a.clone();
        a.timing("e", 1.0);
        b.timing("e", 2.0);
        assert_ne!(a.to_csv(), b.to_csv());
        assert_eq!(strip_timing(&a.to_csv()).unwrap(), strip_timing(&b.to_csv()).unwrap());
    }

    #[test]
    fn non_finite_values_fail() {
        let mut t = ResultTable::new("h");
        t.at_most("e", "", "m", f64::NAN, 1.0);
        assert!(!t.all_pass());
    }
}
