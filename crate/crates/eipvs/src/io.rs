//! Dataset ingestion and result emission.
//!
//! Series datasets use the de facto one-line-per-series text layout: a class
//! label followed by the sample values, separated by commas or whitespace.
//! Timestamps are the 1-based sample indices. Sequence corpora hold one
//! whitespace-tokenized sequence per line with an optional `label<TAB>`
//! prefix.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{ConfusionMatrix, NuSelection, TimingRow};
use crate::seq::SymbolSequence;
use crate::series::{LabeledDataset, Split, TimeSeries};

/// Options for the series-file loader.
#[derive(Debug, Clone)]
pub struct UcrOptions {
    /// Replacement for exact-zero values, which the space excludes.
    pub epsilon: f64,
    /// Accept rows of differing lengths.
    pub variable_length: bool,
    pub name: String,
    pub split: Split,
}

impl Default for UcrOptions {
    fn default() -> Self {
        Self {
            epsilon: f64::EPSILON,
            variable_length: false,
            name: "dataset".into(),
            split: Split::Train,
        }
    }
}

/// A loaded dataset plus how many zero values were repaired.
#[derive(Debug, Clone)]
pub struct UcrLoadReport {
    pub dataset: LabeledDataset<TimeSeries>,
    pub zero_repairs: usize,
}

/// Parses label + values rows from text.
pub fn parse_ucr(text: &str, opts: &UcrOptions) -> Result<UcrLoadReport> {
    let mut entries = Vec::new();
    let mut zero_repairs = 0usize;
    let mut expected_len: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty());
        let label = fields
            .next()
            .ok_or_else(|| Error::Parse { line: lineno + 1, message: "missing label".into() })?
            .to_string();
        let mut values = Vec::new();
        for f in fields {
            let v: f64 = f.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("unparseable number {f:?}"),
            })?;
            if v == 0.0 {
                zero_repairs += 1;
                values.push(opts.epsilon);
            } else {
                values.push(v);
            }
        }
        if values.is_empty() {
            return Err(Error::Parse { line: lineno + 1, message: "row has no values".into() });
        }
        match expected_len {
            None => expected_len = Some(values.len()),
            Some(n) if n != values.len() && !opts.variable_length => {
                return Err(Error::RaggedRows { line: lineno + 1, got: values.len(), expected: n });
            }
            _ => {}
        }
        entries.push((TimeSeries::univariate(values)?, label));
    }
    if entries.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(UcrLoadReport {
        dataset: LabeledDataset::new(opts.name.clone(), opts.split, entries),
        zero_repairs,
    })
}

/// Loads a label + values series file.
pub fn load_ucr(path: impl AsRef<Path>, opts: &UcrOptions) -> Result<UcrLoadReport> {
    parse_ucr(&fs::read_to_string(path)?, opts)
}

/// Parses a sequence corpus: one sequence per line, whitespace-separated
/// tokens, optional leading `label<TAB>`.
pub fn parse_corpus(text: &str, name: &str, split: Split) -> Result<LabeledDataset<SymbolSequence>> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.trim().is_empty() {
            continue;
        }
        let (label, body) = match line.split_once('\t') {
            Some((l, rest)) => (l.to_string(), rest),
            None => (String::new(), line),
        };
        let seq = SymbolSequence::parse(body)?;
        if seq.is_empty() {
            return Err(Error::Parse { line: lineno + 1, message: "empty sequence".into() });
        }
        entries.push((seq, label));
    }
    if entries.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(LabeledDataset::new(name, split, entries))
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<LabeledDataset<SymbolSequence>> {
    let name = path.as_ref().display().to_string();
    parse_corpus(&fs::read_to_string(&path)?, &name, Split::Train)
}

/// Loads a single unlabeled series: every comma- or whitespace-separated
/// number in the file, in order, with index timestamps. Zero values are
/// replaced by `epsilon`.
pub fn load_values(path: impl AsRef<Path>, epsilon: f64) -> Result<TimeSeries> {
    let text = fs::read_to_string(path)?;
    let values: std::result::Result<Vec<f64>, _> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|f| !f.is_empty())
        .map(str::parse::<f64>)
        .collect();
    let values = values.map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let values = values.into_iter().map(|v| if v == 0.0 { epsilon } else { v }).collect();
    TimeSeries::univariate(values)
}

/// Output encoding for CLI results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidParams(format!("unknown format {other:?}"))),
        }
    }
}

/// Classification run summary.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct KnnRunReport {
    pub dataset: String,
    pub distance: String,
    pub selection: Option<NuSelection>,
    pub test_error: f64,
    pub confusion: ConfusionMatrix,
}

impl KnnRunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("dataset,distance,selected_nu,loo_error,test_error\n");
        let (nu, loo) = match &self.selection {
            Some(s) => (format!("{}", s.nu), format!("{}", s.loo_error)),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            self.dataset, self.distance, nu, loo, self.test_error
        ));
        out.push_str("confusion,true,predicted,count\n");
        for (i, row) in self.confusion.counts.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                out.push_str(&format!(
                    "confusion,{},{},{}\n",
                    self.confusion.labels[i], self.confusion.labels[j], c
                ));
            }
        }
        out
    }
}

pub fn timing_rows_to_csv(rows: &[TimingRow]) -> String {
    let mut out = String::from("distance,length,seconds\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.distance, r.length, r.seconds));
    }
    out
}

pub fn timing_rows_to_json(rows: &[TimingRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

/// Writes a labeled series dataset in the one-line-per-series text layout.
pub fn format_ucr(dataset: &LabeledDataset<TimeSeries>) -> String {
    let mut out = String::new();
    for (series, label) in dataset.iter() {
        out.push_str(label);
        for v in series.values() {
            out.push(',');
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    out
}

/// Writes an orthogonal family as CSV rows `series,timestamp,value`.
pub fn format_family_csv(family: &[TimeSeries]) -> String {
    let mut out = String::from("series,timestamp,value\n");
    for (k, s) in family.iter().enumerate() {
        for i in 0..s.len() {
            for c in 0..s.dim() {
                out.push_str(&format!("{},{},{}\n", k, s.timestamp(i), s.value(i)[c]));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_basic_row() {
        let report = parse_ucr("1,0.5,0.7\n", &UcrOptions::default()).unwrap();
        assert_eq!(report.dataset.len(), 1);
        assert_eq!(report.dataset.label(0), "1");
        let s = report.dataset.item(0);
        assert_eq!(s.values(), &[0.5, 0.7]);
        assert_eq!(s.timestamps(), &[1.0, 2.0]);
        assert_eq!(report.zero_repairs, 0);
    }

    #[test]
    fn whitespace_and_commas_both_split() {
        let report = parse_ucr("a 1.0\t2.0\nb,3.0,4.0\n", &UcrOptions::default()).unwrap();
        assert_eq!(report.dataset.len(), 2);
        assert_eq!(report.dataset.item(1).values(), &[3.0, 4.0]);
    }

    #[test]
    fn zero_values_repaired_and_counted() {
        let report = parse_ucr("1,0.0,2.0,0\n", &UcrOptions::default()).unwrap();
        assert_eq!(report.zero_repairs, 2);
        assert_eq!(report.dataset.item(0).value(0), &[f64::EPSILON]);
    }

    #[test]
    fn ragged_rows_rejected_unless_flagged() {
        let text = "1,1.0,2.0\n2,3.0\n";
        assert!(matches!(
            parse_ucr(text, &UcrOptions::default()),
            Err(Error::RaggedRows { line: 2, got: 1, expected: 2 })
        ));
        let opts = UcrOptions { variable_length: true, ..Default::default() };
        let report = parse_ucr(text, &opts).unwrap();
        assert_eq!(report.dataset.len(), 2);
    }

    #[test]
    fn unparseable_number_is_an_error() {
        assert!(matches!(
            parse_ucr("1,abc\n", &UcrOptions::default()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(parse_ucr("", &UcrOptions::default()), Err(Error::EmptyDataset)));
        assert!(matches!(parse_ucr("\n\n", &UcrOptions::default()), Err(Error::EmptyDataset)));
    }

    #[test]
    fn ucr_round_trip() {
        let report = parse_ucr("1,0.5,0.7\n2,1.5,-2.5\n", &UcrOptions::default()).unwrap();
        let text = format_ucr(&report.dataset);
        let again = parse_ucr(&text, &UcrOptions::default()).unwrap();
        for i in 0..report.dataset.len() {
            assert_eq!(report.dataset.item(i), again.dataset.item(i));
            assert_eq!(report.dataset.label(i), again.dataset.label(i));
        }
    }

    #[test]
    fn corpus_with_and_without_labels() {
        let c = parse_corpus("pos\ta b a\nb b\n", "c", Split::Train).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.label(0), "pos");
        assert_eq!(c.item(0).tokens(), &["a", "b", "a"]);
        assert_eq!(c.label(1), "");
        assert_eq!(c.item(1).tokens(), &["b", "b"]);
    }

    #[test]
    fn json_and_csv_encode_identical_values() {
        let report = KnnRunReport {
            dataset: "toy".into(),
            distance: "eip".into(),
            selection: Some(NuSelection { nu: 0.1, loo_error: 0.125 }),
            test_error: 0.25,
            confusion: ConfusionMatrix {
                labels: vec!["a".into(), "b".into()],
                counts: vec![vec![3, 1], vec![0, 4]],
            },
        };
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["test_error"].as_f64().unwrap(), 0.25);
        assert_eq!(json["selection"]["nu"].as_f64().unwrap(), 0.1);
        let csv = report.to_csv();
        let data_line = csv.lines().nth(1).unwrap();
        let fields: Vec<&str> = data_line.split(',').collect();
        assert_eq!(fields[2].parse::<f64>().unwrap(), 0.1);
        assert_eq!(fields[4].parse::<f64>().unwrap(), 0.25);
        assert!(csv.contains("confusion,a,b,1"));
    }

    #[test]
    fn timing_csv_columns() {
        let rows = vec![TimingRow { distance: "ed".into(), length: 10, seconds: 0.5 }];
        let csv = timing_rows_to_csv(&rows);
        assert_eq!(csv, "distance,length,seconds\ned,10,0.5\n");
        let json: serde_json::Value = serde_json::from_str(&timing_rows_to_json(&rows)).unwrap();
        assert_eq!(json[0]["seconds"].as_f64().unwrap(), 0.5);
    }
}
