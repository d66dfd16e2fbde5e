//! Binary nearest-neighbor diagnosis over labeled feature vectors.
//!
//! For a query f, d₀ and d₁ are the smallest dissimilarities to the class-0
//! and class-1 records; the smaller side wins. An exact tie removes both
//! minimizing records and recomputes, as many rounds as needed.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::signal::{dissimilarity_f, sq_distance, Signal, SignalError};

/// |d₀ − d₁| at or below this is an exact tie.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("csv: {0}")]
    Csv(String),
    #[error("row {row}: expected {expected} fields, got {got}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("row {row}, column {column}: {value:?} is not a number")]
    BadNumber {
        row: usize,
        column: usize,
        value: String,
    },
    #[error("row {row}: feature {value} outside [{lo}, {hi}]")]
    OutOfRange {
        row: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("row {row}: unknown label {value:?} (expected 0 or 1)")]
    BadLabel { row: usize, value: String },
    #[error("dataset has no records")]
    EmptyDataset,
    #[error("class {0} has no records")]
    EmptyClass(u8),
    #[error("classes exhausted after {0} tie-resolution rounds")]
    ClassesExhausted(usize),
}

/// Which dissimilarity drives the nearest-neighbor comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// F[f,g] = ‖f‖‖g‖ − |⟨f,g⟩|.
    F,
    /// ‖f − g‖².
    SqNorm,
}

impl Metric {
    fn eval(self, f: &Signal, g: &Signal) -> Result<f64, SignalError> {
        match self {
            Metric::F => dissimilarity_f(f, g),
            Metric::SqNorm => sq_distance(f, g),
        }
    }
}

/// Feature vectors with binary labels.
#[derive(Clone, Debug)]
pub struct LabeledDataset {
    dim: usize,
    records: Vec<(Signal, u8)>,
    feature_names: Option<Vec<String>>,
}

impl LabeledDataset {
    pub fn new(records: Vec<(Signal, u8)>) -> Result<Self, DatasetError> {
        let dim = records.first().ok_or(DatasetError::EmptyDataset)?.0.dim();
        for (f, _) in &records {
            if f.dim() != dim {
                return Err(SignalError::DimensionMismatch(dim, f.dim()).into());
            }
        }
        Ok(Self {
            dim,
            records,
            feature_names: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn records(&self) -> &[(Signal, u8)] {
        &self.records
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn class_count(&self, label: u8) -> usize {
        self.records.iter().filter(|(_, l)| *l == label).count()
    }

    /// A copy with every record scaled to unit norm (zero records are kept
    /// as they are). Normalization is opt-in; raw feature scales are the
    /// default.
    pub fn normalized(&self) -> Self {
        let records = self
            .records
            .iter()
            .map(|(f, l)| (f.normalized().unwrap_or_else(|_| f.clone()), *l))
            .collect();
        Self {
            dim: self.dim,
            records,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Load a headered CSV whose last column is the 0/1 label.
    ///
    /// `range_check` optionally enforces a feature range (the symptom scale
    /// is 0..=10). Errors carry 1-based data row numbers.
    pub fn load_csv(path: &Path, range_check: Option<(f64, f64)>) -> Result<Self, DatasetError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_path(path)
            .map_err(|e| DatasetError::Csv(e.to_string()))?;
        let headers = reader
            .headers()
            .map_err(|e| DatasetError::Csv(e.to_string()))?
            .clone();
        if headers.len() < 2 {
            return Err(DatasetError::Csv(
                "need at least one feature column and a label column".into(),
            ));
        }
        let dim = headers.len() - 1;
        let feature_names: Vec<String> = headers.iter().take(dim).map(String::from).collect();

        let mut records = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let row = row.map_err(|e| DatasetError::Csv(e.to_string()))?;
            let row_no = i + 1;
            if row.len() != dim + 1 {
                return Err(DatasetError::RaggedRow {
                    row: row_no,
                    expected: dim + 1,
                    got: row.len(),
                });
            }
            let mut entries = Vec::with_capacity(dim);
            for (column, field) in row.iter().take(dim).enumerate() {
                let value: f64 = field.trim().parse().map_err(|_| DatasetError::BadNumber {
                    row: row_no,
                    column: column + 1,
                    value: field.to_string(),
                })?;
                if let Some((lo, hi)) = range_check {
                    if !(lo..=hi).contains(&value) {
                        return Err(DatasetError::OutOfRange {
                            row: row_no,
                            value,
                            lo,
                            hi,
                        });
                    }
                }
                entries.push(value);
            }
            let label_field = row.get(dim).unwrap().trim();
            let label = match label_field {
                "0" => 0,
                "1" => 1,
                _ => {
                    return Err(DatasetError::BadLabel {
                        row: row_no,
                        value: label_field.to_string(),
                    })
                }
            };
            records.push((Signal::new(entries)?, label));
        }

        let mut ds = Self::new(records)?;
        ds.feature_names = Some(feature_names);
        Ok(ds)
    }
}

/// The outcome of one diagnosis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnosis {
    pub label: u8,
    pub d0: f64,
    pub d1: f64,
    pub tie_rounds: usize,
}

/// Smallest metric value to any surviving record of the class, with the
/// index of the minimizer (first index wins ties, so the reduction is
/// deterministic under any evaluation order).
fn class_min(
    records: &[(Signal, u8)],
    alive: &[bool],
    label: u8,
    f_new: &Signal,
    metric: Metric,
) -> Result<Option<(usize, f64)>, DatasetError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, (g, l)) in records.iter().enumerate() {
        if *l != label || !alive[i] {
            continue;
        }
        let d = metric.eval(f_new, g)?;
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    Ok(best)
}

/// Classify a query against both classes, applying the remove-and-recompute
/// rule on exact ties (|d₀ − d₁| ≤ [`TIE_TOL`]).
pub fn diagnose(
    ds: &LabeledDataset,
    f_new: &Signal,
    metric: Metric,
) -> Result<Diagnosis, DatasetError> {
    if f_new.dim() != ds.dim() {
        return Err(SignalError::DimensionMismatch(ds.dim(), f_new.dim()).into());
    }
    for label in [0u8, 1u8] {
        if ds.class_count(label) == 0 {
            return Err(DatasetError::EmptyClass(label));
        }
    }

    let mut alive = vec![true; ds.records().len()];
    let mut tie_rounds = 0;
    loop {
        let m0 = class_min(ds.records(), &alive, 0, f_new, metric)?;
        let m1 = class_min(ds.records(), &alive, 1, f_new, metric)?;
        let ((i0, d0), (i1, d1)) = match (m0, m1) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(DatasetError::ClassesExhausted(tie_rounds)),
        };
        if (d0 - d1).abs() > TIE_TOL {
            let label = if d0 < d1 { 0 } else { 1 };
            return Ok(Diagnosis {
                label,
                d0,
                d1,
                tie_rounds,
            });
        }
        alive[i0] = false;
        alive[i1] = false;
        tie_rounds += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::io::Write;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec()).unwrap()
    }

    fn two_point_dataset() -> LabeledDataset {
        LabeledDataset::new(vec![(sig(&[1.0, 0.0]), 0), (sig(&[0.0, 1.0]), 1)]).unwrap()
    }

    #[test]
    fn exact_match_wins_its_class() {
        let ds = LabeledDataset::new(vec![
            (sig(&[1.0, 2.0]), 0),
            (sig(&[5.0, 5.0]), 1),
            (sig(&[4.0, 4.0]), 1),
        ])
        .unwrap();
        let d = diagnose(&ds, &sig(&[4.0, 4.0]), Metric::SqNorm).unwrap();
        assert_eq!(d.label, 1);
        assert_eq!(d.d1, 0.0);
        assert!(d.d0 > d.d1);
        assert_eq!(d.tie_rounds, 0);
    }

    #[test]
    fn hand_computed_two_point_case() {
        let d = diagnose(&two_point_dataset(), &sig(&[0.9, 0.1]), Metric::SqNorm).unwrap();
        assert_eq!(d.label, 0);
        assert!((d.d0 - 0.02).abs() < 1e-15);
        assert!((d.d1 - 1.62).abs() < 1e-15);
    }

    #[test]
    fn symmetric_tie_exhausts_both_classes() {
        let inv = 1.0 / 2f64.sqrt();
        let err = diagnose(&two_point_dataset(), &sig(&[inv, inv]), Metric::SqNorm).unwrap_err();
        assert_eq!(err, DatasetError::ClassesExhausted(1));
    }

    #[test]
    fn tie_resolution_falls_through_to_next_neighbors() {
        // the two nearest records tie exactly by symmetry; the survivors decide
        let ds = LabeledDataset::new(vec![
            (sig(&[1.0, 0.0]), 0),
            (sig(&[3.0, 3.0]), 0),
            (sig(&[0.0, 1.0]), 1),
            (sig(&[2.0, 2.0]), 1),
        ])
        .unwrap();
        let inv = 1.0 / 2f64.sqrt();
        let q = sig(&[inv, inv]);
        let d = diagnose(&ds, &q, Metric::SqNorm).unwrap();
        assert_eq!(d.tie_rounds, 1);
        assert_eq!(d.label, 1);
        assert_eq!(d.d0, sq_distance(&q, &sig(&[3.0, 3.0])).unwrap());
        assert_eq!(d.d1, sq_distance(&q, &sig(&[2.0, 2.0])).unwrap());
    }

    #[test]
    fn empty_class_is_rejected() {
        let ds = LabeledDataset::new(vec![(sig(&[1.0]), 0), (sig(&[2.0]), 0)]).unwrap();
        assert_eq!(
            diagnose(&ds, &sig(&[1.5]), Metric::F).unwrap_err(),
            DatasetError::EmptyClass(1)
        );
    }

    #[test]
    fn permutation_does_not_change_the_diagnosis() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let records: Vec<(Signal, u8)> = (0..40)
            .map(|i| {
                let f = Signal::new((0..5).map(|_| rng.random_range(0.0..10.0)).collect()).unwrap();
                (f, (i % 2) as u8)
            })
            .collect();
        let q = Signal::new((0..5).map(|_| rng.random_range(0.0..10.0)).collect()).unwrap();
        let ds = LabeledDataset::new(records.clone()).unwrap();
        let base = diagnose(&ds, &q, Metric::SqNorm).unwrap();
        let mut shuffled = records;
        shuffled.reverse();
        shuffled.swap(0, 17);
        let ds2 = LabeledDataset::new(shuffled).unwrap();
        let same = diagnose(&ds2, &q, Metric::SqNorm).unwrap();
        assert_eq!(base, same);
    }

    #[test]
    fn metrics_agree_on_normalized_nonnegative_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let records: Vec<(Signal, u8)> = (0..20)
                .map(|i| {
                    let f = Signal::new((0..6).map(|_| rng.random_range(0.1..10.0)).collect())
                        .unwrap()
                        .normalized()
                        .unwrap();
                    (f, (i % 2) as u8)
                })
                .collect();
            let ds = LabeledDataset::new(records).unwrap();
            let q = Signal::new((0..6).map(|_| rng.random_range(0.1..10.0)).collect())
                .unwrap()
                .normalized()
                .unwrap();
            let by_f = diagnose(&ds, &q, Metric::F).unwrap();
            let by_norm = diagnose(&ds, &q, Metric::SqNorm).unwrap();
            assert_eq!(by_f.label, by_norm.label);
        }
    }

    fn write_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(contents.as_bytes()).unwrap();
        file.flush().unwrap();
        file
    }

    #[test]
    fn csv_loading_happy_path() {
        let file = write_csv("a,b,c,label\n1,2,3,0\n4,5,6,1\n");
        let ds = LabeledDataset::load_csv(file.path(), None).unwrap();
        assert_eq!(ds.dim(), 3);
        assert_eq!(ds.records().len(), 2);
        assert_eq!(ds.class_count(0), 1);
        assert_eq!(ds.class_count(1), 1);
        assert_eq!(
            ds.feature_names().unwrap(),
            &["a".to_string(), "b".into(), "c".into()]
        );
    }

    #[test]
    fn csv_all_zero_row_is_a_valid_record() {
        // absence of every symptom is meaningful data
        let header: String = (1..=35).map(|i| format!("f{i},")).collect();
        let zeros = vec!["0"; 35].join(",");
        let file = write_csv(&format!("{header}label\n{zeros},0\n{zeros},1\n"));
        let ds = LabeledDataset::load_csv(file.path(), Some((0.0, 10.0))).unwrap();
        assert_eq!(ds.dim(), 35);
        assert_eq!(ds.records()[0].0.norm(), 0.0);
    }

    #[test]
    fn csv_errors_carry_row_numbers() {
        let file = write_csv("a,b,label\n1,2,0\n3,4\n");
        assert_eq!(
            LabeledDataset::load_csv(file.path(), None).unwrap_err(),
            DatasetError::RaggedRow {
                row: 2,
                expected: 3,
                got: 2
            }
        );
        let file = write_csv("a,b,label\n1,x,0\n");
        assert!(matches!(
            LabeledDataset::load_csv(file.path(), None).unwrap_err(),
            DatasetError::BadNumber {
                row: 1,
                column: 2,
                ..
            }
        ));
        let file = write_csv("a,b,label\n1,2,2\n");
        assert!(matches!(
            LabeledDataset::load_csv(file.path(), None).unwrap_err(),
            DatasetError::BadLabel { row: 1, .. }
        ));
        let file = write_csv("a,b,label\n1,22,0\n");
        assert!(matches!(
            LabeledDataset::load_csv(file.path(), Some((0.0, 10.0))).unwrap_err(),
            DatasetError::OutOfRange { row: 1, .. }
        ));
    }

    #[test]
    fn brute_force_oracle_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..30 {
            let n = rng.random_range(4..60);
            let dim = rng.random_range(2..10);
            let records: Vec<(Signal, u8)> = (0..n)
                .map(|i| {
                    let f = Signal::new((0..dim).map(|_| rng.random_range(0.0..10.0)).collect())
                        .unwrap();
                    (f, (i % 2) as u8)
                })
                .collect();
            let ds = LabeledDataset::new(records.clone()).unwrap();
            let q = Signal::new((0..dim).map(|_| rng.random_range(0.0..10.0)).collect()).unwrap();

            // oracle: plain 1-NN over the whole dataset
            let nearest = records
                .iter()
                .map(|(g, l)| (sq_distance(&q, g).unwrap(), *l))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .unwrap();
            let diag = diagnose(&ds, &q, Metric::SqNorm).unwrap();
            assert_eq!(diag.label, nearest.1);
        }
    }
}
