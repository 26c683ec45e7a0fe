//! Labeled datasets in the normalized CSV layout, plus train/test splits.
//!
//! Layout: UTF-8, comma separated, one sample per row, label in the first
//! column. An optional header row names the columns; with a header, columns
//! called `split` (values `train`/`test`) and `group` (non-negative integer)
//! are recognized and every other column is a feature.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SpcaError};
use crate::matrix::DataMatrix;

/// Train and test row indices, disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    /// `#samples x #features`.
    pub samples: DMatrix<f64>,
    pub labels: Vec<i64>,
    /// Optional group id per sample (e.g. speaker set), used by grouped splits.
    pub groups: Option<Vec<u32>>,
    pub split: Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    CsvLabeled,
}

/// How to divide a dataset into train and test rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitPolicy {
    /// Use exactly these indices.
    Fixed { train: Vec<usize>, test: Vec<usize> },
    /// Keep the split stored in the file.
    AsLoaded,
    /// First `k` rows train, the rest test.
    FirstRows(usize),
    /// `k` random training samples from every class, the rest test.
    PerClassCount(usize),
    /// Rows whose group is in `train` go to training, those in `test` to testing.
    Grouped { train: Vec<u32>, test: Vec<u32> },
}

impl LabeledDataset {
    pub fn new(samples: DMatrix<f64>, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != samples.nrows() {
            return Err(SpcaError::Data(format!(
                "{} labels for {} samples",
                labels.len(),
                samples.nrows()
            )));
        }
        let split = Split {
            train: (0..labels.len()).collect(),
            test: Vec::new(),
        };
        Ok(Self {
            samples,
            labels,
            groups: None,
            split,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.samples.ncols()
    }

    /// Sorted distinct labels.
    pub fn classes(&self) -> Vec<i64> {
        self.labels
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn rows(&self, indices: &[usize]) -> DMatrix<f64> {
        self.samples.select_rows(indices)
    }

    pub fn labels_of(&self, indices: &[usize]) -> Vec<i64> {
        indices.iter().map(|&i| self.labels[i]).collect()
    }

    /// Training rows as a solver input (rows = samples, columns = variables).
    pub fn train_matrix(&self) -> Result<DataMatrix> {
        DataMatrix::new(self.rows(&self.split.train))
    }

    /// Checks disjoint, exhaustive, in-range indices and that every test label
    /// also occurs in training.
    pub fn validate_split(&self) -> Result<()> {
        let n = self.n_samples();
        let mut seen = vec![false; n];
        for &i in self.split.train.iter().chain(&self.split.test) {
            if i >= n {
                return Err(SpcaError::Data(format!(
                    "split index {i} out of range for {n} samples"
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(SpcaError::Data(format!("sample {i} appears twice in the split")));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(SpcaError::Data(format!(
                "sample {missing} is in neither train nor test"
            )));
        }
        let train_labels: BTreeSet<i64> = self.labels_of(&self.split.train).into_iter().collect();
        if let Some(label) = self
            .split
            .test
            .iter()
            .map(|&i| self.labels[i])
            .find(|l| !train_labels.contains(l))
        {
            return Err(SpcaError::Data(format!(
                "test label {label} never occurs in training"
            )));
        }
        Ok(())
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> SpcaError {
    SpcaError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads a labeled dataset from disk.
pub fn load_dataset(path: impl AsRef<Path>, format: DatasetFormat) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| SpcaError::io(path, e))?;
    match format {
        DatasetFormat::CsvLabeled => parse_labeled_csv(BufReader::new(file), path),
    }
}

/// Parses the labeled CSV layout; `origin` is only used in error messages.
pub fn parse_labeled_csv(reader: impl Read, origin: &Path) -> Result<LabeledDataset> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = csv.records().enumerate().peekable();

    #[derive(PartialEq)]
    enum Column {
        Label,
        Split,
        Group,
        Feature,
    }
    let mut layout: Option<Vec<Column>> = None;
    if let Some((_, Ok(first))) = records.peek() {
        let head = first.get(0).unwrap_or("");
        if head.parse::<i64>().is_err() && head.parse::<f64>().is_err() {
            let cols = first
                .iter()
                .enumerate()
                .map(|(k, name)| match (k, name.to_ascii_lowercase().as_str()) {
                    (0, _) => Column::Label,
                    (_, "split") => Column::Split,
                    (_, "group") => Column::Group,
                    _ => Column::Feature,
                })
                .collect();
            layout = Some(cols);
            records.next();
        }
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut groups: Vec<u32> = Vec::new();
    let mut split_flags: Vec<bool> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, record) in records {
        let line = idx + 1;
        let record = record.map_err(|e| parse_error(origin, line, e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let expected = layout.as_ref().map(Vec::len).or(width);
        if let Some(expected) = expected {
            if record.len() != expected {
                return Err(parse_error(
                    origin,
                    line,
                    format!("expected {expected} fields, found {}", record.len()),
                ));
            }
        }
        width = Some(record.len());
        if record.len() < 2 {
            return Err(parse_error(origin, line, "need a label and at least one feature"));
        }
        for (k, field) in record.iter().enumerate() {
            let kind = layout
                .as_ref()
                .map_or(if k == 0 { &Column::Label } else { &Column::Feature }, |l| &l[k]);
            match kind {
                Column::Label => {
                    labels.push(field.parse::<i64>().map_err(|_| {
                        parse_error(origin, line, format!("label `{field}` is not an integer"))
                    })?)
                }
                Column::Split => split_flags.push(match field.to_ascii_lowercase().as_str() {
                    "train" => true,
                    "test" => false,
                    other => {
                        return Err(parse_error(
                            origin,
                            line,
                            format!("split must be train or test, got `{other}`"),
                        ))
                    }
                }),
                Column::Group => groups.push(field.parse::<u32>().map_err(|_| {
                    parse_error(
                        origin,
                        line,
                        format!("group `{field}` is not a non-negative integer"),
                    )
                })?),
                Column::Feature => {
                    let v = field
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| {
                            parse_error(origin, line, format!("feature `{field}` is not a finite number"))
                        })?;
                    values.push(v);
                }
            }
        }
    }
    if labels.is_empty() {
        return Err(SpcaError::Data(format!("{}: no samples", origin.display())));
    }
    let n_features = values.len() / labels.len();
    if n_features == 0 {
        return Err(SpcaError::Data(format!(
            "{}: no feature columns",
            origin.display()
        )));
    }
    let samples = DMatrix::from_row_slice(labels.len(), n_features, &values);
    let mut dataset = LabeledDataset::new(samples, labels)?;
    if !groups.is_empty() {
        dataset.groups = Some(groups);
    }
    if !split_flags.is_empty() {
        dataset.split = Split {
            train: (0..split_flags.len()).filter(|&i| split_flags[i]).collect(),
            test: (0..split_flags.len()).filter(|&i| !split_flags[i]).collect(),
        };
    }
    dataset.validate_split()?;
    Ok(dataset)
}

/// Reads an unlabeled numeric CSV (one sample per row, optional header).
pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<DataMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| SpcaError::io(path, e))?;
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (idx, record) in csv.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| parse_error(path, line, e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if idx == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if let Some(w) = width {
            if record.len() != w {
                return Err(parse_error(
                    path,
                    line,
                    format!("expected {w} fields, found {}", record.len()),
                ));
            }
        }
        width = Some(record.len());
        for field in &record {
            values.push(
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_error(path, line, format!("`{field}` is not a finite number")))?,
            );
        }
        rows += 1;
    }
    let cols = width.unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(SpcaError::Data(format!("{}: no numeric rows", path.display())));
    }
    DataMatrix::from_row_slice(rows, cols, &values)
}

/// Writes the dataset in the labeled CSV layout, including `split` and
/// `group` columns when they carry information.
pub fn write_labeled_csv(dataset: &LabeledDataset, out: &mut impl Write) -> std::io::Result<()> {
    let with_split = !dataset.split.test.is_empty();
    let mut in_train = vec![false; dataset.n_samples()];
    for &i in &dataset.split.train {
        in_train[i] = true;
    }
    let mut header = vec!["label".to_string()];
    if with_split {
        header.push("split".into());
    }
    if dataset.groups.is_some() {
        header.push("group".into());
    }
    header.extend((1..=dataset.n_features()).map(|k| format!("f{k}")));
    writeln!(out, "{}", header.join(","))?;
    for i in 0..dataset.n_samples() {
        let mut fields = vec![dataset.labels[i].to_string()];
        if with_split {
            fields.push(if in_train[i] { "train" } else { "test" }.into());
        }
        if let Some(groups) = &dataset.groups {
            fields.push(groups[i].to_string());
        }
        fields.extend(dataset.samples.row(i).iter().map(|v| format!("{v:?}")));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn save_labeled_csv(dataset: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| SpcaError::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    write_labeled_csv(dataset, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| SpcaError::io(path, e))
}

/// Returns a copy of `dataset` with the split chosen by `policy`.
pub fn make_splits(dataset: &LabeledDataset, policy: &SplitPolicy, seed: u64) -> Result<LabeledDataset> {
    let n = dataset.n_samples();
    let split = match policy {
        SplitPolicy::AsLoaded => dataset.split.clone(),
        SplitPolicy::Fixed { train, test } => Split {
            train: train.clone(),
            test: test.clone(),
        },
        SplitPolicy::FirstRows(k) => {
            if *k > n {
                return Err(SpcaError::InvalidConfig(format!(
                    "cannot take {k} training rows out of {n}"
                )));
            }
            Split {
                train: (0..*k).collect(),
                test: (*k..n).collect(),
            }
        }
        SplitPolicy::PerClassCount(k) => {
            let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
            for (i, &label) in dataset.labels.iter().enumerate() {
                by_class.entry(label).or_default().push(i);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (label, mut rows) in by_class {
                if rows.len() < *k {
                    return Err(SpcaError::InvalidConfig(format!(
                        "class {label} has {} samples, fewer than {k}",
                        rows.len()
                    )));
                }
                rows.shuffle(&mut rng);
                train.extend_from_slice(&rows[..*k]);
                test.extend_from_slice(&rows[*k..]);
            }
            train.sort_unstable();
            test.sort_unstable();
            Split { train, test }
        }
        SplitPolicy::Grouped { train, test } => {
            let groups = dataset
                .groups
                .as_ref()
                .ok_or_else(|| SpcaError::InvalidConfig("grouped split needs a group column".into()))?;
            let mut split = Split::default();
            for (i, g) in groups.iter().enumerate() {
                if train.contains(g) {
                    split.train.push(i);
                } else if test.contains(g) {
                    split.test.push(i);
                } else {
                    return Err(SpcaError::InvalidConfig(format!(
                        "group {g} of sample {i} is assigned to neither train nor test"
                    )));
                }
            }
            split
        }
    };
    let out = LabeledDataset {
        split,
        ..dataset.clone()
    };
    out.validate_split().map_err(|e| match e {
        SpcaError::Data(msg) => SpcaError::InvalidConfig(format!("infeasible split: {msg}")),
        other => other,
    })?;
    Ok(out)
}

/// Parses split policies written as `file`, `first:K`, `per-class:K` or
/// `grouped:1,2,3/4,5` (train groups / test groups).
pub fn parse_split_policy(text: &str) -> Result<SplitPolicy> {
    let bad = || SpcaError::InvalidConfig(format!("unrecognized split policy `{text}`"));
    let (kind, arg) = text.split_once(':').unwrap_or((text, ""));
    let count = || arg.trim().parse::<usize>().map_err(|_| bad());
    let groups = |s: &str| {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<u32>>>()
    };
    match kind.trim() {
        "file" | "fixed" => Ok(SplitPolicy::AsLoaded),
        "first" => Ok(SplitPolicy::FirstRows(count()?)),
        "per-class" => Ok(SplitPolicy::PerClassCount(count()?)),
        "grouped" => {
            let (train, test) = arg.split_once('/').ok_or_else(bad)?;
            Ok(SplitPolicy::Grouped {
                train: groups(train)?,
                test: groups(test)?,
            })
        }
        _ => Err(bad()),
    }
}

/// Converts common distribution formats into a labeled dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    /// `label index:value ...` sparse lines (1-based indices).
    Libsvm,
    /// Comma-separated features with the label in the last column; a trailing
    /// `.` on the label is tolerated.
    LabelLast,
}

impl std::str::FromStr for SourceFormat {
    type Err = SpcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "libsvm" => Ok(SourceFormat::Libsvm),
            "label-last" => Ok(SourceFormat::LabelLast),
            other => Err(SpcaError::InvalidConfig(format!(
                "unknown source format `{other}`"
            ))),
        }
    }
}

/// One source file to convert, with an optional group id and split tag for
/// all of its rows.
#[derive(Debug, Clone)]
pub struct ConvertSource {
    pub path: PathBuf,
    pub group: Option<u32>,
    pub split: Option<bool>,
}

pub fn convert_sources(sources: &[ConvertSource], format: SourceFormat) -> Result<LabeledDataset> {
    let mut rows: Vec<(i64, Vec<(usize, f64)>)> = Vec::new();
    let mut groups = Vec::new();
    let mut flags = Vec::new();
    let mut dense_width = 0usize;
    for source in sources {
        let file = File::open(&source.path).map_err(|e| SpcaError::io(&source.path, e))?;
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| SpcaError::io(&source.path, e))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (label, features) = match format {
                SourceFormat::Libsvm => parse_libsvm_line(line, &source.path, lineno)?,
                SourceFormat::LabelLast => parse_label_last_line(line, &source.path, lineno)?,
            };
            if let Some(&(last, _)) = features.last() {
                dense_width = dense_width.max(last + 1);
            }
            rows.push((label, features));
            groups.push(source.group.unwrap_or(0));
            flags.push(source.split);
        }
    }
    if rows.is_empty() {
        return Err(SpcaError::Data("no rows in the conversion sources".into()));
    }
    if format == SourceFormat::LabelLast {
        if let Some(i) = rows.iter().position(|(_, f)| f.len() != dense_width) {
            return Err(SpcaError::Data(format!(
                "row {} has {} features, expected {dense_width}",
                i + 1,
                rows[i].1.len()
            )));
        }
    }
    let mut samples = DMatrix::zeros(rows.len(), dense_width);
    let mut labels = Vec::with_capacity(rows.len());
    for (r, (label, features)) in rows.into_iter().enumerate() {
        labels.push(label);
        for (k, v) in features {
            samples[(r, k)] = v;
        }
    }
    let mut dataset = LabeledDataset::new(samples, labels)?;
    if sources.iter().any(|s| s.group.is_some()) {
        dataset.groups = Some(groups);
    }
    if flags.iter().any(Option::is_some) {
        let is_train = |i: usize| flags[i].unwrap_or(true);
        dataset.split = Split {
            train: (0..flags.len()).filter(|&i| is_train(i)).collect(),
            test: (0..flags.len()).filter(|&i| !is_train(i)).collect(),
        };
    }
    dataset.validate_split()?;
    Ok(dataset)
}

fn parse_label(text: &str, path: &Path, line: usize) -> Result<i64> {
    let t = text.trim().trim_end_matches('.');
    t.parse::<i64>()
        .or_else(|_| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.fract() == 0.0)
                .map(|v| v as i64)
                .ok_or(())
        })
        .map_err(|_| parse_error(path, line, format!("label `{text}` is not an integer")))
}

fn parse_number(text: &str, path: &Path, line: usize) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_error(path, line, format!("`{text}` is not a finite number")))
}

fn parse_libsvm_line(line: &str, path: &Path, lineno: usize) -> Result<(i64, Vec<(usize, f64)>)> {
    let mut parts = line.split_whitespace();
    let label = parse_label(parts.next().unwrap_or(""), path, lineno)?;
    let mut features = Vec::new();
    for item in parts {
        let (idx, value) = item
            .split_once(':')
            .ok_or_else(|| parse_error(path, lineno, format!("expected index:value, got `{item}`")))?;
        let idx: usize = idx
            .parse()
            .ok()
            .filter(|&i| i >= 1)
            .ok_or_else(|| parse_error(path, lineno, format!("bad feature index `{idx}`")))?;
        features.push((idx - 1, parse_number(value, path, lineno)?));
    }
    features.sort_by_key(|&(i, _)| i);
    Ok((label, features))
}

fn parse_label_last_line(line: &str, path: &Path, lineno: usize) -> Result<(i64, Vec<(usize, f64)>)> {
    let fields: Vec<&str> = line.split(',').collect();
    let (label, features) = fields
        .split_last()
        .ok_or_else(|| parse_error(path, lineno, "empty line"))?;
    let label = parse_label(label, path, lineno)?;
    let features = features
        .iter()
        .enumerate()
        .map(|(k, f)| Ok((k, parse_number(f, path, lineno)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((label, features))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<LabeledDataset> {
        parse_labeled_csv(text.as_bytes(), Path::new("mem.csv"))
    }

    #[test]
    fn header_and_rows() {
        let d = parse("label,f1,f2\n1,0.5,2\n2,1.5,3\n1,-1,0\n").unwrap();
        assert_eq!(d.n_samples(), 3);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.labels, vec![1, 2, 1]);
        assert_eq!(d.samples[(1, 0)], 1.5);
    }

    #[test]
    fn headerless() {
        let d = parse("3,1,2,3\n4,4,5,6\n").unwrap();
        assert_eq!((d.n_samples(), d.n_features()), (2, 3));
    }

    #[test]
    fn missing_field_names_line() {
        match parse("label,f1,f2\n1,0.5,2\n2,1.5\n") {
            Err(SpcaError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_feature() {
        assert!(matches!(parse("1,abc\n"), Err(SpcaError::Parse { line: 1, .. })));
        assert!(matches!(parse("1,nan\n"), Err(SpcaError::Parse { .. })));
    }

    #[test]
    fn split_and_group_columns() {
        let d = parse("label,split,group,f1\n1,train,1,0\n2,train,1,1\n1,test,2,2\n").unwrap();
        assert_eq!(d.split.train, vec![0, 1]);
        assert_eq!(d.split.test, vec![2]);
        assert_eq!(d.groups, Some(vec![1, 1, 2]));
    }

    #[test]
    fn unknown_test_label_rejected() {
        assert!(matches!(
            parse("label,split,f1\n1,train,0\n2,test,1\n"),
            Err(SpcaError::Data(_))
        ));
    }

    fn toy(classes: i64, per_class: usize) -> LabeledDataset {
        let labels: Vec<i64> = (0..classes)
            .flat_map(|c| std::iter::repeat(c).take(per_class))
            .collect();
        let n = labels.len();
        LabeledDataset::new(DMatrix::from_fn(n, 3, |r, c| (r * 3 + c) as f64), labels).unwrap()
    }

    #[test]
    fn per_class_split_sizes() {
        let d = toy(20, 72);
        let s = make_splits(&d, &SplitPolicy::PerClassCount(24), 1).unwrap();
        assert_eq!(s.split.train.len(), 480);
        assert_eq!(s.split.test.len(), 1440 - 480);
        for c in 0..20 {
            assert_eq!(s.split.train.iter().filter(|&&i| d.labels[i] == c).count(), 24);
        }
        let again = make_splits(&d, &SplitPolicy::PerClassCount(24), 1).unwrap();
        assert_eq!(s.split, again.split);
        let other = make_splits(&d, &SplitPolicy::PerClassCount(24), 2).unwrap();
        assert_ne!(s.split, other.split);
        assert!(make_splits(&d, &SplitPolicy::PerClassCount(73), 1).is_err());
    }

    #[test]
    fn fixed_split_is_echoed() {
        let d = toy(2, 3);
        let policy = SplitPolicy::Fixed {
            train: vec![5, 0, 3],
            test: vec![1, 2, 4],
        };
        let s = make_splits(&d, &policy, 0).unwrap();
        assert_eq!(s.split.train, vec![5, 0, 3]);
        assert_eq!(s.split.test, vec![1, 2, 4]);
        let overlapping = SplitPolicy::Fixed {
            train: vec![0, 1, 2, 3],
            test: vec![3, 4, 5],
        };
        assert!(make_splits(&d, &overlapping, 0).is_err());
    }

    #[test]
    fn grouped_split() {
        let mut d = toy(2, 5);
        d.groups = Some(vec![1, 2, 3, 4, 5, 1, 2, 3, 4, 5]);
        let policy = parse_split_policy("grouped:1,2,3/4,5").unwrap();
        let s = make_splits(&d, &policy, 0).unwrap();
        assert_eq!(s.split.train, vec![0, 1, 2, 5, 6, 7]);
        assert_eq!(s.split.test, vec![3, 4, 8, 9]);
        let partial = parse_split_policy("grouped:1,2/5").unwrap();
        assert!(make_splits(&d, &partial, 0).is_err());
    }

    #[test]
    fn policy_parsing() {
        assert_eq!(
            parse_split_policy("first:7291").unwrap(),
            SplitPolicy::FirstRows(7291)
        );
        assert_eq!(
            parse_split_policy("per-class:36").unwrap(),
            SplitPolicy::PerClassCount(36)
        );
        assert_eq!(parse_split_policy("file").unwrap(), SplitPolicy::AsLoaded);
        assert!(parse_split_policy("random").is_err());
    }

    #[test]
    fn csv_round_trip_keeps_split_and_groups() {
        let mut d = toy(2, 3);
        d.groups = Some(vec![1, 1, 2, 2, 3, 3]);
        let d = make_splits(&d, &SplitPolicy::FirstRows(4), 0).unwrap();
        let d = LabeledDataset {
            split: Split {
                train: vec![0, 1, 3, 4],
                test: vec![2, 5],
            },
            ..d
        };
        let mut buf = Vec::new();
        write_labeled_csv(&d, &mut buf).unwrap();
        let back = parse_labeled_csv(buf.as_slice(), Path::new("mem")).unwrap();
        assert_eq!(back, d);
    }
}
