use std::io::{Read, Write};
use std::path::Path;

use super::{default_names, Dataset, Label, MAJORITY, MINORITY};
use crate::error::{Error, ParseErrorKind, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// All-digit strings address a column by index, anything else by name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub label_column: LabelColumn,
    pub minority_label: String,
    /// Optional name of the other class; any third value is rejected.
    pub majority_label: Option<String>,
    pub has_header: bool,
}

impl CsvOptions {
    pub fn new(label_column: LabelColumn, minority_label: impl Into<String>) -> Self {
        CsvOptions {
            label_column,
            minority_label: minority_label.into(),
            majority_label: None,
            has_header: true,
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    parse_csv(file, opts)
}

/// Read RFC 4180 CSV. Line numbers in errors are 1-based file lines.
pub fn parse_csv<R: Read>(reader: R, opts: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(opts.has_header)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Option<Vec<String>> = if opts.has_header {
        Some(rdr.headers()?.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut label_idx = None;
    let mut width = header.as_ref().map(Vec::len);
    let mut names: Option<Vec<String>> = None;
    let mut features = Vec::new();
    let mut labels: Vec<Label> = Vec::new();
    let mut majority = opts.majority_label.clone();

    let resolve = |width: usize| -> Result<usize> {
        match &opts.label_column {
            LabelColumn::Index(i) if *i < width => Ok(*i),
            LabelColumn::Index(i) => Err(Error::parse(
                1,
                ParseErrorKind::MissingColumn(format!("#{i}")),
            )),
            LabelColumn::Name(n) => header
                .as_ref()
                .and_then(|h| h.iter().position(|c| c == n))
                .ok_or_else(|| Error::parse(1, ParseErrorKind::MissingColumn(n.clone()))),
        }
    };
    if let Some(w) = width {
        label_idx = Some(resolve(w)?);
    }

    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let w = *width.get_or_insert(record.len());
        let li = match label_idx {
            Some(li) => li,
            None => *label_idx.insert(resolve(w)?),
        };
        if names.is_none() {
            names = Some(match &header {
                Some(h) => h
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != li)
                    .map(|(_, n)| n.clone())
                    .collect(),
                None => default_names(w - 1),
            });
        }
        if record.len() != w {
            return Err(Error::parse(
                line,
                ParseErrorKind::FieldCount {
                    expected: w,
                    found: record.len(),
                },
            ));
        }
        for (i, cell) in record.iter().enumerate() {
            if i == li {
                continue;
            }
            let v = cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                let column = match &header {
                    Some(h) => format!("{} (#{i})", h[i]),
                    None => format!("#{i}"),
                };
                Error::parse(
                    line,
                    ParseErrorKind::NonNumeric {
                        column,
                        value: cell.to_string(),
                    },
                )
            })?;
            features.push(v);
        }
        let class = &record[li];
        let label = if class == opts.minority_label {
            MINORITY
        } else {
            match &majority {
                Some(m) if m == class => MAJORITY,
                Some(_) => {
                    return Err(Error::parse(line, ParseErrorKind::UnknownClass(class.to_string())))
                }
                None => {
                    majority = Some(class.to_string());
                    MAJORITY
                }
            }
        };
        labels.push(label);
    }

    if labels.is_empty() {
        return Err(Error::parse(1, ParseErrorKind::EmptyData));
    }
    let names = names.expect("set with first record");
    let n_features = names.len();
    if n_features == 0 {
        return Err(Error::parse(1, ParseErrorKind::MalformedHeader("no feature columns".into())));
    }
    Dataset::from_flat(features, n_features, labels, names)
}

/// Write features, a `label` column (0/1) and, when given, a `synthetic`
/// 0/1 column.
pub fn write_csv<W: Write>(d: &Dataset, writer: W, synthetic: Option<&[bool]>) -> Result<()> {
    if let Some(flags) = synthetic {
        if flags.len() != d.len() {
            return Err(Error::DimensionMismatch {
                expected: d.len(),
                found: flags.len(),
            });
        }
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = d.feature_names().iter().map(String::as_str).collect();
    header.push("label");
    if synthetic.is_some() {
        header.push("synthetic");
    }
    w.write_record(&header)?;
    let mut fields = Vec::with_capacity(header.len());
    for (i, row) in d.rows().enumerate() {
        fields.clear();
        fields.extend(row.iter().map(|v| v.to_string()));
        fields.push(d.label(i).to_string());
        if let Some(flags) = synthetic {
            fields.push(u8::from(flags[i]).to_string());
        }
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(d: &Dataset, path: impl AsRef<Path>, synthetic: Option<&[bool]>) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_csv(d, file, synthetic)
}
