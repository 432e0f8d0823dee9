//! KEEL `.dat` reader.
//!
//! Header directives: `@relation`, `@attribute <name> <type>`, `@inputs`,
//! `@outputs`, `@data`. The class is the last attribute. Data rows are
//! comma separated; blank lines and `%` comments are skipped.

use std::path::Path;

use super::{minority_of, Dataset, Label, MAJORITY, MINORITY};
use crate::error::{Error, ParseErrorKind, Result};

#[derive(Debug, Clone, Default)]
pub struct KeelOptions {
    /// Skip nominal input attributes instead of failing on them.
    pub drop_nominal: bool,
}

#[derive(Debug)]
enum AttrType {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug)]
struct Attribute {
    name: String,
    ty: AttrType,
    line: usize,
}

pub fn load_keel(path: impl AsRef<Path>) -> Result<Dataset> {
    load_keel_with(path, &KeelOptions::default())
}

pub fn load_keel_with(path: impl AsRef<Path>, opts: &KeelOptions) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_keel(&text, opts)
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute> {
    let rest = rest.trim();
    let malformed = |msg: &str| Error::parse(line, ParseErrorKind::MalformedHeader(msg.into()));
    let (name, spec) = if let Some(quoted) = rest.strip_prefix('\'') {
        let end = quoted
            .find('\'')
            .ok_or_else(|| malformed("unterminated attribute name"))?;
        (&quoted[..end], quoted[end + 1..].trim())
    } else {
        let end = rest
            .find(|c: char| c.is_whitespace() || c == '{')
            .ok_or_else(|| malformed("attribute without a type"))?;
        (&rest[..end], rest[end..].trim())
    };
    if name.is_empty() {
        return Err(malformed("empty attribute name"));
    }
    let ty = if let Some(body) = spec.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| malformed("unterminated nominal value list"))?;
        let values: Vec<String> = body
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            return Err(malformed("nominal attribute with no values"));
        }
        AttrType::Nominal(values)
    } else {
        let word: String = spec
            .chars()
            .take_while(|c| c.is_ascii_alphabetic())
            .collect::<String>()
            .to_ascii_lowercase();
        match word.as_str() {
            "real" | "integer" | "numeric" => AttrType::Numeric,
            "" => return Err(malformed("attribute without a type")),
            other => return Err(malformed(&format!("unsupported attribute type `{other}`"))),
        }
    };
    Ok(Attribute {
        name: name.to_string(),
        ty,
        line,
    })
}

fn name_list(rest: &str) -> Vec<String> {
    rest.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parse KEEL text. The rarer class is mapped to [`MINORITY`].
pub fn parse_keel(text: &str, opts: &KeelOptions) -> Result<Dataset> {
    let mut relation = false;
    let mut attrs: Vec<Attribute> = Vec::new();
    let mut inputs: Option<(Vec<String>, usize)> = None;
    let mut outputs: Option<(Vec<String>, usize)> = None;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut data_line = None;

    for (no, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let malformed = |msg: String| Error::parse(no, ParseErrorKind::MalformedHeader(msg));
        if !line.starts_with('@') {
            return Err(malformed(format!("unexpected line before @data: `{line}`")));
        }
        let (directive, rest) = line
            .split_once(char::is_whitespace)
            .unwrap_or((line, ""));
        match directive.to_ascii_lowercase().as_str() {
            "@relation" => {
                if rest.trim().is_empty() {
                    return Err(malformed("@relation without a name".into()));
                }
                relation = true;
            }
            "@attribute" => {
                if !relation {
                    return Err(malformed("@attribute before @relation".into()));
                }
                attrs.push(parse_attribute(rest, no)?);
            }
            "@inputs" => inputs = Some((name_list(rest), no)),
            "@outputs" | "@output" => outputs = Some((name_list(rest), no)),
            "@data" => {
                data_line = Some(no);
                break;
            }
            other => return Err(malformed(format!("unknown directive `{other}`"))),
        }
    }

    let data_line = data_line.ok_or_else(|| {
        Error::parse(text.lines().count().max(1), ParseErrorKind::MissingDataSection)
    })?;
    if attrs.len() < 2 {
        return Err(Error::parse(
            data_line,
            ParseErrorKind::MalformedHeader("need at least one feature and a class attribute".into()),
        ));
    }
    let class_attr = attrs.last().expect("checked above");
    if let Some((names, line)) = &outputs {
        if names.len() != 1 || names[0] != class_attr.name {
            return Err(Error::parse(
                *line,
                ParseErrorKind::MalformedHeader("@outputs must name the last attribute".into()),
            ));
        }
    }
    if let Some((names, line)) = &inputs {
        for n in names {
            if !attrs[..attrs.len() - 1].iter().any(|a| &a.name == n) {
                return Err(Error::parse(
                    *line,
                    ParseErrorKind::MalformedHeader(format!("@inputs names unknown attribute `{n}`")),
                ));
            }
        }
    }
    let declared_classes = match &class_attr.ty {
        AttrType::Nominal(values) => Some(values.clone()),
        AttrType::Numeric => None,
    };

    // Column selection: `Some(feature_slot)` for kept numeric inputs.
    let mut keep = Vec::with_capacity(attrs.len() - 1);
    let mut feature_names = Vec::new();
    for a in &attrs[..attrs.len() - 1] {
        match a.ty {
            AttrType::Numeric => {
                keep.push(true);
                feature_names.push(a.name.clone());
            }
            AttrType::Nominal(_) if opts.drop_nominal => keep.push(false),
            AttrType::Nominal(_) => {
                return Err(Error::parse(a.line, ParseErrorKind::NominalFeature(a.name.clone())))
            }
        }
    }
    if feature_names.is_empty() {
        return Err(Error::parse(
            data_line,
            ParseErrorKind::MalformedHeader("no numeric features".into()),
        ));
    }

    let n_fields = attrs.len();
    let mut features = Vec::new();
    let mut class_ids: Vec<usize> = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut last_line = data_line;
    for (no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        last_line = no;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != n_fields {
            return Err(Error::parse(
                no,
                ParseErrorKind::FieldCount {
                    expected: n_fields,
                    found: fields.len(),
                },
            ));
        }
        for ((value, attr), &kept) in fields.iter().zip(&attrs).zip(&keep) {
            if !kept {
                continue;
            }
            let v = value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::parse(
                        no,
                        ParseErrorKind::NonNumeric {
                            column: attr.name.clone(),
                            value: value.to_string(),
                        },
                    )
                })?;
            features.push(v);
        }
        let class = fields[n_fields - 1];
        if let Some(declared) = &declared_classes {
            if !declared.iter().any(|c| c == class) {
                return Err(Error::parse(no, ParseErrorKind::UnknownClass(class.to_string())));
            }
        }
        let id = match class_names.iter().position(|c| c == class) {
            Some(id) => id,
            None => {
                class_names.push(class.to_string());
                if class_names.len() > 2 {
                    return Err(Error::parse(no, ParseErrorKind::TooManyClasses(class_names)));
                }
                class_names.len() - 1
            }
        };
        class_ids.push(id);
    }

    match class_names.len() {
        0 => return Err(Error::parse(data_line, ParseErrorKind::EmptyData)),
        1 => {
            return Err(Error::parse(
                last_line,
                ParseErrorKind::SingleClass(class_names.remove(0)),
            ))
        }
        _ => {}
    }
    let count = |id: usize| class_ids.iter().filter(|&&c| c == id).count();
    let minority = minority_of((&class_names[0], count(0)), (&class_names[1], count(1)));
    let minority_id = class_names.iter().position(|c| c == minority).expect("present");
    let labels: Vec<Label> = class_ids
        .iter()
        .map(|&c| if c == minority_id { MINORITY } else { MAJORITY })
        .collect();
    let n_features = feature_names.len();
    Dataset::from_flat(features, n_features, labels, feature_names)
}
