use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::cpmap::KrausTuple;
use crate::matroid::VectorPairFamily;
use crate::numkernel::{ComplexMatrix, C64};

/// Reasons an input file is rejected, one variant per diagnostic class.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Malformed(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("non-finite entry: {0}")]
    NonFinite(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
}

impl InstanceError {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceError::Io { .. } => "io",
            InstanceError::Malformed(_) => "malformed_json",
            InstanceError::Schema(_) => "schema",
            InstanceError::Dimension(_) => "dimension",
            InstanceError::NonFinite(_) => "non_finite",
            InstanceError::Invalid(_) => "invalid",
        }
    }
}

type Result<T> = std::result::Result<T, InstanceError>;

/// Tuple of k N×N complex matrices as stored on disk:
/// `{"n": N, "k": k, "matrices": [[[[re, im], …], …], …], "metadata": {…}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub n: usize,
    pub k: usize,
    pub matrices: Vec<ComplexMatrix>,
    pub metadata: Option<BTreeMap<String, String>>,
}

impl InstanceFile {
    pub fn from_tuple(t: &KrausTuple) -> Self {
        Self {
            n: t.n(),
            k: t.k(),
            matrices: t.mats().to_vec(),
            metadata: None,
        }
    }

    pub fn to_kraus(&self) -> crate::Result<KrausTuple> {
        KrausTuple::new(self.matrices.clone())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let root = parse_value(text)?;
        let obj = root
            .as_object()
            .ok_or_else(|| InstanceError::Schema("top level must be an object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "n" | "k" | "matrices" | "metadata") {
                return Err(InstanceError::Schema(format!("unknown field \"{key}\"")));
            }
        }
        let n = count_field(obj, "n")?;
        let k = count_field(obj, "k")?;
        if n == 0 || k == 0 {
            return Err(InstanceError::Dimension("n and k must be at least 1".into()));
        }
        let mats = obj
            .get("matrices")
            .ok_or_else(|| InstanceError::Schema("missing field \"matrices\"".into()))?
            .as_array()
            .ok_or_else(|| InstanceError::Schema("\"matrices\" must be an array".into()))?;
        if mats.len() != k {
            return Err(InstanceError::Dimension(format!(
                "k = {k} but {} matrices given",
                mats.len()
            )));
        }
        let matrices = mats
            .iter()
            .enumerate()
            .map(|(idx, m)| {
                let m = parse_matrix(m, &format!("matrix {idx}"))?;
                if m.rows() != n || m.cols() != n {
                    return Err(InstanceError::Dimension(format!(
                        "matrix {idx} is {}x{}, expected {n}x{n}",
                        m.rows(),
                        m.cols()
                    )));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        let metadata = match obj.get("metadata") {
            None | Some(Value::Null) => None,
            Some(Value::Object(map)) => Some(
                map.iter()
                    .map(|(key, v)| match v {
                        Value::String(s) => Ok((key.clone(), s.clone())),
                        _ => Err(InstanceError::Schema(format!(
                            "metadata value \"{key}\" must be a string"
                        ))),
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?,
            ),
            Some(_) => return Err(InstanceError::Schema("\"metadata\" must be an object".into())),
        };
        Ok(Self {
            n,
            k,
            matrices,
            metadata,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("n".into(), self.n.into());
        obj.insert("k".into(), self.k.into());
        obj.insert(
            "matrices".into(),
            Value::Array(self.matrices.iter().map(matrix_value).collect()),
        );
        if let Some(meta) = &self.metadata {
            obj.insert(
                "metadata".into(),
                Value::Object(meta.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect()),
            );
        }
        Value::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("finite values serialize");
        s.push('\n');
        s
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| InstanceError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("number out of range") {
            InstanceError::NonFinite(msg)
        } else {
            InstanceError::Malformed(msg)
        }
    })
}

fn count_field(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .ok_or_else(|| InstanceError::Schema(format!("missing field \"{key}\"")))?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| InstanceError::Schema(format!("\"{key}\" must be a nonnegative integer")))
}

fn parse_component(v: &Value, loc: &str) -> Result<f64> {
    match v {
        Value::Number(num) => {
            let x = num
                .as_f64()
                .ok_or_else(|| InstanceError::Schema(format!("{loc}: unrepresentable number")))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(InstanceError::NonFinite(loc.to_string()))
            }
        }
        Value::String(s) if s.trim().parse::<f64>().is_ok_and(|x| !x.is_finite()) => {
            Err(InstanceError::NonFinite(format!("{loc}: \"{s}\"")))
        }
        _ => Err(InstanceError::Schema(format!("{loc}: expected a number"))),
    }
}

fn parse_entry(v: &Value, loc: &str) -> Result<C64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(C64::new(
            parse_component(re, &format!("{loc} real part"))?,
            parse_component(im, &format!("{loc} imaginary part"))?,
        )),
        _ => Err(InstanceError::Schema(format!(
            "{loc}: complex entry must be a [re, im] pair"
        ))),
    }
}

/// Row list of `[re, im]` entries; rows must share one length.
pub fn parse_matrix(v: &Value, loc: &str) -> Result<ComplexMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| InstanceError::Schema(format!("{loc} must be an array of rows")))?;
    if rows.is_empty() {
        return Err(InstanceError::Dimension(format!("{loc} has no rows")));
    }
    let mut data = Vec::new();
    let mut cols = None;
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| InstanceError::Schema(format!("{loc} row {i} must be an array")))?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(InstanceError::Dimension(format!(
                    "{loc} row {i} has {} entries, expected {c}",
                    row.len()
                )))
            }
            _ => {}
        }
        for (j, entry) in row.iter().enumerate() {
            data.push(parse_entry(entry, &format!("{loc} entry ({i}, {j})"))?);
        }
    }
    let cols = cols.unwrap_or(0);
    if cols == 0 {
        return Err(InstanceError::Dimension(format!("{loc} has empty rows")));
    }
    ComplexMatrix::from_row_major(rows.len(), cols, data).map_err(|e| InstanceError::Invalid(e.to_string()))
}

pub fn matrix_value(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    m.row(i)
                        .iter()
                        .map(|z| Value::Array(vec![z.re.into(), z.im.into()]))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn parse_instance(path: &Path) -> Result<InstanceFile> {
    InstanceFile::from_json_str(&read(path)?)
}

pub fn emit_instance(inst: &InstanceFile, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, inst.to_json_string())
}

/// Standalone rectangular matrix file: a JSON row list of `[re, im]` entries.
pub fn parse_matrix_file(path: &Path) -> Result<ComplexMatrix> {
    parse_matrix(&parse_value(&read(path)?)?, "matrix")
}

/// Vector pair family file: `{"n": N, "pairs": [{"x": [[re, im], …], "y": […]}, …]}`.
pub fn parse_pairs_file(path: &Path) -> Result<VectorPairFamily> {
    let value = parse_value(&read(path)?)?;
    serde_json::from_value(value).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("dimension") {
            InstanceError::Dimension(msg)
        } else if msg.contains("non-finite") {
            InstanceError::NonFinite(msg)
        } else {
            InstanceError::Schema(msg)
        }
    })
}
