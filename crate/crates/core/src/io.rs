//! JSON formats for instances, loops and subspaces.
//!
//! Complex numbers are `[re, im]` (a bare number is read as real).
//! Matrices are lists of rows. A subspace is
//! `{"ambient": n, "frame": [column, ...], "dim": k}` where each column is a
//! generator of length `n` and `dim` is optional; when present it must
//! equal the numerical rank of the frame.
//!
//! Decoding errors name the offending field, e.g.
//! `invalid input: dom_max.frame[1][0]: expected [re, im]`.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::extension::{NestedPair, OperatorPair};
use crate::family::SampledLoop;
use crate::grassmann::Subspace;
use crate::numeric::{numerical_rank, Tolerance};
use crate::scalar::{c, CMatrix, Real, C};
use crate::symplectic::SymplecticSpace;

fn invalid(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{path}: {msg}"))
}

fn field<'a>(obj: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    obj.as_object()
        .ok_or_else(|| invalid(path, "expected an object"))?
        .get(key)
        .ok_or_else(|| invalid(&join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| invalid(path, "expected an array"))
}

fn count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| invalid(path, "expected a non-negative integer"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| invalid(path, "expected a number"))?;
    if !x.is_finite() {
        return Err(invalid(path, "non-finite number"));
    }
    Ok(x)
}

pub fn decode_complex<T: Real>(v: &Value, path: &str) -> Result<C<T>> {
    if v.is_number() {
        return Ok(c(T::lit(number(v, path)?), T::zero()));
    }
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(c(T::lit(number(re, path)?), T::lit(number(im, path)?))),
        _ => Err(invalid(path, "expected [re, im]")),
    }
}

pub fn encode_complex<T: Real>(z: C<T>) -> Value {
    json!([z.re.to_f64_lossy(), z.im.to_f64_lossy()])
}

/// A matrix given as a list of rows.
pub fn decode_matrix<T: Real>(v: &Value, path: &str) -> Result<CMatrix<T>> {
    let rows = array(v, path)?;
    let mut entries = Vec::new();
    let mut width = None;
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let row = array(row, &rp)?;
        if *width.get_or_insert(row.len()) != row.len() {
            return Err(invalid(&rp, "rows have different lengths"));
        }
        for (j, z) in row.iter().enumerate() {
            entries.push(decode_complex(z, &format!("{rp}[{j}]"))?);
        }
    }
    let cols = width.unwrap_or(0);
    Ok(CMatrix::from_row_slice(rows.len(), cols, &entries))
}

pub fn encode_matrix<T: Real>(m: &CMatrix<T>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| encode_complex(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn decode_subspace<T: Real>(v: &Value, path: &str, tol: &Tolerance<T>) -> Result<Subspace<T>> {
    let ambient = count(field(v, path, "ambient")?, &join(path, "ambient"))?;
    let fp = join(path, "frame");
    let columns = array(field(v, path, "frame")?, &fp)?;
    let mut m = CMatrix::zeros(ambient, columns.len());
    for (j, col) in columns.iter().enumerate() {
        let cp = format!("{fp}[{j}]");
        let col = array(col, &cp)?;
        if col.len() != ambient {
            return Err(invalid(&cp, format!("generator has length {}, ambient is {ambient}", col.len())));
        }
        for (i, z) in col.iter().enumerate() {
            m[(i, j)] = decode_complex(z, &format!("{cp}[{i}]"))?;
        }
    }
    let s = Subspace::span(&m, tol).map_err(|e| invalid(&fp, e))?;
    if let Some(d) = v.get("dim") {
        let dp = join(path, "dim");
        let declared = count(d, &dp)?;
        if declared != s.dim() {
            let rank = numerical_rank(&m, tol).unwrap_or(s.dim());
            return Err(invalid(&dp, format!("declared {declared}, frame has numerical rank {rank}")));
        }
    }
    Ok(s)
}

pub fn encode_subspace<T: Real>(s: &Subspace<T>) -> Value {
    let b = s.basis();
    let frame: Vec<Value> = (0..b.ncols())
        .map(|j| Value::Array((0..b.nrows()).map(|i| encode_complex(b[(i, j)])).collect()))
        .collect();
    json!({ "ambient": s.ambient_dim(), "dim": s.dim(), "frame": frame })
}

/// `{"standard": n}` or `{"ambient": m, "j": matrix}`.
pub fn decode_symplectic<T: Real>(v: &Value, path: &str, tol: &Tolerance<T>) -> Result<SymplecticSpace<T>> {
    if let Some(n) = v.get("standard") {
        return Ok(SymplecticSpace::standard(count(n, &join(path, "standard"))?, tol));
    }
    let ambient = count(field(v, path, "ambient")?, &join(path, "ambient"))?;
    let jp = join(path, "j");
    let j = decode_matrix(field(v, path, "j")?, &jp)?;
    if j.shape() != (ambient, ambient) {
        return Err(invalid(&jp, format!("expected {ambient}×{ambient}")));
    }
    SymplecticSpace::new(j, tol).map_err(|e| invalid(&jp, e))
}

/// `{"n", "action", "dom_max", "dom_min"}`.
pub fn decode_operator_pair<T: Real>(v: &Value, path: &str, tol: &Tolerance<T>) -> Result<OperatorPair<T>> {
    let n = count(field(v, path, "n")?, &join(path, "n"))?;
    let ap = join(path, "action");
    let action = decode_matrix(field(v, path, "action")?, &ap)?;
    if action.shape() != (n, n) {
        return Err(invalid(&ap, format!("expected {n}×{n}")));
    }
    let dom_max = decode_subspace(field(v, path, "dom_max")?, &join(path, "dom_max"), tol)?;
    let dom_min = decode_subspace(field(v, path, "dom_min")?, &join(path, "dom_min"), tol)?;
    OperatorPair::new(action, dom_max, dom_min, tol).map_err(|e| invalid(path, e))
}

/// `{"ambient", "gamma_min", "gamma_max"}`.
pub fn decode_nested_pair<T: Real>(v: &Value, path: &str, tol: &Tolerance<T>) -> Result<NestedPair<T>> {
    let ambient = count(field(v, path, "ambient")?, &join(path, "ambient"))?;
    let gamma_min = decode_subspace(field(v, path, "gamma_min")?, &join(path, "gamma_min"), tol)?;
    let gamma_max = decode_subspace(field(v, path, "gamma_max")?, &join(path, "gamma_max"), tol)?;
    if gamma_max.ambient_dim() != ambient {
        return Err(invalid(&join(path, "gamma_max"), format!("expected ambient {ambient}")));
    }
    NestedPair::new(gamma_min, gamma_max, tol).map_err(|e| invalid(path, e))
}

/// Input of `fredholm-lab index`.
#[derive(Debug, Clone)]
pub enum IndexInstance<T: Real> {
    /// `{"s": subspace, "t": subspace}`
    Pair { s: Subspace<T>, t: Subspace<T> },
    /// An operator pair with an optional `"l"` (default `0`) in `Ĥ = H ⊕ H`.
    Operator { op: OperatorPair<T>, l: Subspace<T> },
    /// A nested pair with `"m"` and an optional `"l"` (default `0`).
    Nested {
        pair: NestedPair<T>,
        m: Subspace<T>,
        l: Subspace<T>,
    },
}

fn optional_subspace<T: Real>(v: &Value, key: &str, ambient: usize, tol: &Tolerance<T>) -> Result<Subspace<T>> {
    match v.get(key) {
        None => Ok(Subspace::zero(ambient)),
        Some(x) => {
            let s = decode_subspace(x, key, tol)?;
            if s.ambient_dim() != ambient {
                return Err(invalid(key, format!("expected ambient {ambient}")));
            }
            Ok(s)
        }
    }
}

pub fn decode_index_instance<T: Real>(v: &Value, tol: &Tolerance<T>) -> Result<IndexInstance<T>> {
    if !v.is_object() {
        return Err(invalid("<root>", "expected an object"));
    }
    if v.get("action").is_some() {
        let op = decode_operator_pair(v, "", tol)?;
        let l = optional_subspace(v, "l", 2 * op.space_dim(), tol)?;
        return Ok(IndexInstance::Operator { op, l });
    }
    if v.get("gamma_min").is_some() {
        let pair = decode_nested_pair(v, "", tol)?;
        let m = decode_subspace(field(v, "", "m")?, "m", tol)?;
        if m.ambient_dim() != pair.ambient_dim() {
            return Err(invalid("m", format!("expected ambient {}", pair.ambient_dim())));
        }
        let l = optional_subspace(v, "l", pair.ambient_dim(), tol)?;
        return Ok(IndexInstance::Nested { pair, m, l });
    }
    let s = decode_subspace(field(v, "", "s")?, "s", tol)?;
    let t = decode_subspace(field(v, "", "t")?, "t", tol)?;
    if s.ambient_dim() != t.ambient_dim() {
        return Err(invalid("t", format!("expected ambient {}", s.ambient_dim())));
    }
    Ok(IndexInstance::Pair { s, t })
}

/// Input of `fredholm-lab winding`.
#[derive(Debug, Clone)]
pub enum LoopFile<T: Real> {
    /// Samples are unitary matrices.
    Unitary(SampledLoop<CMatrix<T>>),
    /// Samples are Lagrangian subspaces of `space`, measured against `m`
    /// (default `H ⊕ 0` in a standard space).
    Lagrangian {
        space: SymplecticSpace<T>,
        family: SampledLoop<Subspace<T>>,
        m: Subspace<T>,
    },
}

/// `{"params", "samples", "closed", "symplectic"?, "m"?}`. A loop declared
/// with `"closed": false` is rejected as not closed.
pub fn decode_loop<T: Real>(v: &Value, tol: &Tolerance<T>) -> Result<LoopFile<T>> {
    let params: Vec<f64> = array(field(v, "", "params")?, "params")?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("params[{i}]")))
        .collect::<Result<_>>()?;
    let samples = array(field(v, "", "samples")?, "samples")?;
    let closed = field(v, "", "closed")?
        .as_bool()
        .ok_or_else(|| invalid("closed", "expected a boolean"))?;
    if samples.len() != params.len() {
        return Err(invalid("samples", format!("{} samples for {} params", samples.len(), params.len())));
    }
    let lagrangian = samples.first().is_some_and(Value::is_object);
    if !lagrangian {
        let mats = samples
            .iter()
            .enumerate()
            .map(|(i, s)| decode_matrix::<T>(s, &format!("samples[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        if !closed {
            let gap = match (mats.first(), mats.last()) {
                (Some(a), Some(b)) if a.shape() == b.shape() => crate::numeric::spectral_norm(&(a - b)).to_f64_lossy(),
                _ => f64::INFINITY,
            };
            return Err(Error::NotClosed { gap });
        }
        return Ok(LoopFile::Unitary(
            SampledLoop::new(params, mats).map_err(|e| invalid("params", e))?,
        ));
    }
    let space = decode_symplectic(field(v, "", "symplectic")?, "symplectic", tol)?;
    let n = space.ambient_dim();
    let subspaces = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let p = format!("samples[{i}]");
            let s = decode_subspace(s, &p, tol)?;
            if s.ambient_dim() != n {
                return Err(invalid(&p, format!("expected ambient {n}")));
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    if !closed {
        let gap = crate::grassmann::gap_distance(&subspaces[0], &subspaces[subspaces.len() - 1]);
        return Err(Error::NotClosed { gap: gap.to_f64_lossy() });
    }
    let m = match (v.get("m"), space.standard_dim()) {
        (Some(m), _) => decode_subspace(m, "m", tol)?,
        (None, Some(k)) => crate::extension::horizontal(k),
        (None, None) => return Err(invalid("m", "missing field (required for a non-standard space)")),
    };
    if m.ambient_dim() != n {
        return Err(invalid("m", format!("expected ambient {n}")));
    }
    let family = SampledLoop::new(params, subspaces).map_err(|e| invalid("params", e))?;
    Ok(LoopFile::Lagrangian { space, family, m })
}

pub fn encode_unitary_loop<T: Real>(l: &SampledLoop<CMatrix<T>>) -> Value {
    json!({
        "params": l.params(),
        "samples": l.samples().iter().map(encode_matrix).collect::<Vec<_>>(),
        "closed": true,
    })
}

pub fn encode_lagrangian_loop<T: Real>(sp_standard: usize, l: &SampledLoop<Subspace<T>>, m: &Subspace<T>) -> Value {
    let mut obj = Map::new();
    obj.insert("params".into(), json!(l.params()));
    obj.insert(
        "samples".into(),
        Value::Array(l.samples().iter().map(encode_subspace).collect()),
    );
    obj.insert("closed".into(), json!(true));
    obj.insert("symplectic".into(), json!({ "standard": sp_standard }));
    obj.insert("m".into(), encode_subspace(m));
    Value::Object(obj)
}
