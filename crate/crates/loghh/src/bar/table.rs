//! Containers for per-degree homological output.
//!
//! A GradedComplex keeps the actual chain complexes of an enumeration, one
//! per grading degree, so a second pass can take homology with different
//! coefficients or inspect the matrices. A HomotopyTable keeps the final
//! module descriptions indexed by (homotopy degree, grading degree). Tables
//! know their truncation bound and their degree window and reject queries
//! outside either, so a zero answer always means "computed and zero",
//! never "not requested".

use crate::abelian::{Coefficients, Complex, ModuleDesc};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::str::FromStr;

/// Formats a grading degree as a JSON key: "(2,-1)", or "()" for the
/// zero-length degree of an ungraded direction.
pub fn degree_key(degree: &[BigInt]) -> String {
    let inner: Vec<String> = degree.iter().map(|x| x.to_string()).collect();
    format!("({})", inner.join(","))
}

/// Inverse of `degree_key`.
pub fn parse_degree_key(key: &str) -> Result<Vec<BigInt>> {
    let inner = key
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::invalid("homotopy-table", format!("malformed degree key {key:?}")))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|part| {
            BigInt::from_str(part.trim()).map_err(|_| {
                Error::invalid("homotopy-table", format!("malformed degree key {key:?}"))
            })
        })
        .collect()
}

/// All integer vectors of the given length with every coordinate in
/// [-radius, radius], in lexicographic order. The usual degree window for
/// table-valued operations.
pub fn degree_box(len: usize, radius: i64) -> Vec<Vec<BigInt>> {
    let mut out: Vec<Vec<BigInt>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * (2 * radius as usize + 1));
        for prefix in &out {
            for c in -radius..=radius {
                let mut v = prefix.clone();
                v.push(BigInt::from(c));
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn desc_to_json(desc: &ModuleDesc) -> Value {
    let torsion: Vec<Value> = desc
        .torsion
        .iter()
        .map(|d| match u64::try_from(d.clone()) {
            Ok(n) => Value::from(n),
            Err(_) => Value::from(d.to_string()),
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("rank".to_string(), Value::from(desc.rank as u64));
    obj.insert("torsion".to_string(), Value::from(torsion));
    Value::Object(obj)
}

fn desc_from_json(v: &Value) -> Result<ModuleDesc> {
    let bad = || Error::invalid("homotopy-table", "malformed module description");
    let obj = v.as_object().ok_or_else(bad)?;
    let rank = obj.get("rank").and_then(Value::as_u64).ok_or_else(bad)? as usize;
    let torsion = obj
        .get("torsion")
        .and_then(Value::as_array)
        .ok_or_else(bad)?
        .iter()
        .map(|t| match t {
            Value::Number(n) => n.as_u64().map(BigInt::from).ok_or_else(bad),
            Value::String(s) => BigInt::from_str(s).map_err(|_| bad()),
            _ => Err(bad()),
        })
        .collect::<Result<Vec<BigInt>>>()?;
    Ok(ModuleDesc { rank, torsion })
}

/// Truncated homotopy groups of a graded construction: a module description
/// for each homotopy degree n <= qmax and each grading degree in the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyTable {
    qmax: usize,
    degrees: Vec<Vec<BigInt>>,
    entries: BTreeMap<(usize, Vec<BigInt>), ModuleDesc>,
}

impl HomotopyTable {
    pub fn new(qmax: usize, degrees: &[Vec<BigInt>]) -> HomotopyTable {
        let mut sorted: Vec<Vec<BigInt>> = degrees.to_vec();
        sorted.sort();
        sorted.dedup();
        HomotopyTable { qmax, degrees: sorted, entries: BTreeMap::new() }
    }

    pub fn qmax(&self) -> usize {
        self.qmax
    }

    pub fn degrees(&self) -> &[Vec<BigInt>] {
        &self.degrees
    }

    pub fn in_window(&self, degree: &[BigInt]) -> bool {
        self.degrees.binary_search_by(|d| d.as_slice().cmp(degree)).is_ok()
    }

    pub fn set(&mut self, n: usize, degree: &[BigInt], desc: ModuleDesc) -> Result<()> {
        if n > self.qmax {
            return Err(Error::invalid(
                "homotopy-table",
                format!("homotopy degree {n} exceeds the truncation bound {}", self.qmax),
            ));
        }
        if !self.in_window(degree) {
            return Err(Error::invalid(
                "homotopy-table",
                format!("grading degree {} is outside the window", degree_key(degree)),
            ));
        }
        if desc.rank == 0 && desc.torsion.is_empty() {
            self.entries.remove(&(n, degree.to_vec()));
        } else {
            self.entries.insert((n, degree.to_vec()), desc);
        }
        Ok(())
    }

    /// The entry at (n, degree); zero when nothing was stored there. Queries
    /// outside the truncation bound or the degree window are errors.
    pub fn get(&self, n: usize, degree: &[BigInt]) -> Result<ModuleDesc> {
        if n > self.qmax {
            return Err(Error::invalid(
                "homotopy-table",
                format!("homotopy degree {n} exceeds the truncation bound {}", self.qmax),
            ));
        }
        if !self.in_window(degree) {
            return Err(Error::invalid(
                "homotopy-table",
                format!("grading degree {} is outside the window", degree_key(degree)),
            ));
        }
        Ok(self
            .entries
            .get(&(n, degree.to_vec()))
            .cloned()
            .unwrap_or_else(ModuleDesc::zero))
    }

    /// Nonzero entries in canonical order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, &Vec<BigInt>, &ModuleDesc)> {
        self.entries.iter().map(|((n, d), m)| (*n, d, m))
    }

    /// Total rank over all entries with homotopy degree n.
    pub fn total_rank(&self, n: usize) -> usize {
        self.entries
            .iter()
            .filter(|((m, _), _)| *m == n)
            .map(|(_, d)| d.rank)
            .sum()
    }

    /// {"pi": {"n": {"(degree)": {"rank": r, "torsion": [...]}}}}, nonzero
    /// entries only, canonically ordered by the serializer's sorted maps.
    pub fn to_json(&self) -> Value {
        let mut pi: Map<String, Value> = Map::new();
        for ((n, degree), desc) in &self.entries {
            let level = pi
                .entry(n.to_string())
                .or_insert_with(|| Value::Object(Map::new()));
            level
                .as_object_mut()
                .expect("level objects are always maps")
                .insert(degree_key(degree), desc_to_json(desc));
        }
        let mut root = Map::new();
        root.insert("pi".to_string(), Value::Object(pi));
        Value::Object(root)
    }

    /// Rebuilds a table from its serialization. The window becomes the set
    /// of degrees that appear; the truncation bound becomes the largest
    /// homotopy degree present (or the given floor if larger).
    pub fn from_json(v: &Value, qmax_floor: usize) -> Result<HomotopyTable> {
        let bad = || Error::invalid("homotopy-table", "malformed table serialization");
        let pi = v.get("pi").and_then(Value::as_object).ok_or_else(bad)?;
        let mut qmax = qmax_floor;
        let mut parsed: Vec<(usize, Vec<BigInt>, ModuleDesc)> = Vec::new();
        for (n_key, level) in pi {
            let n: usize = n_key.parse().map_err(|_| bad())?;
            qmax = qmax.max(n);
            for (d_key, desc) in level.as_object().ok_or_else(bad)? {
                parsed.push((n, parse_degree_key(d_key)?, desc_from_json(desc)?));
            }
        }
        let degrees: Vec<Vec<BigInt>> = parsed.iter().map(|(_, d, _)| d.clone()).collect();
        let mut table = HomotopyTable::new(qmax, &degrees);
        for (n, d, desc) in parsed {
            table.set(n, &d, desc)?;
        }
        Ok(table)
    }
}

/// A chain complex for each grading degree where an enumeration produced
/// one. Degrees without a complex have zero homology everywhere.
#[derive(Clone, Debug, Default)]
pub struct GradedComplex {
    complexes: BTreeMap<Vec<BigInt>, Complex>,
}

impl GradedComplex {
    pub fn new() -> GradedComplex {
        GradedComplex::default()
    }

    pub fn insert(&mut self, degree: Vec<BigInt>, complex: Complex) {
        self.complexes.insert(degree, complex);
    }

    pub fn get(&self, degree: &[BigInt]) -> Option<&Complex> {
        self.complexes.get(degree)
    }

    pub fn degrees(&self) -> impl Iterator<Item = &Vec<BigInt>> {
        self.complexes.keys()
    }

    /// Takes homology per degree and assembles the table over the given
    /// window. Degrees in the window without a complex come out zero.
    pub fn homology_table(
        &self,
        qmax: usize,
        k: Coefficients,
        window: &[Vec<BigInt>],
    ) -> Result<HomotopyTable> {
        let mut table = HomotopyTable::new(qmax, window);
        for (degree, complex) in &self.complexes {
            for n in 0..=qmax {
                table.set(n, degree, complex.homology(n, k)?)?;
            }
        }
        Ok(table)
    }
}

/// True when every coordinate is zero.
pub(crate) fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(|x| x.is_zero())
}
