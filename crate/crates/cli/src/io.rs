//! JSON instance formats and CSV row encoding.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use tslab_core::lorentz::GroupElement;
use tslab_core::polar::{KahResult, TripleDirections};

use crate::error::{CliError, CliResult};

/// Relative Lorentz defect accepted for group elements read from JSON.
pub const INPUT_GROUP_TOL: f64 = 1e-9;

/// `{"n": n, "m": [(n+1)² entries, row-major]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElementJson {
    pub n: usize,
    pub m: Vec<f64>,
}

impl GroupElementJson {
    pub fn from_group(g: &GroupElement) -> Self {
        let m = g.matrix();
        let d = m.nrows();
        GroupElementJson {
            n: g.n(),
            m: (0..d)
                .flat_map(|i| (0..d).map(move |j| m[(i, j)]))
                .collect(),
        }
    }

    pub fn to_group(&self) -> CliResult<GroupElement> {
        let d = self.n + 1;
        if self.n < 2 || self.m.len() != d * d {
            return Err(CliError::InvalidInput(format!(
                "group element with n = {} needs {} entries, got {}",
                self.n,
                d * d,
                self.m.len()
            )));
        }
        let m = DMatrix::from_row_slice(d, d, &self.m);
        Ok(GroupElement::from_matrix(m, INPUT_GROUP_TOL)?)
    }
}

/// `{"g1", "g2", "g3"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleJson {
    pub g1: GroupElementJson,
    pub g2: GroupElementJson,
    pub g3: GroupElementJson,
}

impl TripleJson {
    pub fn from_triple(g: &[GroupElement; 3]) -> Self {
        TripleJson {
            g1: GroupElementJson::from_group(&g[0]),
            g2: GroupElementJson::from_group(&g[1]),
            g3: GroupElementJson::from_group(&g[2]),
        }
    }

    pub fn to_triple(&self) -> CliResult<[GroupElement; 3]> {
        Ok([
            self.g1.to_group()?,
            self.g2.to_group()?,
            self.g3.to_group()?,
        ])
    }
}

/// `{"u1", "u2", "u3"}` as plain arrays of unit vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirsJson {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub u3: Vec<f64>,
}

impl DirsJson {
    pub fn from_dirs(dirs: &TripleDirections) -> Self {
        let v = |j: usize| dirs.u(j).iter().copied().collect();
        DirsJson {
            u1: v(0),
            u2: v(1),
            u3: v(2),
        }
    }

    pub fn to_dirs(&self) -> CliResult<TripleDirections> {
        let v = |x: &Vec<f64>| DVector::from_column_slice(x);
        Ok(TripleDirections::new(
            v(&self.u1),
            v(&self.u2),
            v(&self.u3),
        )?)
    }
}

/// Factors `g_j = k_j a_j h` of a successful decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub k1: GroupElementJson,
    pub k2: GroupElementJson,
    pub k3: GroupElementJson,
    pub t: [f64; 3],
    pub h: GroupElementJson,
    pub residual: f64,
}

impl DecompositionJson {
    pub fn from_result(res: &KahResult) -> Self {
        DecompositionJson {
            k1: GroupElementJson::from_group(&res.k[0]),
            k2: GroupElementJson::from_group(&res.k[1]),
            k3: GroupElementJson::from_group(&res.k[2]),
            t: res.t,
            h: GroupElementJson::from_group(&res.h),
            residual: res.residual,
        }
    }
}

/// One polar instance; the decomposition is present in output and ignored
/// on input, so a polar JSON report can be fed back with `--input`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarRecord {
    pub triple: TripleJson,
    pub dirs: DirsJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarInput {
    pub records: Vec<PolarRecord>,
}

/// Reads `{"records": [...]}`; other top-level fields are ignored.
pub fn read_polar_input(path: &Path) -> CliResult<Vec<([GroupElement; 3], TripleDirections)>> {
    let text = std::fs::read_to_string(path)?;
    let input: PolarInput = serde_json::from_str(&text)?;
    if input.records.is_empty() {
        return Err(CliError::InvalidInput("input has no records".into()));
    }
    input
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let g = r.triple.to_triple()?;
            let dirs = r.dirs.to_dirs()?;
            if g.iter().any(|x| x.n() != dirs.n()) {
                return Err(CliError::InvalidInput(format!(
                    "record {i}: group and direction dimensions differ"
                )));
            }
            Ok((g, dirs))
        })
        .collect()
}

/// CSV float encoding with 17 significant digits; missing values are empty.
pub fn format_float(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.16e}"),
        None => String::new(),
    }
}

pub fn parse_float(field: &str) -> CliResult<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|e| CliError::InvalidInput(format!("bad float `{field}`: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tslab_core::lorentz::{random_group_element, trial_rng};

    #[test]
    fn group_json_is_row_major_and_exact() {
        let g = random_group_element(3, &mut trial_rng(5, 0));
        let j = GroupElementJson::from_group(&g);
        assert_eq!(j.m[1], g.matrix()[(0, 1)]);
        let text = serde_json::to_string(&j).unwrap();
        let back: GroupElementJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_group().unwrap(), g);
    }

    #[test]
    fn rejects_malformed_group() {
        let short = GroupElementJson {
            n: 2,
            m: vec![1.0; 8],
        };
        assert!(short.to_group().is_err());
        let mut m = vec![0.0; 9];
        m[0] = 2.0;
        m[4] = 1.0;
        m[8] = 1.0;
        assert!(GroupElementJson { n: 2, m }.to_group().is_err());
    }

    #[test]
    fn floats_keep_every_bit() {
        for x in [
            0.1,
            -1.0 / 3.0,
            6.02214076e23,
            f64::MIN_POSITIVE,
            1.0 - f64::EPSILON,
        ] {
            assert_eq!(parse_float(&format_float(Some(x))).unwrap(), Some(x));
        }
        assert_eq!(parse_float("").unwrap(), None);
    }
}
