//! Structured-text inputs and delimited trajectory tables.

use std::path::{Path, PathBuf};

use cadual_core::automaton::RuleTable;
use cadual_core::fermion::BooleanField;
use cadual_core::worldsheet::{Boundary, StringEnsemble, StringSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// `{"kind": "pairs", "pairs": [[0,1], ...], "dt": 1.0}` or
/// `{"kind": "cellular", "cells": .., "alphabet": .., "radius": .., "table": [..]}`.
pub fn read_rule_table(path: &Path) -> Result<RuleTable, CliError> {
    read_json(path)
}

/// Several strings in a common transverse space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleInput {
    pub transverse_dims: usize,
    #[serde(default)]
    pub self_exchange: bool,
    pub strings: Vec<StringSpec>,
}

impl EnsembleInput {
    pub fn build(self) -> Result<StringEnsemble, CliError> {
        let mut e = StringEnsemble::new(self.transverse_dims, self.strings)?;
        e.self_exchange = self.self_exchange;
        Ok(e)
    }
}

pub fn read_ensemble(path: &Path) -> Result<EnsembleInput, CliError> {
    read_json(path)
}

/// One slice: `[1, -1, ...]` for one component or `[[1, -1], ...]` per site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BooleanSlice {
    Single(Vec<i8>),
    Multi(Vec<Vec<i8>>),
}

impl BooleanSlice {
    fn rows(self) -> Vec<Vec<i8>> {
        match self {
            BooleanSlice::Single(v) => v.into_iter().map(|s| vec![s]).collect(),
            BooleanSlice::Multi(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BooleanInput {
    #[serde(default = "periodic")]
    pub boundary: Boundary,
    pub prev: BooleanSlice,
    pub cur: BooleanSlice,
}

fn periodic() -> Boundary {
    Boundary::Periodic
}

impl BooleanInput {
    pub fn build(self) -> Result<BooleanField, CliError> {
        Ok(BooleanField::new(self.boundary, self.prev.rows(), self.cur.rows())?)
    }
}

pub fn read_boolean(path: &Path) -> Result<BooleanInput, CliError> {
    read_json(path)
}

/// Tab-separated integer table with a header row.
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<i64>]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io {
        path: PathBuf::from(path),
        source: e.into(),
    };
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .from_path(path)
        .map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(i64::to_string)).map_err(io)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: PathBuf::from(path),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_slices_in_both_shapes() {
        let flat: BooleanInput = serde_json::from_str(r#"{"prev":[1,-1,1],"cur":[1,1,-1]}"#).unwrap();
        let nested: BooleanInput =
            serde_json::from_str(r#"{"boundary":"periodic","prev":[[1],[-1],[1]],"cur":[[1],[1],[-1]]}"#).unwrap();
        assert_eq!(flat.build().unwrap(), nested.build().unwrap());
    }

    #[test]
    fn ensemble_defaults() {
        let e: EnsembleInput = serde_json::from_str(
            r#"{"transverse_dims":1,"strings":[{"closed":true,"prev":[[0],[1],[2]],"cur":[[0],[1],[2]]}]}"#,
        )
        .unwrap();
        assert!(!e.self_exchange);
        assert_eq!(e.strings[0].orientation, 1);
        assert_eq!(e.build().unwrap().site_count(), 3);
    }

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.tsv");
        write_table(&p, &["step".into(), "x".into()], &[vec![0, -3], vec![1, 4]]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "step\tx\n0\t-3\n1\t4\n");
    }
}
