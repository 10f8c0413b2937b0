//! Input-output examples and their CSV form.
//!
//! A spec file has a header `in_0,...,in_{k-1},out` followed by one row per
//! example. Input files for spec generation use the same layout without the
//! `out` column.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SpecSet<T> {
    arity: usize,
    inputs: Vec<Vec<T>>,
    outputs: Vec<T>,
}

impl<T: Scalar> SpecSet<T> {
    pub fn new(inputs: Vec<Vec<T>>, outputs: Vec<T>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::EmptySpec);
        }
        if inputs.len() != outputs.len() {
            return Err(Error::Spec(format!(
                "{} input row(s) but {} output(s)",
                inputs.len(),
                outputs.len()
            )));
        }
        let arity = inputs[0].len();
        if arity == 0 {
            return Err(Error::Spec("rows must have at least one input".into()));
        }
        for (row, (x, y)) in inputs.iter().zip(&outputs).enumerate() {
            if x.len() != arity {
                return Err(Error::Spec(format!(
                    "row {row}: {} input(s), expected {arity}",
                    x.len()
                )));
            }
            if !x.iter().chain(std::iter::once(y)).all(|v| v.is_finite()) {
                return Err(Error::Spec(format!("row {row}: non-finite value")));
            }
        }
        Ok(SpecSet {
            arity,
            inputs,
            outputs,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn inputs(&self) -> &[Vec<T>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[T] {
        &self.outputs
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&[T], &T)> {
        self.inputs.iter().map(Vec::as_slice).zip(&self.outputs)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut header: Vec<String> = (0..self.arity).map(|i| format!("in_{i}")).collect();
        header.push("out".into());
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Spec(e.to_string());
        out.write_record(&header).map_err(csv_err)?;
        for (x, y) in self.pairs() {
            let row: Vec<String> = x.iter().chain(std::iter::once(y)).map(|v| format!("{v:?}")).collect();
            out.write_record(&row).map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::Spec(e.to_string()))
    }
}

/// Reads header plus numeric rows; `with_out` selects spec vs. inputs layout.
fn read_table<T: Scalar, R: Read>(r: R, with_out: bool) -> Result<Vec<Vec<T>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let header = reader
        .headers()
        .map_err(|e| Error::Spec(format!("line 1: {e}")))?
        .clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(Error::Spec("empty file".into()));
    }
    let inputs = if with_out { header.len() - 1 } else { header.len() };
    let mut expected: Vec<String> = (0..inputs).map(|i| format!("in_{i}")).collect();
    if with_out {
        expected.push("out".into());
    }
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Spec(format!(
            "line 1: header must be `{}`, found `{}`",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    if inputs == 0 {
        return Err(Error::Spec("line 1: at least one input column is required".into()));
    }

    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Spec(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(Error::Spec(format!(
                "line {line}: {} column(s), expected {}",
                rec.len(),
                header.len()
            )));
        }
        let row = rec
            .iter()
            .zip(header.iter())
            .map(|(cell, col)| {
                let v: T = cell.parse().map_err(|_| {
                    Error::Spec(format!("line {line}, column `{col}`: `{cell}` is not a number"))
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Spec(format!("line {line}, column `{col}`: non-finite value")))
                }
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Spec("no data rows".into()));
    }
    Ok(rows)
}

pub fn read_spec<T: Scalar, R: Read>(r: R) -> Result<SpecSet<T>> {
    let rows = read_table(r, true)?;
    let (inputs, outputs) = rows
        .into_iter()
        .map(|mut row| {
            let y = row.pop().expect("row has an output column");
            (row, y)
        })
        .unzip();
    SpecSet::new(inputs, outputs)
}

pub fn load_spec<T: Scalar>(path: impl AsRef<Path>) -> Result<SpecSet<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_spec(file).map_err(|e| match e {
        Error::Spec(msg) => Error::Spec(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_spec<T: Scalar>(spec: &SpecSet<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    spec.write_csv(file)
}

/// Reads an input table (`in_0,...,in_{k-1}` header) for spec generation.
pub fn load_inputs<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<Vec<T>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_table(file, false).map_err(|e| match e {
        Error::Spec(msg) => Error::Spec(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_exp1() {
        let s: SpecSet<f64> =
            read_spec("in_0,out\n1.0,2.1\n2.0,4.2\n4.0,16.8\n5.0,21.0\n".as_bytes()).unwrap();
        assert_eq!(s.arity(), 1);
        assert_eq!(s.outputs(), &[2.1, 4.2, 16.8, 21.0]);
        assert_eq!(s.inputs()[2], vec![4.0]);
    }

    #[test]
    fn reads_exp2() {
        let s: SpecSet<f64> = read_spec(
            "in_0,in_1,out\n5.8,2.5,14.1\n5.0,6.2,-4.677419\n7.4,6.1,20.9\n5.5,9.4,-5.287234\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(s.arity(), 2);
        assert_eq!(s.inputs()[3], vec![5.5, 9.4]);
        assert_eq!(s.outputs()[1], -4.677419);
    }

    #[test]
    fn ragged_row() {
        let err = read_spec::<f64, _>("in_0,out\n1.0,2.1\n2.0,3.0,4.2\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn bad_cells() {
        assert!(read_spec::<f64, _>("in_0,out\n1.0,abc\n".as_bytes()).is_err());
        assert!(read_spec::<f64, _>("in_0,out\n1.0,inf\n".as_bytes()).is_err());
        assert!(read_spec::<f64, _>("in_0,out\n1.0,NaN\n".as_bytes()).is_err());
        assert!(read_spec::<f64, _>("".as_bytes()).is_err());
        assert!(read_spec::<f64, _>("in_0,out\n".as_bytes()).is_err());
        assert!(read_spec::<f64, _>("x,y\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = SpecSet::new(vec![vec![0.1, -3.0], vec![1e-9, 7.25]], vec![1.0 / 3.0, -0.0]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back: SpecSet<f64> = read_spec(buf.as_slice()).unwrap();
        assert_eq!(back, s);
    }
}
