use std::io::{Read, Write};
use std::path::Path;

use crate::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// Weighted point cloud in `R^d`.
///
/// Points are stored flat, row by row. Weights are nonnegative and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl ParticleEnsemble {
    /// Build from a list of points. `None` weights means uniform.
    pub fn new(points: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.len());
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::invalid("points have differing dimensions"));
        }
        Self::from_flat(dim, points.into_iter().flatten().collect(), weights)
    }

    /// Build from row-major flat storage.
    pub fn from_flat(dim: usize, points: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("ensemble dimension must be at least 1"));
        }
        if points.is_empty() || points.len() % dim != 0 {
            return Err(Error::invalid("ensemble needs at least one point of the given dimension"));
        }
        let n = points.len() / dim;
        if let Some(bad) = points.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite coordinate {bad}")));
        }
        let mut weights = weights.unwrap_or_else(|| vec![1.0 / n as f64; n]);
        if weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::invalid(format!("invalid weight {w}")));
        }
        let s: f64 = weights.iter().sum();
        if !(s > 0.0) {
            return Err(Error::invalid("weights sum to zero"));
        }
        if (s - 1.0).abs() > NORM_TOL {
            log::debug!("renormalizing ensemble weights (sum {s})");
            weights.iter_mut().for_each(|w| *w /= s);
        }
        Ok(ParticleEnsemble {
            dim,
            points,
            weights,
        })
    }

    /// Single point with unit mass.
    pub fn dirac(point: Vec<f64>) -> Result<Self> {
        Self::new(vec![point], None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Flat row-major coordinates.
    pub fn flat_points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    /// Copy without zero-weight points.
    pub fn pruned(&self) -> Self {
        let mut points = Vec::with_capacity(self.points.len());
        let mut weights = Vec::with_capacity(self.len());
        for (p, w) in self.iter() {
            if w > 0.0 {
                points.extend_from_slice(p);
                weights.push(w);
            }
        }
        ParticleEnsemble {
            dim: self.dim,
            points,
            weights,
        }
    }

    /// Weighted mean.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (p, w) in self.iter() {
            for (mi, pi) in m.iter_mut().zip(p) {
                *mi += w * pi;
            }
        }
        m
    }

    /// Apply `f` to every point, keeping weights.
    pub fn map_points<F>(&self, out_dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let mut out = vec![0.0; out_dim * self.len()];
        for (i, p) in self.points.chunks_exact(self.dim).enumerate() {
            f(p, &mut out[i * out_dim..(i + 1) * out_dim]);
        }
        Self::from_flat(out_dim, out, Some(self.weights.clone()))
    }

    /// Read the `w,x1,...,xd` CSV format (weights column optional).
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let has_w = headers.get(0) == Some("w");
        let dim = headers.len() - has_w as usize;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut vals = Vec::with_capacity(rec.len());
            for f in rec.iter() {
                vals.push(f.parse::<f64>().map_err(|_| {
                    Error::invalid(format!("row {}: cannot parse '{f}'", row + 1))
                })?);
            }
            if vals.len() != headers.len() {
                return Err(Error::invalid(format!("row {} has wrong field count", row + 1)));
            }
            if has_w {
                weights.push(vals[0]);
                points.extend_from_slice(&vals[1..]);
            } else {
                points.extend_from_slice(&vals);
            }
        }
        Self::from_flat(dim, points, has_w.then_some(weights))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    /// Write `w,x1,...,xd` with shortest round-trip float formatting.
    pub fn to_csv_writer<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["w".to_string()];
        header.extend((1..=self.dim).map(|k| format!("x{k}")));
        wtr.write_record(&header)?;
        for (p, w) in self.iter() {
            let mut rec = vec![w.to_string()];
            rec.extend(p.iter().map(|v| v.to_string()));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_csv_writer(std::fs::File::create(path)?)
    }
}
