use std::io::Write;
use std::path::Path;

use super::simplex::{self, DenseCosts, PointCosts};
use crate::densities::ParticleEnsemble;
use crate::{Error, Result};

/// Largest `m * n` for which the cost matrix is precomputed.
const DENSE_LIMIT: usize = 4_000_000;
/// Problems with `m * n` at least this large get a restricted warm start.
const WARM_MIN: usize = 40_000;
/// Partners per node in the warm-start arc list.
const NEIGHBORS: usize = 16;

/// Optimal coupling between two weighted point clouds.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `(i, j, mass)` triplets with positive mass, sorted by `(i, j)`.
    pub entries: Vec<(usize, usize, f64)>,
    pub source_weights: Vec<f64>,
    pub target_weights: Vec<f64>,
    /// Optimal squared cost.
    pub cost: f64,
}

impl TransportPlan {
    pub fn w2(&self) -> f64 {
        self.cost.max(0.0).sqrt()
    }

    /// Largest absolute violation of the marginal and sign constraints.
    pub fn feasibility_residual(&self) -> f64 {
        let mut rows = self.source_weights.clone();
        let mut cols = self.target_weights.clone();
        let mut neg: f64 = 0.0;
        for &(i, j, f) in &self.entries {
            rows[i] -= f;
            cols[j] -= f;
            neg = neg.max(-f);
        }
        rows.iter()
            .chain(&cols)
            .fold(neg, |m, r| m.max(r.abs()))
    }

    /// Write the sparse triplet CSV `i,j,mass`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["i", "j", "mass"])?;
        for &(i, j, f) in &self.entries {
            w.write_record([i.to_string(), j.to_string(), f.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Order-2 Wasserstein distance between two weighted point clouds by exact
/// solution of the transportation LP with squared Euclidean costs.
pub fn w2_lp(source: &ParticleEnsemble, target: &ParticleEnsemble) -> Result<(f64, TransportPlan)> {
    let d = source.dim();
    if target.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: target.dim(),
        });
    }
    let sa: f64 = source.weights().iter().sum();
    let sb: f64 = target.weights().iter().sum();
    if (sa - sb).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "unbalanced transport problem: masses {sa} and {sb}"
        )));
    }
    let keep_s: Vec<usize> = (0..source.len()).filter(|&i| source.weights()[i] > 0.0).collect();
    let keep_t: Vec<usize> = (0..target.len()).filter(|&j| target.weights()[j] > 0.0).collect();
    let (m, n) = (keep_s.len(), keep_t.len());
    let supply: Vec<f64> = keep_s.iter().map(|&i| source.weights()[i]).collect();
    let mut demand: Vec<f64> = keep_t.iter().map(|&j| target.weights()[j]).collect();
    // absorb the sub-tolerance imbalance into the largest demand
    let imbalance = supply.iter().sum::<f64>() - demand.iter().sum::<f64>();
    let jmax = (0..n)
        .max_by(|&a, &b| demand[a].total_cmp(&demand[b]))
        .unwrap();
    demand[jmax] += imbalance;

    let mut xs = Vec::with_capacity(m * d);
    for &i in &keep_s {
        xs.extend_from_slice(source.point(i));
    }
    let mut ys = Vec::with_capacity(n * d);
    for &j in &keep_t {
        ys.extend_from_slice(target.point(j));
    }
    let raw = PointCosts {
        d,
        xs: xs.clone(),
        ys: ys.clone(),
    };
    let scale = max_cost(&raw, m, n);
    let scale = if scale > 0.0 { scale } else { 1.0 };

    let axis = principal_axis(&xs, &ys, d);
    let order = |pts: &[f64], k: usize| -> Vec<usize> {
        let proj: Vec<f64> = pts
            .chunks_exact(d)
            .map(|p| p.iter().zip(&axis).map(|(a, b)| a * b).sum())
            .collect();
        let mut idx: Vec<usize> = (0..k).collect();
        idx.sort_by(|&a, &b| proj[a].total_cmp(&proj[b]).then(a.cmp(&b)));
        idx
    };
    let os = order(&xs, m);
    let ot = order(&ys, n);
    let cands = (m * n >= WARM_MIN).then(|| linear_map_candidates(&xs, &ys, d, NEIGHBORS));
    let cands = cands.as_deref();

    let sol = if m * n <= DENSE_LIMIT {
        let mut c = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                c.push(simplex::CostOracle::cost(&raw, i, j) / scale);
            }
        }
        simplex::solve(&DenseCosts { n, c }, &supply, &demand, &os, &ot, cands)?
    } else {
        let f = 1.0 / scale.sqrt();
        let scaled = PointCosts {
            d,
            xs: xs.iter().map(|v| v * f).collect(),
            ys: ys.iter().map(|v| v * f).collect(),
        };
        simplex::solve(&scaled, &supply, &demand, &os, &ot, cands)?
    };
    log::debug!("transport {m}x{n}: {} pivots", sol.pivots);
    let mut cost = 0.0;
    let mut entries = Vec::with_capacity(sol.flows.len());
    for &(i, j, f) in &sol.flows {
        cost += f * simplex::CostOracle::cost(&raw, i, j);
        entries.push((keep_s[i], keep_t[j], f));
    }
    let plan = TransportPlan {
        entries,
        source_weights: source.weights().to_vec(),
        target_weights: target.weights().to_vec(),
        cost: cost.max(0.0),
    };
    Ok((plan.w2(), plan))
}

/// Candidate arcs for the warm start: each source's nearest targets after
/// the affine map matching the two clouds' means and covariances, and each
/// target's nearest sources under the inverse map.
fn linear_map_candidates(xs: &[f64], ys: &[f64], d: usize, k: usize) -> Vec<(usize, usize)> {
    use nalgebra::{DMatrix, DVector};
    let moments = |p: &[f64]| {
        let cnt = (p.len() / d) as f64;
        let mut mu = DVector::<f64>::zeros(d);
        for q in p.chunks_exact(d) {
            mu += DVector::from_column_slice(q) / cnt;
        }
        let mut cov = DMatrix::<f64>::zeros(d, d);
        for q in p.chunks_exact(d) {
            let z = DVector::from_column_slice(q) - &mu;
            cov += &z * z.transpose() / cnt;
        }
        (mu, cov)
    };
    let (ma, sa) = moments(xs);
    let (mb, sb) = moments(ys);
    let map = gaussian_map(&sa, &sb).unwrap_or_else(|| DMatrix::identity(d, d));
    let inv = map.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(d, d));
    let push = |p: &[f64], from: &DVector<f64>, to: &DVector<f64>, a: &DMatrix<f64>| -> Vec<f64> {
        p.chunks_exact(d)
            .flat_map(|q| (to + a * (DVector::from_column_slice(q) - from)).iter().copied().collect::<Vec<_>>())
            .collect()
    };
    let xs_mapped = push(xs, &ma, &mb, &map);
    let ys_mapped = push(ys, &mb, &ma, &inv);
    let mut out = std::collections::HashSet::new();
    nearest(&xs_mapped, ys, d, k, |i, j| {
        out.insert((i, j));
    });
    nearest(&ys_mapped, xs, d, k, |j, i| {
        out.insert((i, j));
    });
    let mut v: Vec<(usize, usize)> = out.into_iter().collect();
    v.sort_unstable();
    v
}

/// Brute-force `k` nearest neighbours of every query among `pts`.
fn nearest<F: FnMut(usize, usize)>(queries: &[f64], pts: &[f64], d: usize, k: usize, mut emit: F) {
    let np = pts.len() / d;
    let k = k.min(np);
    let mut row: Vec<(f64, usize)> = Vec::with_capacity(np);
    for (qi, q) in queries.chunks_exact(d).enumerate() {
        row.clear();
        row.extend(pts.chunks_exact(d).enumerate().map(|(j, p)| {
            (p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), j)
        }));
        if k < np {
            row.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        for &(_, j) in &row[..k] {
            emit(qi, j);
        }
    }
}

/// Linear part of the optimal map between Gaussians with covariances `a`
/// and `b`, or `None` when `a` is near singular.
fn gaussian_map(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> Option<nalgebra::DMatrix<f64>> {
    let (lo, hi) = crate::linalg::sym_eig_range(a);
    if !(lo > 1e-12 * hi.max(1e-300)) {
        return None;
    }
    let ra = crate::linalg::sqrtm_psd(a).ok()?;
    let ra_inv = ra.clone().try_inverse()?;
    let mid = crate::linalg::sqrtm_psd(&(&ra * b * &ra)).ok()?;
    Some(&ra_inv * mid * &ra_inv)
}

/// Leading principal direction of the pooled, unweighted point cloud.
fn principal_axis(xs: &[f64], ys: &[f64], d: usize) -> Vec<f64> {
    let k = (xs.len() + ys.len()) / d;
    let mut mean = vec![0.0; d];
    for p in xs.chunks_exact(d).chain(ys.chunks_exact(d)) {
        for (m, v) in mean.iter_mut().zip(p) {
            *m += v / k as f64;
        }
    }
    let mut cov = nalgebra::DMatrix::<f64>::zeros(d, d);
    for p in xs.chunks_exact(d).chain(ys.chunks_exact(d)) {
        for a in 0..d {
            for b in 0..d {
                cov[(a, b)] += (p[a] - mean[a]) * (p[b] - mean[b]);
            }
        }
    }
    let eig = cov.symmetric_eigen();
    let top = eig.eigenvalues.imax();
    eig.eigenvectors.column(top).iter().copied().collect()
}

fn max_cost(c: &PointCosts, m: usize, n: usize) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..m {
        for j in 0..n {
            best = best.max(simplex::CostOracle::cost(c, i, j));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_diracs() {
        let a = ParticleEnsemble::dirac(vec![0.0]).unwrap();
        let b = ParticleEnsemble::dirac(vec![3.0]).unwrap();
        let (w, plan) = w2_lp(&a, &b).unwrap();
        assert!((w - 3.0).abs() < 1e-15);
        assert_eq!(plan.entries, vec![(0, 0, 1.0)]);
    }

    #[test]
    fn identical_ensembles() {
        let a = ParticleEnsemble::new(
            vec![vec![0.0, 1.0], vec![2.0, -1.0], vec![0.5, 0.5]],
            Some(vec![0.2, 0.3, 0.5]),
        )
        .unwrap();
        let (w, plan) = w2_lp(&a, &a).unwrap();
        assert!(w.abs() < 1e-12);
        assert!(plan.entries.iter().all(|&(i, j, _)| i == j));
        assert!(plan.feasibility_residual() < 1e-12);
    }
}
