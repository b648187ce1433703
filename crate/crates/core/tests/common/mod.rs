//! Reference solvers and random-instance helpers shared by the integration
//! tests. Nothing here calls into the library's transport code.

#![allow(dead_code)]

use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wassval::densities::ParticleEnsemble;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Random weights bounded away from zero, normalized.
pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| uniform(rng, 0.1, 1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

pub fn random_ensemble(rng: &mut ChaCha8Rng, n: usize, dim: usize, spread: f64, weighted: bool) -> ParticleEnsemble {
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| uniform(rng, -spread, spread)).collect())
        .collect();
    let w = weighted.then(|| random_weights(rng, n));
    ParticleEnsemble::new(pts, w).expect("valid ensemble")
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn cost_matrix(a: &ParticleEnsemble, b: &ParticleEnsemble) -> Vec<Vec<f64>> {
    (0..a.len())
        .map(|i| (0..b.len()).map(|j| sq_dist(a.point(i), b.point(j))).collect())
        .collect()
}

/// Equality rows of the balanced transportation polytope with the last
/// column constraint dropped (it is implied by the others).
fn transport_rows(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut rows = Vec::with_capacity(m + n - 1);
    for i in 0..m {
        rows.push((0..n).map(|j| i * n + j).collect());
    }
    for j in 0..n - 1 {
        rows.push((0..m).map(|i| i * n + j).collect());
    }
    rows
}

fn rhs(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().chain(&b[..b.len() - 1]).copied().collect()
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let k = r.len();
    for col in 0..k {
        let p = (col..k).max_by(|x, y| m[*x][col].abs().total_cmp(&m[*y][col].abs()))?;
        if m[p][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, p);
        r.swap(col, p);
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for c in col..k {
                    m[row][c] -= f * m[col][c];
                }
                r[row] -= f * r[col];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| m[row][c] * x[c]).sum();
        x[row] = (r[row] - s) / m[row][row];
    }
    Some(x)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of candidate bases the enumeration oracle would visit.
pub fn basis_count(m: usize, n: usize) -> f64 {
    binomial(m * n, m + n - 1)
}

/// Minimum transport cost over every basic feasible solution.
pub fn brute_force_transport(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> f64 {
    let (m, n) = (a.len(), b.len());
    let rows = transport_rows(m, n);
    let r = rhs(a, b);
    let k = m + n - 1;
    let arcs = m * n;
    let mut best = f64::INFINITY;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mat: Vec<Vec<f64>> = rows
            .iter()
            .map(|row| idx.iter().map(|c| if row.contains(c) { 1.0 } else { 0.0 }).collect())
            .collect();
        if let Some(x) = solve(mat, r.clone()) {
            if x.iter().all(|v| *v >= -1e-12) {
                let c: f64 = idx.iter().zip(&x).map(|(arc, v)| cost[arc / n][arc % n] * v).sum();
                best = best.min(c);
            }
        }
        // next combination in lexicographic order
        let mut p = k;
        loop {
            if p == 0 {
                return best;
            }
            p -= 1;
            if idx[p] < arcs - k + p {
                break;
            }
        }
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Two-phase dense tableau simplex with Bland's rule for
/// `min c.x, A x = b, x >= 0` with `b >= 0`.
pub fn dense_simplex(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> f64 {
    const TOL: f64 = 1e-12;
    let (rows, cols) = (a.len(), c.len());
    // columns: originals, then one artificial per row, then the rhs
    let width = cols + rows + 1;
    let mut t: Vec<Vec<f64>> = (0..rows)
        .map(|i| {
            let mut r = vec![0.0; width];
            r[..cols].copy_from_slice(&a[i]);
            r[cols + i] = 1.0;
            r[width - 1] = b[i];
            r
        })
        .collect();
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    let pivot = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, pr: usize, pc: usize| {
        let p = t[pr][pc];
        t[pr].iter_mut().for_each(|v| *v /= p);
        let prow = t[pr].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != pr && row[pc] != 0.0 {
                let f = row[pc];
                row.iter_mut().zip(&prow).for_each(|(v, pv)| *v -= f * pv);
            }
        }
        basis[pr] = pc;
    };

    let run = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, cost: &[f64], allowed: usize| loop {
        let reduced = |j: usize, t: &Vec<Vec<f64>>, basis: &Vec<usize>| {
            cost[j] - basis.iter().enumerate().map(|(i, bj)| cost[*bj] * t[i][j]).sum::<f64>()
        };
        let Some(enter) = (0..allowed).find(|j| !basis.contains(j) && reduced(*j, t, basis) < -1e-11) else {
            return;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..t.len() {
            if t[i][enter] > TOL {
                let ratio = t[i][width - 1] / t[i][enter];
                leave = match leave {
                    Some((l, r)) if ratio > r + TOL || (ratio > r - TOL && basis[l] < basis[i]) => Some((l, r)),
                    _ => Some((i, ratio)),
                };
            }
        }
        let (pr, _) = leave.expect("transport LP is bounded");
        pivot(t, basis, pr, enter);
    };

    let mut phase1 = vec![0.0; cols + rows];
    phase1[cols..].iter_mut().for_each(|v| *v = 1.0);
    run(&mut t, &mut basis, &phase1, cols + rows);
    // drive zero-level artificials out of the basis
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= cols {
            assert!(t[i][width - 1].abs() < 1e-9, "infeasible LP");
            match (0..cols).find(|j| t[i][*j].abs() > 1e-9) {
                Some(j) => pivot(&mut t, &mut basis, i, j),
                None => {
                    t.remove(i);
                    basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut phase2 = c.to_vec();
    phase2.extend(std::iter::repeat_n(0.0, rows));
    run(&mut t, &mut basis, &phase2, cols);
    basis.iter().enumerate().map(|(i, bj)| phase2[*bj] * t[i][width - 1]).sum()
}

/// Full transportation LP solved with [`dense_simplex`].
pub fn simplex_transport(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> f64 {
    let (m, n) = (a.len(), b.len());
    let mut rows = Vec::with_capacity(m + n);
    for i in 0..m {
        rows.push((0..m * n).map(|k| if k / n == i { 1.0 } else { 0.0 }).collect());
    }
    for j in 0..n {
        rows.push((0..m * n).map(|k| if k % n == j { 1.0 } else { 0.0 }).collect());
    }
    let r: Vec<f64> = a.iter().chain(b).copied().collect();
    let c: Vec<f64> = cost.iter().flatten().copied().collect();
    dense_simplex(&rows, &r, &c)
}

/// Composite Gauss-Legendre on `[lo, hi]` with `panels` equal panels.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    // 10-point rule
    const X: [f64; 5] = [
        0.148_874_338_981_631_2,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ];
    const W: [f64; 5] = [
        0.295_524_224_714_752_9,
        0.269_266_719_309_996_4,
        0.219_086_362_515_982_0,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_1,
    ];
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .map(|p| {
            let c = lo + (p as f64 + 0.5) * h;
            let r = 0.5 * h;
            X.iter().zip(W).map(|(x, w)| w * (f(c - r * x) + f(c + r * x))).sum::<f64>() * r
        })
        .sum()
}

/// Integral over `[0, 1]` with panels graded geometrically toward both end
/// points, for integrands with algebraic end-point behavior.
pub fn graded_unit_integral<F: Fn(f64) -> f64>(f: F) -> f64 {
    let mut cuts = vec![0.0];
    for k in (1..=50).rev() {
        cuts.push(0.5f64.powi(k) * 0.05);
    }
    let inner = 100;
    for k in 0..=inner {
        cuts.push(0.05 + 0.9 * k as f64 / inner as f64);
    }
    for k in 1..=50 {
        cuts.push(1.0 - 0.5f64.powi(k) * 0.05);
    }
    cuts.push(1.0);
    cuts.windows(2).map(|w| gauss_legendre(&f, w[0], w[1], 1)).sum()
}

/// Regularized incomplete beta inverse by bisection on the statrs CDF.
pub fn beta_quantile(alpha: f64, beta: f64, s: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if statrs::function::beta::beta_reg(alpha, beta, mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
