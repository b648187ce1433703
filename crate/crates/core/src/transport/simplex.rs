//! Primal network simplex for the balanced transportation problem.
//!
//! Sources `0..m`, sinks `m..m+n` and a root `m+n` attached to the tree by
//! a single zero-cost arc that never carries flow. Real arcs
//! `i -> m+j` are never stored: their costs come from a [`CostOracle`] and
//! only spanning-tree arcs carry flow, so memory stays `O(m + n)`.
//!
//! The tree is kept strongly feasible and the leaving arc is chosen by
//! Cunningham's rule, which prevents cycling under degeneracy.

use crate::{Error, Result};

const NONE: usize = usize::MAX;
const RC_TOL: f64 = 1e-11;

/// Arc costs, normalized so that the largest is about one.
pub(crate) trait CostOracle: Sync {
    fn cost(&self, i: usize, j: usize) -> f64;
}

pub(crate) struct DenseCosts {
    pub n: usize,
    pub c: Vec<f64>,
}

impl CostOracle for DenseCosts {
    #[inline]
    fn cost(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.n + j]
    }
}

/// Squared Euclidean distances between pre-scaled point sets.
pub(crate) struct PointCosts {
    pub d: usize,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl CostOracle for PointCosts {
    #[inline]
    fn cost(&self, i: usize, j: usize) -> f64 {
        let x = &self.xs[i * self.d..(i + 1) * self.d];
        let y = &self.ys[j * self.d..(j + 1) * self.d];
        let mut s = 0.0;
        for k in 0..self.d {
            let t = x[k] - y[k];
            s += t * t;
        }
        s
    }
}

pub(crate) struct Solution {
    /// `(i, j, mass)` for strictly positive couplings.
    pub flows: Vec<(usize, usize, f64)>,
    pub pivots: usize,
}

struct Tree<'a, C: CostOracle> {
    costs: &'a C,
    m: usize,
    n: usize,
    root: usize,
    parent: Vec<usize>,
    pred: Vec<usize>,
    up: Vec<bool>,
    flow: Vec<f64>,
    depth: Vec<usize>,
    first_child: Vec<usize>,
    next_sib: Vec<usize>,
    prev_sib: Vec<usize>,
    pi: Vec<f64>,
    supply: Vec<f64>,
    cand_i: Vec<u32>,
    cand_j: Vec<u32>,
    cand_c: Vec<f64>,
    next_arc: usize,
    stack: Vec<usize>,
}

impl<'a, C: CostOracle> Tree<'a, C> {
    /// North-west-corner staircase over the given node orders, hung below
    /// the root through a zero-cost artificial arc. Ties move right, so every
    /// zero-flow arc points away from the root and the tree is strongly
    /// feasible.
    fn new(costs: &'a C, supply: &[f64], demand: &[f64], os: &[usize], ot: &[usize]) -> Self {
        let m = supply.len();
        let n = demand.len();
        let nn = m + n + 1;
        let root = m + n;
        let mut t = Tree {
            costs,
            m,
            n,
            root,
            parent: vec![NONE; nn],
            pred: vec![NONE; nn],
            up: vec![false; nn],
            flow: vec![0.0; nn],
            depth: vec![0; nn],
            first_child: vec![NONE; nn],
            next_sib: vec![NONE; nn],
            prev_sib: vec![NONE; nn],
            pi: vec![0.0; nn],
            supply: Vec::with_capacity(nn),
            cand_i: Vec::new(),
            cand_j: Vec::new(),
            cand_c: Vec::new(),
            next_arc: 0,
            stack: Vec::new(),
        };
        t.supply.extend_from_slice(supply);
        t.supply.extend(demand.iter().map(|b| -b));
        t.supply.push(0.0);

        let s0 = os[0];
        t.link(s0, root, m * n + s0, false, 0.0);
        let (mut ii, mut jj) = (0, 0);
        let mut ra = supply[os[0]];
        let mut rb = demand[ot[0]];
        t.link(m + ot[0], s0, s0 * n + ot[0], false, ra.min(rb));
        while ii + 1 < m || jj + 1 < n {
            let down = if ii + 1 == m {
                false
            } else if jj + 1 == n {
                true
            } else {
                ra < rb
            };
            if down {
                ii += 1;
                rb = (rb - ra).max(0.0);
                ra = supply[os[ii]];
                let (s, sink) = (os[ii], ot[jj]);
                t.link(s, m + sink, s * n + sink, true, ra.min(rb));
            } else {
                jj += 1;
                ra = (ra - rb).max(0.0);
                rb = demand[ot[jj]];
                let (s, sink) = (os[ii], ot[jj]);
                t.link(m + sink, s, s * n + sink, false, ra.min(rb));
            }
        }
        t.refresh_flows();
        t.refresh_potentials();
        t
    }

    fn link(&mut self, v: usize, p: usize, arc: usize, up: bool, flow: f64) {
        self.parent[v] = p;
        self.pred[v] = arc;
        self.up[v] = up;
        self.flow[v] = flow;
        self.depth[v] = self.depth[p] + 1;
        self.add_child(p, v);
    }

    #[inline]
    fn arc_cost(&self, arc: usize) -> f64 {
        if arc >= self.m * self.n {
            0.0
        } else {
            self.costs.cost(arc / self.n, arc % self.n)
        }
    }

    fn add_child(&mut self, p: usize, v: usize) {
        let f = self.first_child[p];
        self.next_sib[v] = f;
        self.prev_sib[v] = NONE;
        if f != NONE {
            self.prev_sib[f] = v;
        }
        self.first_child[p] = v;
    }

    fn remove_child(&mut self, p: usize, v: usize) {
        let (pv, nv) = (self.prev_sib[v], self.next_sib[v]);
        if pv != NONE {
            self.next_sib[pv] = nv;
        } else {
            self.first_child[p] = nv;
        }
        if nv != NONE {
            self.prev_sib[nv] = pv;
        }
        self.prev_sib[v] = NONE;
        self.next_sib[v] = NONE;
    }

    fn push_candidate(&mut self, i: usize, j: usize, c: f64) {
        self.cand_i.push(i as u32);
        self.cand_j.push(j as u32);
        self.cand_c.push(c);
    }

    fn set_candidates(&mut self, arcs: &[(usize, usize)]) {
        for &(i, j) in arcs {
            let c = self.costs.cost(i, j);
            self.push_candidate(i, j, c);
        }
    }

    /// Block-search pricing over all `m * n` arcs.
    fn find_entering_all(&mut self) -> Option<(usize, usize)> {
        let (m, n) = (self.m, self.n);
        let total = m * n;
        let block = (total as f64).sqrt().ceil().max(10.0) as usize;
        let mut e = self.next_arc % total;
        let mut i = e / n;
        let mut j = e % n;
        let mut best = -RC_TOL;
        let mut found = None;
        let mut cnt = 0;
        for _ in 0..total {
            let r = self.costs.cost(i, j) + self.pi[i] - self.pi[m + j];
            if r < best {
                best = r;
                found = Some((i, j));
            }
            e += 1;
            j += 1;
            if j == n {
                j = 0;
                i += 1;
                if i == m {
                    i = 0;
                    e = 0;
                }
            }
            cnt += 1;
            if cnt == block {
                if found.is_some() {
                    self.next_arc = e;
                    return found;
                }
                cnt = 0;
            }
        }
        self.next_arc = e;
        found
    }

    /// Block-search pricing over the candidate list: returns the most
    /// negative reduced cost in the first block containing a violation.
    fn find_entering(&mut self) -> Option<(usize, usize)> {
        let m = self.m;
        let total = self.cand_c.len();
        let block = (total as f64).sqrt().ceil().max(10.0) as usize;
        let mut e = self.next_arc.min(total.saturating_sub(1));
        let mut best = -RC_TOL;
        let mut found = None;
        let mut cnt = 0;
        for _ in 0..total {
            let i = self.cand_i[e] as usize;
            let j = self.cand_j[e] as usize;
            let r = self.cand_c[e] + self.pi[i] - self.pi[m + j];
            if r < best {
                best = r;
                found = Some((i, j));
            }
            e += 1;
            if e == total {
                e = 0;
            }
            cnt += 1;
            if cnt == block {
                if found.is_some() {
                    self.next_arc = e;
                    return found;
                }
                cnt = 0;
            }
        }
        self.next_arc = e;
        found
    }

    fn pivot(&mut self, i: usize, j: usize) -> Result<()> {
        let u = i;
        let w = self.m + j;
        let e = i * self.n + j;
        let (mut a, mut b) = (u, w);
        while a != b {
            if self.depth[a] > self.depth[b] {
                a = self.parent[a];
            } else if self.depth[b] > self.depth[a] {
                b = self.parent[b];
            } else {
                a = self.parent[a];
                b = self.parent[b];
            }
        }
        let join = a;

        let mut delta = f64::INFINITY;
        let mut leave = NONE;
        let mut leave_u_side = false;
        let mut v = u;
        while v != join {
            if self.up[v] && self.flow[v] < delta {
                delta = self.flow[v];
                leave = v;
                leave_u_side = true;
            }
            v = self.parent[v];
        }
        v = w;
        while v != join {
            if !self.up[v] && self.flow[v] <= delta {
                delta = self.flow[v];
                leave = v;
                leave_u_side = false;
            }
            v = self.parent[v];
        }
        if leave == NONE {
            return Err(Error::NonConvergence("unbounded pivot in transport simplex".into()));
        }

        if delta > 0.0 {
            v = u;
            while v != join {
                if self.up[v] {
                    self.flow[v] -= delta;
                } else {
                    self.flow[v] += delta;
                }
                v = self.parent[v];
            }
            v = w;
            while v != join {
                if self.up[v] {
                    self.flow[v] += delta;
                } else {
                    self.flow[v] -= delta;
                }
                v = self.parent[v];
            }
        }

        let q = leave;
        let (s_in, s_out) = if leave_u_side { (u, w) } else { (w, u) };
        let qp = self.parent[q];
        self.remove_child(qp, q);
        let mut v = s_in;
        let mut new_parent = s_out;
        let mut new_arc = e;
        let mut new_up = s_in == u;
        let mut new_flow = delta;
        loop {
            let old_parent = self.parent[v];
            let old_arc = self.pred[v];
            let old_up = self.up[v];
            let old_flow = self.flow[v];
            if v != q {
                self.remove_child(old_parent, v);
            }
            self.parent[v] = new_parent;
            self.pred[v] = new_arc;
            self.up[v] = new_up;
            self.flow[v] = new_flow;
            self.add_child(new_parent, v);
            if v == q {
                break;
            }
            new_parent = v;
            new_arc = old_arc;
            new_up = !old_up;
            new_flow = old_flow;
            v = old_parent;
        }

        let ce = self.arc_cost(e);
        let target = if self.up[s_in] {
            self.pi[s_out] - ce
        } else {
            self.pi[s_out] + ce
        };
        let shift = target - self.pi[s_in];
        self.stack.clear();
        self.stack.push(s_in);
        while let Some(x) = self.stack.pop() {
            self.pi[x] += shift;
            self.depth[x] = self.depth[self.parent[x]] + 1;
            let mut c = self.first_child[x];
            while c != NONE {
                self.stack.push(c);
                c = self.next_sib[c];
            }
        }
        Ok(())
    }

    /// Nodes in DFS preorder from the root.
    fn preorder(&mut self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.parent.len());
        self.stack.clear();
        self.stack.push(self.root);
        while let Some(x) = self.stack.pop() {
            order.push(x);
            let mut c = self.first_child[x];
            while c != NONE {
                self.stack.push(c);
                c = self.next_sib[c];
            }
        }
        order
    }

    /// Recompute potentials exactly from the tree.
    fn refresh_potentials(&mut self) {
        let order = self.preorder();
        self.pi[self.root] = 0.0;
        for &v in &order[1..] {
            let c = self.arc_cost(self.pred[v]);
            let p = self.pi[self.parent[v]];
            self.pi[v] = if self.up[v] { p - c } else { p + c };
        }
    }

    /// Recompute tree flows exactly from node supplies.
    fn refresh_flows(&mut self) {
        let order = self.preorder();
        let mut net = self.supply.clone();
        for &v in order[1..].iter().rev() {
            let p = self.parent[v];
            self.flow[v] = if self.up[v] { net[v] } else { -net[v] };
            net[p] += net[v];
        }
    }
}

/// Pivot until `price` finds no entering arc with exactly refreshed
/// potentials.
fn run<C, F>(t: &mut Tree<'_, C>, pivots: &mut usize, max_pivots: usize, mut price: F) -> Result<()>
where
    C: CostOracle,
    F: FnMut(&mut Tree<'_, C>) -> Option<(usize, usize)>,
{
    let mut refreshed = false;
    loop {
        match price(t) {
            Some((i, j)) => {
                t.pivot(i, j)?;
                *pivots += 1;
                refreshed = false;
                if *pivots > max_pivots {
                    return Err(Error::NonConvergence(format!(
                        "transport simplex exceeded {max_pivots} pivots"
                    )));
                }
                if *pivots % 4096 == 0 {
                    t.refresh_potentials();
                }
            }
            None => {
                if refreshed {
                    return Ok(());
                }
                t.refresh_potentials();
                refreshed = true;
            }
        }
    }
}

/// Solve the balanced transportation problem. `supply` and `demand` must be
/// strictly positive with equal sums; the orders seed the initial basis.
///
/// With a `candidates` arc list the problem restricted to those arcs is
/// solved first, and pricing over all arcs then finishes from that basis.
pub(crate) fn solve<C: CostOracle>(
    costs: &C,
    supply: &[f64],
    demand: &[f64],
    source_order: &[usize],
    target_order: &[usize],
    candidates: Option<&[(usize, usize)]>,
) -> Result<Solution> {
    let (m, n) = (supply.len(), demand.len());
    let max_pivots = 1000 * (m + n) + 1_000_000;
    let mut pivots = 0;
    let mut t = Tree::new(costs, supply, demand, source_order, target_order);
    if let Some(cands) = candidates {
        t.set_candidates(cands);
        run(&mut t, &mut pivots, max_pivots, |t| t.find_entering())?;
    }
    run(&mut t, &mut pivots, max_pivots, |t| t.find_entering_all())?;
    t.refresh_flows();
    let mut flows = Vec::with_capacity(m + n);
    for v in 0..m + n {
        let arc = t.pred[v];
        let f = t.flow[v];
        if arc >= m * n {
            if f.abs() > 1e-12 {
                return Err(Error::invalid(format!(
                    "transport problem infeasible: residual mass {f} on node {v}"
                )));
            }
            continue;
        }
        if f > 0.0 {
            flows.push((arc / n, arc % n, f));
        }
    }
    flows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    Ok(Solution { flows, pivots })
}
