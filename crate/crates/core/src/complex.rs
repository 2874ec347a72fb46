//! Complex frames in double precision and a budgeted, one-sided search for
//! partition witnesses: a partition `S_1..S_p` of the measurements, distinct
//! unimodular `c_1..c_p`, and nonzero `η_j ∈ N(F_{S_j})` with
//! `η_j = η_1 - (c_1 - c_j) y_0` for a common sparse `y_0 != 0`.
//!
//! Such a witness shows the frame is not phase retrievable (any sparsity
//! with `k = d`), or, under the extra inequality
//! `||y_0||_1 >= ||c_1 y_0 - η_1||_1`, that sparse phaseless ℓ1 recovery
//! fails. Not finding one proves nothing.
//!
//! Inner products are bilinear, `<f, x> = Σ f_i x_i`, matching `F^T x`.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::rng::SeededRng;
use crate::scalar::Scalar;

pub type C64 = Complex64;

/// Relative tolerance for equalities (residuals, inequality slack).
pub const TOL_EQ: f64 = 1e-9;
/// Relative threshold below which a vector or entry counts as zero.
pub const TOL_NZ: f64 = 1e-7;
/// Relative singular-value threshold for a nontrivial solution space.
pub const SV_THRESHOLD: f64 = 1e-10;
/// Minimum pairwise distance between sampled unimodular constants.
pub const MIN_C_SEPARATION: f64 = 1e-3;
/// Points of the base grid on the unit circle.
pub const C_GRID: u64 = 64;
/// Relative distance below which two vectors are unimodular multiples.
pub const TOL_EQUIV: f64 = 1e-6;
/// Default residual bound for validating collisions.
pub const TOL_COLLISION: f64 = 1e-8;
/// Proposals per independently seeded slice.
pub const SLICE: u64 = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexFrame {
    d: usize,
    columns: Vec<Vec<C64>>,
}

impl ComplexFrame {
    pub fn new(d: usize, columns: Vec<Vec<C64>>) -> Result<Self> {
        if d == 0 || columns.is_empty() {
            return Err(Error::Precondition(
                "a frame needs d >= 1 and m >= 1".into(),
            ));
        }
        for c in &columns {
            if c.len() != d {
                return Err(Error::dims("frame column", d, c.len()));
            }
            if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Precondition("frame entries must be finite".into()));
            }
        }
        Ok(Self { d, columns })
    }

    pub fn from_real<T: Scalar>(f: &Frame<T>) -> Self {
        let columns = f
            .columns()
            .iter()
            .map(|c| c.iter().map(|v| C64::new(v.to_f64_lossy(), 0.0)).collect())
            .collect();
        Self { d: f.d(), columns }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<C64>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[C64] {
        &self.columns[j]
    }

    /// Multiplies column `j` by `e^{i θ_j}`.
    pub fn with_column_phases(&self, thetas: &[f64]) -> Result<Self> {
        if thetas.len() != self.m() {
            return Err(Error::dims("column phases", self.m(), thetas.len()));
        }
        let columns = self
            .columns
            .iter()
            .zip(thetas)
            .map(|(c, &t)| c.iter().map(|z| z * C64::from_polar(1.0, t)).collect())
            .collect();
        Ok(Self { d: self.d, columns })
    }

    pub fn scaled(&self, s: f64) -> Self {
        let columns = self
            .columns
            .iter()
            .map(|c| c.iter().map(|z| z * s).collect())
            .collect();
        Self { d: self.d, columns }
    }

    /// `<f_j, x>` (bilinear).
    pub fn inner(&self, j: usize, x: &[C64]) -> C64 {
        self.columns[j].iter().zip(x).map(|(f, v)| f * v).sum()
    }

    fn max_column_norm(&self) -> f64 {
        self.columns.iter().map(|c| norm2(c)).fold(0.0, f64::max)
    }
}

/// Entries with independent real and imaginary parts uniform in `[-1, 1)`.
pub fn random_complex_frame(d: usize, m: usize, seed: u64) -> Result<ComplexFrame> {
    draw_frame(d, m, seed, false)
}

/// Real entries uniform in `[-1, 1)` stored as complex numbers.
pub fn random_real_entried_frame(d: usize, m: usize, seed: u64) -> Result<ComplexFrame> {
    draw_frame(d, m, seed, true)
}

fn draw_frame(d: usize, m: usize, seed: u64, real: bool) -> Result<ComplexFrame> {
    if d == 0 || m == 0 {
        return Err(Error::Precondition(
            "a frame needs d >= 1 and m >= 1".into(),
        ));
    }
    let mut rng = SeededRng::new(seed);
    let mut uniform = || 2.0 * rng.unit_f64() - 1.0;
    let columns = (0..m)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let re = uniform();
                    let im = if real { 0.0 } else { uniform() };
                    C64::new(re, im)
                })
                .collect()
        })
        .collect();
    ComplexFrame::new(d, columns)
}

pub fn norm1(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm()).sum()
}

pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(a: C64, x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect()
}

fn scale(a: C64, x: &[C64]) -> Vec<C64> {
    x.iter().map(|v| a * v).collect()
}

/// `max_j | |<f_j,x>|^2 - |<f_j,y>|^2 |` relative to `max(1, ||x||^2, ||y||^2)`.
pub fn collision_residual(f: &ComplexFrame, x: &[C64], y: &[C64]) -> Result<f64> {
    if x.len() != f.d() || y.len() != f.d() {
        return Err(Error::dims("collision pair", f.d(), x.len().max(y.len())));
    }
    let worst = (0..f.m())
        .map(|j| (f.inner(j, x).norm_sqr() - f.inner(j, y).norm_sqr()).abs())
        .fold(0.0, f64::max);
    let scale = 1f64.max(norm2(x).powi(2)).max(norm2(y).powi(2));
    Ok(worst / scale)
}

/// `min_{|c|=1} ||x - c y||^2`, relative to `max(||x||^2, ||y||^2)`.
pub fn unimodular_distance(x: &[C64], y: &[C64]) -> f64 {
    let (nx, ny) = (norm2(x).powi(2), norm2(y).powi(2));
    let cross: C64 = x.iter().zip(y).map(|(a, b)| a * b.conj()).sum();
    let top = nx.max(ny);
    if top == 0.0 {
        return 0.0;
    }
    ((nx + ny - 2.0 * cross.norm()) / top).max(0.0)
}

/// Residual of the pair after scaling both to `max(||x||, ||y||) = 1`,
/// relative to the largest squared column norm of `f`.
pub fn normalized_pair_residual(f: &ComplexFrame, x: &[C64], y: &[C64]) -> Result<f64> {
    let s = norm2(x).max(norm2(y));
    let cols = f.max_column_norm().powi(2);
    if s == 0.0 || cols == 0.0 {
        return Ok(0.0);
    }
    let r = collision_residual(
        f,
        &scale(C64::new(1.0 / s, 0.0), x),
        &scale(C64::new(1.0 / s, 0.0), y),
    )?;
    Ok(r / cols)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexCollision {
    pub x: Vec<C64>,
    pub y: Vec<C64>,
    pub residual: f64,
}

impl ComplexCollision {
    pub fn validate(&self, f: &ComplexFrame) -> Result<()> {
        let r = normalized_pair_residual(f, &self.x, &self.y)?;
        if r > TOL_COLLISION {
            return Err(Error::InvalidWitness(format!(
                "residual {r:e} above tolerance"
            )));
        }
        if unimodular_distance(&self.x, &self.y) <= TOL_EQUIV {
            return Err(Error::InvalidWitness(
                "x and y are unimodular multiples".into(),
            ));
        }
        Ok(())
    }
}

/// Whether every column is a unimodular multiple of a real vector.
pub fn is_conjugation_degenerate(f: &ComplexFrame) -> bool {
    f.columns().iter().all(|c| {
        let Some(pivot) = c
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        else {
            return true;
        };
        if pivot.norm() == 0.0 {
            return true;
        }
        let phase = (pivot / pivot.norm()).conj();
        let tol = TOL_NZ * norm2(c);
        c.iter().all(|z| (z * phase).im.abs() <= tol)
    })
}

/// For frames whose columns are unimodular multiples of real vectors,
/// `x` and its entrywise conjugate always share magnitudes.
pub fn conjugate_collision(f: &ComplexFrame, seed: u64) -> Option<ComplexCollision> {
    if !is_conjugation_degenerate(f) {
        return None;
    }
    let mut rng = SeededRng::new(seed);
    (0..16).find_map(|_| {
        let x: Vec<C64> = (0..f.d())
            .map(|_| C64::new(2.0 * rng.unit_f64() - 1.0, 2.0 * rng.unit_f64() - 1.0))
            .collect();
        conjugate_collision_for(f, &x)
    })
}

/// The conjugate pair `(x, conj x)` if it is a valid collision on `f`.
pub fn conjugate_collision_for(f: &ComplexFrame, x: &[C64]) -> Option<ComplexCollision> {
    if x.len() != f.d() {
        return None;
    }
    let y: Vec<C64> = x.iter().map(|z| z.conj()).collect();
    let residual = normalized_pair_residual(f, x, &y).ok()?;
    let w = ComplexCollision {
        x: x.to_vec(),
        y,
        residual,
    };
    w.validate(f).ok().map(|_| w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// Nontrivial solution: the frame is not phase retrievable.
    Retrievability,
    /// Nontrivial solution violating the sparse ℓ1 inequality.
    SparseL1 { k: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionWitness {
    pub partition: Vec<Vec<usize>>,
    pub c: Vec<C64>,
    pub eta1: Vec<C64>,
    pub y0: Vec<C64>,
    /// `||y_0||_1 - ||c_1 y_0 - η_1||_1`, for `(η_1, y_0)` scaled to unit norm.
    pub margin: f64,
    /// Normalized collision residual of `x_0 = η_1 - η_2` and `c_2 η_1 - c_1 η_2`.
    pub residual: f64,
}

impl PartitionWitness {
    pub fn etas(&self) -> Vec<Vec<C64>> {
        self.c
            .iter()
            .map(|cj| axpy(-(self.c[0] - cj), &self.y0, &self.eta1))
            .collect()
    }

    /// The collision pair `x_0 = η_1 - η_2`, `c_2 η_1 - c_1 η_2`.
    pub fn collision_pair(&self) -> (Vec<C64>, Vec<C64>) {
        let etas = self.etas();
        let x0 = axpy(C64::new(-1.0, 0.0), &etas[1], &etas[0]);
        let comp = axpy(-self.c[0], &etas[1], &scale(self.c[1], &etas[0]));
        (x0, comp)
    }

    /// Re-checks every tolerance-based claim against `f`.
    pub fn validate(&self, f: &ComplexFrame, kind: WitnessKind) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidWitness(m));
        let (d, m) = (f.d(), f.m());
        let p = self.partition.len();
        if p < 2 || self.c.len() != p {
            return bad(format!(
                "need p >= 2 blocks with one constant each, got {p}"
            ));
        }
        let mut seen = vec![false; m];
        for block in &self.partition {
            if block.is_empty() {
                return bad("empty block".into());
            }
            for &j in block {
                if j >= m || seen[j] {
                    return bad("partition does not cover [0, m) exactly once".into());
                }
                seen[j] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("partition misses an index".into());
        }
        if self.c.iter().any(|c| (c.norm() - 1.0).abs() > TOL_EQ) {
            return bad("constants are not unimodular".into());
        }
        for a in 0..p {
            for b in a + 1..p {
                if (self.c[a] - self.c[b]).norm() < MIN_C_SEPARATION {
                    return bad("constants not separated".into());
                }
            }
        }
        if self.eta1.len() != d || self.y0.len() != d {
            return bad("vector length differs from d".into());
        }
        let etas = self.etas();
        let zscale = norm2(&self.eta1).max(norm2(&self.y0));
        if norm2(&self.y0) <= TOL_NZ * zscale || zscale == 0.0 {
            return bad("y0 vanishes".into());
        }
        let escale = etas.iter().map(|e| norm2(e)).fold(zscale, f64::max);
        if etas.iter().any(|e| norm2(e) <= TOL_NZ * escale) {
            return bad("some eta_j vanishes".into());
        }
        let rscale = f.max_column_norm() * escale;
        for (block, eta) in self.partition.iter().zip(&etas) {
            for &j in block {
                if f.inner(j, eta).norm() > TOL_EQ * rscale {
                    return bad(format!("eta does not annihilate column {j}"));
                }
            }
        }
        let margin = l1_margin(&self.c[0], &self.eta1, &self.y0);
        if (margin - self.margin).abs() > 1e-6 * (1.0 + margin.abs()) {
            return bad("margin mismatch".into());
        }
        if let WitnessKind::SparseL1 { k } = kind {
            let ymax = self.y0.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let nnz = self.y0.iter().filter(|z| z.norm() > TOL_NZ * ymax).count();
            if nnz > k {
                return bad(format!("y0 has {nnz} > {k} nonzeros"));
            }
            if margin < -TOL_EQ * zscale {
                return bad("inequality holds strictly; no violation".into());
            }
        }
        let (x0, comp) = self.collision_pair();
        let residual = normalized_pair_residual(f, &x0, &comp)?;
        if residual > TOL_COLLISION {
            return bad(format!("collision residual {residual:e} above tolerance"));
        }
        if unimodular_distance(&x0, &comp) <= TOL_EQUIV {
            return bad("collision pair is unimodular-equivalent".into());
        }
        Ok(())
    }
}

fn l1_margin(c1: &C64, eta1: &[C64], y0: &[C64]) -> f64 {
    let s = norm2(eta1).max(norm2(y0));
    let inv = if s > 0.0 { 1.0 / s } else { 1.0 };
    let y: Vec<C64> = y0.iter().map(|z| z * inv).collect();
    let e: Vec<C64> = eta1.iter().map(|z| z * inv).collect();
    norm1(&y) - norm1(&axpy(*c1, &y, &scale(C64::new(-1.0, 0.0), &e)))
}

/// Builds a partition witness from a collision: blocks group columns on
/// which `<f_j, y> / <f_j, x>` agrees, `c` are those ratios, `y_0 = x` and
/// `η_j = c_j x - y`.
pub fn partition_witness_from_collision(
    f: &ComplexFrame,
    x: &[C64],
    y: &[C64],
) -> Option<PartitionWitness> {
    let scale_x = f.max_column_norm() * norm2(x);
    let mut ratios: Vec<Option<C64>> = Vec::with_capacity(f.m());
    for j in 0..f.m() {
        let (a, b) = (f.inner(j, x), f.inner(j, y));
        if a.norm() <= TOL_NZ * scale_x {
            ratios.push(None);
        } else {
            let r = b / a;
            ratios.push(Some(r / r.norm()));
        }
    }
    let mut c: Vec<C64> = Vec::new();
    let mut partition: Vec<Vec<usize>> = Vec::new();
    for (j, r) in ratios.iter().enumerate() {
        let Some(r) = r else { continue };
        match c.iter().position(|cj| (cj - r).norm() <= 1e-6) {
            Some(i) => partition[i].push(j),
            None => {
                c.push(*r);
                partition.push(vec![j]);
            }
        }
    }
    // One ratio means y = c_1 x on every measurement: no partition.
    if c.len() < 2 {
        return None;
    }
    // Columns annihilating both x and y fit any block.
    for (j, r) in ratios.iter().enumerate() {
        if r.is_none() {
            partition[0].push(j);
        }
    }
    partition.iter_mut().for_each(|b| b.sort_unstable());
    let eta1: Vec<C64> = axpy(c[0], x, &scale(C64::new(-1.0, 0.0), y));
    let mut w = PartitionWitness {
        partition,
        margin: l1_margin(&c[0], &eta1, x),
        c,
        eta1,
        y0: x.to_vec(),
        residual: 0.0,
    };
    let (x0, comp) = w.collision_pair();
    w.residual = normalized_pair_residual(f, &x0, &comp).ok()?;
    Some(w)
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SearchStats {
    pub proposals: u64,
    /// Proposals whose stacked system had a nontrivial solution.
    pub candidates: u64,
    /// Largest relative gap between the pairwise norms and their
    /// single-scalar forms over all candidates.
    pub max_identity_discrepancy: f64,
}

impl SearchStats {
    fn merge(&mut self, o: &SearchStats) {
        self.proposals += o.proposals;
        self.candidates += o.candidates;
        self.max_identity_discrepancy = self
            .max_identity_discrepancy
            .max(o.max_identity_discrepancy);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub witness: Option<PartitionWitness>,
    pub stats: SearchStats,
}

impl SearchOutcome {
    /// No witness within budget; says nothing about the frame.
    pub fn inconclusive(&self) -> bool {
        self.witness.is_none()
    }
}

/// Budgeted search for a witness that the `k`-sparse ℓ1 inequality fails.
pub fn search_thm33_witness(
    f: &ComplexFrame,
    k: usize,
    budget: u64,
    seed: u64,
) -> Result<SearchOutcome> {
    if k == 0 || k > f.d() {
        return Err(Error::Precondition(format!(
            "need 1 <= k <= d, got k={k}, d={}",
            f.d()
        )));
    }
    search(f, WitnessKind::SparseL1 { k }, budget, seed)
}

/// Budgeted search for a witness that the frame is not phase retrievable.
pub fn search_thm42_witness(f: &ComplexFrame, budget: u64, seed: u64) -> Result<SearchOutcome> {
    search(f, WitnessKind::Retrievability, budget, seed)
}

fn search(f: &ComplexFrame, kind: WitnessKind, budget: u64, seed: u64) -> Result<SearchOutcome> {
    if budget == 0 {
        return Err(Error::Precondition("budget must be at least 1".into()));
    }
    if f.m() < 2 {
        return Ok(SearchOutcome {
            witness: None,
            stats: SearchStats::default(),
        });
    }
    let degenerate = is_conjugation_degenerate(f);
    let slices = budget.div_ceil(SLICE);
    let best = AtomicU64::new(u64::MAX);
    let results: Vec<Option<(Option<PartitionWitness>, SearchStats)>> = (0..slices)
        .into_par_iter()
        .map(|s| {
            if s > best.load(Ordering::Relaxed) {
                return None;
            }
            let n = SLICE.min(budget - s * SLICE);
            let out = run_slice(f, kind, degenerate, n, SeededRng::derive_seed(seed, s));
            if out.0.is_some() {
                best.fetch_min(s, Ordering::Relaxed);
            }
            Some(out)
        })
        .collect();
    let mut stats = SearchStats::default();
    for r in results {
        let (w, st) = r.expect("slices before the first hit always run");
        stats.merge(&st);
        if w.is_some() {
            return Ok(SearchOutcome { witness: w, stats });
        }
    }
    Ok(SearchOutcome {
        witness: None,
        stats,
    })
}

fn run_slice(
    f: &ComplexFrame,
    kind: WitnessKind,
    degenerate: bool,
    n: u64,
    seed: u64,
) -> (Option<PartitionWitness>, SearchStats) {
    let mut rng = SeededRng::new(seed);
    let mut stats = SearchStats::default();
    let k = match kind {
        WitnessKind::Retrievability => f.d(),
        WitnessKind::SparseL1 { k } => k,
    };
    for i in 0..n {
        stats.proposals += 1;
        // Frames with real columns up to phase get alternating proposals
        // seeded from conjugate collisions of random k-sparse vectors.
        let w = if degenerate && i % 2 == 1 {
            collision_proposal(f, k, &mut rng)
        } else {
            random_proposal(f, k, &mut rng, &mut stats)
        };
        if let Some(w) = w {
            if w.validate(f, kind).is_ok() {
                return (Some(w), stats);
            }
        }
    }
    (None, stats)
}

fn collision_proposal(f: &ComplexFrame, k: usize, rng: &mut SeededRng) -> Option<PartitionWitness> {
    let mut x = vec![C64::new(0.0, 0.0); f.d()];
    for i in rng.subset(f.d(), k) {
        x[i] = C64::new(2.0 * rng.unit_f64() - 1.0, 2.0 * rng.unit_f64() - 1.0);
    }
    let col = conjugate_collision_for(f, &x)?;
    partition_witness_from_collision(f, &col.x, &col.y)
}

fn random_partition(m: usize, rng: &mut SeededRng) -> Vec<Vec<usize>> {
    let p = if m >= 3 { 2 + rng.index(2) } else { 2 };
    loop {
        let labels: Vec<usize> = (0..m).map(|_| rng.index(p)).collect();
        let mut blocks = vec![Vec::new(); p];
        for (j, &l) in labels.iter().enumerate() {
            blocks[l].push(j);
        }
        if blocks.iter().all(|b| !b.is_empty()) {
            blocks.sort_by_key(|b| b[0]);
            return blocks;
        }
    }
}

fn random_constants(p: usize, rng: &mut SeededRng) -> Vec<C64> {
    loop {
        let c: Vec<C64> = (0..p)
            .map(|_| {
                let g = rng.below(C_GRID) as f64;
                let jitter = if rng.next_u64() >> 63 == 0 {
                    0.0
                } else {
                    rng.unit_f64() - 0.5
                };
                C64::from_polar(1.0, std::f64::consts::TAU * (g + jitter) / C_GRID as f64)
            })
            .collect();
        let separated =
            (0..p).all(|a| (a + 1..p).all(|b| (c[a] - c[b]).norm() >= MIN_C_SEPARATION));
        if separated {
            return c;
        }
    }
}

/// Least-singular-vector solve of the stacked system in `(η_1, y_0|_T)`.
fn random_proposal(
    f: &ComplexFrame,
    k: usize,
    rng: &mut SeededRng,
    stats: &mut SearchStats,
) -> Option<PartitionWitness> {
    let (d, m) = (f.d(), f.m());
    let partition = random_partition(m, rng);
    let c = random_constants(partition.len(), rng);
    let t = rng.subset(d, k);
    let n = d + k;
    let rows = m.max(n);
    let mut a = DMatrix::<C64>::zeros(rows, n);
    let mut r = 0;
    for (l, block) in partition.iter().enumerate() {
        let gamma = c[0] - c[l];
        for &j in block {
            let col = f.column(j);
            for i in 0..d {
                a[(r, i)] = col[i];
            }
            if l > 0 {
                for (q, &i) in t.iter().enumerate() {
                    a[(r, d + q)] = -gamma * col[i];
                }
            }
            r += 1;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t?;
    let sv = &svd.singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return None;
    }
    let null: Vec<usize> = (0..sv.len())
        .filter(|&i| sv[i] <= SV_THRESHOLD * top)
        .collect();
    if null.is_empty() {
        return None;
    }
    let z: Vec<C64> = if null.len() == 1 {
        v_t.row(null[0]).iter().map(|v| v.conj()).collect()
    } else {
        let mut z = vec![C64::new(0.0, 0.0); n];
        for &i in &null {
            let w = C64::new(2.0 * rng.unit_f64() - 1.0, 2.0 * rng.unit_f64() - 1.0);
            for (zi, v) in z.iter_mut().zip(v_t.row(i).iter()) {
                *zi += w * v.conj();
            }
        }
        z
    };
    let zn = norm2(&z);
    if zn == 0.0 {
        return None;
    }
    let z: Vec<C64> = z.iter().map(|v| v / zn).collect();
    let eta1 = z[..d].to_vec();
    let mut y0 = vec![C64::new(0.0, 0.0); d];
    for (q, &i) in t.iter().enumerate() {
        y0[i] = z[d + q];
    }
    if norm2(&y0) <= TOL_NZ {
        return None;
    }
    stats.candidates += 1;
    let w = PartitionWitness {
        margin: l1_margin(&c[0], &eta1, &y0),
        partition,
        c,
        eta1,
        y0,
        residual: 0.0,
    };
    stats.max_identity_discrepancy = stats.max_identity_discrepancy.max(identity_discrepancy(&w));
    let etas = w.etas();
    if etas.iter().any(|e| norm2(e) <= TOL_NZ) {
        return None;
    }
    let (x0, comp) = w.collision_pair();
    let residual = normalized_pair_residual(f, &x0, &comp).ok()?;
    Some(PartitionWitness { residual, ..w })
}

/// Largest relative gap between direct pairwise norms
/// `||η_j - η_l||_1`, `||c_l η_j - c_j η_l||_1` and
/// `|c_j - c_l| ||y_0||_1`, `|c_j - c_l| ||c_1 y_0 - η_1||_1`.
pub fn identity_discrepancy(w: &PartitionWitness) -> f64 {
    let etas = w.etas();
    let ny = norm1(&w.y0);
    let nr = norm1(&axpy(w.c[0], &w.y0, &scale(C64::new(-1.0, 0.0), &w.eta1)));
    let mut worst: f64 = 0.0;
    for j in 0..etas.len() {
        for l in 0..etas.len() {
            if j == l {
                continue;
            }
            let gap = (w.c[j] - w.c[l]).norm();
            let lhs = norm1(&axpy(C64::new(-1.0, 0.0), &etas[l], &etas[j]));
            let rhs = norm1(&axpy(-w.c[j], &etas[l], &scale(w.c[l], &etas[j])));
            let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
            worst = worst.max(rel(lhs, gap * ny)).max(rel(rhs, gap * nr));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn residual_examples() {
        let f = random_complex_frame(3, 5, 1).unwrap();
        let x = vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.0, 1.0)];
        let y = scale(C64::from_polar(1.0, 0.7), &x);
        assert!(collision_residual(&f, &x, &y).unwrap() <= 1e-12);

        let g = random_real_entried_frame(3, 5, 1).unwrap();
        let conj: Vec<C64> = x.iter().map(|z| z.conj()).collect();
        assert!(collision_residual(&g, &x, &conj).unwrap() <= 1e-12);

        let z = vec![c(0.1, -2.0), c(1.5, 0.0), c(-0.7, 0.4)];
        assert!(collision_residual(&f, &x, &z).unwrap() > 1e-3);
    }

    #[test]
    fn conjugate_examples() {
        let g = random_real_entried_frame(3, 6, 2).unwrap();
        let w = conjugate_collision_for(&g, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(w.y, vec![c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)]);
        assert!(w.residual <= 1e-12);

        let phased = g
            .with_column_phases(&[0.3, 1.0, -2.0, 0.0, 2.5, 0.1])
            .unwrap();
        assert!(conjugate_collision(&phased, 5).is_some());
        assert!(conjugate_collision(&random_complex_frame(3, 6, 2).unwrap(), 5).is_none());
    }

    #[test]
    fn witness_from_conjugate_collision_validates() {
        let g = random_real_entried_frame(3, 6, 4).unwrap();
        let col = conjugate_collision(&g, 1).unwrap();
        let w = partition_witness_from_collision(&g, &col.x, &col.y).unwrap();
        w.validate(&g, WitnessKind::Retrievability).unwrap();
        w.validate(&g, WitnessKind::SparseL1 { k: 3 }).unwrap();
        assert!(identity_discrepancy(&w) < 1e-9);
    }

    #[test]
    fn underdetermined_frame_has_witness() {
        let f = random_complex_frame(3, 4, 3).unwrap();
        let out = search_thm42_witness(&f, 2000, 1).unwrap();
        let w = out.witness.expect("m < 2d leaves free directions");
        w.validate(&f, WitnessKind::Retrievability).unwrap();
        assert!(out.stats.max_identity_discrepancy < 1e-9);
    }

    #[test]
    fn search_is_deterministic() {
        let f = random_complex_frame(3, 4, 8).unwrap();
        assert_eq!(
            search_thm42_witness(&f, 3000, 9).unwrap(),
            search_thm42_witness(&f, 3000, 9).unwrap()
        );
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let g = random_real_entried_frame(3, 6, 4).unwrap();
        let col = conjugate_collision(&g, 1).unwrap();
        let mut w = partition_witness_from_collision(&g, &col.x, &col.y).unwrap();
        w.eta1[0] += c(0.5, 0.0);
        assert!(w.validate(&g, WitnessKind::Retrievability).is_err());
    }
}
