//! Exact decision procedures for (sparse) phase retrievability of real
//! frames, and the explicit collision construction below `2k` measurements.
//!
//! The sparse decider works on triples `(S, I, J)`: a measurement split and
//! two supports of size `k`. If `x` (supported in `I`) and `y` (supported in
//! `J`) have equal magnitudes, then `<f_j, x - y> = 0` on `S` and
//! `<f_j, x + y> = 0` on `S^c` for some split. Writing `x = u_x + v_x`,
//! `y = u_y + v_y` with the `u` parts on `L = I ∩ J`, and
//! `w_- = u_x - u_y`, `w_+ = u_x + u_y`, these conditions are the homogeneous
//! system `B z = 0` with `z = (v_x, v_y, w_-, w_+)`. The triple admits a
//! collision exactly when `ker B` is not contained in either
//! `W1 = {v_x = v_y = 0, w_- = 0}` (then `x = y`) or
//! `W2 = {v_x = v_y = 0, w_+ = 0}` (then `x = -y`). Over an infinite field a
//! subspace inside `W1 ∪ W2` lies inside one of them, so two exact
//! containment tests decide each triple.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::Matrix;
use crate::frame::{same_sign_class, subsets_of_size, Frame};
use crate::scalar::{add, is_zero_vec, sub, support_size, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundStatus {
    /// Necessary for every frame and sufficient for generic frames.
    Sharp,
    /// Sufficient for generic frames; minimality is open.
    SufficientOnly,
}

impl BoundStatus {
    pub fn tag(self) -> &'static str {
        match self {
            BoundStatus::Sharp => "necessary-and-generically-sufficient",
            BoundStatus::SufficientOnly => "generically-sufficient-minimality-conjectured",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementBound {
    pub k: usize,
    pub d: usize,
    pub field: FieldKind,
    pub bound: usize,
    pub status: BoundStatus,
}

/// Measurement count needed for `k`-sparse phase retrieval in dimension `d`.
pub fn minimal_measurement_bound(k: usize, d: usize, field: FieldKind) -> Result<MeasurementBound> {
    if k == 0 || k > d {
        return Err(Error::Precondition(format!(
            "need 1 <= k <= d, got k={k}, d={d}"
        )));
    }
    let (bound, status) = match field {
        FieldKind::Real => ((2 * k).min(2 * d - 1), BoundStatus::Sharp),
        FieldKind::Complex => (4 * k - 2, BoundStatus::SufficientOnly),
    };
    Ok(MeasurementBound {
        k,
        d,
        field,
        bound,
        status,
    })
}

/// Two vectors with identical measurement magnitudes that are not sign
/// equivalent.
#[derive(Clone, Debug, PartialEq)]
pub struct CollisionWitness<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub sparsity_bound: usize,
}

impl<T: Scalar> CollisionWitness<T> {
    /// Re-checks every claim against `frame`, independently of how the pair
    /// was found.
    pub fn validate(&self, frame: &Frame<T>) -> Result<()> {
        let bx = frame.measure_abs(&self.x)?;
        let by = frame.measure_abs(&self.y)?;
        if bx != by {
            return Err(Error::InvalidWitness("magnitudes differ".into()));
        }
        if same_sign_class(&self.x, &self.y) {
            return Err(Error::InvalidWitness("x and y are sign equivalent".into()));
        }
        if support_size(&self.x) > self.sparsity_bound
            || support_size(&self.y) > self.sparsity_bound
        {
            return Err(Error::InvalidWitness(format!(
                "support exceeds {}",
                self.sparsity_bound
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Retrievable,
    NotRetrievable,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SearchTrace {
    pub splits: u64,
    pub support_pairs: u64,
    /// Triples (or splits, for the full check) in enumeration order up to and
    /// including the first failing one.
    pub examined: u64,
    pub total: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetrievabilityReport<T> {
    pub verdict: Verdict,
    pub witness: Option<CollisionWitness<T>>,
    /// Measurement split `S` (0-based) at which the property fails.
    pub failing_split: Option<Vec<usize>>,
    /// Supports `(I, J)` of the failing triple (sparse check only).
    pub failing_supports: Option<(Vec<usize>, Vec<usize>)>,
    pub trace: SearchTrace,
}

impl<T> RetrievabilityReport<T> {
    pub fn is_retrievable(&self) -> bool {
        self.verdict == Verdict::Retrievable
    }
}

/// Unordered splits `{S, S^c}` of `0..m`, listed as the member `S` that
/// contains index 0, ordered by the bitmask of the other members.
pub fn unordered_splits(m: usize) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> + Clone {
    let count: u64 = if m == 0 { 1 } else { 1u64 << (m - 1) };
    (0..count).map(move |mask| split_from_mask(m, mask))
}

pub(crate) fn split_count(m: usize) -> u64 {
    if m == 0 {
        1
    } else {
        1u64 << (m - 1)
    }
}

pub(crate) fn split_from_mask(m: usize, mask: u64) -> (Vec<usize>, Vec<usize>) {
    let mut s = Vec::new();
    let mut c = Vec::new();
    for j in 0..m {
        let in_s = j == 0 || (mask >> (j - 1)) & 1 == 1;
        if in_s {
            s.push(j)
        } else {
            c.push(j)
        }
    }
    (s, c)
}

/// Full phase retrievability: for every split one side spans `R^d`.
pub fn is_full_pr_real<T: Scalar>(f: &Frame<T>) -> Result<RetrievabilityReport<T>> {
    let total = split_count(f.m());
    let failing = (0..total).into_par_iter().find_first(|&mask| {
        let (s, c) = split_from_mask(f.m(), mask);
        !(f.sub_frame(&s).expect("in range").spans() || f.sub_frame(&c).expect("in range").spans())
    });
    let mut trace = SearchTrace {
        splits: total,
        support_pairs: 1,
        examined: total,
        total,
    };
    let Some(mask) = failing else {
        return Ok(RetrievabilityReport {
            verdict: Verdict::Retrievable,
            witness: None,
            failing_split: None,
            failing_supports: None,
            trace,
        });
    };
    trace.examined = mask + 1;
    let (s, c) = split_from_mask(f.m(), mask);
    // Neither side spans, so both kernels are nontrivial: x = u + v and
    // y = u - v agree in magnitude on every column.
    let u = f.sub_frame(&s)?.kernel().basis()[0].clone();
    let v = f.sub_frame(&c)?.kernel().basis()[0].clone();
    let witness = CollisionWitness {
        x: add(&u, &v),
        y: sub(&u, &v),
        sparsity_bound: f.d(),
    };
    witness.validate(f)?;
    Ok(RetrievabilityReport {
        verdict: Verdict::NotRetrievable,
        witness: Some(witness),
        failing_split: Some(s),
        failing_supports: None,
        trace,
    })
}

/// The homogeneous system attached to a triple `(S, I, J)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSystem<T> {
    pub split: Vec<usize>,
    pub complement: Vec<usize>,
    pub i_support: Vec<usize>,
    pub j_support: Vec<usize>,
    /// `I \ L`, `J \ L`, `L`.
    pub i_only: Vec<usize>,
    pub j_only: Vec<usize>,
    pub common: Vec<usize>,
    /// Rows from `S` first, then from `S^c`; column blocks
    /// `(v_x, v_y, w_-, w_+)` of widths `(k-l, k-l, l, l)`.
    pub matrix: Matrix<T>,
}

impl<T: Scalar> BlockSystem<T> {
    pub fn new(f: &Frame<T>, split: &[usize], i_support: &[usize], j_support: &[usize]) -> Self {
        let common: Vec<usize> = i_support
            .iter()
            .copied()
            .filter(|i| j_support.contains(i))
            .collect();
        let i_only: Vec<usize> = i_support
            .iter()
            .copied()
            .filter(|i| !common.contains(i))
            .collect();
        let j_only: Vec<usize> = j_support
            .iter()
            .copied()
            .filter(|i| !common.contains(i))
            .collect();
        let complement: Vec<usize> = (0..f.m()).filter(|j| !split.contains(j)).collect();
        let (p, l) = (i_only.len(), common.len());
        let width = 2 * p + 2 * l;
        let mut rows = Vec::with_capacity(f.m());
        for (in_split, &j) in split
            .iter()
            .map(|j| (true, j))
            .chain(complement.iter().map(|j| (false, j)))
        {
            let col = f.column(j);
            let mut row = vec![T::zero(); width];
            for (a, &i) in i_only.iter().enumerate() {
                row[a] = col[i].clone();
            }
            for (a, &i) in j_only.iter().enumerate() {
                row[p + a] = if in_split {
                    -col[i].clone()
                } else {
                    col[i].clone()
                };
            }
            let offset = if in_split { 2 * p } else { 2 * p + l };
            for (a, &i) in common.iter().enumerate() {
                row[offset + a] = col[i].clone();
            }
            rows.push(row);
        }
        Self {
            split: split.to_vec(),
            complement,
            i_support: i_support.to_vec(),
            j_support: j_support.to_vec(),
            i_only,
            j_only,
            common,
            matrix: Matrix::from_rows(rows, width).expect("row width"),
        }
    }

    fn blocks(&self) -> (usize, usize) {
        (self.i_only.len(), self.common.len())
    }

    /// `v_x = v_y = 0` and `w_- = 0`: the pair is `x = y`.
    pub fn in_w1(&self, z: &[T]) -> bool {
        let (p, l) = self.blocks();
        z[..2 * p + l].iter().all(|v| v.is_zero())
    }

    /// `v_x = v_y = 0` and `w_+ = 0`: the pair is `x = -y`.
    pub fn in_w2(&self, z: &[T]) -> bool {
        let (p, l) = self.blocks();
        z[..2 * p].iter().all(|v| v.is_zero()) && z[2 * p + l..].iter().all(|v| v.is_zero())
    }

    /// Maps `z = (v_x, v_y, w_-, w_+)` back to `(x, y)` in `T^d`.
    pub fn reconstruct(&self, z: &[T], d: usize) -> (Vec<T>, Vec<T>) {
        let (p, l) = self.blocks();
        let two = T::two();
        let mut x = vec![T::zero(); d];
        let mut y = vec![T::zero(); d];
        for (a, &i) in self.i_only.iter().enumerate() {
            x[i] = z[a].clone();
        }
        for (a, &i) in self.j_only.iter().enumerate() {
            y[i] = z[p + a].clone();
        }
        for (a, &i) in self.common.iter().enumerate() {
            let wm = z[2 * p + a].clone();
            let wp = z[2 * p + l + a].clone();
            x[i] = (wp.clone() + wm.clone()) / two.clone();
            y[i] = (wp - wm) / two.clone();
        }
        (x, y)
    }

    /// A kernel vector outside `W1 ∪ W2`, if the kernel is not contained in
    /// one of them.
    pub fn escaping_vector(&self) -> Option<Vec<T>> {
        let kernel = self.matrix.null_space();
        let basis = kernel.basis();
        if let Some(z) = basis.iter().find(|z| !self.in_w1(z) && !self.in_w2(z)) {
            return Some(z.clone());
        }
        let a = basis.iter().find(|z| !self.in_w1(z))?;
        let b = basis.iter().find(|z| !self.in_w2(z))?;
        // a ∈ W2 \ W1 and b ∈ W1 \ W2 here, so a + b avoids both.
        let z = add(a, b);
        assert!(
            !self.in_w1(&z) && !self.in_w2(&z),
            "a subspace covered by W1 ∪ W2 must lie in one of them"
        );
        Some(z)
    }
}

/// Exhaustive decision of `k`-sparse phase retrievability.
pub fn is_k_sparse_pr_real<T: Scalar>(f: &Frame<T>, k: usize) -> Result<RetrievabilityReport<T>> {
    if k == 0 || k > f.d() {
        return Err(Error::Precondition(format!(
            "need 1 <= k <= d, got k={k}, d={}",
            f.d()
        )));
    }
    let supports = subsets_of_size(f.d(), k);
    let pairs: Vec<(usize, usize)> = (0..supports.len())
        .flat_map(|a| (a..supports.len()).map(move |b| (a, b)))
        .collect();
    let splits = split_count(f.m());
    let total = splits * pairs.len() as u64;
    let hit = (0..total).into_par_iter().find_map_first(|t| {
        let (mask, pair) = (t / pairs.len() as u64, (t % pairs.len() as u64) as usize);
        let (s, _) = split_from_mask(f.m(), mask);
        let (a, b) = pairs[pair];
        let system = BlockSystem::new(f, &s, &supports[a], &supports[b]);
        system.escaping_vector().map(|z| (t, system, z))
    });
    let mut trace = SearchTrace {
        splits,
        support_pairs: pairs.len() as u64,
        examined: total,
        total,
    };
    let Some((t, system, z)) = hit else {
        return Ok(RetrievabilityReport {
            verdict: Verdict::Retrievable,
            witness: None,
            failing_split: None,
            failing_supports: None,
            trace,
        });
    };
    trace.examined = t + 1;
    let (x, y) = system.reconstruct(&z, f.d());
    let witness = CollisionWitness {
        x,
        y,
        sparsity_bound: k,
    };
    witness.validate(f)?;
    Ok(RetrievabilityReport {
        verdict: Verdict::NotRetrievable,
        witness: Some(witness),
        failing_split: Some(system.split.clone()),
        failing_supports: Some((system.i_support.clone(), system.j_support.clone())),
        trace,
    })
}

/// Builds a `k`-sparse collision for any frame with fewer than `2k`
/// vectors: `u` in the first `k+1` coordinates annihilated by the first `k`
/// columns, `v̄` in the same coordinates annihilated by the rest and tuned so
/// `x = u + v̄` and `y = u - v̄` each drop one coordinate.
pub fn collide_below_2k<T: Scalar>(f: &Frame<T>, k: usize) -> Result<CollisionWitness<T>> {
    let (d, m) = (f.d(), f.m());
    if k == 0 || k >= d {
        return Err(Error::Precondition(format!(
            "construction needs 1 <= k < d, got k={k}, d={d}"
        )));
    }
    if m >= 2 * k {
        return Err(Error::Precondition(format!(
            "construction needs m < 2k, got m={m}, k={k}"
        )));
    }
    let w = k + 1;
    let restricted = |cols: std::ops::Range<usize>| {
        Matrix::from_fn(cols.len(), w, |r, c| f.column(cols.start + r)[c].clone())
    };
    let first = k.min(m);
    let u_space = restricted(0..first).null_space();
    let v_space = restricted(first..m).null_space();
    let Some(u_w) = u_space.basis().first() else {
        return Err(Error::Inapplicable(
            "degenerate frame: no admissible u".into(),
        ));
    };
    if v_space.dim() < 2 {
        return Err(Error::Inapplicable(
            "degenerate frame: fewer than two free directions".into(),
        ));
    }
    let (alpha, beta) = (&v_space.basis()[0], &v_space.basis()[1]);

    let minor = |a: usize, b: usize| {
        alpha[a].clone() * beta[b].clone() - alpha[b].clone() * beta[a].clone()
    };
    let (i1, i2) = (0..w)
        .flat_map(|a| (a + 1..w).map(move |b| (a, b)))
        .find(|&(a, b)| !minor(a, b).is_zero())
        .expect("independent alpha, beta have a nonzero 2x2 minor");
    let det = minor(i1, i2);
    let (r1, r2) = if !u_w[i1].is_zero() || !u_w[i2].is_zero() {
        (u_w[i1].clone(), -u_w[i2].clone())
    } else {
        (T::zero(), T::one())
    };
    let t0 = (r1.clone() * beta[i2].clone() - r2.clone() * beta[i1].clone()) / det.clone();
    let s0 = (alpha[i1].clone() * r2 - alpha[i2].clone() * r1) / det;

    let mut u = vec![T::zero(); d];
    let mut v_bar = vec![T::zero(); d];
    for c in 0..w {
        u[c] = u_w[c].clone();
        v_bar[c] = t0.clone() * alpha[c].clone() + s0.clone() * beta[c].clone();
    }
    if is_zero_vec(&u) {
        return Err(Error::Inapplicable("degenerate frame: u vanished".into()));
    }
    let witness = CollisionWitness {
        x: add(&u, &v_bar),
        y: sub(&u, &v_bar),
        sparsity_bound: k,
    };
    witness.validate(f)?;
    Ok(witness)
}
