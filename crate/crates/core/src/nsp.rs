//! Exact certification of the classical null space property and of its
//! phaseless analogue for real frames, with witness extraction.
//!
//! Classical, order `k`: every nonzero `η` with `F^T η = 0` has
//! `||η_T||_1 < ||η_{T^c}||_1` for all `#T <= k`.
//!
//! Phaseless, order `k`: for every split `S` and all nonzero
//! `u ∈ N(F_S)`, `v ∈ N(F_{S^c})` with `||u+v||_0 <= k`,
//! `||u+v||_1 < ||u-v||_1`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{
    l1_min_affine, lp_solve_exact, L1Outcome, LpOutcome, LpProblem, Matrix, Subspace, VarBound,
};
use crate::frame::{subsets_of_size, Frame};
use crate::phaseless::{solve_l1_phaseless_real, ArgminReport, PhaselessProblem};
use crate::retrieval::{split_count, split_from_mask};
use crate::rng::SeededRng;
use crate::scalar::{add, is_zero_vec, l1_norm, sub, support, support_size, Scalar};

/// `2^(d-1)` sign patterns with `σ_1 = +1`.
fn canonical_signs(d: usize) -> impl Iterator<Item = Vec<i8>> {
    let count = if d == 0 { 1 } else { 1u64 << (d - 1) };
    (0..count).map(move |mask| {
        (0..d)
            .map(|i| {
                if i > 0 && (mask >> (i - 1)) & 1 == 1 {
                    -1
                } else {
                    1
                }
            })
            .collect()
    })
}

fn all_signs(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1u64 << n).map(move |mask| {
        (0..n)
            .map(|i| if (mask >> i) & 1 == 1 { -1 } else { 1 })
            .collect()
    })
}

fn signed<T: Scalar>(s: i8, v: T) -> T {
    if s < 0 {
        -v
    } else {
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NspViolation<T> {
    pub support: Vec<usize>,
    pub eta: Vec<T>,
    /// `||η_T||_1 - ||η_{T^c}||_1`.
    pub margin: T,
}

impl<T: Scalar> NspViolation<T> {
    pub fn validate(&self, f: &Frame<T>, k: usize) -> Result<()> {
        if self.support.len() > k {
            return Err(Error::InvalidWitness(format!("support larger than {k}")));
        }
        if is_zero_vec(&self.eta) {
            return Err(Error::InvalidWitness("eta is zero".into()));
        }
        if !is_zero_vec(&f.apply(&self.eta)?) {
            return Err(Error::InvalidWitness("eta is not in the null space".into()));
        }
        let margin = split_margin(&self.eta, &self.support);
        if margin != self.margin || margin < T::zero() {
            return Err(Error::InvalidWitness("margin mismatch".into()));
        }
        Ok(())
    }
}

fn split_margin<T: Scalar>(eta: &[T], t: &[usize]) -> T {
    eta.iter().enumerate().fold(T::zero(), |acc, (i, e)| {
        if t.contains(&i) {
            acc + e.abs()
        } else {
            acc - e.abs()
        }
    })
}

/// Result of a property check: `None` means the property holds.
#[derive(Clone, Debug, PartialEq)]
pub struct NspReport<V> {
    pub violation: Option<V>,
    /// Cells `(S, T)` or `(T, σ)` in enumeration order up to and including
    /// the first failing one.
    pub examined: u64,
    pub total: u64,
}

impl<V> NspReport<V> {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Exact check of the classical null space property of order `k`.
///
/// For each `T` with `#T = k` and each canonical `σ`, maximizes
/// `Σ_T s_i - Σ_{T^c} s_i` over `s >= 0`, `Σ s = 1`, `F^T (σ∘s) = 0`; the
/// property fails iff some optimum is nonnegative, with `η = σ∘s`.
pub fn check_nsp_classical<T: Scalar>(
    f: &Frame<T>,
    k: usize,
) -> Result<NspReport<NspViolation<T>>> {
    let d = f.d();
    if k > d {
        return Err(Error::Precondition(format!(
            "need k <= d, got k={k}, d={d}"
        )));
    }
    if f.kernel().is_trivial() {
        return Ok(NspReport {
            violation: None,
            examined: 0,
            total: 0,
        });
    }
    let a = f.analysis();
    let cells: Vec<(Vec<usize>, Vec<i8>)> = subsets_of_size(d, k)
        .into_iter()
        .flat_map(|t| canonical_signs(d).map(move |s| (t.clone(), s)))
        .collect();
    let hit = cells
        .par_iter()
        .enumerate()
        .map(|(idx, (t, sigma))| classical_cell(&a, t, sigma).map(|v| v.map(|v| (idx, v))))
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    let total = cells.len() as u64;
    match hit {
        None => Ok(NspReport {
            violation: None,
            examined: total,
            total,
        }),
        Some(Err(e)) => Err(e),
        Some(Ok(None)) => unreachable!(),
        Some(Ok(Some((idx, w)))) => {
            w.validate(f, k)?;
            Ok(NspReport {
                violation: Some(w),
                examined: idx as u64 + 1,
                total,
            })
        }
    }
}

fn classical_cell<T: Scalar>(
    a: &Matrix<T>,
    t: &[usize],
    sigma: &[i8],
) -> Result<Option<NspViolation<T>>> {
    let d = a.cols();
    let mut constraints =
        Matrix::from_fn(a.rows(), d, |j, i| signed(sigma[i], a.get(j, i).clone()));
    constraints = constraints.vstack(&Matrix::from_fn(1, d, |_, _| T::one()))?;
    let mut rhs = vec![T::zero(); a.rows()];
    rhs.push(T::one());
    let objective = (0..d)
        .map(|i| if t.contains(&i) { T::one() } else { -T::one() })
        .collect();
    let lp = LpProblem::nonnegative(objective, constraints, rhs)?;
    match lp_solve_exact(&lp)? {
        LpOutcome::Optimal { value, point } if value >= T::zero() => {
            let eta: Vec<T> = (0..d).map(|i| signed(sigma[i], point[i].clone())).collect();
            let eta = T::primitive_scale(&eta);
            let margin = split_margin(&eta, t);
            Ok(Some(NspViolation {
                support: t.to_vec(),
                eta,
                margin,
            }))
        }
        _ => Ok(None),
    }
}

/// Whether plain ℓ1 minimization with phase returns exactly `x0`.
pub fn phased_recovers<T: Scalar>(f: &Frame<T>, x0: &[T]) -> Result<bool> {
    let b = f.apply(x0)?;
    Ok(match l1_min_affine(&f.analysis(), &b)? {
        L1Outcome::Optimal(s) => s.is_unique() && s.point == x0,
        L1Outcome::Infeasible => false,
    })
}

/// `k`-sparse test signals covering every (support, sign pattern) stratum
/// once with random magnitudes, then filled with unrestricted random draws up
/// to `trials`. Phased ℓ1 recovery of `x0` depends only on its support and
/// signs, so whenever the strata fit in `trials` the sample is exhaustive.
pub fn stratified_sparse_signals<T: Scalar>(
    d: usize,
    k: usize,
    trials: usize,
    seed: u64,
    bound: i64,
) -> Vec<Vec<T>> {
    let mut rng = SeededRng::new(seed);
    let mut out = Vec::new();
    for t in subsets_of_size(d, k) {
        for signs in all_signs(k) {
            let mut x = vec![T::zero(); d];
            for (&i, s) in t.iter().zip(&signs) {
                x[i] = T::from_int(*s as i64 * rng.int_in(1, bound));
            }
            out.push(x);
        }
    }
    while out.len() < trials {
        out.push(crate::phaseless::random_sparse_vector(
            &mut rng, d, k, bound,
        ));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SubsetScope {
    /// Every split `S ⊆ [1:m]`.
    #[default]
    AllSubsets,
    /// Only splits with `#S <= k` (or `#S^c <= k`, by symmetry).
    CardinalityAtMostK,
}

impl SubsetScope {
    pub fn name(self) -> &'static str {
        match self {
            SubsetScope::AllSubsets => "all_subsets",
            SubsetScope::CardinalityAtMostK => "cardinality_at_most_k",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "all_subsets" => Ok(SubsetScope::AllSubsets),
            "cardinality_at_most_k" => Ok(SubsetScope::CardinalityAtMostK),
            other => Err(Error::Parse(format!("unknown policy {other:?}"))),
        }
    }
}

/// Which splits are checked. The inequality is always strict: equality is a
/// violation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct CheckPolicy {
    pub scope: SubsetScope,
}

/// Documented envelope for the exhaustive phaseless check.
pub const PHASELESS_MAX_D: usize = 6;
pub const PHASELESS_MAX_M: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaselessOptions {
    pub policy: CheckPolicy,
    /// Run beyond the documented envelope.
    pub override_budget: bool,
    pub prescreen_seed: u64,
    pub prescreen_samples: usize,
}

impl Default for PhaselessOptions {
    fn default() -> Self {
        Self {
            policy: CheckPolicy::default(),
            override_budget: false,
            prescreen_seed: 0,
            prescreen_samples: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaselessNspViolation<T> {
    pub split: Vec<usize>,
    pub u: Vec<T>,
    pub v: Vec<T>,
    /// Support of `u + v`.
    pub support: Vec<usize>,
    /// `||u+v||_1 - ||u-v||_1`.
    pub margin: T,
    pub policy: CheckPolicy,
}

impl<T: Scalar> PhaselessNspViolation<T> {
    pub fn complement(&self, m: usize) -> Vec<usize> {
        (0..m).filter(|j| !self.split.contains(j)).collect()
    }

    pub fn validate(&self, f: &Frame<T>, k: usize) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidWitness(msg.into()));
        if self.u.len() != f.d() || self.v.len() != f.d() {
            return bad("vector length differs from d");
        }
        if is_zero_vec(&self.u) || is_zero_vec(&self.v) {
            return bad("u and v must both be nonzero");
        }
        if !is_zero_vec(&f.sub_frame(&self.split)?.apply(&self.u)?) {
            return bad("u is not in N(F_S)");
        }
        if !is_zero_vec(&f.sub_frame(&self.complement(f.m()))?.apply(&self.v)?) {
            return bad("v is not in N(F_{S^c})");
        }
        let sum = add(&self.u, &self.v);
        let diff = sub(&self.u, &self.v);
        if support_size(&sum) > k || support(&sum) != self.support {
            return bad("u + v is not k-sparse on the recorded support");
        }
        let margin = l1_norm(&sum) - l1_norm(&diff);
        if margin < T::zero() || margin != self.margin {
            return bad("inequality does not fail as claimed");
        }
        Ok(())
    }
}

pub fn check_nsp_phaseless_real<T: Scalar>(
    f: &Frame<T>,
    k: usize,
    policy: CheckPolicy,
) -> Result<NspReport<PhaselessNspViolation<T>>> {
    check_nsp_phaseless_real_with(
        f,
        k,
        PhaselessOptions {
            policy,
            ..Default::default()
        },
    )
}

/// Exhaustive check over cells `(S, T)`; each cell runs a seeded random
/// pre-screen and then the exact sign-pattern LPs.
pub fn check_nsp_phaseless_real_with<T: Scalar>(
    f: &Frame<T>,
    k: usize,
    opts: PhaselessOptions,
) -> Result<NspReport<PhaselessNspViolation<T>>> {
    let (d, m) = (f.d(), f.m());
    if k == 0 || k > d {
        return Err(Error::Precondition(format!(
            "need 1 <= k <= d, got k={k}, d={d}"
        )));
    }
    if !opts.override_budget && (d > PHASELESS_MAX_D || m > PHASELESS_MAX_M) {
        return Err(Error::Budget {
            what: "phaseless NSP envelope (d <= 6, m <= 8)",
            requested: (d.max(m)) as u128,
            limit: if d > PHASELESS_MAX_D {
                PHASELESS_MAX_D
            } else {
                PHASELESS_MAX_M
            } as u128,
        });
    }
    let supports = subsets_of_size(d, k);
    let total = split_count(m) * supports.len() as u64;
    let hit = (0..total)
        .into_par_iter()
        .map(|cell| {
            let (mask, ti) = (
                cell / supports.len() as u64,
                (cell % supports.len() as u64) as usize,
            );
            let (s, c) = split_from_mask(m, mask);
            let admitted = match opts.policy.scope {
                SubsetScope::AllSubsets => true,
                SubsetScope::CardinalityAtMostK => s.len() <= k || c.len() <= k,
            };
            if !admitted {
                return Ok(None);
            }
            let seed = SeededRng::derive_seed(opts.prescreen_seed, cell);
            phaseless_cell(f, &s, &c, &supports[ti], seed, opts.prescreen_samples)
                .map(|w| w.map(|(u, v)| (cell, s, u, v)))
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match hit {
        None => Ok(NspReport {
            violation: None,
            examined: total,
            total,
        }),
        Some(Err(e)) => Err(e),
        Some(Ok(None)) => unreachable!(),
        Some(Ok(Some((cell, split, u, v)))) => {
            let joint: Vec<T> = u.iter().chain(&v).cloned().collect();
            let joint = T::primitive_scale(&joint);
            let (u, v) = (joint[..d].to_vec(), joint[d..].to_vec());
            let sum = add(&u, &v);
            let w = PhaselessNspViolation {
                split,
                margin: l1_norm(&sum) - l1_norm(&sub(&u, &v)),
                support: support(&sum),
                u,
                v,
                policy: opts.policy,
            };
            w.validate(f, k)?;
            Ok(NspReport {
                violation: Some(w),
                examined: cell + 1,
                total,
            })
        }
    }
}

/// Basis of `V_T` as `(u, v)` pairs.
struct CellSpace<T> {
    d: usize,
    basis: Vec<Vec<T>>,
}

impl<T: Scalar> CellSpace<T> {
    fn point(&self, t: &[T]) -> (Vec<T>, Vec<T>) {
        let mut z = vec![T::zero(); 2 * self.d];
        for (c, b) in t.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (zi, bi) in z.iter_mut().zip(b) {
                *zi = zi.clone() + c.clone() * bi.clone();
            }
        }
        let v = z.split_off(self.d);
        (z, v)
    }
}

fn phaseless_cell<T: Scalar>(
    f: &Frame<T>,
    s: &[usize],
    c: &[usize],
    t: &[usize],
    seed: u64,
    samples: usize,
) -> Result<Option<(Vec<T>, Vec<T>)>> {
    let d = f.d();
    // rows: F_S^T u = 0, F_{S^c}^T v = 0, (u+v)_i = 0 off T
    let mut rows: Vec<Vec<T>> = Vec::new();
    for &j in s {
        let mut r = f.column(j).to_vec();
        r.extend(vec![T::zero(); d]);
        rows.push(r);
    }
    for &j in c {
        let mut r = vec![T::zero(); d];
        r.extend(f.column(j).iter().cloned());
        rows.push(r);
    }
    for i in (0..d).filter(|i| !t.contains(i)) {
        let mut r = vec![T::zero(); 2 * d];
        r[i] = T::one();
        r[d + i] = T::one();
        rows.push(r);
    }
    let space: Subspace<T> = Matrix::from_rows(rows, 2 * d)?.null_space();
    if space.is_trivial() {
        return Ok(None);
    }
    let cell = CellSpace {
        d,
        basis: space.basis().to_vec(),
    };
    if cell.basis.iter().all(|b| is_zero_vec(&b[..d]))
        || cell.basis.iter().all(|b| is_zero_vec(&b[d..]))
    {
        return Ok(None);
    }

    // u = v = w with w k-sparse in N(F): ||2w||_1 > 0 = ||u - v||_1.
    if let Some((u, v)) = diagonal_point(f, t)? {
        return Ok(Some((u, v)));
    }

    let violates = |u: &[T], v: &[T]| {
        !is_zero_vec(u) && !is_zero_vec(v) && l1_norm(&add(u, v)) >= l1_norm(&sub(u, v))
    };
    let mut rng = SeededRng::new(seed);
    for _ in 0..samples {
        let coeffs: Vec<T> = (0..cell.basis.len())
            .map(|_| T::from_int(rng.int_in(-3, 3)))
            .collect();
        let (u, v) = cell.point(&coeffs);
        if violates(&u, &v) {
            return Ok(Some((u, v)));
        }
    }

    for sigma in all_signs(t.len()) {
        for tau in canonical_signs(d) {
            if let Some(hit) = sign_cell_lp(&cell, t, &sigma, &tau)? {
                debug_assert!(violates(&hit.0, &hit.1));
                return Ok(Some(hit));
            }
        }
    }
    Ok(None)
}

/// Nonzero `w` with `F^T w = 0` supported in `T`, as the pair `(w, w)`.
fn diagonal_point<T: Scalar>(f: &Frame<T>, t: &[usize]) -> Result<Option<(Vec<T>, Vec<T>)>> {
    let restricted = f.analysis().select_cols(t);
    let ns = restricted.null_space();
    let Some(w_t) = ns.basis().first() else {
        return Ok(None);
    };
    let mut w = vec![T::zero(); f.d()];
    for (&i, x) in t.iter().zip(w_t) {
        w[i] = x.clone();
    }
    Ok(Some((w.clone(), w)))
}

/// LP over `V_T` for fixed signs: `σ` on `T` for `u+v`, `τ` on `[d]` for
/// `u-v`. Variables: basis coefficients (free), then `s = σ∘(u+v)_T >= 0`,
/// then `r = τ∘(u-v) >= 0`; `Σ r = 1`; maximize `Σ s - 1`.
fn sign_cell_lp<T: Scalar>(
    cell: &CellSpace<T>,
    t: &[usize],
    sigma: &[i8],
    tau: &[i8],
) -> Result<Option<(Vec<T>, Vec<T>)>> {
    let d = cell.d;
    let q = cell.basis.len();
    let k = t.len();
    let n = q + k + d;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (a, &i) in t.iter().enumerate() {
        let mut r = vec![T::zero(); n];
        for (j, b) in cell.basis.iter().enumerate() {
            r[j] = signed(sigma[a], b[i].clone() + b[d + i].clone());
        }
        r[q + a] = -T::one();
        rows.push(r);
        rhs.push(T::zero());
    }
    for i in 0..d {
        let mut r = vec![T::zero(); n];
        for (j, b) in cell.basis.iter().enumerate() {
            r[j] = signed(tau[i], b[i].clone() - b[d + i].clone());
        }
        r[q + k + i] = -T::one();
        rows.push(r);
        rhs.push(T::zero());
    }
    let mut norm = vec![T::zero(); n];
    for x in norm.iter_mut().skip(q + k) {
        *x = T::one();
    }
    rows.push(norm);
    rhs.push(T::one());
    let constraints = Matrix::from_rows(rows, n)?;
    let mut objective = vec![T::zero(); n];
    for x in objective.iter_mut().skip(q).take(k) {
        *x = T::one();
    }
    let bounds: Vec<VarBound> = (0..n)
        .map(|j| {
            if j < q {
                VarBound::Free
            } else {
                VarBound::NonNegative
            }
        })
        .collect();
    let lp = LpProblem::new(
        objective.clone(),
        constraints.clone(),
        rhs.clone(),
        bounds.clone(),
    )?;
    // the objective here is Σ s; the violation threshold is Σ s >= 1
    match lp_solve_exact(&lp)? {
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded { point, ray } => {
            // Σ s grows without bound while Σ r stays 1; step far enough out.
            let step = T::from_int(2) + l1_norm(&point);
            let coeffs: Vec<T> = (0..q)
                .map(|j| point[j].clone() + step.clone() * ray[j].clone())
                .collect();
            let (u, v) = cell.point(&coeffs);
            if !is_zero_vec(&u)
                && !is_zero_vec(&v)
                && l1_norm(&add(&u, &v)) >= l1_norm(&sub(&u, &v))
            {
                Ok(Some((u, v)))
            } else {
                Err(Error::Precondition(
                    "unbounded cell did not yield a violation".into(),
                ))
            }
        }
        LpOutcome::Optimal { value, point } => {
            if value > T::one() {
                return Ok(Some(cell.point(&point[..q])));
            }
            if value < T::one() {
                return Ok(None);
            }
            // Equality: look for a point of the optimal face with u, v != 0.
            let mut pinned = constraints;
            pinned = pinned.vstack(&Matrix::from_rows(vec![objective], n)?)?;
            let mut face_rhs = rhs;
            face_rhs.push(T::one());
            let first = cell.point(&point[..q]);
            equality_face_point(cell, q, &pinned, &face_rhs, &bounds, first)
        }
    }
}

fn equality_face_point<T: Scalar>(
    cell: &CellSpace<T>,
    q: usize,
    pinned: &Matrix<T>,
    rhs: &[T],
    bounds: &[VarBound],
    first: (Vec<T>, Vec<T>),
) -> Result<Option<(Vec<T>, Vec<T>)>> {
    let d = cell.d;
    let n = pinned.cols();
    let good = |p: &(Vec<T>, Vec<T>)| !is_zero_vec(&p.0) && !is_zero_vec(&p.1);
    if good(&first) {
        return Ok(Some(first));
    }
    // Extremize each coordinate of u (offset 0) or v (offset d) over the
    // face until one is nonzero.
    let find = |offset: usize| -> Result<Option<Vec<T>>> {
        for i in 0..d {
            for sign in [T::one(), -T::one()] {
                let mut c = vec![T::zero(); n];
                for (j, b) in cell.basis.iter().enumerate() {
                    c[j] = sign.clone() * b[offset + i].clone();
                }
                let lp = LpProblem::new(c, pinned.clone(), rhs.to_vec(), bounds.to_vec())?;
                match lp_solve_exact(&lp)? {
                    LpOutcome::Optimal { value, point } if value > T::zero() => {
                        return Ok(Some(point[..q].to_vec()))
                    }
                    LpOutcome::Unbounded { .. } => unreachable!("the optimal face is bounded"),
                    _ => {}
                }
            }
        }
        Ok(None)
    };
    let Some(pu) = find(0)? else { return Ok(None) };
    let Some(pv) = find(d)? else { return Ok(None) };
    let (a, b) = (cell.point(&pu), cell.point(&pv));
    if good(&a) {
        return Ok(Some(a));
    }
    if good(&b) {
        return Ok(Some(b));
    }
    // u(λ) and v(λ) each vanish for at most one λ, so three weights suffice.
    for den in 2..=4 {
        let lambda = T::one() / T::from_int(den);
        let coeffs: Vec<T> = pu
            .iter()
            .zip(&pv)
            .map(|(x, y)| lambda.clone() * x.clone() + (T::one() - lambda.clone()) * y.clone())
            .collect();
        let p = cell.point(&coeffs);
        if good(&p) {
            return Ok(Some(p));
        }
    }
    unreachable!("convex combinations of the two probe points cannot all fail")
}

/// A concrete non-recovery instance built from a phaseless violation.
#[derive(Clone, Debug, PartialEq)]
pub struct FailureInstance<T> {
    pub x0: Vec<T>,
    pub competitor: Vec<T>,
    pub report: ArgminReport<T>,
}

/// `x0 = u + v` and `z = u - v` share magnitudes, `z` is not `±x0` and is no
/// longer in ℓ1; checks that phaseless ℓ1 minimization fails to return
/// exactly `{±x0}`.
pub fn failure_instance_from_violation<T: Scalar>(
    f: &Frame<T>,
    w: &PhaselessNspViolation<T>,
    k: usize,
) -> Result<FailureInstance<T>> {
    w.validate(f, k)?;
    let x0 = add(&w.u, &w.v);
    let z = sub(&w.u, &w.v);
    if f.measure_abs(&x0)? != f.measure_abs(&z)? {
        return Err(Error::InvalidWitness("x0 and z differ in magnitude".into()));
    }
    if crate::frame::same_sign_class(&x0, &z) {
        return Err(Error::InvalidWitness("z is ±x0".into()));
    }
    if l1_norm(&z) > l1_norm(&x0) {
        return Err(Error::InvalidWitness("z is longer than x0 in l1".into()));
    }
    let report = solve_l1_phaseless_real(&PhaselessProblem::from_signal(f.clone(), &x0)?)?;
    if report.recovers(&x0) {
        return Err(Error::InvalidWitness(
            "phaseless l1 still returns exactly {±x0}; violation gives no failure".into(),
        ));
    }
    Ok(FailureInstance {
        x0,
        competitor: z,
        report,
    })
}
