//! Exact phaseless ℓ1 minimization over real frames by sign-pattern
//! enumeration, a brute-force ℓ0 oracle, and seeded recovery experiments.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{l1_min_value, probe_optimal_face, Matrix};
use crate::frame::{canonicalize_sign, subsets_of_size, Frame, MagnitudeVector, SignClassVector};
use crate::rng::SeededRng;
use crate::scalar::{l1_norm, support, support_size, Scalar};

/// Largest `m` for which the `2^(m-1)` patterns are enumerated.
pub const DEFAULT_PATTERN_CAP: usize = 20;
/// Cap on `C(d,k) * 2^k` for the ℓ0 oracle.
pub const DEFAULT_ORACLE_BUDGET: u128 = 1 << 24;
/// Default entry bound for random experiment signals.
pub const DEFAULT_SIGNAL_BOUND: i64 = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct PhaselessProblem<T> {
    frame: Frame<T>,
    b: MagnitudeVector<T>,
}

impl<T: Scalar> PhaselessProblem<T> {
    pub fn new(frame: Frame<T>, b: MagnitudeVector<T>) -> Result<Self> {
        if b.len() != frame.m() {
            return Err(Error::dims("magnitude vector", frame.m(), b.len()));
        }
        Ok(Self { frame, b })
    }

    /// The problem whose magnitudes are measured from `x0`.
    pub fn from_signal(frame: Frame<T>, x0: &[T]) -> Result<Self> {
        let b = frame.measure_abs(x0)?;
        Ok(Self { frame, b })
    }

    pub fn frame(&self) -> &Frame<T> {
        &self.frame
    }

    pub fn b(&self) -> &[T] {
        self.b.as_slice()
    }
}

/// Measurement signs. Positions with `b_j = 0` carry 0 (their sign is
/// irrelevant); the first nonzero entry is `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignPattern(Vec<i8>);

impl SignPattern {
    pub fn new(mut signs: Vec<i8>) -> Self {
        if let Some(first) = signs.iter().find(|s| **s != 0) {
            if *first < 0 {
                signs.iter_mut().for_each(|s| *s = -*s);
            }
        }
        Self(signs)
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    /// `b_ε = (ε_j b_j)_j`.
    pub fn apply<T: Scalar>(&self, b: &[T]) -> Vec<T> {
        self.0
            .iter()
            .zip(b)
            .map(|(s, v)| if *s < 0 { -v.clone() } else { v.clone() })
            .collect()
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            let c = match s {
                1 => '+',
                -1 => '-',
                _ => '0',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Canonical patterns for `b`: one per pair `{ε, -ε}` on the positions
/// with `b_j > 0`.
pub fn sign_patterns<T: Scalar>(b: &[T]) -> Vec<SignPattern> {
    let live: Vec<usize> = support(b);
    if live.is_empty() {
        return vec![SignPattern(vec![0; b.len()])];
    }
    (0..1u64 << (live.len() - 1))
        .map(|mask| {
            let mut signs = vec![0i8; b.len()];
            signs[live[0]] = 1;
            for (bit, &j) in live[1..].iter().enumerate() {
                signs[j] = if (mask >> bit) & 1 == 1 { -1 } else { 1 };
            }
            SignPattern(signs)
        })
        .collect()
}

/// An optimal face of positive dimension for one pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct NonpointFace<T> {
    pub pattern: SignPattern,
    pub dimension: usize,
    pub vertex: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArgminReport<T> {
    /// `None` when no pattern is feasible.
    pub optimal_value: Option<T>,
    pub minimizer_classes: Vec<SignClassVector<T>>,
    pub nonpoint_faces: Vec<NonpointFace<T>>,
    pub per_epsilon: Vec<(SignPattern, Option<T>)>,
}

impl<T: Scalar> ArgminReport<T> {
    /// Exactly one minimizer class and no positive-dimensional faces.
    pub fn is_unique(&self) -> bool {
        self.minimizer_classes.len() == 1 && self.nonpoint_faces.is_empty()
    }

    /// The argmin set is exactly `{±x0}`.
    pub fn recovers(&self, x0: &[T]) -> bool {
        self.is_unique() && self.minimizer_classes[0] == canonicalize_sign(x0)
    }

    /// Whether `x` or `-x` lies in the union of the reported nonpoint faces.
    /// Patterns are canonical, so a face may hold either member of the class.
    pub fn on_nonpoint_face(&self, frame: &Frame<T>, b: &[T], x: &[T]) -> Result<bool> {
        let Some(opt) = &self.optimal_value else {
            return Ok(false);
        };
        if l1_norm(x) != *opt {
            return Ok(false);
        }
        let fx = frame.apply(x)?;
        let neg = crate::scalar::neg(&fx);
        Ok(self.nonpoint_faces.iter().any(|face| {
            let target = face.pattern.apply(b);
            target == fx || target == neg
        }))
    }
}

pub fn solve_l1_phaseless_real<T: Scalar>(p: &PhaselessProblem<T>) -> Result<ArgminReport<T>> {
    solve_l1_phaseless_real_capped(p, DEFAULT_PATTERN_CAP)
}

/// Solves `min ||x||_1 s.t. F^T x = b_ε` for every canonical `ε`, then
/// probes the optimal face of each pattern attaining the overall minimum.
pub fn solve_l1_phaseless_real_capped<T: Scalar>(
    p: &PhaselessProblem<T>,
    cap: usize,
) -> Result<ArgminReport<T>> {
    let m = p.frame.m();
    if m > cap {
        return Err(Error::Budget {
            what: "sign patterns (m)",
            requested: m as u128,
            limit: cap as u128,
        });
    }
    let a = p.frame.analysis();
    let patterns = sign_patterns(p.b());
    let solved: Vec<Option<(T, Vec<T>)>> = patterns
        .par_iter()
        .map(|eps| l1_min_value(&a, &eps.apply(p.b())))
        .collect::<Result<_>>()?;

    let optimal_value = solved
        .iter()
        .flatten()
        .map(|(v, _)| v)
        .min_by(|x, y| x.partial_cmp(y).expect("ordered scalars"))
        .cloned();
    let per_epsilon = patterns
        .iter()
        .zip(&solved)
        .map(|(e, s)| (e.clone(), s.as_ref().map(|(v, _)| v.clone())))
        .collect();
    let Some(opt) = optimal_value.clone() else {
        return Ok(ArgminReport {
            optimal_value: None,
            minimizer_classes: Vec::new(),
            nonpoint_faces: Vec::new(),
            per_epsilon,
        });
    };

    let attaining: Vec<usize> = (0..patterns.len())
        .filter(|&i| matches!(&solved[i], Some((v, _)) if *v == opt))
        .collect();
    let probes = attaining
        .par_iter()
        .map(|&i| probe_optimal_face(&a, &patterns[i].apply(p.b()), &opt))
        .collect::<Result<Vec<_>>>()?;

    let mut minimizer_classes: Vec<SignClassVector<T>> = Vec::new();
    let mut nonpoint_faces = Vec::new();
    for (&i, probe) in attaining.iter().zip(probes) {
        let point = solved[i].as_ref().expect("feasible").1.clone();
        if probe.is_unique() {
            let class = canonicalize_sign(&point);
            if !minimizer_classes.contains(&class) {
                minimizer_classes.push(class);
            }
        } else {
            nonpoint_faces.push(NonpointFace {
                pattern: patterns[i].clone(),
                dimension: probe.dimension,
                vertex: point,
            });
        }
    }
    Ok(ArgminReport {
        optimal_value,
        minimizer_classes,
        nonpoint_faces,
        per_epsilon,
    })
}

/// Solutions of `{x supported in T : A_{R,T} x_T = ε_R b_R}` when that set
/// has positive dimension and every member matches all magnitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleFamily<T> {
    pub support: Vec<usize>,
    pub rows: Vec<usize>,
    pub rhs: Vec<T>,
    pub dimension: usize,
    pub sample: Vec<T>,
}

impl<T: Scalar> OracleFamily<T> {
    fn system(&self, frame: &Frame<T>) -> Matrix<T> {
        frame
            .analysis()
            .select_rows(&self.rows)
            .select_cols(&self.support)
    }

    pub fn contains(&self, frame: &Frame<T>, x: &[T]) -> bool {
        if support(x).iter().any(|i| !self.support.contains(i)) {
            return false;
        }
        let xt: Vec<T> = self.support.iter().map(|&i| x[i].clone()).collect();
        self.system(frame)
            .mul_vec(&xt)
            .map(|v| v == self.rhs)
            .unwrap_or(false)
    }

    /// Smallest ℓ1 norm over the family.
    pub fn min_l1(&self, frame: &Frame<T>) -> Result<T> {
        let (value, _) = l1_min_value(&self.system(frame), &self.rhs)?
            .expect("family is nonempty by construction");
        Ok(value)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolutions<T> {
    pub k: usize,
    /// Isolated solutions, one per sign class, in discovery order.
    pub classes: Vec<SignClassVector<T>>,
    pub families: Vec<OracleFamily<T>>,
}

impl<T: Scalar> OracleSolutions<T> {
    pub fn contains(&self, frame: &Frame<T>, x: &[T]) -> bool {
        let class = canonicalize_sign(x);
        support_size(x) <= self.k
            && (self.classes.contains(&class)
                || self
                    .families
                    .iter()
                    .any(|f| f.contains(frame, class.as_slice())))
    }
}

/// Every sign class with at most `k` nonzeros and `|F^T x| = b`, by
/// enumeration of supports of size `k` and signs on independent rows.
pub fn l0_oracle_solutions<T: Scalar>(
    p: &PhaselessProblem<T>,
    k: usize,
) -> Result<OracleSolutions<T>> {
    let d = p.frame.d();
    if k > d {
        return Err(Error::Precondition(format!(
            "need k <= d, got k={k}, d={d}"
        )));
    }
    let work = binomial(d, k).saturating_mul(1u128 << k.min(100));
    if work > DEFAULT_ORACLE_BUDGET {
        return Err(Error::Budget {
            what: "l0 oracle C(d,k)*2^k",
            requested: work,
            limit: DEFAULT_ORACLE_BUDGET,
        });
    }
    let a = p.frame.analysis();
    let b = p.b();
    let per_support: Vec<SupportSolutions<T>> = subsets_of_size(d, k)
        .into_par_iter()
        .map(|t| oracle_on_support(&p.frame, &a, b, t))
        .collect::<Result<_>>()?;

    let mut classes = Vec::new();
    let mut families = Vec::new();
    for (cs, fs) in per_support {
        for c in cs {
            if !classes.contains(&c) {
                classes.push(c);
            }
        }
        families.extend(fs);
    }
    Ok(OracleSolutions {
        k,
        classes,
        families,
    })
}

/// Isolated classes and families found on one support.
type SupportSolutions<T> = (Vec<SignClassVector<T>>, Vec<OracleFamily<T>>);

fn oracle_on_support<T: Scalar>(
    frame: &Frame<T>,
    a: &Matrix<T>,
    b: &[T],
    t: Vec<usize>,
) -> Result<SupportSolutions<T>> {
    let d = frame.d();
    let at = a.select_cols(&t);
    let rows = at.independent_rows();
    let sub = at.select_rows(&rows);
    let r = rows.len();
    let mut classes: Vec<SignClassVector<T>> = Vec::new();
    let mut families = Vec::new();
    for mask in 0..1u64 << r {
        let rhs: Vec<T> = rows
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                if (mask >> i) & 1 == 1 {
                    -b[j].clone()
                } else {
                    b[j].clone()
                }
            })
            .collect();
        // Rows outside R are combinations of R on this support, so one
        // solution decides the whole solution set.
        let Some(xt) = sub.solve(&rhs)? else { continue };
        let mut x = vec![T::zero(); d];
        for (&i, v) in t.iter().zip(xt) {
            x[i] = v;
        }
        if frame.measure_abs(&x)?.as_slice() != b {
            continue;
        }
        if r == t.len() {
            let c = canonicalize_sign(&x);
            if !classes.contains(&c) {
                classes.push(c);
            }
        } else {
            families.push(OracleFamily {
                support: t.clone(),
                rows: rows.clone(),
                rhs,
                dimension: t.len() - r,
                sample: x,
            });
        }
    }
    Ok((classes, families))
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Random `k`-sparse vector: uniform support, nonzero integer entries in
/// `[-bound, bound]`.
pub fn random_sparse_vector<T: Scalar>(
    rng: &mut SeededRng,
    d: usize,
    k: usize,
    bound: i64,
) -> Vec<T> {
    let mut x = vec![T::zero(); d];
    for i in rng.subset(d, k) {
        x[i] = T::from_int(rng.nonzero_int(bound));
    }
    x
}

/// Whether phaseless ℓ1 minimization returns exactly `{±x0}`.
pub fn phaseless_recovers<T: Scalar>(f: &Frame<T>, x0: &[T]) -> Result<bool> {
    let report = solve_l1_phaseless_real(&PhaselessProblem::from_signal(f.clone(), x0)?)?;
    Ok(report.recovers(x0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoverySummary<T> {
    pub trials: usize,
    pub successes: usize,
    /// Up to [`MAX_EXEMPLARS`] signals that were not recovered.
    pub failures: Vec<Vec<T>>,
}

pub const MAX_EXEMPLARS: usize = 5;

impl<T> RecoverySummary<T> {
    pub fn all_succeeded(&self) -> bool {
        self.successes == self.trials
    }
}

pub fn recovery_experiment<T: Scalar>(
    f: &Frame<T>,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<RecoverySummary<T>> {
    if k > f.d() {
        return Err(Error::Precondition(format!(
            "need k <= d, got k={k}, d={}",
            f.d()
        )));
    }
    let mut rng = SeededRng::new(seed);
    let signals: Vec<Vec<T>> = (0..trials)
        .map(|_| random_sparse_vector(&mut rng, f.d(), k, DEFAULT_SIGNAL_BOUND))
        .collect();
    recovery_on_signals(f, &signals)
}

/// One recovery attempt and the full argmin report behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryTrial<T> {
    pub x0: Vec<T>,
    pub report: ArgminReport<T>,
}

impl<T: Scalar> RecoveryTrial<T> {
    pub fn recovered(&self) -> bool {
        self.report.recovers(&self.x0)
    }
}

pub fn recovery_trials<T: Scalar>(
    f: &Frame<T>,
    signals: &[Vec<T>],
) -> Result<Vec<RecoveryTrial<T>>> {
    signals
        .par_iter()
        .map(|x0| {
            let report = solve_l1_phaseless_real(&PhaselessProblem::from_signal(f.clone(), x0)?)?;
            Ok(RecoveryTrial {
                x0: x0.clone(),
                report,
            })
        })
        .collect()
}

pub fn summarize<T: Scalar>(trials: &[RecoveryTrial<T>]) -> RecoverySummary<T> {
    RecoverySummary {
        trials: trials.len(),
        successes: trials.iter().filter(|t| t.recovered()).count(),
        failures: trials
            .iter()
            .filter(|t| !t.recovered())
            .map(|t| t.x0.clone())
            .take(MAX_EXEMPLARS)
            .collect(),
    }
}

/// Runs the recovery test on a given list of signals.
pub fn recovery_on_signals<T: Scalar>(
    f: &Frame<T>,
    signals: &[Vec<T>],
) -> Result<RecoverySummary<T>> {
    Ok(summarize(&recovery_trials(f, signals)?))
}
