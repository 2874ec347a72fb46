//! Exact `min ||x||_1  s.t.  A x = b` with optimal-face probing.

use crate::error::{Error, Result};
use crate::exact::{lp_solve_exact, LpOutcome, LpProblem, Matrix};
use crate::scalar::Scalar;

/// What the coordinate-extremizing probes reveal about the optimal face.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceProbe<T> {
    /// `(min x_i, max x_i)` over the set of minimizers.
    pub ranges: Vec<(T, T)>,
    /// Dimension of the set of minimizers.
    pub dimension: usize,
    /// Vertices returned by the probes, in probe order, deduplicated.
    pub vertices: Vec<Vec<T>>,
}

impl<T: Scalar> FaceProbe<T> {
    pub fn is_unique(&self) -> bool {
        self.dimension == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct L1Solution<T> {
    pub value: T,
    pub point: Vec<T>,
    pub probe: FaceProbe<T>,
}

impl<T: Scalar> L1Solution<T> {
    pub fn is_unique(&self) -> bool {
        self.probe.is_unique()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum L1Outcome<T> {
    Optimal(L1Solution<T>),
    Infeasible,
}

/// Split-variable LP: `y = (x+, x-) >= 0`, `[A, -A] y = b`, maximize `-1.y`.
fn split_lp<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<LpProblem<T>> {
    if b.len() != a.rows() {
        return Err(Error::dims("l1 right-hand side", a.rows(), b.len()));
    }
    let d = a.cols();
    let constraints = Matrix::from_fn(a.rows(), 2 * d, |i, j| {
        if j < d {
            a.get(i, j).clone()
        } else {
            -a.get(i, j - d).clone()
        }
    });
    LpProblem::nonnegative(vec![-T::one(); 2 * d], constraints, b.to_vec())
}

fn fold_split<T: Scalar>(y: &[T], d: usize) -> Vec<T> {
    (0..d).map(|i| y[i].clone() - y[d + i].clone()).collect()
}

/// Optimal value and one minimizer, without probing the face.
pub fn l1_min_value<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Option<(T, Vec<T>)>> {
    let lp = split_lp(a, b)?;
    match lp_solve_exact(&lp)? {
        LpOutcome::Optimal { value, point } => Ok(Some((-value, fold_split(&point, a.cols())))),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded { .. } => unreachable!("objective is bounded above by zero"),
    }
}

/// Minimizes `||x||_1` over `{x : A x = b}` and decides uniqueness exactly by
/// maximizing and minimizing every coordinate over the optimal face.
pub fn l1_min_affine<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<L1Outcome<T>> {
    let Some((value, point)) = l1_min_value(a, b)? else {
        return Ok(L1Outcome::Infeasible);
    };
    let probe = probe_optimal_face(a, b, &value)?;
    Ok(L1Outcome::Optimal(L1Solution {
        value,
        point,
        probe,
    }))
}

/// Probes `{x : A x = b, ||x||_1 = value}`; `value` must be the optimum.
pub fn probe_optimal_face<T: Scalar>(a: &Matrix<T>, b: &[T], value: &T) -> Result<FaceProbe<T>> {
    let d = a.cols();
    let base = split_lp(a, b)?;
    let pinned = base
        .constraints
        .vstack(&Matrix::from_fn(1, 2 * d, |_, _| T::one()))?;
    let mut rhs = b.to_vec();
    rhs.push(value.clone());

    let mut ranges = Vec::with_capacity(d);
    let mut vertices: Vec<Vec<T>> = Vec::new();
    let mut extreme = |sign: T, i: usize| -> Result<T> {
        let mut c = vec![T::zero(); 2 * d];
        c[i] = sign.clone();
        c[d + i] = -sign.clone();
        let lp = LpProblem::nonnegative(c, pinned.clone(), rhs.clone())?;
        match lp_solve_exact(&lp)? {
            LpOutcome::Optimal { value, point } => {
                let x = fold_split(&point, d);
                if !vertices.contains(&x) {
                    vertices.push(x);
                }
                Ok(sign * value)
            }
            other => Err(Error::Precondition(format!(
                "face probe at a non-optimal level ({other:?})"
            ))),
        }
    };
    for i in 0..d {
        let hi = extreme(T::one(), i)?;
        let lo = extreme(-T::one(), i)?;
        ranges.push((lo, hi));
    }

    // x+_i vanishes on the face iff max x_i <= 0, x-_i iff min x_i >= 0; the
    // remaining split columns span the face's affine hull.
    let mut live = Vec::new();
    for (i, (lo, hi)) in ranges.iter().enumerate() {
        if *hi > T::zero() {
            live.push(i);
        }
        if *lo < T::zero() {
            live.push(d + i);
        }
    }
    let dimension = live.len() - pinned.select_cols(&live).rank();
    debug_assert_eq!(dimension == 0, ranges.iter().all(|(lo, hi)| lo == hi));
    Ok(FaceProbe {
        ranges,
        dimension,
        vertices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::l1_norm;
    use crate::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_int(v)
    }

    fn mat(rows: &[&[i64]], cols: usize) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|x| x.iter().map(|&v| r(v)).collect())
                .collect(),
            cols,
        )
        .unwrap()
    }

    #[test]
    fn identity_is_unique() {
        let out = l1_min_affine(&Matrix::identity(2), &[r(3), r(-4)]).unwrap();
        let L1Outcome::Optimal(s) = out else { panic!() };
        assert_eq!(s.value, r(7));
        assert_eq!(s.point, vec![r(3), r(-4)]);
        assert!(s.is_unique());
    }

    #[test]
    fn segment_face_is_not_unique() {
        let out = l1_min_affine(&mat(&[&[1, 1]], 2), &[r(1)]).unwrap();
        let L1Outcome::Optimal(s) = out else { panic!() };
        assert_eq!(s.value, r(1));
        assert!(!s.is_unique());
        assert_eq!(s.probe.dimension, 1);
        assert_eq!(s.probe.ranges, vec![(r(0), r(1)), (r(0), r(1))]);
        assert!(s.probe.vertices.contains(&vec![r(1), r(0)]));
        assert!(s.probe.vertices.contains(&vec![r(0), r(1)]));
        for v in &s.probe.vertices {
            assert_eq!(l1_norm(v), r(1));
        }
    }

    #[test]
    fn infeasible_marker() {
        let out = l1_min_affine(&mat(&[&[1, 1], &[1, 1]], 2), &[r(1), r(2)]).unwrap();
        assert_eq!(out, L1Outcome::Infeasible);
    }

    #[test]
    fn two_dimensional_face() {
        // x1 + x2 + x3 = 1 : the face is the whole simplex
        let out = l1_min_affine(&mat(&[&[1, 1, 1]], 3), &[r(1)]).unwrap();
        let L1Outcome::Optimal(s) = out else { panic!() };
        assert_eq!(s.probe.dimension, 2);
    }

    #[test]
    fn mismatch_is_an_error() {
        assert!(l1_min_affine(&Matrix::<Rational>::identity(2), &[r(1)]).is_err());
    }
}
