//! Real frames, the magnitude measurement map and sign classes.

use crate::error::{Error, Result};
use crate::exact::{Matrix, Subspace};
use crate::rng::SeededRng;
use crate::scalar::{dot, Scalar};

pub const DEFAULT_NUMERATOR_BOUND: i64 = 1000;

/// `m` vectors of `T^d`, stored as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<T> {
    d: usize,
    columns: Vec<Vec<T>>,
}

impl<T: Scalar> Frame<T> {
    pub fn new(d: usize, columns: Vec<Vec<T>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition(
                "frame dimension must be positive".into(),
            ));
        }
        if columns.is_empty() {
            return Err(Error::Precondition(
                "frame needs at least one vector".into(),
            ));
        }
        if let Some(c) = columns.iter().find(|c| c.len() != d) {
            return Err(Error::dims("frame column", d, c.len()));
        }
        Ok(Self { d, columns })
    }

    /// Frame whose columns are the rows of `a`, i.e. `F^T = a`.
    pub fn from_analysis(a: &Matrix<T>) -> Result<Self> {
        Self::new(a.cols(), a.to_rows())
    }

    /// Columns of the `d x d` identity.
    pub fn identity(d: usize) -> Self {
        Self {
            d,
            columns: Matrix::<T>::identity(d).to_rows(),
        }
    }

    pub fn from_integer_columns(d: usize, columns: &[&[i64]]) -> Result<Self> {
        Self::new(
            d,
            columns
                .iter()
                .map(|c| c.iter().map(|&v| T::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<T>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.columns[j]
    }

    /// The `d x m` frame matrix `F`.
    pub fn matrix(&self) -> Matrix<T> {
        Matrix::from_columns(&self.columns, self.d).expect("validated columns")
    }

    /// The `m x d` analysis matrix `F^T`.
    pub fn analysis(&self) -> Matrix<T> {
        Matrix::from_rows(self.columns.clone(), self.d).expect("validated columns")
    }

    /// Signed inner products `F^T x`.
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.d {
            return Err(Error::dims("measurement", self.d, x.len()));
        }
        Ok(self.columns.iter().map(|f| dot(f, x)).collect())
    }

    /// `|F^T x|`, entrywise.
    pub fn measure_abs(&self, x: &[T]) -> Result<MagnitudeVector<T>> {
        Ok(MagnitudeVector(
            self.apply(x)?.into_iter().map(|v| v.abs()).collect(),
        ))
    }

    /// Columns indexed by `s` (0-based), in index order. An empty `s` gives
    /// the empty frame, whose kernel is the whole space.
    pub fn sub_frame(&self, s: &[usize]) -> Result<Self> {
        let mut idx = s.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.m()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.m(),
            });
        }
        Ok(Self {
            d: self.d,
            columns: idx.iter().map(|&j| self.columns[j].clone()).collect(),
        })
    }

    /// `N(F) = ker F^T`; the full space for an empty frame.
    pub fn kernel(&self) -> Subspace<T> {
        self.analysis().null_space()
    }

    pub fn rank(&self) -> usize {
        self.analysis().rank()
    }

    /// Do the columns span `T^d`?
    pub fn spans(&self) -> bool {
        self.rank() == self.d
    }
}

/// Seeded random frame with i.i.d. integer entries in `[-bound, bound]`.
/// Columns that come out as zero are redrawn.
pub fn random_frame<T: Scalar>(d: usize, m: usize, seed: u64, bound: i64) -> Result<Frame<T>> {
    random_frame_scaled(d, m, seed, bound, 1)
}

/// As [`random_frame`], with every entry divided by `denominator`.
pub fn random_frame_scaled<T: Scalar>(
    d: usize,
    m: usize,
    seed: u64,
    bound: i64,
    denominator: i64,
) -> Result<Frame<T>> {
    if d == 0 || m == 0 {
        return Err(Error::Precondition("d and m must be positive".into()));
    }
    if bound < 1 || denominator < 1 {
        return Err(Error::Precondition(
            "numerator bound and denominator must be >= 1".into(),
        ));
    }
    let mut rng = SeededRng::new(seed);
    let den = T::from_int(denominator);
    let mut columns = Vec::with_capacity(m);
    while columns.len() < m {
        let ints: Vec<i64> = (0..d).map(|_| rng.int_in(-bound, bound)).collect();
        if ints.iter().all(|&v| v == 0) {
            continue;
        }
        columns.push(
            ints.into_iter()
                .map(|v| T::from_int(v) / den.clone())
                .collect(),
        );
    }
    Frame::new(d, columns)
}

/// `b = |F^T x|`: entries are nonnegative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MagnitudeVector<T>(Vec<T>);

impl<T: Scalar> MagnitudeVector<T> {
    pub fn new(b: Vec<T>) -> Result<Self> {
        if b.iter().any(|v| *v < T::zero()) {
            return Err(Error::Precondition("magnitudes must be nonnegative".into()));
        }
        Ok(Self(b))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}

/// Sorted, distinct coordinate indices below `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    pub fn new(mut indices: Vec<usize>, d: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&bad) = indices.iter().find(|&&i| i >= d) {
            return Err(Error::IndexOutOfRange { index: bad, len: d });
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn complement(&self, d: usize) -> Self {
        Self((0..d).filter(|i| !self.contains(*i)).collect())
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Representative of `{x, -x}` whose first nonzero entry is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignClassVector<T>(Vec<T>);

impl<T: Scalar> SignClassVector<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}

pub fn canonicalize_sign<T: Scalar>(x: &[T]) -> SignClassVector<T> {
    match x.iter().find(|v| !v.is_zero()) {
        Some(first) if *first < T::zero() => {
            SignClassVector(x.iter().map(|v| -v.clone()).collect())
        }
        _ => SignClassVector(x.to_vec()),
    }
}

/// Do `x` and `y` lie in the same sign class?
pub fn same_sign_class<T: Scalar>(x: &[T], y: &[T]) -> bool {
    canonicalize_sign(x) == canonicalize_sign(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&e| Rational::from_int(e)).collect()
    }

    fn e1e2sum() -> Frame<Rational> {
        Frame::from_integer_columns(2, &[&[1, 0], &[0, 1], &[1, 1]]).unwrap()
    }

    #[test]
    fn measure_examples() {
        let id = Frame::<Rational>::identity(3);
        assert_eq!(
            id.measure_abs(&v(&[2, -5, 0])).unwrap().as_slice(),
            v(&[2, 5, 0])
        );
        assert_eq!(
            id.measure_abs(&v(&[0, 0, 0])).unwrap().as_slice(),
            v(&[0, 0, 0])
        );
        assert_eq!(
            e1e2sum().measure_abs(&v(&[1, -1])).unwrap().as_slice(),
            v(&[1, 1, 0])
        );
        assert!(id.measure_abs(&v(&[1, 2])).is_err());
    }

    #[test]
    fn random_frame_determinism_and_bounds() {
        let a: Frame<Rational> = random_frame(2, 3, 1, 10).unwrap();
        let b: Frame<Rational> = random_frame(2, 3, 1, 10).unwrap();
        assert_eq!(a, b);
        let f: Frame<Rational> = random_frame(3, 5, 7, 100).unwrap();
        assert_eq!(f.m(), 5);
        for c in f.columns() {
            assert_eq!(c.len(), 3);
            assert!(c.iter().all(|x| x.numer().magnitude() <= &100u32.into()));
            assert!(c.iter().any(|x| !num_traits::Zero::is_zero(x)));
        }
        assert!(random_frame::<Rational>(0, 3, 1, 10).is_err());
        assert!(random_frame::<Rational>(2, 3, 1, 0).is_err());
    }

    #[test]
    fn random_frames_are_full_rank() {
        for seed in 0..20 {
            let f: Frame<Rational> = random_frame(6, 4, seed, 1000).unwrap();
            assert_eq!(f.rank(), 4, "seed {seed}");
        }
    }

    #[test]
    fn scaled_entries() {
        let f: Frame<Rational> = random_frame_scaled(2, 2, 5, 3, 4).unwrap();
        let g: Frame<Rational> = random_frame(2, 2, 5, 3).unwrap();
        for (cf, cg) in f.columns().iter().zip(g.columns()) {
            for (x, y) in cf.iter().zip(cg) {
                assert_eq!(x.clone() * Rational::from_int(4), y.clone());
            }
        }
    }

    #[test]
    fn sub_frame_examples() {
        let f = e1e2sum();
        assert_eq!(f.sub_frame(&[0, 1, 2]).unwrap(), f);
        let empty = f.sub_frame(&[]).unwrap();
        assert_eq!(empty.m(), 0);
        assert_eq!(empty.kernel().dim(), 2);
        let s = f.sub_frame(&[1, 2]).unwrap();
        assert_eq!(s.columns(), &[v(&[0, 1]), v(&[1, 1])]);
        assert!(f.sub_frame(&[3]).is_err());
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize_sign(&v(&[-1, 2])).into_vec(), v(&[1, -2]));
        assert_eq!(canonicalize_sign(&v(&[0, 3])).into_vec(), v(&[0, 3]));
        assert_eq!(canonicalize_sign(&v(&[0, 0])).into_vec(), v(&[0, 0]));
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(subsets_of_size(4, 2).len(), 6);
        assert_eq!(subsets_of_size(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(subsets_of_size(3, 3), vec![vec![0, 1, 2]]);
        assert!(subsets_of_size(2, 3).is_empty());
    }

    fn small_vec(len: usize) -> impl Strategy<Value = Vec<Rational>> {
        proptest::collection::vec((-5i64..=5, 1i64..=3), len).prop_map(|v| {
            v.into_iter()
                .map(|(p, q)| Rational::new(p.into(), q.into()))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn measurement_sign_and_scale(x in small_vec(3), c in (-4i64..=4, 1i64..=3)) {
            let f: Frame<Rational> = random_frame(3, 4, 11, 9).unwrap();
            let neg: Vec<Rational> = x.iter().map(|e| -e.clone()).collect();
            prop_assert_eq!(f.measure_abs(&x).unwrap(), f.measure_abs(&neg).unwrap());
            let c = Rational::new(c.0.into(), c.1.into());
            let cx: Vec<Rational> = x.iter().map(|e| c.clone() * e.clone()).collect();
            let scaled: Vec<Rational> =
                f.measure_abs(&x).unwrap().as_slice().iter().map(|b| num_traits::Signed::abs(&c) * b.clone()).collect();
            prop_assert_eq!(f.measure_abs(&cx).unwrap().into_vec(), scaled);
        }

        #[test]
        fn canonicalization_identifies_exactly_sign_pairs(x in small_vec(3), y in small_vec(3)) {
            let cx = canonicalize_sign(&x);
            prop_assert_eq!(canonicalize_sign(cx.as_slice()), cx.clone());
            let neg: Vec<Rational> = x.iter().map(|e| -e.clone()).collect();
            prop_assert_eq!(canonicalize_sign(&neg), cx.clone());
            let same = x == y || neg == y;
            prop_assert_eq!(cx == canonicalize_sign(&y), same);
        }
    }
}
