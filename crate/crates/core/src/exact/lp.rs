//! Dense two-phase primal simplex over an exact ordered field.
//!
//! Problems are stated as `maximize c.x  s.t.  A x = b` with each variable
//! either nonnegative or free. Pivoting follows Bland's smallest-index rule
//! for both the entering and the leaving variable, so the method terminates
//! on degenerate problems without any perturbation.

use crate::error::{Error, Result};
use crate::exact::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem<T> {
    /// Maximized.
    pub objective: Vec<T>,
    pub constraints: Matrix<T>,
    pub rhs: Vec<T>,
    pub bounds: Vec<VarBound>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal {
        value: T,
        point: Vec<T>,
    },
    /// `point + t * ray` is feasible for all `t >= 0` and the objective grows
    /// strictly along `ray`.
    Unbounded {
        point: Vec<T>,
        ray: Vec<T>,
    },
    Infeasible,
}

impl<T: Scalar> LpOutcome<T> {
    pub fn optimal_value(&self) -> Option<&T> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl<T: Scalar> LpProblem<T> {
    pub fn new(
        objective: Vec<T>,
        constraints: Matrix<T>,
        rhs: Vec<T>,
        bounds: Vec<VarBound>,
    ) -> Result<Self> {
        let p = Self {
            objective,
            constraints,
            rhs,
            bounds,
        };
        p.validate()?;
        Ok(p)
    }

    /// All variables nonnegative.
    pub fn nonnegative(objective: Vec<T>, constraints: Matrix<T>, rhs: Vec<T>) -> Result<Self> {
        let n = objective.len();
        Self::new(objective, constraints, rhs, vec![VarBound::NonNegative; n])
    }

    fn validate(&self) -> Result<()> {
        let n = self.constraints.cols();
        if self.objective.len() != n {
            return Err(Error::dims("lp objective", n, self.objective.len()));
        }
        if self.bounds.len() != n {
            return Err(Error::dims("lp bounds", n, self.bounds.len()));
        }
        if self.rhs.len() != self.constraints.rows() {
            return Err(Error::dims(
                "lp rhs",
                self.constraints.rows(),
                self.rhs.len(),
            ));
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Exact feasibility check of a point against every constraint and bound.
    pub fn is_feasible(&self, x: &[T]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = x
            .iter()
            .zip(&self.bounds)
            .all(|(v, b)| *b == VarBound::Free || *v >= T::zero());
        bounds_ok && self.constraints.mul_vec(x).is_ok_and(|ax| ax == self.rhs)
    }
}

pub fn lp_solve_exact<T: Scalar>(p: &LpProblem<T>) -> Result<LpOutcome<T>> {
    p.validate()?;
    // Standard-form column map: original var j -> (plus column, optional minus column).
    let mut cols: Vec<(usize, Option<usize>)> = Vec::with_capacity(p.num_vars());
    let mut n_std = 0;
    for b in &p.bounds {
        match b {
            VarBound::NonNegative => {
                cols.push((n_std, None));
                n_std += 1;
            }
            VarBound::Free => {
                cols.push((n_std, Some(n_std + 1)));
                n_std += 2;
            }
        }
    }
    let m = p.constraints.rows();
    let mut c_std = vec![T::zero(); n_std];
    let mut a = vec![vec![T::zero(); n_std + m]; m];
    let mut rhs = p.rhs.clone();
    for (j, &(plus, minus)) in cols.iter().enumerate() {
        c_std[plus] = p.objective[j].clone();
        if let Some(mi) = minus {
            c_std[mi] = -p.objective[j].clone();
        }
        for (i, row) in a.iter_mut().enumerate() {
            let v = p.constraints.get(i, j);
            if v.is_zero() {
                continue;
            }
            row[plus] = v.clone();
            if let Some(mi) = minus {
                row[mi] = -v.clone();
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        if rhs[i] < T::zero() {
            rhs[i] = -rhs[i].clone();
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[n_std + i] = T::one();
    }

    let mut t = Tableau {
        a,
        rhs,
        basis: (n_std..n_std + m).collect(),
        rc: Vec::new(),
        value: T::zero(),
        allowed: n_std + m,
    };

    // Phase 1: maximize -sum(artificials).
    let mut phase1 = vec![T::zero(); n_std + m];
    for c in phase1.iter_mut().skip(n_std) {
        *c = -T::one();
    }
    t.set_objective(&phase1);
    let status = t.run();
    debug_assert!(status.is_none(), "phase 1 is bounded");
    if t.value < T::zero() {
        return Ok(LpOutcome::Infeasible);
    }
    t.expel_artificials(n_std);
    t.allowed = n_std;

    let mut c_full = c_std;
    c_full.extend(std::iter::repeat_n(T::zero(), m));
    t.set_objective(&c_full);
    let unbounded_col = t.run();

    let std_point = t.point(n_std);
    let point = map_back(&cols, &std_point);
    match unbounded_col {
        None => {
            let value = p
                .objective
                .iter()
                .zip(&point)
                .fold(T::zero(), |acc, (c, x)| acc + c.clone() * x.clone());
            debug_assert!(value == t.value);
            Ok(LpOutcome::Optimal { value, point })
        }
        Some(enter) => {
            let mut dir = vec![T::zero(); n_std];
            dir[enter] = T::one();
            for (i, &b) in t.basis.iter().enumerate() {
                if b < n_std {
                    dir[b] = -t.a[i][enter].clone();
                }
            }
            Ok(LpOutcome::Unbounded {
                point,
                ray: map_back(&cols, &dir),
            })
        }
    }
}

fn map_back<T: Scalar>(cols: &[(usize, Option<usize>)], std: &[T]) -> Vec<T> {
    cols.iter()
        .map(|&(plus, minus)| match minus {
            Some(mi) => std[plus].clone() - std[mi].clone(),
            None => std[plus].clone(),
        })
        .collect()
}

struct Tableau<T> {
    a: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    /// Reduced costs `c_j - c_B B^-1 A_j`.
    rc: Vec<T>,
    /// Current objective value `c_B x_B`.
    value: T,
    /// Columns `>= allowed` may never enter.
    allowed: usize,
}

impl<T: Scalar> Tableau<T> {
    fn set_objective(&mut self, c: &[T]) {
        let mut rc = c.to_vec();
        let mut value = T::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for (r, v) in rc.iter_mut().zip(&self.a[i]) {
                if !v.is_zero() {
                    *r = r.clone() - cb.clone() * v.clone();
                }
            }
            value = value + cb.clone() * self.rhs[i].clone();
        }
        self.rc = rc;
        self.value = value;
    }

    /// Runs Bland-rule iterations to optimality. Returns the entering column
    /// that exposed unboundedness, if any.
    fn run(&mut self) -> Option<usize> {
        loop {
            let enter = (0..self.allowed).find(|&j| self.rc[j] > T::zero())?;
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.a.len() {
                let coef = &self.a[i][enter];
                if *coef <= T::zero() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / coef.clone();
                let better = match &leave {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Some(enter),
                Some((row, _)) => self.pivot(row, enter),
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = T::one() / self.a[row][col].clone();
        for v in self.a[row].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        self.rhs[row] = self.rhs[row].clone() * inv;
        let pivot_row = self.a[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.a.len() {
            if i == row {
                continue;
            }
            let f = self.a[i][col].clone();
            if f.is_zero() {
                continue;
            }
            for (v, p) in self.a[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
            self.rhs[i] = self.rhs[i].clone() - f * pivot_rhs.clone();
        }
        let f = self.rc[col].clone();
        if !f.is_zero() {
            for (v, p) in self.rc.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
            self.value = self.value.clone() + f * pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// After a feasible phase 1 every artificial still basic sits at zero:
    /// pivot it out on any structural column, or drop its row as redundant.
    fn expel_artificials(&mut self, n_std: usize) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] < n_std {
                i += 1;
                continue;
            }
            match (0..n_std).find(|&j| !self.a[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.a.remove(i);
                    self.rhs.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }

    fn point(&self, n_std: usize) -> Vec<T> {
        let mut x = vec![T::zero(); n_std];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n_std {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }
}
