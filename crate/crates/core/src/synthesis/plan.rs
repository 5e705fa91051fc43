//! Rotation plans: products of Givens rotations and basis permutations.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::numerics::rational::{serde_rational, Rational};
use crate::numerics::surd::Surd;
use crate::stochastic::matrix::{DenseMatrix, Entry, Scalar};

/// One factor of a plan. Indices are 1-based.
///
/// `Givens` acts on rows `i, j` as `(a b; −b a)` with `a, b >= 0` stored
/// through their squares. Conjugating a diagonal `d` sends
/// `d_i ↦ a² d_i + b² d_j` and `d_j ↦ b² d_i + a² d_j`.
///
/// `Perm` sends `e_j` to `e_{map[j]}`, so the diagonal entry at `j` moves to `map[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RotationStep {
    Givens {
        i: usize,
        j: usize,
        #[serde(with = "serde_rational")]
        a2: Rational,
        #[serde(with = "serde_rational")]
        b2: Rational,
    },
    Perm {
        map: Vec<usize>,
    },
}

impl RotationStep {
    pub fn givens(i: usize, j: usize, a2: Rational) -> Self {
        let b2 = <Rational as One>::one() - &a2;
        RotationStep::Givens { i, j, a2, b2 }
    }

    /// Checks the step against a dimension; `None` when well formed.
    pub fn defect(&self, n: usize) -> Option<String> {
        match self {
            RotationStep::Givens { i, j, a2, b2 } => {
                if *i == 0 || *j == 0 || *i > n || *j > n || i == j {
                    Some(format!("bad rotation indices ({i}, {j})"))
                } else if a2.is_negative() || b2.is_negative() || !(a2 + b2).is_one() {
                    Some("rotation squares must be nonnegative and sum to one".into())
                } else {
                    None
                }
            }
            RotationStep::Perm { map } => {
                let mut seen = vec![false; n + 1];
                if map.len() != n {
                    return Some(format!("permutation of length {} in dimension {n}", map.len()));
                }
                for &m in map {
                    if m == 0 || m > n || std::mem::replace(&mut seen[m], true) {
                        return Some("map is not a bijection".into());
                    }
                }
                None
            }
        }
    }

    /// Effect of the step on a diagonal, without materializing.
    pub fn apply_to_diagonal(&self, d: &mut [Rational]) {
        match self {
            RotationStep::Givens { i, j, a2, b2 } => {
                let (x, y) = (d[i - 1].clone(), d[j - 1].clone());
                d[i - 1] = a2 * &x + b2 * &y;
                d[j - 1] = b2 * &x + a2 * &y;
            }
            RotationStep::Perm { map } => {
                let old = d.to_vec();
                for (j, &m) in map.iter().enumerate() {
                    d[m - 1] = old[j].clone();
                }
            }
        }
    }
}

/// `M = S_k ⋯ S_1` for steps `S_1, …, S_k` in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitaryPlan {
    pub dimension: usize,
    pub steps: Vec<RotationStep>,
}

trait RotationScalar: Entry {
    fn root(r: &Rational) -> Self;
    fn negate(&self) -> Self;
}

impl RotationScalar for Surd {
    fn root(r: &Rational) -> Self {
        Surd::sqrt(r).expect("nonnegative square")
    }
    fn negate(&self) -> Self {
        -self
    }
}

impl RotationScalar for f64 {
    fn root(r: &Rational) -> Self {
        <f64 as Scalar>::from_rational(r).sqrt()
    }
    fn negate(&self) -> Self {
        -self
    }
}

impl UnitaryPlan {
    pub fn new(dimension: usize) -> Self {
        UnitaryPlan { dimension, steps: Vec::new() }
    }

    pub fn push(&mut self, step: RotationStep) {
        if let RotationStep::Perm { map } = &step {
            if map.iter().enumerate().all(|(j, &m)| m == j + 1) {
                return;
            }
        }
        self.steps.push(step);
    }

    pub fn extend(&mut self, steps: impl IntoIterator<Item = RotationStep>) {
        for s in steps {
            self.push(s);
        }
    }

    pub fn givens_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, RotationStep::Givens { .. })).count()
    }

    pub fn defect(&self) -> Option<String> {
        self.steps.iter().find_map(|s| s.defect(self.dimension))
    }

    /// Final diagonal starting from `d`, by the conjugation formulas.
    pub fn apply_to_diagonal(&self, d: &[Rational]) -> Vec<Rational> {
        let mut d = d.to_vec();
        for s in &self.steps {
            s.apply_to_diagonal(&mut d);
        }
        d
    }

    fn materialize_in<T: RotationScalar>(&self) -> DenseMatrix<T> {
        let n = self.dimension;
        let mut rows: Vec<Vec<T>> = DenseMatrix::<T>::identity(n).to_rows();
        for step in &self.steps {
            match step {
                RotationStep::Givens { i, j, a2, b2 } => {
                    let (a, b) = (T::root(a2), T::root(b2));
                    let (ri, rj) = (&rows[i - 1], &rows[j - 1]);
                    let comb = |x: &T, y: &T, u: &T, v: &T| x.mul(u).add(&y.mul(v));
                    let nb = b.negate();
                    let new_i: Vec<T> = ri.iter().zip(rj).map(|(x, y)| comb(&a, &b, x, y)).collect();
                    let new_j: Vec<T> = ri.iter().zip(rj).map(|(x, y)| comb(&nb, &a, x, y)).collect();
                    rows[i - 1] = new_i;
                    rows[j - 1] = new_j;
                }
                RotationStep::Perm { map } => {
                    let old = rows.clone();
                    for (j, &m) in map.iter().enumerate() {
                        rows[m - 1] = old[j].clone();
                    }
                }
            }
        }
        DenseMatrix::from_rows(rows).expect("square")
    }

    /// Exact materialization with square-root entries.
    pub fn materialize(&self) -> DenseMatrix<Surd> {
        self.materialize_in()
    }

    /// Floating materialization for export.
    pub fn materialize_f64(&self) -> DenseMatrix<f64> {
        self.materialize_in()
    }
}

/// Mapping `sorted position -> original index` for a decreasing stable sort.
pub fn decreasing_order(v: &[Rational]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].cmp(&v[a]));
    idx
}

/// Permutation step moving entry `order[s]` of the original vector to position `s`.
pub fn sort_step(order: &[usize]) -> RotationStep {
    let mut map = vec![0; order.len()];
    for (s, &orig) in order.iter().enumerate() {
        map[orig] = s + 1;
    }
    RotationStep::Perm { map }
}

/// Inverse of [`sort_step`]: position `s` goes back to `order[s]`.
pub fn unsort_step(order: &[usize]) -> RotationStep {
    RotationStep::Perm {
        map: order.iter().map(|&o| o + 1).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, rat};
    use crate::stochastic::matrix::surd_schur_square;

    #[test]
    fn single_givens_matches_formula() {
        let mut plan = UnitaryPlan::new(3);
        plan.push(RotationStep::givens(1, 3, rat(2, 3)));
        let m = plan.materialize();
        assert!(m.gram_rows().is_identity());
        let q = surd_schur_square(&m).unwrap();
        assert_eq!(
            q.to_rows(),
            vec![
                vec![rat(2, 3), int(0), rat(1, 3)],
                vec![int(0), int(1), int(0)],
                vec![rat(1, 3), int(0), rat(2, 3)],
            ]
        );
        assert_eq!(plan.apply_to_diagonal(&[int(3), int(1), int(0)]), vec![int(2), int(1), int(1)]);
    }

    #[test]
    fn permutations_move_diagonal_entries() {
        let v = vec![int(1), int(5), int(3)];
        let order = decreasing_order(&v);
        assert_eq!(order, vec![1, 2, 0]);
        let mut plan = UnitaryPlan::new(3);
        plan.push(sort_step(&order));
        assert_eq!(plan.apply_to_diagonal(&v), vec![int(5), int(3), int(1)]);
        let m = plan.materialize().try_map(Surd::to_rational).unwrap();
        let diag = m.matmul(&DenseMatrix::diagonal(&v)).matmul(&m.transpose()).diag();
        assert_eq!(diag, vec![int(5), int(3), int(1)]);
        plan.push(unsort_step(&order));
        assert_eq!(plan.apply_to_diagonal(&v), v);
        assert!(plan.materialize().try_map(Surd::to_rational).unwrap().is_identity());
    }

    #[test]
    fn identity_permutations_are_dropped_and_defects_found() {
        let mut plan = UnitaryPlan::new(2);
        plan.push(RotationStep::Perm { map: vec![1, 2] });
        assert!(plan.steps.is_empty());
        plan.steps.push(RotationStep::Perm { map: vec![1, 1] });
        assert!(plan.defect().is_some());
        let bad = RotationStep::Givens { i: 1, j: 2, a2: rat(1, 2), b2: rat(1, 3) };
        assert!(bad.defect(2).is_some());
    }

    #[test]
    fn json_shape() {
        let s = RotationStep::givens(1, 2, rat(1, 3));
        let j = serde_json::to_value(&s).unwrap();
        assert_eq!(j, serde_json::json!({"kind": "givens", "i": 1, "j": 2, "a2": "1/3", "b2": "2/3"}));
        let p = serde_json::to_value(RotationStep::Perm { map: vec![2, 1] }).unwrap();
        assert_eq!(p, serde_json::json!({"kind": "perm", "map": [2, 1]}));
    }
}
