//! Finite Horn construction by T-transforms.

use num_traits::Zero;

use super::plan::{decreasing_order, sort_step, unsort_step, RotationStep, UnitaryPlan};
use super::SynthesisError;
use crate::numerics::rational::Rational;

/// Givens steps taking the sorted diagonal `y` to the sorted target `x`.
///
/// Each step picks `j`, the last index with `x_j < y_j`, and `k`, the first
/// index after `j` with `x_k > y_k`, then moves `δ = min(y_j − x_j, x_k − y_k)`
/// from `j` to `k`. A settled index is never touched again, so there are at
/// most `n − 1` steps and the rotation graph is a forest.
/// `offset` shifts the emitted indices.
pub fn horn_sorted(x: &[Rational], y: &[Rational], offset: usize) -> Result<Vec<RotationStep>, SynthesisError> {
    check_majorized(x, y)?;
    let mut y = y.to_vec();
    let n = x.len();
    let mut steps = Vec::new();
    while let Some(j) = (0..n).rev().find(|&j| x[j] < y[j]) {
        let k = (j + 1..n)
            .find(|&k| x[k] > y[k])
            .ok_or_else(|| SynthesisError::Internal("transfer target missing".into()))?;
        let up = &y[j] - &x[j];
        let down = &x[k] - &y[k];
        let delta = if up < down { up } else { down };
        let b2 = &delta / (&y[j] - &y[k]);
        y[j] -= &delta;
        y[k] += &delta;
        steps.push(RotationStep::givens(j + 1 + offset, k + 1 + offset, Rational::from_integer(1.into()) - b2));
    }
    Ok(steps)
}

/// Checks `x ≺ y` for sorted vectors of equal length.
pub fn check_majorized(x: &[Rational], y: &[Rational]) -> Result<(), SynthesisError> {
    if x.len() != y.len() {
        return Err(SynthesisError::LengthMismatch { xi: x.len(), eta: y.len() });
    }
    let (mut sx, mut sy) = (Rational::zero(), Rational::zero());
    for (n, (a, b)) in x.iter().zip(y).enumerate() {
        sx += a;
        sy += b;
        if sx > sy {
            return Err(SynthesisError::NotMajorized { n: n + 1 });
        }
    }
    if sx != sy {
        return Err(SynthesisError::NotMajorized { n: x.len() });
    }
    Ok(())
}

/// Plan `M` with `diag(M diag(η) Mᵀ) = ξ` for `ξ ≺ η` in any order.
pub fn horn_finite(xi: &[Rational], eta: &[Rational]) -> Result<UnitaryPlan, SynthesisError> {
    let n = xi.len();
    let (ox, oy) = (decreasing_order(xi), decreasing_order(eta));
    let x: Vec<Rational> = ox.iter().map(|&i| xi[i].clone()).collect();
    let y: Vec<Rational> = oy.iter().map(|&i| eta[i].clone()).collect();
    let mut plan = UnitaryPlan::new(n);
    if y.len() != n {
        return Err(SynthesisError::LengthMismatch { xi: n, eta: eta.len() });
    }
    plan.push(sort_step(&oy));
    plan.extend(horn_sorted(&x, &y, 0)?);
    plan.push(unsort_step(&ox));
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, rat};
    use crate::stochastic::matrix::surd_schur_square;
    use crate::stochastic::surd_expectation_diag;
    use proptest::prelude::*;

    #[test]
    fn three_dimensional_example() {
        let plan = horn_finite(&[int(2), int(1), int(1)], &[int(3), int(1), int(0)]).unwrap();
        assert_eq!(plan.steps, vec![RotationStep::givens(1, 3, rat(2, 3))]);
    }

    #[test]
    fn rejects_non_majorized() {
        let e = horn_finite(&[int(3), int(0)], &[int(2), int(1)]).unwrap_err();
        assert!(matches!(e, SynthesisError::NotMajorized { n: 1 }));
    }

    #[test]
    fn equal_inputs_need_no_rotation() {
        let v = vec![int(1), int(4), int(2)];
        let plan = horn_finite(&v, &v).unwrap();
        assert_eq!(plan.givens_count(), 0);
        assert_eq!(plan.apply_to_diagonal(&v), v);
    }

    fn pair() -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
        (2usize..8)
            .prop_flat_map(|n| {
                (
                    prop::collection::vec(0i64..12, n),
                    prop::collection::vec((0usize..n, 0usize..n, 0i64..=4), 0..8),
                )
            })
            .prop_map(|(eta, moves)| {
                let eta: Vec<Rational> = eta.into_iter().map(int).collect();
                let mut xi = eta.clone();
                for (i, j, t) in moves {
                    if i != j {
                        let (a, b) = (xi[i].clone(), xi[j].clone());
                        let t = rat(t, 4);
                        xi[i] = &t * &a + (int(1) - &t) * &b;
                        xi[j] = (int(1) - &t) * &a + &t * &b;
                    }
                }
                (xi, eta)
            })
    }

    proptest! {
        #[test]
        fn plans_reproduce_target_exactly((xi, eta) in pair()) {
            let plan = horn_finite(&xi, &eta).unwrap();
            prop_assert!(plan.givens_count() < xi.len());
            prop_assert_eq!(plan.apply_to_diagonal(&eta), xi.clone());
            let m = plan.materialize();
            prop_assert!(m.gram_rows().is_identity());
            prop_assert_eq!(surd_expectation_diag(&m, &eta).unwrap(), xi.clone());
            let q = surd_schur_square(&m).unwrap();
            prop_assert_eq!(q.mul_vec(&eta), xi);
        }
    }
}
