//! Cross-module property tests.

use proptest::prelude::*;
use regfall::fourier::TrigPoly;
use regfall::hamiltonian::{action_ah, domination_gap, PhaseLoop};
use regfall::lagrangian::action_b;
use regfall::regularization::classical_time;

fn arb_poly(n_max: usize) -> impl Strategy<Value = TrigPoly> {
    let coef = -1.0f64..1.0f64;
    (
        coef.clone(),
        prop::collection::vec(coef.clone(), 1..=n_max),
        prop::collection::vec(coef, 1..=n_max),
    )
        .prop_map(|(c, cos, sin)| TrigPoly::new(c, cos, sin))
}

proptest! {
    /// Classical time does not see the loop's amplitude.
    #[test]
    fn classical_time_is_scale_invariant(
        x in arb_poly(4),
        r in 0.1f64..10.0,
        tau in 0.0f64..1.0,
    ) {
        prop_assume!(x.norm_sq() > 1e-3);
        let a = classical_time(&x, tau).unwrap();
        let b = classical_time(&x.scaled(r), tau).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    /// The Lagrangian action dominates the Hamiltonian one with the exact
    /// quadratic gap.
    #[test]
    fn domination_identity(x in arb_poly(4), y in arb_poly(4)) {
        prop_assume!(x.norm_sq() > 1e-2);
        let p = PhaseLoop { x: x.clone(), y };
        let b = action_b(&x).unwrap();
        let rhs = action_ah(&p).unwrap() + domination_gap(&p).unwrap();
        prop_assert!((b - rhs).abs() <= 1e-9 * b.abs().max(1.0));
        prop_assert!(domination_gap(&p).unwrap() >= 0.0);
    }

    /// Endpoint normalization of classical time.
    #[test]
    fn classical_time_endpoints(x in arb_poly(4)) {
        prop_assume!(x.norm_sq() > 1e-3);
        prop_assert!(classical_time(&x, 0.0).unwrap().abs() <= 1e-14);
        prop_assert!((classical_time(&x, 1.0).unwrap() - 1.0).abs() <= 1e-12);
    }
}
