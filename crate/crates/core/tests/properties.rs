//! Randomized property tests over fixture and corpus systems.

use proptest::prelude::*;

use gbds_core::corpus::{random_element, random_system, random_triple, rng_from_seed};
use gbds_core::fixtures;
use gbds_core::genalg::AlgElement;
use gbds_core::groupoid::{kappa, oracle_equal, oracle_product_check};
use gbds_core::Gbds;

fn fixture(ix: usize) -> Gbds {
    fixtures::all().swap_remove(ix % 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Products associate; when the two association orders produce
    /// syntactically different elements, the groupoid oracle decides.
    #[test]
    fn triple_mul_associates(ix in 0usize..4, seed in any::<u64>()) {
        let sys = fixture(ix);
        let mut rng = rng_from_seed(seed);
        let (Some(x), Some(y), Some(z)) = (
            random_triple(&sys, &mut rng, 2),
            random_triple(&sys, &mut rng, 2),
            random_triple(&sys, &mut rng, 2),
        ) else {
            return Ok(());
        };
        let (x, y, z) = (
            AlgElement::from_triple(x),
            AlgElement::from_triple(y),
            AlgElement::from_triple(z),
        );
        let lhs = x.mul(&sys, &y).mul(&sys, &z);
        let rhs = x.mul(&sys, &y.mul(&sys, &z));
        if lhs != rhs {
            prop_assert!(oracle_equal(&sys, &lhs, &rhs));
        }
    }

    /// The involution is anti-multiplicative on elements.
    #[test]
    fn adjoint_antimultiplicative(ix in 0usize..4, seed in any::<u64>()) {
        let sys = fixture(ix);
        let mut rng = rng_from_seed(seed);
        let x = random_element(&sys, &mut rng, 3, 2);
        let y = random_element(&sys, &mut rng, 3, 2);
        let lhs = x.mul(&sys, &y).adjoint();
        let rhs = y.adjoint().mul(&sys, &x.adjoint());
        if lhs != rhs {
            prop_assert!(oracle_equal(&sys, &lhs, &rhs));
        }
    }

    /// The central agreement: rewriting products match groupoid
    /// convolution on random multi-term elements.
    #[test]
    fn oracle_agreement_on_elements(ix in 0usize..4, seed in any::<u64>()) {
        let sys = fixture(ix);
        let mut rng = rng_from_seed(seed);
        let x = random_element(&sys, &mut rng, 4, 2);
        let y = random_element(&sys, &mut rng, 4, 2);
        prop_assert!(oracle_product_check(&sys, &x, &y));
    }

    /// The same agreement on freshly sampled corpus systems.
    #[test]
    fn oracle_agreement_on_corpus(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let sys = random_system(&mut rng);
        for _ in 0..4 {
            let x = random_element(&sys, &mut rng, 3, 2);
            let y = random_element(&sys, &mut rng, 3, 2);
            prop_assert!(oracle_product_check(&sys, &x, &y));
        }
    }

    /// The groupoid image of a product of an element with its adjoint
    /// is self-adjoint.
    #[test]
    fn self_adjoint_squares(ix in 0usize..4, seed in any::<u64>()) {
        let sys = fixture(ix);
        let mut rng = rng_from_seed(seed);
        let x = random_element(&sys, &mut rng, 3, 2);
        let square = x.mul(&sys, &x.adjoint());
        let k = kappa(&sys, &square);
        prop_assert!(k.adjoint(&sys).fn_equal(&sys, &k));
    }
}
