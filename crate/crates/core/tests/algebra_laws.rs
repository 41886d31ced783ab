mod common;

use common::laws::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn profile_instance_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_automaton(&mut r);
        if let Err(e) = check_profile_laws(&g, &mut r) {
            prop_assert!(false, "{e}\n{g}");
        }
    }

    #[test]
    fn guideline_is_faithfully_abstracted(seed in any::<u64>()) {
        let g = random_automaton(&mut rng(seed));
        if let Err(e) = check_faithful(&g, 6, 4) {
            prop_assert!(false, "{e}\n{g}");
        }
    }

    #[test]
    fn oracle_instance_laws(seed in any::<u64>(), k in 1usize..=2) {
        if let Err(e) = check_oracle_laws(k, &mut rng(seed)) {
            prop_assert!(false, "{e}");
        }
    }

    #[test]
    fn effect_expression_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_automaton(&mut r);
        if let Err(e) = check_effexpr_order(&g, &mut r) {
            prop_assert!(false, "{e}");
        }
    }

    #[test]
    fn profiles_compose_like_paths(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_automaton(&mut r);
        if let Err(e) = check_profiles(&g, &mut r) {
            prop_assert!(false, "{e}\n{g}");
        }
    }
}

#[test]
fn toy_instance_laws() {
    check_toy_laws().unwrap();
}
