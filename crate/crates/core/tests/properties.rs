mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use radlab::formal::{formal_product, random_element, realize, support_test, FormalElement, SupportVerdict};
use radlab::linalg::{dense_norm, power_iteration_norm, NormOptions, SparseMatrix};
use radlab::semigroup::{colour_trace, Word};
use radlab::spectral::operator_norm;
use radlab::{TruncatedBasis, C64};

fn word_text(max_len: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('g'), Just('h')], 1..=max_len)
        .prop_map(|letters| letters.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn colour_map_matches_recursive_definition(s in word_text(40)) {
        let w: Word = s.parse().unwrap();
        let mu = w.colour().unwrap().to_string();
        prop_assert_eq!(&mu, &common::mu(&s));
        prop_assert!(s.ends_with(&mu));
    }

    #[test]
    fn weights_match_oracle(s in word_text(40)) {
        let w: Word = s.parse().unwrap();
        prop_assert_eq!(w.weight().log2(), -(common::depth(&s) as i64));
        prop_assert_eq!(w.path_weight().log2(), common::path_weight_log2(&s));
    }

    #[test]
    fn text_and_index_round_trip(s in word_text(30)) {
        let w: Word = s.parse().unwrap();
        prop_assert_eq!(w.to_string(), s);
        prop_assert_eq!(Word::from_global_index(w.global_index()), w);
    }

    #[test]
    fn traces_match_oracle(s in word_text(16), m in 1usize..16) {
        let m = m.min(s.len());
        let w: Word = s.parse().unwrap();
        let trace: Vec<String> = colour_trace(&w, m).unwrap().colours().iter().map(|c| c.to_string()).collect();
        prop_assert_eq!(trace, common::trace(&s, m));
    }

    #[test]
    fn traced_sequences_have_witnesses(s in word_text(7), m in 1usize..7) {
        let m = m.min(s.len());
        let w: Word = s.parse().unwrap();
        let seq = colour_trace(&w, m).unwrap();
        match support_test(&seq, 7).unwrap() {
            SupportVerdict::Witness(t) => {
                prop_assert!(t <= w);
                prop_assert_eq!(colour_trace(&t, m).unwrap(), seq);
            }
            SupportVerdict::NoWitnessUpTo(_) => prop_assert!(false, "no witness for {}", seq),
        }
    }

    #[test]
    fn realize_is_multiplicative(seed in any::<u64>()) {
        let basis = TruncatedBasis::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(&mut rng, &basis, 2, 3, 2);
        let b = random_element(&mut rng, &basis, 2, 3, 2);
        let product = realize(&formal_product(&a, &b), &basis);
        let composed = realize(&a, &basis).compose(&realize(&b, &basis)).unwrap();
        prop_assert!(product.max_abs_diff(&composed).unwrap() <= 1e-12);
    }

    #[test]
    fn norms_are_submultiplicative(seed in any::<u64>()) {
        let basis = TruncatedBasis::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = realize(&random_element(&mut rng, &basis, 3, 4, 2), &basis);
        let b = realize(&random_element(&mut rng, &basis, 3, 4, 2), &basis);
        let na = operator_norm(&a, 1e-12).unwrap().value;
        let nb = operator_norm(&b, 1e-12).unwrap().value;
        let nab = operator_norm(&a.compose(&b).unwrap(), 1e-12).unwrap().value;
        prop_assert!(nab <= na * nb * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn element_json_round_trips(seed in any::<u64>()) {
        let basis = TruncatedBasis::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_element(&mut rng, &basis, 3, 5, 3);
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let back = FormalElement::from_json_value(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), text);
        prop_assert_eq!(back, f);
    }

    #[test]
    fn power_iteration_matches_dense(
        entries in proptest::collection::vec((0usize..60, 0usize..60, -4i32..4, -4i32..4), 1..120)
    ) {
        let triplets = entries
            .into_iter()
            .map(|(r, c, re, im)| (r, c, C64::new(re as f64 * 0.5, im as f64 * 0.25)));
        let a = SparseMatrix::from_triplets(60, 60, triplets);
        let dense = dense_norm(&a);
        let power = power_iteration_norm(&a, &NormOptions::default()).unwrap().value;
        prop_assert!((dense - power).abs() <= 1e-9 * dense.max(1.0));
    }
}
