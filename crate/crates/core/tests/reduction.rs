mod common;

use chanmem::exact::{ratio, ExactMatrix, Rational};
use chanmem::freerot::FreePair;
use chanmem::pcp::{verify_solution, PcpInstance, SearchStatus, TileWord};
use chanmem::reduction::{
    apply, certify_choi, choi, compile, compose, extract_tile_word, generic_scalar_search, make_target,
    membership_search, theory_diff, word_damping, DiffStatus, GenLabel, SearchMode, Theory,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn inst(pairs: &[(&str, &str)]) -> PcpInstance {
    PcpInstance::from_pairs(pairs).unwrap()
}

fn labels(word: &[GenLabel]) -> Vec<String> {
    word.iter().map(GenLabel::to_string).collect()
}

#[test]
fn composition_law_on_random_states() {
    let set = compile(&inst(&[("1", "101"), ("10", "00"), ("011", "11")]), &FreePair::standard(), &ratio(1, 2))
        .unwrap()
        .with_dampings(&[ratio(1, 3), ratio(2, 3), ratio(3, 4)], &[ratio(1, 5), ratio(5, 7), ratio(1, 2)])
        .unwrap();
    let gens = set.generators();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let x = &gens[rng.gen_range(0..gens.len())];
        let y = &gens[rng.gen_range(0..gens.len())];
        let rho = common::random_density(&mut rng, 4);
        let xy = compose(x, y);
        assert_eq!(apply(&xy, &rho).unwrap(), apply(x, &apply(y, &rho).unwrap()).unwrap());
        assert_eq!(xy.damping, &x.damping * &y.damping);
    }
}

#[test]
fn every_generator_certifies() {
    let set = compile(&inst(&[("0", "100"), ("11", "1")]), &FreePair::standard(), &ratio(2, 3)).unwrap();
    for g in set.generators() {
        assert_eq!(certify_choi(&choi(&g), 4), Ok(()), "{}", labels(&g.word).join(""));
    }
    assert_eq!(certify_choi(&choi(&make_target(ratio(1, 9)).unwrap()), 4), Ok(()));
}

#[test]
fn scalar_witness_acts_as_target_on_random_states() {
    let set = compile(&inst(&[("0", "0")]), &FreePair::standard(), &ratio(1, 2)).unwrap();
    let out = membership_search(&set, 4, SearchMode::Generic, None);
    let word = out.witness.unwrap();
    assert_eq!(labels(&word), ["G1", "H1"]);
    let damping = word_damping(&set, &word).unwrap();
    assert_eq!(damping, ratio(1, 4));
    let gh = compose(set.generator(GenLabel::G(1)).unwrap(), set.generator(GenLabel::H(1)).unwrap());
    let psi = make_target(damping).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let rho = common::random_density(&mut rng, 4);
        assert_eq!(apply(&gh, &rho).unwrap(), apply(&psi, &rho).unwrap());
    }
}

#[test]
fn generic_search_agrees_with_plain_enumeration() {
    let cases: [&[(&str, &str)]; 5] = [
        &[("0", "0")],
        &[("0", "1")],
        &[("0", "1"), ("1", "0")],
        &[("10", "1"), ("0", "10"), ("0", "00")],
        &[("01", "1"), ("1", "0"), ("01", "11")],
    ];
    for pairs in cases {
        let set = compile(&inst(pairs), &FreePair::standard(), &ratio(1, 2)).unwrap();
        let depth = if pairs.len() == 1 { 6 } else { 4 };
        let (out, _) = generic_scalar_search(&set.generators(), depth, None);
        let oracle = common::plain_bfs_scalar(&set.generators(), depth);
        assert_eq!(out.witness.as_deref().map(labels), oracle, "{pairs:?}");
    }
}

#[test]
fn textbook_instance_in_both_modes() {
    let set = compile(&inst(&[("1", "101"), ("10", "00"), ("011", "11")]), &FreePair::standard(), &ratio(1, 2)).unwrap();
    for mode in [SearchMode::Generic, SearchMode::Structured] {
        let out = membership_search(&set, 8, mode, None);
        assert_eq!(out.status, SearchStatus::Found, "{mode:?}");
        assert_eq!(out.witness_depth, Some(8));
        assert_eq!(out.extracted, Some(TileWord(vec![1, 3, 2, 3])));
        assert_eq!(out.damping.as_deref(), Some("1/256"));
    }
    let structured = membership_search(&set, 8, SearchMode::Structured, None);
    assert_eq!(labels(&structured.witness.unwrap()), ["G3", "G2", "G3", "G1", "H1", "H3", "H2", "H3"]);
}

#[test]
fn unsolvable_single_tile_is_exhausted() {
    let set = compile(&inst(&[("0", "1")]), &FreePair::standard(), &ratio(1, 2)).unwrap();
    for mode in [SearchMode::Generic, SearchMode::Structured] {
        let out = membership_search(&set, 10, mode, None);
        assert_eq!(out.status, SearchStatus::ExhaustedToDepth);
        assert_eq!(out.depth_reached, 10);
        assert!(out.witness.is_none());
    }
}

/// The index block `A^i B` only pins the tile index when words come in the
/// two-phase shape; interleaved words also cancel it. `[(0,1),(1,0)]` has no
/// solution, yet `G2 H2 G1 H1` is the identity.
#[test]
fn interleaved_words_cancel_without_a_solution() {
    let pcp = inst(&[("0", "1"), ("1", "0")]);
    assert_eq!(common::brute_force_solution(&pcp, 10), None);
    let set = compile(&pcp, &FreePair::standard(), &ratio(1, 2)).unwrap();
    let product = ["G2", "H2", "G1", "H1"]
        .iter()
        .map(|l| set.generator(l.parse().unwrap()).unwrap().clone())
        .reduce(|a, b| compose(&a, &b))
        .unwrap();
    assert_eq!(product.unitary, ExactMatrix::identity(4));

    let generic = membership_search(&set, 4, SearchMode::Generic, None);
    assert_eq!(generic.status, SearchStatus::Found);
    assert_eq!(labels(generic.witness.as_ref().unwrap()), ["G2", "H2", "G1", "H1"]);
    assert_eq!(generic.extracted, None);
    let structured = membership_search(&set, 10, SearchMode::Structured, None);
    assert_eq!(structured.status, SearchStatus::ExhaustedToDepth);
}

#[test]
fn extraction_handles_rotations_and_rejects_non_solutions() {
    let pcp = inst(&[("1", "101"), ("10", "00"), ("011", "11")]);
    let w = |s: &str| s.split(' ').map(|l| l.parse::<GenLabel>().unwrap()).collect::<Vec<_>>();
    let shape = w("G3 G2 G3 G1 H1 H3 H2 H3");
    assert_eq!(extract_tile_word(&shape, &pcp), Some(TileWord(vec![1, 3, 2, 3])));
    let mut rotated = shape.clone();
    rotated.rotate_left(3);
    assert_eq!(extract_tile_word(&rotated, &pcp), Some(TileWord(vec![1, 3, 2, 3])));
    assert_eq!(extract_tile_word(&w("G1 H1"), &pcp), None);
    assert_eq!(extract_tile_word(&w("H1"), &pcp), None);
    for found in [extract_tile_word(&shape, &pcp), extract_tile_word(&rotated, &pcp)].into_iter().flatten() {
        assert!(verify_solution(&pcp, &found));
    }
}

#[test]
fn diff_without_solution_is_distinct_at_depth_one() {
    let f1 = Theory::from_set(&compile(&inst(&[("0", "1")]), &FreePair::standard(), &ratio(1, 2)).unwrap());
    let f2 = f1.augmented_with_target(ratio(1, 2)).unwrap();
    for depth in 1..=6 {
        let out = theory_diff(&f1, &f2, depth, None).unwrap();
        assert_eq!(out.status, DiffStatus::Distinct, "depth {depth}");
        let w = out.witness.unwrap();
        assert_eq!(labels(&w.word), ["psi"]);
        assert_eq!(w.damping, "1/2");
    }
}

#[test]
fn diff_of_a_theory_with_itself() {
    let f1 = Theory::from_set(&compile(&inst(&[("0", "1"), ("1", "1")]), &FreePair::standard(), &ratio(1, 2)).unwrap());
    let out = theory_diff(&f1, &f1, 3, None).unwrap();
    assert_eq!(out.status, DiffStatus::IndistinguishableUpToDepth);
    assert_eq!(out.depth, 3);
    assert!(out.generator_matches.iter().all(|m| m.realized_by.as_ref() == Some(&m.generator)));
}

#[test]
fn diff_with_telescoping_tile_matches_target() {
    let f1 = Theory::from_set(&compile(&inst(&[("0", "0")]), &FreePair::standard(), &ratio(1, 2)).unwrap());
    let f2 = f1.augmented_with_target(ratio(1, 2)).unwrap();
    let out = theory_diff(&f1, &f2, 2, None).unwrap();
    assert_eq!(out.status, DiffStatus::IndistinguishableUpToDepth);
    assert_eq!(out.depth, 2);
    let psi = out.generator_matches.iter().find(|m| m.generator == [GenLabel::Target]).unwrap();
    assert_eq!(psi.realized_by.as_deref().map(labels), Some(vec!["G1".to_string(), "H1".to_string()]));
}

#[test]
fn diff_budget_reports_completed_depth() {
    let f1 = Theory::from_set(&compile(&inst(&[("0", "1"), ("1", "10")]), &FreePair::standard(), &ratio(1, 2)).unwrap());
    let f2 = f1.augmented_with_target(ratio(1, 2)).unwrap();
    let out = theory_diff(&f1, &f2, 8, Some(200)).unwrap();
    assert!(out.truncated);
    assert!(out.depth < 8);
    assert_eq!(out.status, DiffStatus::Distinct);
}

#[test]
fn membership_is_deterministic_across_pools() {
    let set = compile(&inst(&[("1", "101"), ("10", "00"), ("011", "11")]), &FreePair::standard(), &ratio(1, 2)).unwrap();
    let run = |threads: usize, mode| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| serde_json::to_string(&membership_search(&set, 8, mode, None)).unwrap())
    };
    for mode in [SearchMode::Generic, SearchMode::Structured] {
        let one = run(1, mode);
        assert_eq!(one, run(2, mode));
        assert_eq!(one, run(8, mode));
    }
}

#[test]
fn per_generator_dampings_form_the_monomial() {
    let set = compile(&inst(&[("0", "0")]), &FreePair::standard(), &ratio(1, 2))
        .unwrap()
        .with_dampings(&[ratio(1, 3)], &[ratio(3, 5)])
        .unwrap();
    let out = membership_search(&set, 2, SearchMode::Structured, None);
    assert_eq!(out.damping.as_deref(), Some("1/5"));
    let mono = out.damping_monomial.unwrap();
    assert_eq!((mono["G1"], mono["H1"]), (1, 1));
    assert_eq!(word_damping(&set, &out.witness.unwrap()), Some(Rational::new(1.into(), 5.into())));
}
