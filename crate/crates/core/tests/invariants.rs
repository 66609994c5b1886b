//! Structural invariants checked against independent reference formulas.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use aivat::estimators::AivatTables;
use aivat::game::{extend_with_seat_chance, BaseGame, GameDescriptor, GameTree, PlayerId, ResolvedProfile};
use aivat::harness::{run_oracle, OracleConfig};
use aivat::partitions::{build_h_partition, build_w_partition, random_strategies, validate_partitions, PaSpec};
use aivat::solver::{exact_values, ValueFunction};

fn extended(game: BaseGame) -> GameTree {
    GameTree::build(extend_with_seat_chance(GameDescriptor {
        base: game,
        seat_extended: false,
    }))
}

fn random_full(tree: &GameTree, rng: &mut ChaCha8Rng) -> ResolvedProfile {
    random_strategies(tree, [true, true], rng)
}

fn check_reach(game: BaseGame, profiles: usize) {
    let tree = extended(game);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..profiles {
        let profile = random_full(&tree, &mut rng);
        let reach = tree.reach_vectors(&profile);
        for pa in PaSpec::ALL {
            let known = pa.players_mask();
            let unknown = [!known[0], !known[1]];
            for r in &reach {
                let split = r.restricted(true, known) * r.restricted(false, unknown);
                assert!((split - r.product()).abs() <= 1e-15 * r.product().max(1e-300));
            }
        }
        let total: f64 = tree.terminals().iter().map(|&z| reach[z].product()).sum();
        assert!((total - 1.0).abs() < 1e-12, "terminal reach sums to {total}");
    }
}

#[test]
fn reach_factorizes_and_sums_to_one_kuhn() {
    check_reach(BaseGame::Kuhn, 100);
}

#[test]
fn reach_factorizes_and_sums_to_one_leduc() {
    check_reach(BaseGame::Leduc, 10);
}

/// k_H from the raw definition: expected value of u over A(H) under the
/// full-reach-weighted action distribution of H, minus u at the observed
/// action.
fn reference_corrections(game: BaseGame, trials: usize) {
    let tree = extended(game);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..trials {
        let profile = random_full(&tree, &mut rng);
        let reach = tree.reach_vectors(&profile);
        for pa in PaSpec::ALL {
            let hp = build_h_partition(&tree, pa);
            let vf = ValueFunction::random(&hp, PlayerId::X, game.max_pot(), &mut rng);
            let tables = AivatTables::build(&tree, &profile, &vf, pa, PlayerId::X).unwrap();
            for (id, part) in hp.parts.iter().enumerate() {
                let weight: f64 = part.members.iter().map(|&h| reach[h].product()).sum();
                let mut expected = 0.0;
                for &a in &part.actions {
                    let mut p = 0.0;
                    for &h in &part.members {
                        if let Some(i) = tree.node(h).actions.iter().position(|&b| b == a) {
                            p += reach[h].product() * tree.action_prob(&profile, h, i).unwrap();
                        }
                    }
                    expected += p / weight * vf.get(&part.key, a).unwrap();
                }
                for (o, &a) in part.actions.iter().enumerate() {
                    let reference = expected - vf.get(&part.key, a).unwrap();
                    let k = tables.correction(id, o).unwrap();
                    assert!(
                        (k - reference).abs() <= 1e-9,
                        "{pa} part {} action {a}: {k} vs {reference}",
                        part.key
                    );
                }
            }
        }
    }
}

#[test]
fn corrections_match_reference_formula_kuhn() {
    reference_corrections(BaseGame::Kuhn, 20);
}

#[test]
fn corrections_match_reference_formula_leduc() {
    reference_corrections(BaseGame::Leduc, 2);
}

#[test]
fn partitions_hold_under_random_opponents() {
    for game in [BaseGame::Kuhn, BaseGame::Leduc] {
        let tree = extended(game);
        for pa in PaSpec::ALL {
            let hp = build_h_partition(&tree, pa);
            let wp = build_w_partition(&tree, pa, &hp);
            let diag = validate_partitions(&tree, pa, &hp, &wp, 100, 31);
            assert!(
                diag.passed(),
                "{game} {pa}: {:?}",
                &diag.violations[..diag.violations.len().min(3)]
            );
        }
    }
}

#[test]
fn estimates_are_zero_sum_across_perspectives() {
    let tree = extended(BaseGame::Leduc);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let profile = random_full(&tree, &mut rng);
    for pa in [PaSpec::CX, PaSpec::CXY] {
        let hp = build_h_partition(&tree, pa);
        let for_x = exact_values(&tree, &profile, &hp, PlayerId::X).unwrap().values;
        let for_y = exact_values(&tree, &profile, &hp, PlayerId::Y).unwrap().values;
        for (key, a, v) in for_x.iter() {
            assert!((v + for_y.get(key, a).unwrap()).abs() < 1e-12);
        }
        let x = AivatTables::build(&tree, &profile, &for_x, pa, PlayerId::X).unwrap();
        let y = AivatTables::build(&tree, &profile, &for_x, pa, PlayerId::Y).unwrap();
        for &z in tree.terminals() {
            let (ex, ey) = (x.estimate(&tree, z).unwrap().value, y.estimate(&tree, z).unwrap().value);
            assert!((ex + ey).abs() < 1e-12, "terminal {z}: {ex} vs {ey}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kuhn_estimators_unbiased_for_any_seed(seed in any::<u64>()) {
        let report = run_oracle(&OracleConfig::new(BaseGame::Kuhn, 1, seed)).unwrap();
        let failures: Vec<String> = report.failures().map(|c| c.to_string()).collect();
        prop_assert!(failures.is_empty(), "{:?}", failures);
    }
}
