use ifagent::agent::AgentConfig;
use ifagent::commands::{roulette_index, Factors, ScoringParams};
use ifagent::env::{Environment, Simulator};
use ifagent::lexicon::{EmbeddingTable, FrequencyTable};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table(vectors: &[Vec<f64>]) -> (EmbeddingTable, Vec<String>) {
    let names: Vec<String> = (0..vectors.len()).map(|i| format!("w{i}")).collect();
    let t = EmbeddingTable::from_rows(names.iter().map(String::as_str).zip(vectors.iter().cloned()));
    (t, names)
}

fn plain_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn vectors() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..5).prop_flat_map(|d| prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d), 2..12))
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

proptest! {
    #[test]
    fn cosine_is_symmetric_and_bounded(vs in vectors()) {
        let (t, names) = table(&vs);
        for (i, a) in names.iter().enumerate() {
            for (j, b) in names.iter().enumerate() {
                let ab = t.cosine(a, b);
                prop_assert_eq!(ab, t.cosine(b, a));
                if let Some(c) = ab {
                    prop_assert!((-1.0..=1.0).contains(&c));
                    prop_assert!((c - plain_cosine(&vs[i], &vs[j])).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn nearest_matches_a_full_sort(vs in vectors(), n in 0usize..6) {
        let (t, names) = table(&vs);
        let got = t.nearest(&names[0], n);
        let mut all: Vec<(String, f64)> = names[1..]
            .iter()
            .filter_map(|w| t.cosine(&names[0], w).map(|c| (w.clone(), c)))
            .collect();
        all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        all.truncate(n);
        prop_assert_eq!(got, all);
    }

    #[test]
    fn uniqueness_falls_as_counts_rise(a in 1u64..1_000_000, b in 1u64..1_000_000) {
        let t = FrequencyTable::from_counts([("a", a), ("b", b)]);
        prop_assert_eq!(a < b, t.uniqueness("a") > t.uniqueness("b"));
        let mean = (t.uniqueness("a") * t.uniqueness("b")).sqrt();
        prop_assert!(rel_eq(t.phrase_uniqueness(["a", "b"]), mean));
    }

    #[test]
    fn each_overlap_word_multiplies_by_b(
        count in 1.0f64..1e6, sim in 0.01f64..1.0, uniq in 1e-6f64..1.0, imp in 0.01f64..1.0,
        k in 0u32..6, m in 0u32..6, b in 1.01f64..5.0, p in 1.01f64..5.0,
    ) {
        let params = ScoringParams { overlap_base: b, unsupported_base: p, ..ScoringParams::default() };
        let score = |k, m| Factors::new(count, sim, uniq, imp, k, m, &params).score(&params.weights);
        prop_assert!(rel_eq(score(k + 1, m), score(k, m) * b));
        prop_assert!(rel_eq(score(k, m + 1), score(k, m) / p));
    }

    #[test]
    fn more_popular_patterns_score_higher(count in 1.0f64..1e6, extra in 1.0f64..1e3, k in 0u32..4, m in 0u32..4) {
        let params = ScoringParams::default();
        let score = |c| Factors::new(c, 0.7, 0.01, 0.5, k, m, &params).score(&params.weights);
        prop_assert!(score(count + extra) > score(count));
    }

    #[test]
    fn roulette_ignores_weight_scale(
        weights in prop::collection::vec(0.0f64..10.0, 1..10), shift in -20i32..20, seed in any::<u64>(),
    ) {
        let scaled: Vec<f64> = weights.iter().map(|w| w * 2f64.powi(shift)).collect();
        let mut r1 = ChaCha8Rng::seed_from_u64(seed);
        let mut r2 = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let i = roulette_index(&weights, &mut r1);
            prop_assert_eq!(i, roulette_index(&scaled, &mut r2));
            if let Some(i) = i {
                prop_assert!(weights[i] > 0.0);
            }
        }
    }

    #[test]
    fn config_survives_its_text_form(
        seed in any::<u64>(), gather in 0usize..10, bias in 0.5f64..50.0, c_mv in 0.0f64..4.0,
        map in any::<bool>(), battle in any::<bool>(), suffix in prop::option::of(1usize..10),
        verbs in prop::collection::vec("[a-z]{2,8}", 1..5),
    ) {
        let config = AgentConfig {
            seed, gather_limit: gather, battle_bias: bias, c_mv, use_map: map, use_battle: battle,
            death_suffix_len: suffix, acquisition_verbs: verbs, ..AgentConfig::default()
        };
        let mut back = AgentConfig::default();
        back.apply(&config.to_text(), "generated").unwrap();
        prop_assert_eq!(back, config);
    }

    #[test]
    fn simulator_is_a_function_of_its_inputs(
        world in prop::sample::select(vec!["closet", "battle", "labyrinth", "dungeon", "hills"]),
        commands in prop::collection::vec(
            prop::sample::select(vec!["north", "south", "east", "west", "up", "down", "take gun",
                "take lamp", "take key", "hit troll", "kill goblin", "take coin", "look", "jump"]),
            0..40,
        ),
    ) {
        let spec = ifagent::data::world(world).unwrap();
        let (mut a, pa) = Simulator::start(spec.clone());
        let (mut b, pb) = Simulator::start(spec);
        prop_assert_eq!(&pa, &pb);
        for c in &commands {
            let (ra, rb) = (a.step(c), b.step(c));
            prop_assert_eq!(ra.is_ok(), rb.is_ok());
            match (ra, rb) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
                _ => break,
            }
            prop_assert_eq!(a.query_inventory().unwrap(), b.query_inventory().unwrap());
        }
        prop_assert_eq!(a.restart().unwrap(), pa);
    }
}
