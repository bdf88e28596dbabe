//! Cross-checks between independent computation routes: the dynamic
//! programs and combinatorial ranks against brute-force enumeration.

use num_bigint::BigUint;

use guesswork_core::exact::{
    order_stat_pmf, single_guesswork_pmf, strategy_pmf_exhaustive, GuessworkPmf,
};
use guesswork_core::monte_carlo::rank_by_type_counting;
use guesswork_core::sources::{Alphabet, CharacterSource, IidSource, MarkovSource};
use guesswork_core::strategy::{optimal_single_strategy, u_min, MultiUserStrategy};

fn iid(probs: Vec<f64>) -> CharacterSource {
    let m = probs.len();
    CharacterSource::Iid(IidSource::new(Alphabet::new(m).unwrap(), probs).unwrap())
}

/// Brute-force distribution of the U-th smallest of independent ranks.
fn order_stat_by_enumeration(per_user: &[GuessworkPmf], u: usize) -> Vec<f64> {
    let max_n = per_user.iter().map(|p| p.support_len()).max().unwrap();
    let mut mass = vec![0.0f64; max_n];
    let mut ranks = vec![1u64; per_user.len()];
    loop {
        let prob: f64 = per_user
            .iter()
            .zip(&ranks)
            .map(|(p, &r)| p.mass_at(r))
            .product();
        if prob > 0.0 {
            let stat = u_min(&ranks, u).unwrap();
            mass[(stat - 1) as usize] += prob;
        }
        let mut pos = per_user.len();
        loop {
            if pos == 0 {
                return mass;
            }
            pos -= 1;
            ranks[pos] += 1;
            if ranks[pos] as usize <= per_user[pos].support_len() {
                break;
            }
            ranks[pos] = 1;
        }
    }
}

#[test]
fn order_stat_dp_matches_joint_enumeration() {
    let cases: Vec<Vec<GuessworkPmf>> = vec![
        vec![
            single_guesswork_pmf(&iid(vec![0.6, 0.25, 0.15]).enumerate_distribution(1).unwrap()),
            single_guesswork_pmf(&iid(vec![0.5, 0.4, 0.1]).enumerate_distribution(1).unwrap()),
        ],
        vec![
            single_guesswork_pmf(&iid(vec![0.75, 0.25]).enumerate_distribution(2).unwrap()),
            single_guesswork_pmf(&iid(vec![0.5, 0.5]).enumerate_distribution(2).unwrap()),
            single_guesswork_pmf(&iid(vec![0.9, 0.1]).enumerate_distribution(2).unwrap()),
        ],
        // Mixed support lengths: a k=1 user against a k=2 user's ranks.
        vec![
            single_guesswork_pmf(&iid(vec![0.3, 0.3, 0.4]).enumerate_distribution(1).unwrap()),
            single_guesswork_pmf(&iid(vec![0.25, 0.75]).enumerate_distribution(2).unwrap()),
        ],
    ];
    for per_user in cases {
        for u in 1..=per_user.len() {
            let dp = order_stat_pmf(&per_user, u).unwrap();
            let brute = order_stat_by_enumeration(&per_user, u);
            for (n, expected) in brute.iter().enumerate() {
                assert!(
                    (dp.mass_at(n as u64 + 1) - expected).abs() < 1e-12,
                    "u={u} n={}: {} vs {expected}",
                    n + 1,
                    dp.mass_at(n as u64 + 1)
                );
            }
        }
    }
}

#[test]
fn full_identification_total_is_convolution_of_ranks() {
    // With U = V the total is the sum of per-user ranks, so the exhaustive
    // round-robin PMF must equal the convolution of the single PMFs.
    let dists = [
        iid(vec![0.6, 0.25, 0.15]).enumerate_distribution(1).unwrap(),
        iid(vec![0.5, 0.4, 0.1]).enumerate_distribution(1).unwrap(),
    ];
    let singles: Vec<_> = dists.iter().map(optimal_single_strategy).collect();
    let rr = MultiUserStrategy::round_robin(singles).unwrap();
    let pmf = strategy_pmf_exhaustive(&rr, &dists, 2).unwrap();

    let a = single_guesswork_pmf(&dists[0]);
    let b = single_guesswork_pmf(&dists[1]);
    let mut conv = vec![0.0f64; 6];
    for i in 1..=3u64 {
        for j in 1..=3u64 {
            conv[(i + j - 1) as usize] += a.mass_at(i) * b.mass_at(j);
        }
    }
    // Frozen by hand: 0.3, 0.365, 0.235, 0.085, 0.015 on totals 2..=6.
    let expected = [0.0, 0.3, 0.365, 0.235, 0.085, 0.015];
    for n in 1..=6u64 {
        assert!((conv[(n - 1) as usize] - expected[(n - 1) as usize]).abs() < 1e-12);
        assert!(
            (pmf.mass_at(n) - conv[(n - 1) as usize]).abs() < 1e-12,
            "n={n}: {} vs {}",
            pmf.mass_at(n),
            conv[(n - 1) as usize]
        );
    }
}

#[test]
fn round_robin_user_order_is_immaterial_when_all_are_needed() {
    let dists = [
        iid(vec![0.7, 0.2, 0.1]).enumerate_distribution(1).unwrap(),
        iid(vec![0.5, 0.4, 0.1]).enumerate_distribution(1).unwrap(),
    ];
    let singles: Vec<_> = dists.iter().map(optimal_single_strategy).collect();
    let forward =
        MultiUserStrategy::round_robin_with_order(singles.clone(), vec![0, 1]).unwrap();
    let backward = MultiUserStrategy::round_robin_with_order(singles, vec![1, 0]).unwrap();
    let pf = strategy_pmf_exhaustive(&forward, &dists, 2).unwrap();
    let pb = strategy_pmf_exhaustive(&backward, &dists, 2).unwrap();
    for n in 1..=6u64 {
        assert!((pf.mass_at(n) - pb.mass_at(n)).abs() < 1e-12);
    }
}

#[test]
fn round_robin_lemma3_distribution() {
    // Frozen by direct hand enumeration of the six-query table (U = 1):
    // totals 1..=6 carry masses 0.6, 0.2, 0.125, 0.06, 0.015, 0.
    let dists = [
        iid(vec![0.6, 0.25, 0.15]).enumerate_distribution(1).unwrap(),
        iid(vec![0.5, 0.4, 0.1]).enumerate_distribution(1).unwrap(),
    ];
    let singles: Vec<_> = dists.iter().map(optimal_single_strategy).collect();
    let rr = MultiUserStrategy::round_robin(singles).unwrap();
    let pmf = strategy_pmf_exhaustive(&rr, &dists, 1).unwrap();
    let expected = [0.6, 0.2, 0.125, 0.06, 0.015, 0.0];
    for (n, want) in expected.iter().enumerate() {
        assert!((pmf.mass_at(n as u64 + 1) - want).abs() < 1e-12);
    }
    assert!((pmf.mean() - 1.69).abs() < 1e-12);
}

#[test]
fn correlated_chain_with_balanced_rates_has_product_guesswork() {
    // A two-state chain with a = b started from its stationary point has
    // the same guesswork PMF as one uniform bit followed by k-1 Bernoulli(a)
    // transition indicators: string <-> (first char, flip pattern) is a
    // probability-preserving bijection.
    let a = 0.3;
    for k in 1..=6usize {
        let markov = CharacterSource::Markov(MarkovSource::two_state(a, a).unwrap());
        let chain_pmf = single_guesswork_pmf(&markov.enumerate_distribution(k).unwrap());

        let mut atoms = vec![0.5, 0.5];
        for _ in 1..k {
            let mut next = Vec::with_capacity(atoms.len() * 2);
            for &p in &atoms {
                next.push(p * (1.0 - a));
                next.push(p * a);
            }
            atoms = next;
        }
        atoms.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (n, &want) in atoms.iter().enumerate() {
            let got = chain_pmf.mass_at(n as u64 + 1);
            assert!(
                (got - want).abs() < 1e-12,
                "k={k} n={}: {got} vs {want}",
                n + 1
            );
        }
    }
}

#[test]
fn type_counting_matches_explicit_ranks_across_sources() {
    let sources = [
        IidSource::bernoulli(0.75).unwrap(),
        IidSource::bernoulli(0.4).unwrap(),
        IidSource::new(Alphabet::new(3).unwrap(), vec![0.25, 0.25, 0.5]).unwrap(),
        IidSource::new(Alphabet::new(4).unwrap(), vec![0.4, 0.3, 0.3, 0.0]).unwrap(),
        IidSource::new(
            Alphabet::new(8).unwrap(),
            vec![0.55, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05, 0.05],
        )
        .unwrap(),
    ];
    for source in &sources {
        let m = source.alphabet().size();
        let max_k = match m {
            2 => 7,
            3 => 5,
            4 => 4,
            _ => 3,
        };
        for k in 1..=max_k {
            let dist = CharacterSource::Iid(source.clone())
                .enumerate_distribution(k)
                .unwrap();
            let strategy = optimal_single_strategy(&dist);
            for idx in 0..dist.len() {
                let w = dist.string_at(idx);
                let combinatorial = rank_by_type_counting(source, &w).unwrap();
                let explicit = strategy.rank_of(&w).unwrap();
                assert_eq!(
                    combinatorial,
                    BigUint::from(explicit),
                    "m={m} k={k} w={w:?}"
                );
            }
        }
    }
}

#[test]
fn exhaustive_sweep_sandwich_on_small_instances() {
    // g_opt <= round-robin total <= V * g_opt for every realized vector.
    let instances: Vec<(Vec<CharacterSource>, usize)> = vec![
        (vec![iid(vec![0.6, 0.25, 0.15]), iid(vec![0.5, 0.4, 0.1])], 1),
        (vec![iid(vec![0.75, 0.25]), iid(vec![0.5, 0.5]), iid(vec![0.9, 0.1])], 2),
        (vec![iid(vec![0.7, 0.3]), iid(vec![0.2, 0.8])], 2),
    ];
    for (sources, k) in instances {
        let v = sources.len();
        let dists: Vec<_> = sources
            .iter()
            .map(|s| s.enumerate_distribution(k).unwrap())
            .collect();
        let singles: Vec<_> = dists.iter().map(optimal_single_strategy).collect();
        let rr = MultiUserStrategy::round_robin(singles.clone()).unwrap();
        let n = dists[0].len();
        for u in 1..=v {
            let mut joint = vec![0usize; v];
            loop {
                let ranks: Vec<u64> = (0..v)
                    .map(|user| singles[user].rank_of_index(joint[user]))
                    .collect();
                let bound = u_min(&ranks, u).unwrap();
                let realized: Vec<Vec<u8>> =
                    (0..v).map(|user| dists[user].string_at(joint[user])).collect();
                let total = guesswork_core::strategy::total_guesswork(&rr, u, &realized)
                    .unwrap()
                    .total;
                assert!(bound <= total, "u={u} joint={joint:?}");
                assert!(total <= v as u64 * bound, "u={u} joint={joint:?}");
                let mut pos = v;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    joint[pos] += 1;
                    if joint[pos] < n {
                        break;
                    }
                    joint[pos] = 0;
                }
                if joint.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
    }
}
