//! Property tests: serialization round-trips, graph invariants, and
//! quick random cross-validation of the solvers against the oracles.

use proptest::prelude::*;
use putwin::{
    brute_force_rp, brute_force_stv, build_wmg, parse_preflib, sample_rp, sample_stv,
    scc_decompose, serialize_preflib, solve_put_rp_mc, solve_put_rp_naive, solve_put_stv,
    DiGraph, Profile, SolveOptions, VoteGroup,
};

/// Decode a Lehmer index into the k-th permutation of 0..m.
fn nth_permutation(m: usize, mut k: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..m).collect();
    let mut out = Vec::with_capacity(m);
    for i in (1..=m).rev() {
        let idx = (k % i as u64) as usize;
        k /= i as u64;
        out.push(pool.remove(idx));
    }
    out
}

fn arb_profile(max_m: usize, max_votes: usize, truncate: bool) -> impl Strategy<Value = Profile> {
    (1..=max_m).prop_flat_map(move |m| {
        let vote = (0u64..5_040, 1u64..4, 0..=m).prop_map(move |(k, count, keep)| {
            let mut ranking = nth_permutation(m, k);
            if truncate {
                ranking.truncate(keep.max(1));
            }
            VoteGroup { count, ranking }
        });
        prop::collection::vec(vote, 0..=max_votes).prop_map(move |votes| {
            Profile::new(m, (0..m).map(|i| format!("alt {i}")).collect(), votes).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn preflib_roundtrip(profile in arb_profile(6, 8, true)) {
        let text = serialize_preflib(&profile);
        let back = parse_preflib(&text).unwrap();
        prop_assert_eq!(profile, back);
    }

    #[test]
    fn wmg_is_antisymmetric(profile in arb_profile(5, 10, true)) {
        let wmg = build_wmg(&profile);
        let m = profile.m;
        let mut total = 0i64;
        for a in 0..m {
            for b in 0..m {
                total += wmg.weight(a, b);
                prop_assert_eq!(wmg.weight(a, b), -wmg.weight(b, a));
                prop_assert!(wmg.weight(a, b).unsigned_abs() <= profile.voter_count());
            }
        }
        prop_assert_eq!(total, 0);
    }

    #[test]
    fn odd_complete_profiles_have_no_pairwise_ties(
        profile in arb_profile(5, 9, false).prop_filter("odd n", |p| p.voter_count() % 2 == 1)
    ) {
        let wmg = build_wmg(&profile);
        for a in 0..profile.m {
            for b in 0..profile.m {
                if a != b {
                    prop_assert_ne!(wmg.weight(a, b), 0);
                }
            }
        }
    }

    #[test]
    fn condensation_is_acyclic(edges in prop::collection::vec((0usize..6, 0usize..6), 0..18)) {
        let mut g = DiGraph::new(6).unwrap();
        for (u, v) in edges {
            if u != v {
                g.add_edge(u, v).unwrap();
            }
        }
        let (comps, bridges) = scc_decompose(&g);
        // Every vertex in exactly one component.
        let mut seen = 0u64;
        for &c in &comps {
            prop_assert_eq!(seen & c, 0);
            seen |= c;
        }
        prop_assert_eq!(seen, (1u64 << 6) - 1);
        // Contract components; the bridge-edge graph must be acyclic.
        let comp_of = |v: usize| comps.iter().position(|&c| c & (1u64 << v) != 0).unwrap();
        let mut cond = DiGraph::new(comps.len()).unwrap();
        for (u, v) in bridges {
            let (cu, cv) = (comp_of(u), comp_of(v));
            prop_assert_ne!(cu, cv);
            if !cond.has_edge(cu, cv) {
                cond.add_edge(cu, cv).unwrap();
            }
        }
        prop_assert!(cond.is_acyclic());
    }

    #[test]
    fn stv_solver_matches_oracle(profile in arb_profile(4, 7, false)) {
        let solved = solve_put_stv(&profile, &SolveOptions::default()).unwrap();
        let oracle = brute_force_stv(&profile, None).unwrap();
        prop_assert_eq!(&solved.winners, &oracle);
        let sampled = sample_stv(&profile, 8, 5).unwrap();
        prop_assert!(sampled.is_subset(&oracle));
    }

    #[test]
    fn rp_solvers_match_oracle(profile in arb_profile(4, 7, false)) {
        let oracle = brute_force_rp(&profile, None).unwrap();
        let naive = solve_put_rp_naive(&profile, &SolveOptions::default()).unwrap();
        prop_assert_eq!(&naive.winners, &oracle);
        for scc in [false, true] {
            let opts = SolveOptions { scc, ..SolveOptions::default() };
            let mc = solve_put_rp_mc(&profile, &opts).unwrap();
            prop_assert_eq!(&mc.winners, &oracle);
        }
        let sampled = sample_rp(&profile, 8, 5).unwrap();
        prop_assert!(sampled.is_subset(&oracle));
    }
}
