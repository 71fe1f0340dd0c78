mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use restrained_core::instances::random::{random_instance, random_member, ConstraintKind, RandomSpec, UtilityKind};
use restrained_core::instances::{gen_lb00, lb00_deviation, lb00_party_compositions, PartyChecker, PartyShape};
use restrained_core::model::{AxiomPolicy, Instance};
use restrained_core::rational::{int, rat};
use restrained_core::scoring::{score, Rule};
use restrained_core::solvers::{first_improving_swap, solve_global, solve_local, LocalConfig, Start};
use restrained_core::verifiers::{check_core, check_restrained_core, replay_witness, HatMode, VerifyOptions};
use restrained_core::Rational;

fn small_instance(seed: u64) -> (Instance, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(2..=6);
    let spec = RandomSpec {
        n: rng.gen_range(1..=4),
        m,
        k: rng.gen_range(1..=m.min(3)),
        utility: UtilityKind::ALL[rng.gen_range(0..4)],
        constraint: ConstraintKind::ALL[rng.gen_range(0..4)],
    };
    let inst = random_instance(&spec, &mut rng).unwrap();
    (inst, rng)
}

fn gamma_strategy() -> impl Strategy<Value = Rational> {
    (1i64..=10, 0i64..=20).prop_map(|(b, extra)| rat(b + extra, b))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn blocking_is_monotone_in_gamma(seed in any::<u64>(), g1 in gamma_strategy(), g2 in gamma_strategy()) {
        let (inst, mut rng) = small_instance(seed);
        let Ok(w) = random_member(&inst, &mut rng) else { return Ok(()) };
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        for mode in [HatMode::SubsetOfW, HatMode::AnyHatW] {
            let opts = VerifyOptions { hat_mode: mode, ..Default::default() };
            let at_hi = check_restrained_core(&inst, &w, &hi, &opts).unwrap();
            let at_lo = check_restrained_core(&inst, &w, &lo, &opts).unwrap();
            prop_assert!(!at_hi.failed() || at_lo.failed());
        }
        let at_hi = check_core(&inst, &w, &hi, &VerifyOptions::default()).unwrap();
        let at_lo = check_core(&inst, &w, &lo, &VerifyOptions::default()).unwrap();
        prop_assert!(!at_hi.failed() || at_lo.failed());
    }

    #[test]
    fn failing_reports_carry_replayable_witnesses(seed in any::<u64>(), gamma in gamma_strategy()) {
        let (inst, mut rng) = small_instance(seed);
        let Ok(w) = random_member(&inst, &mut rng) else { return Ok(()) };
        let options = [
            VerifyOptions::default(),
            VerifyOptions::any_hat(),
            VerifyOptions { deviations_in_family: true, ..Default::default() },
        ];
        for opts in &options {
            for report in [
                check_core(&inst, &w, &gamma, opts).unwrap(),
                check_restrained_core(&inst, &w, &gamma, opts).unwrap(),
            ] {
                if report.failed() {
                    prop_assert!(replay_witness(&inst, &w, &report, opts).unwrap());
                }
            }
        }
    }

    #[test]
    fn verifiers_match_oracles(seed in any::<u64>(), gamma in gamma_strategy()) {
        let (inst, mut rng) = small_instance(seed);
        let Ok(w) = random_member(&inst, &mut rng) else { return Ok(()) };
        let core = check_core(&inst, &w, &gamma, &VerifyOptions::default()).unwrap();
        prop_assert_eq!(core.failed(), common::core_blocked(&inst, &w, &gamma, None, false));
        let any = check_restrained_core(&inst, &w, &gamma, &VerifyOptions::any_hat()).unwrap();
        prop_assert_eq!(any.failed(), common::restrained_core_blocked(&inst, &w, &gamma, true, None));
    }

    #[test]
    fn instance_json_round_trips(seed in any::<u64>()) {
        let (inst, _) = small_instance(seed);
        let text = inst.to_json_string().unwrap();
        let back = Instance::from_json_str(&text, AxiomPolicy::Check).unwrap();
        prop_assert_eq!(back.to_json_string().unwrap(), text);
    }

    #[test]
    fn local_search_ends_without_improving_swaps(seed in any::<u64>(), start in any::<u64>()) {
        let (inst, _) = small_instance(seed);
        if !inst.family().is_matroid() {
            return Ok(());
        }
        let approval = inst.utilities().iter().all(|u| u.approval_set().is_some());
        let rules: &[Rule] = if approval { &[Rule::Pav, Rule::Snw, Rule::Gpav] } else { &[Rule::Snw, Rule::Gpav] };
        for &rule in rules {
            let config = LocalConfig { start: Start::Random(start), ..Default::default() };
            let local = solve_local(&inst, rule, &config).unwrap();
            prop_assert!(inst.is_feasible(&local.committee));
            prop_assert!(first_improving_swap(&inst, rule, &local.committee, &int(0)).unwrap().is_none());
            let global = solve_global(&inst, rule).unwrap();
            prop_assert!(global.score.value >= score(rule, &inst, &local.committee).unwrap().value);
        }
    }
}

#[test]
fn party_checker_matches_the_general_verifier_on_small_shapes() {
    for k in 2..=4 {
        let shape = PartyShape { pool: 2, cap: 2, k, dummies: k };
        let inst = shape.instance().unwrap();
        for gamma in [int(1), rat(16, 15), rat(3, 2)] {
            let checker = PartyChecker::new(&shape, &gamma).unwrap();
            for code in 0..3usize.pow(6) {
                let mut counts = [0usize; 6];
                let mut c = code;
                for slot in counts.iter_mut() {
                    *slot = c % 3;
                    c /= 3;
                }
                if counts.iter().sum::<usize>() > shape.cap {
                    continue;
                }
                let w = shape.committee(&counts);
                for mode in [HatMode::SubsetOfW, HatMode::AnyHatW] {
                    let opts = VerifyOptions {
                        hat_mode: mode,
                        max_candidates: 16,
                        subset_cap: 1 << 30,
                        ..Default::default()
                    };
                    let general = check_restrained_core(&inst, &w, &gamma, &opts).unwrap();
                    assert_eq!(
                        checker.passes(&counts, mode),
                        general.passed(),
                        "k={k} γ={gamma} counts={counts:?} {mode:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn odd_beta_party_instance_meets_the_ratio_with_irrational_values() {
    let (beta, r) = (5, 2);
    let inst = gen_lb00(beta, r).unwrap();
    for counts in lb00_party_compositions(r) {
        let dev = lb00_deviation(&inst, beta, r, &counts).unwrap();
        assert!(dev.meets_claim(), "counts {counts:?}");
    }
}
