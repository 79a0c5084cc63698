use annostream::gen::instance_for_scheme;
use annostream::protocol::{run_adversarial, run_honest, MutationPolicy, Tuning, Verdict};
use annostream::registry::{build_scheme, SCHEME_NAMES};

#[test]
fn honest_runs_match_oracles() {
    for name in SCHEME_NAMES {
        for n in [8usize, 12, 16] {
            for seed in 0..6u64 {
                let inst = instance_for_scheme(name, n, seed).unwrap();
                let scheme = build_scheme(name, Tuning::balanced(n)).unwrap();
                let report = run_honest(scheme.as_ref(), &inst, seed).unwrap();
                match &report.outcome.result {
                    Verdict::Output(a) => assert!(scheme.is_correct(&inst, a), "{name} n={n} seed={seed}: wrong answer {a}"),
                    Verdict::Reject(r) => panic!("{name} n={n} seed={seed}: honest transcript rejected: {r}"),
                }
                assert!(!report.outcome.budget_exceeded, "{name} n={n} seed={seed}: space {}", report.outcome.vcost_elements);
                assert!(report.transcript.element_count() <= scheme.hcost_bound(&inst), "{name} n={n} seed={seed}: hcost");
            }
        }
    }
}

#[test]
fn mutations_are_caught() {
    for name in SCHEME_NAMES {
        let scheme = build_scheme(name, Tuning::balanced(12)).unwrap();
        for policy in scheme.policies() {
            if policy == MutationPolicy::Honest {
                continue;
            }
            for seed in 0..3u64 {
                let inst = instance_for_scheme(name, 12, seed).unwrap();
                let stats = run_adversarial(scheme.as_ref(), &inst, policy, 20, seed).unwrap();
                assert_eq!(stats.accepts_wrong, 0, "{name} {} seed={seed}: {stats:?}", policy.name());
            }
        }
    }
}

#[test]
fn honest_policy_accepts_every_trial() {
    for name in SCHEME_NAMES {
        let scheme = build_scheme(name, Tuning::balanced(8)).unwrap();
        let inst = instance_for_scheme(name, 8, 4).unwrap();
        let stats = run_adversarial(scheme.as_ref(), &inst, MutationPolicy::Honest, 10, 4).unwrap();
        assert_eq!(stats.accepts_correct, 10, "{name}: {stats:?}");
    }
}

#[test]
fn zero_trials_is_an_error() {
    let scheme = build_scheme("tri-laconic", Tuning::balanced(8)).unwrap();
    let inst = instance_for_scheme("tri-laconic", 8, 0).unwrap();
    assert!(run_adversarial(scheme.as_ref(), &inst, MutationPolicy::CoeffFlip, 0, 0).is_err());
}
