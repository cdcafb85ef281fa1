use boundedwfa_core::kserver::{opt_offline_kserver, wfa_run_kserver, KServerInstance};
use boundedwfa_core::mts::{opt_offline_mts, wfa_run_mts, MtsInstance};
use boundedwfa_core::phases::{audit_condition1, phase_length_bound, run_phased_kserver, run_phased_mts};
use boundedwfa_core::{Configuration, MetricSpace, PhaseParams, RunOptions};
use proptest::prelude::*;

fn line(xs: &[u32]) -> MetricSpace<f64> {
    let mut xs = xs.to_vec();
    xs.sort_unstable();
    xs.dedup();
    MetricSpace::from_points(&xs.iter().map(|&x| vec![f64::from(x)]).collect::<Vec<_>>()).unwrap()
}

fn kserver_case() -> impl Strategy<Value = KServerInstance<f64>> {
    (prop::collection::btree_set(0u32..30, 3..7), 1usize..=3, prop::collection::vec(any::<prop::sample::Index>(), 0..60))
        .prop_filter_map("k below point count", |(xs, k, reqs)| {
            let xs: Vec<u32> = xs.into_iter().collect();
            let space = line(&xs);
            let m = space.len();
            (k < m).then(|| {
                let requests = reqs.iter().map(|i| i.index(m)).collect();
                KServerInstance::new(space, k, Configuration::new(0..k), requests).unwrap()
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phased_kserver_is_competitive_and_audits(inst in kserver_case(), eps in prop::sample::select(vec![0.25, 1.0, 4.0])) {
        let k = inst.k();
        let params = PhaseParams::for_kserver(k, eps);
        let trace = run_phased_kserver(&inst, &params, &RunOptions::default()).unwrap();
        trace.check_invariants().unwrap();
        let (w, _) = opt_offline_kserver(&inst).unwrap();
        prop_assert!(trace.total_cost() <= (params.alpha + eps) * w + 1e-9);
        prop_assert!(wfa_run_kserver(&inst).total_cost() <= params.alpha * w + 1e-9);

        // D never exceeds twice the diameter; the request that closes a phase
        // may overshoot the threshold, hence the + 1.
        let delta = inst.space().min_positive_distance().unwrap_or(1.0);
        let cap = phase_length_bound(&params.with_delta(delta), 2.0 * inst.space().diameter()).unwrap();
        prop_assert!(trace.max_history_len() as u64 <= cap + 1);

        let audit = audit_condition1(&trace, &inst, &params).unwrap();
        prop_assert!(audit.verdict());
        prop_assert!(audit.minimality_holds());
        prop_assert_eq!(audit.opt_cost, w);
    }

    #[test]
    fn phased_mts_is_competitive(
        xs in prop::collection::btree_set(0u32..20, 2..5),
        costs in prop::collection::vec(prop::collection::vec(0u32..6, 5), 0..80),
        eps in prop::sample::select(vec![0.5, 1.0, 3.0]),
    ) {
        let xs: Vec<u32> = xs.into_iter().collect();
        let space = line(&xs);
        let m = space.len();
        let requests: Vec<Vec<f64>> = costs.iter().map(|c| c[..m].iter().map(|&x| f64::from(x)).collect()).collect();
        let inst = MtsInstance::new(space, 0, requests).unwrap();
        let params = PhaseParams::for_mts(m, eps);
        let trace = run_phased_mts(&inst, &params, &RunOptions::default()).unwrap();
        let (w, _) = opt_offline_mts(&inst);
        prop_assert!(trace.total_cost() <= (params.alpha + eps) * w + 1e-9);
        prop_assert!(wfa_run_mts(&inst).total_cost() <= params.alpha * w + 1e-9);
        let audit = audit_condition1(&trace, &inst, &params).unwrap();
        prop_assert!(audit.verdict());
    }
}

#[test]
fn f32_and_f64_agree_on_integer_lines() {
    let xs = [0.0, 3.0, 7.0, 12.0, 20.0];
    let requests = vec![4, 1, 3, 0, 2, 4, 4, 1, 3, 2, 0, 1];
    let s64 = MetricSpace::<f64>::from_points(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap();
    let s32 = MetricSpace::<f32>::from_points(&xs.iter().map(|&x| vec![x as f32]).collect::<Vec<_>>()).unwrap();
    let i64_ = KServerInstance::new(s64, 2, Configuration::from([0, 2]), requests.clone()).unwrap();
    let i32_ = KServerInstance::new(s32, 2, Configuration::from([0, 2]), requests).unwrap();
    let t64 = wfa_run_kserver(&i64_);
    let t32 = wfa_run_kserver(&i32_);
    assert_eq!(t64.total_cost() as f32, t32.total_cost());
    let states64: Vec<_> = t64.rows.iter().map(|r| r.state.clone()).collect();
    let states32: Vec<_> = t32.rows.iter().map(|r| r.state.clone()).collect();
    assert_eq!(states64, states32);
    assert_eq!(opt_offline_kserver(&i64_).unwrap().0 as f32, opt_offline_kserver(&i32_).unwrap().0);
    let p = PhaseParams::for_kserver(2, 1.0f32);
    let phased = run_phased_kserver(&i32_, &p, &RunOptions::default()).unwrap();
    assert!(audit_condition1(&phased, &i32_, &p).unwrap().verdict());
}
