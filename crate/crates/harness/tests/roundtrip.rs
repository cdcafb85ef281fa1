use boundedwfa::experiment::{run_experiment, Algorithm, ExperimentParams, Summary, Trace};
use boundedwfa::generate::{generate, GenKind, GenSpec};
use boundedwfa::instance::{load_instance, Instance, InstanceDoc};
use boundedwfa::trace_csv::{read_trace, TraceFile};
use boundedwfa_core::Configuration;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = GenKind> {
    prop::sample::select(vec![GenKind::MtsRandom, GenKind::KServerGrid, GenKind::KServerClustered])
}

fn summary_of(bytes: &[u8], instance: &Instance) -> Summary {
    match instance {
        Instance::Mts(_) => {
            let f: TraceFile<usize> = read_trace(bytes).unwrap();
            Summary::from_trace(&f.meta, &f.trace, None)
        }
        Instance::KServer(_) => {
            let f: TraceFile<Configuration> = read_trace(bytes).unwrap();
            Summary::from_trace(&f.meta, &f.trace, None)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn generated_documents_load(kind in kind(), size in 1usize..20, k in 1usize..4, n in 0usize..50, seed: u64,
                                avoid in any::<bool>(), expanding in any::<bool>()) {
        let spec = GenSpec { avoid_recent: avoid && size > k, expanding, ..GenSpec::new(kind, size, k, n, seed) };
        let doc = generate(&spec);
        let inst = load_instance(&doc.to_json()).unwrap();
        prop_assert_eq!(inst.request_count(), n);
        prop_assert_eq!(InstanceDoc::parse(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn traces_reproduce_their_summary(kind in kind(), size in 2usize..12, n in 0usize..80, seed: u64,
                                      alg in prop::sample::select(vec![Algorithm::WfaFull, Algorithm::WfaBounded, Algorithm::Opt])) {
        let doc = generate(&GenSpec::new(kind, size, 2, n, seed));
        let inst = doc.build().unwrap();
        let params = ExperimentParams { epsilon: 2.0, compute_opt: false, ..Default::default() };
        let mut buf = Vec::new();
        let e = run_experiment(&inst, &doc.fingerprint(), alg, &params, Some(&mut buf)).unwrap();
        let back = summary_of(&buf, &inst);
        let mut expected = e.summary.clone();
        expected.opt_cost = None;
        expected.ratio = None;
        // Costs are printed with nine significant digits; everything derived
        // from them renders identically.
        prop_assert_eq!(back.render(), expected.render());
        if matches!(kind, GenKind::MtsRandom) {
            prop_assert_eq!(back, expected);
        }
        let rows = match &e.trace { Trace::Mts(t) => t.rows.len(), Trace::KServer(t) => t.rows.len() };
        prop_assert_eq!(rows, n);
    }
}
