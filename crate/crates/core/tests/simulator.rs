mod common;

use idgap_core::identity::activation_sequence;
use idgap_core::metrics::persistence;
use idgap_core::simulator::{
    capacity_limited, probe_identity, probe_script, probe_window, run, Action, PresetKind, Trajectory,
};
use proptest::prelude::*;

fn action() -> impl Strategy<Value = Action> {
    let token = prop_oneof![
        Just("Alice".to_string()),
        Just("analyst".to_string()),
        Just("privacy".to_string()),
        "[a-z]{1,4}",
    ];
    prop_oneof![
        proptest::collection::vec(token, 1..6).prop_map(Action::Infer),
        prop_oneof![Just("name"), Just("role"), Just("constraint"), Just("weather")].prop_map(Action::retrieve),
        (prop_oneof![Just("role"), Just("constraint")], "[a-z]{1,6}").prop_map(|(k, v)| Action::store(k, v)),
        prop_oneof![Just("set_flag"), Just("clear_flag"), Just("respond")].prop_map(|n| Action::tool(n, &["0"])),
    ]
}

fn scores(kind: PresetKind, turns: usize) -> (f64, f64) {
    let preset = kind.preset();
    let traj = Trajectory::simulate(&preset, &probe_script(turns), preset.initial_state().unwrap()).unwrap();
    let id = probe_identity();
    let acts = activation_sequence(&traj.states, &id, &traj.architecture).unwrap();
    let r = persistence(&acts, &id, &probe_window(acts.len()).unwrap()).unwrap();
    (r.p_weak, r.p_strong)
}

proptest! {
    #[test]
    fn presets_respect_capacity_and_pinning(script in proptest::collection::vec(action(), 1..40)) {
        for kind in PresetKind::ALL {
            let preset = kind.preset();
            let states = run(&preset, &script, preset.initial_state().unwrap()).unwrap();
            prop_assert_eq!(states.len(), script.len() + 1);
            for (u, s) in states.iter().enumerate() {
                prop_assert_eq!(s.step, u);
                prop_assert!(s.context.len() <= preset.context_capacity);
                prop_assert!(s.context.starts_with(&preset.pinned_prefix));
                prop_assert_eq!(s.policy_flags.len(), preset.n_policy_flags);
                if kind != PresetKind::Controller {
                    prop_assert!(s.policy_flags.iter().all(|f| !f));
                }
                if matches!(kind, PresetKind::Stateless | PresetKind::Prompted | PresetKind::Rag) {
                    prop_assert!(s.memory.is_empty());
                }
            }
            prop_assert_eq!(run(&preset, &script, preset.initial_state().unwrap()).unwrap(), states);
        }
    }

    #[test]
    fn weak_persistence_ordering_across_presets(turns in 1usize..16) {
        let all: Vec<(f64, f64)> = PresetKind::ALL.iter().map(|&k| scores(k, turns)).collect();
        for w in all.windows(2) {
            prop_assert!(w[0].0 <= w[1].0, "{:?}", all);
        }
        let controller = all[4].1;
        prop_assert!(all.iter().all(|s| s.1 <= controller));
        prop_assert!(all.iter().all(|s| s.1 <= s.0));
    }

    #[test]
    fn capacity_scenarios_never_coinstantiate(k in 2usize..=6, c_off in 1usize..=5, length in 2usize..60) {
        prop_assume!(c_off < k && length > c_off);
        let c = k - c_off;
        let s = capacity_limited(c, k, length).unwrap();
        let acts = s.activations().unwrap();
        prop_assert!(acts.iter().all(|f| f.len() <= c));
        if !s.window.eval_indices.is_empty() {
            prop_assert_eq!(persistence(&acts, &s.identity, &s.window).unwrap().p_strong, 0.0);
        }
    }
}

#[test]
fn long_query_evicts_context_ingredient() {
    let preset = PresetKind::Prompted.preset();
    let initial = preset.initial_state().unwrap();
    let id = probe_identity();
    let before = activation_sequence(std::slice::from_ref(&initial), &id, &preset.architecture()).unwrap();
    assert!(before[0].is_full(3));
    // Pinned `Alice`, preamble `analyst privacy`, one filler: 4 of 8 tokens used.
    let script = [Action::infer(["hello"]), Action::infer(["q1", "q2", "q3", "q4", "q5"])];
    let states = run(&preset, &script, initial).unwrap();
    let after = activation_sequence(&states, &id, &preset.architecture()).unwrap();
    assert!(after[1].is_full(3));
    assert!(after[2].active.contains(0), "pinned name survives");
    assert!(!after[2].active.contains(1), "role is evicted");
    assert!(after[2].active.contains(2));
}

#[test]
fn probe_table_values() {
    let table: Vec<(&str, (f64, f64))> = PresetKind::ALL.iter().map(|&k| (k.name(), scores(k, 8))).collect();
    let get = |name: &str| table.iter().find(|(n, _)| *n == name).unwrap().1;
    assert_eq!(get("stateless"), (0.0, 0.0));
    assert!(get("prompted").0 < 1.0);
    assert_eq!(get("memory"), (1.0, 1.0));
    assert_eq!(get("controller"), (1.0, 1.0));
    assert!(get("rag").1 < get("rag").0);
}
