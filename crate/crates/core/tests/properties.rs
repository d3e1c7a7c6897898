use std::collections::BTreeSet;

use netdes_core::harness::{check_model, gen_instance, GenParams, GroupMode, Property, Verdict};
use netdes_core::{
    build_extended, build_language_automaton, build_lin, gamma, language_diff, language_equivalent, language_inclusion,
    move_dl, overall_move, standard_closed_loop, ChannelConfig, ChannelEntry, ChannelParams, Dfa, EventAlphabet,
    EventId, ExtendedState, Model, ModelFile, StateId, DEFAULT_STATE_CAP,
};
use proptest::prelude::*;

fn arb_dfa(events: usize, max_states: usize) -> impl Strategy<Value = Dfa> {
    (1..=max_states).prop_flat_map(move |n| {
        prop::collection::vec(prop::option::weighted(0.6, 0..n), n * events).prop_map(move |table| {
            let names: Vec<String> = (0..events).map(|i| format!("e{i}")).collect();
            let ab = EventAlphabet::new(&names, &[] as &[&str]).unwrap();
            let mut dfa = Dfa::new(ab, (0..n).map(|i| i.to_string()).collect(), StateId(0)).unwrap();
            for (i, t) in table.into_iter().enumerate() {
                if let Some(t) = t {
                    dfa.add_transition(StateId(i / events), EventId(i % events), StateId(t))
                        .unwrap();
                }
            }
            dfa
        })
    })
}

fn arb_model(mode: GroupMode) -> impl Strategy<Value = Model> {
    any::<u64>().prop_map(move |seed| {
        let p = GenParams {
            seed,
            group_mode: mode,
            ..GenParams::default()
        };
        gen_instance(&p).unwrap().validate().unwrap()
    })
}

fn arb_mode() -> impl Strategy<Value = GroupMode> {
    prop_oneof![
        Just(GroupMode::Singleton),
        Just(GroupMode::SinglePackage),
        Just(GroupMode::RandomPartition)
    ]
}

fn triples(ext: &netdes_core::ExtendedAutomaton, word: &[EventId]) -> BTreeSet<ExtendedState> {
    ext.states_after(word)
        .into_iter()
        .map(|i| ext.states()[i].clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn languages_are_prefix_closed(dfa in arb_dfa(3, 5)) {
        let words = dfa.enumerate_language(5);
        prop_assert!(words.contains(&Vec::new()));
        for w in &words {
            if let Some((_, prefix)) = w.split_last() {
                prop_assert!(words.contains(prefix));
            }
        }
    }

    #[test]
    fn completion_preserves_language(dfa in arb_dfa(3, 5)) {
        let full = dfa.complete();
        prop_assert!(full.is_total());
        for k in 0..6 {
            prop_assert_eq!(full.enumerate_language(k), dfa.enumerate_language(k));
        }
        prop_assert_eq!(full.complete().num_states(), full.num_states());
    }

    #[test]
    fn inclusion_agrees_with_bounded_diff(a in arb_dfa(2, 4), b in arb_dfa(2, 4)) {
        let bound = a.num_states() * (b.num_states() + 1);
        let diff = language_diff(&a, &b, bound).unwrap();
        let inc = language_inclusion(&a, &b).unwrap();
        prop_assert_eq!(inc.holds(), diff.is_empty());
        if let Some(w) = inc.witness() {
            prop_assert!(diff.contains(w));
            prop_assert_eq!(w.len(), diff.iter().map(Vec::len).min().unwrap());
        }
    }

    #[test]
    fn decisions_follow_supervisor_state(m in arb_model(GroupMode::Singleton)) {
        let sup = m.supervisor();
        let words = m.plant().enumerate_language(4);
        for w in &words {
            let x = sup.automaton().run(w).unwrap().unwrap();
            prop_assert_eq!(&sup.decision_after(w).unwrap(), sup.decision_at(x).unwrap());
        }
    }

    #[test]
    fn gamma_is_monotone(bits in prop::collection::vec(0u8..2, 0..5), extra in prop::collection::vec(0u8..2, 5)) {
        let names: Vec<String> = (0..bits.len()).map(|i| format!("c{i}")).collect();
        let ab = EventAlphabet::new(&[names.clone(), vec!["u".to_string()]].concat(), &names).unwrap();
        let a = netdes_core::DecisionVector::from_bits(&bits).unwrap();
        let up: Vec<u8> = bits.iter().zip(&extra).map(|(x, y)| x | y).collect();
        let b = netdes_core::DecisionVector::from_bits(&up).unwrap();
        prop_assert!(a.le_bitwise(&b));
        let ga: BTreeSet<_> = gamma(&a, &ab).into_iter().collect();
        let gb: BTreeSet<_> = gamma(&b, &ab).into_iter().collect();
        prop_assert!(ga.is_subset(&gb));
    }

    #[test]
    fn overall_move_is_a_product(m in arb_model(GroupMode::RandomPartition)) {
        let part = m.partition();
        let ext = build_extended(&m, DEFAULT_STATE_CAP).unwrap();
        for s in ext.states().iter().take(20) {
            for x in m.supervisor().automaton().states() {
                let full = m.supervisor().decision_at(x).unwrap();
                let outs = overall_move(&s.config, full, part).unwrap();
                let per_group: Vec<BTreeSet<_>> = part
                    .split(full)
                    .unwrap()
                    .iter()
                    .zip(&s.config.groups)
                    .zip(part.groups())
                    .map(|((g_gamma, g), grp)| move_dl(g, g_gamma, &grp.params).unwrap())
                    .collect();
                prop_assert_eq!(outs.len(), per_group.iter().map(BTreeSet::len).product::<usize>());
                for (i, expected) in per_group.iter().enumerate() {
                    let projected: BTreeSet<_> = outs.iter().map(|o| o.groups[i].clone()).collect();
                    prop_assert_eq!(&projected, expected);
                }
            }
        }
    }

    #[test]
    fn single_package_is_one_operator_call(m in arb_model(GroupMode::SinglePackage)) {
        prop_assume!(m.partition().len() == 1);
        let params = m.partition().groups()[0].params;
        let ext = build_extended(&m, DEFAULT_STATE_CAP).unwrap();
        for s in ext.states() {
            for x in m.supervisor().automaton().states() {
                let g = m.supervisor().decision_at(x).unwrap();
                let outs: BTreeSet<_> = overall_move(&s.config, g, m.partition())
                    .unwrap()
                    .into_iter()
                    .map(|c| c.groups[0].clone())
                    .collect();
                prop_assert_eq!(outs, move_dl(&s.config.groups[0], g, &params).unwrap());
            }
        }
    }

    /// Raising bounds never loses reachable configurations: every small-bound
    /// configuration, with its delay times shifted up by the increase, is
    /// reachable by the same string under the larger bounds.
    #[test]
    fn larger_bounds_reach_more(m in arb_model(GroupMode::RandomPartition), dd in 0u32..2, dl in 0u32..2) {
        let big = m.with_partition(
            m.partition().map_params(|p| ChannelParams::new(p.max_delay + dd, p.max_loss + dl)),
        );
        let small_ext = build_extended(&m, DEFAULT_STATE_CAP).unwrap();
        let big_ext = build_extended(&big, DEFAULT_STATE_CAP).unwrap();
        for w in build_language_automaton(&small_ext).enumerate_language(5) {
            let reached = triples(&big_ext, &w);
            for s in triples(&small_ext, &w) {
                let mut image = s.clone();
                for g in &mut image.config.groups {
                    g.channel = ChannelConfig::from_entries(
                        g.channel.entries().iter().map(|e| ChannelEntry::new(e.decision.clone(), e.remaining + dd)),
                    );
                }
                prop_assert!(reached.contains(&image), "after {:?}: {:?} missing", w, image);
            }
        }
    }

    #[test]
    fn channel_configs_are_bounded(m in arb_model(GroupMode::RandomPartition)) {
        let ext = build_extended(&m, DEFAULT_STATE_CAP).unwrap();
        for (i, grp) in m.partition().groups().iter().enumerate() {
            let domain = 1u64 << grp.events.len();
            let bound = (domain + 1).pow(grp.params.max_delay);
            let seen: BTreeSet<_> = ext.states().iter().map(|s| s.config.groups[i].channel.clone()).collect();
            prop_assert!(seen.len() as u64 <= bound);
        }
    }

    #[test]
    fn window_zero_is_standard_and_windows_grow(m in arb_model(GroupMode::SinglePackage)) {
        let standard = standard_closed_loop(&m).unwrap();
        let mut prev = build_lin(&m, 0).unwrap();
        prop_assert!(language_equivalent(&prev, &standard).unwrap());
        for n in 1..4 {
            let next = build_lin(&m, n).unwrap();
            prop_assert!(language_inclusion(&prev, &next).unwrap().holds());
            prev = next;
        }
    }

    #[test]
    fn every_suite_property_holds(m in (arb_mode()).prop_flat_map(arb_model)) {
        for (prop, verdict) in check_model(&m, 6, DEFAULT_STATE_CAP) {
            match verdict {
                Verdict::Fail(msg) => prop_assert!(false, "{}: {}", prop, msg),
                Verdict::Skip => prop_assert!(prop == Property::LinInclusion && m.partition().len() > 1),
                Verdict::Pass => {}
            }
        }
    }

    #[test]
    fn model_files_round_trip(m in (arb_mode()).prop_flat_map(arb_model)) {
        let file = ModelFile::from_model(&m);
        let back = netdes_core::parse_model(&file.to_json()).unwrap();
        prop_assert_eq!(back, m);
    }
}
