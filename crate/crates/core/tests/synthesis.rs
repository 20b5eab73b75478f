use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pomreal::cfsm::synthesize_system;
use pomreal::language::{check_cc2, check_cc3, check_language_terminating, language};
use pomreal::random::{seeded_family, RandomConfig};
use pomreal::system::{
    check_system_termination_aware, reachable, successors, system_language, Configuration,
    ExploreLimits,
};
use pomreal::{Participant, DEFAULT_BOUND};

const FAMILIES: u64 = 200;

#[test]
fn round_trip_and_deadlock_freedom() {
    let cfg = RandomConfig::default();
    let lim = ExploreLimits::default();
    let (mut cc2_count, mut cc3_count) = (0, 0);
    for i in 0..FAMILIES {
        let f = seeded_family(0xc0ffee, i, &cfg);
        let l = language(&f, DEFAULT_BOUND).unwrap();
        let s = synthesize_system(&l, f.participants());
        assert!(s.machines().values().all(|m| m.is_acyclic()));
        if !check_cc2(&l, DEFAULT_BOUND).unwrap().holds() {
            continue;
        }
        cc2_count += 1;
        assert_eq!(system_language(&s, &lim, DEFAULT_BOUND).unwrap(), l, "{f:?}");
        if !check_cc3(&l, DEFAULT_BOUND).unwrap().holds() {
            continue;
        }
        cc3_count += 1;
        assert!(reachable(&s, &lim).unwrap().deadlocks().is_empty(), "{f:?}");
        for a in f.participants() {
            let p: BTreeSet<Participant> = [a.clone()].into();
            if check_language_terminating(&l, &p).holds() {
                assert!(check_system_termination_aware(&s, &p, &lim).unwrap().holds(), "{f:?}");
            }
        }
    }
    assert!(cc2_count > 0 && cc3_count > 0);
}

#[test]
fn buffers_count_pending_messages() {
    let cfg = RandomConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..FAMILIES {
        let f = seeded_family(0xbeef, i, &cfg);
        let l = language(&f, DEFAULT_BOUND).unwrap();
        let s = synthesize_system(&l, f.participants());
        let mut c = Configuration::initial(&s);
        let mut trace = Vec::new();
        while let Some((label, next)) = successors(&s, &c).choose(&mut rng).cloned() {
            trace.push(label);
            c = next;
            for t in &trace {
                let sent = trace.iter().filter(|u| u.is_output() && u.channel() == t.channel() && u.message == t.message).count();
                let got = trace.iter().filter(|u| u.is_input() && u.channel() == t.channel() && u.message == t.message).count();
                assert!(sent >= got);
                assert_eq!(c.buffer_count(&t.channel(), &t.message), sent - got);
            }
        }
    }
}
