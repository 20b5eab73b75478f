//! Seeded generation of small well-formed, complete pomsets and families.
//!
//! Members of a family draw their messages from a shared pool so that
//! projections of different members can be recombined.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::family::PomsetFamily;
use crate::label::CommLabel;
use crate::pomset::{Event, EventId, Pomset};
use crate::wellformed::{is_complete, is_well_formed};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomConfig {
    pub max_members: usize,
    /// Upper bound on events per member; events come in output/input pairs.
    pub max_events: usize,
    pub max_participants: usize,
    pub messages: usize,
    /// Probability of ordering two events of the same participant.
    pub order_probability: f64,
    /// Attempts per pomset before falling back to a single exchange.
    pub attempts: usize,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            max_members: 3,
            max_events: 8,
            max_participants: 4,
            messages: 2,
            order_probability: 0.6,
            attempts: 64,
        }
    }
}

const NAMES: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];
const MESSAGES: [&str; 8] = ["x", "y", "z", "w", "u", "v", "s", "t"];

/// One exchange: sender, receiver, message.
type Exchange = (usize, usize, usize);

fn pool<R: Rng>(rng: &mut R, cfg: &RandomConfig) -> Vec<Exchange> {
    let parts = rng.gen_range(2..=cfg.max_participants.clamp(2, NAMES.len()));
    let msgs = cfg.messages.clamp(1, MESSAGES.len());
    let size = rng.gen_range(1..=(cfg.max_events / 2).max(1));
    (0..size)
        .map(|_| {
            let s = rng.gen_range(0..parts);
            let mut r = rng.gen_range(0..parts - 1);
            if r >= s {
                r += 1;
            }
            (s, r, rng.gen_range(0..msgs))
        })
        .collect()
}

/// Pairs each exchange into an output and an input, interleaves them at
/// random and orders same-participant events along that interleaving.
fn build<R: Rng>(rng: &mut R, exchanges: &[Exchange], p: f64) -> Option<Pomset> {
    let mut events = Vec::new();
    let mut edges = Vec::new();
    for (k, &(s, r, m)) in exchanges.iter().enumerate() {
        let (s, r, m) = (NAMES[s], NAMES[r], MESSAGES[m]);
        events.push(Event {
            id: EventId::new(format!("o{k}")),
            label: CommLabel::output(s, r, m),
        });
        events.push(Event {
            id: EventId::new(format!("i{k}")),
            label: CommLabel::input(s, r, m),
        });
        edges.push((2 * k, 2 * k + 1));
    }
    // random linear order in which every output precedes its input
    let mut order: Vec<usize> = Vec::new();
    let mut pending: Vec<usize> = (0..exchanges.len()).map(|k| 2 * k).collect();
    while !pending.is_empty() {
        let pick = rng.gen_range(0..pending.len());
        let e = pending.swap_remove(pick);
        order.push(e);
        if e.is_multiple_of(2) {
            pending.push(e + 1);
        }
    }
    for (x, &a) in order.iter().enumerate() {
        for &b in &order[x + 1..] {
            if events[a].label.subject() == events[b].label.subject() && rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    let r = Pomset::from_indexed(events, edges).ok()?;
    (is_well_formed(&r).holds() && is_complete(&r)).then_some(r)
}

fn member<R: Rng>(rng: &mut R, exchanges: &[Exchange], cfg: &RandomConfig) -> Pomset {
    for _ in 0..cfg.attempts {
        let mut chosen: Vec<Exchange> = exchanges
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.75))
            .collect();
        if chosen.is_empty() {
            chosen.push(*exchanges.choose(rng).expect("pool is non-empty"));
        }
        if let Some(r) = build(rng, &chosen, cfg.order_probability) {
            return r;
        }
    }
    build(rng, &exchanges[..1], 1.0).expect("a single exchange is well-formed")
}

/// A well-formed, complete pomset.
pub fn random_pomset<R: Rng>(rng: &mut R, cfg: &RandomConfig) -> Pomset {
    let exchanges = pool(rng, cfg);
    member(rng, &exchanges, cfg)
}

/// A family of 1 to `max_members` well-formed, complete pomsets over a
/// shared pool of exchanges.
pub fn random_family<R: Rng>(rng: &mut R, cfg: &RandomConfig) -> PomsetFamily {
    let exchanges = pool(rng, cfg);
    let n = rng.gen_range(1..=cfg.max_members.max(1));
    PomsetFamily::from_pomsets((0..n).map(|_| member(rng, &exchanges, cfg)))
}

/// A less permissive variant of `r`: adds each pair of a random linear
/// extension to the order with probability `p`.
pub fn random_refinement<R: Rng>(rng: &mut R, r: &Pomset, p: f64) -> Pomset {
    let mut placed = FixedBitSet::with_capacity(r.len());
    let mut ext = Vec::with_capacity(r.len());
    while ext.len() < r.len() {
        let ready: Vec<usize> = (0..r.len())
            .filter(|&i| !placed.contains(i) && r.below(i).is_subset(&placed))
            .collect();
        let e = *ready.choose(rng).expect("a partial order has a minimal element");
        placed.insert(e);
        ext.push(e);
    }
    let mut edges = r.order_pairs();
    for (x, &a) in ext.iter().enumerate() {
        for &b in &ext[x + 1..] {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Pomset::from_indexed(r.events().to_vec(), edges).expect("edges follow a linear extension")
}

/// The `index`-th family of the stream seeded with `seed`.
pub fn seeded_family(seed: u64, index: u64, cfg: &RandomConfig) -> PomsetFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    random_family(&mut rng, cfg)
}
