//! Running a selection of checks on a document and rendering the results.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::OnceLock;
use std::thread;

use serde::{Deserialize, Serialize};

use pomreal::ccp::{check_ccp2, check_ccp3, CcpReport};
use pomreal::cfsm::{synthesize_family_system, CommSystem};
use pomreal::language::{
    check_cc2_family, check_cc3_family, check_language_terminating, count_words, language, Language, Word,
};
use pomreal::system::{check_system_termination_aware, reachable, ConfigGraph, ExploreLimits};
use pomreal::termination::check_pomset_terminating;
use pomreal::{is_complete, is_msc, is_well_formed, BoundExceeded, Participant, PomsetFamily, Verdict};

use crate::dot::pomset_dot;
use crate::spec_doc::{raw_pomset, RawPomset, SpecDocument};

/// Which checks to run. Participant lists select `P′` for the
/// termination checks; an absent list skips the check.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(default, deny_unknown_fields)]
pub struct CheckProfile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub well_formed: bool,
    pub ccp2: bool,
    pub ccp3: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminating: Option<Vec<String>>,
    pub oracle_cc2: bool,
    pub oracle_cc3: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_terminating: Option<Vec<String>>,
    pub deadlocks: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system_terminating: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
}

impl CheckProfile {
    /// Well-formedness plus both pomset-level closure conditions.
    pub fn standard() -> Self {
        CheckProfile {
            well_formed: true,
            ccp2: true,
            ccp3: true,
            ..Default::default()
        }
    }

    pub fn mentioned_participants(&self) -> impl Iterator<Item = &String> {
        [&self.terminating, &self.oracle_terminating, &self.system_terminating]
            .into_iter()
            .flatten()
            .flatten()
    }

    pub fn is_empty(&self) -> bool {
        let named = CheckProfile {
            name: self.name.clone(),
            bound: self.bound,
            ..Default::default()
        };
        *self == named
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    BoundExceeded,
}

impl Status {
    fn text(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Fails => "FAILS",
            Status::BoundExceeded => "BOUND",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessView {
    IllFormed {
        pomset: String,
        violations: Vec<String>,
    },
    Closure {
        tuple: Vec<(String, String)>,
        matches: Vec<(String, String)>,
        pomset: RawPomset,
        dot: String,
        /// Further non-isomorphic violations.
        others: usize,
    },
    PomsetTermination {
        participant: String,
        r: String,
        r_prime: String,
        injection: Vec<(String, String)>,
        blocking_event: String,
        blocking_label: String,
    },
    Word {
        word: String,
        labels: Vec<String>,
    },
    LanguageTermination {
        participant: String,
        word: String,
        longer_word: String,
        next: String,
    },
    Configuration {
        configuration: String,
        trace: String,
        participant: Option<String>,
        pending: Option<String>,
    },
}

impl WitnessView {
    fn lines(&self) -> Vec<String> {
        match self {
            WitnessView::IllFormed { pomset, violations } => violations
                .iter()
                .map(|v| format!("pomset {pomset}: {v}"))
                .collect(),
            WitnessView::Closure {
                tuple,
                matches,
                pomset,
                others,
                ..
            } => {
                let mut out: Vec<String> = tuple
                    .iter()
                    .map(|(a, m)| format!("local of {a} from {m}"))
                    .collect();
                let events: Vec<String> = pomset
                    .events
                    .iter()
                    .map(|e| format!("{}:{}{}{}{}", e.id, e.from, e.to, e.dir.symbol(), e.msg))
                    .collect();
                out.push(format!("events  {}", events.join(", ")));
                let order: Vec<String> = pomset.order.iter().map(|(a, b)| format!("{a}<{b}")).collect();
                out.push(format!("order   {}", order.join(", ")));
                let ms: Vec<String> = matches.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                out.push(format!("matches {}", ms.join(", ")));
                if *others > 0 {
                    out.push(format!("{others} further violation(s)"));
                }
                out
            }
            WitnessView::PomsetTermination {
                participant,
                r,
                r_prime,
                injection,
                blocking_event,
                blocking_label,
            } => {
                let inj: Vec<String> = injection.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                vec![
                    format!("participant {participant}, {r} into {r_prime}"),
                    format!("injection {{{}}}", inj.join(", ")),
                    format!("blocked on {blocking_event}:{blocking_label}"),
                ]
            }
            WitnessView::Word { word, .. } => vec![format!("word {word}")],
            WitnessView::LanguageTermination {
                participant,
                word,
                longer_word,
                next,
            } => vec![
                format!("participant {participant} may stop after {word}"),
                format!("but {longer_word} continues with {next}"),
            ],
            WitnessView::Configuration {
                configuration,
                trace,
                participant,
                pending,
            } => {
                let mut out = vec![format!("reached {configuration}"), format!("via {trace}")];
                if let (Some(a), Some(p)) = (participant, pending) {
                    out.push(format!("{a} accepting with input {p} enabled"));
                }
                out
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub status: Status,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessView>,
    pub counters: BTreeMap<String, u128>,
}

impl CheckOutcome {
    fn new(check: &str, status: Status, summary: impl Into<String>) -> Self {
        CheckOutcome {
            check: check.to_string(),
            status,
            summary: summary.into(),
            witness: None,
            counters: BTreeMap::new(),
        }
    }

    fn bound(check: &str, e: &BoundExceeded) -> Self {
        CheckOutcome::new(check, Status::BoundExceeded, e.to_string())
    }

    fn counter(mut self, k: &str, v: impl Into<u128>) -> Self {
        self.counters.insert(k.to_string(), v.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub status: Status,
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    fn new(checks: Vec<CheckOutcome>) -> Self {
        let status = if checks.iter().any(|c| c.status == Status::Fails) {
            Status::Fails
        } else if checks.iter().any(|c| c.status == Status::BoundExceeded) {
            Status::BoundExceeded
        } else {
            Status::Holds
        };
        Report { status, checks }
    }

    pub fn get(&self, check: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.check == check)
    }

    /// 0 all hold, 1 some check fails, 3 a bound was hit (and nothing failed).
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Holds => 0,
            Status::Fails => 1,
            Status::BoundExceeded => 3,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_text(&self, verbose: bool) -> String {
        let w = self.checks.iter().map(|c| c.check.len()).max().unwrap_or(5).max(5);
        let mut out = format!("{:<w$}  {:<6}  summary\n", "check", "status");
        for c in &self.checks {
            writeln!(out, "{:<w$}  {:<6}  {}", c.check, c.status.text(), c.summary).unwrap();
        }
        if verbose {
            for c in &self.checks {
                if c.witness.is_none() && c.counters.is_empty() {
                    continue;
                }
                writeln!(out, "\n[{}]", c.check).unwrap();
                if let Some(wv) = &c.witness {
                    for line in wv.lines() {
                        writeln!(out, "  {line}").unwrap();
                    }
                }
                for (k, v) in &c.counters {
                    writeln!(out, "  {k} = {v}").unwrap();
                }
            }
        }
        out
    }
}

fn participants(names: &[String]) -> BTreeSet<Participant> {
    names.iter().map(Participant::new).collect()
}

fn set_text(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

fn word_view(w: &Word) -> WitnessView {
    WitnessView::Word {
        word: w.to_string(),
        labels: w.iter().map(|l| l.to_string()).collect(),
    }
}

fn well_formed_check(f: &PomsetFamily) -> CheckOutcome {
    let mut bad = None;
    let (mut complete, mut mscs) = (0u32, 0u32);
    for m in f.members() {
        let wf = is_well_formed(&m.pomset);
        if !wf.holds() && bad.is_none() {
            bad = Some(WitnessView::IllFormed {
                pomset: m.name.clone(),
                violations: wf.violations.iter().map(|v| v.describe(&m.pomset)).collect(),
            });
        }
        complete += is_complete(&m.pomset) as u32;
        mscs += is_msc(&m.pomset) as u32;
    }
    let n = f.len();
    let summary = format!("{n} pomset(s), {complete} complete, {mscs} MSC(s)");
    let mut out = match bad {
        None => CheckOutcome::new("well-formed", Status::Holds, summary),
        Some(w) => {
            let mut o = CheckOutcome::new("well-formed", Status::Fails, summary);
            o.witness = Some(w);
            o
        }
    };
    out = out
        .counter("pomsets", n as u128)
        .counter("complete", complete)
        .counter("mscs", mscs);
    out
}

fn ccp_check(name: &str, result: Result<CcpReport, BoundExceeded>) -> CheckOutcome {
    let r = match result {
        Ok(r) => r,
        Err(e) => return CheckOutcome::bound(name, &e),
    };
    let s = r.stats;
    let mut out = match r.verdict.witness() {
        None => CheckOutcome::new(name, Status::Holds, format!("{} tuple(s) closed", s.tuples)),
        Some(w) => {
            let mut o = CheckOutcome::new(
                name,
                Status::Fails,
                format!(
                    "{} closure pomset(s) without a dominating pomset; first has {} events",
                    r.violations.len(),
                    w.closure.pomset.len()
                ),
            );
            o.witness = Some(WitnessView::Closure {
                tuple: w
                    .tuple
                    .iter()
                    .map(|t| (t.participant.to_string(), t.member.clone()))
                    .collect(),
                matches: w
                    .closure
                    .matches
                    .iter()
                    .map(|(a, b)| (a.to_string(), b.to_string()))
                    .collect(),
                pomset: raw_pomset("witness", &w.closure.pomset),
                dot: pomset_dot(&w.closure.pomset, "witness"),
                others: r.violations.len() - 1,
            });
            o
        }
    };
    out = out
        .counter("tuples", s.tuples as u128)
        .counter("closure_pomsets", s.closure_pomsets as u128)
        .counter("matchings_tried", s.matchings_tried as u128)
        .counter("max_closure_size", s.max_closure_size as u128)
        .counter("dominance_checks", s.dominance_checks as u128)
        .counter("search_nodes", s.search.nodes as u128)
        .counter("branch_points", s.search.branch_points as u128)
        .counter("violations", r.violations.len() as u128);
    out
}

fn terminating_check(f: &PomsetFamily, p: &[String], bound: usize) -> CheckOutcome {
    let name = format!("terminating {}", set_text(p));
    match check_pomset_terminating(f, &participants(p), bound) {
        Err(e) => CheckOutcome::bound(&name, &e),
        Ok(Verdict::Holds) => CheckOutcome::new(&name, Status::Holds, "no participant can be left waiting"),
        Ok(Verdict::Fails(w)) => {
            let mut o = CheckOutcome::new(
                &name,
                Status::Fails,
                format!("{} may wait for {}", w.participant, w.blocking_label),
            );
            o.witness = Some(WitnessView::PomsetTermination {
                participant: w.participant.to_string(),
                r: w.r.clone(),
                r_prime: w.r_prime.clone(),
                injection: w
                    .injection
                    .iter()
                    .map(|(a, b)| (a.to_string(), b.to_string()))
                    .collect(),
                blocking_event: w.blocking_event.to_string(),
                blocking_label: w.blocking_label.to_string(),
            });
            o
        }
    }
}

fn oracle_check(name: &str, verdict: Result<Verdict<Word>, BoundExceeded>, words: Option<u128>) -> CheckOutcome {
    let mut out = match verdict {
        Err(e) => return CheckOutcome::bound(name, &e),
        Ok(Verdict::Holds) => CheckOutcome::new(name, Status::Holds, "language is closed"),
        Ok(Verdict::Fails(w)) => {
            let mut o = CheckOutcome::new(name, Status::Fails, format!("implied word {w}"));
            o.witness = Some(word_view(&w));
            o
        }
    };
    if let Some(n) = words {
        out = out.counter("words", n);
    }
    out
}

/// Lazily computed language and synthesized system, shared by checks.
struct Shared<'a> {
    family: &'a PomsetFamily,
    bound: usize,
    language: OnceLock<Result<Language, BoundExceeded>>,
    system: OnceLock<Result<(CommSystem, ConfigGraph), BoundExceeded>>,
}

impl Shared<'_> {
    fn language(&self) -> Result<&Language, BoundExceeded> {
        self.language
            .get_or_init(|| language(self.family, self.bound))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn limits(&self) -> ExploreLimits {
        ExploreLimits {
            max_configurations: self.bound,
            ..ExploreLimits::default()
        }
    }

    fn system(&self) -> Result<&(CommSystem, ConfigGraph), BoundExceeded> {
        self.system
            .get_or_init(|| {
                let s = synthesize_family_system(self.family, self.bound)?;
                let g = reachable(&s, &self.limits())?;
                Ok((s, g))
            })
            .as_ref()
            .map_err(Clone::clone)
    }
}

type Job<'a> = Box<dyn Fn() -> CheckOutcome + Send + Sync + 'a>;

fn jobs<'a>(shared: &'a Shared<'a>, profile: &'a CheckProfile) -> Vec<Job<'a>> {
    let f = shared.family;
    let bound = shared.bound;
    let mut jobs: Vec<Job<'a>> = Vec::new();
    if profile.well_formed {
        jobs.push(Box::new(move || well_formed_check(f)));
    }
    if profile.ccp2 {
        jobs.push(Box::new(move || ccp_check("ccp2", check_ccp2(f, bound))));
    }
    if profile.ccp3 {
        jobs.push(Box::new(move || ccp_check("ccp3", check_ccp3(f, bound))));
    }
    if let Some(p) = &profile.terminating {
        jobs.push(Box::new(move || terminating_check(f, p, bound)));
    }
    if profile.oracle_cc2 {
        jobs.push(Box::new(move || {
            oracle_check("oracle cc2", check_cc2_family(f, bound), count_words(f, bound).ok())
        }));
    }
    if profile.oracle_cc3 {
        jobs.push(Box::new(move || {
            oracle_check("oracle cc3", check_cc3_family(f, bound), count_words(f, bound).ok())
        }));
    }
    if let Some(p) = &profile.oracle_terminating {
        jobs.push(Box::new(move || {
            let name = format!("oracle terminating {}", set_text(p));
            let l = match shared.language() {
                Ok(l) => l,
                Err(e) => return CheckOutcome::bound(&name, &e),
            };
            match check_language_terminating(l, &participants(p)) {
                Verdict::Holds => CheckOutcome::new(&name, Status::Holds, "no participant can be left waiting"),
                Verdict::Fails(w) => {
                    let mut o = CheckOutcome::new(
                        &name,
                        Status::Fails,
                        format!("{} may wait for {}", w.participant, w.next),
                    );
                    o.witness = Some(WitnessView::LanguageTermination {
                        participant: w.participant.to_string(),
                        word: w.word.to_string(),
                        longer_word: w.longer_word.to_string(),
                        next: w.next.to_string(),
                    });
                    o
                }
            }
        }));
    }
    if profile.deadlocks {
        jobs.push(Box::new(move || {
            let name = "deadlock-free";
            let (_, g) = match shared.system() {
                Ok(x) => x,
                Err(e) => return CheckOutcome::bound(name, &e),
            };
            let dead = g.deadlocks();
            let mut o = match dead.first() {
                None => CheckOutcome::new(name, Status::Holds, format!("{} configuration(s)", g.len())),
                Some(&i) => {
                    let mut o = CheckOutcome::new(
                        name,
                        Status::Fails,
                        format!("{} of {} configuration(s) cannot terminate", dead.len(), g.len()),
                    );
                    o.witness = Some(WitnessView::Configuration {
                        configuration: g.nodes[i].to_string(),
                        trace: g.trace_to(i).to_string(),
                        participant: None,
                        pending: None,
                    });
                    o
                }
            };
            o = o
                .counter("configurations", g.len() as u128)
                .counter("accepting", g.accepting_count() as u128)
                .counter("deadlocks", dead.len() as u128);
            o
        }));
    }
    if let Some(p) = &profile.system_terminating {
        jobs.push(Box::new(move || {
            let name = format!("system terminating {}", set_text(p));
            let s = match shared.system() {
                Ok((s, _)) => s,
                Err(e) => return CheckOutcome::bound(&name, &e),
            };
            match check_system_termination_aware(s, &participants(p), &shared.limits()) {
                Err(e) => CheckOutcome::bound(&name, &e),
                Ok(Verdict::Holds) => {
                    CheckOutcome::new(&name, Status::Holds, "no accepting state with a pending input")
                }
                Ok(Verdict::Fails(w)) => {
                    let mut o = CheckOutcome::new(
                        &name,
                        Status::Fails,
                        format!("{} accepting with {} enabled", w.participant, w.pending),
                    );
                    o.witness = Some(WitnessView::Configuration {
                        configuration: w.configuration.to_string(),
                        trace: w.trace.to_string(),
                        participant: Some(w.participant.to_string()),
                        pending: Some(w.pending.to_string()),
                    });
                    o
                }
            }
        }));
    }
    jobs
}

/// Runs the profile's checks in a fixed order. With `parallel`, each check
/// runs on its own thread; the report is identical either way.
pub fn run_checks(doc: &SpecDocument, profile: &CheckProfile, default_bound: usize, parallel: bool) -> Report {
    let shared = Shared {
        family: &doc.family,
        bound: profile.bound.unwrap_or(default_bound),
        language: OnceLock::new(),
        system: OnceLock::new(),
    };
    let jobs = jobs(&shared, profile);
    let outcomes = if parallel {
        thread::scope(|s| {
            let handles: Vec<_> = jobs.iter().map(|j| s.spawn(j)).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("check panicked"))
                .collect()
        })
    } else {
        jobs.iter().map(|j| j()).collect()
    };
    Report::new(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_doc::parse_spec_str;

    const CHOICE: &str = r#"{
        "participants": ["A", "B"],
        "messages": ["x", "y"],
        "pomsets": [
            {"name": "short", "events": [
                {"id": "a", "from": "A", "to": "B", "dir": "!", "msg": "x"},
                {"id": "b", "from": "A", "to": "B", "dir": "?", "msg": "x"}],
             "order": [["a", "b"]]},
            {"name": "long", "events": [
                {"id": "a", "from": "A", "to": "B", "dir": "!", "msg": "x"},
                {"id": "b", "from": "A", "to": "B", "dir": "?", "msg": "x"},
                {"id": "c", "from": "A", "to": "B", "dir": "!", "msg": "y"},
                {"id": "d", "from": "A", "to": "B", "dir": "?", "msg": "y"}],
             "order": [["a", "b"], ["a", "c"], ["c", "d"], ["b", "d"]]}
        ]
    }"#;

    fn everything() -> CheckProfile {
        CheckProfile {
            oracle_cc2: true,
            oracle_cc3: true,
            terminating: Some(vec!["A".into(), "B".into()]),
            oracle_terminating: Some(vec!["B".into()]),
            deadlocks: true,
            system_terminating: Some(vec!["B".into()]),
            ..CheckProfile::standard()
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let doc = parse_spec_str(CHOICE).unwrap();
        let a = run_checks(&doc, &everything(), 10_000, false);
        let b = run_checks(&doc, &everything(), 10_000, true);
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.status, Status::Fails);
        assert_eq!(a.exit_code(), 1);
        assert_eq!(a.get("terminating {A,B}").unwrap().status, Status::Fails);
        assert_eq!(a.get("oracle terminating {B}").unwrap().status, Status::Fails);
        assert_eq!(a.get("system terminating {B}").unwrap().status, Status::Fails);
        assert_eq!(a.get("oracle cc2").unwrap().status, Status::Holds);
    }

    #[test]
    fn text_and_json_agree_on_verdicts() {
        let doc = parse_spec_str(CHOICE).unwrap();
        let r = run_checks(&doc, &everything(), 10_000, false);
        let text = r.to_text(true);
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for (c, j) in r.checks.iter().zip(json["checks"].as_array().unwrap()) {
            let line = text.lines().find(|l| l.starts_with(&c.check)).unwrap();
            let expected = if j["status"] == "holds" { "holds" } else { "FAILS" };
            assert!(line.contains(expected), "{line}");
        }
    }

    #[test]
    fn bound_is_reported_distinctly() {
        let doc = parse_spec_str(CHOICE).unwrap();
        let p = CheckProfile {
            ccp3: true,
            bound: Some(1),
            ..Default::default()
        };
        let r = run_checks(&doc, &p, 10_000, false);
        assert_eq!(r.status, Status::BoundExceeded);
        assert_eq!(r.exit_code(), 3);
    }
}
