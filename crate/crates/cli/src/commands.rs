//! Command-line definition and dispatch.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use pomreal::cfsm::synthesize_family_system;
use pomreal::language::{count_words, language};
use pomreal::system::{check_system_termination_aware, reachable, ExploreLimits};
use pomreal::{is_complete, is_msc, is_well_formed, BoundExceeded, Participant, DEFAULT_BOUND};

use crate::dot::{cfsm_dot, configurations_dot, pomset_dot};
use crate::report::{run_checks, CheckProfile};
use crate::spec_doc::{parse_spec, SpecDocument, SpecError};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BOUND: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Bound(#[from] BoundExceeded),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Bound(_) => EXIT_BOUND,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pomreal", version, about = "Realisability checks for pomset choreographies")]
pub struct Cli {
    /// Resource bound on enumerated objects.
    #[arg(long, global = true, env = "POMREAL_BOUND", default_value_t = DEFAULT_BOUND)]
    pub bound: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a specification and report well-formedness of each pomset.
    Validate { file: PathBuf },
    /// Print the projection of one pomset on one participant.
    Project {
        file: PathBuf,
        #[arg(long)]
        pomset: String,
        #[arg(long)]
        participant: String,
        #[arg(long)]
        dot: bool,
    },
    /// Print the words of the family's language.
    Lang {
        file: PathBuf,
        /// Print only the number of words.
        #[arg(long)]
        count: bool,
    },
    /// Run realisability and termination checks.
    Check(CheckArgs),
    /// Build the prefix-tree machine of every participant.
    Synthesize {
        file: PathBuf,
        /// Directory receiving one DOT file per machine.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print machines as DOT instead of text.
        #[arg(long)]
        dot: bool,
    },
    /// Explore the configurations of the synthesized system.
    Simulate {
        file: PathBuf,
        /// List configurations from which no accepting one is reachable.
        #[arg(long)]
        deadlocks: bool,
        #[arg(long, value_delimiter = ',')]
        system_terminating: Option<Vec<String>>,
        /// Write the configuration graph as DOT to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Use a profile declared in the file.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub well_formed: bool,
    #[arg(long)]
    pub ccp2: bool,
    #[arg(long)]
    pub ccp3: bool,
    #[arg(long, value_delimiter = ',')]
    pub terminating: Option<Vec<String>>,
    #[arg(long)]
    pub oracle_cc2: bool,
    #[arg(long)]
    pub oracle_cc3: bool,
    #[arg(long, value_delimiter = ',')]
    pub oracle_terminating: Option<Vec<String>>,
    #[arg(long)]
    pub deadlocks: bool,
    #[arg(long, value_delimiter = ',')]
    pub system_terminating: Option<Vec<String>>,
    /// Run each check on its own thread.
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub json: bool,
    /// Show witnesses and counters.
    #[arg(short, long)]
    pub verbose: bool,
}

impl CheckArgs {
    fn flags(&self) -> CheckProfile {
        CheckProfile {
            well_formed: self.well_formed,
            ccp2: self.ccp2,
            ccp3: self.ccp3,
            terminating: self.terminating.clone(),
            oracle_cc2: self.oracle_cc2,
            oracle_cc3: self.oracle_cc3,
            oracle_terminating: self.oracle_terminating.clone(),
            deadlocks: self.deadlocks,
            system_terminating: self.system_terminating.clone(),
            ..Default::default()
        }
    }

    /// Flags win; otherwise the named profile, the file's first profile,
    /// or the standard checks.
    fn profile(&self, doc: &SpecDocument) -> Result<CheckProfile, CliError> {
        let flags = self.flags();
        if !flags.is_empty() {
            return Ok(flags);
        }
        if let Some(name) = &self.profile {
            return doc
                .profile(name)
                .cloned()
                .ok_or_else(|| CliError::Usage(format!("no profile named `{name}`")));
        }
        Ok(doc.profiles.first().cloned().unwrap_or_else(CheckProfile::standard))
    }
}

fn check_participants(doc: &SpecDocument, names: &[String]) -> Result<(), CliError> {
    for n in names {
        if !doc.family.participants().contains(&Participant::new(n)) {
            return Err(CliError::Usage(format!("unknown participant `{n}`")));
        }
    }
    Ok(())
}

/// Executes `cli`, writing to `out`; returns the exit status.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let bound = cli.bound;
    match &cli.command {
        Command::Validate { file } => {
            let doc = parse_spec(file)?;
            let mut status = EXIT_HOLDS;
            writeln!(out, "{} participant(s), {} pomset(s)", doc.family.participants().len(), doc.family.len())?;
            for m in doc.family.members() {
                let wf = is_well_formed(&m.pomset);
                let yn = |b: bool| if b { "yes" } else { "no" };
                writeln!(
                    out,
                    "{}: {} events, well-formed {}, complete {}, msc {}",
                    m.name,
                    m.pomset.len(),
                    yn(wf.holds()),
                    yn(is_complete(&m.pomset)),
                    yn(is_msc(&m.pomset))
                )?;
                for v in &wf.violations {
                    writeln!(out, "  {}", v.describe(&m.pomset))?;
                }
                if !wf.holds() {
                    status = EXIT_FAILS;
                }
            }
            Ok(status)
        }
        Command::Project {
            file,
            pomset,
            participant,
            dot,
        } => {
            let doc = parse_spec(file)?;
            check_participants(&doc, std::slice::from_ref(participant))?;
            let r = doc
                .family
                .get(pomset)
                .ok_or_else(|| CliError::Usage(format!("no pomset named `{pomset}`")))?;
            let p = r.project(&Participant::new(participant));
            if *dot {
                write!(out, "{}", pomset_dot(&p, &format!("{pomset}@{participant}")))?;
            } else {
                writeln!(out, "{p}")?;
            }
            Ok(EXIT_HOLDS)
        }
        Command::Lang { file, count } => {
            let doc = parse_spec(file)?;
            if *count {
                writeln!(out, "{}", count_words(&doc.family, bound)?)?;
            } else {
                for w in language(&doc.family, bound)? {
                    writeln!(out, "{w}")?;
                }
            }
            Ok(EXIT_HOLDS)
        }
        Command::Check(args) => {
            let doc = parse_spec(&args.file)?;
            let profile = args.profile(&doc)?;
            let names: Vec<String> = profile.mentioned_participants().cloned().collect();
            check_participants(&doc, &names)?;
            let report = run_checks(&doc, &profile, bound, args.parallel);
            if args.json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                write!(out, "{}", report.to_text(args.verbose))?;
            }
            Ok(report.exit_code())
        }
        Command::Synthesize { file, out: dir, dot } => {
            let doc = parse_spec(file)?;
            let s = synthesize_family_system(&doc.family, bound)?;
            if let Some(dir) = dir {
                fs::create_dir_all(dir)?;
            }
            for (a, m) in s.machines() {
                if let Some(dir) = dir {
                    fs::write(dir.join(format!("{a}.dot")), cfsm_dot(m))?;
                }
                if *dot {
                    write!(out, "{}", cfsm_dot(m))?;
                    continue;
                }
                writeln!(
                    out,
                    "{a}: {} state(s), {} transition(s), {} accepting",
                    m.state_count(),
                    m.transitions().len(),
                    m.accepting().len()
                )?;
                for t in m.transitions() {
                    writeln!(out, "  {} --{}--> {}", m.states()[t.from], t.label, m.states()[t.to])?;
                }
            }
            Ok(EXIT_HOLDS)
        }
        Command::Simulate {
            file,
            deadlocks,
            system_terminating,
            dot,
        } => {
            let doc = parse_spec(file)?;
            let s = synthesize_family_system(&doc.family, bound)?;
            let limits = ExploreLimits {
                max_configurations: bound,
                ..ExploreLimits::default()
            };
            let g = reachable(&s, &limits)?;
            let dead = g.deadlocks();
            writeln!(
                out,
                "{} configuration(s), {} accepting, {} deadlock(s)",
                g.len(),
                g.accepting_count(),
                dead.len()
            )?;
            if let Some(path) = dot {
                fs::write(path, configurations_dot(&g))?;
            }
            let mut status = EXIT_HOLDS;
            if *deadlocks {
                for &i in &dead {
                    writeln!(out, "deadlock {} via {}", g.nodes[i], g.trace_to(i))?;
                }
                if !dead.is_empty() {
                    status = EXIT_FAILS;
                }
            }
            if let Some(names) = system_terminating {
                check_participants(&doc, names)?;
                let p = names.iter().map(Participant::new).collect();
                match check_system_termination_aware(&s, &p, &limits)?.into_witness() {
                    None => writeln!(out, "termination-aware for {{{}}}", names.join(","))?,
                    Some(w) => {
                        writeln!(
                            out,
                            "{} accepting in {} with {} enabled, via {}",
                            w.participant, w.configuration, w.pending, w.trace
                        )?;
                        status = EXIT_FAILS;
                    }
                }
            }
            Ok(status)
        }
    }
}
