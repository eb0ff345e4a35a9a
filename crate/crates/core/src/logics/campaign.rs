//! The randomized rule campaign: every rule on every backend, each instance
//! drawn from its own deterministic seed, checked exactly, merged into one
//! report.

use std::time::Instant;

use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::backends::BackendId;
use crate::models::{Par, Rel};
use crate::StochQ;

use super::coupling::Couple;
use super::random::Builder;
use super::laws::{axiom_catalogue, law_catalogue, AXIOM_IDS, LAW_IDS};
use super::rules::{catalogue, check_draft, Bundle, Outcome, Rg, Rule, RULE_IDS};

/// Which catalogue a campaign draws from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    #[default]
    Rules,
    Laws,
    Axioms,
}

impl Suite {
    pub fn ids(self) -> &'static [&'static str] {
        match self {
            Suite::Rules => RULE_IDS,
            Suite::Laws => LAW_IDS,
            Suite::Axioms => AXIOM_IDS,
        }
    }

    pub fn catalogue<B: Couple>(self) -> Vec<Rule<B>> {
        match self {
            Suite::Rules => catalogue::<B>(),
            Suite::Laws => law_catalogue::<B>(),
            Suite::Axioms => axiom_catalogue::<B>(),
        }
    }

    /// The suite an id belongs to, by its family prefix.
    pub fn of(id: &str) -> Suite {
        match id.split('.').next() {
            Some("law") => Suite::Laws,
            Some("axiom") => Suite::Axioms,
            _ => Suite::Rules,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub suite: Suite,
    pub seed: u64,
    /// Non-vacuous instances wanted per rule and backend.
    pub instances: usize,
    pub max_carrier: usize,
    pub backends: Vec<BackendId>,
    /// Rule ids to run, or all when empty. A trailing `.` selects a family.
    pub rules: Vec<String>,
    /// Attempts allowed per wanted instance before giving up.
    pub patience: usize,
    /// Counterexample bundles kept per rule and backend.
    pub keep: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            suite: Suite::Rules,
            seed: 0,
            instances: 1000,
            max_carrier: 3,
            backends: BackendId::ALL.to_vec(),
            rules: vec![],
            patience: 20,
            keep: 3,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RuleReport {
    pub rule: String,
    pub backend: String,
    pub attempts: usize,
    /// Instances whose premises held.
    pub checked: usize,
    pub sound: usize,
    pub vacuous: usize,
    pub refuted: usize,
    pub side_violations: usize,
    pub errors: usize,
    pub first_error: Option<String>,
    pub counterexamples: Vec<Bundle>,
    pub millis: u128,
}

impl RuleReport {
    /// Enough instances were checked and none refuted the rule.
    pub fn passed(&self, wanted: usize) -> bool {
        self.refuted == 0 && self.side_violations == 0 && self.errors == 0 && self.checked >= wanted
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub instances: usize,
    pub max_carrier: usize,
    pub rows: Vec<RuleReport>,
    pub counterexamples: usize,
    pub millis: u128,
}

impl Report {
    pub fn failing(&self) -> impl Iterator<Item = &RuleReport> {
        self.rows.iter().filter(|r| !r.passed(self.instances))
    }
}

/// SplitMix64 finalizer, used to derive independent per-attempt seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn attempt_seed(seed: u64, rule: &str, backend: BackendId, attempt: usize) -> u64 {
    let mut h = mix(seed);
    for b in rule.bytes().chain(backend.as_str().bytes()) {
        h = mix(h ^ b as u64);
    }
    mix(h ^ attempt as u64)
}

fn selected(cfg: &Config, id: &str) -> bool {
    cfg.rules.is_empty()
        || cfg
            .rules
            .iter()
            .any(|r| r == id || (r.ends_with('.') && id.starts_with(r.as_str())))
}

/// One (rule, backend) cell of the campaign.
pub fn run_rule<B: Couple>(cfg: &Config, index: usize) -> RuleReport {
    let rule = cfg.suite.catalogue::<B>().swap_remove(index);
    let start = Instant::now();
    let mut rep = RuleReport {
        rule: rule.id.into(),
        backend: B::ID.to_string(),
        ..Default::default()
    };
    let budget = cfg.instances.saturating_mul(cfg.patience.max(1));
    while rep.checked < cfg.instances && rep.attempts < budget {
        let seed = attempt_seed(cfg.seed, rule.id, B::ID, rep.attempts);
        rep.attempts += 1;
        let mut rng = Rg::seed_from_u64(seed);
        let mut b = Builder::<B>::new(&mut rng, cfg.max_carrier);
        let d = rule.draft(&mut b, &mut rng);
        match check_draft::<B>(&d, &b.model) {
            Ok(Outcome::Sound) => {
                rep.checked += 1;
                rep.sound += 1;
            }
            Ok(Outcome::Vacuous(_)) => rep.vacuous += 1,
            Ok(Outcome::SideViolated(e)) => {
                rep.side_violations += 1;
                rep.first_error.get_or_insert(e);
            }
            Ok(Outcome::Refuted(e)) => {
                rep.checked += 1;
                rep.refuted += 1;
                if rep.counterexamples.len() < cfg.keep {
                    rep.counterexamples.push(Bundle::new::<B>(rule.id, seed, &b.model, &d, e));
                }
            }
            Err(e) => {
                rep.errors += 1;
                rep.first_error.get_or_insert(e.to_string());
            }
        }
    }
    rep.millis = start.elapsed().as_millis();
    rep
}

fn run_cell(cfg: &Config, backend: BackendId, index: usize) -> RuleReport {
    match backend {
        BackendId::Rel => run_rule::<Rel>(cfg, index),
        BackendId::Par => run_rule::<Par>(cfg, index),
        BackendId::Stoch => run_rule::<StochQ>(cfg, index),
    }
}

/// Worker count from `IMPCAT_THREADS`, or rayon's default.
pub fn threads() -> Option<usize> {
    std::env::var("IMPCAT_THREADS").ok()?.parse().ok().filter(|&n| n > 0)
}

pub fn run(cfg: &Config) -> Report {
    let start = Instant::now();
    let cells: Vec<(BackendId, usize)> = cfg
        .backends
        .iter()
        .flat_map(|&b| {
            cfg.suite
                .ids()
                .iter()
                .enumerate()
                .filter(|(_, id)| selected(cfg, id))
                .map(move |(i, _)| (b, i))
        })
        .collect();
    let work = || cells.par_iter().map(|&(b, i)| run_cell(cfg, b, i)).collect::<Vec<_>>();
    let rows = match threads() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    Report {
        suite: cfg.suite,
        seed: cfg.seed,
        instances: cfg.instances,
        max_carrier: cfg.max_carrier,
        counterexamples: rows.iter().map(|r| r.refuted).sum(),
        rows,
        millis: start.elapsed().as_millis(),
    }
}

/// Runs one attempt again from its seed.
pub fn replay<B: Couple>(rule: &str, seed: u64, max_carrier: usize) -> Option<(Outcome, Bundle)> {
    let r = Suite::of(rule).catalogue::<B>().into_iter().find(|r| r.id == rule)?;
    let mut rng = Rg::seed_from_u64(seed);
    let mut b = Builder::<B>::new(&mut rng, max_carrier);
    let d = r.draft(&mut b, &mut rng);
    let o = check_draft::<B>(&d, &b.model).ok()?;
    let msg = match &o {
        Outcome::Refuted(e) | Outcome::Vacuous(e) | Outcome::SideViolated(e) => e.clone(),
        Outcome::Sound => String::new(),
    };
    let bundle = Bundle::new::<B>(rule, seed, &b.model, &d, msg);
    Some((o, bundle))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let cfg = Config {
            seed: 5,
            instances: 5,
            rules: vec!["hoare.while".into(), "outcome.".into()],
            ..Default::default()
        };
        let a = run(&cfg);
        let b = run(&cfg);
        assert_eq!(a.rows.len(), 3 * 12);
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!((x.attempts, x.checked, x.refuted), (y.attempts, y.checked, y.refuted));
        }
    }

    #[test]
    fn law_suite_runs() {
        let cfg = Config {
            suite: Suite::Laws,
            instances: 3,
            rules: vec!["law.cmd.".into()],
            ..Default::default()
        };
        let rep = run(&cfg);
        assert_eq!(rep.rows.len(), 3 * 16);
        assert_eq!(rep.failing().count(), 0);
    }

    #[test]
    fn replay_matches_campaign() {
        let seed = attempt_seed(1, "hoare.comp", BackendId::Stoch, 0);
        let (o, bundle) = replay::<StochQ>("hoare.comp", seed, 3).unwrap();
        assert!(matches!(o, Outcome::Sound | Outcome::Vacuous(_)));
        assert_eq!(bundle.backend, "stoch");
    }
}
