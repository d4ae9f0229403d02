//! Deterministic synthetic traces.
//!
//! [`generate`] emulates a multi-threaded program creating and destroying
//! objects. Output is a pure function of the [`GenConfig`]; the exact draw
//! sequence is documented in `docs/workload.md` so other implementations can
//! reproduce logs byte for byte.

use std::collections::HashSet;
use std::str::FromStr;

use thiserror::Error;

use crate::trace::{parse_timestamp, EventKind, EventLog, ObjectEvent};

/// Source name given to generated logs.
pub const GENERATED: &str = "generated";

/// Site line numbers are drawn from `0..LINE_RANGE`.
const LINE_RANGE: u64 = 10_000;

/// xoshiro256** 1.0, seeded by expanding a single `u64` through SplitMix64.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

impl Xoshiro256StarStar {
    pub fn from_state(s: [u64; 4]) -> Self {
        Self { s }
    }

    pub fn seed_from_u64(seed: u64) -> Self {
        let mut x = seed;
        let mut splitmix = || {
            x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = x;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^ (z >> 31)
        };
        Self::from_state([splitmix(), splitmix(), splitmix(), splitmix()])
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform-ish in `0..n` via the high half of a 64x64 multiply.
    pub fn below(&mut self, n: u64) -> u64 {
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    /// Index drawn in proportion to `weights`. Zero weights are never chosen.
    /// Requires at least one positive weight.
    fn pick(&mut self, weights: impl Iterator<Item = f64> + Clone) -> usize {
        let total: f64 = weights.clone().sum();
        let target = self.next_f64() * total;
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, w) in weights.enumerate() {
            if w > 0.0 {
                acc += w;
                last_positive = i;
                if target < acc {
                    return i;
                }
            }
        }
        last_positive
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreadSpec {
    pub name: String,
    pub create_weight: f64,
    pub destroy_weight: f64,
}

impl ThreadSpec {
    pub fn new(name: impl Into<String>, create_weight: f64, destroy_weight: f64) -> Self {
        Self {
            name: name.into(),
            create_weight,
            destroy_weight,
        }
    }
}

/// A fully-qualified name with a relative frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSpec {
    pub name: String,
    pub weight: f64,
}

impl ClassSpec {
    pub fn new(name: impl Into<String>, weight: f64) -> Self {
        Self {
            name: name.into(),
            weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub threads: Vec<ThreadSpec>,
    /// Object types; also used as the allocation-site classes.
    pub classes: Vec<ClassSpec>,
    /// Site methods for creation events. Empty means every method column is blank.
    pub methods: Vec<ClassSpec>,
    pub event_count: usize,
    /// Upper bound on the share of Destroyed events.
    pub destroy_fraction: f64,
    pub start_time: i64,
    pub time_step: i64,
}

impl GenConfig {
    /// A config with no destruction, starting at the epoch with one-second steps.
    pub fn new(seed: u64, threads: Vec<ThreadSpec>, classes: Vec<ClassSpec>, event_count: usize) -> Self {
        Self {
            seed,
            threads,
            classes,
            methods: Vec::new(),
            event_count,
            destroy_fraction: 0.0,
            start_time: 0,
            time_step: 1,
        }
    }

    /// Three threads shaped after a GUI editor start-up: `main` and
    /// `AWT-EventQueue-0` allocate, `Thread-0` only reclaims.
    pub fn jedit_like(seed: u64, event_count: usize) -> Self {
        let mut config = Self::new(
            seed,
            vec![
                ThreadSpec::new("main", 5.0, 1.0),
                ThreadSpec::new("AWT-EventQueue-0", 4.0, 1.0),
                ThreadSpec::new("Thread-0", 0.0, 8.0),
            ],
            vec![
                ClassSpec::new("org.gjt.sp.jedit.GUIUtilities", 6.0),
                ClassSpec::new("java.util.Vector", 3.0),
                ClassSpec::new("java.util.LinkedList", 2.0),
                ClassSpec::new("org.gjt.sp.jedit.EditBus", 1.0),
                ClassSpec::new("org.gjt.sp.jedit.Buffer", 1.0),
            ],
            event_count,
        );
        config.methods = vec![
            ClassSpec::new("<init>", 4.0),
            ClassSpec::new("<clinit>", 1.0),
            ClassSpec::new("main", 1.0),
        ];
        config.destroy_fraction = 0.3;
        config.start_time = 1_315_936_080;
        config
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        if self.threads.is_empty() {
            return invalid("at least one thread is required".into());
        }
        if self.classes.is_empty() {
            return invalid("at least one class is required".into());
        }
        if self.event_count == 0 {
            return invalid("event_count must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.destroy_fraction) {
            return invalid(format!("destroy_fraction {} outside [0, 1]", self.destroy_fraction));
        }
        if self.time_step < 0 {
            return invalid(format!("time_step {} is negative", self.time_step));
        }
        let last = (self.event_count as i64 - 1)
            .checked_mul(self.time_step)
            .and_then(|d| d.checked_add(self.start_time));
        if last.is_none() {
            return invalid("timestamps overflow".into());
        }
        for t in &self.threads {
            check_name("thread", &t.name)?;
            for w in [t.create_weight, t.destroy_weight] {
                if !(w.is_finite() && w >= 0.0) {
                    return invalid(format!("thread {:?} has invalid weight {w}", t.name));
                }
            }
        }
        if !self.threads.iter().any(|t| t.create_weight > 0.0) {
            return invalid("no thread has a positive create weight".into());
        }
        for (what, list) in [("class", &self.classes), ("method", &self.methods)] {
            for c in list {
                check_name(what, &c.name)?;
                if !(c.weight.is_finite() && c.weight > 0.0) {
                    return invalid(format!("{what} {:?} has non-positive weight {}", c.name, c.weight));
                }
            }
        }
        Ok(())
    }
}

fn check_name(what: &str, name: &str) -> Result<(), ConfigError> {
    if name.is_empty() || name.contains([',', '"', '\n', '\r']) {
        return Err(ConfigError::Invalid(format!(
            "{what} name {name:?} is empty or not representable in a log row"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Flat `key = value` text, one setting per line, `#` starts a comment.
///
/// ```text
/// seed = 7
/// event_count = 5000
/// destroy_fraction = 0.3
/// start_time = 2011-09-13T17:48
/// time_step = 1
/// thread = main 5 1
/// thread = Thread-0 0 8
/// class = org.gjt.sp.jedit.GUIUtilities 6
/// method = <init> 1
/// ```
///
/// `thread`, `class` and `method` repeat; the trailing numbers are weights and
/// the name is everything before them, so names may contain spaces.
impl FromStr for GenConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut config = GenConfig::new(0, Vec::new(), Vec::new(), 0);
        let mut saw_count = false;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax { line, message };
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| syntax(format!("expected `key = value`, got {content:?}")))?;

            match key {
                "seed" => config.seed = parse_num(value).map_err(syntax)?,
                "event_count" => {
                    config.event_count = parse_num(value).map_err(syntax)?;
                    saw_count = true;
                }
                "destroy_fraction" => config.destroy_fraction = parse_num(value).map_err(syntax)?,
                "time_step" => config.time_step = parse_num(value).map_err(syntax)?,
                "start_time" => {
                    config.start_time =
                        parse_timestamp(value).map_err(|f| syntax(f.to_string()))?
                }
                "thread" => {
                    let (name, [create, destroy]) = split_weights(value).map_err(syntax)?;
                    config.threads.push(ThreadSpec::new(name, create, destroy));
                }
                "class" | "method" => {
                    let (name, [weight]) = split_weights(value).map_err(syntax)?;
                    let list = if key == "class" { &mut config.classes } else { &mut config.methods };
                    list.push(ClassSpec::new(name, weight));
                }
                other => return Err(syntax(format!("unknown key {other:?}"))),
            }
        }
        if !saw_count {
            return Err(ConfigError::Invalid("event_count is required".into()));
        }
        config.check()?;
        Ok(config)
    }
}

fn parse_num<T: FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("invalid number {value:?}"))
}

fn split_weights<const N: usize>(value: &str) -> Result<(&str, [f64; N]), String> {
    let mut rest = value;
    let mut weights = [0.0; N];
    for slot in weights.iter_mut().rev() {
        let (head, tail) = rest
            .trim_end()
            .rsplit_once(char::is_whitespace)
            .ok_or_else(|| format!("expected a name followed by {N} weight(s) in {value:?}"))?;
        *slot = parse_num(tail)?;
        rest = head;
    }
    let name = rest.trim();
    if name.is_empty() {
        return Err(format!("missing name in {value:?}"));
    }
    Ok((name, weights))
}

struct LiveObject {
    id: String,
    type_idx: usize,
    site_idx: usize,
}

/// Builds a synthetic log of exactly `config.event_count` events.
pub fn generate(config: &GenConfig) -> Result<EventLog, ConfigError> {
    config.check()?;

    let mut rng = Xoshiro256StarStar::seed_from_u64(config.seed);
    let max_destroys = (config.destroy_fraction * config.event_count as f64).floor() as usize;
    let can_destroy = config.threads.iter().any(|t| t.destroy_weight > 0.0);

    let create_w = config.threads.iter().map(|t| t.create_weight);
    let destroy_w = config.threads.iter().map(|t| t.destroy_weight);
    let class_w = config.classes.iter().map(|c| c.weight);
    let method_w = config.methods.iter().map(|m| m.weight);

    let mut live: Vec<LiveObject> = Vec::new();
    let mut ids: HashSet<String> = HashSet::with_capacity(config.event_count);
    let mut destroyed = 0usize;
    let mut events = Vec::with_capacity(config.event_count);

    for i in 0..config.event_count {
        let timestamp = config.start_time + i as i64 * config.time_step;
        let roll = rng.next_f64();
        let destroy = roll < config.destroy_fraction
            && destroyed < max_destroys
            && can_destroy
            && !live.is_empty();

        if destroy {
            let thread = rng.pick(destroy_w.clone());
            let slot = rng.below(live.len() as u64) as usize;
            let obj = live.swap_remove(slot);
            destroyed += 1;
            events.push(ObjectEvent {
                kind: EventKind::Destroyed,
                thread: config.threads[thread].name.clone(),
                timestamp,
                object_id: obj.id,
                type_name: config.classes[obj.type_idx].name.clone(),
                site_class: config.classes[obj.site_idx].name.clone(),
                site_method: String::new(),
                line: 0,
            });
        } else {
            let thread = rng.pick(create_w.clone());
            let type_idx = rng.pick(class_w.clone());
            let site_idx = rng.pick(class_w.clone());
            let site_method = if config.methods.is_empty() {
                String::new()
            } else {
                config.methods[rng.pick(method_w.clone())].name.clone()
            };
            let line = rng.below(LINE_RANGE);
            let id = loop {
                let candidate = object_id(rng.next_u64(), rng.next_u64());
                if ids.insert(candidate.clone()) {
                    break candidate;
                }
            };
            events.push(ObjectEvent {
                kind: EventKind::Created,
                thread: config.threads[thread].name.clone(),
                timestamp,
                object_id: id.clone(),
                type_name: config.classes[type_idx].name.clone(),
                site_class: config.classes[site_idx].name.clone(),
                site_method,
                line,
            });
            live.push(LiveObject { id, type_idx, site_idx });
        }
    }
    Ok(EventLog::new(GENERATED, events))
}

/// 8-4-4-4-12 lowercase hex built from two 64-bit draws.
fn object_id(hi: u64, lo: u64) -> String {
    format!(
        "{:08x}-{:04x}-{:04x}-{:04x}-{:012x}",
        hi >> 32,
        (hi >> 16) & 0xffff,
        hi & 0xffff,
        lo >> 48,
        lo & 0xffff_ffff_ffff
    )
}
