//! Deterministic bit-allocation transmit-receive configurations.
//!
//! A scheme assigns each input level at each use of a repeating pattern one
//! of: a fresh message bit, a relayed feedback bit, a common-random bit, or
//! zero. Decoders are explicit GF(2) linear maps over named observation and
//! side-bit columns, so decoding is exact and replayable. An optional tail
//! overrides the final uses, which absorbs the edge effects of relays that
//! need lookahead; the reported rate is that of the steady-state pattern.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::Bits;
use crate::channel::{self, ChannelError, ChannelParams, SimTrace, User};
use crate::gf2::BitVector;
use crate::rat::{rat, Rat};

pub mod builtin;

#[derive(Debug, Error, PartialEq)]
pub enum SchemeError {
    #[error("invalid scheme: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("verification requires at least 3 blocks, scheme has {0}")]
    TooFewBlocks(usize),
    #[error("exhaustive enumeration over {0} bits exceeds the supported 30")]
    ExhaustiveTooLarge(usize),
    #[error("scheme for user {expected} supplied where user {got} was required")]
    WrongUser { expected: usize, got: usize },
}

/// What one input level carries during one channel use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assignment {
    /// Fresh message bit; the value names the stream within a block.
    Fresh(usize),
    /// The interference component of an earlier feedback bit: the raw
    /// feedback level, lagged `lag >= 1` uses, with the transmitter's own
    /// contribution removed (it knows what it sent).
    Relay { fb_level: usize, lag: usize },
    /// Common-random bit shared with the own receiver only.
    Random(usize),
    Zero,
}

/// One column of the decoder matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    /// Received bit: channel use (1-based) and level (1-based).
    Obs {
        #[serde(rename = "use")]
        use_idx: usize,
        level: usize,
    },
    /// Own common-randomness bit.
    Omega(usize),
    /// Previously decoded own message bit (strictly earlier row).
    Prev(usize),
}

/// Row-listed GF(2) decoding map: row k computes message bit k as the XOR
/// of its terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoder {
    pub rows: Vec<Vec<Term>>,
}

/// A transmit-receive configuration for one user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    /// User index, 1 or 2.
    pub user: usize,
    pub pattern_length: usize,
    pub blocks: usize,
    /// `pattern_length` rows of `q` assignments each.
    pub levels: Vec<Vec<Assignment>>,
    /// Overrides for the final `tail.len()` uses of the whole transmission.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tail: Vec<Vec<Assignment>>,
    pub decoder: Decoder,
    #[serde(with = "crate::rat::serde_str")]
    pub fresh_rate: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub random_rate: Rat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<String>);

impl Diagnostics {
    pub fn is_clean(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_result(self) -> Result<(), SchemeError> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(SchemeError::Invalid(self.0))
        }
    }
}

impl Scheme {
    pub fn user_id(&self) -> User {
        User::from_index(self.user).expect("validated user index")
    }

    pub fn total_uses(&self) -> usize {
        self.pattern_length * self.blocks
    }

    /// Assignment row in effect at use `n` (1-based).
    pub fn row_at(&self, n: usize) -> &[Assignment] {
        let total = self.total_uses();
        let tail_start = total - self.tail.len();
        if n > tail_start {
            &self.tail[n - tail_start - 1]
        } else {
            &self.levels[(n - 1) % self.pattern_length]
        }
    }

    /// Total fresh message bits actually transmitted.
    pub fn message_len(&self) -> usize {
        (1..=self.total_uses())
            .map(|n| {
                self.row_at(n)
                    .iter()
                    .filter(|a| matches!(a, Assignment::Fresh(_)))
                    .count()
            })
            .sum()
    }

    /// Total common-randomness bits consumed.
    pub fn randomness_len(&self) -> usize {
        (1..=self.total_uses())
            .map(|n| {
                self.row_at(n)
                    .iter()
                    .filter(|a| matches!(a, Assignment::Random(_)))
                    .count()
            })
            .sum()
    }

    fn fresh_per_block(&self) -> usize {
        self.levels
            .iter()
            .flatten()
            .filter(|a| matches!(a, Assignment::Fresh(_)))
            .count()
    }

    fn random_per_block(&self) -> usize {
        self.levels
            .iter()
            .flatten()
            .filter(|a| matches!(a, Assignment::Random(_)))
            .count()
    }

    /// Structural check against a channel: dimensions, stream positions,
    /// relay observability and lag, decoder shape, declared rates.
    pub fn validate(&self, p: &ChannelParams) -> Diagnostics {
        let mut d = Vec::new();
        let q = p.q() as usize;
        if !(self.user == 1 || self.user == 2) {
            d.push(format!("user must be 1 or 2, got {}", self.user));
            return Diagnostics(d);
        }
        if self.pattern_length == 0 || self.blocks == 0 {
            d.push("pattern_length and blocks must be positive".into());
            return Diagnostics(d);
        }
        if self.levels.len() != self.pattern_length {
            d.push(format!(
                "levels has {} rows, pattern_length is {}",
                self.levels.len(),
                self.pattern_length
            ));
            return Diagnostics(d);
        }
        if self.tail.len() > self.total_uses() {
            d.push(format!(
                "tail of {} uses exceeds the {}-use transmission",
                self.tail.len(),
                self.total_uses()
            ));
            return Diagnostics(d);
        }
        let user = User::from_index(self.user).expect("checked");
        let fb_shift = p.feedback_shift(user) as usize;
        let check_row = |row: &[Assignment], what: &str, d: &mut Vec<String>| {
            if row.len() != q {
                d.push(format!("{what} has {} levels, channel q is {q}", row.len()));
                return;
            }
            let mut fresh_seen = Vec::new();
            let mut random_seen = Vec::new();
            for (idx, a) in row.iter().enumerate() {
                match a {
                    Assignment::Fresh(pos) => {
                        if fresh_seen.contains(pos) {
                            d.push(format!("{what}: fresh position {pos} repeats"));
                        }
                        fresh_seen.push(*pos);
                        let _ = idx;
                    }
                    Assignment::Random(pos) => {
                        if random_seen.contains(pos) {
                            d.push(format!("{what}: random position {pos} repeats"));
                        }
                        random_seen.push(*pos);
                    }
                    Assignment::Relay { fb_level, lag } => {
                        if *lag < 1 {
                            d.push(format!("{what}: relay lag must be at least 1 (feedback has unit delay)"));
                        }
                        if *fb_level < 1 || *fb_level > q {
                            d.push(format!("{what}: relay feedback level {fb_level} outside 1..={q}"));
                        } else if *fb_level <= fb_shift {
                            d.push(format!(
                                "{what}: relay feedback level {fb_level} is truncated away (observable levels are {}..={q})",
                                fb_shift + 1
                            ));
                        }
                    }
                    Assignment::Zero => {}
                }
            }
        };
        for (r, row) in self.levels.iter().enumerate() {
            check_row(row, &format!("pattern use {}", r + 1), &mut d);
        }
        for (r, row) in self.tail.iter().enumerate() {
            check_row(row, &format!("tail use {}", r + 1), &mut d);
        }
        if !d.is_empty() {
            return Diagnostics(d);
        }

        // Block-level stream positions must be exactly 0..F-1 and 0..rho-1.
        let mut fresh_pos: Vec<usize> = self
            .levels
            .iter()
            .flatten()
            .filter_map(|a| match a {
                Assignment::Fresh(pos) => Some(*pos),
                _ => None,
            })
            .collect();
        fresh_pos.sort_unstable();
        if fresh_pos.windows(2).any(|w| w[0] == w[1]) {
            d.push("fresh stream position used more than once per block".into());
        } else if fresh_pos.iter().enumerate().any(|(i, &p)| i != p) {
            d.push("fresh stream positions must be exactly 0..F-1".into());
        }
        let mut random_pos: Vec<usize> = self
            .levels
            .iter()
            .flatten()
            .filter_map(|a| match a {
                Assignment::Random(pos) => Some(*pos),
                _ => None,
            })
            .collect();
        random_pos.sort_unstable();
        if random_pos.windows(2).any(|w| w[0] == w[1]) {
            d.push("random stream position used more than once per block".into());
        } else if random_pos.iter().enumerate().any(|(i, &p)| i != p) {
            d.push("random stream positions must be exactly 0..rho-1".into());
        }

        let msg_len = self.message_len();
        let omega_len = self.randomness_len();
        if self.decoder.rows.len() != msg_len {
            d.push(format!(
                "decoder has {} rows but the scheme transmits {msg_len} fresh bits",
                self.decoder.rows.len()
            ));
        }
        let total = self.total_uses();
        for (k, row) in self.decoder.rows.iter().enumerate() {
            for t in row {
                match t {
                    Term::Obs { use_idx, level } => {
                        if *use_idx < 1 || *use_idx > total {
                            d.push(format!("decoder row {k}: observation use {use_idx} outside 1..={total}"));
                        }
                        if *level < 1 || *level > q {
                            d.push(format!("decoder row {k}: observation level {level} outside 1..={q}"));
                        }
                    }
                    Term::Omega(i) => {
                        if *i >= omega_len {
                            d.push(format!("decoder row {k}: omega index {i} outside 0..{omega_len}"));
                        }
                    }
                    Term::Prev(j) => {
                        if *j >= k {
                            d.push(format!("decoder row {k}: prev reference {j} is not an earlier row"));
                        }
                    }
                }
            }
        }

        let declared = &self.fresh_rate;
        let actual = Rat::new(
            (self.fresh_per_block() as i64).into(),
            (self.pattern_length as i64).into(),
        );
        if *declared != actual {
            d.push(format!(
                "declared fresh rate {} differs from pattern rate {}",
                crate::rat::fmt_rat(declared),
                crate::rat::fmt_rat(&actual)
            ));
        }
        let declared = &self.random_rate;
        let actual = Rat::new(
            (self.random_per_block() as i64).into(),
            (self.pattern_length as i64).into(),
        );
        if *declared != actual {
            d.push(format!(
                "declared random rate {} differs from pattern rate {}",
                crate::rat::fmt_rat(declared),
                crate::rat::fmt_rat(&actual)
            ));
        }
        Diagnostics(d)
    }

    /// Validates and compiles the per-use slot table used by the simulator.
    pub fn layout(&self, p: &ChannelParams) -> Result<SchemeLayout, SchemeError> {
        self.validate(p).into_result()?;
        Ok(SchemeLayout::compile(self, p))
    }

    /// Applies the decoder to a full observation record.
    pub fn decode(&self, y_own: &[BitVector], omega: &Bits) -> Bits {
        let mut out = Bits::new(self.decoder.rows.len());
        for (k, row) in self.decoder.rows.iter().enumerate() {
            let mut bit = false;
            for t in row {
                bit ^= match t {
                    Term::Obs { use_idx, level } => y_own[use_idx - 1].get(*level),
                    Term::Omega(i) => omega.get(*i),
                    Term::Prev(j) => out.get(*j),
                };
            }
            out.set(k, bit);
        }
        out
    }

    /// Declared fresh bits per channel use of the steady-state pattern.
    pub fn achieved_rate(&self) -> Rat {
        self.fresh_rate.clone()
    }

    /// Fresh and random bits per pattern use on levels visible at the other
    /// receiver. These are the scheme's realized common information and
    /// common randomness rates, the quantities the deviation bound sees.
    pub fn common_rate_pair(&self, p: &ChannelParams) -> (Rat, Rat) {
        let visible = p.cross_into(self.user_id().other()) as usize;
        let mut fresh = 0i64;
        let mut random = 0i64;
        for row in &self.levels {
            for (idx, a) in row.iter().enumerate() {
                let level = idx + 1;
                if level > visible {
                    continue;
                }
                match a {
                    Assignment::Fresh(_) => fresh += 1,
                    Assignment::Random(_) => random += 1,
                    _ => {}
                }
            }
        }
        let p_len = self.pattern_length as i64;
        (
            Rat::new(fresh.into(), p_len.into()),
            Rat::new(random.into(), p_len.into()),
        )
    }
}

/// Compiled slot: what the encoder writes, with message and randomness
/// indices resolved to scan order and relay bookkeeping precomputed.
#[derive(Clone, Copy, Debug)]
enum Slot {
    Msg(usize),
    Omega(usize),
    Relay {
        fb_level: usize,
        lag: usize,
        /// Level of the own past input that contributed to this feedback
        /// bit, if any; the encoder cancels it to expose pure interference.
        own_src: Option<usize>,
    },
    Zero,
}

/// A scheme compiled against a concrete channel.
#[derive(Clone, Debug)]
pub struct SchemeLayout {
    q: usize,
    uses: Vec<Vec<Slot>>,
    msg_len: usize,
    omega_len: usize,
}

impl SchemeLayout {
    fn compile(s: &Scheme, p: &ChannelParams) -> SchemeLayout {
        let q = p.q() as usize;
        let user = s.user_id();
        let fb_shift = p.feedback_shift(user) as usize;
        let own_total_shift = fb_shift + q - p.direct(user) as usize;
        let mut msg_idx = 0;
        let mut omega_idx = 0;
        let mut uses = Vec::with_capacity(s.total_uses());
        for n in 1..=s.total_uses() {
            let row = s.row_at(n);
            // Stream order within a use follows the declared positions.
            let mut fresh_slots: Vec<(usize, usize)> = Vec::new(); // (position, level idx)
            let mut random_slots: Vec<(usize, usize)> = Vec::new();
            for (idx, a) in row.iter().enumerate() {
                match a {
                    Assignment::Fresh(pos) => fresh_slots.push((*pos, idx)),
                    Assignment::Random(pos) => random_slots.push((*pos, idx)),
                    _ => {}
                }
            }
            fresh_slots.sort_unstable();
            random_slots.sort_unstable();
            let mut slots = vec![Slot::Zero; q];
            for (_, idx) in &fresh_slots {
                slots[*idx] = Slot::Msg(msg_idx);
                msg_idx += 1;
            }
            for (_, idx) in &random_slots {
                slots[*idx] = Slot::Omega(omega_idx);
                omega_idx += 1;
            }
            for (idx, a) in row.iter().enumerate() {
                if let Assignment::Relay { fb_level, lag } = a {
                    let own_src = fb_level
                        .checked_sub(own_total_shift)
                        .filter(|src| *src >= 1 && *src <= q);
                    slots[idx] = Slot::Relay {
                        fb_level: *fb_level,
                        lag: *lag,
                        own_src,
                    };
                }
            }
            uses.push(slots);
        }
        SchemeLayout {
            q,
            uses,
            msg_len: msg_idx,
            omega_len: omega_idx,
        }
    }

    pub fn total_uses(&self) -> usize {
        self.uses.len()
    }

    pub fn message_len(&self) -> usize {
        self.msg_len
    }

    pub fn randomness_len(&self) -> usize {
        self.omega_len
    }

    /// The channel input for use `n`, given the message, randomness, and the
    /// feedback and own-input history of uses 1..n-1.
    pub fn encode_use(
        &self,
        n: usize,
        w: &Bits,
        omega: &Bits,
        fb_hist: &[BitVector],
        x_hist: &[BitVector],
    ) -> BitVector {
        let mut x = BitVector::zero(self.q);
        for (idx, slot) in self.uses[n - 1].iter().enumerate() {
            let level = idx + 1;
            let bit = match slot {
                Slot::Msg(k) => w.get(*k),
                Slot::Omega(k) => omega.get(*k),
                Slot::Relay {
                    fb_level,
                    lag,
                    own_src,
                } => {
                    if n > *lag {
                        let m = n - lag;
                        let raw = fb_hist[m - 1].get(*fb_level);
                        let own = own_src.map(|s| x_hist[m - 1].get(s)).unwrap_or(false);
                        raw ^ own
                    } else {
                        false
                    }
                }
                Slot::Zero => false,
            };
            if bit {
                x.set(level, true);
            }
        }
        x
    }
}

/// Outcome of a verification run.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    ZeroError,
    Failed(Box<SimTrace>),
}

/// Result of simulating a scheme pair over many message draws.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport {
    /// Declared steady-state fresh rates (fresh bits per channel use).
    pub rates: (Rat, Rat),
    /// Worst observed per-user bit error probability, exact.
    pub error_probs: (Rat, Rat),
    pub trials: usize,
    pub exhaustive: bool,
    pub verdict: Verdict,
}

impl SimulationReport {
    pub fn is_zero_error(&self) -> bool {
        matches!(self.verdict, Verdict::ZeroError)
    }

    pub fn error_probability(&self, i: User) -> Rat {
        match i {
            User::One => self.error_probs.0.clone(),
            User::Two => self.error_probs.1.clone(),
        }
    }

    pub fn rate(&self, i: User) -> Rat {
        match i {
            User::One => self.rates.0.clone(),
            User::Two => self.rates.1.clone(),
        }
    }
}

/// Reusable simulation state for bulk trials: no allocation per run.
struct TrialRunner<'a> {
    p: ChannelParams,
    q: usize,
    l1: &'a SchemeLayout,
    l2: &'a SchemeLayout,
    horizon: usize,
    x_hist: [Vec<BitVector>; 2],
    fb_hist: [Vec<BitVector>; 2],
    y_hist: [Vec<BitVector>; 2],
}

impl<'a> TrialRunner<'a> {
    fn new(p: &ChannelParams, l1: &'a SchemeLayout, l2: &'a SchemeLayout) -> Self {
        let horizon = l1.total_uses().max(l2.total_uses());
        TrialRunner {
            p: *p,
            q: p.q() as usize,
            l1,
            l2,
            horizon,
            x_hist: [Vec::with_capacity(horizon), Vec::with_capacity(horizon)],
            fb_hist: [Vec::with_capacity(horizon), Vec::with_capacity(horizon)],
            y_hist: [Vec::with_capacity(horizon), Vec::with_capacity(horizon)],
        }
    }

    /// Runs one transmission; returns per-user mismatch counts against the
    /// decoded estimates of schemes 1 and 2.
    fn run(
        &mut self,
        s1: &Scheme,
        s2: &Scheme,
        w1: &Bits,
        w2: &Bits,
        o1: &Bits,
        o2: &Bits,
    ) -> (u64, u64) {
        for h in self.x_hist.iter_mut().chain(self.fb_hist.iter_mut()).chain(self.y_hist.iter_mut())
        {
            h.clear();
        }
        for n in 1..=self.horizon {
            let x1 = if n <= self.l1.total_uses() {
                self.l1.encode_use(n, w1, o1, &self.fb_hist[0], &self.x_hist[0])
            } else {
                BitVector::zero(self.q)
            };
            let x2 = if n <= self.l2.total_uses() {
                self.l2.encode_use(n, w2, o2, &self.fb_hist[1], &self.x_hist[1])
            } else {
                BitVector::zero(self.q)
            };
            let y1 = channel::forward_output(&self.p, &x1, &x2, User::One).expect("dims fixed");
            let y2 = channel::forward_output(&self.p, &x1, &x2, User::Two).expect("dims fixed");
            let fb1 = channel::feedback_output(&self.p, &y1, User::One).expect("dims fixed");
            let fb2 = channel::feedback_output(&self.p, &y2, User::Two).expect("dims fixed");
            self.x_hist[0].push(x1);
            self.x_hist[1].push(x2);
            self.fb_hist[0].push(fb1);
            self.fb_hist[1].push(fb2);
            self.y_hist[0].push(y1);
            self.y_hist[1].push(y2);
        }
        let d1 = s1.decode(&self.y_hist[0], o1);
        let d2 = s2.decode(&self.y_hist[1], o2);
        (w1.count_mismatches(&d1), w2.count_mismatches(&d2))
    }
}

/// Simulates the pair over random or exhaustive message and randomness
/// draws and reports achieved rates plus an exact error verdict.
///
/// Exhaustive mode is automatic when the joint enumeration is at most 2^20
/// assignments; the flag forces it up to 2^30. Random draws are seeded per
/// trial so runs are reproducible.
pub fn run_and_verify(
    p: &ChannelParams,
    s1: &Scheme,
    s2: &Scheme,
    trials: usize,
    exhaustive: bool,
    seed: u64,
) -> Result<SimulationReport, ChannelError> {
    if p.q() == 0 {
        return Err(ChannelError::DegenerateChannel);
    }
    for s in [s1, s2] {
        if s.blocks < 3 {
            return Err(ChannelError::InvalidScheme(SchemeError::TooFewBlocks(
                s.blocks,
            )));
        }
    }
    let l1 = s1.layout(p)?;
    let l2 = s2.layout(p)?;
    let lens = [
        l1.message_len(),
        l2.message_len(),
        l1.randomness_len(),
        l2.randomness_len(),
    ];
    let total_bits: usize = lens.iter().sum();
    let exhaustive_mode = exhaustive || total_bits <= 20;
    if exhaustive_mode && total_bits > 30 {
        return Err(ChannelError::InvalidScheme(SchemeError::ExhaustiveTooLarge(
            total_bits,
        )));
    }

    let mut runner = TrialRunner::new(p, &l1, &l2);
    let mut worst = [0u64; 2];
    let mut failing: Option<(Bits, Bits, Bits, Bits)> = None;
    let mut ran = 0usize;

    let consider =
        |runner: &mut TrialRunner, w1: &Bits, w2: &Bits, o1: &Bits, o2: &Bits, worst: &mut [u64; 2], failing: &mut Option<(Bits, Bits, Bits, Bits)>| {
            let (e1, e2) = runner.run(s1, s2, w1, w2, o1, o2);
            if (e1 > 0 || e2 > 0) && failing.is_none() {
                *failing = Some((w1.clone(), w2.clone(), o1.clone(), o2.clone()));
            }
            worst[0] = worst[0].max(e1);
            worst[1] = worst[1].max(e2);
        };

    if exhaustive_mode {
        let space: u64 = 1u64 << total_bits;
        for counter in 0..space {
            let mut offset = 0;
            let mut take = |len: usize| {
                let v = (counter >> offset) & if len == 64 { u64::MAX } else { (1 << len) - 1 };
                offset += len;
                Bits::from_u64(len, v)
            };
            let w1 = take(lens[0]);
            let w2 = take(lens[1]);
            let o1 = take(lens[2]);
            let o2 = take(lens[3]);
            consider(&mut runner, &w1, &w2, &o1, &o2, &mut worst, &mut failing);
            ran += 1;
            if failing.is_some() {
                break;
            }
        }
    } else {
        for t in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let w1 = Bits::random(lens[0], &mut rng);
            let w2 = Bits::random(lens[1], &mut rng);
            let o1 = Bits::random(lens[2], &mut rng);
            let o2 = Bits::random(lens[3], &mut rng);
            consider(&mut runner, &w1, &w2, &o1, &o2, &mut worst, &mut failing);
            ran += 1;
        }
    }

    let err_prob = |worst: u64, len: usize| -> Rat {
        if len == 0 {
            rat(0)
        } else {
            Rat::new(worst.into(), (len as u64).into())
        }
    };
    let verdict = match failing {
        None => Verdict::ZeroError,
        Some((w1, w2, o1, o2)) => {
            let trace = channel::simulate(p, s1, s2, &w1, &w2, &o1, &o2)?;
            Verdict::Failed(Box::new(trace))
        }
    };
    Ok(SimulationReport {
        rates: (s1.achieved_rate(), s2.achieved_rate()),
        error_probs: (
            err_prob(worst[0], lens[0]),
            err_prob(worst[1], lens[1]),
        ),
        trials: ran,
        exhaustive: exhaustive_mode,
        verdict,
    })
}

/// The interference-free scheme: `(n_ii - n_ij)^+` fresh bits per use on
/// the top levels, zeros elsewhere, decoded directly off the clean output
/// positions. Achievable no matter what the other pair transmits.
pub fn floor_scheme(p: &ChannelParams, i: User) -> Scheme {
    floor_scheme_with_blocks(p, i, 3)
}

pub fn floor_scheme_with_blocks(p: &ChannelParams, i: User, blocks: usize) -> Scheme {
    let q = p.q() as usize;
    assert!(q >= 1, "degenerate channel has no levels");
    let direct = p.direct(i) as usize;
    let fresh = direct.saturating_sub(p.cross_into(i) as usize);
    let mut row = vec![Assignment::Zero; q];
    for (s, slot) in row.iter_mut().take(fresh).enumerate() {
        *slot = Assignment::Fresh(s);
    }
    let mut rows = Vec::with_capacity(fresh * blocks);
    for n in 1..=blocks {
        for s in 0..fresh {
            rows.push(vec![Term::Obs {
                use_idx: n,
                level: q - direct + s + 1,
            }]);
        }
    }
    Scheme {
        user: i.index(),
        pattern_length: 1,
        blocks,
        levels: vec![row],
        tail: Vec::new(),
        decoder: Decoder { rows },
        fresh_rate: rat(fresh as i64),
        random_rate: rat(0),
    }
}

/// All-zero scheme: transmits nothing, decodes nothing.
pub fn zero_scheme(p: &ChannelParams, i: User, blocks: usize) -> Scheme {
    let q = p.q() as usize;
    assert!(q >= 1);
    Scheme {
        user: i.index(),
        pattern_length: 1,
        blocks,
        levels: vec![vec![Assignment::Zero; q]],
        tail: Vec::new(),
        decoder: Decoder { rows: Vec::new() },
        fresh_rate: rat(0),
        random_rate: rat(0),
    }
}

/// Derives an explicit linear decoder for `scheme` against a fixed opponent
/// by probing the channel with basis inputs, or `None` when the scheme's
/// message is not identifiable at its receiver. The scheme must not use
/// common randomness (its own omega would be side information; callers in
/// the deviation search never need it).
pub fn derive_decoder(
    p: &ChannelParams,
    scheme: &Scheme,
    opponent: &Scheme,
) -> Result<Option<Decoder>, ChannelError> {
    assert_eq!(scheme.randomness_len(), 0, "candidate uses no randomness");
    let me = scheme.user_id();
    let probe = Scheme {
        decoder: Decoder {
            rows: vec![Vec::new(); scheme.message_len()],
        },
        ..scheme.clone()
    };
    let (l_me, l_op) = (probe.layout(p)?, opponent.layout(p)?);
    let q = p.q() as usize;
    let horizon = l_me.total_uses().max(l_op.total_uses());
    let obs_dim = q * horizon;
    assert!(obs_dim <= 64, "observation space too large for the solver");

    let (s1, s2) = match me {
        User::One => (&probe, opponent),
        User::Two => (opponent, &probe),
    };
    let stack = |trace: &SimTrace| -> u64 {
        let mut acc = 0u64;
        let y = match me {
            User::One => trace.uses.iter().map(|u| u.y1).collect::<Vec<_>>(),
            User::Two => trace.uses.iter().map(|u| u.y2).collect::<Vec<_>>(),
        };
        for (n, v) in y.iter().enumerate() {
            acc |= v.word() << (n * q);
        }
        acc
    };
    let run = |w_me: &Bits, w_op: &Bits, o_op: &Bits| -> Result<u64, ChannelError> {
        let empty = Bits::new(0);
        let trace = match me {
            User::One => channel::simulate(p, s1, s2, w_me, w_op, &empty, o_op)?,
            User::Two => channel::simulate(p, s1, s2, w_op, w_me, o_op, &empty)?,
        };
        Ok(stack(&trace))
    };

    let m = probe.message_len();
    let op_m = opponent.message_len();
    let op_o = opponent.randomness_len();
    let zero_me = Bits::new(m);
    let zero_op_w = Bits::new(op_m);
    let zero_op_o = Bits::new(op_o);
    let mut a_cols = Vec::with_capacity(m);
    for k in 0..m {
        let mut w = Bits::new(m);
        w.set(k, true);
        a_cols.push(run(&w, &zero_op_w, &zero_op_o)?);
    }
    let mut b_cols = Vec::with_capacity(op_m + op_o);
    for k in 0..op_m {
        let mut w = Bits::new(op_m);
        w.set(k, true);
        b_cols.push(run(&zero_me, &w, &zero_op_o)?);
    }
    for k in 0..op_o {
        let mut o = Bits::new(op_o);
        o.set(k, true);
        b_cols.push(run(&zero_me, &zero_op_w, &o)?);
    }

    let Some(rows) = crate::gf2::left_inverse_annihilating(&a_cols, &b_cols, obs_dim) else {
        return Ok(None);
    };
    let decoder_rows = rows
        .iter()
        .map(|mask| {
            let mut terms = Vec::new();
            for bit in 0..obs_dim {
                if mask >> bit & 1 == 1 {
                    terms.push(Term::Obs {
                        use_idx: bit / q + 1,
                        level: bit % q + 1,
                    });
                }
            }
            terms
        })
        .collect();
    Ok(Some(Decoder {
        rows: decoder_rows,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    fn fig_params() -> ChannelParams {
        ChannelParams::new(7, 6, 4, 4, 0, 0)
    }

    #[test]
    fn floor_scheme_rates() {
        let p = fig_params();
        assert_eq!(floor_scheme(&p, User::One).achieved_rate(), rat(3));
        assert_eq!(floor_scheme(&p, User::Two).achieved_rate(), rat(2));
        let weak = ChannelParams::new(2, 2, 5, 5, 0, 0);
        assert_eq!(floor_scheme(&weak, User::One).achieved_rate(), rat(0));
    }

    #[test]
    fn floor_scheme_validates_clean() {
        let p = fig_params();
        assert!(floor_scheme(&p, User::One).validate(&p).is_clean());
        assert!(floor_scheme(&p, User::Two).validate(&p).is_clean());
        assert!(zero_scheme(&p, User::One, 3).validate(&p).is_clean());
    }

    #[test]
    fn validate_flags_out_of_range_level() {
        let p = fig_params();
        let mut s = floor_scheme(&p, User::One);
        s.decoder.rows[0] = vec![Term::Obs {
            use_idx: 1,
            level: 8,
        }];
        let d = s.validate(&p);
        assert!(!d.is_clean());
        assert!(d.0[0].contains("level 8"));
    }

    #[test]
    fn validate_flags_zero_lag_relay() {
        let p = ChannelParams::new(7, 6, 4, 4, 7, 0);
        let mut s = floor_scheme(&p, User::One);
        s.levels[0][6] = Assignment::Relay {
            fb_level: 7,
            lag: 0,
        };
        let d = s.validate(&p);
        assert!(d.0.iter().any(|m| m.contains("lag")));
    }

    #[test]
    fn validate_flags_truncated_feedback_level() {
        let p = ChannelParams::new(7, 6, 4, 4, 5, 0);
        let mut s = floor_scheme(&p, User::One);
        // Shift is 2, so levels 1 and 2 of the feedback are truncated away.
        s.levels[0][6] = Assignment::Relay {
            fb_level: 2,
            lag: 1,
        };
        let d = s.validate(&p);
        assert!(d.0.iter().any(|m| m.contains("truncated")));
    }

    #[test]
    fn validate_flags_repeated_fresh_position() {
        let p = fig_params();
        let mut s = floor_scheme(&p, User::One);
        s.levels[0][4] = Assignment::Fresh(0);
        let d = s.validate(&p);
        assert!(!d.is_clean());
    }

    #[test]
    fn validate_flags_rate_mismatch() {
        let p = fig_params();
        let mut s = floor_scheme(&p, User::One);
        s.fresh_rate = ratio(7, 2);
        let d = s.validate(&p);
        assert!(d.0.iter().any(|m| m.contains("fresh rate")));
    }

    #[test]
    fn scheme_json_round_trip() {
        let p = ChannelParams::new(7, 6, 4, 4, 5, 0);
        let (s1, _s2) = builtin::pair_3_4(3);
        let text = serde_json::to_string_pretty(&s1).unwrap();
        let back: Scheme = serde_json::from_str(&text).unwrap();
        assert_eq!(s1, back);
        assert!(back.validate(&p).is_clean());
    }

    #[test]
    fn common_rates_of_floor_schemes() {
        let p = fig_params();
        // User 2's floor bits ride levels 1..2 which are visible at rx 1.
        let (c, r) = floor_scheme(&p, User::Two).common_rate_pair(&p);
        assert_eq!((c, r), (rat(2), rat(0)));
        // User 1's floor bits ride levels 1..3, visible at rx 2 (n21 = 4).
        let (c, r) = floor_scheme(&p, User::One).common_rate_pair(&p);
        assert_eq!((c, r), (rat(3), rat(0)));
    }

    #[test]
    fn zero_schemes_verify_with_zero_rates() {
        let p = fig_params();
        let s1 = zero_scheme(&p, User::One, 3);
        let s2 = zero_scheme(&p, User::Two, 3);
        let report = run_and_verify(&p, &s1, &s2, 8, false, 7).unwrap();
        assert!(report.is_zero_error());
        assert_eq!(report.rates, (rat(0), rat(0)));
    }

    #[test]
    fn floor_pair_verifies_exhaustively() {
        let p = fig_params();
        let s1 = floor_scheme(&p, User::One);
        let s2 = floor_scheme(&p, User::Two);
        let report = run_and_verify(&p, &s1, &s2, 0, false, 7).unwrap();
        assert!(report.exhaustive, "15 joint bits should auto-exhaust");
        assert!(report.is_zero_error());
        assert_eq!(report.rates, (rat(3), rat(2)));
        assert_eq!(report.error_probs, (rat(0), rat(0)));
    }

    #[test]
    fn broken_decoder_is_caught_with_counterexample() {
        let p = fig_params();
        let mut s1 = floor_scheme(&p, User::One);
        // Point one decoder row at an interfered position.
        s1.decoder.rows[0] = vec![Term::Obs {
            use_idx: 1,
            level: 7,
        }];
        let s2 = floor_scheme(&p, User::Two);
        let report = run_and_verify(&p, &s1, &s2, 64, false, 7).unwrap();
        match report.verdict {
            Verdict::Failed(trace) => {
                assert!(trace.error_probability(User::One) > rat(0));
            }
            Verdict::ZeroError => panic!("expected a counterexample"),
        }
    }

    #[test]
    fn run_and_verify_requires_three_blocks() {
        let p = fig_params();
        let s1 = floor_scheme_with_blocks(&p, User::One, 2);
        let s2 = floor_scheme(&p, User::Two);
        assert!(matches!(
            run_and_verify(&p, &s1, &s2, 4, false, 7),
            Err(ChannelError::InvalidScheme(SchemeError::TooFewBlocks(2)))
        ));
    }

    #[test]
    fn relay_bits_match_feedback_replay() {
        // Replaying the trace confirms every relay-assigned input bit equals
        // the referenced feedback bit with the own contribution removed.
        let p = ChannelParams::new(7, 6, 4, 4, 5, 0);
        let (s1, s2) = builtin::pair_5_4(4);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let w1 = Bits::random(s1.message_len(), &mut rng);
        let w2 = Bits::random(s2.message_len(), &mut rng);
        let o1 = Bits::new(0);
        let o2 = Bits::new(0);
        let trace = channel::simulate(&p, &s1, &s2, &w1, &w2, &o1, &o2).unwrap();
        let q = p.q() as usize;
        let shift = p.feedback_shift(User::One) as usize;
        for n in 1..=trace.uses.len() {
            for (idx, a) in s1.row_at(n).iter().enumerate() {
                if let Assignment::Relay { fb_level, lag } = a {
                    let got = trace.uses[n - 1].x1.get(idx + 1);
                    let expect = if n > *lag {
                        let m = n - lag;
                        let raw = trace.uses[m - 1].fb1.get(*fb_level);
                        let src = fb_level - shift - (q - p.n11 as usize);
                        raw ^ trace.uses[m - 1].x1.get(src)
                    } else {
                        false
                    };
                    assert_eq!(got, expect, "use {n} level {}", idx + 1);
                }
            }
        }
    }

    #[test]
    fn derive_decoder_recovers_floor_decoder() {
        let p = fig_params();
        let s1 = floor_scheme(&p, User::One);
        let s2 = floor_scheme(&p, User::Two);
        let d = derive_decoder(&p, &s1, &s2).unwrap().unwrap();
        let rebuilt = Scheme {
            decoder: d,
            ..s1.clone()
        };
        let report = run_and_verify(&p, &rebuilt, &s2, 0, false, 7).unwrap();
        assert!(report.is_zero_error());
    }

    #[test]
    fn derive_decoder_rejects_hopeless_scheme() {
        // Fresh bits on fully interfered levels against a full-rate opponent
        // that occupies the same positions.
        let p = ChannelParams::new(4, 4, 4, 4, 0, 0);
        let mut cand = zero_scheme(&p, User::One, 3);
        cand.levels[0][0] = Assignment::Fresh(0);
        cand.fresh_rate = rat(1);
        cand.decoder.rows = vec![Vec::new(); cand.message_len()];
        let mut opp = zero_scheme(&p, User::Two, 3);
        opp.levels[0][0] = Assignment::Fresh(0);
        opp.fresh_rate = rat(1);
        opp.decoder.rows = vec![Vec::new(); opp.message_len()];
        assert!(derive_decoder(&p, &cand, &opp).unwrap().is_none());
    }
}
