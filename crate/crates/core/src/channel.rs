//! Channel law of the two-user linear deterministic interference channel
//! with noisy output feedback, plus the bit-level block simulator.
//!
//! Receiver i observes `S^(q - n_ii) x_i + S^(q - n_ij) x_j` over GF(2);
//! transmitter i observes a truncated, unit-delayed copy of its receiver's
//! output. Everything here is deterministic, so error probabilities are
//! exact rationals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::Bits;
use crate::gf2::BitVector;
use crate::rat::{fmt_rat, Rat};
use crate::schemes::{Scheme, SchemeError};

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("input dimension {got} does not match q = {q}")]
    BadDimension { q: usize, got: usize },
    #[error("bit strings differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty message has no bit error probability")]
    EmptyMessage,
    #[error("channel is degenerate: q = 0")]
    DegenerateChannel,
    #[error("scheme invalid: {0}")]
    InvalidScheme(#[from] SchemeError),
    #[error("message bits for user {user}: expected {expected}, got {got}")]
    MessageLength {
        user: usize,
        expected: usize,
        got: usize,
    },
    #[error("randomness bits for user {user}: expected {expected}, got {got}")]
    RandomnessLength {
        user: usize,
        expected: usize,
        got: usize,
    },
}

/// Transmitter-receiver pair index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum User {
    One,
    Two,
}

impl User {
    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            User::One => 1,
            User::Two => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<User> {
        match i {
            1 => Some(User::One),
            2 => Some(User::Two),
            _ => None,
        }
    }

    pub const BOTH: [User; 2] = [User::One, User::Two];
}

/// The six bit-pipe counts of one channel instance. `q` is always derived,
/// never stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChannelParams {
    pub n11: u32,
    pub n22: u32,
    pub n12: u32,
    pub n21: u32,
    pub fb11: u32,
    pub fb22: u32,
}

impl ChannelParams {
    pub fn new(n11: u32, n22: u32, n12: u32, n21: u32, fb11: u32, fb22: u32) -> Self {
        ChannelParams {
            n11,
            n22,
            n12,
            n21,
            fb11,
            fb22,
        }
    }

    /// `q = max(n11, n22, n12, n21)`; feedback parameters do not count.
    pub fn q(&self) -> u32 {
        self.n11.max(self.n22).max(self.n12).max(self.n21)
    }

    /// Direct gain of user i.
    pub fn direct(&self, i: User) -> u32 {
        match i {
            User::One => self.n11,
            User::Two => self.n22,
        }
    }

    /// Cross gain into receiver i (from the other transmitter).
    pub fn cross_into(&self, i: User) -> u32 {
        match i {
            User::One => self.n12,
            User::Two => self.n21,
        }
    }

    pub fn feedback(&self, i: User) -> u32 {
        match i {
            User::One => self.fb11,
            User::Two => self.fb22,
        }
    }

    /// Shift applied to receiver i's output on the way back to transmitter
    /// i: `(max(n_ii, n_ij) - fb_ii)^+`.
    pub fn feedback_shift(&self, i: User) -> u32 {
        self.direct(i).max(self.cross_into(i)).saturating_sub(self.feedback(i))
    }

    /// Same channel with both feedback links removed.
    pub fn without_feedback(&self) -> ChannelParams {
        ChannelParams {
            fb11: 0,
            fb22: 0,
            ..*self
        }
    }

    /// Same channel with perfect feedback on both links.
    pub fn with_perfect_feedback(&self) -> ChannelParams {
        ChannelParams {
            fb11: self.n11.max(self.n12),
            fb22: self.n22.max(self.n21),
            ..*self
        }
    }

    /// Swaps the two users' roles.
    pub fn swapped(&self) -> ChannelParams {
        ChannelParams {
            n11: self.n22,
            n22: self.n11,
            n12: self.n21,
            n21: self.n12,
            fb11: self.fb22,
            fb22: self.fb11,
        }
    }
}

pub fn derive_q(p: &ChannelParams) -> u32 {
    p.q()
}

/// Receiver i's output for the pair of channel inputs.
pub fn forward_output(
    p: &ChannelParams,
    x1: &BitVector,
    x2: &BitVector,
    i: User,
) -> Result<BitVector, ChannelError> {
    let q = p.q() as usize;
    for x in [x1, x2] {
        if x.dim() != q {
            return Err(ChannelError::BadDimension { q, got: x.dim() });
        }
    }
    let (own, other) = match i {
        User::One => (x1, x2),
        User::Two => (x2, x1),
    };
    let own_shift = q - p.direct(i) as usize;
    let cross_shift = q - p.cross_into(i) as usize;
    let out = own.lower_shift(own_shift).word() ^ other.lower_shift(cross_shift).word();
    Ok(BitVector::from_word(q, out))
}

/// The feedback view of one receiver output. The unit delay is applied by
/// the caller: the feedback of use n is observable only from use n + 1.
pub fn feedback_output(
    p: &ChannelParams,
    y_fwd: &BitVector,
    i: User,
) -> Result<BitVector, ChannelError> {
    let q = p.q() as usize;
    if y_fwd.dim() != q {
        return Err(ChannelError::BadDimension { q, got: y_fwd.dim() });
    }
    Ok(y_fwd.lower_shift(p.feedback_shift(i) as usize))
}

/// Average bit error probability: mismatches over message length, exact.
pub fn bit_error_probability(sent: &Bits, decoded: &Bits) -> Result<Rat, ChannelError> {
    if sent.len() != decoded.len() {
        return Err(ChannelError::LengthMismatch(sent.len(), decoded.len()));
    }
    if sent.is_empty() {
        return Err(ChannelError::EmptyMessage);
    }
    let mismatches = sent.count_mismatches(decoded);
    Ok(Rat::new(mismatches.into(), (sent.len() as u64).into()))
}

/// One channel use as recorded by the simulator.
#[derive(Clone, Debug, PartialEq)]
pub struct UseRecord {
    pub x1: BitVector,
    pub x2: BitVector,
    pub y1: BitVector,
    pub y2: BitVector,
    pub fb1: BitVector,
    pub fb2: BitVector,
}

/// Full record of one simulated transmission: inputs, both outputs, both
/// feedback signals, and the sent/decoded message bits of both users.
#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace {
    pub params: ChannelParams,
    pub n1: usize,
    pub n2: usize,
    pub uses: Vec<UseRecord>,
    pub sent: [Bits; 2],
    pub decoded: [Bits; 2],
}

impl SimTrace {
    pub fn error_probability(&self, i: User) -> Rat {
        let idx = i.index() - 1;
        if self.sent[idx].is_empty() {
            return Rat::from_integer(0.into());
        }
        bit_error_probability(&self.sent[idx], &self.decoded[idx]).expect("lengths match")
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct UseJson {
            x1: String,
            x2: String,
            y1: String,
            y2: String,
            fb1: String,
            fb2: String,
        }
        #[derive(Serialize)]
        struct TraceJson<'a> {
            params: &'a ChannelParams,
            n1: usize,
            n2: usize,
            uses: Vec<UseJson>,
            sent: [String; 2],
            decoded: [String; 2],
            error_probs: [String; 2],
        }
        let json = TraceJson {
            params: &self.params,
            n1: self.n1,
            n2: self.n2,
            uses: self
                .uses
                .iter()
                .map(|u| UseJson {
                    x1: u.x1.to_hex(),
                    x2: u.x2.to_hex(),
                    y1: u.y1.to_hex(),
                    y2: u.y2.to_hex(),
                    fb1: u.fb1.to_hex(),
                    fb2: u.fb2.to_hex(),
                })
                .collect(),
            sent: [self.sent[0].to_string(), self.sent[1].to_string()],
            decoded: [self.decoded[0].to_string(), self.decoded[1].to_string()],
            error_probs: [
                fmt_rat(&self.error_probability(User::One)),
                fmt_rat(&self.error_probability(User::Two)),
            ],
        };
        serde_json::to_string_pretty(&json).expect("trace serializes")
    }
}

/// Runs both schemes over the channel for `max(N_1, N_2)` uses. Inputs of a
/// finished user are zero-padded. Feedback has unit delay: the encoder at
/// use n sees the feedback of uses 1..n-1.
pub fn simulate(
    p: &ChannelParams,
    s1: &Scheme,
    s2: &Scheme,
    w1: &Bits,
    w2: &Bits,
    omega1: &Bits,
    omega2: &Bits,
) -> Result<SimTrace, ChannelError> {
    if p.q() == 0 {
        return Err(ChannelError::DegenerateChannel);
    }
    let l1 = s1.layout(p)?;
    let l2 = s2.layout(p)?;
    for (user, s, w, o) in [(1usize, s1, w1, omega1), (2, s2, w2, omega2)] {
        if w.len() != s.message_len() {
            return Err(ChannelError::MessageLength {
                user,
                expected: s.message_len(),
                got: w.len(),
            });
        }
        if o.len() != s.randomness_len() {
            return Err(ChannelError::RandomnessLength {
                user,
                expected: s.randomness_len(),
                got: o.len(),
            });
        }
    }

    let q = p.q() as usize;
    let n1 = s1.total_uses();
    let n2 = s2.total_uses();
    let horizon = n1.max(n2);
    let mut uses: Vec<UseRecord> = Vec::with_capacity(horizon);
    let mut fb_hist: [Vec<BitVector>; 2] = [Vec::with_capacity(horizon), Vec::with_capacity(horizon)];
    let mut x_hist: [Vec<BitVector>; 2] = [Vec::with_capacity(horizon), Vec::with_capacity(horizon)];

    for n in 1..=horizon {
        let x1 = if n <= n1 {
            l1.encode_use(n, w1, omega1, &fb_hist[0], &x_hist[0])
        } else {
            BitVector::zero(q)
        };
        let x2 = if n <= n2 {
            l2.encode_use(n, w2, omega2, &fb_hist[1], &x_hist[1])
        } else {
            BitVector::zero(q)
        };
        let y1 = forward_output(p, &x1, &x2, User::One)?;
        let y2 = forward_output(p, &x1, &x2, User::Two)?;
        let fb1 = feedback_output(p, &y1, User::One)?;
        let fb2 = feedback_output(p, &y2, User::Two)?;
        x_hist[0].push(x1);
        x_hist[1].push(x2);
        fb_hist[0].push(fb1);
        fb_hist[1].push(fb2);
        uses.push(UseRecord {
            x1,
            x2,
            y1,
            y2,
            fb1,
            fb2,
        });
    }

    let y1_all: Vec<BitVector> = uses.iter().map(|u| u.y1).collect();
    let y2_all: Vec<BitVector> = uses.iter().map(|u| u.y2).collect();
    let d1 = s1.decode(&y1_all, omega1);
    let d2 = s2.decode(&y2_all, omega2);

    Ok(SimTrace {
        params: *p,
        n1,
        n2,
        uses,
        sent: [w1.clone(), w2.clone()],
        decoded: [d1, d2],
    })
}
