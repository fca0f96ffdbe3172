//! Equilibrium-level predicates: the game utility, membership of rate pairs
//! in the equilibrium region, the unilateral-deviation ceiling, the split
//! search that produces an explicit equilibrium witness, and a brute-force
//! deviation oracle over a restricted scheme class.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelParams, User};
use crate::polytope::{self, Constraint};
use crate::rat::{rat, ratio, Rat};
use crate::regions::{self, NashBounds, RatePair, RegionsError};
use crate::schemes::{self, Scheme, SimulationReport};

use num_traits::Zero;

#[derive(Debug, Error, PartialEq)]
pub enum EquilibriumError {
    #[error("eta must be positive")]
    NonPositiveEta,
    #[error("epsilon must satisfy 0 < epsilon < 1")]
    BadEpsilon,
    #[error("rates must be nonnegative")]
    NegativeRate,
    #[error("deviation class enumerates {0} schemes, above the {1} cap")]
    ClassTooLarge(u64, u64),
    #[error("observation space of {0} bits exceeds the 64-bit solver")]
    ObservationTooLarge(usize),
    #[error(transparent)]
    Regions(#[from] RegionsError),
    #[error("channel error: {0}")]
    Channel(#[from] crate::channel::ChannelError),
}

/// One user's five split components, bits per channel use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitComponents {
    #[serde(with = "crate::rat::serde_str")]
    pub c1: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub r1: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub c2: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub r2: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub p: Rat,
}

impl SplitComponents {
    /// Transmission rate: C1 + C2 + P.
    pub fn rate(&self) -> Rat {
        &self.c1 + &self.c2 + &self.p
    }

    /// Common rate: C1 + C2.
    pub fn common(&self) -> Rat {
        &self.c1 + &self.c2
    }

    /// Random rate: R1 + R2.
    pub fn random(&self) -> Rat {
        &self.r1 + &self.r2
    }

    pub fn all_nonnegative(&self) -> bool {
        [&self.c1, &self.r1, &self.c2, &self.r2, &self.p]
            .iter()
            .all(|v| **v >= Rat::zero())
    }
}

/// The ten-component rate split of an equilibrium witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSplit {
    pub user1: SplitComponents,
    pub user2: SplitComponents,
}

impl RateSplit {
    pub fn components(&self, i: User) -> &SplitComponents {
        match i {
            User::One => &self.user1,
            User::Two => &self.user2,
        }
    }

    fn as_vec(&self) -> Vec<Rat> {
        let u = |s: &SplitComponents| {
            vec![
                s.c1.clone(),
                s.r1.clone(),
                s.c2.clone(),
                s.r2.clone(),
                s.p.clone(),
            ]
        };
        let mut v = u(&self.user1);
        v.extend(u(&self.user2));
        v
    }

    fn from_slice(v: &[Rat]) -> RateSplit {
        let u = |o: usize| SplitComponents {
            c1: v[o].clone(),
            r1: v[o + 1].clone(),
            c2: v[o + 2].clone(),
            r2: v[o + 3].clone(),
            p: v[o + 4].clone(),
        };
        RateSplit {
            user1: u(0),
            user2: u(5),
        }
    }

    /// Direct substitution into all 24 rate-splitting rows.
    pub fn satisfies_hk(&self, p: &ChannelParams) -> bool {
        regions::hk_system(p).satisfied_by(&self.as_vec())
    }

    /// Slack of the saturation condition at receiver i: theta_2,i minus the
    /// own rate plus opposing common-plus-random rate. An equilibrium
    /// witness has slack in [0, eta].
    pub fn saturation_slack(&self, p: &ChannelParams, i: User) -> Rat {
        let own = self.components(i).rate();
        let opp = self.components(i.other());
        rat(regions::theta(p, i).get(2)) - own - opp.common() - opp.random()
    }

    /// The shifted-aggregate equilibrium identity, re-verified exactly: with
    /// aggregates lifted by eta/6, both sides of the saturation equality
    /// match once the witness's own slack is accounted for.
    pub fn equilibrium_identity_holds(&self, p: &ChannelParams, eta: &Rat) -> bool {
        let sixth = eta / rat(6);
        for i in User::BOTH {
            let j = i.other();
            let own = self.components(i);
            let opp = self.components(j);
            let lhs = (own.common() + &sixth)
                + (own.p.clone() + &sixth)
                + (opp.common() + &sixth)
                + (opp.random() + &sixth);
            let slack = self.saturation_slack(p, i);
            let rhs = rat(regions::theta(p, i).get(2)) + ratio(2, 3) * eta - slack;
            if lhs != rhs {
                return false;
            }
        }
        true
    }
}

/// The game utility: the transmission rate when the decoder meets the error
/// threshold, zero otherwise.
pub fn utility(report: &SimulationReport, i: User, epsilon: &Rat) -> Result<Rat, EquilibriumError> {
    if *epsilon <= Rat::zero() || *epsilon >= rat(1) {
        return Err(EquilibriumError::BadEpsilon);
    }
    if report.error_probability(i) < *epsilon {
        Ok(report.rate(i))
    } else {
        Ok(rat(0))
    }
}

/// Outcome of one play of the game: configurations, utilities, threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub scheme1: String,
    pub scheme2: String,
    #[serde(with = "crate::rat::serde_str")]
    pub u1: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub u2: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub epsilon: Rat,
}

impl GameOutcome {
    pub fn from_report(
        scheme1: impl Into<String>,
        scheme2: impl Into<String>,
        report: &SimulationReport,
        epsilon: &Rat,
    ) -> Result<GameOutcome, EquilibriumError> {
        Ok(GameOutcome {
            scheme1: scheme1.into(),
            scheme2: scheme2.into(),
            u1: utility(report, User::One, epsilon)?,
            u2: utility(report, User::Two, epsilon)?,
            epsilon: epsilon.clone(),
        })
    }
}

/// Default error threshold for the utility. Immaterial for zero-error
/// schemes, but the game definition needs one.
pub fn default_epsilon() -> Rat {
    ratio(1, 1000)
}

/// Membership of a rate pair in the equilibrium region, decided directly:
/// the simplex membership oracle for C plus the closed-form bounds. Agrees
/// with `contains_point` on the projected region; the tests pin that.
pub fn is_ne_rate_pair(
    p: &ChannelParams,
    eta: &Rat,
    r: &RatePair,
) -> Result<bool, EquilibriumError> {
    let b = regions::nash_bounds(p, eta)?;
    Ok(in_bounds(&b, r) && regions::capacity_contains_lp(p, &r.r1, &r.r2))
}

fn in_bounds(b: &NashBounds, r: &RatePair) -> bool {
    User::BOTH
        .iter()
        .all(|&i| b.lower(i) <= r.rate(i) && r.rate(i) <= b.upper(i))
}

/// The bound on any rate reachable by a unilateral deviation of user i when
/// the other pair holds common rate `r_jc` and random rate `r_jr`:
/// `max(n_ii, n_ij) - (r_jc + r_jr) + (2/3) eta`.
pub fn deviation_ceiling(
    p: &ChannelParams,
    i: User,
    r_jc: &Rat,
    r_jr: &Rat,
    eta: &Rat,
) -> Result<Rat, EquilibriumError> {
    if *eta <= Rat::zero() {
        return Err(EquilibriumError::NonPositiveEta);
    }
    if *r_jc < Rat::zero() || *r_jr < Rat::zero() {
        return Err(EquilibriumError::NegativeRate);
    }
    let ceiling = rat(p.direct(i).max(p.cross_into(i)) as i64);
    Ok(ceiling - r_jc - r_jr + ratio(2, 3) * eta)
}

/// Searches for a ten-component split witnessing that `r` is achievable at
/// an equilibrium: the split must satisfy the rate-splitting system, sum to
/// the requested rates, and saturate both receivers to within eta. A
/// witness exists exactly when `r` lies in the equilibrium region.
pub fn ne_split_search(
    p: &ChannelParams,
    eta: &Rat,
    r: &RatePair,
) -> Result<Option<RateSplit>, EquilibriumError> {
    if *eta <= Rat::zero() {
        return Err(EquilibriumError::NonPositiveEta);
    }
    if r.r1 < Rat::zero() || r.r2 < Rat::zero() {
        return Err(EquilibriumError::NegativeRate);
    }
    let mut sys = regions::hk_system(p);
    // Rate sums pinned to the query; saturation band below each ceiling.
    let comp_base = |i: User| (i.index() - 1) * 5;
    for i in User::BOTH {
        let base = comp_base(i);
        let mut coeffs = vec![Rat::zero(); 10];
        coeffs[base] = rat(1); // C1
        coeffs[base + 2] = rat(1); // C2
        coeffs[base + 4] = rat(1); // P
        sys.push(Constraint::eq(coeffs, r.rate(i).clone()));

        let jbase = comp_base(i.other());
        let mut coeffs = vec![Rat::zero(); 10];
        for f in [0, 1, 2, 3] {
            coeffs[jbase + f] = rat(-1);
        }
        let rhs = r.rate(i) - (rat(regions::theta(p, i).get(2)) - eta);
        sys.push(Constraint::le(coeffs, rhs));
    }
    Ok(polytope::feasible_point(&sys).map(|v| RateSplit::from_slice(&v)))
}

/// Bounds on the brute-force deviation search.
#[derive(Clone, Debug)]
pub struct DeviationClass {
    /// Patterns of 1..=this many uses are enumerated.
    pub max_pattern_len: usize,
    /// Blocks per candidate; at least 3 so the steady state is exercised.
    pub blocks: usize,
    /// Include single-lag relay assignments on observable feedback levels.
    pub allow_relay: bool,
    /// Hard cap on the enumeration size.
    pub max_candidates: u64,
}

impl Default for DeviationClass {
    fn default() -> Self {
        DeviationClass {
            max_pattern_len: 2,
            blocks: 3,
            allow_relay: true,
            max_candidates: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOutcome {
    /// Best zero-error rate over the class.
    #[serde(with = "crate::rat::serde_str")]
    pub best_rate: Rat,
    /// Schemes enumerated.
    pub candidates: u64,
    /// Candidates that admitted a decoder and were simulated.
    pub decodable: u64,
}

/// Exhaustively enumerates deviating schemes for the user opposing `fixed`
/// within the class bounds, keeps those that decode error-free against the
/// fixed scheme, and returns the best rate found. Compare against the held
/// utility plus eta for a class-restricted equilibrium certificate.
pub fn restricted_deviation_oracle(
    p: &ChannelParams,
    fixed: &Scheme,
    class: &DeviationClass,
    trials: usize,
    seed: u64,
) -> Result<OracleOutcome, EquilibriumError> {
    fixed
        .validate(p)
        .into_result()
        .map_err(crate::channel::ChannelError::from)?;
    let deviator = fixed.user_id().other();
    let q = p.q() as usize;
    let fb_shift = p.feedback_shift(deviator) as usize;
    let span = p.direct(deviator).max(p.cross_into(deviator)) as usize;
    let mut options: Vec<Assignment> = vec![Assignment::Zero];
    if class.allow_relay {
        for fb_level in (fb_shift + 1)..=q {
            // Skip feedback levels whose carried output position is above
            // every arriving signal; they are structurally zero.
            if fb_level - fb_shift > q - span {
                options.push(Assignment::Relay { fb_level, lag: 1 });
            }
        }
    }
    // Fresh goes last so the earliest candidates are cheap all-zero ones.
    options.push(Assignment::Fresh(0));

    let mut total: u64 = 0;
    for len in 1..=class.max_pattern_len {
        let slots = (len * q) as u32;
        total = total.saturating_add((options.len() as u64).saturating_pow(slots));
    }
    if total > class.max_candidates {
        return Err(EquilibriumError::ClassTooLarge(total, class.max_candidates));
    }
    let horizon = (class.max_pattern_len * class.blocks).max(fixed.total_uses());
    if q * horizon > 64 {
        return Err(EquilibriumError::ObservationTooLarge(q * horizon));
    }

    let mut best = rat(0);
    let mut decodable = 0u64;
    for len in 1..=class.max_pattern_len {
        let slots = len * q;
        let mut digits = vec![0usize; slots];
        loop {
            let candidate = build_candidate(deviator, q, len, class.blocks, &digits, &options);
            if candidate.fresh_rate > best {
                let ordered = |a: &Scheme, b: &Scheme| match deviator {
                    User::One => (a.clone(), b.clone()),
                    User::Two => (b.clone(), a.clone()),
                };
                if let Some(decoder) = schemes::derive_decoder(p, &candidate, fixed)? {
                    decodable += 1;
                    let full = Scheme {
                        decoder,
                        ..candidate.clone()
                    };
                    let (s1, s2) = ordered(&full, fixed);
                    let report = schemes::run_and_verify(p, &s1, &s2, trials, false, seed)?;
                    if report.is_zero_error() {
                        best = full.fresh_rate.clone();
                    }
                }
            }
            // Mixed-radix increment over the slot assignments.
            let mut carry = true;
            for d in digits.iter_mut() {
                if !carry {
                    break;
                }
                *d += 1;
                if *d == options.len() {
                    *d = 0;
                } else {
                    carry = false;
                }
            }
            if carry {
                break;
            }
        }
    }
    Ok(OracleOutcome {
        best_rate: best,
        candidates: total,
        decodable,
    })
}

use crate::schemes::{Assignment, Decoder};

fn build_candidate(
    user: User,
    q: usize,
    pattern_len: usize,
    blocks: usize,
    digits: &[usize],
    options: &[Assignment],
) -> Scheme {
    let mut fresh_count = 0usize;
    let mut levels = Vec::with_capacity(pattern_len);
    for u in 0..pattern_len {
        let mut row = Vec::with_capacity(q);
        for l in 0..q {
            let a = match options[digits[u * q + l]] {
                Assignment::Fresh(_) => {
                    let a = Assignment::Fresh(fresh_count);
                    fresh_count += 1;
                    a
                }
                other => other,
            };
            row.push(a);
        }
        levels.push(row);
    }
    let msg_len = fresh_count * blocks;
    Scheme {
        user: user.index(),
        pattern_length: pattern_len,
        blocks,
        levels,
        tail: Vec::new(),
        decoder: Decoder {
            rows: vec![Vec::new(); msg_len],
        },
        fresh_rate: Rat::new((fresh_count as i64).into(), (pattern_len as i64).into()),
        random_rate: rat(0),
    }
}
