//! Built-in schemes for the worked channel (7,6,4,4,5,0).
//!
//! Both pairs exploit the first user's feedback: transmitter 1 observes
//! feedback levels 6 and 7, which carry the other user's top two input bits
//! from the previous use (after removing its own contribution), and relays
//! them on its levels 3 and 4 so receiver 2 can cancel the interference it
//! has already seen.

use crate::channel::ChannelParams;
use crate::rat::rat;

use super::{Assignment, Decoder, Scheme, Term};

use Assignment::{Fresh, Random, Relay, Zero};

/// The channel both built-in pairs are constructed for.
pub fn pair_channel() -> ChannelParams {
    ChannelParams::new(7, 6, 4, 4, 5, 0)
}

fn obs(use_idx: usize, level: usize) -> Term {
    Term::Obs { use_idx, level }
}

/// Rate pair (3, 4): user 1 keeps to its three clean positions while user 2
/// burns one common-random bit per use on level 3 to occupy receiver 1's
/// remaining headroom. User 2's own receiver knows those bits, so they cost
/// it nothing.
pub fn pair_3_4(blocks: usize) -> (Scheme, Scheme) {
    let n = blocks;
    let s1 = Scheme {
        user: 1,
        pattern_length: 1,
        blocks: n,
        levels: vec![vec![
            Fresh(0),
            Fresh(1),
            Relay { fb_level: 6, lag: 1 },
            Relay { fb_level: 7, lag: 1 },
            Zero,
            Zero,
            Fresh(2),
        ]],
        tail: Vec::new(),
        decoder: Decoder {
            rows: (1..=n)
                .flat_map(|u| [vec![obs(u, 1)], vec![obs(u, 2)], vec![obs(u, 7)]])
                .collect(),
        },
        fresh_rate: rat(3),
        random_rate: rat(0),
    };
    let s2 = Scheme {
        user: 2,
        pattern_length: 1,
        blocks: n,
        levels: vec![vec![
            Fresh(0),
            Fresh(1),
            Random(0),
            Zero,
            Fresh(2),
            Fresh(3),
            Zero,
        ]],
        tail: Vec::new(),
        decoder: Decoder {
            rows: (1..=n)
                .flat_map(|u| {
                    let mut b3 = vec![obs(u, 6)];
                    let mut b4 = vec![obs(u, 7)];
                    if u >= 2 {
                        // Levels 5 and 6 arrive under transmitter 1's relays
                        // of this user's own previous top bits.
                        b3.push(obs(u - 1, 2));
                        b4.push(obs(u - 1, 3));
                    }
                    [vec![obs(u, 2)], vec![obs(u, 3)], b3, b4]
                })
                .collect(),
        },
        fresh_rate: rat(4),
        random_rate: rat(1),
    };
    (s1, s2)
}

/// Rate pair (5, 4): no common randomness anywhere. User 1 adds fresh bits
/// on levels 5..7; the bit on level 5 collides with user 2's second stream
/// and is recovered through the relay one use later, so the final use sends
/// zero there.
pub fn pair_5_4(blocks: usize) -> (Scheme, Scheme) {
    let n = blocks;
    let steady = vec![
        Fresh(0),
        Fresh(1),
        Relay { fb_level: 7, lag: 1 },
        Relay { fb_level: 6, lag: 1 },
        Fresh(2),
        Fresh(3),
        Fresh(4),
    ];
    let mut last = steady.clone();
    last[4] = Zero;
    let mut rows1 = Vec::with_capacity(5 * n - 1);
    for u in 1..=n {
        rows1.push(vec![obs(u, 1)]);
        rows1.push(vec![obs(u, 2)]);
        if u < n {
            // Level 5 output carries a3 xor the opponent's second stream,
            // which shows up clean on level 3 one use later via the relay.
            rows1.push(vec![obs(u, 5), obs(u + 1, 3)]);
        }
        rows1.push(vec![obs(u, 6)]);
        rows1.push(vec![obs(u, 7)]);
    }
    let s1 = Scheme {
        user: 1,
        pattern_length: 1,
        blocks: n,
        levels: vec![steady],
        tail: vec![last],
        decoder: Decoder { rows: rows1 },
        fresh_rate: rat(5),
        random_rate: rat(0),
    };
    let s2 = Scheme {
        user: 2,
        pattern_length: 1,
        blocks: n,
        levels: vec![vec![
            Fresh(0),
            Fresh(1),
            Zero,
            Zero,
            Fresh(2),
            Fresh(3),
            Zero,
        ]],
        tail: Vec::new(),
        decoder: Decoder {
            rows: (1..=n)
                .flat_map(|u| {
                    let mut b3 = vec![obs(u, 6)];
                    let mut b4 = vec![obs(u, 7)];
                    if u >= 2 {
                        b3.push(obs(u - 1, 3));
                        b4.push(obs(u - 1, 2));
                    }
                    [vec![obs(u, 2)], vec![obs(u, 3)], b3, b4]
                })
                .collect(),
        },
        fresh_rate: rat(4),
        random_rate: rat(0),
    };
    (s1, s2)
}
