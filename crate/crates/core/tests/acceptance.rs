//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Every tolerance is pinned here, in code.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ldic_core::bits::Bits;
use ldic_core::channel::{forward_output, ChannelParams, User};
use ldic_core::equilibrium::{
    deviation_ceiling, restricted_deviation_oracle, DeviationClass,
};
use ldic_core::gf2::BitVector;
use ldic_core::rat::{rat, ratio};
use ldic_core::regions::{
    capacity_contains_lp, capacity_region, inclusion_chain_check, nash_bounds, ne_region,
    ne_region_constructive, theta,
};
use ldic_core::schemes::{self, floor_scheme, run_and_verify, Scheme};

fn fig(fb11: u32, fb22: u32) -> ChannelParams {
    ChannelParams::new(7, 6, 4, 4, fb11, fb22)
}

/// The worked-channel family: every feedback setting up to perfect.
fn fig_family() -> Vec<ChannelParams> {
    let mut out = Vec::new();
    for fb11 in 0..=7 {
        for fb22 in 0..=6 {
            out.push(fig(fb11, fb22));
        }
    }
    out
}

fn random_tuples(count: usize, seed: u64) -> Vec<ChannelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            ChannelParams::new(
                rng.gen_range(0..=5),
                rng.gen_range(0..=5),
                rng.gen_range(0..=5),
                rng.gen_range(0..=5),
                rng.gen_range(0..=5),
                rng.gen_range(0..=5),
            )
        })
        .collect()
}

fn report(id: u32, name: &str, start: Instant) {
    println!(
        "acceptance criterion {id:2} ({name}): PASS in {:.2}s",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_01_figure_collapse_below_threshold() {
    let start = Instant::now();
    let eta = ratio(1, 100);
    let base = ne_region(&fig(0, 0), &eta).unwrap();
    for fb11 in 0..=4 {
        for fb22 in 0..=4 {
            let n = ne_region(&fig(fb11, fb22), &eta).unwrap();
            assert!(
                n.equals(&base),
                "equilibrium region changed at feedback ({fb11}, {fb22})"
            );
        }
    }
    assert!(
        start.elapsed().as_secs_f64() < 10.0,
        "collapse sweep exceeded 10 s"
    );
    report(1, "below-threshold feedback leaves the region unchanged", start);
}

#[test]
fn criterion_02_feedback_enlargement_above_threshold() {
    let start = Instant::now();
    let eta = ratio(1, 100);
    let base = ne_region(&fig(0, 0), &eta).unwrap();
    for fb11 in 5..=7 {
        for fb22 in 0..=4 {
            let n = ne_region(&fig(fb11, fb22), &eta).unwrap();
            assert!(
                n.strictly_contains(&base),
                "no strict enlargement at feedback ({fb11}, {fb22})"
            );
        }
    }
    report(2, "above-threshold feedback strictly enlarges the region", start);
}

#[test]
fn criterion_03_caption_points_are_members() {
    let start = Instant::now();
    let eta = ratio(1, 100);
    let n = ne_region(&fig(5, 0), &eta).unwrap();
    assert!(n.contains_point(&rat(3), &rat(4)));
    assert!(n.contains_point(&rat(5), &rat(4)));
    report(3, "rate pairs (3,4) and (5,4) lie in the region", start);
}

#[test]
fn criterion_04_bounds_table() {
    let start = Instant::now();
    let eta = ratio(1, 100);
    for fb22 in 0..=6u32 {
        let b = nash_bounds(&fig(0, fb22), &eta).unwrap();
        let expect = match fb22 {
            0..=4 => 5,
            5 => 6,
            _ => 7,
        };
        assert_eq!(b.u1, rat(expect) + &eta, "U1 at fb22 = {fb22}");
    }
    for fb11 in 0..=7u32 {
        let b = nash_bounds(&fig(fb11, 0), &eta).unwrap();
        let expect = match fb11 {
            0..=4 => 3,
            5 => 4,
            6 => 5,
            _ => 6,
        };
        assert_eq!(b.u2, rat(expect) + &eta, "U2 at fb11 = {fb11}");
    }
    report(4, "upper bounds match the hand-derived table", start);
}

#[test]
fn criterion_05_theta_regression_and_sweep() {
    let start = Instant::now();
    assert_eq!(theta(&fig(0, 0), User::One).as_array(), [0, 7, 4, 3, 4, 7, 7]);
    assert_eq!(theta(&fig(0, 0), User::Two).as_array(), [0, 6, 4, 2, 4, 6, 6]);
    assert_eq!(theta(&fig(7, 6), User::One).as_array(), [4, 7, 0, 3, 3, 3, 3]);

    let mut checked = 0u64;
    for n11 in 0..=5u32 {
        for n22 in 0..=5u32 {
            for n12 in 0..=5u32 {
                for n21 in 0..=5u32 {
                    for fb11 in 0..=5u32 {
                        for fb22 in 0..=5u32 {
                            let p = ChannelParams::new(n11, n22, n12, n21, fb11, fb22);
                            for i in User::BOTH {
                                let t = theta(&p, i);
                                assert!(t.as_array().iter().all(|&v| v >= 0));
                                assert_eq!(t.get(1) + t.get(3), p.cross_into(i) as i64);
                                assert_eq!(t.get(5), t.get(4).max(t.get(3)));
                                assert_eq!(t.get(7), t.get(3).max(t.get(6)));
                            }
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert_eq!(checked, 46_656);
    assert!(
        start.elapsed().as_secs_f64() < 60.0,
        "theta sweep exceeded 60 s"
    );
    report(5, "theta values and invariants over the full sweep", start);
}

#[test]
fn criterion_06_constructive_identity() {
    let start = Instant::now();
    let eta = ratio(1, 8);
    let mut instances = fig_family();
    instances.extend(random_tuples(200, 0x1d1c));
    for p in &instances {
        let direct = ne_region(p, &eta).unwrap();
        let constructive = ne_region_constructive(p, &eta).unwrap();
        assert!(
            constructive.equals(&direct),
            "constructive region differs at {p:?}"
        );
        assert_eq!(constructive.is_empty(), direct.is_empty());
    }
    report(6, "constructive region equals the intersection", start);
}

#[test]
fn criterion_07_inclusion_chain() {
    let start = Instant::now();
    let eta = ratio(1, 8);
    let mut instances = fig_family();
    instances.extend(random_tuples(200, 0x1d1c));
    for p in &instances {
        assert!(
            inclusion_chain_check(p, &eta).unwrap(),
            "inclusion chain failed at {p:?}"
        );
    }
    report(7, "no-feedback within given within perfect-feedback", start);
}

#[test]
fn criterion_08_projection_matches_lp_grid() {
    let start = Instant::now();
    let mut disagreements = 0u64;
    for p in random_tuples(50, 0xfeed) {
        let region = capacity_region(&p);
        let q = p.q() as i64;
        for num1 in 0..=(4 * q) {
            for num2 in 0..=(4 * q) {
                let r1 = ratio(num1, 4);
                let r2 = ratio(num2, 4);
                if region.contains_point(&r1, &r2) != capacity_contains_lp(&p, &r1, &r2) {
                    disagreements += 1;
                }
            }
        }
    }
    assert_eq!(disagreements, 0);
    report(8, "projected membership agrees with the simplex oracle", start);
}

/// One floor-scheme transmission against a raw interference sequence.
/// Returns the mismatch count of the decoded message.
fn floor_trial(
    p: &ChannelParams,
    i: User,
    scheme: &Scheme,
    w: &Bits,
    interference: &[u64],
) -> u64 {
    let q = p.q() as usize;
    let fresh = (p.direct(i) as usize).saturating_sub(p.cross_into(i) as usize);
    let n_uses = scheme.total_uses();
    let mut y = Vec::with_capacity(n_uses);
    for (n, noise) in interference.iter().take(n_uses).enumerate() {
        let mut own = BitVector::zero(q);
        for s in 0..fresh {
            if w.get(n * fresh + s) {
                own.set(s + 1, true);
            }
        }
        let other = BitVector::from_word(q, *noise);
        let (x1, x2) = match i {
            User::One => (own, other),
            User::Two => (other, own),
        };
        y.push(forward_output(p, &x1, &x2, i).unwrap());
    }
    let decoded = scheme.decode(&y, &Bits::new(0));
    w.count_mismatches(&decoded)
}

#[test]
fn criterion_09_floor_schemes_are_interference_proof() {
    let start = Instant::now();
    let interference_seqs_per_tuple = 1024usize;
    for n11 in 0..=7u32 {
        for n22 in 0..=7u32 {
            for n12 in 0..=7u32 {
                for n21 in 0..=7u32 {
                    let p = ChannelParams::new(n11, n22, n12, n21, 0, 0);
                    let q = p.q();
                    if q == 0 {
                        continue;
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(
                        (u64::from(n11) << 24)
                            | (u64::from(n22) << 16)
                            | (u64::from(n12) << 8)
                            | u64::from(n21),
                    );
                    for i in User::BOTH {
                        let s = floor_scheme(&p, i);
                        let expect = rat(
                            (p.direct(i) as i64 - p.cross_into(i) as i64).max(0),
                        );
                        assert_eq!(s.achieved_rate(), expect, "floor rate at {p:?}");
                        let m = s.message_len();
                        let n_uses = s.total_uses();
                        // True exhaustive message enumeration on one
                        // adversarial draw when the space is small.
                        let adversary: Vec<u64> =
                            (0..n_uses).map(|_| rng.gen::<u64>()).collect();
                        if m <= 12 {
                            for msg in 0..(1u64 << m) {
                                let w = Bits::from_u64(m, msg);
                                assert_eq!(floor_trial(&p, i, &s, &w, &adversary), 0);
                            }
                        }
                        // The decoding error is GF(2)-affine in the message
                        // for fixed interference, so the zero message plus
                        // every unit message certify the full message space.
                        for _ in 0..interference_seqs_per_tuple {
                            let adversary: Vec<u64> =
                                (0..n_uses).map(|_| rng.gen::<u64>()).collect();
                            let zero = Bits::new(m);
                            assert_eq!(floor_trial(&p, i, &s, &zero, &adversary), 0);
                            for k in 0..m {
                                let mut w = Bits::new(m);
                                w.set(k, true);
                                assert_eq!(
                                    floor_trial(&p, i, &s, &w, &adversary),
                                    0,
                                    "floor decode failed at {p:?} user {i:?}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    report(9, "floor schemes decode error-free under any interference", start);
}

#[test]
fn criterion_10_scheme_targets_via_files() {
    let start = Instant::now();
    let p = schemes::builtin::pair_channel();
    assert_eq!(p, fig(5, 0));

    let dir = std::env::temp_dir().join(format!("ldic-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let reload = |s: &Scheme, name: &str| -> Scheme {
        let path = dir.join(name);
        std::fs::write(&path, serde_json::to_string_pretty(s).unwrap()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        serde_json::from_str(&text).unwrap()
    };

    let (a1, a2) = schemes::builtin::pair_3_4(3);
    let (a1, a2) = (reload(&a1, "pair34-user1.json"), reload(&a2, "pair34-user2.json"));
    assert!(a2.random_rate > rat(0), "pair 2 must police with randomness");
    assert_eq!(a1.random_rate, rat(0));
    let report_34 = run_and_verify(&p, &a1, &a2, 0, true, 1).unwrap();
    assert!(report_34.exhaustive);
    assert!(report_34.is_zero_error());
    assert_eq!(report_34.rates, (rat(3), rat(4)));

    let (b1, b2) = schemes::builtin::pair_5_4(3);
    let (b1, b2) = (reload(&b1, "pair54-user1.json"), reload(&b2, "pair54-user2.json"));
    assert_eq!(b1.random_rate, rat(0));
    assert_eq!(b2.random_rate, rat(0));
    let report_54 = run_and_verify(&p, &b1, &b2, 0, true, 1).unwrap();
    assert!(report_54.exhaustive);
    assert!(report_54.is_zero_error());
    assert_eq!(report_54.rates, (rat(5), rat(4)));

    std::fs::remove_dir_all(&dir).ok();
    report(10, "scheme targets (3,4) and (5,4) verify exhaustively", start);
}

#[test]
fn criterion_11_class_restricted_equilibrium() {
    let start = Instant::now();
    let p = fig(0, 0);
    let eta = ratio(1, 10);
    let class = DeviationClass::default();
    for (fixed_user, expected_best) in [(User::Two, rat(5)), (User::One, rat(3))] {
        let fixed = floor_scheme(&p, fixed_user);
        let deviator = fixed_user.other();
        let out = restricted_deviation_oracle(&p, &fixed, &class, 12, 17).unwrap();
        assert!(out.candidates <= 1_000_000);
        let (r_c, r_r) = fixed.common_rate_pair(&p);
        let ceiling = deviation_ceiling(&p, deviator, &r_c, &r_r, &eta).unwrap();
        assert!(
            out.best_rate <= ceiling,
            "oracle best {} exceeds ceiling {} for deviator {deviator:?}",
            out.best_rate,
            ceiling
        );
        assert_eq!(out.best_rate, expected_best);
        // The floor response is always in the class.
        let floor_rate = floor_scheme(&p, deviator).achieved_rate();
        assert!(out.best_rate >= floor_rate);
    }
    assert!(
        start.elapsed().as_secs_f64() < 300.0,
        "deviation search exceeded 5 minutes"
    );
    report(11, "restricted deviations never beat the ceiling", start);
}
