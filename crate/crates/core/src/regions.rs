//! The three rate regions: the achievable region C from the rate-splitting
//! system, the equilibrium box B, and their intersection N.
//!
//! C is built operationally: the ten-component rate-splitting system with
//! all random rates pinned to zero, projected onto the two transmission
//! rates by exact Fourier-Motzkin elimination. An independent simplex
//! oracle answers the same membership questions without any elimination,
//! and the test suites hold the two paths to exact agreement.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelParams, User};
use crate::polytope::{self, Constraint, LinearSystem, Region2};
use crate::rat::{pos, rat, Rat};

use num_traits::Zero;

#[derive(Debug, Error, PartialEq)]
pub enum RegionsError {
    #[error("eta must be positive")]
    NonPositiveEta,
}

/// The seven per-user bounds of the rate-splitting system, exact integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaBounds {
    pub user: User,
    theta: [i64; 7],
}

impl ThetaBounds {
    /// `theta.get(k)` for k in 1..=7.
    pub fn get(&self, k: usize) -> i64 {
        self.theta[k - 1]
    }

    pub fn as_array(&self) -> [i64; 7] {
        self.theta
    }
}

fn posi(v: i64) -> i64 {
    v.max(0)
}

/// Evaluates the seven closed-form bounds for user `i`.
pub fn theta(p: &ChannelParams, i: User) -> ThetaBounds {
    let j = i.other();
    let nii = p.direct(i) as i64;
    let njj = p.direct(j) as i64;
    let nij = p.cross_into(i) as i64;
    let nji = p.cross_into(j) as i64;
    let fb_ii = p.feedback(i) as i64;
    let fb_jj = p.feedback(j) as i64;

    // Residual interference at each receiver after its feedback truncation.
    let trunc_i = posi(nii.max(nij) - fb_ii);
    let trunc_j = posi(njj.max(nji) - fb_jj);

    let t1 = posi(nij - trunc_i);
    let t2 = nii.max(nij);
    let t3 = nij.min(trunc_i);
    let t4 = posi(nii - nji);
    let t5 = t4.max(t3);
    let t6 = nji.min(trunc_j) - posi(nji - nii).min(trunc_j) + t4;
    let t7 = t3.max(t6);
    ThetaBounds {
        user: i,
        theta: [t1, t2, t3, t4, t5, t6, t7],
    }
}

// Column layout of the ten-component rate-splitting system: user 1 then
// user 2, each as [C1, R1, C2, R2, P].
const C1: usize = 0;
const R1: usize = 1;
const C2: usize = 2;
const R2: usize = 3;
const P: usize = 4;

fn comp(user: User, field: usize, offset: usize) -> usize {
    offset + (user.index() - 1) * 5 + field
}

fn row(dim: usize, terms: &[(usize, i64)], rhs: Rat) -> Constraint {
    let mut coeffs = vec![Rat::zero(); dim];
    for &(idx, c) in terms {
        coeffs[idx] += rat(c);
    }
    Constraint::le(coeffs, rhs)
}

fn eq_row(dim: usize, terms: &[(usize, i64)], rhs: Rat) -> Constraint {
    let mut coeffs = vec![Rat::zero(); dim];
    for &(idx, c) in terms {
        coeffs[idx] += rat(c);
    }
    Constraint::eq(coeffs, rhs)
}

/// Appends the fourteen bound rows and ten nonnegativity rows of the
/// rate-splitting system, with component columns starting at `offset` in a
/// `dim`-wide system.
fn push_hk_rows(sys: &mut LinearSystem, p: &ChannelParams, offset: usize) {
    let dim = sys.dim();
    for i in User::BOTH {
        let j = i.other();
        let t = theta(p, i);
        let ic1 = comp(i, C1, offset);
        let ic2 = comp(i, C2, offset);
        let ip = comp(i, P, offset);
        let jc1 = comp(j, C1, offset);
        let jr1 = comp(j, R1, offset);
        let jc2 = comp(j, C2, offset);
        let jr2 = comp(j, R2, offset);
        sys.push(row(dim, &[(jc1, 1), (jr1, 1)], rat(t.get(1))));
        sys.push(row(
            dim,
            &[
                (ic1, 1),
                (ic2, 1),
                (ip, 1),
                (jc1, 1),
                (jc2, 1),
                (jr1, 1),
                (jr2, 1),
            ],
            rat(t.get(2)),
        ));
        sys.push(row(dim, &[(jc2, 1), (jr2, 1)], rat(t.get(3))));
        sys.push(row(dim, &[(ip, 1)], rat(t.get(4))));
        sys.push(row(dim, &[(ip, 1), (jc2, 1), (jr2, 1)], rat(t.get(5))));
        sys.push(row(dim, &[(ic2, 1), (ip, 1)], rat(t.get(6))));
        sys.push(row(
            dim,
            &[(ic2, 1), (ip, 1), (jc2, 1), (jr2, 1)],
            rat(t.get(7)),
        ));
    }
    for k in 0..10 {
        sys.push(row(dim, &[(offset + k, -1)], rat(0)));
    }
}

/// The ten-variable rate-splitting system: fourteen bound rows plus ten
/// nonnegativity rows over (C1, R1, C2, R2, P) for each user.
pub fn hk_system(p: &ChannelParams) -> LinearSystem {
    let mut sys = LinearSystem::empty(10);
    push_hk_rows(&mut sys, p, 0);
    sys
}

/// Twelve-variable augmentation: columns 0 and 1 are the transmission rates
/// R_1 and R_2, tied to their component sums by equality rows, with the box
/// 0 <= R_i <= theta_2,i conjoined so projections stay bounded.
fn hk_with_rate_vars(p: &ChannelParams) -> LinearSystem {
    let mut sys = LinearSystem::empty(12);
    push_hk_rows(&mut sys, p, 2);
    for i in User::BOTH {
        let r = i.index() - 1;
        sys.push(eq_row(
            12,
            &[
                (r, 1),
                (comp(i, C1, 2), -1),
                (comp(i, C2, 2), -1),
                (comp(i, P, 2), -1),
            ],
            rat(0),
        ));
        sys.push(row(12, &[(r, 1)], rat(theta(p, i).get(2))));
        sys.push(row(12, &[(r, -1)], rat(0)));
    }
    sys
}

/// The achievable region: project the rate-splitting system with all four
/// random rates fixed to zero onto (R_1, R_2).
pub fn capacity_region(p: &ChannelParams) -> Region2 {
    let mut sys = hk_with_rate_vars(p);
    for i in User::BOTH {
        sys.push(eq_row(12, &[(comp(i, R1, 2), 1)], rat(0)));
        sys.push(eq_row(12, &[(comp(i, R2, 2), 1)], rat(0)));
    }
    let projected = polytope::project(&sys, &[0, 1]);
    Region2::from_halfspaces(&projected).expect("boxed projection is bounded")
}

/// Membership in C decided by the simplex oracle alone: feasibility of the
/// unprojected system with the rate sums pinned to the queried point. This
/// path shares nothing with the elimination code.
pub fn capacity_contains_lp(p: &ChannelParams, r1: &Rat, r2: &Rat) -> bool {
    let mut sys = hk_system(p);
    let extend = |sys: &mut LinearSystem, i: User, value: &Rat| {
        sys.push(eq_row(
            10,
            &[(comp(i, C1, 0), 1), (comp(i, C2, 0), 1), (comp(i, P, 0), 1)],
            value.clone(),
        ));
    };
    for i in User::BOTH {
        sys.push(eq_row(10, &[(comp(i, R1, 0), 1)], rat(0)));
        sys.push(eq_row(10, &[(comp(i, R2, 0), 1)], rat(0)));
    }
    extend(&mut sys, User::One, r1);
    extend(&mut sys, User::Two, r2);
    polytope::feasible_point(&sys).is_some()
}

/// Rate pair in bits per channel use.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatePair {
    #[serde(with = "crate::rat::serde_str")]
    pub r1: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub r2: Rat,
}

impl RatePair {
    pub fn new(r1: Rat, r2: Rat) -> RatePair {
        RatePair { r1, r2 }
    }

    pub fn of_ints(r1: i64, r2: i64) -> RatePair {
        RatePair::new(rat(r1), rat(r2))
    }

    pub fn rate(&self, i: User) -> &Rat {
        match i {
            User::One => &self.r1,
            User::Two => &self.r2,
        }
    }
}

/// The per-user equilibrium bounds L_i <= R_i <= U_i, with the slack eta
/// they were computed for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NashBounds {
    #[serde(with = "crate::rat::serde_str")]
    pub l1: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub l2: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub u1: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub u2: Rat,
    #[serde(with = "crate::rat::serde_str")]
    pub eta: Rat,
}

impl NashBounds {
    pub fn lower(&self, i: User) -> &Rat {
        match i {
            User::One => &self.l1,
            User::Two => &self.l2,
        }
    }

    pub fn upper(&self, i: User) -> &Rat {
        match i {
            User::One => &self.u1,
            User::Two => &self.u2,
        }
    }
}

fn check_eta(eta: &Rat) -> Result<(), RegionsError> {
    if *eta <= Rat::zero() {
        return Err(RegionsError::NonPositiveEta);
    }
    Ok(())
}

/// Lower bound: what the user can guarantee alone, less eta, clamped.
fn lower_bound(p: &ChannelParams, i: User, eta: &Rat) -> Rat {
    let floor = posi(p.direct(i) as i64 - p.cross_into(i) as i64);
    pos(rat(floor) - eta)
}

/// Upper bound: the receiver ceiling minus the interference the other pair
/// is forced to leave in place, plus eta. All inner terms are integers.
fn upper_bound(p: &ChannelParams, i: User, eta: &Rat) -> Rat {
    let j = i.other();
    let nii = p.direct(i) as i64;
    let njj = p.direct(j) as i64;
    let nij = p.cross_into(i) as i64;
    let nji = p.cross_into(j) as i64;
    let fb_jj = p.feedback(j) as i64;
    let inner = posi(posi(njj - nij).min(nji) - posi(njj.max(nji) - fb_jj));
    let forced = posi(posi(njj - nji).min(nij) - inner);
    rat(nii.max(nij) - forced) + eta
}

/// The equilibrium bounds for both users.
pub fn nash_bounds(p: &ChannelParams, eta: &Rat) -> Result<NashBounds, RegionsError> {
    check_eta(eta)?;
    Ok(NashBounds {
        l1: lower_bound(p, User::One, eta),
        l2: lower_bound(p, User::Two, eta),
        u1: upper_bound(p, User::One, eta),
        u2: upper_bound(p, User::Two, eta),
        eta: eta.clone(),
    })
}

/// The box region B: the rectangle [L_1, U_1] x [L_2, U_2].
pub fn box_region(p: &ChannelParams, eta: &Rat) -> Result<Region2, RegionsError> {
    let b = nash_bounds(p, eta)?;
    Ok(Region2::rectangle(b.l1, b.u1, b.l2, b.u2))
}

/// The equilibrium region N = C intersected with B.
pub fn ne_region(p: &ChannelParams, eta: &Rat) -> Result<Region2, RegionsError> {
    check_eta(eta)?;
    Ok(capacity_region(p).intersect(&box_region(p, eta)?))
}

/// Appends the equilibrium saturation band: at each receiver, the sum of
/// the own transmission rate and the opposing common-plus-random rate must
/// come within eta of the receiver ceiling theta_2,i (the rate-splitting
/// system already caps it at theta_2,i from above). This is the exact
/// content of the shifted-tuple equilibrium conditions once the eta/6
/// bookkeeping of the achievability argument is cancelled; the transcription
/// with literal equalities collapses to the eta = 0 region instead.
fn push_saturation_band(sys: &mut LinearSystem, p: &ChannelParams, eta: &Rat) {
    for i in User::BOTH {
        let j = i.other();
        let r = i.index() - 1;
        let mut coeffs = vec![Rat::zero(); 12];
        coeffs[r] = rat(-1);
        for field in [C1, C2, R1, R2] {
            coeffs[comp(j, field, 2)] = rat(-1);
        }
        let rhs = -(rat(theta(p, i).get(2)) - eta);
        sys.push(Constraint::le(coeffs, rhs));
    }
}

/// The equilibrium region built constructively from the rate-splitting
/// system plus the saturation band, projected onto (R_1, R_2). Exactly
/// equal to `ne_region` on every instance; the acceptance suite holds the
/// two to polytope equality.
pub fn ne_region_constructive(p: &ChannelParams, eta: &Rat) -> Result<Region2, RegionsError> {
    check_eta(eta)?;
    let mut sys = hk_with_rate_vars(p);
    push_saturation_band(&mut sys, p, eta);
    let projected = polytope::project(&sys, &[0, 1]);
    Ok(Region2::from_halfspaces(&projected).expect("boxed projection is bounded"))
}

/// Constructive membership by the simplex oracle: feasibility of the
/// unprojected saturation system with rates pinned.
pub fn constructive_contains_lp(
    p: &ChannelParams,
    eta: &Rat,
    r1: &Rat,
    r2: &Rat,
) -> Result<bool, RegionsError> {
    check_eta(eta)?;
    let mut sys = hk_with_rate_vars(p);
    push_saturation_band(&mut sys, p, eta);
    sys.push(eq_row(12, &[(0, 1)], r1.clone()));
    sys.push(eq_row(12, &[(1, 1)], r2.clone()));
    Ok(polytope::feasible_point(&sys).is_some())
}

/// Checks N(no feedback) is contained in N(p) is contained in N(perfect
/// feedback), all at the same eta, by exact containment.
pub fn inclusion_chain_check(p: &ChannelParams, eta: &Rat) -> Result<bool, RegionsError> {
    check_eta(eta)?;
    let lo = ne_region(&p.without_feedback(), eta)?;
    let mid = ne_region(p, eta)?;
    let hi = ne_region(&p.with_perfect_feedback(), eta)?;
    Ok(mid.contains(&lo) && hi.contains(&mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    fn params(n11: u32, n22: u32, n12: u32, n21: u32, fb11: u32, fb22: u32) -> ChannelParams {
        ChannelParams::new(n11, n22, n12, n21, fb11, fb22)
    }

    fn fig(fb11: u32, fb22: u32) -> ChannelParams {
        params(7, 6, 4, 4, fb11, fb22)
    }

    fn sorted_vertices(r: &Region2) -> Vec<(Rat, Rat)> {
        let mut v = r.vertices().to_vec();
        v.sort();
        v
    }

    fn int_points(pts: &[(i64, i64)]) -> Vec<(Rat, Rat)> {
        let mut v: Vec<(Rat, Rat)> = pts.iter().map(|&(x, y)| (rat(x), rat(y))).collect();
        v.sort();
        v
    }

    #[test]
    fn theta_matches_hand_evaluation() {
        assert_eq!(theta(&fig(0, 0), User::One).as_array(), [0, 7, 4, 3, 4, 7, 7]);
        assert_eq!(theta(&fig(0, 0), User::Two).as_array(), [0, 6, 4, 2, 4, 6, 6]);
        assert_eq!(theta(&fig(7, 6), User::One).as_array(), [4, 7, 0, 3, 3, 3, 3]);
        assert_eq!(theta(&fig(7, 6), User::Two).as_array(), [4, 6, 0, 2, 2, 2, 2]);
        assert_eq!(theta(&fig(5, 0), User::One).as_array(), [2, 7, 2, 3, 3, 7, 7]);
        assert_eq!(theta(&fig(5, 0), User::Two).as_array(), [0, 6, 4, 2, 4, 4, 4]);
    }

    #[test]
    fn theta_invariants_hold_on_a_slice() {
        for n11 in 0..4u32 {
            for n12 in 0..4u32 {
                for fb in 0..4u32 {
                    let p = params(n11, 3, n12, 2, fb, 1);
                    for i in User::BOTH {
                        let t = theta(&p, i);
                        assert_eq!(t.get(1) + t.get(3), p.cross_into(i) as i64);
                        assert_eq!(t.get(5), t.get(4).max(t.get(3)));
                        assert_eq!(t.get(7), t.get(3).max(t.get(6)));
                        assert!(t.as_array().iter().all(|&v| v >= 0));
                    }
                }
            }
        }
    }

    #[test]
    fn hk_system_shape() {
        let sys = hk_system(&fig(0, 0));
        assert_eq!(sys.dim(), 10);
        assert_eq!(sys.constraints().len(), 24);
        // The all-zero split is always feasible.
        assert!(sys.satisfied_by(&vec![rat(0); 10]));
    }

    #[test]
    fn hk_all_zero_params_pins_origin() {
        let sys = hk_system(&params(0, 0, 0, 0, 0, 0));
        let point = polytope::feasible_point(&sys).unwrap();
        assert!(point.iter().all(|v| v.is_zero()));
        assert!(!capacity_contains_lp(&params(0, 0, 0, 0, 0, 0), &rat(1), &rat(0)));
    }

    #[test]
    fn capacity_region_no_feedback_matches_closed_form() {
        // Hand-derived from the standard deterministic-IC bounds:
        // R1 <= 7, R2 <= 6, R1+R2 <= 8, 2R1+R2 <= 14, R1+2R2 <= 12.
        let c = capacity_region(&fig(0, 0));
        assert_eq!(
            sorted_vertices(&c),
            int_points(&[(0, 0), (7, 0), (6, 2), (4, 4), (0, 6)])
        );
        assert!(c.contains_point(&rat(3), &rat(2)));
        assert!(!c.contains_point(&rat(8), &rat(0)));
    }

    #[test]
    fn capacity_region_perfect_feedback_matches_closed_form() {
        // R1 <= 7, R2 <= 6, R1+R2 <= 9.
        let c = capacity_region(&fig(7, 6));
        assert_eq!(
            sorted_vertices(&c),
            int_points(&[(0, 0), (7, 0), (7, 2), (3, 6), (0, 6)])
        );
    }

    #[test]
    fn capacity_contains_origin_always() {
        for p in [fig(0, 0), fig(5, 0), params(2, 3, 5, 1, 1, 2)] {
            assert!(capacity_region(&p).contains_point(&rat(0), &rat(0)));
        }
    }

    #[test]
    fn nash_bounds_on_worked_channel() {
        let eta = ratio(1, 100);
        let b = nash_bounds(&fig(5, 0), &eta).unwrap();
        assert_eq!(b.l1, ratio(299, 100));
        assert_eq!(b.l2, ratio(199, 100));
        assert_eq!(b.u1, ratio(501, 100));
        assert_eq!(b.u2, ratio(401, 100));

        let b = nash_bounds(&fig(7, 6), &eta).unwrap();
        assert_eq!(b.u1, ratio(701, 100));
        assert_eq!(b.u2, ratio(601, 100));
    }

    #[test]
    fn nash_lower_bound_clamps_for_large_eta() {
        let b = nash_bounds(&fig(5, 0), &rat(3)).unwrap();
        assert_eq!(b.l1, rat(0));
        assert_eq!(b.l2, rat(0));
    }

    #[test]
    fn nash_bounds_reject_nonpositive_eta() {
        assert_eq!(
            nash_bounds(&fig(0, 0), &rat(0)),
            Err(RegionsError::NonPositiveEta)
        );
        assert!(box_region(&fig(0, 0), &rat(-1)).is_err());
        assert!(ne_region(&fig(0, 0), &rat(0)).is_err());
    }

    #[test]
    fn box_region_is_a_rectangle() {
        let eta = ratio(1, 100);
        let b = box_region(&fig(5, 0), &eta).unwrap();
        assert_eq!(b.vertices().len(), 4);
        assert!(b.contains_point(&rat(3), &rat(4)));
        let huge = box_region(&fig(5, 0), &rat(10)).unwrap();
        assert!(huge.contains_point(&rat(0), &rat(0)));
    }

    #[test]
    fn ne_region_contains_caption_points() {
        let eta = ratio(1, 100);
        let n = ne_region(&fig(5, 0), &eta).unwrap();
        assert!(n.contains_point(&rat(3), &rat(4)));
        assert!(n.contains_point(&rat(5), &rat(4)));
        assert!(!n.contains_point(&rat(7), &rat(0)));
    }

    #[test]
    fn constructive_equals_intersection_on_worked_channels() {
        let eta = ratio(1, 8);
        for p in [fig(5, 0), fig(0, 0)] {
            let a = ne_region_constructive(&p, &eta).unwrap();
            let b = ne_region(&p, &eta).unwrap();
            assert!(a.equals(&b), "mismatch at {p:?}");
        }
    }

    #[test]
    fn inclusion_chain_on_worked_channel() {
        let eta = ratio(1, 100);
        assert!(inclusion_chain_check(&fig(5, 0), &eta).unwrap());
        // Degenerate endpoints: equality on one side of the chain.
        assert!(inclusion_chain_check(&fig(0, 0), &eta).unwrap());
        assert!(inclusion_chain_check(&fig(7, 6), &eta).unwrap());
    }

    #[test]
    fn lp_oracle_agrees_with_projection_on_coarse_grid() {
        let p = fig(5, 0);
        let c = capacity_region(&p);
        for x2 in 0..=16i64 {
            for y2 in 0..=14i64 {
                let x = ratio(x2, 2);
                let y = ratio(y2, 2);
                assert_eq!(
                    c.contains_point(&x, &y),
                    capacity_contains_lp(&p, &x, &y),
                    "disagreement at ({x2}/2, {y2}/2)"
                );
            }
        }
    }
}
