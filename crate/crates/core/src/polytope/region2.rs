//! Bounded 2D regions carried in both H- and V-representation.

use num_traits::{Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rat::{fmt_rat, parse_rat, Rat};

use super::{prune, simplex, Constraint, LinearSystem, LpOutcome, Relation};

#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    #[error("system is unbounded in direction {0}")]
    Unbounded(&'static str),
    #[error("system dimension {0} is not 2")]
    WrongDimension(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    Empty,
    Point,
    Segment,
    Polygon,
}

/// Convex bounded region of rate pairs: pruned halfspaces plus vertices in
/// counterclockwise order. The two representations are reconciled at
/// construction time; degenerate regions are first-class values.
#[derive(Clone, Debug, PartialEq)]
pub struct Region2 {
    halfspaces: LinearSystem,
    vertices: Vec<(Rat, Rat)>,
    kind: RegionKind,
}

impl Region2 {
    /// Builds from halfspaces. The system must be bounded; callers conjoin
    /// box constraints first. An infeasible system yields the empty region.
    pub fn from_halfspaces(sys: &LinearSystem) -> Result<Region2, RegionError> {
        if sys.dim() != 2 {
            return Err(RegionError::WrongDimension(sys.dim()));
        }
        let sys = prune(sys);
        if sys.has_contradiction_row() || !sys.is_feasible() {
            return Ok(Region2 {
                halfspaces: LinearSystem::new(
                    2,
                    vec![Constraint::le(vec![Rat::zero(), Rat::zero()], -rat_one())],
                ),
                vertices: Vec::new(),
                kind: RegionKind::Empty,
            });
        }
        for (dir, name) in [
            (vec![rat_one(), Rat::zero()], "+x"),
            (vec![-rat_one(), Rat::zero()], "-x"),
            (vec![Rat::zero(), rat_one()], "+y"),
            (vec![Rat::zero(), -rat_one()], "-y"),
        ] {
            if matches!(simplex::maximize(&sys, &dir), LpOutcome::Unbounded) {
                return Err(RegionError::Unbounded(name));
            }
        }

        let vertices = enumerate_vertices(&sys);
        debug_assert!(!vertices.is_empty());
        let kind = match vertices.len() {
            1 => RegionKind::Point,
            2 => RegionKind::Segment,
            _ => RegionKind::Polygon,
        };
        Ok(Region2 {
            halfspaces: sys,
            vertices,
            kind,
        })
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`; empty when inverted.
    pub fn rectangle(x0: Rat, x1: Rat, y0: Rat, y1: Rat) -> Region2 {
        let sys = LinearSystem::new(
            2,
            vec![
                Constraint::le(vec![rat_one(), Rat::zero()], x1),
                Constraint::le(vec![-rat_one(), Rat::zero()], -x0),
                Constraint::le(vec![Rat::zero(), rat_one()], y1),
                Constraint::le(vec![Rat::zero(), -rat_one()], -y0),
            ],
        );
        Region2::from_halfspaces(&sys).expect("rectangles are bounded")
    }

    pub fn empty() -> Region2 {
        Region2 {
            halfspaces: LinearSystem::new(
                2,
                vec![Constraint::le(vec![Rat::zero(), Rat::zero()], -rat_one())],
            ),
            vertices: Vec::new(),
            kind: RegionKind::Empty,
        }
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn is_empty(&self) -> bool {
        self.kind == RegionKind::Empty
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.kind, RegionKind::Point | RegionKind::Segment)
    }

    pub fn halfspaces(&self) -> &LinearSystem {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[(Rat, Rat)] {
        &self.vertices
    }

    pub fn contains_point(&self, x: &Rat, y: &Rat) -> bool {
        if self.is_empty() {
            return false;
        }
        self.halfspaces.satisfied_by(&[x.clone(), y.clone()])
    }

    /// Exact containment: every vertex of `other` satisfies our halfspaces.
    pub fn contains(&self, other: &Region2) -> bool {
        if other.is_empty() {
            return true;
        }
        other
            .vertices
            .iter()
            .all(|(x, y)| self.contains_point(x, y))
    }

    pub fn equals(&self, other: &Region2) -> bool {
        self.contains(other) && other.contains(self)
    }

    pub fn strictly_contains(&self, other: &Region2) -> bool {
        self.contains(other) && !other.contains(self)
    }

    pub fn intersect(&self, other: &Region2) -> Region2 {
        if self.is_empty() || other.is_empty() {
            return Region2::empty();
        }
        let mut sys = self.halfspaces.clone();
        sys.extend(&other.halfspaces);
        Region2::from_halfspaces(&sys).expect("intersection of bounded regions is bounded")
    }

    /// Twice the signed area of the vertex polygon; positive for proper
    /// counterclockwise polygons, zero for degenerate regions.
    pub fn double_area(&self) -> Rat {
        let v = &self.vertices;
        let mut acc = Rat::zero();
        for i in 0..v.len() {
            let (x1, y1) = &v[i];
            let (x2, y2) = &v[(i + 1) % v.len()];
            acc += x1 * y2 - x2 * y1;
        }
        acc
    }
}

fn rat_one() -> Rat {
    use num_traits::One;
    Rat::one()
}

/// All feasible intersection points of constraint pairs, deduplicated and
/// ordered counterclockwise. In 2D every such point is extreme.
fn enumerate_vertices(sys: &LinearSystem) -> Vec<(Rat, Rat)> {
    let rows = sys.constraints();
    let mut points: Vec<(Rat, Rat)> = Vec::new();
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let det = &a.coeffs[0] * &b.coeffs[1] - &a.coeffs[1] * &b.coeffs[0];
            if det.is_zero() {
                continue;
            }
            let x = (&a.rhs * &b.coeffs[1] - &a.coeffs[1] * &b.rhs) / &det;
            let y = (&a.coeffs[0] * &b.rhs - &a.rhs * &b.coeffs[0]) / &det;
            let p = [x, y];
            if sys.satisfied_by(&p) {
                let [x, y] = p;
                if !points.contains(&(x.clone(), y.clone())) {
                    points.push((x, y));
                }
            }
        }
    }
    // A single equality-free unbounded-direction case cannot reach here
    // (caller checks boundedness), but a system of one row has no pairs; a
    // feasible such system would be unbounded anyway.
    sort_ccw(&mut points);
    points
}

/// Sorts counterclockwise around the centroid, starting from the direction
/// of the negative y axis, using exact angle-free comparisons.
fn sort_ccw(points: &mut [(Rat, Rat)]) {
    if points.len() < 3 {
        points.sort();
        return;
    }
    let n = rat_from_usize(points.len());
    let cx = points.iter().map(|p| p.0.clone()).fold(Rat::zero(), |a, b| a + b) / &n;
    let cy = points.iter().map(|p| p.1.clone()).fold(Rat::zero(), |a, b| a + b) / &n;
    let half = |dx: &Rat, dy: &Rat| -> u8 {
        // 0 for the upper half plane (including +x axis), 1 for the lower.
        if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
            0
        } else {
            1
        }
    };
    points.sort_by(|p, q| {
        let (pdx, pdy) = (&p.0 - &cx, &p.1 - &cy);
        let (qdx, qdy) = (&q.0 - &cx, &q.1 - &cy);
        let (hp, hq) = (half(&pdx, &pdy), half(&qdx, &qdy));
        if hp != hq {
            return hp.cmp(&hq);
        }
        // Same half plane: counterclockwise means cross(p, q) > 0 puts p first.
        let cross = &pdx * &qdy - &pdy * &qdx;
        if cross.is_positive() {
            std::cmp::Ordering::Less
        } else if cross.is_negative() {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
}

fn rat_from_usize(n: usize) -> Rat {
    Rat::from_integer(num_bigint::BigInt::from(n))
}

// JSON form: halfspaces as {"a": ["num/den", "num/den"], "b": "num/den"},
// vertices as pairs of "num/den" strings, plus empty/degenerate flags.

#[derive(Serialize, Deserialize)]
struct HalfspaceJson {
    a: [String; 2],
    b: String,
    #[serde(default, skip_serializing_if = "is_false")]
    equality: bool,
}

fn is_false(b: &bool) -> bool {
    !b
}

#[derive(Serialize, Deserialize)]
struct Region2Json {
    halfspaces: Vec<HalfspaceJson>,
    vertices: Vec<[String; 2]>,
    empty: bool,
    degenerate: bool,
}

impl Serialize for Region2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let json = Region2Json {
            halfspaces: self
                .halfspaces
                .constraints()
                .iter()
                .map(|c| HalfspaceJson {
                    a: [fmt_rat(&c.coeffs[0]), fmt_rat(&c.coeffs[1])],
                    b: fmt_rat(&c.rhs),
                    equality: c.relation == Relation::Eq,
                })
                .collect(),
            vertices: self
                .vertices
                .iter()
                .map(|(x, y)| [fmt_rat(x), fmt_rat(y)])
                .collect(),
            empty: self.is_empty(),
            degenerate: self.is_degenerate(),
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Region2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let json = Region2Json::deserialize(d)?;
        if json.empty {
            return Ok(Region2::empty());
        }
        let mut rows = Vec::with_capacity(json.halfspaces.len());
        for h in &json.halfspaces {
            let a0 = parse_rat(&h.a[0]).map_err(D::Error::custom)?;
            let a1 = parse_rat(&h.a[1]).map_err(D::Error::custom)?;
            let b = parse_rat(&h.b).map_err(D::Error::custom)?;
            rows.push(if h.equality {
                Constraint::eq(vec![a0, a1], b)
            } else {
                Constraint::le(vec![a0, a1], b)
            });
        }
        Region2::from_halfspaces(&LinearSystem::new(2, rows)).map_err(D::Error::custom)
    }
}

/// CSV vertex dump: two rational columns, one vertex per line.
pub fn vertices_csv(region: &Region2) -> String {
    let mut out = String::from("r1,r2\n");
    for (x, y) in region.vertices() {
        out.push_str(&fmt_rat(x));
        out.push(',');
        out.push_str(&fmt_rat(y));
        out.push('\n');
    }
    out
}

// Serialize helper for lists of regions keyed by name, used by the CLI.
pub struct NamedRegions<'a>(pub Vec<(&'static str, &'a Region2)>);

impl Serialize for NamedRegions<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for (name, region) in &self.0 {
            #[derive(Serialize)]
            struct Entry<'b> {
                name: &'static str,
                region: &'b Region2,
            }
            seq.serialize_element(&Entry { name, region })?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    fn le(coeffs: &[i64], rhs: i64) -> Constraint {
        Constraint::le(coeffs.iter().map(|&c| rat(c)).collect(), rat(rhs))
    }

    #[test]
    fn unit_box_has_four_ccw_vertices() {
        let r = Region2::rectangle(rat(0), rat(1), rat(0), rat(1));
        assert_eq!(r.kind(), RegionKind::Polygon);
        assert_eq!(r.vertices().len(), 4);
        assert!(r.double_area().is_positive());
        assert_eq!(r.double_area(), rat(2));
    }

    #[test]
    fn triangle_has_three_vertices() {
        let sys = LinearSystem::new(2, vec![le(&[-1, 0], 0), le(&[0, -1], 0), le(&[1, 1], 1)]);
        let r = Region2::from_halfspaces(&sys).unwrap();
        assert_eq!(r.vertices().len(), 3);
        assert!(r.double_area().is_positive());
    }

    #[test]
    fn infeasible_is_flagged_empty() {
        let sys = LinearSystem::new(2, vec![le(&[1, 0], 0), le(&[-1, 0], -1)]);
        let r = Region2::from_halfspaces(&sys).unwrap();
        assert!(r.is_empty());
        assert!(!r.contains_point(&rat(0), &rat(0)));
    }

    #[test]
    fn unbounded_is_an_error() {
        let sys = LinearSystem::new(2, vec![le(&[-1, 0], 0), le(&[0, -1], 0)]);
        assert!(matches!(
            Region2::from_halfspaces(&sys),
            Err(RegionError::Unbounded(_))
        ));
    }

    #[test]
    fn degenerate_rectangle_is_segment_or_point() {
        let seg = Region2::rectangle(rat(1), rat(1), rat(0), rat(2));
        assert_eq!(seg.kind(), RegionKind::Segment);
        assert_eq!(seg.vertices().len(), 2);
        let pt = Region2::rectangle(rat(1), rat(1), rat(2), rat(2));
        assert_eq!(pt.kind(), RegionKind::Point);
        let none = Region2::rectangle(rat(2), rat(1), rat(0), rat(1));
        assert!(none.is_empty());
    }

    #[test]
    fn intersect_is_idempotent_and_exact() {
        let a = Region2::rectangle(rat(0), rat(2), rat(0), rat(2));
        assert!(a.intersect(&a).equals(&a));
        let b = Region2::rectangle(rat(1), rat(3), rat(1), rat(3));
        let c = a.intersect(&b);
        assert!(c.equals(&Region2::rectangle(rat(1), rat(2), rat(1), rat(2))));
    }

    #[test]
    fn containment_and_membership() {
        let a = Region2::rectangle(rat(0), rat(1), rat(0), rat(1));
        assert!(a.contains_point(&ratio(1, 2), &ratio(1, 2)));
        let b = Region2::rectangle(rat(0), rat(1), rat(0), ratio(1, 2));
        assert!(a.contains(&b));
        assert!(a.strictly_contains(&b));
        assert!(!b.contains(&a));
        assert!(a.contains(&Region2::empty()));
    }

    #[test]
    fn json_round_trip() {
        let a = Region2::rectangle(rat(0), ratio(7, 2), rat(0), rat(1));
        let text = serde_json::to_string(&a).unwrap();
        let back: Region2 = serde_json::from_str(&text).unwrap();
        assert!(a.equals(&back));
        let e = Region2::empty();
        let text = serde_json::to_string(&e).unwrap();
        assert!(text.contains("\"empty\":true"));
        let back: Region2 = serde_json::from_str(&text).unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn csv_dump_lists_vertices() {
        let a = Region2::rectangle(rat(0), rat(1), rat(0), rat(1));
        let csv = vertices_csv(&a);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("r1,r2\n"));
    }
}
