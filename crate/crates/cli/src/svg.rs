//! Deterministic SVG rendering of rate regions: integer-gridded axes,
//! the outer region as a thin outline, the inner region filled. No
//! external resources, no floating point; pixel coordinates are exact
//! rationals rounded to fixed decimals with integer arithmetic.

use ldic_core::polytope::{Region2, RegionKind};
use ldic_core::rat::{rat, Rat};
use num_bigint::BigInt;
use num_traits::Signed;

const UNIT: i64 = 80; // pixels per rate unit
const MARGIN: i64 = 60;

/// Fixed two-decimal rendering of an exact pixel coordinate, rounded half
/// away from zero with integer arithmetic.
fn px(value: &Rat) -> String {
    let scaled = value * rat(100);
    let rounded = round_half_away(&scaled);
    let negative = rounded.is_negative();
    let abs = rounded.abs();
    let int = &abs / 100;
    let frac = &abs % 100;
    format!("{}{}.{:02}", if negative { "-" } else { "" }, int, frac)
}

fn round_half_away(v: &Rat) -> BigInt {
    let doubled = v.numer() * 2;
    let den = v.denom() * 2;
    let adjust = if v.is_negative() {
        -v.denom().clone()
    } else {
        v.denom().clone()
    };
    (doubled + adjust) / den
}

struct Canvas {
    width: i64,
    height: i64,
    body: String,
}

impl Canvas {
    fn new(x_units: i64, y_units: i64) -> Canvas {
        Canvas {
            width: 2 * MARGIN + UNIT * x_units,
            height: 2 * MARGIN + UNIT * y_units,
            body: String::new(),
        }
    }

    fn x(&self, r: &Rat) -> String {
        px(&(rat(MARGIN) + r * rat(UNIT)))
    }

    fn y(&self, r: &Rat) -> String {
        px(&(rat(self.height - MARGIN) - r * rat(UNIT)))
    }

    fn polygon_points(&self, region: &Region2) -> String {
        region
            .vertices()
            .iter()
            .map(|(vx, vy)| format!("{},{}", self.x(vx), self.y(vy)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn draw_region(&mut self, region: &Region2, stroke: &str, width: &str, fill: &str) {
        match region.kind() {
            RegionKind::Empty => {}
            RegionKind::Point => {
                let (vx, vy) = &region.vertices()[0];
                self.body.push_str(&format!(
                    "  <circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{stroke}\"/>\n",
                    self.x(vx),
                    self.y(vy)
                ));
            }
            RegionKind::Segment => {
                let (ax, ay) = &region.vertices()[0];
                let (bx, by) = &region.vertices()[1];
                self.body.push_str(&format!(
                    "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>\n",
                    self.x(ax), self.y(ay), self.x(bx), self.y(by)
                ));
            }
            RegionKind::Polygon => {
                self.body.push_str(&format!(
                    "  <polygon points=\"{}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>\n",
                    self.polygon_points(region)
                ));
            }
        }
    }

    fn finish(self, title: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            w = self.width,
            h = self.height
        ));
        out.push_str(&format!(
            "  <title>{title}</title>\n  <rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
            self.width, self.height
        ));
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

/// Renders the outer region (thin blue outline) with the inner region
/// (thick black outline, light fill) on an integer grid, axes labelled in
/// whole bits per channel use.
pub fn region_overlay(
    outer: &Region2,
    inner: &Region2,
    x_units: i64,
    y_units: i64,
    title: &str,
) -> String {
    let mut c = Canvas::new(x_units, y_units);
    for gx in 0..=x_units {
        let x = c.x(&rat(gx));
        let y0 = c.y(&rat(0));
        let y1 = c.y(&rat(y_units));
        c.body.push_str(&format!(
            "  <line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y1}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        ));
        c.body.push_str(&format!(
            "  <text x=\"{x}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333333\">{gx}</text>\n",
            px(&rat(c.height - MARGIN + 18))
        ));
    }
    for gy in 0..=y_units {
        let y = c.y(&rat(gy));
        let x0 = c.x(&rat(0));
        let x1 = c.x(&rat(x_units));
        c.body.push_str(&format!(
            "  <line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        ));
        c.body.push_str(&format!(
            "  <text x=\"{}\" y=\"{y}\" font-size=\"12\" text-anchor=\"end\" fill=\"#333333\">{gy}</text>\n",
            px(&rat(MARGIN - 8))
        ));
    }
    c.body.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"#333333\">R1 (bits/use)</text>\n",
        c.x(&rat(x_units / 2)),
        px(&rat(c.height - 12))
    ));
    let mid_y = c.y(&rat(y_units / 2));
    c.body.push_str(&format!(
        "  <text x=\"14\" y=\"{mid_y}\" font-size=\"13\" fill=\"#333333\" transform=\"rotate(-90 14 {mid_y})\">R2 (bits/use)</text>\n"
    ));
    c.draw_region(outer, "#1f6fb4", "1.5", "none");
    c.draw_region(inner, "#000000", "3", "rgba(40,40,40,0.12)");
    c.finish(title)
}
