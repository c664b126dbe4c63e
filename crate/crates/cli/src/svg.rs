//! Static SVG rendering of Newton polygons.

use std::fmt::Write as _;

use num_traits::{Signed, ToPrimitive, Zero};
use ztrop::polygon::vertex_initials;
use ztrop::{Polygon, Rat, Result, UPoly};

const UNIT: i64 = 80;
const MARGIN: i64 = 60;
const MAX_PLOT_HEIGHT: i64 = 480;

/// Fixed-point rendering with two decimals, rounded half away from zero.
fn coord(v: &Rat) -> String {
    let hundredths = (v * Rat::from_integer(100.into())).round().to_integer();
    let sign = if hundredths.is_negative() { "-" } else { "" };
    let abs = hundredths.abs();
    let whole = &abs / 100u32;
    let frac = (&abs % 100u32).to_u32().expect("below 100");
    match frac {
        0 => format!("{sign}{whole}"),
        f if f % 10 == 0 => format!("{sign}{whole}.{}", f / 10),
        f => format!("{sign}{whole}.{f:02}"),
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn r(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

struct Frame {
    v_top: Rat,
    y_unit: Rat,
    width: i64,
    height: i64,
}

impl Frame {
    fn x(&self, j: u32) -> String {
        coord(&r(MARGIN + UNIT * i64::from(j)))
    }

    fn y(&self, v: &Rat) -> String {
        coord(&(r(MARGIN) + (&self.v_top - v) * &self.y_unit))
    }
}

/// Newton polygon of `f`: the region above the lower hull shaded and
/// clipped to the bounding box, lower edges drawn heavy with their slopes,
/// hull vertices dotted and labelled by the initial of their coefficient.
pub fn newton_svg(f: &UPoly, polygon: &Polygon, title: &str) -> Result<String> {
    let support = f.support_points();
    let initials = vertex_initials(f)?;
    let vertices = polygon.vertices();
    let j_max = support.iter().map(|(j, _)| *j).max().unwrap_or(0);
    let v_min = support.iter().map(|(_, v)| v).min().cloned().unwrap_or_else(Rat::zero);
    let v_max = support.iter().map(|(_, v)| v).max().cloned().unwrap_or_else(Rat::zero);
    let v_top = &v_max + r(1);
    let range = &v_top - &v_min;
    let y_unit = (r(MAX_PLOT_HEIGHT) / &range).min(r(UNIT));
    let plot_height = (&range * &y_unit).ceil().to_integer().to_i64().expect("bounded by construction");
    let frame = Frame {
        v_top: v_top.clone(),
        y_unit,
        width: 2 * MARGIN + UNIT * i64::from(j_max.max(1)),
        height: 2 * MARGIN + plot_height,
    };

    let mut out = String::new();
    let (w, h) = (frame.width, frame.height);
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(out, "<title>{}</title>", escape(title)).unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#).unwrap();

    let (first, last) = (&vertices[0], &vertices[vertices.len() - 1]);
    let mut region = format!("{},{}", frame.x(first.0), frame.y(&v_top));
    for (j, v) in vertices {
        write!(region, " {},{}", frame.x(*j), frame.y(v)).unwrap();
    }
    write!(region, " {},{}", frame.x(last.0), frame.y(&v_top)).unwrap();
    if vertices.len() == 1 {
        // a single vertex spans no area; draw only the upward ray
        writeln!(
            out,
            r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#9ab" stroke-width="1"/>"##,
            frame.y(&first.1),
            frame.y(&v_top),
            x = frame.x(first.0)
        )
        .unwrap();
    } else {
        writeln!(out, r##"<polygon points="{region}" fill="#dde6ee" stroke="none"/>"##).unwrap();
    }

    for (j, v) in &support {
        if !polygon.is_vertex(*j) {
            writeln!(out, r##"<circle cx="{}" cy="{}" r="3" fill="white" stroke="#555"/>"##, frame.x(*j), frame.y(v)).unwrap();
        }
    }

    for ((a, b), slope) in polygon.edges().zip(polygon.slopes()) {
        writeln!(
            out,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#123" stroke-width="3"/>"##,
            frame.x(a.0),
            frame.y(&a.1),
            frame.x(b.0),
            frame.y(&b.1)
        )
        .unwrap();
        let mid_x = r(MARGIN) + r(UNIT) * (r(i64::from(a.0)) + r(i64::from(b.0))) / r(2);
        let mid_v = (&a.1 + &b.1) / r(2);
        writeln!(
            out,
            r##"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" fill="#a22">{}</text>"##,
            coord(&mid_x),
            coord(&(r(MARGIN) + (&v_top - &mid_v) * &frame.y_unit + r(20))),
            escape(&slope.to_string())
        )
        .unwrap();
    }

    for ((j, v), init) in vertices.iter().zip(&initials) {
        writeln!(out, r##"<circle cx="{}" cy="{}" r="5" fill="#123"/>"##, frame.x(*j), frame.y(v)).unwrap();
        writeln!(
            out,
            r##"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"##,
            frame.x(*j),
            coord(&(r(MARGIN) + (&v_top - v) * &frame.y_unit - r(10))),
            escape(&init.to_string())
        )
        .unwrap();
    }

    writeln!(
        out,
        r##"<line x1="{m}" y1="{b}" x2="{}" y2="{b}" stroke="#888" stroke-width="1"/>"##,
        w - MARGIN / 2,
        m = MARGIN / 2,
        b = h - MARGIN / 2
    )
    .unwrap();
    for j in 0..=j_max {
        writeln!(
            out,
            r##"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle" fill="#666">{j}</text>"##,
            frame.x(j),
            h - MARGIN / 2 + 15
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ztrop::puiseux::rat;
    use ztrop::{newton_polygon, parse_system};

    fn first_poly(text: &str) -> UPoly {
        let system = parse_system(text).unwrap();
        system.polys()[0].compose(&[], 0).unwrap()
    }

    #[test]
    fn coordinates_are_fixed_point() {
        assert_eq!(coord(&rat(1, 3)), "0.33");
        assert_eq!(coord(&rat(-5, 2)), "-2.5");
        assert_eq!(coord(&rat(120, 1)), "120");
        assert_eq!(coord(&rat(-1, 200)), "-0.01");
    }

    #[test]
    fn edges_carry_slope_labels() {
        let f = first_poly("ring x1\npoly t*x1^2 + x1 + 1\n");
        let svg = newton_svg(&f, &newton_polygon(&f).unwrap(), "f1").unwrap();
        assert_eq!(svg.matches("stroke-width=\"3\"").count(), 2);
        assert!(svg.contains(r##"fill="#a22">0</text>"##));
        assert!(svg.contains(r##"fill="#a22">1</text>"##));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn single_vertex_has_no_edges() {
        let f = first_poly("ring x1\npoly t*x1^3\n");
        let svg = newton_svg(&f, &newton_polygon(&f).unwrap(), "f1").unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("stroke-width=\"3\"").count(), 0);
    }
}
