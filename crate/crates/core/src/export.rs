//! CSV and SVG renderings of approximants. Both are deterministic so that
//! figures and tables can be diffed between runs.

use std::fmt::Write;

use crate::ietmap::{piece_endpoints_f64, Cluster, PiecewiseAffineMap};
use crate::word::Alphabet;

/// One row per piece: `v,x_left,x_right,y_left,y_right`, 15 decimals.
pub fn approximant_csv(map: &PiecewiseAffineMap, alphabet: &Alphabet) -> String {
    let mut out = String::from("v,x_left,x_right,y_left,y_right\n");
    for piece in map.pieces() {
        let (xl, xr, yl, yr) = piece_endpoints_f64(map, piece);
        writeln!(
            out,
            "{},{xl:.15},{xr:.15},{yl:.15},{yr:.15}",
            alphabet.render(&piece.factor)
        )
        .unwrap();
    }
    out
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

fn px(x: f64) -> f64 {
    MARGIN + x * SIZE
}

fn py(y: f64) -> f64 {
    MARGIN + (1.0 - y) * SIZE
}

/// The graph of `T_n` on the unit square: one segment per piece, the axes,
/// and optional markers below the x-axis at cluster centers.
///
/// The second line is a version comment; everything else depends only on
/// the map and the markers.
pub fn approximant_svg(map: &PiecewiseAffineMap, title: &str, clusters: &[Cluster]) -> String {
    let total = SIZE + 2.0 * MARGIN;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    )
    .unwrap();
    writeln!(out, "<!-- shift2iet {} -->", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(out, "<title>{}</title>", escape(title)).unwrap();
    writeln!(
        out,
        r#"<rect x="0" y="0" width="{total}" height="{total}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        out,
        r##"<g stroke="#888" stroke-width="1" fill="none"><rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}"/></g>"##
    )
    .unwrap();
    writeln!(
        out,
        r##"<g font-family="sans-serif" font-size="12" fill="#444"><text x="{}" y="{}">0</text><text x="{}" y="{}">1</text><text x="{}" y="{}">1</text></g>"##,
        MARGIN - 12.0,
        MARGIN + SIZE + 14.0,
        MARGIN + SIZE - 4.0,
        MARGIN + SIZE + 14.0,
        MARGIN - 14.0,
        MARGIN + 4.0
    )
    .unwrap();
    writeln!(
        out,
        r##"<g stroke="#1f4e9c" stroke-width="1.2" stroke-linecap="round">"##
    )
    .unwrap();
    for piece in map.pieces() {
        let (xl, xr, yl, yr) = piece_endpoints_f64(map, piece);
        writeln!(
            out,
            r#"<line x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}"/>"#,
            px(xl),
            py(yl),
            px(xr),
            py(yr)
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    if !clusters.is_empty() {
        writeln!(out, r##"<g fill="#c0392b">"##).unwrap();
        for c in clusters {
            writeln!(
                out,
                r#"<circle cx="{:.4}" cy="{:.4}" r="4"/>"#,
                px(c.center),
                MARGIN + SIZE + 8.0
            )
            .unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
