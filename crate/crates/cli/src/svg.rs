//! Standalone SVG pie charts and palette strips.
//!
//! Every slice or band carries `data-color-id` and `data-weight`, where the
//! weight string is exactly the one written to the color table. The
//! remainder beyond the top-N is drawn as one slice with
//! `data-color-id="other"`.

use chromasent::associate::EmotionPalette;
use chromasent::ColorModel;
use std::f64::consts::PI;
use std::fmt::Write;

const OTHER_FILL: &str = "#e0e0e0";
const SIZE: f64 = 240.0;
const RADIUS: f64 = 100.0;
const LEGEND_ROW: f64 = 20.0;

/// One drawable share of a palette.
struct Slice {
    id: String,
    label: String,
    fill: String,
    weight: f64,
}

pub fn weight_str(w: f64) -> String {
    format!("{w}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn slices(p: &EmotionPalette, model: &ColorModel) -> Vec<Slice> {
    let mut out: Vec<Slice> = p
        .entries
        .iter()
        .map(|e| {
            let (name, fill) =
                model.get(e.id).map_or(("?".to_string(), "#000000".to_string()), |c| (c.name.clone(), c.rgb.hex()));
            Slice { id: e.id.0.to_string(), label: format!("{name} {fill}"), fill, weight: e.weight }
        })
        .collect();
    if p.other > 0.0 {
        out.push(Slice { id: "other".into(), label: "other".into(), fill: OTHER_FILL.into(), weight: p.other });
    }
    out
}

fn header(w: f64, h: f64, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n<title>{}</title>\n",
        escape(title)
    )
}

fn legend(out: &mut String, items: &[Slice], x: f64, y0: f64) {
    for (i, s) in items.iter().enumerate() {
        let y = y0 + i as f64 * LEGEND_ROW;
        let _ = writeln!(
            out,
            "<rect x=\"{x:.3}\" y=\"{:.3}\" width=\"12\" height=\"12\" fill=\"{}\" stroke=\"#333333\" stroke-width=\"0.5\"/>",
            y - 10.0,
            s.fill
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{y:.3}\" font-family=\"sans-serif\" font-size=\"12\">{} ({:.1}%)</text>",
            x + 18.0,
            escape(&s.label),
            s.weight * 100.0
        );
    }
}

pub fn pie_chart(p: &EmotionPalette, model: &ColorModel) -> String {
    let items = slices(p, model);
    let height = SIZE.max(30.0 + items.len() as f64 * LEGEND_ROW);
    let mut out = header(SIZE + 260.0, height, &format!("{} palette", p.emotion));
    let (cx, cy) = (SIZE / 2.0, SIZE / 2.0);
    let total: f64 = items.iter().map(|s| s.weight).sum();
    let mut start = 0.0f64;
    for s in &items {
        let sweep = if total > 0.0 { s.weight / total } else { 0.0 };
        let attrs = format!(
            "data-color-id=\"{}\" data-weight=\"{}\" fill=\"{}\" stroke=\"#ffffff\" stroke-width=\"1\"",
            s.id,
            weight_str(s.weight),
            s.fill
        );
        if sweep >= 1.0 - 1e-12 {
            let _ = writeln!(out, "<circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{RADIUS:.3}\" {attrs}/>");
        } else {
            let a0 = 2.0 * PI * start - PI / 2.0;
            let a1 = 2.0 * PI * (start + sweep) - PI / 2.0;
            let (x0, y0) = (cx + RADIUS * a0.cos(), cy + RADIUS * a0.sin());
            let (x1, y1) = (cx + RADIUS * a1.cos(), cy + RADIUS * a1.sin());
            let large = u8::from(sweep > 0.5);
            let _ = writeln!(
                out,
                "<path d=\"M {cx:.3} {cy:.3} L {x0:.3} {y0:.3} A {RADIUS:.3} {RADIUS:.3} 0 {large} 1 {x1:.3} {y1:.3} Z\" {attrs}/>"
            );
        }
        start += sweep;
    }
    legend(&mut out, &items, SIZE + 10.0, 30.0);
    out.push_str("</svg>\n");
    out
}

pub fn palette_strip(p: &EmotionPalette, model: &ColorModel) -> String {
    const WIDTH: f64 = 600.0;
    const BAND: f64 = 60.0;
    let items = slices(p, model);
    let mut out = header(WIDTH, BAND + 20.0 + items.len() as f64 * LEGEND_ROW, &format!("{} palette", p.emotion));
    let total: f64 = items.iter().map(|s| s.weight).sum();
    let mut x = 0.0;
    for s in &items {
        let w = if total > 0.0 { WIDTH * s.weight / total } else { 0.0 };
        let _ = writeln!(
            out,
            "<rect x=\"{x:.3}\" y=\"0\" width=\"{w:.3}\" height=\"{BAND:.0}\" data-color-id=\"{}\" data-weight=\"{}\" fill=\"{}\"/>",
            s.id,
            weight_str(s.weight),
            s.fill
        );
        x += w;
    }
    legend(&mut out, &items, 0.0, BAND + 20.0);
    out.push_str("</svg>\n");
    out
}
