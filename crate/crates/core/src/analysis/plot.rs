use std::fmt::Write as _;

use super::NsrPoint;
use crate::simulator::StrategyKind;

const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

/// NSR (percent, log scale) against shot count, one polyline per strategy.
pub fn nsr_svg(series: &[NsrPoint]) -> String {
    let pts: Vec<&NsrPoint> = series.iter().filter(|p| p.nsr.is_some_and(|v| v > 0.0)).collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if pts.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let k_max = pts.iter().map(|p| p.k).max().unwrap_or(1).max(2) as f64;
    let logs: Vec<f64> = pts.iter().map(|p| (100.0 * p.nsr.unwrap()).log10()).collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor();
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil().max(lo + 1.0);
    let x = |k: f64| PAD + (k - 1.0) / (k_max - 1.0) * (W - 2.0 * PAD);
    let y = |l: f64| H - PAD - (l - lo) / (hi - lo) * (H - 2.0 * PAD);

    let _ = writeln!(
        svg,
        r#"<path d="M{PAD} {t} V{b} H{r}" stroke="black" fill="none"/>"#,
        t = PAD,
        b = H - PAD,
        r = W - PAD
    );
    let mut decade = lo;
    while decade <= hi {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" font-size="11" text-anchor="end">{}%</text>"#,
            PAD - 4.0,
            y(decade) + 4.0,
            10f64.powf(decade)
        );
        decade += 1.0;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">shots k</text>"#,
        W / 2.0,
        H - 12.0
    );

    let mut kinds: Vec<StrategyKind> = Vec::new();
    for p in &pts {
        if !kinds.contains(&p.strategy) {
            kinds.push(p.strategy);
        }
    }
    for (i, kind) in kinds.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        for (p, l) in pts.iter().zip(&logs).filter(|(p, _)| p.strategy == *kind) {
            let cmd = if d.is_empty() { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{:.1} {:.1} ", x(p.k as f64), y(*l));
        }
        let _ = writeln!(
            svg,
            r#"<path d="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#,
            d.trim_end()
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            W - PAD - 130.0,
            PAD + 14.0 * i as f64,
            kind.name()
        );
    }
    svg.push_str("</svg>\n");
    svg
}
