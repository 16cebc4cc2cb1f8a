//! SVG line charts of benchmark logs: per-optimiser mean `avg_cum_reward`
//! across seeds with a shaded band of 1.5 standard deviations.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 45.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
];

/// Per-iteration values of one optimiser, one entry per seed.
type Series = BTreeMap<usize, Vec<f64>>;

/// Parses one run CSV, returning `(optimizer, iter -> avg_cum_reward)` rows.
fn parse_run_csv(text: &str) -> Result<Vec<(String, usize, f64)>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::InvalidConfig("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let idx = |name: &str| {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::InvalidConfig(format!("CSV lacks column '{name}'")))
    };
    let (i_iter, i_opt, i_acr) = (idx("iter")?, idx("optimizer")?, idx("avg_cum_reward")?);
    let mut out = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let iter: usize =
            f[i_iter].parse().map_err(|_| Error::InvalidConfig(format!("bad row: {line}")))?;
        let acr: f64 =
            f[i_acr].parse().map_err(|_| Error::InvalidConfig(format!("bad row: {line}")))?;
        out.push((f[i_opt].to_string(), iter, acr));
    }
    Ok(out)
}

/// Reads every `*_seed*.csv` in `dir` and writes `out_svg`.
pub fn plot_dir(dir: &Path, out_svg: &Path) -> Result<()> {
    let mut files: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.contains("_seed") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidConfig(format!("no run CSVs in {}", dir.display())));
    }
    let mut by_opt: BTreeMap<String, Series> = BTreeMap::new();
    for f in &files {
        for (opt, iter, acr) in parse_run_csv(&std::fs::read_to_string(f)?)? {
            by_opt.entry(opt).or_default().entry(iter).or_default().push(acr);
        }
    }
    let svg = render(&by_opt)?;
    std::fs::write(out_svg, svg)?;
    Ok(())
}

fn render(by_opt: &BTreeMap<String, Series>) -> Result<String> {
    // mean and 1.5-std band per optimiser
    let mut bands: Vec<(&str, Vec<(usize, f64, f64)>)> = Vec::new();
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut x_max = 1usize;
    for (opt, series) in by_opt {
        let mut pts = Vec::new();
        for (&iter, vals) in series {
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / vals.len() as f64;
            let band = 1.5 * var.sqrt();
            y_min = y_min.min(m - band);
            y_max = y_max.max(m + band);
            x_max = x_max.max(iter);
            pts.push((iter, m, band));
        }
        bands.push((opt, pts));
    }
    if !(y_min.is_finite() && y_max.is_finite()) {
        return Err(Error::InvalidConfig("no finite data to plot".into()));
    }
    if y_max - y_min < 1e-9 {
        y_max = y_min + 1.0;
    }

    let px = |iter: usize| {
        MARGIN_L + (iter.saturating_sub(1)) as f64 / (x_max - 1).max(1) as f64
            * (WIDTH - MARGIN_L - MARGIN_R)
    };
    let py = |v: f64| {
        HEIGHT - MARGIN_B - (v - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    };

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .ok();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).ok();
    // axes
    writeln!(
        s,
        r#"<line x1="{MARGIN_L}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    )
    .ok();
    writeln!(
        s,
        r#"<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{}" stroke="black"/>"#,
        HEIGHT - MARGIN_B
    )
    .ok();
    writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">iteration</text>"#,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 10.0
    )
    .ok();
    writeln!(
        s,
        r#"<text x="18" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">avg cumulative reward</text>"#,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0
    )
    .ok();
    for (v, anchor_y) in [(y_min, HEIGHT - MARGIN_B), (y_max, MARGIN_T + 5.0)] {
        writeln!(
            s,
            r#"<text x="{}" y="{anchor_y}" font-size="11" text-anchor="end">{v:.1}</text>"#,
            MARGIN_L - 6.0
        )
        .ok();
    }
    for (v, x) in [(1usize, px(1)), (x_max, px(x_max))] {
        writeln!(
            s,
            r#"<text x="{x}" y="{}" font-size="11" text-anchor="middle">{v}</text>"#,
            HEIGHT - MARGIN_B + 16.0
        )
        .ok();
    }

    for (k, (opt, pts)) in bands.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        // band polygon: upper edge forward, lower edge back
        let mut poly = String::new();
        for (it, m, b) in pts {
            write!(poly, "{},{} ", px(*it), py(m + b)).ok();
        }
        for (it, m, b) in pts.iter().rev() {
            write!(poly, "{},{} ", px(*it), py(m - b)).ok();
        }
        writeln!(s, r#"<polygon points="{}" fill="{color}" opacity="0.15"/>"#, poly.trim()).ok();
        let line: Vec<String> =
            pts.iter().map(|(it, m, _)| format!("{},{}", px(*it), py(*m))).collect();
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            line.join(" ")
        )
        .ok();
        let ly = MARGIN_T + 16.0 * (k + 1) as f64;
        writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            WIDTH - MARGIN_R + 10.0,
            WIDTH - MARGIN_R + 34.0
        )
        .ok();
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12">{opt}</text>"#,
            WIDTH - MARGIN_R + 40.0,
            ly + 4.0
        )
        .ok();
    }
    writeln!(s, "</svg>").ok();
    Ok(s)
}
