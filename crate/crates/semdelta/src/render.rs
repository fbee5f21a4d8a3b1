//! Report rendering: canonical JSON, per-record CSV and an SVG histogram.
//!
//! Every output is a pure function of the report, so rendering the same
//! report twice is byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use semdelta_core::{AnalysisReport, Comparison, GroupSummary, Label, SampleStats, WelchResult};

pub const SCHEMA_VERSION: u64 = 1;
/// Significant digits kept when serializing floats.
pub const FLOAT_DIGITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
    Svg,
}

pub fn render_report(report: &AnalysisReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => render_json(report).into_bytes(),
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Svg => render_svg(report).into_bytes(),
    }
}

/// Shortest round-trip representation truncated (not rounded) to
/// [`FLOAT_DIGITS`] significant digits. Positional notation for exponents in
/// `-5..15`, scientific otherwise. Non-finite values become `null`.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{:e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("{:e} always has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let mut digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    digits.truncate(FLOAT_DIGITS);
    while digits.len() > 1 && digits.ends_with('0') {
        digits.pop();
    }

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-5..15).contains(&exp) {
        if exp < 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
            out.push_str(&digits);
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(&digits);
                out.extend(std::iter::repeat_n('0', int_len - digits.len()));
                out.push_str(".0");
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
    } else {
        out.push_str(&digits[..1]);
        out.push('.');
        out.push_str(if digits.len() > 1 { &digits[1..] } else { "0" });
        let _ = write!(out, "e{exp}");
    }
    out
}

/// Minimal JSON tree whose objects keep keys sorted.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(BTreeMap<String, Json>),
}

impl Json {
    fn obj<const N: usize>(pairs: [(&str, Json); N]) -> Json {
        Json::Obj(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    fn write(&self, out: &mut String, indent: usize) {
        let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Float(x) => out.push_str(&format_float(*x)),
            Json::Str(s) => out.push_str(&serde_json::to_string(s).expect("strings always serialize")),
            Json::Arr(items) if items.is_empty() => out.push_str("[]"),
            Json::Obj(map) if map.is_empty() => out.push_str("{}"),
            Json::Arr(items) => {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    pad(out, indent + 2);
                    item.write(out, indent + 2);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push(']');
            }
            Json::Obj(map) => {
                out.push_str("{\n");
                for (i, (k, v)) in map.iter().enumerate() {
                    pad(out, indent + 2);
                    out.push_str(&serde_json::to_string(k).expect("strings always serialize"));
                    out.push_str(": ");
                    v.write(out, indent + 2);
                    out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push('}');
            }
        }
    }

    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }
}

fn stats_json(s: &SampleStats) -> Json {
    Json::obj([
        ("n", Json::Int(s.n as i64)),
        ("mean", Json::Float(s.mean)),
        ("variance", Json::Float(s.variance())),
        ("std_dev", Json::Float(s.std_dev())),
    ])
}

fn group_json(g: &GroupSummary) -> Json {
    let per_source = g
        .per_source
        .iter()
        .map(|(src, s)| {
            (
                src.clone(),
                Json::obj([
                    ("delta", stats_json(&s.delta)),
                    ("entropy_bits", stats_json(&s.entropy)),
                ]),
            )
        })
        .collect();
    Json::obj([
        ("delta", stats_json(&g.delta)),
        ("entropy_bits", stats_json(&g.entropy)),
        ("aggregate_delta_mean", Json::Float(g.aggregate_delta_mean)),
        ("aggregate_entropy_mean", Json::Float(g.aggregate_entropy_mean)),
        ("per_source", Json::Obj(per_source)),
    ])
}

fn welch_json(c: &Comparison) -> Json {
    match c {
        Comparison::Tested(r) => Json::obj([
            ("applicable", Json::Bool(true)),
            ("groups", Json::str("ai - human")),
            ("t_statistic", Json::Float(r.t_statistic)),
            ("degrees_of_freedom", Json::Float(r.degrees_of_freedom)),
            ("p_value", Json::Float(r.p_value)),
            ("alternative", Json::str(r.alternative.as_str())),
            ("reject_at_0_05", Json::Bool(r.reject_at_0_05)),
        ]),
        Comparison::NotApplicable(reason) => {
            Json::obj([("applicable", Json::Bool(false)), ("reason", Json::str(reason.clone()))])
        }
    }
}

fn opt_str(s: &Option<String>) -> Json {
    s.as_ref().map_or(Json::Null, |s| Json::str(s.clone()))
}

/// The report as a [`Json`] tree.
pub fn report_json(report: &AnalysisReport) -> Json {
    let records = report
        .records
        .iter()
        .map(|r| {
            Json::obj([
                ("id", Json::str(r.id.clone())),
                ("label", Json::str(r.label.as_str())),
                ("source", Json::str(r.source.clone())),
                ("top1", Json::str(r.top1.clone())),
                ("iv1", Json::Float(r.iv1)),
                ("top2", opt_str(&r.top2)),
                ("iv2", Json::Float(r.iv2)),
                ("delta", Json::Float(r.delta)),
                ("entropy_bits", Json::Float(r.entropy_bits)),
                ("support_size", Json::Int(r.support_size as i64)),
                ("matched_occurrences", Json::Int(r.matched_occurrences as i64)),
                ("total_tokens", Json::Int(r.total_tokens as i64)),
            ])
        })
        .collect();
    let skipped = report
        .skipped
        .iter()
        .map(|s| {
            Json::obj([
                ("id", Json::str(s.id.clone())),
                ("label", Json::str(s.label.as_str())),
                ("source", Json::str(s.source.clone())),
                ("reason", Json::str(s.reason.as_str())),
            ])
        })
        .collect();
    let groups = report
        .groups
        .iter()
        .map(|(l, g)| (l.as_str().to_string(), group_json(g)))
        .collect();
    let histogram = report
        .histogram
        .iter()
        .map(|(l, bins)| {
            let bins = bins
                .iter()
                .map(|b| {
                    Json::obj([
                        ("lower", Json::Float(b.lower)),
                        ("upper", Json::Float(b.upper)),
                        ("count", Json::Int(b.count as i64)),
                    ])
                })
                .collect();
            (l.as_str().to_string(), Json::Arr(bins))
        })
        .collect();
    let inputs = report
        .inputs
        .iter()
        .map(|m| Json::Obj(m.iter().map(|(k, v)| (k.clone(), Json::str(v.clone()))).collect()))
        .collect();
    let o = &report.options;

    Json::obj([
        ("schema_version", Json::Int(SCHEMA_VERSION as i64)),
        ("lexicon", Json::str(report.lexicon_name.clone())),
        (
            "options",
            Json::obj([
                ("normalization", Json::str(o.normalization.as_str())),
                ("alternative", Json::str(o.alternative.as_str())),
                ("aggregation", Json::str(o.aggregation.as_str())),
                ("histogram_bins", Json::Int(o.histogram_bins as i64)),
            ]),
        ),
        ("inputs", Json::Arr(inputs)),
        ("records", Json::Arr(records)),
        ("groups", Json::Obj(groups)),
        ("welch_delta", welch_json(&report.welch_delta)),
        ("welch_entropy", welch_json(&report.welch_entropy)),
        ("skipped", Json::Arr(skipped)),
        ("skipped_count", Json::Int(report.skipped.len() as i64)),
        (
            "histogram",
            Json::obj([
                (
                    "range",
                    Json::Arr(vec![Json::Float(0.0), Json::Float(report.histogram_upper)]),
                ),
                ("bins", Json::Obj(histogram)),
            ]),
        ),
    ])
}

pub fn render_json(report: &AnalysisReport) -> String {
    report_json(report).to_pretty()
}

pub const CSV_HEADER: [&str; 9] = [
    "id",
    "label",
    "source",
    "top1",
    "iv1",
    "top2",
    "iv2",
    "delta",
    "entropy_bits",
];

pub fn render_csv(report: &AnalysisReport) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("writing to memory");
    for r in &report.records {
        w.write_record([
            r.id.as_str(),
            r.label.as_str(),
            r.source.as_str(),
            r.top1.as_str(),
            &format_float(r.iv1),
            r.top2.as_deref().unwrap_or(""),
            &format_float(r.iv2),
            &format_float(r.delta),
            &format_float(r.entropy_bits),
        ])
        .expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

const SVG_W: f64 = 820.0;
const SVG_H: f64 = 520.0;
const PLOT_L: f64 = 70.0;
const PLOT_R: f64 = 790.0;
const PLOT_T: f64 = 60.0;
const PLOT_B: f64 = 400.0;

fn color(label: Label) -> &'static str {
    match label {
        Label::Ai => "#d62728",
        Label::Human => "#1f77b4",
    }
}

fn welch_line(name: &str, c: &Comparison) -> String {
    match c.result() {
        Some(WelchResult {
            t_statistic,
            degrees_of_freedom,
            p_value,
            alternative,
            ..
        }) => format!(
            "Welch {name} (ai - human, {alternative}): t = {t_statistic:.4}, df = {degrees_of_freedom:.2}, p = {}",
            format_p(*p_value)
        ),
        None => format!("Welch {name}: n/a"),
    }
}

fn format_p(p: f64) -> String {
    if p < 1e-4 {
        format!("{p:.3e}")
    } else {
        format!("{p:.4}")
    }
}

/// Overlaid per-label delta histograms with mean and one-sigma markers.
pub fn render_svg(report: &AnalysisReport) -> String {
    let upper = report.histogram_upper;
    let max_count = report
        .histogram
        .values()
        .flat_map(|bins| bins.iter().map(|b| b.count))
        .max()
        .unwrap_or(0)
        .max(1);
    let x_of = |v: f64| PLOT_L + (v / upper).clamp(0.0, 1.0) * (PLOT_R - PLOT_L);
    let y_of = |c: f64| PLOT_B - c / max_count as f64 * (PLOT_B - PLOT_T);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{SVG_W}" height="{SVG_H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" text-anchor="middle" font-size="16">Semantic delta (top-1 minus top-2 intensity) by label</text>"#,
        SVG_W / 2.0
    );

    for (label, bins) in &report.histogram {
        let _ = writeln!(s, r#"<g fill="{}" fill-opacity="0.45" stroke="none">"#, color(*label));
        for b in bins.iter().filter(|b| b.count > 0) {
            let (x0, x1) = (x_of(b.lower), x_of(b.upper));
            let y = y_of(b.count as f64);
            let _ = writeln!(
                s,
                r#"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}"/>"#,
                (x1 - x0).max(0.5),
                PLOT_B - y
            );
        }
        let _ = writeln!(s, "</g>");
    }

    // axes
    let _ = writeln!(
        s,
        r#"<path d="M{PLOT_L} {PLOT_T} V{PLOT_B} H{PLOT_R}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let v = upper * k as f64 / 5.0;
        let x = x_of(v);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{PLOT_B}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{v:.3}</text>"#,
            PLOT_B + 5.0,
            PLOT_B + 20.0
        );
        let c = max_count as f64 * k as f64 / 5.0;
        let y = y_of(c);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{PLOT_L}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{c:.1}</text>"#,
            PLOT_L - 5.0,
            PLOT_L - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">delta</text>"#,
        (PLOT_L + PLOT_R) / 2.0,
        PLOT_B + 38.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">records</text>"#,
        (PLOT_T + PLOT_B) / 2.0,
        (PLOT_T + PLOT_B) / 2.0
    );

    // mean and +-1 sd markers
    for (label, g) in &report.groups {
        let c = color(*label);
        let (m, sd) = (g.delta.mean, g.delta.std_dev());
        let xm = x_of(m);
        let _ = writeln!(
            s,
            r#"<line x1="{xm:.2}" y1="{PLOT_T}" x2="{xm:.2}" y2="{PLOT_B}" stroke="{c}" stroke-width="2" stroke-dasharray="6 4"/>"#
        );
        let (lo, hi) = (x_of(m - sd), x_of(m + sd));
        let yb = PLOT_T + 6.0 + if *label == Label::Ai { 0.0 } else { 10.0 };
        let _ = writeln!(
            s,
            r#"<line x1="{lo:.2}" y1="{yb:.2}" x2="{hi:.2}" y2="{yb:.2}" stroke="{c}" stroke-width="2"/>"#
        );
    }

    // legend and annotations
    let mut y = PLOT_B + 62.0;
    for (label, g) in &report.groups {
        let _ = writeln!(
            s,
            r#"<rect x="{PLOT_L}" y="{:.2}" width="12" height="12" fill="{}" fill-opacity="0.6"/><text x="{}" y="{y:.2}">{}: n = {}, mean = {:.4}, sd = {:.4}</text>"#,
            y - 10.0,
            color(*label),
            PLOT_L + 18.0,
            label,
            g.delta.n,
            g.delta.mean,
            g.delta.std_dev()
        );
        y += 16.0;
    }
    for (name, c) in [("delta", &report.welch_delta), ("entropy", &report.welch_entropy)] {
        let _ = writeln!(s, r#"<text x="{PLOT_L}" y="{y:.2}">{}</text>"#, welch_line(name, c));
        y += 16.0;
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        let cases = [
            (0.0, "0.0"),
            (-0.0, "0.0"),
            (1.0, "1.0"),
            (2.0, "2.0"),
            (0.5, "0.5"),
            (0.25, "0.25"),
            (-1.25, "-1.25"),
            (1.5219280948873623, "1.521928094"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.3333333333"),
            (2.0 / 3.0, "0.6666666666"),
            (123456.0, "123456.0"),
            (1e14, "100000000000000.0"),
            (1e15, "1.0e15"),
            (0.00001234, "0.00001234"),
            (0.000001234, "1.234e-6"),
            (-1.7320508075688772, "-1.732050807"),
            (4.411764705882353, "4.411764705"),
            (f64::NAN, "null"),
        ];
        for (x, want) in cases {
            assert_eq!(format_float(x), want, "{x:e}");
        }
    }

    #[test]
    fn json_is_sorted_and_escaped() {
        let j = Json::obj([
            ("b", Json::Int(1)),
            ("a", Json::str("q\"x\n")),
            ("c", Json::Arr(vec![])),
        ]);
        assert_eq!(
            j.to_pretty(),
            "{\n  \"a\": \"q\\\"x\\n\",\n  \"b\": 1,\n  \"c\": []\n}\n"
        );
    }
}
