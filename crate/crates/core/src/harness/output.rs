//! Report files: one CSV with a row per (scenario, setting) followed by a
//! summary row per setting, and three bar charts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{BenchReport, SettingSummary};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 10] = [
    "kind",
    "scenario",
    "setting",
    "delay_s",
    "delay_std_s",
    "makespan_s",
    "wall_time_s",
    "evaluations",
    "wins",
    "failures",
];

/// Chart file names, in the order delay, time, wins.
pub const SVG_FILES: [&str; 3] = ["delay.svg", "time.svg", "wins.svg"];

/// Decimal text rounded to 12 significant digits, shortest form that parses
/// back to the rounded value. Non-finite values become an empty field.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn parse_number(field: &str) -> Result<f64> {
    if field.is_empty() {
        return Ok(f64::NAN);
    }
    field
        .parse()
        .map_err(|_| Error::Config(format!("bad number `{field}` in report")))
}

/// Report as CSV text.
pub fn csv_string(report: &BenchReport) -> Result<String> {
    if report.settings.is_empty() {
        return Err(Error::Config("report has no settings".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for c in &report.cells {
        w.write_record([
            "cell".to_string(),
            c.scenario.to_string(),
            report.settings[c.setting].name.clone(),
            format_number(c.total_delay),
            String::new(),
            format_number(c.makespan),
            format_number(c.wall_time_s),
            c.evaluations.to_string(),
            u8::from(c.winner).to_string(),
            u8::from(!c.solved()).to_string(),
        ])?;
    }
    for s in &report.summary {
        w.write_record([
            "summary".to_string(),
            String::new(),
            s.name.clone(),
            format_number(s.mean_delay_s),
            format_number(s.std_delay_s),
            format_number(s.mean_makespan_s),
            format_number(s.mean_wall_time_s),
            format_number(s.mean_evaluations),
            s.wins.to_string(),
            s.failures.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn write_csv(report: &BenchReport, path: impl AsRef<Path>) -> Result<()> {
    let text = csv_string(report)?;
    fs::write(path, text)?;
    Ok(())
}

/// Summary rows of a report CSV.
pub fn read_summary_csv(path: impl AsRef<Path>) -> Result<Vec<SettingSummary>> {
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::Config("not a benchmark report: unexpected CSV header".into()));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if &rec[0] != "summary" {
            continue;
        }
        let count = |i: usize| {
            rec[i]
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad count `{}` in report", &rec[i])))
        };
        out.push(SettingSummary {
            name: rec[2].to_string(),
            mean_delay_s: parse_number(&rec[3])?,
            std_delay_s: parse_number(&rec[4])?,
            mean_makespan_s: parse_number(&rec[5])?,
            mean_wall_time_s: parse_number(&rec[6])?,
            mean_evaluations: parse_number(&rec[7])?,
            wins: count(8)?,
            failures: count(9)?,
        });
    }
    if out.is_empty() {
        return Err(Error::Config("report has no summary rows".into()));
    }
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bar_chart(title: &str, unit: &str, bars: &[(&str, f64)]) -> String {
    const LEFT: f64 = 60.0;
    const TOP: f64 = 50.0;
    const PLOT_H: f64 = 220.0;
    const SLOT: f64 = 100.0;
    let width = LEFT + SLOT * bars.len() as f64 + 20.0;
    let height = TOP + PLOT_H + 60.0;
    let max = bars
        .iter()
        .map(|b| b.1)
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let scale = if max > 0.0 { PLOT_H / max } else { 0.0 };
    let base = TOP + PLOT_H;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" transform="rotate(-90 14 {:.1})" text-anchor="middle">{}</text>"#,
        TOP + PLOT_H / 2.0,
        TOP + PLOT_H / 2.0,
        escape(unit)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{base}" x2="{:.1}" y2="{base}" stroke="black"/>"#,
        width - 10.0
    );
    for (i, &(name, value)) in bars.iter().enumerate() {
        let x = LEFT + SLOT * i as f64 + 20.0;
        let h = if value.is_finite() { value * scale } else { 0.0 };
        let label = if value.is_finite() { format!("{value:.4}") } else { "n/a".to_string() };
        let _ = writeln!(
            s,
            r##"<rect class="bar" x="{x:.1}" y="{:.2}" width="60" height="{h:.2}" fill="#4477aa"/>"##,
            base - h
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            x + 30.0,
            base - h - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            x + 30.0,
            base + 18.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// The delay, time and wins charts, in [`SVG_FILES`] order.
pub fn render_svg(summary: &[SettingSummary]) -> Result<[String; 3]> {
    if summary.is_empty() {
        return Err(Error::Config("nothing to plot: no settings".into()));
    }
    let pick = |f: fn(&SettingSummary) -> f64| -> Vec<(&str, f64)> {
        summary.iter().map(|s| (s.name.as_str(), f(s))).collect()
    };
    Ok([
        bar_chart("Mean total delay", "delay (s)", &pick(|s| s.mean_delay_s)),
        bar_chart("Mean solve time", "wall time (s)", &pick(|s| s.mean_wall_time_s)),
        bar_chart("Scenarios won", "wins", &pick(|s| s.wins as f64)),
    ])
}

/// Writes the three charts into `dir`.
pub fn render_svgs(summary: &[SettingSummary], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    for (name, body) in SVG_FILES.iter().zip(render_svg(summary)?) {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_bench, BenchContext, BenchSetting, SolverKind};
    use crate::scengen::{generate_corpus, GenConfig};

    fn report() -> BenchReport {
        let cfg = GenConfig {
            request_count: 5,
            bandwidth_mhz: 10,
            capacity_mhz: 400.0,
            ..GenConfig::default()
        };
        let corpus = generate_corpus(&cfg, 4).unwrap();
        let settings = vec![
            BenchSetting::new("ga-200", SolverKind::Ga, 200),
            BenchSetting::new("evo-200", SolverKind::Evo, 200),
        ];
        run_bench::<f64>(&corpus, &settings, &BenchContext::default()).unwrap()
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(123_456_789.123_456_79), "123456789.123");
        assert_eq!(format_number(2.5e-7), "0.00000025");
        assert_eq!(format_number(f64::NAN), "");
        for x in [19.309123456789123, 1e-12, 7.0, 6.02214076e23] {
            let s = format_number(x);
            assert_eq!(format_number(s.parse().unwrap()), s);
            assert!(((s.parse::<f64>().unwrap() - x) / x).abs() < 1e-11);
        }
    }

    #[test]
    fn csv_round_trips_numbers() {
        let report = report();
        let text = csv_string(&report).unwrap();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        assert!(r.headers().unwrap().iter().eq(CSV_HEADER));
        let rows: Vec<csv::StringRecord> = r.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), report.cells.len() + report.summary.len());
        for (row, cell) in rows.iter().zip(&report.cells) {
            assert_eq!(&row[0], "cell");
            let back: f64 = row[3].parse().unwrap();
            assert_eq!(back, format_number(cell.total_delay).parse::<f64>().unwrap());
            assert!((back - cell.total_delay).abs() <= 1e-11 * cell.total_delay);
            assert_eq!(row[7].parse::<u64>().unwrap(), cell.evaluations);
        }
    }

    #[test]
    fn summary_rows_read_back() {
        let report = report();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        write_csv(&report, &path).unwrap();
        let back = read_summary_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in back.iter().zip(&report.summary) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.wins, b.wins);
            assert_eq!(format_number(a.mean_delay_s), format_number(b.mean_delay_s));
        }
    }

    #[test]
    fn one_bar_per_setting_per_chart() {
        let report = report();
        let charts = render_svg(&report.summary).unwrap();
        for chart in &charts {
            assert_eq!(chart.matches(r#"class="bar""#).count(), 2);
            assert!(chart.contains("ga-200") && chart.contains("evo-200"));
        }
        assert_eq!(render_svg(&report.summary).unwrap(), charts);
    }

    #[test]
    fn empty_settings_are_an_error() {
        assert!(render_svg(&[]).is_err());
        let dir = tempfile::tempdir().unwrap();
        assert!(render_svgs(&[], dir.path()).is_err());
        assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let report = report();
        assert!(write_csv(&report, "/nonexistent-dir/report.csv").is_err());
    }
}
