//! CSV serialization and text summaries of sweep results.

use std::fmt::Write as _;
use std::path::Path;

use crate::decoders::structure::STRUCTURE_TOLERANCE;
use crate::decoders::StructureReport;
use crate::error::{Error, Result};
use crate::harness::{StructureSummary, SweepRow};

pub const CSV_HEADER: [&str; 10] = [
    "decoder",
    "snr_db",
    "trials",
    "symbol_errors",
    "ser",
    "cer",
    "mean_visited_nodes",
    "mean_mults",
    "mean_divs",
    "ci95_ser",
];

const BASELINE: &str = "sd-baseline";

/// `printf("%g")` with six significant digits.
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn record(row: &SweepRow) -> [String; 10] {
    [
        row.decoder.clone(),
        format_g(row.snr_db),
        row.trials.to_string(),
        row.symbol_errors.to_string(),
        format_g(row.ser),
        format_g(row.cer),
        format_g(row.mean_visited_nodes),
        format_g(row.mean_mults),
        format_g(row.mean_divs),
        format_g(row.ci95_ser),
    ]
}

fn writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    std::fs::write(path, rows_to_csv(rows)?)?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!("unexpected csv header in {}", path.display())));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse().map_err(|_| Error::Config(format!("bad {} value `{}`", CSV_HEADER[i], &rec[i])))
        };
        let int = |i: usize| -> Result<u64> {
            rec[i].parse().map_err(|_| Error::Config(format!("bad {} value `{}`", CSV_HEADER[i], &rec[i])))
        };
        rows.push(SweepRow {
            decoder: rec[0].to_string(),
            snr_db: num(1)?,
            trials: int(2)?,
            symbol_errors: int(3)?,
            ser: num(4)?,
            cer: num(5)?,
            mean_visited_nodes: num(6)?,
            mean_mults: num(7)?,
            mean_divs: num(8)?,
            ci95_ser: num(9)?,
        });
    }
    Ok(rows)
}

fn table(header: &[&str], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: Vec<&str>| {
        let parts: Vec<String> =
            cells.iter().zip(&widths).enumerate().map(|(i, (c, &w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") }).collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut out, header.to_vec());
    line(&mut out, widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(|s| s.as_str()).collect());
    for row in body {
        line(&mut out, row.iter().map(|s| s.as_str()).collect());
    }
    out
}

fn reduction(candidate: f64, baseline: f64) -> String {
    if baseline == 0.0 {
        "n/a".into()
    } else {
        format!("{:.1}%", 100.0 * (1.0 - candidate / baseline))
    }
}

/// Aligned text report: all rows, then reductions of each `simplified*`
/// decoder relative to `sd-baseline` at matching SNR points.
pub fn summarize(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.decoder.clone(),
                format_g(r.snr_db),
                r.trials.to_string(),
                format_g(r.ser),
                format_g(r.mean_visited_nodes),
                format_g(r.mean_mults),
                format_g(r.mean_divs),
            ]
        })
        .collect();
    out.push_str(&table(&["decoder", "snr_db", "trials", "ser", "nodes", "mults", "divs"], &body));

    let mut comparisons = Vec::new();
    for cand in rows.iter().filter(|r| r.decoder.starts_with("simplified")) {
        let Some(base) = rows.iter().find(|b| b.decoder == BASELINE && b.snr_db == cand.snr_db) else {
            continue;
        };
        comparisons.push(vec![
            cand.decoder.clone(),
            format_g(cand.snr_db),
            reduction(cand.mean_visited_nodes, base.mean_visited_nodes),
            reduction(cand.mean_mults, base.mean_mults),
            reduction(cand.mean_divs, base.mean_divs),
            format_g(cand.ser - base.ser),
        ]);
    }
    if !comparisons.is_empty() {
        let _ = writeln!(out, "\nreduction relative to {BASELINE}");
        out.push_str(&table(&["decoder", "snr_db", "nodes", "mults", "divs", "ser_delta"], &comparisons));
    }
    out
}

fn claim_rows(name: &str, r: &StructureReport) -> Vec<Vec<String>> {
    let mut claims = vec![("R12 block", r.r12), ("R11 zeros", r.r11), ("R22 zeros", r.r22)];
    if let Some(g) = r.gram {
        claims.push(("cross-group Gram", g));
    }
    claims
        .into_iter()
        .map(|(claim, v)| {
            let mut row = vec![name.to_string(), claim.to_string(), format!("{v:.3e}")];
            row.extend([1e-6, STRUCTURE_TOLERANCE, 1e-12, 1e-15].map(|t| if v <= t { "pass" } else { "FAIL" }.to_string()));
            row
        })
        .collect()
}

/// Worst relative violation per claim and variant, with pass/fail at several tolerances.
pub fn render_structure(summary: &StructureSummary) -> String {
    let mut body = claim_rows("new", &summary.new);
    body.extend(claim_rows("original", &summary.original));
    let mut out = format!("{} channels per variant, relative violations (|entry| / max|R|)\n", summary.trials);
    out.push_str(&table(&["variant", "claim", "max", "1e-6", "1e-9", "1e-12", "1e-15"], &body));
    let verdict = if summary.passed() { "pass" } else { "FAIL" };
    let _ = writeln!(out, "\nnew variant at 1e-9: {verdict}");
    if !summary.original.r12_holds() {
        out.push_str("original variant: R12 block is not zero (expected)\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_formatting() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (254.6, "254.6"),
            (1276.6251, "1276.63"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (1.0 / 3.0, "0.333333"),
            (999999.5, "1e+06"),
            (17.5, "17.5"),
            (-0.000123456789, "-0.000123457"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g(x), want, "{x}");
        }
    }

    fn row(decoder: &str, snr: f64, nodes: f64, ser: f64) -> SweepRow {
        SweepRow {
            decoder: decoder.into(),
            snr_db: snr,
            trials: 100,
            symbol_errors: (ser * 800.0) as u64,
            ser,
            cer: 0.0,
            mean_visited_nodes: nodes,
            mean_mults: nodes * 10.0,
            mean_divs: nodes,
            ci95_ser: 0.0,
        }
    }

    #[test]
    fn identical_decoders_give_zero_reduction() {
        let rows = vec![row("sd-baseline", 0.0, 50.0, 0.1), row("simplified", 0.0, 50.0, 0.1)];
        let text = summarize(&rows);
        let line = text.lines().last().unwrap();
        assert_eq!(line.split_whitespace().collect::<Vec<_>>(), ["simplified", "0", "0.0%", "0.0%", "0.0%", "0"]);
    }

    #[test]
    fn comparison_section_needs_both_sides() {
        let text = summarize(&[row("sd-baseline", 0.0, 50.0, 0.1)]);
        assert!(!text.contains("reduction"));
        let text = summarize(&[row("simplified", 0.0, 50.0, 0.1)]);
        assert!(!text.contains("reduction"));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![row("sd-baseline", 0.0, 50.25, 0.125), row("simplified-cs2", 2.5, 12.0, 0.0)];
        let text = rows_to_csv(&rows).unwrap();
        assert!(text.starts_with("decoder,snr_db,trials,symbol_errors,ser,cer,mean_visited_nodes,mean_mults,mean_divs,ci95_ser\n"));
        assert!(!text.contains('\r'));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        write_csv(&rows, &path).unwrap();
        assert_eq!(read_csv(&path).unwrap(), rows);
    }
}
