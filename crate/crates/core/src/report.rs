//! Plain-text report rendering: aligned tables for reading plus
//! `key=value` lines for scripts.

use std::fmt::Write as _;

use crate::eval::{EvalReport, SweepResult};
use crate::identify::{accept, IdentificationResult};

/// `probe_index,best_id,distance,accepted` per result.
pub fn identification_lines(results: &[IdentificationResult], threshold: f64) -> String {
    let mut out = String::new();
    for r in results {
        writeln!(out, "{},{},{:.6},{}", r.probe_index, r.best_id, r.best_distance, accept(r, threshold)).unwrap();
    }
    out
}

/// FNIR table (methods by target FPIR), an operating-point table, and one
/// `key=value` line per method and FPIR.
pub fn eval_table(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    let Some(first) = reports.first() else { return out };
    let fpirs: Vec<f64> = first.operating_points.iter().map(|p| p.target_fpir).collect();

    out.push_str("FNIR at target FPIR\n");
    write!(out, "{:<8}", "Method").unwrap();
    for f in &fpirs {
        write!(out, " | {:>8}", f).unwrap();
    }
    out.push('\n');
    write!(out, "{}", "-".repeat(8)).unwrap();
    for _ in &fpirs {
        out.push_str("-+---------");
    }
    out.push('\n');
    for r in reports {
        write!(out, "{:<8}", r.method.label()).unwrap();
        for p in &r.operating_points {
            write!(out, " | {:>8.4}", p.fnir).unwrap();
        }
        out.push('\n');
    }

    out.push_str("\nOperating points\n");
    writeln!(
        out,
        "{:<8} | {:>8} | {:>9} | {:>8} | {:>9} | {:>6} | {:>8}",
        "Method", "FPIR", "Threshold", "Realized", "Precision", "Recall", "Avg size"
    )
    .unwrap();
    for r in reports {
        for p in &r.operating_points {
            let precision = if p.precision.precision_defined {
                format!("{:.4}", p.precision.precision)
            } else {
                "n/a".to_string()
            };
            writeln!(
                out,
                "{:<8} | {:>8} | {:>9.6} | {:>8.4} | {:>9} | {:>6.4} | {:>8.2}{}",
                r.method.label(),
                p.target_fpir,
                p.threshold,
                p.realized_fpir,
                precision,
                p.precision.recall,
                r.avg_gallery_size,
                if p.achievable { "" } else { "  (target below 1/num_nonmates)" }
            )
            .unwrap();
        }
    }

    out.push('\n');
    for r in reports {
        out.push_str(&key_values(r));
    }
    out
}

pub fn key_values(r: &EvalReport) -> String {
    let mut out = String::new();
    for p in &r.operating_points {
        writeln!(
            out,
            "method={} target_fpir={} threshold={:.6} fnir={:.6} realized_fpir={:.6} achievable={} \
             precision={:.6} precision_defined={} recall={:.6} avg_gallery_size={:.4} num_mates={} num_nonmates={}",
            r.method.key(),
            p.target_fpir,
            p.threshold,
            p.fnir,
            p.realized_fpir,
            p.achievable,
            p.precision.precision,
            p.precision.precision_defined,
            p.precision.recall,
            r.avg_gallery_size,
            r.num_mates,
            r.num_nonmates,
        )
        .unwrap();
    }
    out
}

/// Sorted sweep results as a `pr | b | r | FNIR` table plus `key=value` lines.
pub fn sweep_table(results: &[SweepResult]) -> String {
    let mut out = String::new();
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x}"));
    let fpir = results
        .first()
        .and_then(|r| r.report.operating_points.first())
        .map_or(0.0, |p| p.target_fpir);
    writeln!(out, "Sweep settings by FNIR at FPIR={fpir}").unwrap();
    writeln!(out, "{:>5} | {:>5} | {:>5} | {:>8} | {:>8}", "pr", "b", "r", "FNIR", "Avg size").unwrap();
    out.push_str("------+-------+-------+----------+---------\n");
    for s in results {
        writeln!(
            out,
            "{:>5} | {:>5} | {:>5} | {:>8.4} | {:>8.2}",
            opt(s.pruning_ratio),
            opt(s.bandwidth),
            s.radius,
            s.report.primary_fnir(),
            s.report.avg_gallery_size
        )
        .unwrap();
    }
    out.push('\n');
    for (rank, s) in results.iter().enumerate() {
        writeln!(
            out,
            "rank={} method={} pruning_ratio={} bandwidth={} radius={} target_fpir={} fnir={:.6} avg_gallery_size={:.4}",
            rank + 1,
            s.report.method.key(),
            opt(s.pruning_ratio),
            opt(s.bandwidth),
            s.radius,
            fpir,
            s.report.primary_fnir(),
            s.report.avg_gallery_size
        )
        .unwrap();
    }
    out
}
