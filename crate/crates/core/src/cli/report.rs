//! Text reports: a human-readable table with one-decimal percentages,
//! followed by a `[metrics]` block of `key=value` lines.

use std::io::{self, Write};

use crate::chunker::{ChunkEvaluation, ChunkKind};
use crate::metrics::{percent, PrfCounts};
use crate::relations::{RelationClass, RelationEvaluation};

/// A named ratio in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub key: String,
    pub label: String,
    pub value: f64,
}

fn metric(key: impl Into<String>, label: impl Into<String>, value: f64) -> Metric {
    Metric {
        key: key.into(),
        label: label.into(),
        value,
    }
}

fn prf_metrics(prefix: &str, label: &str, counts: PrfCounts, beta: f64) -> [Metric; 3] {
    let sep = if label.is_empty() { "" } else { " " };
    [
        metric(
            format!("{prefix}.precision"),
            format!("{label}{sep}prec."),
            counts.precision(),
        ),
        metric(
            format!("{prefix}.recall"),
            format!("{label}{sep}rec."),
            counts.recall(),
        ),
        metric(
            format!("{prefix}.f"),
            format!("{label}{sep}F"),
            counts.f_score(beta),
        ),
    ]
}

pub fn chunk_metrics(eval: &ChunkEvaluation, beta: f64) -> Vec<Metric> {
    let mut out = vec![metric("accuracy", "acc.", eval.accuracy.value())];
    out.extend(prf_metrics("overall", "", eval.overall(), beta));
    for kind in ChunkKind::ALL {
        let key = kind.as_str().to_ascii_lowercase();
        out.extend(prf_metrics(&key, kind.as_str(), eval.kind(kind), beta));
    }
    out
}

pub fn relation_metrics(eval: &RelationEvaluation, beta: f64) -> Vec<Metric> {
    let mut out = vec![metric("accuracy", "acc.", eval.accuracy.value())];
    out.extend(prf_metrics("together", "", eval.together(), beta));
    out.extend(prf_metrics(
        "subjects",
        "S",
        eval.class(RelationClass::Subject),
        beta,
    ));
    out.extend(prf_metrics(
        "objects",
        "O",
        eval.class(RelationClass::Object),
        beta,
    ));
    out
}

/// Element-wise mean of several metric rows with the same keys.
pub fn mean_metrics(rows: &[Vec<Metric>]) -> Vec<Metric> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    first
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let sum: f64 = rows.iter().map(|r| r[i].value).sum();
            metric(m.key.clone(), m.label.clone(), sum / rows.len() as f64)
        })
        .collect()
}

/// Fixed-width table; the column set is taken from the first row.
pub fn write_table(
    out: &mut dyn Write,
    corner: &str,
    rows: &[(String, Vec<Metric>)],
) -> io::Result<()> {
    let Some((_, first)) = rows.first() else {
        return Ok(());
    };
    let label_width = rows
        .iter()
        .map(|(l, _)| l.len())
        .chain([corner.len()])
        .max()
        .unwrap_or(0);
    let widths: Vec<usize> = first.iter().map(|m| m.label.len().max(5)).collect();
    write!(out, "{corner:<label_width$}")?;
    for (m, w) in first.iter().zip(&widths) {
        write!(out, "  {:>w$}", m.label)?;
    }
    writeln!(out)?;
    for (label, metrics) in rows {
        write!(out, "{label:<label_width$}")?;
        for (m, w) in metrics.iter().zip(&widths) {
            write!(out, "  {:>w$}", percent(m.value))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Machine-readable percentages, with more digits than the table.
pub fn machine_value(value: f64) -> String {
    format!("{:.4}", 100.0 * value)
}

pub fn write_machine_block(out: &mut dyn Write, entries: &[(String, String)]) -> io::Result<()> {
    writeln!(out)?;
    writeln!(out, "[metrics]")?;
    for (k, v) in entries {
        writeln!(out, "{k}={v}")?;
    }
    Ok(())
}

pub fn metric_entries(prefix: &str, metrics: &[Metric]) -> Vec<(String, String)> {
    metrics
        .iter()
        .map(|m| (format!("{prefix}{}", m.key), machine_value(m.value)))
        .collect()
}

fn count_entries(prefix: &str, counts: PrfCounts) -> Vec<(String, String)> {
    vec![
        (format!("{prefix}.correct"), counts.correct.to_string()),
        (format!("{prefix}.predicted"), counts.predicted.to_string()),
        (format!("{prefix}.gold"), counts.gold.to_string()),
    ]
}

fn write_prf_rows(out: &mut dyn Write, rows: &[(&str, PrfCounts)], beta: f64) -> io::Result<()> {
    let f_label = format!("F(b={beta})");
    writeln!(
        out,
        "{:<9}{:>7}{:>7}{:>9}{:>9}{:>11}{:>7}",
        "", "prec.", "rec.", f_label, "correct", "predicted", "gold"
    )?;
    for (label, c) in rows {
        writeln!(
            out,
            "{:<9}{:>7}{:>7}{:>9}{:>9}{:>11}{:>7}",
            label,
            percent(c.precision()),
            percent(c.recall()),
            percent(c.f_score(beta)),
            c.correct,
            c.predicted,
            c.gold
        )?;
    }
    Ok(())
}

pub fn write_chunk_evaluation(
    out: &mut dyn Write,
    eval: &ChunkEvaluation,
    sentences: usize,
    beta: f64,
) -> io::Result<()> {
    let acc = eval.accuracy;
    writeln!(
        out,
        "chunk evaluation: {sentences} sentences, {} tokens",
        acc.total
    )?;
    writeln!(
        out,
        "accuracy {} ({}/{})",
        percent(acc.value()),
        acc.correct,
        acc.total
    )?;
    writeln!(out)?;
    let mut rows: Vec<(&str, PrfCounts)> = ChunkKind::ALL
        .iter()
        .map(|k| (k.as_str(), eval.kind(*k)))
        .collect();
    rows.push(("overall", eval.overall()));
    write_prf_rows(out, &rows, beta)?;
    let mut entries = metric_entries("", &chunk_metrics(eval, beta));
    entries.push(("accuracy.correct".into(), acc.correct.to_string()));
    entries.push(("accuracy.total".into(), acc.total.to_string()));
    entries.extend(count_entries("overall", eval.overall()));
    for kind in ChunkKind::ALL {
        entries.extend(count_entries(
            &kind.as_str().to_ascii_lowercase(),
            eval.kind(kind),
        ));
    }
    write_machine_block(out, &entries)
}

pub fn write_relation_evaluation(
    out: &mut dyn Write,
    eval: &RelationEvaluation,
    sentences: usize,
    beta: f64,
) -> io::Result<()> {
    let acc = eval.accuracy;
    writeln!(
        out,
        "relation evaluation: {sentences} sentences, {} instances",
        acc.total
    )?;
    writeln!(
        out,
        "accuracy {} ({}/{})",
        percent(acc.value()),
        acc.correct,
        acc.total
    )?;
    writeln!(out)?;
    let rows = [
        ("Together", eval.together()),
        ("Subjects", eval.subjects),
        ("Objects", eval.objects),
    ];
    write_prf_rows(out, &rows, beta)?;
    let mut entries = metric_entries("", &relation_metrics(eval, beta));
    entries.push(("accuracy.correct".into(), acc.correct.to_string()));
    entries.push(("accuracy.total".into(), acc.total.to_string()));
    entries.extend(count_entries("together", eval.together()));
    entries.extend(count_entries("subjects", eval.subjects));
    entries.extend(count_entries("objects", eval.objects));
    write_machine_block(out, &entries)
}

/// Per-fold rows, then the macro average (mean of the fold rows) and the
/// micro total (one evaluation over all folds pooled).
pub fn write_cv_report(
    out: &mut dyn Write,
    header: &[(String, String)],
    folds: &[(usize, Vec<Metric>)],
    micro: &[Metric],
) -> io::Result<()> {
    for (k, v) in header {
        writeln!(out, "{k}: {v}")?;
    }
    writeln!(out)?;
    let macro_avg = mean_metrics(&folds.iter().map(|(_, m)| m.clone()).collect::<Vec<_>>());
    let mut rows: Vec<(String, Vec<Metric>)> = folds
        .iter()
        .enumerate()
        .map(|(i, (_, m))| (format!("fold {}", i + 1), m.clone()))
        .collect();
    rows.push(("macro avg".to_string(), macro_avg.clone()));
    rows.push(("micro total".to_string(), micro.to_vec()));
    write_table(out, "", &rows)?;

    let mut entries: Vec<(String, String)> = header
        .iter()
        .map(|(k, v)| (format!("config.{k}"), v.clone()))
        .collect();
    for (i, (test_sentences, metrics)) in folds.iter().enumerate() {
        entries.push((
            format!("fold.{}.sentences", i + 1),
            test_sentences.to_string(),
        ));
        entries.extend(metric_entries(&format!("fold.{}.", i + 1), metrics));
    }
    entries.extend(metric_entries("macro.", &macro_avg));
    entries.extend(metric_entries("micro.", micro));
    write_machine_block(out, &entries)
}
