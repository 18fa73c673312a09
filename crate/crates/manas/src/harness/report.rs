//! Report rendering: the five result tables as CSV or markdown, plus the
//! lossless CSV parser behind the re-render subcommand.
//!
//! All numeric formatting happens while building [`ReportSection`] values;
//! the CSV and markdown writers only lay out strings, so the two formats can
//! never disagree on a value.

use crate::harness::{ExperimentResult, HarnessError, SweepTable};

/// Output format for [`render_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

/// One rendered table: a stable slug, a header row, and data rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportSection {
    pub slug: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn title_of(slug: &str) -> &str {
    match slug {
        "per-class" => "Per-Class Precision, Recall, F1-Score",
        "averages" => "Macro and Weighted Averages",
        "errors" => "Error Rates and Deviations",
        "sweep" => "Accuracy Across Train/Test Splits",
        "neural" => "Sequence Model Accuracy and Loss",
        other => other,
    }
}

fn fmt2(value: f64) -> String {
    format!("{value:.2}")
}

fn strings(cells: &[&str]) -> Vec<String> {
    cells.iter().map(|c| c.to_string()).collect()
}

fn per_class_section(results: &[ExperimentResult]) -> ReportSection {
    let mut rows = Vec::new();
    for result in results {
        let name = result.config.model.display();
        let r = &result.class_report;
        for class in [0usize, 1] {
            rows.push(vec![
                if class == 0 { name.to_string() } else { String::new() },
                class.to_string(),
                fmt2(r.precision[class]),
                fmt2(r.recall[class]),
                fmt2(r.f1[class]),
            ]);
        }
    }
    ReportSection {
        slug: "per-class".into(),
        header: strings(&["Algorithms", "Status", "Precision", "Recall", "F1-Score"]),
        rows,
    }
}

fn averages_section(results: &[ExperimentResult]) -> ReportSection {
    let mut rows = Vec::new();
    for result in results {
        let name = result.config.model.display();
        let a = &result.aggregate;
        rows.push(vec![
            name.to_string(),
            "Macro avg.".into(),
            fmt2(a.macro_precision),
            fmt2(a.macro_recall),
            fmt2(a.macro_f1),
        ]);
        rows.push(vec![
            String::new(),
            "Weighted avg.".into(),
            fmt2(a.weighted_precision),
            fmt2(a.weighted_recall),
            fmt2(a.weighted_f1),
        ]);
    }
    ReportSection {
        slug: "averages".into(),
        header: strings(&[
            "Algorithms",
            "Macro & Weighted average",
            "Precision",
            "Recall",
            "F1-Score",
        ]),
        rows,
    }
}

fn errors_section(results: &[ExperimentResult]) -> ReportSection {
    let rows = results
        .iter()
        .map(|result| {
            let e = &result.errors;
            vec![
                result.config.model.display().to_string(),
                fmt2(e.fpr),
                fmt2(e.fnr),
                fmt2(e.npv),
                fmt2(e.fdr),
                fmt2(e.mae),
                fmt2(e.mse),
                fmt2(e.rmse),
                fmt2(e.log_loss),
            ]
        })
        .collect();
    ReportSection {
        slug: "errors".into(),
        header: strings(&[
            "Algorithm", "FP", "FN", "NPV", "FDR", "MAE", "MSE", "RMSE", "LL",
        ]),
        rows,
    }
}

fn sweep_section(sweep: &SweepTable) -> ReportSection {
    let mut header = vec!["Train/Test Size".to_string()];
    header.extend(sweep.models.iter().map(|m| m.display().to_string()));
    let rows = sweep
        .fractions
        .iter()
        .zip(&sweep.cells)
        .map(|(&fraction, cells)| {
            let mut row = vec![SweepTable::row_label(fraction)];
            row.extend(cells.iter().map(|&percent| fmt2(percent)));
            row
        })
        .collect();
    ReportSection {
        slug: "sweep".into(),
        header,
        rows,
    }
}

fn neural_section(results: &[ExperimentResult]) -> ReportSection {
    let rows = results
        .iter()
        .filter(|r| r.config.model.is_neural())
        .map(|result| {
            vec![
                result.config.model.display().to_string(),
                fmt2(result.train_accuracy),
                result.train_loss.map(fmt2).unwrap_or_default(),
                fmt2(result.accuracy),
                result.test_loss.map(fmt2).unwrap_or_default(),
            ]
        })
        .collect();
    ReportSection {
        slug: "neural".into(),
        header: strings(&[
            "Models",
            "Train Accuracy",
            "Train Loss",
            "Test Accuracy",
            "Test Loss",
        ]),
        rows,
    }
}

/// Builds the report tables in their fixed order: per-class, averages,
/// errors, then the sweep when present, then the sequence-model table when
/// any result is neural.
pub fn build_sections(
    results: &[ExperimentResult],
    sweep: Option<&SweepTable>,
) -> Vec<ReportSection> {
    let mut sections = Vec::new();
    if !results.is_empty() {
        sections.push(per_class_section(results));
        sections.push(averages_section(results));
        sections.push(errors_section(results));
    }
    if let Some(table) = sweep {
        sections.push(sweep_section(table));
    }
    if results.iter().any(|r| r.config.model.is_neural()) {
        sections.push(neural_section(results));
    }
    sections
}

/// Serializes sections as CSV. Each section opens with a one-field marker
/// record `# slug` followed by its header and rows.
pub fn sections_to_csv(sections: &[ReportSection]) -> String {
    let mut writer = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    for section in sections {
        writer
            .write_record([format!("# {}", section.slug)])
            .expect("write to Vec");
        writer.write_record(&section.header).expect("write to Vec");
        for row in &section.rows {
            writer.write_record(row).expect("write to Vec");
        }
    }
    let bytes = writer.into_inner().expect("flush to Vec");
    String::from_utf8(bytes).expect("csv output is UTF-8")
}

/// Serializes sections as markdown pipe tables under `##` headings.
pub fn sections_to_markdown(sections: &[ReportSection]) -> String {
    let mut out = String::from("# Classification Report\n");
    for section in sections {
        out.push('\n');
        out.push_str(&format!("## {}\n\n", title_of(&section.slug)));
        let fmt_row = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
        out.push_str(&fmt_row(&section.header));
        let rule: Vec<String> = section.header.iter().map(|_| "---".to_string()).collect();
        out.push_str(&fmt_row(&rule));
        for row in &section.rows {
            out.push_str(&fmt_row(row));
        }
    }
    out
}

/// Renders results (and optionally a sweep table) in the chosen format.
pub fn render_report(
    results: &[ExperimentResult],
    sweep: Option<&SweepTable>,
    format: ReportFormat,
) -> String {
    let sections = build_sections(results, sweep);
    match format {
        ReportFormat::Csv => sections_to_csv(&sections),
        ReportFormat::Markdown => sections_to_markdown(&sections),
    }
}

/// Parses CSV written by [`sections_to_csv`]; every cell survives verbatim,
/// so render → parse → render is the identity.
pub fn parse_report(text: &str) -> Result<Vec<ReportSection>, HarnessError> {
    let fail = |message: String| HarnessError::ReportParse(message);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut sections: Vec<ReportSection> = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fail(format!("record {}: {e}", index + 1)))?;
        let cells: Vec<String> = record.iter().map(str::to_string).collect();
        if cells.len() == 1 {
            if let Some(slug) = cells[0].strip_prefix("# ") {
                sections.push(ReportSection {
                    slug: slug.to_string(),
                    header: Vec::new(),
                    rows: Vec::new(),
                });
                continue;
            }
        }
        let section = sections.last_mut().ok_or_else(|| {
            fail(format!("record {} appears before any section marker", index + 1))
        })?;
        if section.header.is_empty() {
            section.header = cells;
        } else {
            section.rows.push(cells);
        }
    }
    if sections.is_empty() {
        return Err(fail("no section markers found".into()));
    }
    if let Some(section) = sections.iter().find(|s| s.header.is_empty()) {
        return Err(fail(format!("section `{}` has no header row", section.slug)));
    }
    Ok(sections)
}

/// CSV for a ranked word-frequency list: `token,count` with a header.
pub fn word_frequencies_csv(frequencies: &[(String, u64)]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["token", "count"]).expect("write to Vec");
    for (token, count) in frequencies {
        writer
            .write_record([token.as_str(), &count.to_string()])
            .expect("write to Vec");
    }
    let bytes = writer.into_inner().expect("flush to Vec");
    String::from_utf8(bytes).expect("csv output is UTF-8")
}
