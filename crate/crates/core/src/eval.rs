//! Confusion matrices, per-class precision/recall/F1, averages, and
//! model-comparison tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::categories::CategorySet;
use crate::error::{DataError, DataResult};

/// `counts[i][j]` = documents of true class `i` predicted as `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

pub fn confusion(truth: &[usize], predicted: &[usize], n_classes: usize) -> DataResult<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(DataError::Invalid(format!("{} true labels but {} predictions", truth.len(), predicted.len())));
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        if t >= n_classes || p >= n_classes {
            return Err(DataError::Invalid(format!("label pair ({t}, {p}) out of range for {n_classes} classes")));
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    pub fn col_sum(&self, class: usize) -> u64 {
        self.counts.iter().map(|row| row[class]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// True when at least one metric hit a 0/0 and was reported as 0.
    pub undefined: bool,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

pub fn per_class_metrics(m: &ConfusionMatrix) -> Vec<ClassMetrics> {
    (0..m.n_classes())
        .map(|c| {
            let tp = m.counts[c][c];
            let (precision, p_undef) = ratio(tp, m.col_sum(c));
            let (recall, r_undef) = ratio(tp, m.row_sum(c));
            let (f1, f_undef) = if precision + recall == 0.0 {
                (0.0, true)
            } else {
                (2.0 * precision * recall / (precision + recall), false)
            };
            ClassMetrics { precision, recall, f1, support: m.row_sum(c), undefined: p_undef || r_undef || f_undef }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub accuracy: f64,
    pub macro_avg: Averages,
    pub weighted_avg: Averages,
}

/// Accuracy, unweighted means, and support-weighted means.
pub fn aggregate(per_class: &[ClassMetrics], matrix: &ConfusionMatrix) -> DataResult<Summary> {
    let total = matrix.total();
    if total == 0 || per_class.is_empty() {
        return Err(DataError::Empty("nothing was evaluated".into()));
    }
    let k = per_class.len() as f64;
    let support: u64 = per_class.iter().map(|m| m.support).sum();
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / k;
    let weighted =
        |f: fn(&ClassMetrics) -> f64| per_class.iter().map(|m| f(m) * m.support as f64).sum::<f64>() / support as f64;
    Ok(Summary {
        accuracy: matrix.trace() as f64 / total as f64,
        macro_avg: Averages { precision: mean(|m| m.precision), recall: mean(|m| m.recall), f1: mean(|m| m.f1) },
        weighted_avg: Averages {
            precision: weighted(|m| m.precision),
            recall: weighted(|m| m.recall),
            f1: weighted(|m| m.f1),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub categories: CategorySet,
    pub confusion: ConfusionMatrix,
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub macro_avg: Averages,
    pub weighted_avg: Averages,
}

impl EvalReport {
    pub fn new(
        model: impl Into<String>,
        categories: &CategorySet,
        truth: &[usize],
        predicted: &[usize],
    ) -> DataResult<Self> {
        let matrix = confusion(truth, predicted, categories.len())?;
        let per_class = per_class_metrics(&matrix);
        let summary = aggregate(&per_class, &matrix)?;
        Ok(EvalReport {
            model: model.into(),
            categories: categories.clone(),
            confusion: matrix,
            per_class,
            accuracy: summary.accuracy,
            macro_avg: summary.macro_avg,
            weighted_avg: summary.weighted_avg,
        })
    }

    pub fn support(&self) -> u64 {
        self.confusion.total()
    }

    /// Per-class table with an `Avg/Total` row of weighted averages.
    /// Values that came from a 0/0 are marked with `*`.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Model: {}", self.model);
        let _ =
            writeln!(out, "{:<16} {:>10} {:>10} {:>10} {:>10}", "Class", "Precision", "Recall", "F1-score", "Support");
        let mut any_undefined = false;
        for (c, (name, m)) in self.categories.names().iter().zip(&self.per_class).enumerate() {
            let flags = [self.confusion.col_sum(c) == 0, self.confusion.row_sum(c) == 0, m.precision + m.recall == 0.0];
            let [mp, mr, mf] = flags.map(|f| if f { "*" } else { " " });
            any_undefined |= m.undefined;
            let _ = writeln!(
                out,
                "{:<16} {:>9.2}{mp} {:>9.2}{mr} {:>9.2}{mf} {:>10}",
                name, m.precision, m.recall, m.f1, m.support
            );
        }
        let w = &self.weighted_avg;
        let _ = writeln!(
            out,
            "{:<16} {:>9.2}  {:>9.2}  {:>9.2}  {:>10}",
            "Avg/Total",
            w.precision,
            w.recall,
            w.f1,
            self.support()
        );
        let _ = writeln!(out, "Accuracy: {:.4}", self.accuracy);
        if any_undefined {
            let _ = writeln!(out, "* 0/0 reported as 0");
        }
        out
    }

    /// Full-precision CSV, one row per class plus macro and weighted rows.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("model,class,precision,recall,f1,support,undefined\n");
        for (name, m) in self.categories.names().iter().zip(&self.per_class) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(&self.model),
                csv_field(name),
                m.precision,
                m.recall,
                m.f1,
                m.support,
                m.undefined
            );
        }
        for (label, a) in [("macro avg", &self.macro_avg), ("weighted avg", &self.weighted_avg)] {
            let _ = writeln!(
                out,
                "{},{label},{},{},{},{},false",
                csv_field(&self.model),
                a.precision,
                a.recall,
                a.f1,
                self.support()
            );
        }
        // accuracy sits in the precision column
        let _ = writeln!(out, "{},accuracy,{},,,{},false", csv_field(&self.model), self.accuracy, self.support());
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" | "txt" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}` (expected text, csv or json)")),
        }
    }
}

impl EvalReport {
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Text => self.render_text(),
            ReportFormat::Csv => self.render_csv(),
            ReportFormat::Json => self.render_json(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub accuracy: f64,
}

/// Models ordered by accuracy, descending; ties by name ascending.
pub fn compare_models(reports: &[(String, EvalReport)]) -> DataResult<Vec<ComparisonRow>> {
    if reports.is_empty() {
        return Err(DataError::Empty("no reports to compare".into()));
    }
    let mut rows: Vec<ComparisonRow> =
        reports.iter().map(|(name, r)| ComparisonRow { model: name.clone(), accuracy: r.accuracy }).collect();
    rows.sort_by(|a, b| b.accuracy.total_cmp(&a.accuracy).then_with(|| a.model.cmp(&b.model)));
    Ok(rows)
}

pub fn render_comparison(rows: &[ComparisonRow], format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Text => {
            let _ = writeln!(out, "{:<24} {:>10}", "Model", "Accuracy");
            for r in rows {
                let _ = writeln!(out, "{:<24} {:>10.4}", r.model, r.accuracy);
            }
        }
        ReportFormat::Csv => {
            out.push_str("model,accuracy\n");
            for r in rows {
                let _ = writeln!(out, "{},{}", csv_field(&r.model), r.accuracy);
            }
        }
        ReportFormat::Json => {
            out = serde_json::to_string_pretty(rows).expect("rows serialize");
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two() -> CategorySet {
        CategorySet::new(["A", "B"]).unwrap()
    }

    #[test]
    fn confusion_examples() {
        let m = confusion(&[0, 1, 2], &[0, 1, 2], 3).unwrap();
        assert_eq!(m.counts, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        let m = confusion(&[0, 0, 1, 1], &[0, 1, 1, 1], 2).unwrap();
        assert_eq!(m.counts, [[1, 1], [0, 2]]);
        assert!(confusion(&[0], &[0, 1], 2).is_err());
        assert!(confusion(&[0], &[2], 2).is_err());
    }

    #[test]
    fn metric_examples() {
        let m = ConfusionMatrix { counts: vec![vec![2, 1], vec![1, 2]] };
        let pc = per_class_metrics(&m);
        assert_relative_eq!(pc[0].precision, 2.0 / 3.0);
        assert_relative_eq!(pc[0].recall, 2.0 / 3.0);
        assert_relative_eq!(pc[0].f1, 2.0 / 3.0, epsilon = 1e-15);

        let diag = confusion(&[0, 1, 1], &[0, 1, 1], 3).unwrap();
        let pc = per_class_metrics(&diag);
        assert_eq!((pc[0].precision, pc[0].recall, pc[0].f1), (1.0, 1.0, 1.0));
        assert_eq!((pc[2].precision, pc[2].recall, pc[2].f1, pc[2].support), (0.0, 0.0, 0.0, 0));
        assert!(pc[2].undefined && !pc[1].undefined);
    }

    #[test]
    fn aggregate_examples() {
        let r = EvalReport::new("m", &two(), &[0, 1, 1], &[0, 1, 1]).unwrap();
        assert_eq!((r.accuracy, r.macro_avg.f1, r.weighted_avg.f1), (1.0, 1.0, 1.0));

        let pc = [
            ClassMetrics { precision: 1.0, recall: 1.0, f1: 1.0, support: 3, undefined: false },
            ClassMetrics { precision: 0.0, recall: 0.0, f1: 0.0, support: 1, undefined: false },
        ];
        let m = ConfusionMatrix { counts: vec![vec![3, 0], vec![1, 0]] };
        let s = aggregate(&pc, &m).unwrap();
        assert_eq!(s.weighted_avg.precision, 0.75);
        assert_eq!(s.macro_avg.precision, 0.5);
        let empty = ConfusionMatrix { counts: vec![vec![0, 0], vec![0, 0]] };
        assert!(aggregate(&per_class_metrics(&empty), &empty).is_err());
    }

    #[test]
    fn reference_report_weighted_averages() {
        // per-class rows and supports of a reference logistic-regression report
        let rows = [
            (0.59, 0.38, 0.46, 63),
            (0.71, 0.71, 0.72, 100),
            (0.77, 0.74, 0.76, 105),
            (0.66, 0.61, 0.63, 76),
            (0.79, 0.89, 0.84, 125),
            (0.70, 0.79, 0.74, 160),
            (0.65, 0.61, 0.63, 69),
            (0.71, 0.71, 0.71, 76),
        ];
        let pc: Vec<ClassMetrics> = rows
            .iter()
            .map(|&(precision, recall, f1, support)| ClassMetrics { precision, recall, f1, support, undefined: false })
            .collect();
        let counts = (0..8).map(|i| (0..8).map(|j| if i == j { rows[i].3 } else { 0 }).collect()).collect();
        let s = aggregate(&pc, &ConfusionMatrix { counts }).unwrap();
        assert_eq!(pc.iter().map(|m| m.support).sum::<u64>(), 774);
        for v in [s.weighted_avg.precision, s.weighted_avg.recall, s.weighted_avg.f1] {
            assert!((v - 0.71).abs() < 0.005, "{v}");
        }
    }

    fn report_with_accuracy(acc_hits: usize, n: usize) -> EvalReport {
        let truth = vec![0; n];
        let pred: Vec<usize> = (0..n).map(|i| if i < acc_hits { 0 } else { 1 }).collect();
        EvalReport::new("x", &two(), &truth, &pred).unwrap()
    }

    #[test]
    fn comparison_ordering() {
        let reports = vec![
            ("Naive Bayes".to_string(), report_with_accuracy(6136, 10000)),
            ("BOW with Keras".to_string(), report_with_accuracy(5374, 10000)),
            ("Logistic Regression".to_string(), report_with_accuracy(7144, 10000)),
            ("Linear SVM".to_string(), report_with_accuracy(7093, 10000)),
        ];
        let rows = compare_models(&reports).unwrap();
        let names: Vec<&str> = rows.iter().map(|r| r.model.as_str()).collect();
        assert_eq!(names, ["Logistic Regression", "Linear SVM", "Naive Bayes", "BOW with Keras"]);
        assert_eq!(compare_models(&reports[..1]).unwrap().len(), 1);
        let tied = vec![("b".to_string(), report_with_accuracy(1, 2)), ("a".to_string(), report_with_accuracy(1, 2))];
        let rows = compare_models(&tied).unwrap();
        assert_eq!(rows[0].model, "a");
        assert!(compare_models(&[]).is_err());
    }

    #[test]
    fn text_report_shape() {
        let r = EvalReport::new("logreg", &two(), &[0, 0, 1], &[0, 0, 0]).unwrap();
        let text = r.render_text();
        assert!(text.contains("Precision") && text.contains("Support"));
        assert!(text.contains("Avg/Total"));
        assert!(text.contains("* 0/0"));
        let csv = r.render_csv();
        assert_eq!(csv.lines().count(), 1 + 2 + 2 + 1);
        let acc_line = csv.lines().last().unwrap();
        assert!(acc_line.starts_with("logreg,accuracy,0.6666666666666666,"), "{acc_line}");
        let back: EvalReport = serde_json::from_str(&r.render_json()).unwrap();
        assert_eq!(back, r);
    }
}
