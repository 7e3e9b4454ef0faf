//! Builds an ROC curve for one channel and picks its Youden threshold.

use mgtdetect::calibration::{auc, build_roc, youden_threshold};
use mgtdetect::records::{Label, Orientation};

fn main() -> mgtdetect::Result<()> {
    // entropy-like scores: machine text sits lower
    let scores = [1.1, 1.4, 1.9, 2.2, 2.0, 2.8, 3.1, 3.5];
    let labels = [1, 1, 1, 0, 1, 0, 0, 0].map(|b| Label::from_bool(b == 1));

    let curve = build_roc(&scores, &labels, Orientation::LowerIsMachine)?;
    println!("{:>6} {:>6} {:>10}", "FPR", "TPR", "threshold");
    for p in &curve.points {
        println!("{:>6.3} {:>6.3} {:>10}", p.fpr, p.tpr, p.threshold);
    }
    let (threshold, j) = youden_threshold(&curve);
    println!("AUC = {:.4}", auc(&curve));
    println!("threshold = {threshold} (J = {j:.3}); machine iff score <= threshold");
    Ok(())
}
