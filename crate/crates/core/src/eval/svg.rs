use std::fmt::Write;

use super::ConfusionMatrix;
use crate::labeling::{SilverLabel, NUM_CLASSES};

const CELL: usize = 60;
const MARGIN: usize = 70;

/// A grid heatmap of a confusion matrix, rows gold and columns predicted,
/// each cell shaded by its share of the row and annotated with its count.
pub fn confusion_svg(matrix: &ConfusionMatrix, title: &str) -> String {
    let size = MARGIN + NUM_CLASSES * CELL + 10;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{}" font-family="sans-serif" font-size="12">"#,
        size + 20
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="16" text-anchor="middle" font-size="14">{}</text>"#,
        size / 2,
        escape(title)
    );
    let top = MARGIN;
    for c in 0..NUM_CLASSES {
        let label = SilverLabel::from_index(c);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{label}</text>"#,
            MARGIN + c * CELL + CELL / 2,
            top - 6
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{label}</text>"#,
            MARGIN - 8,
            top + c * CELL + CELL / 2 + 4
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="34" text-anchor="middle">predicted</text>"#,
        MARGIN + NUM_CLASSES * CELL / 2
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{0}" text-anchor="middle" transform="rotate(-90 14 {0})">gold</text>"#,
        top + NUM_CLASSES * CELL / 2
    );
    for (g, row) in matrix.iter().enumerate() {
        let total: u64 = row.iter().sum();
        for (p, &n) in row.iter().enumerate() {
            let share = if total == 0 { 0.0 } else { n as f64 / total as f64 };
            let shade = (255.0 - 200.0 * share).round() as u8;
            let x = MARGIN + p * CELL;
            let y = top + g * CELL;
            let _ = writeln!(
                s,
                r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="rgb({shade},{shade},255)" stroke="#444"/>"##
            );
            let ink = if share > 0.6 { "#fff" } else { "#000" };
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" fill="{ink}">{n}</text>"#,
                x + CELL / 2,
                y + CELL / 2 + 4
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
