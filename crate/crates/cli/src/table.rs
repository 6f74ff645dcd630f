use eqv_core::TableOfMarks;

/// Lower-triangular text layout of a table of marks, one row per class.
pub fn render_marks(tom: &TableOfMarks) -> String {
    let labels = tom.lattice().labels();
    let n = labels.len();
    let mut width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(1);
    for row in tom.matrix() {
        for v in row {
            width = width.max(v.to_string().len());
        }
    }
    let mut out = String::new();
    out.push_str(&format!("{:>width$}", ""));
    for l in labels {
        out.push_str(&format!(" {l:>width$}"));
    }
    out.push('\n');
    for i in 0..n {
        out.push_str(&format!("{:>width$}", labels[i]));
        for j in 0..=i {
            out.push_str(&format!(" {:>width$}", tom.get(i, j)));
        }
        out.push('\n');
    }
    out
}

/// Two-column loss table, sampling every `stride` epochs and always the last.
pub fn render_curve(curve: &[f64], stride: usize) -> String {
    let mut out = String::from("epoch          mse\n");
    let stride = stride.max(1);
    for (e, v) in curve.iter().enumerate() {
        if (e + 1) % stride == 0 || e + 1 == curve.len() {
            out.push_str(&format!("{:>5} {:>12.6e}\n", e + 1, v));
        }
    }
    out
}
