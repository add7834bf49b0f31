//! Plain-text block rendering of a clustered workload matrix.

use cellform::{CellConfiguration, WorkloadMatrix};

/// Renders the matrix in block-diagonal order with `|`/`-` separators at
/// cell boundaries. Zeros print as `.`, values with two decimals.
pub fn render_blocks(matrix: &WorkloadMatrix, config: &CellConfiguration) -> String {
    let (rows, cols) = matrix
        .block_permutation(config)
        .expect("configuration matches matrix");
    let row_cells: Vec<usize> = rows.iter().map(|&i| config.machine_cell()[i]).collect();
    let col_cells: Vec<usize> = cols.iter().map(|&j| config.part_cell()[j]).collect();

    let label_width = matrix
        .machine_labels()
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(2);
    let col_widths: Vec<usize> = cols
        .iter()
        .map(|&j| matrix.part_labels()[j].len().max(4))
        .collect();

    let mut out = String::new();
    // header
    out.push_str(&" ".repeat(label_width));
    for (c, &j) in cols.iter().enumerate() {
        out.push_str(separator(&col_cells, c, " | ", "  "));
        out.push_str(&format!("{:>w$}", matrix.part_labels()[j], w = col_widths[c]));
    }
    out.push('\n');
    for (r, &i) in rows.iter().enumerate() {
        if r > 0 && row_cells[r] != row_cells[r - 1] {
            out.push_str(&"-".repeat(label_width));
            for (c, w) in col_widths.iter().enumerate() {
                out.push_str(separator(&col_cells, c, "-+-", "--"));
                out.push_str(&"-".repeat(*w));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:<w$}", matrix.machine_labels()[i], w = label_width));
        for (c, &j) in cols.iter().enumerate() {
            out.push_str(separator(&col_cells, c, " | ", "  "));
            let v = matrix.value(i, j);
            if v == 0.0 {
                out.push_str(&format!("{:>w$}", ".", w = col_widths[c]));
            } else {
                out.push_str(&format!("{:>w$.2}", v, w = col_widths[c]));
            }
        }
        out.push('\n');
    }
    out
}

fn separator(col_cells: &[usize], c: usize, boundary: &'static str, inner: &'static str) -> &'static str {
    if c == 0 {
        inner
    } else if col_cells[c] != col_cells[c - 1] {
        boundary
    } else {
        inner
    }
}
