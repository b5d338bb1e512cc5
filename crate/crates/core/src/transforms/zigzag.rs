/// JPEG-style zigzag traversal of an `n x n` grid, starting at `(0, 0)`.
///
/// Cells are visited by anti-diagonal `row + col`; odd diagonals run with
/// increasing row, even diagonals with decreasing row.
pub fn zigzag_indices(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n);
    if n == 0 {
        return out;
    }
    for diag in 0..(2 * n - 1) {
        let first = diag.saturating_sub(n - 1);
        let last = diag.min(n - 1);
        if diag % 2 == 1 {
            out.extend((first..=last).map(|r| (r, diag - r)));
        } else {
            out.extend((first..=last).rev().map(|r| (r, diag - r)));
        }
    }
    out
}
