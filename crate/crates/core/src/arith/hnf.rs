//! Hermite normal forms of small integer matrices.
//!
//! Matrices are `Vec<Vec<i128>>` in row-major order. Entries stay small for
//! the systems built here (two constraint rows, at most a few dozen columns),
//! so `i128` with overflow checks is enough.

pub type IntMatrix = Vec<Vec<i128>>;

/// Extended gcd: `(g, x, y)` with `x a + y b = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Result of [`column_hnf`]: `m * u = h`, `h` in column echelon form.
#[derive(Clone, Debug)]
pub struct ColumnHnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// `(row, column)` of each pivot; pivot columns are `0..rank`.
    pub pivots: Vec<(usize, usize)>,
}

impl ColumnHnf {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Columns of `u` spanning the integer kernel of `m`.
    pub fn kernel(&self) -> Vec<Vec<i128>> {
        let k = self.u.len();
        (self.rank()..k).map(|c| (0..k).map(|r| self.u[r][c]).collect()).collect()
    }

    /// An integer `x` with `m x = rhs`, if one exists.
    pub fn solve(&self, rhs: &[i128]) -> Option<Vec<i128>> {
        let k = self.u.len();
        let mut z = vec![0i128; k];
        let mut rest: Vec<i128> = rhs.to_vec();
        let mut p = 0;
        for i in 0..rest.len() {
            if p < self.pivots.len() && self.pivots[p].0 == i {
                let piv = self.h[i][p];
                if rest[i] % piv != 0 {
                    return None;
                }
                z[p] = rest[i] / piv;
                for (row, v) in rest.iter_mut().enumerate().skip(i) {
                    *v -= self.h[row][p] * z[p];
                }
                p += 1;
            } else if rest[i] != 0 {
                return None;
            }
        }
        Some((0..k).map(|r| (0..k).map(|c| self.u[r][c] * z[c]).sum()).collect())
    }
}

fn col_combine(m: &mut IntMatrix, i: usize, j: usize, coef: [i128; 4]) {
    // (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
    let [a, b, c, d] = coef;
    for row in m.iter_mut() {
        let (x, y) = (row[i], row[j]);
        row[i] = a.checked_mul(x).and_then(|v| v.checked_add(b * y)).expect("hnf overflow");
        row[j] = c.checked_mul(x).and_then(|v| v.checked_add(d * y)).expect("hnf overflow");
    }
}

/// Column Hermite normal form with the unimodular transform.
pub fn column_hnf(m: &IntMatrix) -> ColumnHnf {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut h = m.clone();
    let mut u: IntMatrix = (0..cols).map(|i| (0..cols).map(|j| (i == j) as i128).collect()).collect();
    let mut pivots = Vec::new();
    let mut pc = 0;
    for i in 0..rows {
        if pc == cols {
            break;
        }
        for j in pc + 1..cols {
            if h[i][j] == 0 {
                continue;
            }
            let (a, b) = (h[i][pc], h[i][j]);
            let (g, x, y) = ext_gcd(a, b);
            let coef = [x, y, -b / g, a / g];
            col_combine(&mut h, pc, j, coef);
            col_combine(&mut u, pc, j, coef);
        }
        if h[i][pc] == 0 {
            continue;
        }
        if h[i][pc] < 0 {
            col_combine(&mut h, pc, pc, [-1, 0, -1, 0]);
            col_combine(&mut u, pc, pc, [-1, 0, -1, 0]);
        }
        let piv = h[i][pc];
        for c in 0..pc {
            let f = h[i][c].div_euclid(piv);
            if f != 0 {
                col_combine(&mut h, c, pc, [1, -f, 0, 1]);
                col_combine(&mut u, c, pc, [1, -f, 0, 1]);
            }
        }
        pivots.push((i, pc));
        pc += 1;
    }
    ColumnHnf { h, u, pivots }
}

/// Canonical row basis (upper echelon, positive pivots, entries above each
/// pivot reduced into `[0, pivot)`) of the lattice spanned by `rows`.
pub fn row_hnf(rows: &[Vec<i128>], dim: usize) -> (IntMatrix, Vec<usize>) {
    if rows.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let transposed: IntMatrix = (0..dim).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
    let res = column_hnf(&transposed);
    let basis = (0..res.rank()).map(|c| (0..dim).map(|r| res.h[r][c]).collect()).collect();
    let pivot_cols = res.pivots.iter().map(|&(r, _)| r).collect();
    (basis, pivot_cols)
}
