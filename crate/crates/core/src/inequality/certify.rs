//! Grid certification with explicit Lipschitz margins.
//!
//! A cell is certified when the smallest margin at its nodes exceeds the
//! Lipschitz bound times the cell size, which forces the margin to stay
//! positive over the whole cell.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginRow {
    pub x: f64,
    /// Second coordinate for two-dimensional sweeps.
    pub y: Option<f64>,
    pub margin: f64,
    pub lipschitz: f64,
}

/// Raw outcome of one sweep before it is wrapped into a report.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Sweep {
    pub cells: usize,
    pub worst_margin: f64,
    pub worst_at: Vec<f64>,
    pub max_lipschitz: f64,
    pub finest_step: f64,
    /// First node with a non-positive margin.
    pub violated: Option<Vec<f64>>,
    /// First cell that could not be certified at the finest step.
    pub uncertified: Option<Vec<f64>>,
    pub table: Vec<MarginRow>,
}

const TABLE_ROWS: usize = 2000;

/// Uniform sweep of `[x0, x1]`; `lip(a, b)` bounds `|g'|` on `[a, b]`.
pub(crate) fn sweep_1d(
    x0: f64,
    x1: f64,
    step: f64,
    g: impl Fn(f64) -> f64,
    lip: impl Fn(f64, f64) -> f64,
) -> Sweep {
    let n = ((x1 - x0) / step).ceil().max(1.0) as usize;
    let h = (x1 - x0) / n as f64;
    let node = |i: usize| if i == n { x1 } else { x0 + h * i as f64 };
    let every = (n / TABLE_ROWS).max(1);
    let mut s = Sweep {
        cells: n,
        worst_margin: f64::INFINITY,
        worst_at: vec![x0],
        max_lipschitz: 0.0,
        finest_step: h,
        violated: None,
        uncertified: None,
        table: Vec::new(),
    };
    let mut left = g(x0);
    for i in 0..n {
        let (a, b) = (node(i), node(i + 1));
        let right = g(b);
        let l = lip(a, b);
        s.max_lipschitz = s.max_lipschitz.max(l);
        for (x, m) in [(a, left), (b, right)] {
            if m < s.worst_margin {
                s.worst_margin = m;
                s.worst_at = vec![x];
            }
            if !(m > 0.0) && s.violated.is_none() {
                s.violated = Some(vec![x]);
            }
        }
        if !(left.min(right) > l * h) && s.uncertified.is_none() {
            s.uncertified = Some(vec![a, b]);
        }
        if i % every == 0 {
            s.table.push(MarginRow {
                x: a,
                y: None,
                margin: left,
                lipschitz: l,
            });
        }
        left = right;
    }
    s
}

/// Adaptive sweep over the lattice `u = u0 + i h`, `v = v0 + j h` restricted
/// to cells meeting `{j ≥ i, i + j ≤ n}`. Root cells of `2^levels` steps are
/// split until certified or down to one step. `g(i, j)` is the margin at a
/// node and `lip(i0, j0, size)` returns bounds for `|∂u g|` and `|∂v g|`.
pub(crate) fn sweep_triangle(
    n: usize,
    h: f64,
    levels: u32,
    g: impl Fn(usize, usize) -> f64,
    lip: impl Fn(usize, usize, usize) -> (f64, f64),
    coords: impl Fn(usize, usize) -> (f64, f64),
) -> Sweep {
    let root = 1usize << levels;
    let mut s = Sweep {
        cells: 0,
        worst_margin: f64::INFINITY,
        worst_at: Vec::new(),
        max_lipschitz: 0.0,
        finest_step: h,
        violated: None,
        uncertified: None,
        table: Vec::new(),
    };
    let meets = |i: usize, j: usize, size: usize| j + size >= i && i + j <= n;
    let mut stack = Vec::new();
    let mut i = 0;
    while i <= n / 2 {
        let mut j = i;
        while i + j <= n {
            if meets(i, j, root) {
                stack.push((i, j, root));
            }
            j += root;
        }
        i += root;
    }
    let mut table_stride = 0usize;
    while let Some((i, j, size)) = stack.pop() {
        s.cells += 1;
        let corners = [(i, j), (i + size, j), (i, j + size), (i + size, j + size)];
        let mut worst = f64::INFINITY;
        for &(a, b) in &corners {
            let m = g(a, b);
            if m < worst {
                worst = m;
            }
            if m < s.worst_margin {
                s.worst_margin = m;
                let (x, y) = coords(a, b);
                s.worst_at = vec![x, y];
            }
            if !(m > 0.0) && s.violated.is_none() {
                let (x, y) = coords(a, b);
                s.violated = Some(vec![x, y]);
            }
        }
        let (lu, lv) = lip(i, j, size);
        let need = (lu + lv) * h * size as f64;
        if worst > need {
            s.max_lipschitz = s.max_lipschitz.max(lu + lv);
            table_stride += 1;
            if table_stride % 64 == 1 {
                let (x, y) = coords(i, j);
                s.table.push(MarginRow {
                    x,
                    y: Some(y),
                    margin: worst,
                    lipschitz: lu + lv,
                });
            }
            continue;
        }
        if size == 1 {
            if s.uncertified.is_none() {
                let (x, y) = coords(i, j);
                s.uncertified = Some(vec![x, y]);
            }
            continue;
        }
        let half = size / 2;
        for (a, b) in [(i, j), (i + half, j), (i, j + half), (i + half, j + half)] {
            if meets(a, b, half) {
                stack.push((a, b, half));
            }
        }
    }
    s
}
