//! Projections, Steiner and Schwarz symmetrizations, and truncation of
//! infinite values.
//!
//! The hyperplane `H` is always a coordinate hyperplane `{x_axis = 0}`.
//! Symmetrizations centre runs of nodes on the node nearest to `x_axis = 0`
//! (ties toward the negative side); a run of `c` nodes starts `c / 2` nodes
//! below that centre. When a centred run does not fit, the output grid is
//! extended along the axis just far enough to hold it.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFn, GridSet};

/// `proj_H(f)(h) = sup_α f(h + α e_axis)`, on the grid of `H`.
pub fn project(f: &GridFn, axis: usize) -> Result<GridFn> {
    let g = f.grid();
    g.check_axis(axis)?;
    let values = (0..g.num_lines(axis))
        .map(|h| g.line(axis, h).indices().map(|k| f.values()[k]).fold(0.0, f64::max))
        .collect();
    GridFn::new(g.remove_axis(axis), values)
}

/// The orthogonal shadow of `a` on `H`.
pub fn project_set(a: &GridSet, axis: usize) -> Result<GridSet> {
    let g = a.grid();
    g.check_axis(axis)?;
    let mask = (0..g.num_lines(axis))
        .map(|h| g.line(axis, h).indices().any(|k| a.contains(k)))
        .collect();
    GridSet::new(g.remove_axis(axis), mask)
}

/// Offset from the centre node of the `k`-th largest value: 0, -1, +1, -2, ...
fn centred_offset(k: usize) -> i64 {
    if k % 2 == 1 {
        -(k as i64 + 1) / 2
    } else {
        k as i64 / 2
    }
}

/// Axis range `(start, count)` of the input grid extended so that centred
/// runs of up to `max_count` nodes fit.
fn extended_range(g: &Grid, axis: usize, max_count: usize) -> (i64, usize) {
    let n = g.count(axis) as i64;
    if max_count == 0 {
        return (0, n as usize);
    }
    let z0 = g.zero_index(axis);
    let c = max_count as i64;
    let start = (z0 - c / 2).min(0);
    let end = (z0 - c / 2 + c - 1).max(n - 1);
    (start, (end - start + 1) as usize)
}

/// Symmetric decreasing rearrangement of every line parallel to `axis`.
///
/// Positive samples of a line are sorted in decreasing order and laid out
/// around the centre node: the largest at the centre, then alternately one
/// node below and one above. Every superlevel set of a line becomes a
/// centred run with the same number of nodes.
pub fn steiner_fn(f: &GridFn, axis: usize) -> Result<GridFn> {
    let g = f.grid();
    g.check_axis(axis)?;
    let lines: Vec<Vec<f64>> = (0..g.num_lines(axis))
        .map(|h| {
            let mut v: Vec<f64> = f.line_values(axis, h).into_iter().filter(|v| *v > 0.0).collect();
            v.sort_by(|a, b| b.total_cmp(a));
            v
        })
        .collect();
    let max_count = lines.iter().map(Vec::len).max().unwrap_or(0);
    let (start, count) = extended_range(g, axis, max_count);
    let out_grid = g.with_axis_range(axis, start, count);
    let centre = out_grid.zero_index(axis);
    let mut values = vec![0.0; out_grid.len()];
    for (h, line) in lines.iter().enumerate() {
        let l = out_grid.line(axis, h);
        for (k, &v) in line.iter().enumerate() {
            let j = centre + centred_offset(k);
            values[l.index(j as usize)] = v;
        }
    }
    GridFn::new(out_grid, values)
}

/// Steiner symmetral of a set: each line keeps its node count, centred.
pub fn steiner_set(a: &GridSet, axis: usize) -> Result<GridSet> {
    Ok(steiner_fn(&a.indicator(), axis)?.support())
}

/// Restriction of `f` to the hyperplane through the centre node of `axis`,
/// or zero if that node lies outside the grid.
pub fn central_section(f: &GridFn, axis: usize) -> Result<GridFn> {
    let g = f.grid();
    g.check_axis(axis)?;
    let z0 = g.zero_index(axis);
    if z0 < 0 || z0 >= g.count(axis) as i64 {
        return Ok(GridFn::zeros(g.remove_axis(axis)));
    }
    Ok(f.slice_at(axis, z0 as usize))
}

/// Number of nodes of the centred unit-length interval on an axis with step `h`.
pub fn unit_ball_count(h: f64) -> usize {
    ((1.0 / h).round() as usize).max(1)
}

/// Schwarz-type symmetrization: the slice `x_axis = α` is replaced by its
/// integral `d_α`, spread over the centred unit-volume ball of `H`.
///
/// For `n = 2` the ball is the centred run of `round(1/h)` nodes on the
/// other axis. For `n = 1` the ball is the single point of `H`, so `f` is
/// returned unchanged.
pub fn schwarz_fn(f: &GridFn, axis: usize) -> Result<GridFn> {
    let g = f.grid();
    g.check_axis(axis)?;
    if f.has_infinite() {
        return Err(Error::InfiniteIntegral);
    }
    if g.dims() == 1 {
        return Ok(f.clone());
    }
    let other = 1 - axis;
    let d = f.slice_integrals(axis)?;
    let c = unit_ball_count(g.step(other)) as i64;
    let n_other = g.count(other) as i64;
    let z0 = g.zero_index(other);
    let ball_start = z0 - c / 2;
    let start = ball_start.min(0);
    let end = (ball_start + c - 1).max(n_other - 1);
    let out_grid = g.with_axis_range(other, start, (end - start + 1) as usize);
    let mut values = vec![0.0; out_grid.len()];
    let line_of = |j_axis: usize| out_grid.line(other, j_axis);
    for (j, dj) in d.iter().enumerate() {
        let l = line_of(j);
        for b in 0..c {
            values[l.index((ball_start - start + b) as usize)] = dj.get();
        }
    }
    GridFn::new(out_grid, values)
}

/// `f̄`: every infinite sample replaced by 0.
pub fn truncate_infinite(f: &GridFn) -> GridFn {
    f.map(|v| if v.is_infinite() { 0.0 } else { v })
        .expect("finite non-negative samples")
}
