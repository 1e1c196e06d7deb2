//! Uniform axis-aligned grids in dimension 0, 1 or 2 and the functions and
//! sets sampled on them.
//!
//! Node `j` on axis `i` sits at `lo_i + j * h_i` with `h_i = (hi_i - lo_i) / N_i`,
//! so `j` runs over `0..N_i` and `hi_i` is exclusive. Functions vanish
//! outside the box. Samples are point values and integrals are left Riemann
//! sums `Σ f(x_j) Π h_i`, evaluated with exactly rounded summation.
//!
//! Zero-dimensional grids hold a single node with unit cell volume; they are
//! what slicing or projecting a one-dimensional function produces.

use crate::error::{Error, Result};
use crate::means::ExtNonNeg;
use crate::sum::ExactSum;

/// Maximum supported dimension.
pub const MAX_DIMS: usize = 2;

/// Relative slack when comparing steps of two grids.
const STEP_RTOL: f64 = 1e-9;
/// Slack, in units of the step, for a coordinate to count as a node.
const NODE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    counts: Vec<usize>,
}

/// A line of nodes parallel to one axis, as a strided run of flat indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Line {
    pub start: usize,
    pub stride: usize,
    pub len: usize,
}

impl Line {
    pub fn index(&self, k: usize) -> usize {
        self.start + k * self.stride
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |k| self.start + k * self.stride)
    }
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let n = lo.len();
        if n > MAX_DIMS || hi.len() != n || counts.len() != n {
            return Err(Error::InvalidGrid(format!(
                "need matching lo/hi/N of length <= {MAX_DIMS}, got {}/{}/{}",
                lo.len(),
                hi.len(),
                counts.len()
            )));
        }
        for i in 0..n {
            if !(lo[i].is_finite() && hi[i].is_finite() && lo[i] < hi[i]) {
                return Err(Error::InvalidGrid(format!(
                    "axis {i}: need finite lo < hi, got [{}, {})",
                    lo[i], hi[i]
                )));
            }
            if counts[i] == 0 {
                return Err(Error::InvalidGrid(format!("axis {i}: zero nodes")));
            }
        }
        Ok(Grid { lo, hi, counts })
    }

    /// Grid with the given lower corner, per-axis step and node counts.
    pub fn from_step(lo: &[f64], steps: &[f64], counts: &[usize]) -> Result<Self> {
        if steps.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidGrid(format!("bad steps {steps:?}")));
        }
        let hi = lo
            .iter()
            .zip(steps)
            .zip(counts)
            .map(|((l, h), c)| l + *c as f64 * h)
            .collect();
        Grid::new(lo.to_vec(), hi, counts.to_vec())
    }

    /// Same box and count on every axis.
    pub fn cube(dims: usize, lo: f64, hi: f64, count: usize) -> Result<Self> {
        Grid::new(vec![lo; dims], vec![hi; dims], vec![count; dims])
    }

    /// The zero-dimensional grid: one node, unit cell volume.
    pub fn point() -> Self {
        Grid {
            lo: vec![],
            hi: vec![],
            counts: vec![],
        }
    }

    pub fn dims(&self) -> usize {
        self.counts.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, axis: usize) -> usize {
        self.counts[axis]
    }

    pub fn step(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.counts[axis] as f64
    }

    pub fn steps(&self) -> Vec<f64> {
        (0..self.dims()).map(|i| self.step(i)).collect()
    }

    pub fn max_step(&self) -> f64 {
        self.steps().into_iter().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.steps().into_iter().product()
    }

    pub fn coord(&self, axis: usize, j: i64) -> f64 {
        self.lo[axis] + j as f64 * self.step(axis)
    }

    pub fn strides(&self) -> Vec<usize> {
        let n = self.dims();
        let mut s = vec![1; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.counts[i + 1];
        }
        s
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let strides = self.strides();
        idx.iter().zip(&strides).map(|(j, s)| j * s).sum()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let strides = self.strides();
        strides
            .iter()
            .map(|s| {
                let j = flat / s;
                flat %= s;
                j
            })
            .collect()
    }

    /// Coordinates of the node with the given flat index.
    pub fn point_of(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(i, &j)| self.coord(i, j as i64))
            .collect()
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dims() {
            return Err(Error::InvalidAxis {
                axis,
                dims: self.dims(),
            });
        }
        Ok(())
    }

    /// Index of the node at `coord`, which must lie on the grid.
    pub fn node_index(&self, axis: usize, coord: f64) -> Result<usize> {
        self.check_axis(axis)?;
        let h = self.step(axis);
        let t = (coord - self.lo[axis]) / h;
        let j = t.round();
        if (t - j).abs().is_nan() || (t - j).abs() > NODE_TOL || j < 0.0 || j >= self.counts[axis] as f64 {
            return Err(Error::OffGrid { axis, coord });
        }
        Ok(j as usize)
    }

    /// Index (possibly outside `0..N`) of the node nearest to the origin,
    /// ties going to the negative side.
    pub fn zero_index(&self, axis: usize) -> i64 {
        let t = -self.lo[axis] / self.step(axis);
        let j = t.round();
        // round() sends x.5 away from zero; break exact ties downward
        if (t - t.floor() - 0.5).abs() < NODE_TOL {
            t.floor() as i64
        } else {
            j as i64
        }
    }

    /// Grid over the remaining axes after dropping `axis`.
    pub fn remove_axis(&self, axis: usize) -> Grid {
        let mut g = self.clone();
        g.lo.remove(axis);
        g.hi.remove(axis);
        g.counts.remove(axis);
        g
    }

    /// Grid whose node `j` on `axis` is node `start + j` of `self`.
    pub fn with_axis_range(&self, axis: usize, start: i64, count: usize) -> Grid {
        let h = self.step(axis);
        let mut g = self.clone();
        if start == 0 && count == self.counts[axis] {
            return g;
        }
        g.lo[axis] = self.lo[axis] + start as f64 * h;
        g.hi[axis] = g.lo[axis] + count as f64 * h;
        g.counts[axis] = count;
        g
    }

    /// Integer node offset of `other`'s origin relative to `self`, when both
    /// grids share steps and their nodes interleave exactly.
    pub fn offset_to(&self, other: &Grid) -> Result<Vec<i64>> {
        if self.dims() != other.dims() {
            return Err(Error::GridMismatch(format!(
                "dimension {} vs {}",
                self.dims(),
                other.dims()
            )));
        }
        (0..self.dims())
            .map(|i| {
                let (h, k) = (self.step(i), other.step(i));
                if ((h - k).abs()) > STEP_RTOL * h.max(k) {
                    return Err(Error::GridMismatch(format!("axis {i}: step {h} vs {k}")));
                }
                let t = (other.lo[i] - self.lo[i]) / h;
                let j = t.round();
                if (t - j).abs() > NODE_TOL {
                    return Err(Error::GridMismatch(format!("axis {i}: origins are not node-aligned")));
                }
                Ok(j as i64)
            })
            .collect()
    }

    /// Smallest grid containing both (node-aligned) grids, together with
    /// the offsets of `self` and `other` inside it.
    pub fn union(&self, other: &Grid) -> Result<(Grid, Vec<i64>, Vec<i64>)> {
        let off = self.offset_to(other)?;
        let n = self.dims();
        let mut start = vec![0i64; n];
        let mut counts = vec![0usize; n];
        for i in 0..n {
            let s = off[i].min(0);
            let e = (self.counts[i] as i64).max(off[i] + other.counts[i] as i64);
            start[i] = s;
            counts[i] = (e - s) as usize;
        }
        let mut g = self.clone();
        for i in 0..n {
            g = g.with_axis_range(i, start[i], counts[i]);
        }
        let off_self = start.iter().map(|s| -s).collect();
        let off_other = (0..n).map(|i| off[i] - start[i]).collect();
        Ok((g, off_self, off_other))
    }

    pub fn num_lines(&self, axis: usize) -> usize {
        self.len() / self.counts[axis]
    }

    /// The `h`-th line parallel to `axis`; lines are numbered by the flat
    /// index of their foot on the grid with `axis` removed.
    pub fn line(&self, axis: usize, h: usize) -> Line {
        let strides = self.strides();
        let mut rem = h;
        let mut start = 0;
        for i in (0..self.dims()).rev() {
            if i == axis {
                continue;
            }
            let j = rem % self.counts[i];
            rem /= self.counts[i];
            start += j * strides[i];
        }
        Line {
            start,
            stride: strides[axis],
            len: self.counts[axis],
        }
    }
}

/// Copies `values` living on `src` into a buffer over `dst`, where `src`
/// sits at integer offset `off` inside `dst`. Missing nodes get `fill`.
pub(crate) fn embed(src: &Grid, values: &[f64], dst: &Grid, off: &[i64], fill: f64) -> Vec<f64> {
    let mut out = vec![fill; dst.len()];
    let ds = dst.strides();
    for (flat, &v) in values.iter().enumerate() {
        let idx = src.multi_index(flat);
        let mut t = 0usize;
        for i in 0..idx.len() {
            t += (idx[i] as i64 + off[i]) as usize * ds[i];
        }
        out[t] = v;
    }
    out
}

/// A non-negative, possibly infinite function sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(&v) = values.iter().find(|v| v.is_nan() || **v < 0.0) {
            return Err(Error::InvalidValue(v));
        }
        Ok(GridFn { grid, values })
    }

    /// Internal constructor for values already known to be valid.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        debug_assert!(values.iter().all(|v| *v >= 0.0));
        GridFn { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        GridFn::from_raw(grid, vec![0.0; n])
    }

    pub fn constant(grid: Grid, c: ExtNonNeg) -> Self {
        let n = grid.len();
        GridFn::from_raw(grid, vec![c.get(); n])
    }

    /// Samples `f` at every node.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: Grid, f: F) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(&grid.point_of(k))).collect();
        GridFn::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> usize {
        self.grid.dims()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, flat: usize) -> ExtNonNeg {
        ExtNonNeg::new(self.values[flat]).expect("samples are valid")
    }

    pub fn at(&self, idx: &[usize]) -> ExtNonNeg {
        self.get(self.grid.flat_index(idx))
    }

    pub fn has_infinite(&self) -> bool {
        self.values.iter().any(|v| v.is_infinite())
    }

    /// Left Riemann sum; `+inf` if any sample is infinite.
    pub fn integrate(&self) -> ExtNonNeg {
        if self.has_infinite() {
            return ExtNonNeg::INFINITY;
        }
        let mut acc = ExactSum::new();
        for &v in &self.values {
            acc.add(v);
        }
        ExtNonNeg::new(acc.total() * self.grid.cell_volume()).expect("finite non-negative sum")
    }

    /// Largest sample; `+inf` dominates.
    pub fn sup_value(&self) -> ExtNonNeg {
        ExtNonNeg::new(self.values.iter().copied().fold(0.0, f64::max)).expect("valid")
    }

    /// Restriction to the hyperplane `x_axis = j` (by node index).
    pub fn slice_at(&self, axis: usize, j: usize) -> GridFn {
        let sub = self.grid.remove_axis(axis);
        let stride = self.grid.strides()[axis];
        let values = (0..sub.len())
            .map(|h| {
                let line = self.grid.line(axis, h);
                debug_assert_eq!(line.stride, stride);
                self.values[line.index(j)]
            })
            .collect();
        GridFn::from_raw(sub, values)
    }

    /// Restriction to the hyperplane `x_axis = alpha`; `alpha` must be a node.
    pub fn slice(&self, axis: usize, alpha: f64) -> Result<GridFn> {
        let j = self.grid.node_index(axis, alpha)?;
        Ok(self.slice_at(axis, j))
    }

    pub fn slice_integral(&self, axis: usize, alpha: f64) -> Result<ExtNonNeg> {
        Ok(self.slice(axis, alpha)?.integrate())
    }

    /// `d_j` for every node `j` along `axis`.
    pub fn slice_integrals(&self, axis: usize) -> Result<Vec<ExtNonNeg>> {
        self.grid.check_axis(axis)?;
        Ok((0..self.grid.count(axis))
            .map(|j| self.slice_at(axis, j).integrate())
            .collect())
    }

    /// Values along the `h`-th line parallel to `axis`.
    pub fn line_values(&self, axis: usize, h: usize) -> Vec<f64> {
        self.grid.line(axis, h).indices().map(|k| self.values[k]).collect()
    }

    /// One-dimensional measure of `{f >= t}` on the `h`-th line parallel to
    /// `axis`. At `t = 0` this is the measure of the support `{f > 0}`.
    pub fn superlevel_measure_1d(&self, axis: usize, h: usize, t: f64) -> Result<f64> {
        self.grid.check_axis(axis)?;
        if h >= self.grid.num_lines(axis) {
            return Err(Error::InvalidGrid(format!("line {h} out of range")));
        }
        let line = self.grid.line(axis, h);
        let count = line
            .indices()
            .filter(|&k| {
                let v = self.values[k];
                if t <= 0.0 {
                    v > 0.0
                } else {
                    v >= t
                }
            })
            .count();
        Ok(count as f64 * self.grid.step(axis))
    }

    /// Integral computed line by line as `∫_0^sup vol_1({f >= t}) dt`, with the
    /// distinct sample values of each line as the levels.
    ///
    /// The level differences and superlevel counts are accumulated exactly,
    /// so the result is bit-identical to [`GridFn::integrate`].
    pub fn layer_cake_integrate(&self, axis: usize) -> Result<ExtNonNeg> {
        self.grid.check_axis(axis)?;
        if self.has_infinite() {
            return Err(Error::InfiniteSample);
        }
        let mut acc = ExactSum::new();
        for h in 0..self.grid.num_lines(axis) {
            let mut levels = self.line_values(axis, h);
            levels.retain(|v| *v > 0.0);
            levels.sort_by(|a, b| b.total_cmp(a));
            // walking levels from the top, `count` is the size of {f >= t}
            let mut count = 0u64;
            let mut k = 0;
            while k < levels.len() {
                let t = levels[k];
                while k < levels.len() && levels[k] == t {
                    count += 1;
                    k += 1;
                }
                let below = if k < levels.len() { levels[k] } else { 0.0 };
                acc.add_difference_scaled(t, below, count);
            }
        }
        let total = acc.total();
        Ok(ExtNonNeg::new(total * self.grid.cell_volume()).expect("finite"))
    }

    /// Piecewise-constant refinement: step `h/m`, each node replicated to the
    /// `m` fine nodes at and above it.
    pub fn refine(&self, m: usize) -> Result<GridFn> {
        if m == 0 {
            return Err(Error::InvalidGrid("refinement factor must be >= 1".into()));
        }
        if m == 1 {
            return Ok(self.clone());
        }
        let g = &self.grid;
        let steps: Vec<f64> = g.steps().iter().map(|h| h / m as f64).collect();
        let counts: Vec<usize> = g.counts().iter().map(|c| c * m).collect();
        let fine = Grid::from_step(g.lo(), &steps, &counts)?;
        let values = (0..fine.len())
            .map(|k| {
                let coarse: Vec<usize> = fine.multi_index(k).iter().map(|j| j / m).collect();
                self.values[g.flat_index(&coarse)]
            })
            .collect();
        Ok(GridFn::from_raw(fine, values))
    }

    /// `c * f` for finite `c >= 0` (`0 * inf` is rejected).
    pub fn scale(&self, c: f64) -> Result<GridFn> {
        let c = ExtNonNeg::new(c)?;
        if c.is_infinite() {
            return Err(Error::InvalidValue(c.get()));
        }
        if c.is_zero() && self.has_infinite() {
            return Err(Error::ZeroTimesInfinity);
        }
        Ok(GridFn::from_raw(
            self.grid.clone(),
            self.values.iter().map(|v| v * c.get()).collect(),
        ))
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<GridFn> {
        GridFn::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn support(&self) -> GridSet {
        GridSet::from_raw(self.grid.clone(), self.values.iter().map(|v| *v > 0.0).collect())
    }

    /// The same function on `target`, which must contain this grid.
    pub fn embed_into(&self, target: &Grid) -> Result<GridFn> {
        let off = target.offset_to(&self.grid)?;
        for (i, &o) in off.iter().enumerate() {
            if o < 0 || o as usize + self.grid.count(i) > target.count(i) {
                return Err(Error::GridMismatch("target grid does not contain source".into()));
            }
        }
        Ok(GridFn::from_raw(
            target.clone(),
            embed(&self.grid, &self.values, target, &off, 0.0),
        ))
    }

    /// Discrete total variation `Σ_axis Σ |f(x + h e_i) - f(x)| · vol / h_i`,
    /// counting the jump to zero at the edge of the box. For an indicator this
    /// is the perimeter of its support.
    pub fn total_variation(&self) -> f64 {
        let g = &self.grid;
        let vol = g.cell_volume();
        let mut tv = 0.0;
        for axis in 0..g.dims() {
            let face = vol / g.step(axis);
            let mut acc = 0.0;
            for h in 0..g.num_lines(axis) {
                let mut prev: f64 = 0.0;
                for k in g.line(axis, h).indices() {
                    let v = self.values[k];
                    if v.is_finite() && prev.is_finite() {
                        acc += (v - prev).abs();
                    }
                    prev = v;
                }
                if prev.is_finite() {
                    acc += prev;
                }
            }
            tv += acc * face;
        }
        tv
    }

    /// Largest jump between neighbouring samples along `axis`, including the
    /// drop to zero at the box edge.
    pub fn max_jump(&self, axis: usize) -> f64 {
        let g = &self.grid;
        if g.dims() == 0 {
            return 0.0;
        }
        let mut best: f64 = 0.0;
        for h in 0..g.num_lines(axis) {
            let mut prev: f64 = 0.0;
            for k in g.line(axis, h).indices() {
                let v = self.values[k];
                if v.is_finite() && prev.is_finite() {
                    best = best.max((v - prev).abs());
                }
                prev = v;
            }
            if prev.is_finite() {
                best = best.max(prev);
            }
        }
        best
    }
}

/// A boolean mask on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSet {
    grid: Grid,
    mask: Vec<bool>,
}

impl GridSet {
    pub fn new(grid: Grid, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} mask entries for {} nodes",
                mask.len(),
                grid.len()
            )));
        }
        Ok(GridSet { grid, mask })
    }

    pub(crate) fn from_raw(grid: Grid, mask: Vec<bool>) -> Self {
        GridSet { grid, mask }
    }

    pub fn from_fn<F: Fn(&[f64]) -> bool>(grid: Grid, f: F) -> Self {
        let mask = (0..grid.len()).map(|k| f(&grid.point_of(k))).collect();
        GridSet { grid, mask }
    }

    pub fn empty(grid: Grid) -> Self {
        let n = grid.len();
        GridSet::from_raw(grid, vec![false; n])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, flat: usize) -> bool {
        self.mask[flat]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn volume(&self) -> f64 {
        self.count() as f64 * self.grid.cell_volume()
    }

    pub fn indicator(&self) -> GridFn {
        GridFn::from_raw(
            self.grid.clone(),
            self.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        )
    }

    /// Nodes of `self` missing from `other`, compared on the union grid.
    pub fn count_not_in(&self, other: &GridSet) -> Result<usize> {
        let (u, a_off, b_off) = self.grid.union(&other.grid)?;
        let a = embed(&self.grid, &self.indicator().values, &u, &a_off, 0.0);
        let b = embed(&other.grid, &other.indicator().values, &u, &b_off, 0.0);
        Ok(a.iter().zip(&b).filter(|(x, y)| **x > 0.0 && **y == 0.0).count())
    }

    pub fn is_subset_of(&self, other: &GridSet) -> Result<bool> {
        Ok(self.count_not_in(other)? == 0)
    }

    /// Same set with its mask trimmed of nothing but re-expressed on `target`.
    pub fn embed_into(&self, target: &Grid) -> Result<GridSet> {
        let f = self.indicator().embed_into(target)?;
        Ok(f.support())
    }
}

/// Samples of two functions on the union of their (node-aligned) grids.
pub fn align_pair(a: &GridFn, b: &GridFn) -> Result<(Grid, Vec<f64>, Vec<f64>)> {
    let (u, a_off, b_off) = a.grid.union(&b.grid)?;
    let av = embed(&a.grid, &a.values, &u, &a_off, 0.0);
    let bv = embed(&b.grid, &b.values, &u, &b_off, 0.0);
    Ok((u, av, bv))
}

/// Samplewise comparison on the union grid: the node where `a - b` is
/// smallest, as `(min margin, a there, b there)`. Nodes where both sides
/// are infinite compare equal.
pub fn min_margin(a: &GridFn, b: &GridFn) -> Result<(f64, f64, f64)> {
    let (_, av, bv) = align_pair(a, b)?;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for (&x, &y) in av.iter().zip(&bv) {
        let m = if x == y { 0.0 } else { x - y };
        if m < best.0 {
            best = (m, x, y);
        }
    }
    if av.is_empty() {
        best = (0.0, 0.0, 0.0);
    }
    Ok(best)
}
