//! The p-sup-convolution `(1-λ)f ⋆_p λg`, Minkowski combinations of masks
//! and the infimal convolution of potentials.
//!
//! With `λ = k/m` and inputs sharing the step `h` on every axis, the pair of
//! nodes `(i, j)` combines to `(1-λ)x_i + λy_j`, which is node
//! `(m-k)i + kj` of the output grid of step `h/m` starting at
//! `(1-λ)lo_f + λlo_g`. Every combination lands exactly on a node, so no
//! interpolation happens inside the supremum.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFn, GridSet};
use crate::means::{mp_mean, ExtNonNeg, Lambda, MeanKernel, PParam};

/// Below this many node pairs the fast path stays on one thread.
const PARALLEL_PAIRS: usize = 1 << 16;

/// Output grid of a combination of functions on `a` and `b` with weight `λ`.
pub fn combined_grid(a: &Grid, b: &Grid, lambda: Lambda) -> Result<Grid> {
    if a.dims() != b.dims() {
        return Err(Error::GridMismatch(format!("dimension {} vs {}", a.dims(), b.dims())));
    }
    let (k, m) = (lambda.num() as usize, lambda.den() as usize);
    let (w0, w1) = (lambda.complement(), lambda.value());
    let mut lo = Vec::with_capacity(a.dims());
    let mut steps = Vec::with_capacity(a.dims());
    let mut counts = Vec::with_capacity(a.dims());
    for i in 0..a.dims() {
        let (ha, hb) = (a.step(i), b.step(i));
        if (ha - hb).abs() > 1e-9 * ha.max(hb) {
            return Err(Error::GridMismatch(format!("axis {i}: step {ha} vs {hb}")));
        }
        lo.push(w0 * a.lo()[i] + w1 * b.lo()[i]);
        steps.push(ha / m as f64);
        counts.push((m - k) * (a.count(i) - 1) + k * (b.count(i) - 1) + 1);
    }
    Grid::from_step(&lo, &steps, &counts)
}

/// Flat output offset contributed by each input node: `Σ_axis c · j_axis · stride_axis`.
fn node_offsets(g: &Grid, out_strides: &[usize], c: usize) -> Vec<usize> {
    (0..g.len())
        .map(|flat| {
            g.multi_index(flat)
                .iter()
                .zip(out_strides)
                .map(|(j, s)| c * j * s)
                .sum()
        })
        .collect()
}

/// `(offset, transformed value)` for every positive sample.
fn support_keys(f: &GridFn, offsets: &[usize], pre: impl Fn(f64) -> f64) -> Vec<(usize, f64)> {
    f.values()
        .iter()
        .zip(offsets)
        .filter(|(v, _)| **v > 0.0)
        .map(|(&v, &o)| (o, pre(v)))
        .collect()
}

fn scatter(kernel: &MeanKernel, fs: &[(usize, f64)], gs: &[(usize, f64)], buf: &mut [f64]) {
    for &(of, a) in fs {
        for &(og, b) in gs {
            let t = of + og;
            let key = kernel.combine(a, b);
            if kernel.better(key, buf[t]) {
                buf[t] = key;
            }
        }
    }
}

/// `(1-λ)f ⋆_p λg(z) = max M_p(f(x), g(y), λ)` over grid pairs with
/// `(1-λ)x + λy = z`.
///
/// Keys of the mean are compared instead of the means themselves and only
/// the winning key of each node is finalised; the result is bit-identical to
/// [`sup_convolution_bruteforce`]. Large inputs are split across the rayon
/// pool with one buffer per worker.
pub fn sup_convolution(f: &GridFn, g: &GridFn, lambda: Lambda, p: PParam) -> Result<GridFn> {
    let out = combined_grid(f.grid(), g.grid(), lambda)?;
    let (k, m) = (lambda.num() as usize, lambda.den() as usize);
    let strides = out.strides();
    let kernel = MeanKernel::new(lambda, p);
    let fs = support_keys(f, &node_offsets(f.grid(), &strides, m - k), |a| kernel.pre0(a));
    let gs = support_keys(g, &node_offsets(g.grid(), &strides, k), |b| kernel.pre1(b));
    let zero = kernel.zero_key();
    let n_out = out.len();

    let keys = if fs.len() * gs.len() < PARALLEL_PAIRS || rayon::current_num_threads() == 1 {
        let mut buf = vec![zero; n_out];
        scatter(&kernel, &fs, &gs, &mut buf);
        buf
    } else {
        let chunk = fs.len().div_ceil(rayon::current_num_threads()).max(1);
        fs.par_chunks(chunk)
            .map(|part| {
                let mut buf = vec![zero; n_out];
                scatter(&kernel, part, &gs, &mut buf);
                buf
            })
            .reduce_with(|mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    if kernel.better(y, *x) {
                        *x = y;
                    }
                }
                a
            })
            .unwrap_or_else(|| vec![zero; n_out])
    };
    let values = keys.into_iter().map(|key| kernel.finalize(key) + 0.0).collect();
    GridFn::new(out, values)
}

/// The literal double loop over all node pairs, evaluating `mp_mean` for
/// each. Quadratic in the number of nodes; meant as a test oracle.
pub fn sup_convolution_bruteforce(f: &GridFn, g: &GridFn, lambda: Lambda, p: PParam) -> Result<GridFn> {
    let out = combined_grid(f.grid(), g.grid(), lambda)?;
    let (k, m) = (lambda.num() as usize, lambda.den() as usize);
    let mut values = vec![0.0f64; out.len()];
    for x in 0..f.grid().len() {
        let xi = f.grid().multi_index(x);
        for y in 0..g.grid().len() {
            let yi = g.grid().multi_index(y);
            let z: Vec<usize> = xi.iter().zip(&yi).map(|(a, b)| (m - k) * a + k * b).collect();
            let t = out.flat_index(&z);
            let v = mp_mean(f.get(x), g.get(y), lambda, p).get();
            if v > values[t] {
                values[t] = v;
            }
        }
    }
    GridFn::new(out, values)
}

/// `(1-λ)A + λB` on the combined grid: node `z` is set iff some `x ∈ A`
/// and `y ∈ B` satisfy `(m-k)x + ky = mz` in index space.
pub fn minkowski_combine(a: &GridSet, b: &GridSet, lambda: Lambda) -> Result<GridSet> {
    let out = combined_grid(a.grid(), b.grid(), lambda)?;
    let (k, m) = (lambda.num() as usize, lambda.den() as usize);
    let strides = out.strides();
    let oa = node_offsets(a.grid(), &strides, m - k);
    let ob = node_offsets(b.grid(), &strides, k);
    let ia: Vec<usize> = (0..oa.len()).filter(|&x| a.contains(x)).map(|x| oa[x]).collect();
    let ib: Vec<usize> = (0..ob.len()).filter(|&y| b.contains(y)).map(|y| ob[y]).collect();
    let mut mask = vec![false; out.len()];
    for &x in &ia {
        for &y in &ib {
            mask[x + y] = true;
        }
    }
    GridSet::new(out, mask)
}

/// A potential `u : grid -> ℝ ∪ {+inf}`, the exponent of a density `e^{-u}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialFn {
    grid: Grid,
    values: Vec<f64>,
}

impl PotentialFn {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(&v) = values.iter().find(|v| v.is_nan() || **v == f64::NEG_INFINITY) {
            return Err(Error::InvalidValue(v));
        }
        Ok(PotentialFn { grid, values })
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: Grid, u: F) -> Result<Self> {
        let values = (0..grid.len()).map(|k| u(&grid.point_of(k))).collect();
        PotentialFn::new(grid, values)
    }

    /// `u = -ln f`, with `+inf` where `f = 0`. Rejects infinite densities.
    pub fn from_density(f: &GridFn) -> Result<Self> {
        if f.has_infinite() {
            return Err(Error::InfiniteSample);
        }
        let values = f.values().iter().map(|v| -v.ln()).collect();
        PotentialFn::new(f.grid().clone(), values)
    }

    /// `e^{-u}`.
    pub fn to_density(&self) -> GridFn {
        GridFn::new(self.grid.clone(), self.values.iter().map(|u| (-u).exp()).collect())
            .expect("exp of a potential is non-negative")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `((1-λ)u ⊕ λv)(z) = min (1-λ)u(x) + λv(y)` over grid pairs with
/// `(1-λ)x + λy = z`; `+inf` where no pair has finite potentials.
pub fn inf_convolution(u: &PotentialFn, v: &PotentialFn, lambda: Lambda) -> Result<PotentialFn> {
    let out = combined_grid(&u.grid, &v.grid, lambda)?;
    let (k, m) = (lambda.num() as usize, lambda.den() as usize);
    let (w0, w1) = (lambda.complement(), lambda.value());
    let strides = out.strides();
    let ou = node_offsets(&u.grid, &strides, m - k);
    let ov = node_offsets(&v.grid, &strides, k);
    let us: Vec<(usize, f64)> = u
        .values
        .iter()
        .zip(&ou)
        .filter(|(x, _)| x.is_finite())
        .map(|(&x, &o)| (o, w0 * x))
        .collect();
    let vs: Vec<(usize, f64)> = v
        .values
        .iter()
        .zip(&ov)
        .filter(|(y, _)| y.is_finite())
        .map(|(&y, &o)| (o, w1 * y))
        .collect();
    let mut values = vec![f64::INFINITY; out.len()];
    for &(a, x) in &us {
        for &(b, y) in &vs {
            let t = a + b;
            values[t] = values[t].min(x + y);
        }
    }
    PotentialFn::new(out, values)
}

/// `∫ (1-λ)f ⋆_p λg`.
pub fn supconv_integral(f: &GridFn, g: &GridFn, lambda: Lambda, p: PParam) -> Result<ExtNonNeg> {
    Ok(sup_convolution(f, g, lambda, p)?.integrate())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on(g: &Grid, pred: impl Fn(&[f64]) -> bool) -> GridFn {
        GridSet::from_fn(g.clone(), pred).indicator()
    }

    fn unit_grid(lo: f64, n: usize, h: f64) -> Grid {
        Grid::from_step(&[lo], &[h], &[n]).unwrap()
    }

    #[test]
    fn indicators_of_intervals() {
        let h = 0.25;
        let f = on(&unit_grid(0.0, 5, h), |_| true);
        let g = on(&unit_grid(0.0, 9, h), |_| true);
        let c = sup_convolution(&f, &g, Lambda::half(), PParam::Finite(0.0)).unwrap();
        assert_eq!(c.grid().lo(), &[0.0]);
        assert_eq!(c.grid().step(0), 0.125);
        assert_eq!(c.grid().count(0), 13);
        assert!(c.values().iter().all(|v| *v == 1.0));
        // 13 nodes spanning [0, 1.5]
        assert_eq!(c.grid().coord(0, 12), 1.5);
    }

    #[test]
    fn zero_argument_gives_zero() {
        let g = unit_grid(-1.0, 8, 0.25);
        let f = GridFn::from_fn(g.clone(), |x| 1.0 + x[0] * x[0]).unwrap();
        let z = GridFn::zeros(g);
        for p in [
            PParam::Finite(0.0),
            PParam::Finite(-2.0),
            PParam::PlusInfinity,
            PParam::MinusInfinity,
        ] {
            let c = sup_convolution(&f, &z, Lambda::new(1, 3).unwrap(), p).unwrap();
            assert_eq!(c.sup_value(), ExtNonNeg::ZERO);
            assert_eq!(
                c,
                sup_convolution_bruteforce(&f, &z, Lambda::new(1, 3).unwrap(), p).unwrap()
            );
        }
    }

    #[test]
    fn fast_path_matches_bruteforce_with_infinities() {
        let g = Grid::from_step(&[-1.0, 0.0], &[0.5, 0.5], &[5, 4]).unwrap();
        let mut v: Vec<f64> = (0..20).map(|i| ((i * 7) % 5) as f64 * 0.3).collect();
        v[3] = f64::INFINITY;
        let f = GridFn::new(g.clone(), v).unwrap();
        let w: Vec<f64> = (0..20).map(|i| ((i * 3) % 4) as f64 + 0.5).collect();
        let h = GridFn::new(g, w).unwrap();
        for p in ["-inf", "-1", "-1/2", "0", "1e-13", "1/2", "2", "inf"] {
            let p: PParam = p.parse().unwrap();
            for l in [Lambda::half(), Lambda::new(2, 5).unwrap()] {
                let a = sup_convolution(&f, &h, l, p).unwrap();
                let b = sup_convolution_bruteforce(&f, &h, l, p).unwrap();
                assert_eq!(a, b, "p={p} λ={l}");
            }
        }
    }

    #[test]
    fn mismatched_steps_are_rejected() {
        let f = GridFn::zeros(unit_grid(0.0, 4, 0.25));
        let g = GridFn::zeros(unit_grid(0.0, 4, 0.5));
        assert!(matches!(
            sup_convolution(&f, &g, Lambda::half(), PParam::Finite(0.0)),
            Err(Error::GridMismatch(_))
        ));
        let g2 = GridFn::zeros(Grid::cube(2, 0.0, 1.0, 4).unwrap());
        assert!(sup_convolution(&f, &g2, Lambda::half(), PParam::Finite(0.0)).is_err());
    }

    #[test]
    fn minkowski_of_boxes() {
        let g = Grid::from_step(&[0.0, 0.0], &[0.25, 0.25], &[5, 5]).unwrap();
        let g2 = Grid::from_step(&[0.0, 0.0], &[0.25, 0.25], &[5, 13]).unwrap();
        let a = GridSet::from_fn(g, |_| true);
        let b = GridSet::from_fn(g2, |_| true);
        let c = minkowski_combine(&a, &b, Lambda::half()).unwrap();
        assert_eq!(c.count(), c.grid().len());
        assert_eq!(c.grid().counts(), &[9, 17]);
    }

    #[test]
    fn inf_convolution_of_slab_potentials() {
        let g = unit_grid(-1.0, 17, 0.25);
        let slab = |a: f64, b: f64| {
            PotentialFn::from_fn(
                g.clone(),
                move |x| if x[0] >= a && x[0] <= b { 0.0 } else { f64::INFINITY },
            )
            .unwrap()
        };
        let w = inf_convolution(&slab(0.0, 1.0), &slab(0.0, 2.0), Lambda::half()).unwrap();
        for k in 0..w.grid().len() {
            let x = w.grid().coord(0, k as i64);
            let expect = if (-1e-12..=1.5 + 1e-12).contains(&x) {
                0.0
            } else {
                f64::INFINITY
            };
            assert_eq!(w.values()[k], expect, "x={x}");
        }
    }
}
