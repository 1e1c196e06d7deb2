//! Seeded test families and hypothesis-satisfying pairs.
//!
//! Every generator is a pure function of its [`FamilySpec`]; the same spec
//! always yields bit-identical samples. Randomness comes from ChaCha8 seeded
//! with the spec's seed, and per-trial seeds are taken from separate ChaCha
//! streams of one base seed (see [`derive_seed`]).

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFn, GridSet};
use crate::means::{Lambda, PParam};
use crate::transform::project;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    GaussianLike,
    MaxAffineExponential,
    PPowerCap,
    Box,
    #[serde(rename = "polytope-2d")]
    Polytope2d,
    RandomMask,
}

impl FamilyKind {
    pub fn is_set(self) -> bool {
        matches!(self, FamilyKind::Box | FamilyKind::Polytope2d | FamilyKind::RandomMask)
    }
}

fn default_bounds() -> [f64; 2] {
    [-6.0, 6.0]
}

/// A family of test inputs on the cube `bounds^n` sampled with `N` nodes per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    #[serde(default)]
    pub seed: u64,
    pub n: usize,
    #[serde(rename = "box", default = "default_bounds")]
    pub bounds: [f64; 2],
    #[serde(rename = "N")]
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<PParam>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, n: usize, count: usize, seed: u64) -> Self {
        FamilySpec {
            kind,
            seed,
            n,
            bounds: default_bounds(),
            count,
            p: None,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        FamilySpec { seed, ..self.clone() }
    }

    pub fn with_p(&self, p: PParam) -> Self {
        FamilySpec {
            p: Some(p),
            ..self.clone()
        }
    }

    pub fn with_bounds(&self, lo: f64, hi: f64) -> Self {
        FamilySpec {
            bounds: [lo, hi],
            ..self.clone()
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        if !(1..=2).contains(&self.n) {
            return Err(Error::InvalidFamily(format!(
                "dimension must be 1 or 2, got {}",
                self.n
            )));
        }
        Grid::cube(self.n, self.bounds[0], self.bounds[1], self.count)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn radius(&self) -> f64 {
        0.5 * (self.bounds[1] - self.bounds[0])
    }

    fn centre(&self) -> f64 {
        0.5 * (self.bounds[0] + self.bounds[1])
    }
}

/// Seed for trial `trial` and sub-stream `stream`, drawn from a dedicated
/// ChaCha stream of `base`.
pub fn derive_seed(base: u64, trial: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(trial.wrapping_mul(1 << 8).wrapping_add(stream));
    rng.next_u64()
}

/// `A exp(-(x-c)^T Q (x-c))` with `Q` symmetric positive definite (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianParams {
    pub amplitude: f64,
    pub centre: Vec<f64>,
    pub q: Vec<f64>,
}

fn quad_form(q: &[f64], d: &[f64]) -> f64 {
    let n = d.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += d[i] * q[i * n + j] * d[j];
        }
    }
    s
}

fn det(q: &[f64]) -> f64 {
    match q.len() {
        1 => q[0],
        4 => q[0] * q[3] - q[1] * q[2],
        _ => unreachable!("dimension is 1 or 2"),
    }
}

fn inverse(q: &[f64]) -> Vec<f64> {
    match q.len() {
        1 => vec![1.0 / q[0]],
        4 => {
            let d = det(q);
            vec![q[3] / d, -q[1] / d, -q[2] / d, q[0] / d]
        }
        _ => unreachable!("dimension is 1 or 2"),
    }
}

/// `R(θ) diag(e) R(θ)^T` for `n = 2`, or `[e0]` for `n = 1`.
fn rotated(eig: &[f64], theta: f64) -> Vec<f64> {
    if eig.len() == 1 {
        return vec![eig[0]];
    }
    let (s, c) = theta.sin_cos();
    let (a, b) = (eig[0], eig[1]);
    let off = (a - b) * c * s;
    vec![a * c * c + b * s * s, off, off, a * s * s + b * c * c]
}

impl GaussianParams {
    pub fn dims(&self) -> usize {
        self.centre.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(&self.centre).map(|(a, b)| a - b).collect();
        self.amplitude * (-quad_form(&self.q, &d)).exp()
    }

    pub fn sample(&self, grid: &Grid) -> Result<GridFn> {
        if grid.dims() != self.dims() {
            return Err(Error::GridMismatch("gaussian and grid dimensions differ".into()));
        }
        GridFn::from_fn(grid.clone(), |x| self.eval(x))
    }

    /// `∫_{R^n} = A π^{n/2} / sqrt(det Q)`.
    pub fn integral(&self) -> f64 {
        self.amplitude * PI.powf(self.dims() as f64 / 2.0) / det(&self.q).sqrt()
    }

    /// Closed form of the Asplund sum `(1-λ)self ⋆ λother`:
    /// amplitude `A^{1-λ}B^λ`, centre `(1-λ)a + λb`, and
    /// `Q = ((1-λ)Q_1^{-1} + λQ_2^{-1})^{-1}`.
    pub fn asplund(&self, other: &GaussianParams, lambda: Lambda) -> GaussianParams {
        let (w0, w1) = (lambda.complement(), lambda.value());
        let (i1, i2) = (inverse(&self.q), inverse(&other.q));
        let mix: Vec<f64> = i1.iter().zip(&i2).map(|(a, b)| w0 * a + w1 * b).collect();
        GaussianParams {
            amplitude: self.amplitude.powf(w0) * other.amplitude.powf(w1),
            centre: self
                .centre
                .iter()
                .zip(&other.centre)
                .map(|(a, b)| w0 * a + w1 * b)
                .collect(),
            q: inverse(&mix),
        }
    }
}

fn random_centre(spec: &FamilySpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let r = spec.radius();
    let w = 0.1 * r / (spec.n as f64).sqrt();
    (0..spec.n).map(|_| spec.centre() + rng.gen_range(-w..=w)).collect()
}

/// Parameters of a `gaussian-like` spec. Eigenvalues of `Q` lie in
/// `[λ_0, 3λ_0]` with `λ_0 = (5 / 0.9r)^2`, so the function is below
/// `A e^{-25}` on the boundary of the box of half-width `r`.
pub fn gaussian_params(spec: &FamilySpec) -> Result<GaussianParams> {
    if spec.kind != FamilyKind::GaussianLike {
        return Err(Error::InvalidFamily(format!("{:?} is not gaussian-like", spec.kind)));
    }
    spec.grid()?;
    let mut rng = spec.rng();
    let amplitude = rng.gen_range(0.5..=2.0);
    let centre = random_centre(spec, &mut rng);
    let l0 = (5.0 / (0.9 * spec.radius())).powi(2);
    let eig: Vec<f64> = (0..spec.n).map(|_| rng.gen_range(l0..=3.0 * l0)).collect();
    let theta = rng.gen_range(0.0..PI);
    Ok(GaussianParams {
        amplitude,
        centre,
        q: rotated(&eig, theta),
    })
}

/// Angles of `k >= 3` unit normals with consecutive gaps of at most `2π/3`:
/// evenly spaced from a random phase, each jittered by at most `(1/k - 1/3)/2`
/// turns, capped at a fifth of the spacing.
fn spread_angles(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let gap = 2.0 * PI / k as f64;
    let jitter = ((k as f64 / 3.0 - 1.0) / 2.0).min(0.2);
    let phase = rng.gen_range(0.0..2.0 * PI);
    (0..k)
        .map(|i| phase + gap * (i as f64 + jitter * rng.gen_range(-1.0..=1.0)))
        .collect()
}

fn max_affine(spec: &FamilySpec) -> Result<GridFn> {
    let grid = spec.grid()?;
    let mut rng = spec.rng();
    let amplitude: f64 = rng.gen_range(0.5..=2.0);
    let centre = random_centre(spec, &mut rng);
    let sigma = 10.0 / spec.radius();
    let k = rng.gen_range(3..=8);
    let normals: Vec<Vec<f64>> = if spec.n == 1 {
        (0..k).map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }]).collect()
    } else {
        spread_angles(k, &mut rng)
            .into_iter()
            .map(|t| vec![t.cos(), t.sin()])
            .collect()
    };
    let pieces: Vec<(Vec<f64>, f64)> = normals
        .into_iter()
        .map(|nrm| {
            let s = rng.gen_range(sigma..=2.0 * sigma);
            let b = rng.gen_range(0.0..=1.0);
            (nrm.into_iter().map(|v| v * s).collect(), b)
        })
        .collect();
    GridFn::from_fn(grid, |x| {
        let u = pieces
            .iter()
            .map(|(a, b)| {
                a.iter()
                    .zip(x)
                    .zip(&centre)
                    .map(|((ai, xi), ci)| ai * (xi - ci))
                    .sum::<f64>()
                    + b
            })
            .fold(f64::NEG_INFINITY, f64::max);
        amplitude * (-u).exp()
    })
}

/// Random log-concave function: a rotated Gaussian (`gaussian-like`) or
/// `A e^{-u}` with `u` the maximum of 3 to 8 affine functions.
pub fn gen_log_concave(spec: &FamilySpec) -> Result<GridFn> {
    match spec.kind {
        FamilyKind::GaussianLike => gaussian_params(spec)?.sample(&spec.grid()?),
        FamilyKind::MaxAffineExponential => max_affine(spec),
        k => Err(Error::InvalidFamily(format!("{k:?} is not a log-concave family"))),
    }
}

/// Random `p`-concave cap built on `u = (x-c)^T Q (x-c)`:
/// `A max(0, 1-u)^{1/p}` for `p > 0`, `A (1+u)^{1/p}` for `p < 0`, and
/// the ellipse indicator scaled by `A` for `p = +inf`.
pub fn gen_p_concave(spec: &FamilySpec) -> Result<GridFn> {
    if spec.kind != FamilyKind::PPowerCap {
        return Err(Error::InvalidFamily(format!("{:?} is not p-power-cap", spec.kind)));
    }
    let p = spec
        .p
        .ok_or_else(|| Error::InvalidFamily("p-power-cap needs p".into()))?;
    let grid = spec.grid()?;
    if p.is_zero() {
        return Err(Error::InvalidFamily("p = 0 is the log-concave family".into()));
    }
    if p == PParam::MinusInfinity {
        return Err(Error::InvalidFamily("p = -inf is not supported".into()));
    }
    let mut rng = spec.rng();
    let amplitude: f64 = rng.gen_range(0.5..=2.0);
    let centre = random_centre(spec, &mut rng);
    let r = spec.radius();
    let (lo, hi) = if p.value() > 0.0 {
        (0.3 * r, 0.8 * r)
    } else {
        (0.1 * r, 0.3 * r)
    };
    let eig: Vec<f64> = (0..spec.n).map(|_| rng.gen_range(lo..=hi).powi(-2)).collect();
    let q = rotated(&eig, rng.gen_range(0.0..PI));
    GridFn::from_fn(grid, |x| {
        let d: Vec<f64> = x.iter().zip(&centre).map(|(a, b)| a - b).collect();
        let u = quad_form(&q, &d);
        match p {
            PParam::PlusInfinity => {
                if u <= 1.0 {
                    amplitude
                } else {
                    0.0
                }
            }
            PParam::Finite(p) if p > 0.0 => amplitude * (1.0 - u).max(0.0).powf(1.0 / p),
            PParam::Finite(p) => amplitude * (1.0 + u).powf(1.0 / p),
            PParam::MinusInfinity => unreachable!(),
        }
    })
}

/// Mask of the nodes with multi-index in `lo..=hi` on every axis.
pub fn index_box(grid: &Grid, lo: &[usize], hi: &[usize]) -> GridSet {
    GridSet::from_raw(
        grid.clone(),
        (0..grid.len())
            .map(|k| {
                grid.multi_index(k)
                    .iter()
                    .enumerate()
                    .all(|(i, &j)| j >= lo[i] && j <= hi[i])
            })
            .collect(),
    )
}

fn random_index_box(grid: &Grid, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for i in 0..grid.dims() {
        let n = grid.count(i);
        let margin = n / 8;
        let len = rng.gen_range((n / 10).max(1)..=(n / 2).max(1));
        let start = rng.gen_range(margin..=(n - margin - len).max(margin));
        lo.push(start);
        hi.push((start + len - 1).min(n - 1));
    }
    (lo, hi)
}

fn polygon(spec: &FamilySpec, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let r = spec.radius();
    let c = random_centre(spec, rng);
    let (a, b) = (rng.gen_range(0.3 * r..=0.8 * r), rng.gen_range(0.3 * r..=0.8 * r));
    let rot = rng.gen_range(0.0..PI);
    let k = rng.gen_range(5..=10);
    let mut t: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    t.sort_by(f64::total_cmp);
    let (s, co) = rot.sin_cos();
    t.into_iter()
        .map(|t| {
            let (x, y) = (a * t.cos(), b * t.sin());
            [c[0] + co * x - s * y, c[1] + s * x + co * y]
        })
        .collect()
}

/// Whether `x` lies in the convex polygon with counter-clockwise vertices `v`.
fn in_convex_polygon(v: &[[f64; 2]], x: &[f64]) -> bool {
    (0..v.len()).all(|i| {
        let (a, b) = (v[i], v[(i + 1) % v.len()]);
        (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) >= 0.0
    })
}

/// Random mask: a node-aligned box, a convex polygon, or a union of 2 to 4
/// boxes (`random-mask`, not convex in general).
pub fn gen_mask(spec: &FamilySpec) -> Result<GridSet> {
    let grid = spec.grid()?;
    let mut rng = spec.rng();
    match spec.kind {
        FamilyKind::Box => {
            let (lo, hi) = random_index_box(&grid, &mut rng);
            Ok(index_box(&grid, &lo, &hi))
        }
        FamilyKind::Polytope2d => {
            if spec.n != 2 {
                return Err(Error::InvalidFamily("polytope-2d needs n = 2".into()));
            }
            let v = polygon(spec, &mut rng);
            Ok(GridSet::from_fn(grid, |x| in_convex_polygon(&v, x)))
        }
        FamilyKind::RandomMask => {
            let k = rng.gen_range(2..=4);
            let mut mask = vec![false; grid.len()];
            for _ in 0..k {
                let (lo, hi) = random_index_box(&grid, &mut rng);
                for (m, b) in mask.iter_mut().zip(index_box(&grid, &lo, &hi).mask()) {
                    *m |= *b;
                }
            }
            GridSet::new(grid, mask)
        }
        k => Err(Error::InvalidFamily(format!("{k:?} is not a set family"))),
    }
}

/// Random convex body: `box` or `polytope-2d`.
pub fn gen_convex_body(spec: &FamilySpec) -> Result<GridSet> {
    match spec.kind {
        FamilyKind::Box | FamilyKind::Polytope2d => gen_mask(spec),
        k => Err(Error::InvalidFamily(format!("{k:?} is not a convex-body family"))),
    }
}

/// Any family as a function; sets become indicators.
pub fn generate(spec: &FamilySpec) -> Result<GridFn> {
    match spec.kind {
        FamilyKind::GaussianLike | FamilyKind::MaxAffineExponential => gen_log_concave(spec),
        FamilyKind::PPowerCap => gen_p_concave(spec),
        _ => Ok(gen_mask(spec)?.indicator()),
    }
}

/// `e^{-|x|^2}` on `grid`.
pub fn unit_gaussian(grid: &Grid) -> Result<GridFn> {
    GaussianParams {
        amplitude: 1.0,
        centre: vec![0.0; grid.dims()],
        q: rotated(&vec![1.0; grid.dims()], 0.0),
    }
    .sample(grid)
}

/// The parabola cap `max(0, 1 - |x|^2)`, which is 1-concave.
pub fn parabola_cap(grid: &Grid) -> Result<GridFn> {
    GridFn::from_fn(grid.clone(), |x| (1.0 - x.iter().map(|v| v * v).sum::<f64>()).max(0.0))
}

/// First index of the largest sample on each line parallel to `axis`,
/// `None` on lines that vanish.
fn line_argmax(f: &GridFn, axis: usize) -> Vec<Option<usize>> {
    let g = f.grid();
    (0..g.num_lines(axis))
        .map(|h| {
            let vals = f.line_values(axis, h);
            let (mut best, mut arg) = (0.0, None);
            for (k, &v) in vals.iter().enumerate() {
                if v > best {
                    best = v;
                    arg = Some(k);
                }
            }
            arg
        })
        .collect()
}

/// Shifts line `h` parallel to `axis` by `shifts[h]` nodes, filling with 0.
/// Fails if some line would lose all of its maximisers.
pub fn shear_lines(f: &GridFn, axis: usize, shifts: &[i64]) -> Result<GridFn> {
    let g = f.grid();
    g.check_axis(axis)?;
    if shifts.len() != g.num_lines(axis) {
        return Err(Error::InvalidGrid(format!(
            "{} shifts for {} lines",
            shifts.len(),
            g.num_lines(axis)
        )));
    }
    let n = g.count(axis) as i64;
    let mut values = vec![0.0; g.len()];
    for (h, &s) in shifts.iter().enumerate() {
        let line = g.line(axis, h);
        let vals = f.line_values(axis, h);
        let top = vals.iter().copied().fold(0.0, f64::max);
        let mut kept = top == 0.0;
        for (k, &v) in vals.iter().enumerate() {
            let t = k as i64 + s;
            if (0..n).contains(&t) {
                values[line.index(t as usize)] = v;
                kept |= v == top;
            }
        }
        if !kept {
            return Err(Error::Degenerate(format!(
                "shift {s} moves every maximiser of line {h} out of the box"
            )));
        }
    }
    GridFn::new(g.clone(), values)
}

/// Least-squares slope of the per-line argmax against the line index.
fn ridge_slope(args: &[Option<usize>]) -> f64 {
    let pts: Vec<(f64, f64)> = args
        .iter()
        .enumerate()
        .filter_map(|(j, a)| a.map(|a| (j as f64, a as f64)))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// A pair `(f, g)` with `proj_H(f) = proj_H(g)` exactly, `H = {x_axis = 0}`.
///
/// `g` is an integer shear of `f` along `axis`: line `j` moves by
/// `σ (j - j_c)` nodes rounded toward zero, where `σ` tilts the ridge of
/// maximisers to a random slope in `[-3/4, 3/4]`. In one dimension the
/// single line moves by a random shift. The shear is halved until no line
/// loses its maximum, which ends at the identity at the latest.
/// Unless `preserve_logconcave` is set, every line of `g` is then randomly
/// permuted.
pub fn make_equal_projection_pair(
    f: &GridFn,
    axis: usize,
    seed: u64,
    preserve_logconcave: bool,
) -> Result<(GridFn, GridFn)> {
    let g = f.grid();
    g.check_axis(axis)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let args = line_argmax(f, axis);
    let lines = args.len();
    let mut shifts_for: Box<dyn FnMut(f64) -> Vec<i64>> = if g.dims() == 1 {
        let quarter = (g.count(axis) / 4) as i64;
        let s = rng.gen_range(-quarter..=quarter) as f64;
        Box::new(move |scale| vec![(s * scale).trunc() as i64])
    } else {
        let target = rng.gen_range(-0.75..=0.75);
        let sigma = target - ridge_slope(&args);
        let live: Vec<f64> = (0..lines).filter(|&j| args[j].is_some()).map(|j| j as f64).collect();
        let jc = if live.is_empty() {
            0.0
        } else {
            live.iter().sum::<f64>() / live.len() as f64
        };
        Box::new(move |scale| {
            (0..lines)
                .map(|j| (scale * sigma * (j as f64 - jc)).trunc() as i64)
                .collect()
        })
    };
    let mut scale = 1.0;
    let sheared = loop {
        match shear_lines(f, axis, &shifts_for(scale)) {
            Ok(s) => break s,
            Err(Error::Degenerate(_)) if scale > 1e-6 => scale *= 0.5,
            Err(e) => return Err(e),
        }
    };
    if preserve_logconcave {
        return Ok((f.clone(), sheared));
    }
    let mut values = sheared.values().to_vec();
    for h in 0..lines {
        let idx: Vec<usize> = g.line(axis, h).indices().collect();
        let mut vals: Vec<f64> = idx.iter().map(|&k| values[k]).collect();
        vals.shuffle(&mut rng);
        for (k, v) in idx.into_iter().zip(vals) {
            values[k] = v;
        }
    }
    Ok((f.clone(), GridFn::new(g.clone(), values)?))
}

fn positive_finite(v: f64, what: &str) -> Result<f64> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Degenerate(format!(
            "{what} must be positive and finite, got {v}"
        )));
    }
    Ok(v)
}

/// `(f, c g)` with `c` chosen so that `∫_H proj_H f = ∫_H proj_H (c g)`.
/// In one dimension this equalises the suprema.
pub fn make_equal_projection_integral_pair(f: &GridFn, g: &GridFn, axis: usize) -> Result<(GridFn, GridFn)> {
    let a = positive_finite(project(f, axis)?.integrate().get(), "projection integral of f")?;
    let b = positive_finite(project(g, axis)?.integrate().get(), "projection integral of g")?;
    Ok((f.clone(), g.scale(a / b)?))
}

fn max_section(f: &GridFn, axis: usize) -> Result<f64> {
    Ok(f.slice_integrals(axis)?
        .into_iter()
        .map(|d| d.get())
        .fold(0.0, f64::max))
}

/// `(f, c g)` with `c` chosen so that the largest section integrals
/// `max_α ∫ f|_{x_axis = α}` agree.
pub fn make_equal_max_section_pair(f: &GridFn, g: &GridFn, axis: usize) -> Result<(GridFn, GridFn)> {
    let a = positive_finite(max_section(f, axis)?, "maximal section of f")?;
    let b = positive_finite(max_section(g, axis)?, "maximal section of g")?;
    Ok((f.clone(), g.scale(a / b)?))
}

/// Largest section integral along `axis`.
pub fn max_section_integral(f: &GridFn, axis: usize) -> Result<f64> {
    max_section(f, axis)
}
