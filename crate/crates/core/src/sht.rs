//! Band-limited spherical-harmonic transforms for real fields.
//!
//! Fields are sampled on a Gauss-Legendre (latitude) by uniform (longitude)
//! grid. Harmonics are orthonormal on the unit sphere and carry the
//! Condon-Shortley phase, so that `conj(Y_l^m) = (-1)^m Y_l^{-m}`.
//!
//! A [`SpectralField`] stores only `m >= 0`; negative orders are implied by
//! the realness relation `c_{l,-m} = (-1)^m conj(c_{l,m})`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};

/// Number of stored (`m >= 0`) coefficients for bandlimit `n`.
pub fn mode_count(bandlimit: usize) -> usize {
    (bandlimit + 1) * (bandlimit + 2) / 2
}

/// Storage slot of `(l, m)` with `0 <= m <= l <= bandlimit`. Storage is m-major.
#[inline]
pub fn mode_index(bandlimit: usize, l: usize, m: usize) -> usize {
    debug_assert!(m <= l && l <= bandlimit);
    m * (bandlimit + 1) - m * m.saturating_sub(1) / 2 + (l - m)
}

/// Eigenvalue of the Laplace-Beltrami operator on a sphere of radius `radius`.
pub fn laplacian_eigenvalue(l: usize, radius: f64) -> f64 {
    let l = l as f64;
    -l * (l + 1.0) / (radius * radius)
}

/// Gauss-Legendre nodes and weights on [-1, 1], nodes in decreasing order.
///
/// Nodes are found by Newton's method on the three-term recurrence and
/// mirrored so that `x[n-1-i] == -x[i]` holds exactly.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre latitude nodes crossed with uniform longitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    n_theta: usize,
    n_phi: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    phis: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 {
            return Err(Error::InvalidGrid("n_theta must be at least 1".into()));
        }
        if n_phi < 2 || n_phi % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n_phi must be even and positive, got {n_phi}"
            )));
        }
        let (nodes, weights) = gauss_legendre(n_theta);
        let phis = (0..n_phi)
            .map(|k| 2.0 * PI * k as f64 / n_phi as f64)
            .collect();
        Ok(Self {
            n_theta,
            n_phi,
            nodes,
            weights,
            phis,
        })
    }

    /// Smallest grid that integrates quartic products of degree-`bandlimit` fields exactly.
    pub fn minimal_for(bandlimit: usize) -> Self {
        let (t, p) = min_grid(bandlimit);
        Self::new(t, p).expect("minimal grid is valid")
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    /// `cos(theta_j)`, decreasing from the north pole.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    /// Colatitudes `theta_j` in radians.
    pub fn thetas(&self) -> Vec<f64> {
        self.nodes.iter().map(|x| x.acos()).collect()
    }

    /// Integral over the unit sphere of a field sampled on this grid.
    pub fn integrate(&self, field: &GridField) -> f64 {
        let dphi = 2.0 * PI / self.n_phi as f64;
        field
            .values
            .chunks_exact(self.n_phi)
            .zip(&self.weights)
            .map(|(row, w)| w * row.iter().sum::<f64>())
            .sum::<f64>()
            * dphi
    }
}

/// Minimal `(n_theta, n_phi)` for exact quartic products: `2 n_theta - 1 >= 4N`, `n_phi >= 4N + 1`, `n_phi` even.
pub fn min_grid(bandlimit: usize) -> (usize, usize) {
    let n_theta = (4 * bandlimit + 2).div_ceil(2).max(1);
    let mut n_phi = 4 * bandlimit + 1;
    if n_phi % 2 == 1 {
        n_phi += 1;
    }
    (n_theta, n_phi)
}

/// Real samples on a [`QuadratureGrid`], row-major (`theta` rows, `phi` columns).
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    n_theta: usize,
    n_phi: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn zeros(n_theta: usize, n_phi: usize) -> Self {
        Self {
            n_theta,
            n_phi,
            values: vec![0.0; n_theta * n_phi],
        }
    }

    pub fn from_values(n_theta: usize, n_phi: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_theta * n_phi {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                n_theta * n_phi,
                values.len()
            )));
        }
        Ok(Self {
            n_theta,
            n_phi,
            values,
        })
    }

    /// Samples `f(theta, phi)` at every grid point.
    pub fn from_fn(grid: &QuadratureGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let thetas = grid.thetas();
        let mut values = Vec::with_capacity(grid.n_theta * grid.n_phi);
        for &t in &thetas {
            for &p in grid.phis() {
                values.push(f(t, p));
            }
        }
        Self {
            n_theta: grid.n_theta,
            n_phi: grid.n_phi,
            values,
        }
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.n_phi + k]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.n_phi..(j + 1) * self.n_phi]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n_theta: self.n_theta,
            n_phi: self.n_phi,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Spectral coefficients `c_{l,m}`, `0 <= m <= l <= bandlimit`.
#[derive(Clone, PartialEq)]
pub struct SpectralField {
    bandlimit: usize,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralField")
            .field("bandlimit", &self.bandlimit)
            .field("norm", &self.norm())
            .finish()
    }
}

impl SpectralField {
    pub fn zeros(bandlimit: usize) -> Self {
        Self {
            bandlimit,
            coeffs: vec![Complex64::new(0.0, 0.0); mode_count(bandlimit)],
        }
    }

    /// Wraps raw m-major storage. The m = 0 block is forced real.
    pub fn from_storage(bandlimit: usize, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != mode_count(bandlimit) {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients for bandlimit {bandlimit}, got {}",
                mode_count(bandlimit),
                coeffs.len()
            )));
        }
        for c in &mut coeffs[..=bandlimit] {
            c.im = 0.0;
        }
        Ok(Self { bandlimit, coeffs })
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    /// Coefficient at `(l, m)` for any `|m| <= l`; negative orders use the realness relation.
    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        assert!(l <= self.bandlimit && m.unsigned_abs() as usize <= l);
        let c = self.coeffs[mode_index(self.bandlimit, l, m.unsigned_abs() as usize)];
        if m >= 0 {
            c
        } else if m % 2 == 0 {
            c.conj()
        } else {
            -c.conj()
        }
    }

    /// Sets `(l, m)`. A negative `m` stores the implied positive-order entry;
    /// `m = 0` keeps only the real part.
    pub fn set(&mut self, l: usize, m: i64, value: Complex64) {
        assert!(l <= self.bandlimit && m.unsigned_abs() as usize <= l);
        let ma = m.unsigned_abs() as usize;
        let stored = if m > 0 {
            value
        } else if m == 0 {
            Complex64::new(value.re, 0.0)
        } else if ma % 2 == 0 {
            value.conj()
        } else {
            -value.conj()
        };
        self.coeffs[mode_index(self.bandlimit, l, ma)] = stored;
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// `(l, m)` for each storage slot, in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.bandlimit;
        (0..=n).flat_map(move |m| (m..=n).map(move |l| (l, m)))
    }

    /// Degree of each storage slot.
    pub fn degrees(&self) -> impl Iterator<Item = usize> {
        self.modes().map(|(l, _)| l)
    }

    /// Real inner product over the full `-l..=l` range, i.e. the L2 inner
    /// product of the synthesized fields.
    pub fn dot(&self, other: &SpectralField) -> f64 {
        debug_assert_eq!(self.bandlimit, other.bandlimit);
        let split = self.bandlimit + 1;
        let re = |a: &Complex64, b: &Complex64| a.re * b.re + a.im * b.im;
        let zonal: f64 = self.coeffs[..split]
            .iter()
            .zip(&other.coeffs[..split])
            .map(|(a, b)| re(a, b))
            .sum();
        let rest: f64 = self.coeffs[split..]
            .iter()
            .zip(&other.coeffs[split..])
            .map(|(a, b)| re(a, b))
            .sum();
        zonal + 2.0 * rest
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    /// L2 norm over the full coefficient range.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest coefficient magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `(l2, sup)`.
    pub fn norms(&self) -> (f64, f64) {
        (self.norm(), self.sup_norm())
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &SpectralField) {
        for (s, v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += v * a;
        }
    }

    /// `self - other`
    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        SpectralField {
            bandlimit: self.bandlimit,
            coeffs,
        }
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// Rotation about the polar axis by `alpha`: `c_{l,m} -> e^{-i m alpha} c_{l,m}`,
    /// so the synthesized field becomes `f(theta, phi - alpha)`.
    pub fn rotate_z(&self, alpha: f64) -> SpectralField {
        let mut out = self.clone();
        let n = self.bandlimit;
        for m in 1..=n {
            let ph = Complex64::from_polar(1.0, -(m as f64) * alpha);
            for l in m..=n {
                out.coeffs[mode_index(n, l, m)] *= ph;
            }
        }
        out
    }

    /// Copy with a different bandlimit: truncated or zero-padded.
    pub fn resized(&self, bandlimit: usize) -> SpectralField {
        let mut out = SpectralField::zeros(bandlimit);
        let n = self.bandlimit.min(bandlimit);
        for m in 0..=n {
            for l in m..=n {
                out.coeffs[mode_index(bandlimit, l, m)] =
                    self.coeffs[mode_index(self.bandlimit, l, m)];
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Precomputed transform tables for one bandlimit and grid. Immutable and
/// shareable across threads.
pub struct ShtPlan {
    bandlimit: usize,
    grid: QuadratureGrid,
    /// Rings in the northern half, equator included for odd `n_theta`.
    n_half: usize,
    /// `P̄_l^m(x_j)` for `j < n_half`, indexed `[mode_index][j]`.
    legendre: Vec<f64>,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

impl fmt::Debug for ShtPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShtPlan")
            .field("bandlimit", &self.bandlimit)
            .field("n_theta", &self.grid.n_theta)
            .field("n_phi", &self.grid.n_phi)
            .finish()
    }
}

impl ShtPlan {
    /// Builds a plan, rejecting grids that cannot integrate quartic products exactly.
    pub fn new(bandlimit: usize, grid: QuadratureGrid) -> Result<Self> {
        let (min_theta, min_phi) = min_grid(bandlimit);
        if grid.n_theta < min_theta || grid.n_phi < 4 * bandlimit + 1 {
            return Err(Error::QuadratureCapacity {
                bandlimit,
                n_theta: grid.n_theta,
                n_phi: grid.n_phi,
                min_theta,
                min_phi,
            });
        }
        let n_half = grid.n_theta.div_ceil(2);
        let legendre = legendre_table(bandlimit, &grid.nodes[..n_half]);
        let mut planner = RealFftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(grid.n_phi);
        let inverse = planner.plan_fft_inverse(grid.n_phi);
        Ok(Self {
            bandlimit,
            grid,
            n_half,
            legendre,
            forward,
            inverse,
        })
    }

    /// Plan on the smallest capacity-compliant grid.
    pub fn minimal(bandlimit: usize) -> Self {
        Self::new(bandlimit, QuadratureGrid::minimal_for(bandlimit)).expect("minimal grid")
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    /// `P̄_l^m(cos theta_j)` for any ring `j`.
    pub fn legendre(&self, l: usize, m: usize, j: usize) -> f64 {
        let idx = mode_index(self.bandlimit, l, m);
        let n = self.grid.n_theta;
        if j < self.n_half {
            self.legendre[idx * self.n_half + j]
        } else {
            let v = self.legendre[idx * self.n_half + (n - 1 - j)];
            if (l + m) % 2 == 0 {
                v
            } else {
                -v
            }
        }
    }

    fn check_grid(&self, f: &GridField) -> Result<()> {
        if f.n_theta != self.grid.n_theta || f.n_phi != self.grid.n_phi {
            return Err(Error::GridShape {
                expected_theta: self.grid.n_theta,
                expected_phi: self.grid.n_phi,
                got_theta: f.n_theta,
                got_phi: f.n_phi,
            });
        }
        Ok(())
    }

    /// Spectral coefficients `<f, Y_l^m>` by longitude FFT then weighted Legendre projection.
    pub fn analyze(&self, f: &GridField) -> Result<SpectralField> {
        self.check_grid(f)?;
        let n = self.bandlimit;
        let nt = self.grid.n_theta;
        let np = self.grid.n_phi;
        let nm = n + 1;
        let dphi = 2.0 * PI / np as f64;

        // ring spectra, [j][m]
        let mut spectra = vec![Complex64::new(0.0, 0.0); nt * nm];
        let mut input = self.forward.make_input_vec();
        let mut output = self.forward.make_output_vec();
        let mut scratch = self.forward.make_scratch_vec();
        for j in 0..nt {
            input.copy_from_slice(f.row(j));
            self.forward
                .process_with_scratch(&mut input, &mut output, &mut scratch)
                .expect("fft buffer sizes are fixed by the plan");
            for m in 0..nm {
                spectra[j * nm + m] = output[m] * dphi;
            }
        }

        let nh = self.n_half;
        let mut sym_re = vec![0.0; nh];
        let mut sym_im = vec![0.0; nh];
        let mut anti_re = vec![0.0; nh];
        let mut anti_im = vec![0.0; nh];
        let mut out = SpectralField::zeros(n);
        let w = &self.grid.weights;
        for m in 0..=n {
            for j in 0..nh {
                let js = nt - 1 - j;
                let a = spectra[j * nm + m];
                if js == j {
                    sym_re[j] = w[j] * a.re;
                    sym_im[j] = w[j] * a.im;
                    anti_re[j] = 0.0;
                    anti_im[j] = 0.0;
                } else {
                    let b = spectra[js * nm + m];
                    sym_re[j] = w[j] * (a.re + b.re);
                    sym_im[j] = w[j] * (a.im + b.im);
                    anti_re[j] = w[j] * (a.re - b.re);
                    anti_im[j] = w[j] * (a.im - b.im);
                }
            }
            for l in m..=n {
                let idx = mode_index(n, l, m);
                let p = &self.legendre[idx * nh..(idx + 1) * nh];
                let (xr, xi) = if (l + m) % 2 == 0 {
                    (&sym_re, &sym_im)
                } else {
                    (&anti_re, &anti_im)
                };
                let mut re = 0.0;
                let mut im = 0.0;
                for ((pj, r), i) in p.iter().zip(xr.iter()).zip(xi.iter()) {
                    re += pj * r;
                    im += pj * i;
                }
                out.coeffs[idx] = Complex64::new(re, if m == 0 { 0.0 } else { im });
            }
        }
        Ok(out)
    }

    /// Evaluates the truncated expansion at every grid point.
    pub fn synthesize(&self, c: &SpectralField) -> Result<GridField> {
        if c.bandlimit > self.bandlimit {
            return Err(Error::Bandlimit {
                plan: self.bandlimit,
                field: c.bandlimit,
            });
        }
        let nf = c.bandlimit;
        let n = self.bandlimit;
        let nt = self.grid.n_theta;
        let np = self.grid.n_phi;
        let nc = np / 2 + 1;
        let nh = self.n_half;

        let mut rows = vec![Complex64::new(0.0, 0.0); nt * nc];
        let mut sym_re = vec![0.0; nh];
        let mut sym_im = vec![0.0; nh];
        let mut anti_re = vec![0.0; nh];
        let mut anti_im = vec![0.0; nh];
        for m in 0..=nf {
            sym_re.fill(0.0);
            sym_im.fill(0.0);
            anti_re.fill(0.0);
            anti_im.fill(0.0);
            for l in m..=nf {
                let coef = c.coeffs[mode_index(nf, l, m)];
                if coef.re == 0.0 && coef.im == 0.0 {
                    continue;
                }
                let idx = mode_index(n, l, m);
                let p = &self.legendre[idx * nh..(idx + 1) * nh];
                let (yr, yi) = if (l + m) % 2 == 0 {
                    (&mut sym_re, &mut sym_im)
                } else {
                    (&mut anti_re, &mut anti_im)
                };
                for ((pj, r), i) in p.iter().zip(yr.iter_mut()).zip(yi.iter_mut()) {
                    *r += coef.re * pj;
                    *i += coef.im * pj;
                }
            }
            for j in 0..nh {
                let js = nt - 1 - j;
                rows[j * nc + m] = Complex64::new(sym_re[j] + anti_re[j], sym_im[j] + anti_im[j]);
                if js != j {
                    rows[js * nc + m] =
                        Complex64::new(sym_re[j] - anti_re[j], sym_im[j] - anti_im[j]);
                }
            }
        }

        let mut out = GridField::zeros(nt, np);
        let mut scratch = self.inverse.make_scratch_vec();
        for (j, spec) in rows.chunks_exact_mut(nc).enumerate() {
            spec[0].im = 0.0;
            self.inverse
                .process_with_scratch(spec, &mut out.values[j * np..(j + 1) * np], &mut scratch)
                .expect("fft buffer sizes are fixed by the plan");
        }
        Ok(out)
    }
}

/// Fully normalized associated Legendre values (Condon-Shortley phase) for
/// every `0 <= m <= l <= n` at each node, `[mode_index][node]`.
///
/// The sectoral seed is accumulated in normalized form so nothing overflows
/// for large `n`.
pub(crate) fn legendre_table(n: usize, nodes: &[f64]) -> Vec<f64> {
    let nn = nodes.len();
    let mut table = vec![0.0; mode_count(n) * nn];
    // recurrence coefficients per (l, m)
    let mut a = vec![0.0; mode_count(n)];
    let mut b = vec![0.0; mode_count(n)];
    for m in 0..=n {
        for l in (m + 2)..=n {
            let (lf, mf) = (l as f64, m as f64);
            let idx = mode_index(n, l, m);
            a[idx] = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            b[idx] = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
        }
    }
    for (j, &x) in nodes.iter().enumerate() {
        let s = (1.0 - x * x).max(0.0).sqrt();
        let mut pmm = 1.0 / (4.0 * PI).sqrt();
        for m in 0..=n {
            if m > 0 {
                let mf = m as f64;
                pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
            }
            table[mode_index(n, m, m) * nn + j] = pmm;
            if m == n {
                break;
            }
            let mut p2 = pmm;
            let mut p1 = (2.0 * m as f64 + 3.0).sqrt() * x * pmm;
            table[mode_index(n, m + 1, m) * nn + j] = p1;
            for l in (m + 2)..=n {
                let idx = mode_index(n, l, m);
                let p = a[idx] * (x * p1 - b[idx] * p2);
                table[idx * nn + j] = p;
                p2 = p1;
                p1 = p;
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn index_is_dense_and_m_major() {
        let n = 6;
        let f = SpectralField::zeros(n);
        for (k, (l, m)) in f.modes().enumerate() {
            assert_eq!(mode_index(n, l, m), k);
        }
        assert_eq!(f.modes().count(), mode_count(n));
    }

    #[test]
    fn gauss_legendre_small_rules() {
        let (x, w) = gauss_legendre(1);
        assert_eq!(x, vec![0.0]);
        assert_relative_eq!(w[0], 2.0, epsilon = 1e-15);

        let (x, w) = gauss_legendre(2);
        assert_relative_eq!(x[0], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(x[1], -1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(w[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_degree_126() {
        let (x, w) = gauss_legendre(64);
        let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(126)).sum();
        let exact = 2.0 / 127.0;
        assert!(((approx - exact) / exact).abs() < 1e-13);
    }

    #[test]
    fn grid_invariants() {
        for n in [1, 2, 7, 64, 255, 512] {
            let g = QuadratureGrid::new(n, 8).unwrap();
            let s: f64 = g.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
            assert!(g.nodes().windows(2).all(|p| p[0] > p[1]));
            assert!(g.nodes().iter().all(|x| x.abs() < 1.0));
        }
        assert!(QuadratureGrid::new(4, 7).is_err());
        assert!(QuadratureGrid::new(0, 8).is_err());
    }

    #[test]
    fn capacity_rule_enforced() {
        assert!(ShtPlan::new(8, QuadratureGrid::new(16, 34).unwrap()).is_err());
        assert!(ShtPlan::new(8, QuadratureGrid::new(17, 32).unwrap()).is_err());
        assert!(ShtPlan::new(8, QuadratureGrid::new(17, 34).unwrap()).is_ok());
        assert_eq!(min_grid(127), (255, 510));
    }

    #[test]
    fn constant_mode_table() {
        let plan = ShtPlan::minimal(5);
        for j in 0..plan.grid().n_theta() {
            assert_relative_eq!(plan.legendre(0, 0, j), 1.0 / (4.0 * PI).sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn y10_closed_form() {
        let plan = ShtPlan::minimal(4);
        let mut c = SpectralField::zeros(4);
        c.set(1, 0, Complex64::new(1.0, 0.0));
        let f = plan.synthesize(&c).unwrap();
        let k = (3.0 / (4.0 * PI)).sqrt();
        for (j, x) in plan.grid().nodes().iter().enumerate() {
            for v in f.row(j) {
                assert!((v - k * x).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn y22_matches_closed_form_with_condon_shortley() {
        // Y_2^1 = -sqrt(15/8pi) sin cos e^{i phi}; real field 2 Re(Y_2^1)
        let plan = ShtPlan::minimal(3);
        let mut c = SpectralField::zeros(3);
        c.set(2, 1, Complex64::new(1.0, 0.0));
        let f = plan.synthesize(&c).unwrap();
        let g = GridField::from_fn(plan.grid(), |t, p| {
            -2.0 * (15.0 / (8.0 * PI)).sqrt() * t.sin() * t.cos() * p.cos()
        });
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_field_analysis() {
        let plan = ShtPlan::minimal(6);
        let f = GridField::from_fn(plan.grid(), |_, _| 2.5);
        let c = plan.analyze(&f).unwrap();
        assert_relative_eq!(c.get(0, 0).re, 2.5 * (4.0 * PI).sqrt(), epsilon = 1e-12);
        for (k, v) in c.coeffs().iter().enumerate().skip(1) {
            assert!(v.norm() < 1e-12, "slot {k}: {v}");
        }
    }

    #[test]
    fn unit_coefficient_round_trip() {
        let plan = ShtPlan::minimal(8);
        let mut e = SpectralField::zeros(8);
        e.set(4, 2, Complex64::new(1.0, 0.0));
        let back = plan.analyze(&plan.synthesize(&e).unwrap()).unwrap();
        for (l, m) in back.modes() {
            let v = back.get(l, m as i64);
            let want = if (l, m) == (4, 2) { 1.0 } else { 0.0 };
            assert!((v - want).norm() <= 1e-12, "({l},{m}) {v}");
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let plan = ShtPlan::minimal(5);
        let f = plan.synthesize(&SpectralField::zeros(5)).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_errors() {
        let plan = ShtPlan::minimal(5);
        assert!(matches!(
            plan.analyze(&GridField::zeros(3, 4)),
            Err(Error::GridShape { .. })
        ));
        assert!(matches!(
            plan.synthesize(&SpectralField::zeros(6)),
            Err(Error::Bandlimit { .. })
        ));
    }

    #[test]
    fn norms_respect_realness() {
        let mut c = SpectralField::zeros(3);
        c.set(2, 0, Complex64::new(1.0, 0.0));
        assert_eq!(c.norms(), (1.0, 1.0));

        let mut c = SpectralField::zeros(3);
        c.set(2, 1, Complex64::new(3.0, 0.0));
        let (l2, sup) = c.norms();
        assert_relative_eq!(l2, 18f64.sqrt(), epsilon = 1e-15);
        assert_eq!(sup, 3.0);
        assert_eq!(c.get(2, -1), Complex64::new(-3.0, 0.0));
    }

    #[test]
    fn negative_order_set_get() {
        let mut c = SpectralField::zeros(4);
        let v = Complex64::new(0.3, -0.7);
        c.set(4, -3, v);
        assert_eq!(c.get(4, -3), v);
        assert_eq!(c.get(4, 3), -v.conj());
        c.set(3, -2, v);
        assert_eq!(c.get(3, 2), v.conj());
    }

    #[test]
    fn laplacian_eigenvalues() {
        assert_eq!(laplacian_eigenvalue(0, 3.0), 0.0);
        assert_relative_eq!(laplacian_eigenvalue(10, 110f64.sqrt()), -1.0, epsilon = 1e-15);
        assert_relative_eq!(laplacian_eigenvalue(60, 3660f64.sqrt()), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn odd_ring_count_round_trip() {
        let grid = QuadratureGrid::new(13, 26).unwrap();
        let plan = ShtPlan::new(6, grid).unwrap();
        let mut c = SpectralField::zeros(6);
        c.set(5, 2, Complex64::new(0.4, 0.1));
        c.set(6, 1, Complex64::new(-0.2, 0.3));
        c.set(3, 0, Complex64::new(0.7, 0.0));
        let back = plan.analyze(&plan.synthesize(&c).unwrap()).unwrap();
        assert!(back.sub(&c).sup_norm() < 1e-13);
    }
}
