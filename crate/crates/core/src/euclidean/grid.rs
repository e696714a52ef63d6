//! Uniform periodic grids on `[−L, L)ⁿ` with a continuous-normalized FFT.
//!
//! Samples sit at `x_k = −L + kΔ`, `Δ = 2L/M`. The transform approximates
//! `f̂(y) = ∫ f(x) e^{∓2πi⟨x,y⟩} dx` on the dual grid with half-width `M/(4L)`:
//! the minus sign goes from space to frequency, the plus sign back. With
//! these weights the two directions are exact inverses of each other and
//! Parseval holds with the grid measures `Δⁿ` and `Δ_yⁿ`.

use crate::{par, Complex64, Error, Result};
use rustfft::FftPlanner;
use serde::Serialize;

/// Which variable the samples are a function of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Domain {
    Space,
    Frequency,
}

impl Domain {
    pub fn dual(self) -> Self {
        match self {
            Domain::Space => Domain::Frequency,
            Domain::Frequency => Domain::Space,
        }
    }
}

/// Largest grid accepted, in total points.
pub const MAX_POINTS: usize = 1 << 24;

/// Shape of a grid without its samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub n: usize,
    pub m: usize,
    pub half_width: f64,
}

impl GridSpec {
    pub fn new(n: usize, m: usize, half_width: f64) -> Result<Self> {
        if n == 0 || n > 3 {
            return Err(Error::Dimension(format!("grids need 1 ≤ n ≤ 3, got {n}")));
        }
        if m < 4 || !m.is_power_of_two() {
            return Err(Error::Grid(format!("points per axis must be a power of two ≥ 4, got {m}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Grid(format!("box half-width must be positive, got {half_width}")));
        }
        match m.checked_pow(n as u32) {
            Some(t) if t <= MAX_POINTS => {}
            _ => return Err(Error::CostGuard(format!("{m}^{n} grid points exceed {MAX_POINTS}"))),
        }
        Ok(GridSpec { n, m, half_width })
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.m as f64
    }

    pub fn coord(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.spacing()
    }

    /// The grid the transform lands on.
    pub fn dual(&self) -> GridSpec {
        GridSpec { n: self.n, m: self.m, half_width: self.m as f64 / (4.0 * self.half_width) }
    }

    /// Coordinates of the flat index `idx` (axis 0 varies slowest).
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let mut p = [0.0; 3];
        let mut rest = idx;
        for a in (0..self.n).rev() {
            p[a] = self.coord(rest % self.m);
            rest /= self.m;
        }
        p
    }

    pub fn radius(&self, idx: usize) -> f64 {
        let p = self.point(idx);
        p[..self.n].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Flat index of the origin.
    pub fn origin(&self) -> usize {
        (0..self.n).fold(0, |acc, _| acc * self.m + self.m / 2)
    }

    /// Grid measure of one cell.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }
}

/// Complex samples on a [`GridSpec`].
#[derive(Debug, Clone)]
pub struct GridFunction {
    spec: GridSpec,
    domain: Domain,
    data: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(spec: GridSpec, domain: Domain) -> Self {
        GridFunction { spec, domain, data: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(spec: GridSpec, domain: Domain, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync + Send,
    {
        let data = par::map_range(spec.len(), |i| {
            let p = spec.point(i);
            f(&p[..spec.n])
        });
        GridFunction { spec, domain, data }
    }

    pub fn from_samples(spec: GridSpec, domain: Domain, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != spec.len() {
            return Err(Error::Dimension(format!("{} samples for a grid of {}", data.len(), spec.len())));
        }
        Ok(GridFunction { spec, domain, data })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.spec.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// `(Δⁿ Σ|f|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.spec.cell() * self.data.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `(Δⁿ Σ|f|^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        (self.spec.cell() * self.data.iter().map(|z| z.norm().powf(p)).sum::<f64>()).powf(1.0 / p)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Pointwise product with `w(point)`.
    pub fn multiply<F>(&self, w: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync + Send,
    {
        let spec = self.spec;
        let data = par::map_range(spec.len(), |i| {
            let p = spec.point(i);
            self.data[i] * w(&p[..spec.n])
        });
        GridFunction { spec, domain: self.domain, data }
    }

    /// Pointwise product with a function of `|point|`.
    pub fn multiply_radial<F>(&self, w: F) -> Self
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let spec = self.spec;
        let data = par::map_range(spec.len(), |i| self.data[i] * w(spec.radius(i)));
        GridFunction { spec, domain: self.domain, data }
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Sync + Send,
    {
        GridFunction { spec: self.spec, domain: self.domain, data: par::map_slice(&self.data, |z| f(*z)) }
    }

    pub fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Sync + Send,
    {
        if self.spec != other.spec {
            return Err(Error::Dimension("grid functions live on different grids".into()));
        }
        let data = par::map_range(self.data.len(), |i| f(self.data[i], other.data[i]));
        Ok(GridFunction { spec: self.spec, domain: self.domain, data })
    }

    /// Fourier transform onto the dual grid; the sign of the exponent is
    /// negative from space and positive from frequency.
    pub fn transform(&self) -> Self {
        let inverse = self.domain == Domain::Frequency;
        let mut data = self.data.clone();
        fft_all_axes(&self.spec, &mut data, inverse);
        GridFunction { spec: self.spec.dual(), domain: self.domain.dual(), data }
    }

    /// Applies the multiplier `w(|y|)` on the dual side and transforms back.
    pub fn radial_multiplier<F>(&self, w: F) -> Self
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        self.transform().multiply_radial(w).transform()
    }

    /// Multilinear interpolation at `x`; zero outside the box.
    pub fn interpolate(&self, x: &[f64]) -> Complex64 {
        let s = &self.spec;
        let h = s.spacing();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..s.n {
            let u = (x[a] + s.half_width) / h;
            if !(0.0..=(s.m - 1) as f64).contains(&u) {
                return Complex64::new(0.0, 0.0);
            }
            let k = (u.floor() as usize).min(s.m - 2);
            base[a] = k;
            frac[a] = u - k as f64;
        }
        let mut total = Complex64::new(0.0, 0.0);
        for corner in 0..(1usize << s.n) {
            let mut w = 1.0;
            let mut idx = 0;
            for a in 0..s.n {
                let bit = (corner >> a) & 1;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                idx = idx * s.m + base[a] + bit;
            }
            total += self.data[idx] * w;
        }
        total
    }
}

/// In-place transform along every axis with the continuous normalization.
fn fft_all_axes(spec: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let m = spec.m;
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(m) } else { planner.plan_fft_forward(m) };
    let h = spec.spacing();
    let lines_per_task = (1 << 14) / m + 1;
    for axis in 0..spec.n {
        let stride = m.pow((spec.n - 1 - axis) as u32);
        let lines = spec.len() / m;
        let start_of = |l: usize| (l / stride) * m * stride + l % stride;
        let mut buf = vec![Complex64::new(0.0, 0.0); spec.len()];
        {
            let src = &*data;
            let fft = &fft;
            par::for_each_chunk_mut(&mut buf, m * lines_per_task, |task, chunk| {
                let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
                for (i, line) in chunk.chunks_mut(m).enumerate() {
                    let start = start_of(task * lines_per_task + i);
                    for (k, v) in line.iter_mut().enumerate() {
                        let s = src[start + k * stride];
                        *v = if k % 2 == 0 { s } else { -s };
                    }
                    fft.process_with_scratch(line, &mut scratch);
                    // (−1)^{k + M/2} with M/2 even
                    for (k, v) in line.iter_mut().enumerate() {
                        *v *= if k % 2 == 0 { h } else { -h };
                    }
                }
            });
        }
        for l in 0..lines {
            let start = start_of(l);
            for k in 0..m {
                data[start + k * stride] = buf[l * m + k];
            }
        }
    }
}
