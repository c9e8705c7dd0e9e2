//! Nonnegative functions sampled at the cell centers of a uniform grid.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::functionals::YoungFunction;
use crate::measure::{DistFn, Provenance};

/// Default number of threshold levels between 0 and the maximum value.
pub const DEFAULT_LEVELS: usize = 512;

/// Relative size below which a boundary value counts as zero.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    /// `[-half_width, half_width]^n`.
    pub fn cube(n: usize, half_width: f64) -> Self {
        Self {
            lo: vec![-half_width; n],
            hi: vec![half_width; n],
        }
    }
}

/// Header of the binary field format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub n: usize,
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub dims: Vec<usize>,
}

/// A nonnegative function sampled on a uniform grid of cubic cells.
///
/// `origin` is the lower corner of the grid; cell `i` along an axis has its
/// center at `origin + (i + 1/2) h`. Values are stored row-major with the
/// last axis fastest. The outermost layer of cells is zero, which stands in
/// for "vanishes at infinity": no level set reaches the edge of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    dims: Vec<usize>,
    origin: Vec<f64>,
    spacing: f64,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(dims: Vec<usize>, origin: Vec<f64>, spacing: f64, values: Vec<f64>) -> Result<Self> {
        let n = dims.len();
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n, "1, 2 or 3"));
        }
        if origin.len() != n {
            return Err(invalid("origin length must match the number of axes"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(invalid(format!("spacing must be positive, got {spacing}")));
        }
        if dims.iter().any(|&d| d < 3) {
            return Err(invalid("every axis needs at least 3 cells"));
        }
        let len: usize = dims.iter().product();
        if values.len() != len {
            return Err(invalid(format!(
                "expected {len} values, got {}",
                values.len()
            )));
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidSample { index, value });
        }
        let field = Self {
            dims,
            origin,
            spacing,
            values,
        };
        field.check_boundary()?;
        Ok(field)
    }

    /// Samples `f` at cell centers of `domain` with `resolution` cells along
    /// the longest axis.
    pub fn from_function<F>(f: F, domain: &Domain, resolution: usize) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let n = domain.lo.len();
        if domain.hi.len() != n {
            return Err(invalid("domain corners differ in dimension"));
        }
        if resolution < 8 {
            return Err(invalid("resolution must be at least 8 cells per axis"));
        }
        let widths: Vec<f64> = domain
            .lo
            .iter()
            .zip(&domain.hi)
            .map(|(l, h)| h - l)
            .collect();
        if widths.iter().any(|w| !(*w > 0.0)) {
            return Err(invalid("domain must have positive extent"));
        }
        let longest = widths.iter().cloned().fold(0.0, f64::max);
        let spacing = longest / resolution as f64;
        let dims: Vec<usize> = widths
            .iter()
            .map(|w| ((w / spacing).round() as usize).max(8))
            .collect();
        let len: usize = dims.iter().product();
        let mut values = Vec::with_capacity(len);
        let mut point = vec![0.0; n];
        let mut idx = vec![0usize; n];
        for _ in 0..len {
            for a in 0..n {
                point[a] = domain.lo[a] + (idx[a] as f64 + 0.5) * spacing;
            }
            values.push(f(&point));
            increment(&mut idx, &dims);
        }
        Self::new(dims, domain.lo.clone(), spacing, values)
    }

    fn check_boundary(&self) -> Result<()> {
        let max = self.max_value();
        let tol = BOUNDARY_TOL * max;
        let mut idx = vec![0usize; self.n()];
        for (k, &v) in self.values.iter().enumerate() {
            if v > tol && self.is_boundary(&idx) {
                return Err(Error::SupportTouchesBoundary { index: k, value: v });
            }
            increment(&mut idx, &self.dims);
        }
        Ok(())
    }

    fn is_boundary(&self, idx: &[usize]) -> bool {
        idx.iter()
            .zip(&self.dims)
            .any(|(&i, &d)| i == 0 || i + 1 == d)
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.n() as i32)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Same grid geometry, new values (no validation of the boundary layer).
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            dims: self.dims.clone(),
            origin: self.origin.clone(),
            spacing: self.spacing,
            values,
        }
    }

    pub(crate) fn from_parts_unchecked(
        dims: Vec<usize>,
        origin: Vec<f64>,
        spacing: f64,
        values: Vec<f64>,
    ) -> Self {
        Self {
            dims,
            origin,
            spacing,
            values,
        }
    }

    pub fn strides(&self) -> Vec<usize> {
        let n = self.n();
        let mut s = vec![1usize; n];
        for a in (0..n.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.dims[a + 1];
        }
        s
    }

    /// Multi-index of a flat cell index.
    pub fn unflatten(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n()];
        for a in (0..self.n()).rev() {
            idx[a] = k % self.dims[a];
            k /= self.dims[a];
        }
        idx
    }

    /// Center of a flat cell index.
    pub fn cell_center(&self, k: usize) -> Vec<f64> {
        self.unflatten(k)
            .iter()
            .zip(&self.origin)
            .map(|(&i, &o)| o + (i as f64 + 0.5) * self.spacing)
            .collect()
    }

    /// Centers of all cells, in storage order.
    pub fn cell_centers(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.cell_center(k)).collect()
    }

    /// `(sum values^q h^n)^{1/q}`.
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        if !(q >= 1.0) {
            return Err(invalid(format!("q must be >= 1, got {q}")));
        }
        let s: f64 = self.values.iter().map(|v| v.powf(q)).sum();
        Ok((s * self.cell_volume()).powf(1.0 / q))
    }

    /// Finite-difference gradient at every cell.
    ///
    /// Centered differences in the interior of the support; where one
    /// neighbor along an axis is outside the support (value 0) the one-sided
    /// difference toward the inside is used. Cells with value 0 get a zero
    /// gradient.
    pub fn gradients(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let strides = self.strides();
        let h = self.spacing;
        let v = &self.values;
        (0..self.len())
            .map(|k| {
                let mut g = vec![0.0; n];
                if v[k] == 0.0 {
                    return g;
                }
                let idx = self.unflatten(k);
                for a in 0..n {
                    let s = strides[a];
                    let lo = if idx[a] > 0 { Some(v[k - s]) } else { None };
                    let hi = if idx[a] + 1 < self.dims[a] {
                        Some(v[k + s])
                    } else {
                        None
                    };
                    g[a] = match (lo, hi) {
                        (Some(l), Some(u)) if l > 0.0 && u > 0.0 => (u - l) / (2.0 * h),
                        (Some(l), Some(u)) if l > 0.0 && u == 0.0 => (v[k] - l) / h,
                        (Some(l), Some(u)) if l == 0.0 && u > 0.0 => (u - v[k]) / h,
                        (Some(l), Some(u)) => (u - l) / (2.0 * h),
                        (None, Some(u)) => (u - v[k]) / h,
                        (Some(l), None) => (v[k] - l) / h,
                        (None, None) => 0.0,
                    };
                }
                g
            })
            .collect()
    }

    pub fn gradient_magnitudes(&self) -> Vec<f64> {
        self.gradients()
            .iter()
            .map(|g| g.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    }

    /// `L^p` norm of the finite-difference gradient magnitude.
    pub fn gradient_norm_lp(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(invalid(format!("p must be in [1, inf), got {p}")));
        }
        let s: f64 = self.gradient_magnitudes().iter().map(|g| g.powf(p)).sum();
        Ok((s * self.cell_volume()).powf(1.0 / p))
    }

    /// `max / levels * i` for `i = 0..=levels`.
    pub fn default_thresholds(&self, levels: usize) -> Vec<f64> {
        let max = self.max_value();
        let levels = levels.max(1);
        (0..=levels)
            .map(|i| max * i as f64 / levels as f64)
            .collect()
    }

    /// `F(t) = lambda_n({u > t})` at each threshold, from cell counts.
    pub fn distribution_function(&self, thresholds: &[f64]) -> Result<DistFn> {
        if thresholds.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("thresholds must be strictly increasing"));
        }
        if thresholds.iter().any(|t| !(*t >= 0.0)) {
            return Err(invalid("thresholds must be nonnegative"));
        }
        let mut sorted = self.values.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let vol = self.cell_volume();
        let len = sorted.len();
        let values = thresholds
            .iter()
            .map(|&t| {
                let below = sorted.partition_point(|&v| v <= t);
                (len - below) as f64 * vol
            })
            .collect();
        let max = self.max_value();
        let top_cells = if max > 0.0 {
            sorted.iter().rev().take_while(|&&v| v == max).count()
        } else {
            0
        };
        Ok(DistFn {
            n: self.n(),
            thresholds: thresholds.to_vec(),
            values,
            provenance: Provenance::Empirical {
                ess_sup: max,
                top_plateau_mass: top_cells as f64 * vol,
                top_plateau_cells: top_cells,
            },
        })
    }

    /// `int Psi(u)` directly and by layer-cake quadrature over `levels` thresholds.
    pub fn psi_integral(&self, psi: &YoungFunction, levels: usize) -> Result<LayerCake> {
        let direct: f64 =
            self.values.iter().map(|&v| psi.value(v)).sum::<f64>() * self.cell_volume();
        if self.max_value() <= 0.0 {
            return Ok(LayerCake {
                direct,
                layer_cake: 0.0,
                tolerance: LAYER_CAKE_TOL,
            });
        }
        let thresholds = self.default_thresholds(levels);
        let dist = self.distribution_function(&thresholds)?;
        // Trapezoid in F against the exact increments of Psi.
        let layer_cake: f64 = thresholds
            .windows(2)
            .zip(dist.values.windows(2))
            .map(|(t, f)| 0.5 * (f[0] + f[1]) * (psi.value(t[1]) - psi.value(t[0])))
            .sum();
        let tolerance = LAYER_CAKE_TOL;
        let scale = direct.abs().max(layer_cake.abs());
        if (direct - layer_cake).abs() > tolerance * scale + 1e-300 {
            return Err(Error::LayerCakeMismatch { direct, layer_cake });
        }
        Ok(LayerCake {
            direct,
            layer_cake,
            tolerance,
        })
    }

    /// Writes the JSON header line followed by little-endian `f64` values.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let header = FieldHeader {
            n: self.n(),
            origin: self.origin.clone(),
            spacing: self.spacing,
            dims: self.dims.clone(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: R) -> Result<Self> {
        let mut reader = BufReader::new(r);
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let header: FieldHeader = serde_json::from_str(line.trim_end())?;
        if header.dims.len() != header.n {
            return Err(invalid("header dims do not match n"));
        }
        let len: usize = header.dims.iter().product();
        let mut bytes = vec![0u8; len * 8];
        reader.read_exact(&mut bytes)?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Self::new(header.dims, header.origin, header.spacing, values)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_binary(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_binary(std::fs::File::open(path)?)
    }

    /// CSV import for 1D (one value per line, or one row) and 2D (one grid
    /// row per line). Blank lines and lines starting with `#` are skipped.
    pub fn from_csv<R: Read>(r: R, origin: Vec<f64>, spacing: f64) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| invalid(format!("line {}: {e}", lineno + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(invalid("empty CSV"));
        }
        match origin.len() {
            1 => {
                let values: Vec<f64> = rows.into_iter().flatten().collect();
                Self::new(vec![values.len()], origin, spacing, values)
            }
            2 => {
                let cols = rows[0].len();
                if rows.iter().any(|r| r.len() != cols) {
                    return Err(invalid("ragged CSV rows"));
                }
                let dims = vec![rows.len(), cols];
                Self::new(dims, origin, spacing, rows.into_iter().flatten().collect())
            }
            n => Err(Error::UnsupportedDimension(n, "1 or 2 for CSV")),
        }
    }
}

/// Declared relative tolerance between direct and layer-cake integrals.
pub const LAYER_CAKE_TOL: f64 = 5e-3;

/// Both evaluations of `int Psi(u) dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerCake {
    pub direct: f64,
    pub layer_cake: f64,
    pub tolerance: f64,
}

pub(crate) fn increment(idx: &mut [usize], dims: &[usize]) {
    for a in (0..idx.len()).rev() {
        idx[a] += 1;
        if idx[a] < dims[a] {
            return;
        }
        idx[a] = 0;
    }
}
