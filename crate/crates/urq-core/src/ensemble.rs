//! Randomized measurement ensembles: `y = Phi x + w`, `q = Q(y / delta)`.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quantizer::{quantize_scalar, QuantizedCode, MAX_BITS};
use crate::rng::{substream, STREAM_DITHER, STREAM_PHI};
use crate::signal::Signal;

/// Precision parameter(s) of the quantizer.
///
/// The analysis uses a single precision for every measurement; the
/// per-measurement variant exists for completeness of the acquisition model
/// and is accepted by `measure`/`quantize` only.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaSpec {
    Uniform(f64),
    PerMeasurement(Vec<f64>),
}

impl DeltaSpec {
    fn validate(&self, m: usize) -> Result<()> {
        match self {
            DeltaSpec::Uniform(d) => {
                if !(d.is_finite() && *d > 0.0) {
                    return Err(Error::parameter("delta must be positive and finite"));
                }
            }
            DeltaSpec::PerMeasurement(ds) => {
                if ds.len() != m {
                    return Err(Error::dimension(format!(
                        "expected {m} precision entries, got {}",
                        ds.len()
                    )));
                }
                if ds.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                    return Err(Error::parameter("every delta must be positive and finite"));
                }
            }
        }
        Ok(())
    }

    fn at(&self, index: usize) -> f64 {
        match self {
            DeltaSpec::Uniform(d) => *d,
            DeltaSpec::PerMeasurement(ds) => ds[index],
        }
    }
}

/// The randomized acquisition system: measurement matrix, dither, precision,
/// bit depth, and the seed the randomness was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEnsemble {
    rows: usize,
    dim: usize,
    phi: Vec<f64>, // row-major rows x dim
    dither: Vec<f64>,
    deltas: DeltaSpec,
    bits: u32,
    sigma: f64,
    seed: Option<u64>,
}

impl MeasurementEnsemble {
    /// Draw an ensemble with `rows x dim` i.i.d. Normal(0, sigma^2) matrix
    /// entries and dither i.i.d. uniform on `[0, delta]`, both deterministic
    /// functions of `seed`.
    ///
    /// Matrix entries and dither come from two independent substreams of the
    /// seed, filled row by row, so generating with a larger `rows` extends the
    /// ensemble without reshuffling the existing rows.
    pub fn generate(
        rows: usize,
        dim: usize,
        sigma: f64,
        delta: f64,
        bits: u32,
        seed: u64,
    ) -> Result<Self> {
        if rows == 0 || dim == 0 {
            return Err(Error::parameter("rows and dim must be at least 1"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::parameter("sigma must be positive and finite"));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::parameter("delta must be positive and finite"));
        }
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::parameter(format!(
                "bit depth must be in 1..={MAX_BITS}, got {bits}"
            )));
        }
        let entries = rows
            .checked_mul(dim)
            .ok_or_else(|| Error::parameter("rows * dim overflows"))?;
        let mut phi_rng = substream(seed, STREAM_PHI);
        let mut dither_rng = substream(seed, STREAM_DITHER);
        let mut phi = Vec::with_capacity(entries);
        for _ in 0..entries {
            let z: f64 = phi_rng.sample(StandardNormal);
            phi.push(sigma * z);
        }
        let dither: Vec<f64> = (0..rows).map(|_| dither_rng.random::<f64>() * delta).collect();
        Ok(MeasurementEnsemble {
            rows,
            dim,
            phi,
            dither,
            deltas: DeltaSpec::Uniform(delta),
            bits,
            sigma,
            seed: Some(seed),
        })
    }

    /// Assemble an ensemble from explicit parts. `phi` is row-major with
    /// `rows * dim` entries; every dither entry must lie in `[0, delta_m]`.
    ///
    /// Ensembles built this way carry no seed and cannot be serialized.
    pub fn from_parts(
        rows: usize,
        dim: usize,
        phi: Vec<f64>,
        dither: Vec<f64>,
        deltas: DeltaSpec,
        bits: u32,
        sigma: f64,
    ) -> Result<Self> {
        if rows == 0 || dim == 0 {
            return Err(Error::parameter("rows and dim must be at least 1"));
        }
        if phi.len() != rows * dim {
            return Err(Error::dimension(format!(
                "expected {} matrix entries, got {}",
                rows * dim,
                phi.len()
            )));
        }
        if dither.len() != rows {
            return Err(Error::dimension(format!(
                "expected {rows} dither entries, got {}",
                dither.len()
            )));
        }
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::parameter(format!(
                "bit depth must be in 1..={MAX_BITS}, got {bits}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::parameter("sigma must be positive and finite"));
        }
        deltas.validate(rows)?;
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        for (m, w) in dither.iter().enumerate() {
            let d = deltas.at(m);
            if !(*w >= 0.0 && *w <= d) {
                return Err(Error::parameter(format!(
                    "dither entry {m} = {w} outside [0, {d}]"
                )));
            }
        }
        Ok(MeasurementEnsemble {
            rows,
            dim,
            phi,
            dither,
            deltas,
            bits,
            sigma,
            seed: None,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn deltas(&self) -> &DeltaSpec {
        &self.deltas
    }

    /// The single precision parameter, if uniform.
    pub fn uniform_delta(&self) -> Option<f64> {
        match self.deltas {
            DeltaSpec::Uniform(d) => Some(d),
            DeltaSpec::PerMeasurement(_) => None,
        }
    }

    /// Row `m` of the measurement matrix.
    pub fn row(&self, m: usize) -> &[f64] {
        &self.phi[m * self.dim..(m + 1) * self.dim]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.phi
    }

    pub fn dither(&self) -> &[f64] {
        &self.dither
    }

    /// Dithered measurements `y_m = <x, phi_m> + w_m`.
    pub fn measure(&self, x: &Signal) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::dimension(format!(
                "signal length {} does not match ensemble dimension {}",
                x.len(),
                self.dim
            )));
        }
        let xs = x.values();
        let mut out = Vec::with_capacity(self.rows);
        for m in 0..self.rows {
            let row = self.row(m);
            let dot: f64 = row.iter().zip(xs).map(|(a, b)| a * b).sum();
            out.push(dot + self.dither[m]);
        }
        Ok(out)
    }

    /// Quantize a signal: `q_m = Q(y_m / delta_m)`.
    pub fn quantize(&self, x: &Signal) -> Result<QuantizedCode> {
        self.quantize_prefix(x, self.rows)
    }

    /// Quantize against the leading `rows` measurements only. With the
    /// row-major seeding discipline this is exactly the code a smaller
    /// ensemble from the same seed would produce.
    pub fn quantize_prefix(&self, x: &Signal, rows: usize) -> Result<QuantizedCode> {
        if rows > self.rows {
            return Err(Error::dimension(format!(
                "requested {rows} rows from an ensemble with {}",
                self.rows
            )));
        }
        if x.len() != self.dim {
            return Err(Error::dimension(format!(
                "signal length {} does not match ensemble dimension {}",
                x.len(),
                self.dim
            )));
        }
        let xs = x.values();
        let mut symbols = Vec::with_capacity(rows);
        for m in 0..rows {
            let row = self.row(m);
            let dot: f64 = row.iter().zip(xs).map(|(a, b)| a * b).sum();
            let y = dot + self.dither[m];
            symbols.push(quantize_scalar(y / self.deltas.at(m), self.bits)?);
        }
        QuantizedCode::new(symbols, self.bits)
    }

    /// Serialize the generating parameters (not the matrix) as a small text
    /// file; see `to_config_string` for the format.
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = self.to_config_string()?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// The serialized form: a version line followed by `key = value` pairs
    /// for (rows, dim, sigma, delta, bits, seed). The matrix is regenerated
    /// from the seed on load, so the file stays a few lines long regardless
    /// of the ensemble size.
    pub fn to_config_string(&self) -> Result<String> {
        let seed = self.seed.ok_or_else(|| {
            Error::Unsupported("only seed-generated ensembles can be serialized".into())
        })?;
        let delta = self.uniform_delta().ok_or_else(|| {
            Error::Unsupported("per-measurement precisions cannot be serialized".into())
        })?;
        let mut s = String::new();
        let _ = writeln!(s, "urq-ensemble v1");
        let _ = writeln!(s, "rows = {}", self.rows);
        let _ = writeln!(s, "dim = {}", self.dim);
        let _ = writeln!(s, "sigma = {:.16e}", self.sigma);
        let _ = writeln!(s, "delta = {:.16e}", delta);
        let _ = writeln!(s, "bits = {}", self.bits);
        let _ = writeln!(s, "seed = {}", seed);
        Ok(s)
    }

    /// Load an ensemble saved by [`MeasurementEnsemble::save`], regenerating
    /// the matrix and dither from the stored seed.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_string(&text)
    }

    pub fn from_config_string(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("urq-ensemble v1") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header 'urq-ensemble v1', got {other:?}"
                )))
            }
        }
        let mut rows = None;
        let mut dim = None;
        let mut sigma = None;
        let mut delta = None;
        let mut bits = None;
        let mut seed = None;
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected 'key = value', got '{line}'")))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "rows" => rows = Some(parse_num::<usize>(key, value)?),
                "dim" => dim = Some(parse_num::<usize>(key, value)?),
                "sigma" => sigma = Some(parse_num::<f64>(key, value)?),
                "delta" => delta = Some(parse_num::<f64>(key, value)?),
                "bits" => bits = Some(parse_num::<u32>(key, value)?),
                "seed" => seed = Some(parse_num::<u64>(key, value)?),
                other => return Err(Error::Parse(format!("unknown key '{other}'"))),
            }
        }
        let missing = |name: &str| Error::Parse(format!("missing key '{name}'"));
        Self::generate(
            rows.ok_or_else(|| missing("rows"))?,
            dim.ok_or_else(|| missing("dim"))?,
            sigma.ok_or_else(|| missing("sigma"))?,
            delta.ok_or_else(|| missing("delta"))?,
            bits.ok_or_else(|| missing("bits"))?,
            seed.ok_or_else(|| missing("seed"))?,
        )
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Parse(format!("invalid value '{value}' for key '{key}'")))
}
