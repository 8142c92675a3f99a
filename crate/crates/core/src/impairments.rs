//! Feeder-link interference and limited CSI feedback.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::channel::ClusterLayout;
use crate::error::{Error, Result};
use crate::linalg::{identity, CMatrix, C64};

/// Coupling between the feeder links of different gateways.
///
/// Block `(i, j)` of `H_f` is the identity for `i = j` and `ρ^|i−j|·E` (all ones) when `j`
/// is one of the `num_interferers` gateways nearest to `i` by index distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeederLinkModel {
    pub rho: f64,
    pub num_interferers: usize,
}

impl FeederLinkModel {
    pub fn new(rho: f64, num_interferers: usize) -> Result<Self> {
        let m = Self { rho, num_interferers };
        m.validate()?;
        Ok(m)
    }

    pub fn ideal() -> Self {
        Self {
            rho: 0.0,
            num_interferers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.rho == 0.0 || self.num_interferers == 0
    }
}

/// Gateways interfering with gateway `i`: the `m` nearest by `|i−j|`, ties to the lower index.
pub fn interferers_of(i: usize, num_gateways: usize, m: usize) -> Vec<usize> {
    let mut others: Vec<usize> = (0..num_gateways).filter(|&j| j != i).collect();
    others.sort_by_key(|&j| (i.abs_diff(j), j));
    others.truncate(m);
    others.sort_unstable();
    others
}

pub fn feeder_matrix(model: &FeederLinkModel, layout: &ClusterLayout) -> Result<CMatrix> {
    model.validate()?;
    let g = layout.num_gateways();
    if model.num_interferers > g.saturating_sub(1) {
        return Err(Error::InvalidParameter(format!(
            "{} interferers requested but only {} other gateways exist",
            model.num_interferers,
            g - 1
        )));
    }
    let mut h = identity(layout.num_feeds());
    if model.rho == 0.0 {
        return Ok(h);
    }
    for i in 0..g {
        let rows = layout.feeds_of_gateway(i);
        for j in interferers_of(i, g, model.num_interferers) {
            let value = C64::new(model.rho.powi(i.abs_diff(j) as i32), 0.0);
            for r in rows.clone() {
                for c in layout.feeds_of_gateway(j) {
                    h[(r, c)] = value;
                }
            }
        }
    }
    Ok(h)
}

/// Composite channel `H = H_u·H_f`.
pub fn apply_feeder(h_u: &CMatrix, h_f: &CMatrix) -> Result<CMatrix> {
    if h_u.ncols() != h_f.nrows() || !h_f.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "user link is {}x{}, feeder matrix is {}x{}",
            h_u.nrows(),
            h_u.ncols(),
            h_f.nrows(),
            h_f.ncols()
        )));
    }
    Ok(h_u * h_f)
}

/// Fixed-point decimal feedback format `ddd.dddd∠aaa.aaaa` (phase in degrees).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantizerSpec {
    pub integer_digits: u32,
    pub fractional_digits: u32,
    /// Feeds reported per user.
    pub max_feeds: usize,
}

impl Default for QuantizerSpec {
    fn default() -> Self {
        Self {
            integer_digits: 3,
            fractional_digits: 4,
            max_feeds: 31,
        }
    }
}

impl QuantizerSpec {
    /// Number of quantization steps per unit.
    pub fn scale(&self) -> i64 {
        10i64.pow(self.fractional_digits)
    }

    /// Largest representable magnitude in steps (999.9999 for the default format).
    pub fn max_steps(&self) -> i64 {
        10i64.pow(self.integer_digits + self.fractional_digits) - 1
    }

    pub fn step(&self) -> f64 {
        1.0 / self.scale() as f64
    }
}

/// One reported entry: magnitude and phase as integer counts of the quantization step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantizedEntry {
    pub magnitude: i64,
    pub phase: i64,
}

/// Rounds `x ≥ 0` to `digits` decimals, half away from zero, using the shortest decimal
/// representation of `x`, and returns the result in units of `10^-digits`.
///
/// Working on the decimal digits means `0.12345` rounds up as written even though the
/// nearest double lies slightly below it.
pub fn round_decimal(x: f64, digits: u32) -> i64 {
    debug_assert!(x >= 0.0 && x.is_finite());
    let text = format!("{x}");
    let (int_part, frac_part) = text.split_once('.').unwrap_or((&text, ""));
    let d = digits as usize;
    let kept: String = frac_part.chars().chain(std::iter::repeat('0')).take(d).collect();
    let next = frac_part.as_bytes().get(d).copied().unwrap_or(b'0');
    let whole: i64 = int_part.parse::<i64>().unwrap_or(i64::MAX / 2);
    let frac: i64 = if d == 0 { 0 } else { kept.parse().unwrap_or(0) };
    let value = whole.saturating_mul(10i64.pow(digits)).saturating_add(frac);
    if next >= b'5' {
        value.saturating_add(1)
    } else {
        value
    }
}

pub fn quantize_entry(z: C64, spec: &QuantizerSpec) -> QuantizedEntry {
    let magnitude = round_decimal(z.norm(), spec.fractional_digits).min(spec.max_steps());
    let mut deg = z.arg().to_degrees();
    if deg < 0.0 {
        deg += 360.0;
    }
    let full_turn = 360 * spec.scale();
    let mut phase = round_decimal(deg.max(0.0), spec.fractional_digits);
    if phase >= full_turn {
        phase -= full_turn;
    }
    QuantizedEntry { magnitude, phase }
}

pub fn dequantize_entry(q: QuantizedEntry, spec: &QuantizerSpec) -> C64 {
    let step = spec.step();
    C64::from_polar(q.magnitude as f64 * step, (q.phase as f64 * step).to_radians())
}

/// Quantized magnitude/phase pairs of every entry, row-major.
pub fn quantize_entries(h: &CMatrix, spec: &QuantizerSpec) -> Result<Vec<QuantizedEntry>> {
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter("cannot quantize non-finite CSI".into()));
    }
    let mut out = Vec::with_capacity(h.len());
    for r in 0..h.nrows() {
        for c in 0..h.ncols() {
            out.push(quantize_entry(h[(r, c)], spec));
        }
    }
    Ok(out)
}

/// CSI as the gateway reconstructs it from the decimal feedback format.
pub fn quantize_csi(h: &CMatrix, spec: &QuantizerSpec) -> Result<CMatrix> {
    let q = quantize_entries(h, spec)?;
    let n = h.ncols();
    Ok(CMatrix::from_fn(h.nrows(), n, |r, c| dequantize_entry(q[r * n + c], spec)))
}

/// Keeps the `max_feeds` strongest entries of each row and zeroes the rest.
pub fn feed_subset_limit(h: &CMatrix, max_feeds: usize) -> Result<CMatrix> {
    if max_feeds == 0 {
        return Err(Error::InvalidParameter("max_feeds must be at least 1".into()));
    }
    let n = h.ncols();
    if n <= max_feeds {
        return Ok(h.clone());
    }
    let mut out = CMatrix::zeros(h.nrows(), n);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for r in 0..h.nrows() {
        order.clear();
        order.extend(0..n);
        order.sort_by(|&a, &b| match h[(r, b)].norm_sqr().total_cmp(&h[(r, a)].norm_sqr()) {
            Ordering::Equal => a.cmp(&b),
            o => o,
        });
        for &c in &order[..max_feeds] {
            out[(r, c)] = h[(r, c)];
        }
    }
    Ok(out)
}

/// What the precoder is given, relative to the physical channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsiImpairment {
    pub quantized: bool,
    /// Feed mask applied before quantization, when set.
    pub max_feeds: Option<usize>,
    pub spec: QuantizerSpec,
}

impl CsiImpairment {
    pub fn perfect() -> Self {
        Self {
            quantized: false,
            max_feeds: None,
            spec: QuantizerSpec::default(),
        }
    }

    pub fn is_perfect(&self) -> bool {
        !self.quantized && self.max_feeds.is_none()
    }

    pub fn apply(&self, h: &CMatrix) -> Result<CMatrix> {
        let masked = match self.max_feeds {
            Some(m) => feed_subset_limit(h, m)?,
            None => h.clone(),
        };
        if self.quantized {
            quantize_csi(&masked, &self.spec)
        } else {
            Ok(masked)
        }
    }
}
