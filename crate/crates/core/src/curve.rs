use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::measurement::{common_dim, Measurement};
use crate::trapezoid::Trapezoid;

/// The aggregate membership curve: the exact pointwise weighted sum of a
/// sample's trapezoidal membership functions.
///
/// A sum of piecewise-linear functions is piecewise linear on the union of
/// their breakpoints, so the curve is stored as that merged breakpoint grid
/// with exact values — never a sampled approximation. Zero-error
/// measurements degenerate to point masses and are tracked separately as
/// `(location, weight)` spikes so the mode-degeneration case stays exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    spikes: Vec<(f64, f64)>,
}

/// Global maximum of a curve: its height and the maximal intervals
/// (possibly degenerate points) where it is attained.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgMax {
    pub height: f64,
    pub zones: Vec<Interval>,
}

/// How an aggregate curve is scaled after summation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Raw weighted sum (depth semantics).
    None,
    /// Divide by total weight, so the peak reads as a fraction of the sample.
    Weight,
    /// Divide by the integral, giving a probability density.
    Area,
}

impl Curve {
    pub fn empty() -> Curve {
        Curve {
            breakpoints: Vec::new(),
            values: Vec::new(),
            spikes: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty() && self.spikes.is_empty()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Point masses from zero-error measurements, sorted by location.
    pub fn spikes(&self) -> &[(f64, f64)] {
        &self.spikes
    }

    /// Curve value at `x`, including any spike sitting exactly there.
    pub fn evaluate(&self, x: f64) -> f64 {
        let mut v = self.evaluate_linear(x);
        if let Ok(i) = self.spikes.binary_search_by(|(loc, _)| loc.total_cmp(&x)) {
            v += self.spikes[i].1;
        }
        v
    }

    /// The piecewise-linear part only, spikes excluded.
    pub fn evaluate_linear(&self, x: f64) -> f64 {
        match self.breakpoints.binary_search_by(|b| b.total_cmp(&x)) {
            Ok(i) => self.values[i],
            Err(i) => {
                if i == 0 || i == self.breakpoints.len() {
                    0.0
                } else {
                    let (b0, b1) = (self.breakpoints[i - 1], self.breakpoints[i]);
                    let (v0, v1) = (self.values[i - 1], self.values[i]);
                    v0 + (v1 - v0) * (x - b0) / (b1 - b0)
                }
            }
        }
    }

    /// Exact integral of the linear part (spikes carry no area).
    pub fn integral(&self) -> f64 {
        let mut area = 0.0;
        for i in 1..self.breakpoints.len() {
            let width = self.breakpoints[i] - self.breakpoints[i - 1];
            area += 0.5 * (self.values[i] + self.values[i - 1]) * width;
        }
        area
    }

    pub fn scaled(&self, factor: f64) -> Curve {
        Curve {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
            spikes: self.spikes.iter().map(|&(x, w)| (x, w * factor)).collect(),
        }
    }

    pub fn translated(&self, delta: f64) -> Curve {
        Curve {
            breakpoints: self.breakpoints.iter().map(|b| b + delta).collect(),
            values: self.values.clone(),
            spikes: self.spikes.iter().map(|&(x, w)| (x + delta, w)).collect(),
        }
    }

    /// Global maximum height and the maximal intervals attaining it, in
    /// increasing order, merged when touching.
    ///
    /// Linear pieces attain their extrema at breakpoints, so maximal runs of
    /// breakpoints at the peak value describe the flat tops exactly; a spike
    /// contributes its own height (underlying linear value + spike weight) as
    /// a degenerate zone.
    pub fn argmax_zones(&self) -> Result<ArgMax> {
        if self.is_empty() {
            return Err(Error::invalid("cannot take the argmax of an empty curve"));
        }
        let mut height = f64::NEG_INFINITY;
        for &v in &self.values {
            height = height.max(v);
        }
        for &(loc, w) in &self.spikes {
            height = height.max(self.evaluate_linear(loc) + w);
        }

        let mut zones: Vec<Interval> = Vec::new();
        let mut i = 0;
        while i < self.values.len() {
            if self.values[i] == height {
                let start = i;
                while i + 1 < self.values.len() && self.values[i + 1] == height {
                    i += 1;
                }
                zones.push(Interval::new(self.breakpoints[start], self.breakpoints[i])?);
            }
            i += 1;
        }
        for &(loc, w) in &self.spikes {
            if self.evaluate_linear(loc) + w == height {
                zones.push(Interval::point(loc)?);
            }
        }

        zones.sort_by(|a, b| a.lex_cmp(b));
        let mut merged: Vec<Interval> = Vec::new();
        for z in zones {
            match merged.last_mut() {
                Some(last) if last.hi() >= z.lo() => {
                    *last = Interval::new(last.lo(), last.hi().max(z.hi()))?;
                }
                _ => merged.push(z),
            }
        }
        Ok(ArgMax {
            height,
            zones: merged,
        })
    }
}

/// Builds the aggregate membership curve of a one-dimensional sample.
pub fn build_curve(measurements: &[Measurement]) -> Result<Curve> {
    build_curve_with(measurements, None, Normalization::None)
}

/// As [`build_curve`], with an optional ramp-width override and a
/// normalization mode.
pub fn build_curve_with(
    measurements: &[Measurement],
    ramp_override: Option<f64>,
    normalization: Normalization,
) -> Result<Curve> {
    let d = common_dim(measurements)?;
    if d != 1 {
        return Err(Error::invalid(format!(
            "aggregation is one-dimensional; measurements have d = {d}"
        )));
    }
    if let Some(r) = ramp_override {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::invalid(format!(
                "ramp width must be finite and non-negative, got {r}"
            )));
        }
    }

    let mut trapezoids: Vec<(Trapezoid, f64)> = Vec::new();
    let mut spike_points: Vec<(f64, f64)> = Vec::new();
    for m in measurements {
        let value = m.value(0);
        let error = m.error(0);
        let ramp = ramp_override.unwrap_or(error);
        if error == 0.0 && ramp == 0.0 {
            spike_points.push((value, m.weight()));
            continue;
        }
        if ramp == 0.0 {
            return Err(Error::invalid(format!(
                "measurement {:?}: a zero ramp with a positive error makes a step \
                 function, which is not piecewise linear; use ramp > 0 or error = 0",
                m.id()
            )));
        }
        trapezoids.push((Trapezoid::with_ramp(value, error, ramp)?, m.weight()));
    }

    let mut breakpoints: Vec<f64> = trapezoids
        .iter()
        .flat_map(|(t, _)| t.breakpoints())
        .collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();

    let values: Vec<f64> = breakpoints
        .iter()
        .map(|&b| trapezoids.iter().map(|(t, w)| w * t.membership(b)).sum())
        .collect();

    spike_points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut spikes: Vec<(f64, f64)> = Vec::new();
    for (loc, w) in spike_points {
        match spikes.last_mut() {
            Some((last_loc, last_w)) if *last_loc == loc => *last_w += w,
            _ => spikes.push((loc, w)),
        }
    }

    let curve = Curve {
        breakpoints,
        values,
        spikes,
    };
    match normalization {
        Normalization::None => Ok(curve),
        Normalization::Weight => {
            let total: f64 = measurements.iter().map(|m| m.weight()).sum();
            Ok(curve.scaled(1.0 / total))
        }
        Normalization::Area => {
            let area = curve.integral();
            if area <= 0.0 {
                return Err(Error::invalid(
                    "curve has zero area (only point masses); cannot normalize to a density",
                ));
            }
            Ok(curve.scaled(1.0 / area))
        }
    }
}

/// A histogram request: bin count plus an optional explicit range
/// (defaults to the data min/max).
#[derive(Debug, Clone, Copy)]
pub struct HistogramSpec {
    pub bins: usize,
    pub range: Option<Interval>,
}

/// Uniform-width histogram with left-closed right-open bins; the last bin is
/// closed so `range.hi` is counted.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bin(&self, i: usize) -> Result<Interval> {
        Interval::new(self.edges[i], self.edges[i + 1])
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Density estimate per bin: count / (total · bin width).
    pub fn density(&self) -> Vec<f64> {
        let n = self.total() as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let width = self.edges[i + 1] - self.edges[i];
                if width > 0.0 && n > 0.0 {
                    c as f64 / (n * width)
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Density of the bin containing `x`, 0 outside the range.
    pub fn density_at(&self, x: f64) -> f64 {
        let lo = self.edges[0];
        let hi = *self.edges.last().unwrap();
        if x < lo || x > hi {
            return 0.0;
        }
        let density = self.density();
        let k = self.counts.len();
        let idx = bin_index(x, lo, hi, k);
        density[idx]
    }
}

fn bin_index(x: f64, lo: f64, hi: f64, bins: usize) -> usize {
    if hi <= lo {
        return bins - 1;
    }
    let raw = ((x - lo) / (hi - lo) * bins as f64).floor();
    (raw as usize).min(bins - 1)
}

pub fn histogram(values: &[f64], spec: &HistogramSpec) -> Result<Histogram> {
    if spec.bins == 0 {
        return Err(Error::invalid("histogram needs at least one bin"));
    }
    if values.is_empty() {
        return Err(Error::invalid("histogram needs a non-empty sample"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("histogram values must be finite"));
    }
    let range = match spec.range {
        Some(r) => r,
        None => {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Interval::new(lo, hi)?
        }
    };
    let (lo, hi) = (range.lo(), range.hi());
    let mut edges = Vec::with_capacity(spec.bins + 1);
    for i in 0..=spec.bins {
        let edge = if i == spec.bins {
            hi
        } else {
            lo + (hi - lo) * i as f64 / spec.bins as f64
        };
        edges.push(edge);
    }
    let mut counts = vec![0u64; spec.bins];
    for &x in values {
        if x < lo || x > hi {
            continue;
        }
        counts[bin_index(x, lo, hi, spec.bins)] += 1;
    }
    Ok(Histogram { edges, counts })
}

/// One observation of a counted quantity at a (fuzzy) time coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesPoint {
    pub t: f64,
    pub count: f64,
}

/// Smooths a counted time series by treating each time stamp as a fuzzy
/// number with error `time_error` and the count as its weight.
pub fn smooth_timeseries(points: &[TimeSeriesPoint], time_error: f64) -> Result<Curve> {
    if !time_error.is_finite() || time_error < 0.0 {
        return Err(Error::invalid(format!(
            "time error must be finite and non-negative, got {time_error}"
        )));
    }
    let mut stamps: Vec<f64> = points.iter().map(|p| p.t).collect();
    stamps.sort_by(f64::total_cmp);
    for pair in stamps.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::invalid(format!(
                "duplicate time stamp {}",
                pair[0]
            )));
        }
    }
    let mut measurements = Vec::new();
    for p in points {
        if !p.t.is_finite() || !p.count.is_finite() || p.count < 0.0 {
            return Err(Error::invalid(format!(
                "time-series point ({}, {}) must be finite with count >= 0",
                p.t, p.count
            )));
        }
        if p.count > 0.0 {
            measurements.push(Measurement::new(
                format!("t={}", p.t),
                vec![p.t],
                vec![time_error],
                p.count,
            )?);
        }
    }
    if measurements.is_empty() {
        return Ok(Curve::empty());
    }
    build_curve(&measurements)
}
