use std::cmp::Ordering;
use std::fmt;

use crate::curve::build_curve;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::measurement::{common_dim, Measurement};

/// Default minimum depth for declaring that a consensus exists at all.
pub const DEFAULT_MIN_DEPTH: f64 = 2.0;

/// Default membership level a measurement must reach inside a zone to count
/// as a member in fuzzy mode (1.0 = its core touches the zone).
pub const DEFAULT_MEMBERSHIP_THRESHOLD: f64 = 1.0;

/// Hard cap on grid evaluation points.
pub const GRID_POINT_LIMIT: u64 = 4_000_000;

/// An axis-aligned box: one closed interval per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    dims: Vec<Interval>,
}

impl Bounds {
    pub fn new(dims: Vec<Interval>) -> Result<Bounds> {
        if dims.is_empty() {
            return Err(Error::invalid("a box needs at least one dimension"));
        }
        Ok(Bounds { dims })
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[Interval] {
        &self.dims
    }

    pub fn interval(&self, k: usize) -> Interval {
        self.dims[k]
    }

    pub fn volume(&self) -> f64 {
        self.dims.iter().map(Interval::len).product()
    }

    pub fn centroid(&self) -> Vec<f64> {
        self.dims.iter().map(Interval::midpoint).collect()
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.dims.len() == p.len()
            && self.dims.iter().zip(p).all(|(iv, &x)| iv.contains(x))
    }

    pub fn contains(&self, other: &Bounds) -> bool {
        self.dims.len() == other.dims.len()
            && self
                .dims
                .iter()
                .zip(&other.dims)
                .all(|(a, b)| a.contains_interval(b))
    }

    pub fn intersects(&self, other: &Bounds) -> bool {
        self.dims.len() == other.dims.len()
            && self
                .dims
                .iter()
                .zip(&other.dims)
                .all(|(a, b)| a.intersects(b))
    }

    pub fn lex_cmp(&self, other: &Bounds) -> Ordering {
        for (a, b) in self.dims.iter().zip(&other.dims) {
            let ord = a.lex_cmp(b);
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.dims.len().cmp(&other.dims.len())
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

/// Outcome of a consensus computation.
///
/// `zones` are pairwise interior-disjoint, sorted lexicographically; every
/// zone attains `depth`. `members` and `outliers` partition the input ids in
/// input order. `point_estimate` is the centroid of the first largest-volume
/// zone.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusResult {
    pub depth: f64,
    pub zones: Vec<Bounds>,
    pub members: Vec<String>,
    pub outliers: Vec<String>,
    pub point_estimate: Vec<f64>,
}

/// Member/outlier partition after applying the minimum-depth guard.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub consistent: Vec<String>,
    pub erroneous: Vec<String>,
    pub no_consensus: bool,
}

/// Depth semantics for the grid evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthMode {
    Crisp,
    Fuzzy,
}

fn integer_weight(m: &Measurement) -> Result<u64> {
    let w = m.weight();
    if w.fract() != 0.0 || w < 1.0 || w > (1u64 << 53) as f64 {
        return Err(Error::invalid(format!(
            "crisp mode needs positive integer weights; measurement {:?} has weight {w}",
            m.id()
        )));
    }
    Ok(w as u64)
}

fn core_bounds(m: &Measurement) -> Result<Bounds> {
    let dims = (0..m.dim()).map(|k| m.core(k)).collect::<Result<_>>()?;
    Bounds::new(dims)
}

/// Depth of weighted closed intervals along one axis, split into the depth
/// at each distinct endpoint and on each open segment between endpoints.
struct DepthProfile {
    coords: Vec<f64>,
    point: Vec<u64>,
    open: Vec<u64>,
}

fn depth_profile(items: &[(Interval, u64)]) -> DepthProfile {
    let mut coords: Vec<f64> = items
        .iter()
        .flat_map(|(iv, _)| [iv.lo(), iv.hi()])
        .collect();
    coords.sort_by(f64::total_cmp);
    coords.dedup();

    let n = coords.len();
    let mut opens = vec![0u64; n];
    let mut closes = vec![0u64; n];
    for (iv, w) in items {
        let i = coords.binary_search_by(|c| c.total_cmp(&iv.lo())).unwrap();
        let j = coords.binary_search_by(|c| c.total_cmp(&iv.hi())).unwrap();
        opens[i] += w;
        closes[j] += w;
    }

    let mut point = vec![0u64; n];
    let mut open = vec![0u64; n.saturating_sub(1)];
    let mut running = 0u64;
    for i in 0..n {
        let at_point = running + opens[i];
        point[i] = at_point;
        running = at_point - closes[i];
        if i + 1 < n {
            open[i] = running;
        }
    }
    debug_assert_eq!(running, 0);
    DepthProfile {
        coords,
        point,
        open,
    }
}

fn profile_max(p: &DepthProfile) -> u64 {
    p.point.iter().copied().max().unwrap_or(0)
}

/// Maximal intervals where the profile reaches `target`.
///
/// Endpoint depth always dominates the neighboring open segments, so runs at
/// the global maximum begin and end at endpoint coordinates.
fn profile_zones(p: &DepthProfile, target: u64) -> Vec<Interval> {
    let mut zones = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..p.coords.len() {
        if p.point[i] >= target {
            if run_start.is_none() {
                run_start = Some(i);
            }
            let continues = i + 1 < p.coords.len()
                && p.open[i] >= target
                && p.point[i + 1] >= target;
            if !continues {
                let start = run_start.take().unwrap();
                zones.push(
                    Interval::new(p.coords[start], p.coords[i])
                        .expect("profile coords are sorted"),
                );
            }
        } else {
            debug_assert!(run_start.is_none());
        }
    }
    zones
}

/// One vertical slab of the 2D sweep: either the line `x = coordinate` or
/// the open strip between two consecutive coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Slab {
    Point(f64),
    Gap(f64, f64),
}

impl Slab {
    fn left(&self) -> f64 {
        match *self {
            Slab::Point(x) => x,
            Slab::Gap(a, _) => a,
        }
    }

    fn right(&self) -> f64 {
        match *self {
            Slab::Point(x) => x,
            Slab::Gap(_, b) => b,
        }
    }
}

/// Merges consecutive slabs with identical y-zone lists into rectangles.
///
/// Both the exact sweep and the grid oracle feed this assembler, so their
/// zone decompositions agree bit for bit.
fn assemble_rects(slabs: &[(Slab, Vec<Interval>)]) -> Result<Vec<Bounds>> {
    let mut rects = Vec::new();
    let mut i = 0;
    while i < slabs.len() {
        if slabs[i].1.is_empty() {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < slabs.len() && slabs[i + 1].1 == slabs[start].1 {
            i += 1;
        }
        let extent = Interval::new(slabs[start].0.left(), slabs[i].0.right())?;
        for z in &slabs[start].1 {
            rects.push(Bounds::new(vec![extent, *z])?);
        }
        i += 1;
    }
    rects.sort_by(Bounds::lex_cmp);
    Ok(rects)
}

fn crisp_2d(boxes: &[Bounds], weights: &[u64]) -> Result<(u64, Vec<Bounds>)> {
    let mut xs: Vec<f64> = boxes
        .iter()
        .flat_map(|b| [b.interval(0).lo(), b.interval(0).hi()])
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut slabs: Vec<(Slab, Vec<(Interval, u64)>)> = Vec::new();
    for i in 0..xs.len() {
        let active = |pred: &dyn Fn(&Interval) -> bool| -> Vec<(Interval, u64)> {
            boxes
                .iter()
                .zip(weights)
                .filter(|(b, _)| pred(&b.interval(0)))
                .map(|(b, &w)| (b.interval(1), w))
                .collect()
        };
        let x = xs[i];
        slabs.push((Slab::Point(x), active(&|iv| iv.contains(x))));
        if i + 1 < xs.len() {
            let b = xs[i + 1];
            slabs.push((Slab::Gap(x, b), active(&|iv| iv.lo() <= x && iv.hi() >= b)));
        }
    }

    let profiles: Vec<DepthProfile> = slabs
        .iter()
        .map(|(_, items)| depth_profile(items))
        .collect();
    let global = profiles.iter().map(profile_max).max().unwrap_or(0);
    let zone_slabs: Vec<(Slab, Vec<Interval>)> = slabs
        .iter()
        .zip(&profiles)
        .map(|((slab, _), p)| (*slab, profile_zones(p, global)))
        .collect();
    Ok((global, assemble_rects(&zone_slabs)?))
}

fn point_estimate(zones: &[Bounds]) -> Vec<f64> {
    let mut best: Option<&Bounds> = None;
    for z in zones {
        match best {
            Some(b) if z.volume() <= b.volume() => {}
            _ => best = Some(z),
        }
    }
    best.map(Bounds::centroid).unwrap_or_default()
}

fn partition_by_zone_containment(
    measurements: &[Measurement],
    zones: &[Bounds],
) -> Result<(Vec<String>, Vec<String>)> {
    let mut members = Vec::new();
    let mut outliers = Vec::new();
    for m in measurements {
        let b = core_bounds(m)?;
        if zones.iter().any(|z| b.contains(z)) {
            members.push(m.id().to_string());
        } else {
            outliers.push(m.id().to_string());
        }
    }
    Ok((members, outliers))
}

/// Exact maximum-overlap consensus of crisp core boxes (value ± error per
/// dimension, closed).
///
/// 1D uses an endpoint sweep; 2D sweeps a vertical line over x-slabs with a
/// 1D depth profile per slab. Depth counts overlapping box weight, so a
/// measurement is a member exactly when its core box contains one of the
/// reported zones (partial overlap with a zone at maximum depth is
/// impossible for closed boxes: it would deepen the overlap inside).
pub fn consensus_crisp(measurements: &[Measurement]) -> Result<ConsensusResult> {
    let d = common_dim(measurements)?;
    let weights: Vec<u64> = measurements
        .iter()
        .map(integer_weight)
        .collect::<Result<_>>()?;
    let boxes: Vec<Bounds> = measurements
        .iter()
        .map(core_bounds)
        .collect::<Result<_>>()?;

    let (depth, zones) = match d {
        1 => {
            let items: Vec<(Interval, u64)> = boxes
                .iter()
                .zip(&weights)
                .map(|(b, &w)| (b.interval(0), w))
                .collect();
            let profile = depth_profile(&items);
            let max = profile_max(&profile);
            let zones = profile_zones(&profile, max)
                .into_iter()
                .map(|iv| Bounds::new(vec![iv]))
                .collect::<Result<Vec<_>>>()?;
            (max, zones)
        }
        2 => crisp_2d(&boxes, &weights)?,
        _ => return Err(Error::UnsupportedDimension { dim: d }),
    };

    let (members, outliers) = partition_by_zone_containment(measurements, &zones)?;
    let estimate = point_estimate(&zones);
    Ok(ConsensusResult {
        depth: depth as f64,
        zones,
        members,
        outliers,
        point_estimate: estimate,
    })
}

/// Fuzzy consensus of a one-dimensional sample: the argmax of the aggregate
/// membership curve.
///
/// A measurement is a member when its membership reaches
/// `membership_threshold` somewhere inside a zone; at the default threshold
/// 1.0 that means its core touches the zone.
pub fn consensus_fuzzy_1d(
    measurements: &[Measurement],
    membership_threshold: f64,
) -> Result<ConsensusResult> {
    let d = common_dim(measurements)?;
    if d != 1 {
        return Err(Error::invalid(format!(
            "fuzzy consensus is one-dimensional; measurements have d = {d}"
        )));
    }
    if !(membership_threshold > 0.0 && membership_threshold <= 1.0) {
        return Err(Error::invalid(format!(
            "membership threshold must be in (0, 1], got {membership_threshold}"
        )));
    }
    let curve = build_curve(measurements)?;
    let peak = curve.argmax_zones()?;
    let zones = peak
        .zones
        .iter()
        .map(|&iv| Bounds::new(vec![iv]))
        .collect::<Result<Vec<_>>>()?;

    let mut members = Vec::new();
    let mut outliers = Vec::new();
    for m in measurements {
        let t = m.trapezoid(0)?;
        let reached = peak
            .zones
            .iter()
            .any(|z| t.max_membership_on(z) >= membership_threshold);
        if reached {
            members.push(m.id().to_string());
        } else {
            outliers.push(m.id().to_string());
        }
    }
    let estimate = point_estimate(&zones);
    Ok(ConsensusResult {
        depth: peak.height,
        zones,
        members,
        outliers,
        point_estimate: estimate,
    })
}

fn grid_axis(base: &[f64], resolution: usize) -> Vec<(f64, Slab)> {
    let mut out: Vec<(f64, Slab)> = Vec::new();
    for i in 0..base.len() {
        out.push((base[i], Slab::Point(base[i])));
        if i + 1 < base.len() {
            let (a, b) = (base[i], base[i + 1]);
            for j in 1..resolution {
                let x = a + (b - a) * j as f64 / resolution as f64;
                if x > out.last().unwrap().0 && x < b {
                    out.push((x, Slab::Gap(a, b)));
                }
            }
        }
    }
    out
}

/// Brute-force consensus oracle: evaluates depth on the grid of all
/// per-dimension breakpoints plus `resolution - 1` interior points per gap.
///
/// Crisp depth is piecewise constant between box borders and fuzzy depth is
/// piecewise linear between trapezoid breakpoints, so this grid is exact for
/// depth. Also the only mode supporting d > 2 (zones are then reported as
/// bounding boxes of connected components of maximal grid cells).
pub fn consensus_grid(
    measurements: &[Measurement],
    resolution: usize,
    mode: DepthMode,
) -> Result<ConsensusResult> {
    let d = common_dim(measurements)?;
    if resolution < 2 {
        return Err(Error::invalid(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }

    match mode {
        DepthMode::Crisp => consensus_grid_crisp(measurements, d, resolution),
        DepthMode::Fuzzy => {
            if d != 1 {
                return Err(Error::invalid(format!(
                    "fuzzy grid depth is one-dimensional; measurements have d = {d}"
                )));
            }
            consensus_grid_fuzzy_1d(measurements, resolution)
        }
    }
}

fn check_grid_size(axes: &[Vec<(f64, Slab)>]) -> Result<()> {
    let points: u128 = axes.iter().map(|a| a.len() as u128).product();
    if points > GRID_POINT_LIMIT as u128 {
        return Err(Error::GridTooLarge {
            points,
            limit: GRID_POINT_LIMIT,
        });
    }
    Ok(())
}

fn consensus_grid_crisp(
    measurements: &[Measurement],
    d: usize,
    resolution: usize,
) -> Result<ConsensusResult> {
    let weights: Vec<u64> = measurements
        .iter()
        .map(integer_weight)
        .collect::<Result<_>>()?;
    let boxes: Vec<Bounds> = measurements
        .iter()
        .map(core_bounds)
        .collect::<Result<_>>()?;

    let mut axes: Vec<Vec<(f64, Slab)>> = Vec::with_capacity(d);
    for k in 0..d {
        let mut base: Vec<f64> = boxes
            .iter()
            .flat_map(|b| [b.interval(k).lo(), b.interval(k).hi()])
            .collect();
        base.sort_by(f64::total_cmp);
        base.dedup();
        axes.push(grid_axis(&base, resolution));
    }
    check_grid_size(&axes)?;

    let depth_at = |p: &[f64]| -> u64 {
        boxes
            .iter()
            .zip(&weights)
            .filter(|(b, _)| b.contains_point(p))
            .map(|(_, &w)| w)
            .sum()
    };

    let (max, zones, max_points) = match d {
        1 => {
            let axis = &axes[0];
            let depths: Vec<u64> = axis.iter().map(|&(x, _)| depth_at(&[x])).collect();
            let max = depths.iter().copied().max().unwrap_or(0);
            let mut zones = Vec::new();
            let mut max_points = Vec::new();
            let mut i = 0;
            while i < axis.len() {
                if depths[i] == max {
                    let start = i;
                    while i + 1 < axis.len() && depths[i + 1] == max {
                        i += 1;
                    }
                    zones.push(Bounds::new(vec![Interval::new(axis[start].0, axis[i].0)?])?);
                    for j in start..=i {
                        max_points.push(vec![axis[j].0]);
                    }
                }
                i += 1;
            }
            (max, zones, max_points)
        }
        2 => {
            let (ax, ay) = (&axes[0], &axes[1]);
            let mut columns: Vec<Vec<u64>> = Vec::with_capacity(ax.len());
            let mut max = 0u64;
            for &(x, _) in ax {
                let col: Vec<u64> = ay.iter().map(|&(y, _)| depth_at(&[x, y])).collect();
                if let Some(&m) = col.iter().max() {
                    max = max.max(m);
                }
                columns.push(col);
            }
            let mut slabs: Vec<(Slab, Vec<Interval>)> = Vec::with_capacity(ax.len());
            let mut max_points = Vec::new();
            for (ci, &(x, slab)) in ax.iter().enumerate() {
                let col = &columns[ci];
                let mut zones = Vec::new();
                let mut i = 0;
                while i < ay.len() {
                    if col[i] == max {
                        let start = i;
                        while i + 1 < ay.len() && col[i + 1] == max {
                            i += 1;
                        }
                        zones.push(Interval::new(ay[start].0, ay[i].0)?);
                        for j in start..=i {
                            max_points.push(vec![x, ay[j].0]);
                        }
                    }
                    i += 1;
                }
                slabs.push((slab, zones));
            }
            (max, assemble_rects(&slabs)?, max_points)
        }
        _ => {
            let sizes: Vec<usize> = axes.iter().map(|a| a.len()).collect();
            let total: usize = sizes.iter().product();
            let mut depths = vec![0u64; total];
            let mut max = 0u64;
            let mut idx = vec![0usize; d];
            for depth_slot in depths.iter_mut() {
                let p: Vec<f64> = (0..d).map(|k| axes[k][idx[k]].0).collect();
                let dep = depth_at(&p);
                *depth_slot = dep;
                max = max.max(dep);
                for k in (0..d).rev() {
                    idx[k] += 1;
                    if idx[k] < sizes[k] {
                        break;
                    }
                    idx[k] = 0;
                }
            }
            let (zones, max_points) = component_boxes(&axes, &sizes, &depths, max)?;
            (max, zones, max_points)
        }
    };

    let mut members = Vec::new();
    let mut outliers = Vec::new();
    for (m, b) in measurements.iter().zip(&boxes) {
        if max_points.iter().any(|p| b.contains_point(p)) {
            members.push(m.id().to_string());
        } else {
            outliers.push(m.id().to_string());
        }
    }
    let estimate = point_estimate(&zones);
    Ok(ConsensusResult {
        depth: max as f64,
        zones,
        members,
        outliers,
        point_estimate: estimate,
    })
}

/// Bounding boxes of connected components of maximal grid points (d >= 3).
fn component_boxes(
    axes: &[Vec<(f64, Slab)>],
    sizes: &[usize],
    depths: &[u64],
    max: u64,
) -> Result<(Vec<Bounds>, Vec<Vec<f64>>)> {
    let d = sizes.len();
    let strides: Vec<usize> = {
        let mut s = vec![1usize; d];
        for k in (0..d - 1).rev() {
            s[k] = s[k + 1] * sizes[k + 1];
        }
        s
    };
    let unflatten = |flat: usize| -> Vec<usize> {
        (0..d).map(|k| flat / strides[k] % sizes[k]).collect()
    };

    let mut visited = vec![false; depths.len()];
    let mut zones = Vec::new();
    let mut max_points = Vec::new();
    for start in 0..depths.len() {
        if depths[start] != max || visited[start] {
            continue;
        }
        let mut lo_idx = unflatten(start);
        let mut hi_idx = lo_idx.clone();
        let mut stack = vec![start];
        visited[start] = true;
        while let Some(flat) = stack.pop() {
            let idx = unflatten(flat);
            max_points.push((0..d).map(|k| axes[k][idx[k]].0).collect());
            for (k, &i) in idx.iter().enumerate() {
                lo_idx[k] = lo_idx[k].min(i);
                hi_idx[k] = hi_idx[k].max(i);
                if i > 0 {
                    let nflat = flat - strides[k];
                    if !visited[nflat] && depths[nflat] == max {
                        visited[nflat] = true;
                        stack.push(nflat);
                    }
                }
                if i + 1 < sizes[k] {
                    let nflat = flat + strides[k];
                    if !visited[nflat] && depths[nflat] == max {
                        visited[nflat] = true;
                        stack.push(nflat);
                    }
                }
            }
        }
        let dims = (0..d)
            .map(|k| Interval::new(axes[k][lo_idx[k]].0, axes[k][hi_idx[k]].0))
            .collect::<Result<Vec<_>>>()?;
        zones.push(Bounds::new(dims)?);
    }
    zones.sort_by(Bounds::lex_cmp);
    Ok((zones, max_points))
}

fn consensus_grid_fuzzy_1d(
    measurements: &[Measurement],
    resolution: usize,
) -> Result<ConsensusResult> {
    let trapezoids: Vec<(crate::trapezoid::Trapezoid, f64)> = measurements
        .iter()
        .map(|m| Ok((m.trapezoid(0)?, m.weight())))
        .collect::<Result<_>>()?;

    let mut base: Vec<f64> = trapezoids
        .iter()
        .flat_map(|(t, _)| t.breakpoints())
        .collect();
    base.sort_by(f64::total_cmp);
    base.dedup();
    let axis = grid_axis(&base, resolution);
    check_grid_size(std::slice::from_ref(&axis))?;

    let depths: Vec<f64> = axis
        .iter()
        .map(|&(x, _)| trapezoids.iter().map(|(t, w)| w * t.membership(x)).sum())
        .collect();
    let max = depths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cutoff = max - 1e-9 * max.abs().max(1.0);

    let mut zones = Vec::new();
    let mut i = 0;
    while i < axis.len() {
        if depths[i] >= cutoff {
            let start = i;
            while i + 1 < axis.len() && depths[i + 1] >= cutoff {
                i += 1;
            }
            zones.push(Interval::new(axis[start].0, axis[i].0)?);
        }
        i += 1;
    }

    let mut members = Vec::new();
    let mut outliers = Vec::new();
    for m in measurements {
        let t = m.trapezoid(0)?;
        if zones.iter().any(|z| t.max_membership_on(z) >= DEFAULT_MEMBERSHIP_THRESHOLD) {
            members.push(m.id().to_string());
        } else {
            outliers.push(m.id().to_string());
        }
    }
    let zones = zones
        .into_iter()
        .map(|iv| Bounds::new(vec![iv]))
        .collect::<Result<Vec<_>>>()?;
    let estimate = point_estimate(&zones);
    Ok(ConsensusResult {
        depth: max,
        zones,
        members,
        outliers,
        point_estimate: estimate,
    })
}

/// Applies the minimum-depth guard to a consensus result.
///
/// Below `min_depth` there is no meaningful consensus: everything is kept and
/// the result is flagged, instead of expelling measurements based on a
/// single-measurement "majority".
pub fn classify(
    measurements: &[Measurement],
    result: &ConsensusResult,
    min_depth: f64,
) -> Classification {
    if result.depth < min_depth {
        Classification {
            consistent: measurements.iter().map(|m| m.id().to_string()).collect(),
            erroneous: Vec::new(),
            no_consensus: true,
        }
    } else {
        Classification {
            consistent: result.members.clone(),
            erroneous: result.outliers.clone(),
            no_consensus: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn table_1_and_2() -> Vec<Measurement> {
        let rows = [
            ("S1", 1.9, 0.9),
            ("S2", 2.0, 1.0),
            ("S3", 2.1, 1.1),
            ("S4", 4.0, 3.0),
            ("S5", 6.0, 5.0),
            ("S6", 7.0, 4.0),
        ];
        rows.iter()
            .map(|&(id, x, y)| Measurement::new(id, vec![x, y], vec![0.2, 0.2], 1.0).unwrap())
            .collect()
    }

    #[test]
    fn two_dimensional_overlap_scenario() {
        let ms = table_1_and_2();
        let res = consensus_crisp(&ms).unwrap();
        assert_eq!(res.depth, 3.0);
        assert_eq!(res.zones.len(), 1);
        let zone = &res.zones[0];
        assert_abs_diff_eq!(zone.interval(0).lo(), 1.9, epsilon = 1e-12);
        assert_abs_diff_eq!(zone.interval(0).hi(), 2.1, epsilon = 1e-12);
        assert_abs_diff_eq!(zone.interval(1).lo(), 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(zone.interval(1).hi(), 1.1, epsilon = 1e-12);
        assert_eq!(res.members, vec!["S1", "S2", "S3"]);
        assert_eq!(res.outliers, vec!["S4", "S5", "S6"]);
        assert_abs_diff_eq!(res.point_estimate[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(res.point_estimate[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_measurement_is_its_own_consensus() {
        let m = Measurement::scalar("only", 5.0, 0.5).unwrap();
        let res = consensus_crisp(&[m]).unwrap();
        assert_eq!(res.depth, 1.0);
        assert_eq!(res.zones.len(), 1);
        assert_eq!(res.zones[0].interval(0).lo(), 4.5);
        assert_eq!(res.zones[0].interval(0).hi(), 5.5);
        assert!(res.outliers.is_empty());
    }

    #[test]
    fn disjoint_pair_ties_and_everyone_is_a_member() {
        let a = Measurement::scalar("a", 0.0, 0.5).unwrap();
        let b = Measurement::scalar("b", 10.0, 0.5).unwrap();
        let res = consensus_crisp(&[a, b]).unwrap();
        assert_eq!(res.depth, 1.0);
        assert_eq!(res.zones.len(), 2);
        assert_eq!(res.members, vec!["a", "b"]);
        assert!(res.outliers.is_empty());
    }

    #[test]
    fn mode_degeneration_crisp() {
        let ms: Vec<Measurement> = [1.0, 2.0, 2.0, 3.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| Measurement::scalar(format!("m{i}"), v, 0.0).unwrap())
            .collect();
        let res = consensus_crisp(&ms).unwrap();
        assert_eq!(res.depth, 2.0);
        assert_eq!(res.zones.len(), 1);
        assert!(res.zones[0].interval(0).is_point());
        assert_eq!(res.zones[0].interval(0).lo(), 2.0);
        assert_eq!(res.members, vec!["m1", "m2"]);
    }

    #[test]
    fn mode_degeneration_fuzzy() {
        let ms: Vec<Measurement> = [1.0, 2.0, 2.0, 3.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| Measurement::scalar(format!("m{i}"), v, 0.0).unwrap())
            .collect();
        let res = consensus_fuzzy_1d(&ms, DEFAULT_MEMBERSHIP_THRESHOLD).unwrap();
        assert_eq!(res.depth, 2.0);
        assert_eq!(res.zones.len(), 1);
        assert!(res.zones[0].interval(0).is_point());
        assert_eq!(res.zones[0].interval(0).lo(), 2.0);
        assert_eq!(res.point_estimate, vec![2.0]);
        assert_eq!(res.outliers, vec!["m0", "m3"]);
    }

    #[test]
    fn fuzzy_matches_paper_scenario_in_each_dimension() {
        let ms = table_1_and_2();
        for (dim, want) in [(0, 2.0), (1, 1.0)] {
            let projected: Vec<Measurement> =
                ms.iter().map(|m| m.project(dim).unwrap()).collect();
            let res = consensus_fuzzy_1d(&projected, DEFAULT_MEMBERSHIP_THRESHOLD).unwrap();
            assert_eq!(res.depth, 3.0);
            assert_eq!(res.zones.len(), 1);
            assert_abs_diff_eq!(res.point_estimate[0], want, epsilon = 1e-12);
            assert_eq!(res.members, vec!["S1", "S2", "S3"]);
            assert_eq!(res.outliers, vec!["S4", "S5", "S6"]);
        }
    }

    #[test]
    fn integer_weight_validation() {
        let m = Measurement::new("w", vec![1.0], vec![0.1], 1.5).unwrap();
        assert!(consensus_crisp(&[m]).is_err());
        let ok = Measurement::new("w", vec![1.0], vec![0.1], 3.0).unwrap();
        let res = consensus_crisp(&[ok]).unwrap();
        assert_eq!(res.depth, 3.0);
    }

    #[test]
    fn dimension_guards() {
        let m3 = Measurement::new("m", vec![1.0, 2.0, 3.0], vec![0.1; 3], 1.0).unwrap();
        match consensus_crisp(&[m3.clone()]) {
            Err(Error::UnsupportedDimension { dim: 3 }) => {}
            other => panic!("expected UnsupportedDimension, got {other:?}"),
        }
        let m2 = Measurement::new("m", vec![1.0, 2.0], vec![0.1; 2], 1.0).unwrap();
        assert!(consensus_fuzzy_1d(&[m2], 1.0).is_err());
        assert!(consensus_crisp(&[]).is_err());
    }

    #[test]
    fn grid_handles_three_dimensions() {
        let ms: Vec<Measurement> = (0..4)
            .map(|i| {
                let off = if i == 3 { 5.0 } else { 0.1 * i as f64 };
                Measurement::new(
                    format!("m{i}"),
                    vec![1.0 + off, 2.0 + off, 3.0 + off],
                    vec![0.3; 3],
                    1.0,
                )
                .unwrap()
            })
            .collect();
        let res = consensus_grid(&ms, 2, DepthMode::Crisp).unwrap();
        assert_eq!(res.depth, 3.0);
        assert_eq!(res.members, vec!["m0", "m1", "m2"]);
        assert_eq!(res.outliers, vec!["m3"]);
        assert_eq!(res.zones.len(), 1);
        assert_abs_diff_eq!(res.zones[0].interval(0).lo(), 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(res.zones[0].interval(0).hi(), 1.3, epsilon = 1e-12);
        assert_abs_diff_eq!(res.zones[0].interval(2).lo(), 2.9, epsilon = 1e-12);
    }

    #[test]
    fn grid_matches_sweep_on_paper_instance() {
        let ms = table_1_and_2();
        let sweep = consensus_crisp(&ms).unwrap();
        let grid = consensus_grid(&ms, 2, DepthMode::Crisp).unwrap();
        assert_eq!(grid.depth, sweep.depth);
        assert_eq!(grid.zones, sweep.zones);
        assert_eq!(grid.members, sweep.members);
        assert_eq!(grid.outliers, sweep.outliers);
        assert_eq!(grid.point_estimate, sweep.point_estimate);
    }

    #[test]
    fn grid_fuzzy_matches_fuzzy_1d() {
        let ms: Vec<Measurement> = [(1.9, 0.2), (2.0, 0.2), (2.1, 0.2), (4.0, 0.2)]
            .iter()
            .enumerate()
            .map(|(i, &(v, e))| Measurement::scalar(format!("m{i}"), v, e).unwrap())
            .collect();
        let exact = consensus_fuzzy_1d(&ms, 1.0).unwrap();
        let grid = consensus_grid(&ms, 2, DepthMode::Fuzzy).unwrap();
        assert_abs_diff_eq!(grid.depth, exact.depth, epsilon = 1e-9);
        assert_eq!(grid.zones.len(), exact.zones.len());
        for (a, b) in grid.zones.iter().zip(&exact.zones) {
            assert_abs_diff_eq!(a.interval(0).lo(), b.interval(0).lo(), epsilon = 1e-9);
            assert_abs_diff_eq!(a.interval(0).hi(), b.interval(0).hi(), epsilon = 1e-9);
        }
        assert_eq!(grid.members, exact.members);
        assert_eq!(grid.outliers, exact.outliers);
    }

    #[test]
    fn grid_validation() {
        let m = Measurement::scalar("m", 1.0, 0.1).unwrap();
        assert!(consensus_grid(&[m.clone()], 1, DepthMode::Crisp).is_err());
        let m2 = Measurement::new("m", vec![1.0, 2.0], vec![0.1; 2], 1.0).unwrap();
        assert!(consensus_grid(&[m2], 2, DepthMode::Fuzzy).is_err());
    }

    #[test]
    fn classify_respects_min_depth() {
        let a = Measurement::scalar("a", 0.0, 0.5).unwrap();
        let b = Measurement::scalar("b", 10.0, 0.5).unwrap();
        let ms = vec![a, b];
        let res = consensus_crisp(&ms).unwrap();
        let c = classify(&ms, &res, DEFAULT_MIN_DEPTH);
        assert!(c.no_consensus);
        assert!(c.erroneous.is_empty());
        assert_eq!(c.consistent, vec!["a", "b"]);

        let ms = table_1_and_2();
        let res = consensus_crisp(&ms).unwrap();
        let c = classify(&ms, &res, DEFAULT_MIN_DEPTH);
        assert!(!c.no_consensus);
        assert_eq!(c.erroneous, vec!["S4", "S5", "S6"]);
    }

    #[test]
    fn robustness_against_disjoint_contamination() {
        let clean: Vec<Measurement> = [(2.0, 0.3), (2.1, 0.3), (1.95, 0.3)]
            .iter()
            .enumerate()
            .map(|(i, &(v, e))| Measurement::scalar(format!("c{i}"), v, e).unwrap())
            .collect();
        let before = consensus_crisp(&clean).unwrap();
        assert_eq!(before.depth, 3.0);

        let mut contaminated = clean.clone();
        for (i, v) in [10.0, 20.0, 30.0, 40.0].iter().enumerate() {
            contaminated.push(Measurement::scalar(format!("x{i}"), *v, 0.4).unwrap());
        }
        let after = consensus_crisp(&contaminated).unwrap();
        assert_eq!(after.depth, before.depth);
        assert_eq!(after.zones, before.zones);
        assert_eq!(after.outliers, vec!["x0", "x1", "x2", "x3"]);
    }

    #[test]
    fn enlarging_an_error_never_decreases_depth() {
        use proptest::prelude::*;
        proptest!(|(seed in 0u64..200)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..10);
            let mut ms: Vec<Measurement> = (0..n)
                .map(|i| {
                    Measurement::scalar(
                        format!("m{i}"),
                        rng.gen_range(0.0..10.0),
                        rng.gen_range(0.05..1.0),
                    )
                    .unwrap()
                })
                .collect();
            let before = consensus_crisp(&ms).unwrap().depth;
            let k = rng.gen_range(0..n);
            let grown = Measurement::scalar(
                ms[k].id(),
                ms[k].value(0),
                ms[k].error(0) + rng.gen_range(0.1..2.0),
            )
            .unwrap();
            ms[k] = grown;
            let after = consensus_crisp(&ms).unwrap().depth;
            prop_assert!(after >= before);
        });
    }

    #[test]
    fn equivariance_under_dyadic_affine_maps() {
        use proptest::prelude::*;
        proptest!(|(seed in 0u64..100, alpha_pow in -1i32..3, shift_q in -40i32..40)| {
            use rand::{Rng, SeedableRng};
            let alpha = 2f64.powi(alpha_pow);
            let c = shift_q as f64 * 0.25;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..8);
            let ms: Vec<Measurement> = (0..n)
                .map(|i| {
                    let v = rng.gen_range(-40i32..40) as f64 * 0.25;
                    let e = rng.gen_range(0..8) as f64 * 0.25;
                    Measurement::scalar(format!("m{i}"), v, e).unwrap()
                })
                .collect();
            let mapped: Vec<Measurement> = ms
                .iter()
                .map(|m| {
                    Measurement::scalar(m.id(), alpha * m.value(0) + c, alpha * m.error(0))
                        .unwrap()
                })
                .collect();
            let base = consensus_crisp(&ms).unwrap();
            let moved = consensus_crisp(&mapped).unwrap();
            prop_assert_eq!(moved.depth, base.depth);
            prop_assert_eq!(moved.zones.len(), base.zones.len());
            for (a, b) in moved.zones.iter().zip(&base.zones) {
                prop_assert_eq!(a.interval(0).lo(), alpha * b.interval(0).lo() + c);
                prop_assert_eq!(a.interval(0).hi(), alpha * b.interval(0).hi() + c);
            }
            for (a, b) in moved.point_estimate.iter().zip(&base.point_estimate) {
                prop_assert_eq!(*a, alpha * b + c);
            }
        });
    }

    #[test]
    fn point_estimate_prefers_first_widest_zone() {
        let ms = vec![
            Measurement::scalar("a", 0.0, 1.0).unwrap(),
            Measurement::scalar("b", 10.0, 0.25).unwrap(),
        ];
        let res = consensus_crisp(&ms).unwrap();
        assert_eq!(res.zones.len(), 2);
        assert_eq!(res.point_estimate, vec![0.0]);

        let tied = vec![
            Measurement::scalar("a", 0.0, 0.5).unwrap(),
            Measurement::scalar("b", 10.0, 0.5).unwrap(),
        ];
        let res = consensus_crisp(&tied).unwrap();
        assert_eq!(res.point_estimate, vec![0.0]);
    }
}
