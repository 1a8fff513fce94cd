//! Sampling sets, density certificates and the quasi-interpolation operators.

use crate::basis::{AxisBasis, Basis, BasisError};
use crate::domain::{BoxDomain, Point};
use crate::quadrature;
use crate::voronoi::{voronoi_partition, VoronoiCells};
use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("node {index} at {point:?} lies outside the domain")]
    OutsideDomain { index: usize, point: Point },
    #[error("nodes {first} and {second} coincide but carry different values")]
    ConflictingDuplicate { first: usize, second: usize },
    #[error("{values} sample values for {nodes} nodes")]
    LengthMismatch { nodes: usize, values: usize },
    #[error("probe resolution {probe} exceeds δ/4 = {limit}")]
    ProbeTooCoarse { probe: f64, limit: f64 },
    #[error("sampling point {index} lies outside the support of its basis element")]
    OutsideSupport { index: usize },
    #[error("the {0} partition of unity is only available in one dimension")]
    Unsupported(&'static str),
    #[error("the basis family fixes its own nodes; build it from the level-j' basis")]
    NodesFixedByBasis,
    #[error("no sampling nodes")]
    Empty,
    #[error("unknown ψ family '{0}': expected voronoi, hat or basis:<level>")]
    UnknownFamily(String),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

/// Node set `X = {x_ℓ}` in a box. Coincident nodes (closer than `1e−12·diam Ω`) are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSet {
    domain: BoxDomain,
    nodes: Vec<Point>,
}

impl SamplingSet {
    pub fn new(domain: &BoxDomain, nodes: Vec<Point>) -> Result<Self, SamplingError> {
        Self::with_values(domain, nodes, None).map(|(set, _)| set)
    }

    /// Builds the set and the aligned sample vector; duplicates must carry equal values.
    pub fn with_values(
        domain: &BoxDomain,
        nodes: Vec<Point>,
        values: Option<Vec<f64>>,
    ) -> Result<(Self, Option<Vec<f64>>), SamplingError> {
        if let Some(v) = &values {
            if v.len() != nodes.len() {
                return Err(SamplingError::LengthMismatch {
                    nodes: nodes.len(),
                    values: v.len(),
                });
            }
        }
        let sep = 1e-12 * domain.diameter();
        let mut kept: Vec<Point> = Vec::with_capacity(nodes.len());
        let mut kept_index: Vec<usize> = Vec::new();
        let mut kept_values = values.as_ref().map(|_| Vec::new());
        for (i, p) in nodes.iter().enumerate() {
            let mut p = *p;
            if domain.dim() == 1 {
                p[1] = 0.0;
            }
            if !domain.contains(&p) {
                return Err(SamplingError::OutsideDomain { index: i, point: p });
            }
            if let Some(pos) = kept.iter().position(|q| domain.distance(q, &p) < sep) {
                if let Some(v) = &values {
                    if v[i] != v[kept_index[pos]] {
                        return Err(SamplingError::ConflictingDuplicate {
                            first: kept_index[pos],
                            second: i,
                        });
                    }
                }
                warn!("merging coincident nodes {} and {i}", kept_index[pos]);
                continue;
            }
            kept.push(p);
            kept_index.push(i);
            if let (Some(out), Some(v)) = (kept_values.as_mut(), &values) {
                out.push(v[i]);
            }
        }
        Ok((
            Self {
                domain: domain.clone(),
                nodes: kept,
            },
            kept_values,
        ))
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the nearest node (the Voronoi owner of `p`).
    pub fn nearest(&self, p: &Point) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, q) in self.nodes.iter().enumerate() {
            let d = self.domain.distance(p, q);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    pub fn cells(&self) -> VoronoiCells {
        voronoi_partition(&self.nodes, &self.domain)
    }

    /// Samples `f` at the nodes.
    pub fn sample<F: Fn(&Point) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(f).collect()
    }

    pub fn check_delta_dense(&self, delta: f64, probe: f64) -> Result<DensityCertificate, SamplingError> {
        check_delta_dense(&self.nodes, &self.domain, delta, probe)
    }

    /// Largest probe distance to the nearest node, on a grid of spacing `probe`.
    pub fn covering_radius(&self, probe: f64) -> f64 {
        probe_distance(&self.nodes, &self.domain, probe).1
    }
}

/// Outcome of a probe-grid density check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCertificate {
    pub passed: bool,
    pub delta: f64,
    pub probe_resolution: f64,
    /// Probe point farthest from every node.
    pub worst_point: Point,
    pub worst_distance: f64,
}

fn probe_distance(nodes: &[Point], domain: &BoxDomain, probe: f64) -> (Point, f64) {
    let mut worst = ([f64::NAN; 2], 0.0);
    for p in domain.grid(probe) {
        let d = nodes
            .iter()
            .map(|q| domain.distance(&p, q))
            .fold(f64::INFINITY, f64::min);
        if d > worst.1 || worst.0[0].is_nan() {
            worst = (p, d);
        }
    }
    worst
}

/// Certifies that every probe point of spacing `probe_resolution` lies within `delta` of a node.
pub fn check_delta_dense(
    nodes: &[Point],
    domain: &BoxDomain,
    delta: f64,
    probe_resolution: f64,
) -> Result<DensityCertificate, SamplingError> {
    if probe_resolution > delta / 4.0 * (1.0 + 1e-12) {
        return Err(SamplingError::ProbeTooCoarse {
            probe: probe_resolution,
            limit: delta / 4.0,
        });
    }
    if nodes.is_empty() {
        return Ok(DensityCertificate {
            passed: false,
            delta,
            probe_resolution,
            worst_point: domain.clamp(&[0.0, 0.0]),
            worst_distance: f64::INFINITY,
        });
    }
    let (worst_point, worst_distance) = probe_distance(nodes, domain, probe_resolution);
    Ok(DensityCertificate {
        passed: worst_distance <= delta,
        delta,
        probe_resolution,
        worst_point,
        worst_distance,
    })
}

/// Choice of the partition of unity `Ψ` in `Q f = Σ f(x_ℓ) ψ_ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiFamily {
    /// Indicators of the Voronoi cells.
    Voronoi,
    /// Piecewise-linear hats on the sorted nodes (one dimension only).
    Hat,
    /// `ψ_k = 2^{−dj'/2} φ_{j',k}` with nodes at the support midpoints, i.e. the operator S.
    Basis { level: u32 },
}

impl fmt::Display for PsiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiFamily::Voronoi => write!(f, "voronoi"),
            PsiFamily::Hat => write!(f, "hat"),
            PsiFamily::Basis { level } => write!(f, "basis:{level}"),
        }
    }
}

impl FromStr for PsiFamily {
    type Err = SamplingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "voronoi" => Ok(PsiFamily::Voronoi),
            "hat" | "smooth" => Ok(PsiFamily::Hat),
            other => other
                .strip_prefix("basis:")
                .and_then(|l| l.parse().ok())
                .map(|level| PsiFamily::Basis { level })
                .ok_or_else(|| SamplingError::UnknownFamily(s.to_string())),
        }
    }
}

/// The functions `ψ_ℓ` attached to a sampling set.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    family: PsiFamily,
    set: SamplingSet,
    cells: Option<VoronoiCells>,
    /// Node indices sorted by position (hat family).
    order: Vec<usize>,
    /// Level-`j'` basis (basis family).
    basis: Option<Basis>,
}

/// Sampling points `ξ_{j',k}`: midpoints of the clipped supports.
pub fn support_midpoints(basis: &Basis) -> Vec<Point> {
    (0..basis.len())
        .map(|k| {
            let s = basis.support(k);
            let mut p = [0.5 * (s[0].0 + s[0].1), 0.5 * (s[1].0 + s[1].1)];
            if basis.dim() == 1 {
                p[1] = 0.0;
            }
            basis.domain().clamp(&p)
        })
        .collect()
}

impl PartitionOfUnity {
    /// Voronoi or hat functions on the nodes of `set`.
    pub fn new(family: PsiFamily, set: &SamplingSet) -> Result<Self, SamplingError> {
        if set.is_empty() {
            return Err(SamplingError::Empty);
        }
        let mut order: Vec<usize> = (0..set.len()).collect();
        order.sort_by(|&i, &j| set.nodes()[i][0].total_cmp(&set.nodes()[j][0]));
        match family {
            PsiFamily::Voronoi => Ok(Self {
                family,
                set: set.clone(),
                cells: Some(set.cells()),
                order,
                basis: None,
            }),
            PsiFamily::Hat => {
                if set.domain().dim() != 1 {
                    return Err(SamplingError::Unsupported("hat"));
                }
                Ok(Self {
                    family,
                    set: set.clone(),
                    cells: None,
                    order,
                    basis: None,
                })
            }
            PsiFamily::Basis { .. } => Err(SamplingError::NodesFixedByBasis),
        }
    }

    /// `ψ_k = 2^{−dj'/2} φ_{j',k}` with nodes `ξ_{j',k}`.
    pub fn from_basis(basis: &Basis) -> Result<Self, SamplingError> {
        let nodes = support_midpoints(basis);
        let set = SamplingSet {
            domain: basis.domain().clone(),
            nodes,
        };
        Ok(Self {
            family: PsiFamily::Basis {
                level: basis.level(),
            },
            order: (0..set.len()).collect(),
            set,
            cells: None,
            basis: Some(basis.clone()),
        })
    }

    pub fn family(&self) -> PsiFamily {
        self.family
    }

    pub fn set(&self) -> &SamplingSet {
        &self.set
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn cells(&self) -> Option<&VoronoiCells> {
        self.cells.as_ref()
    }

    fn hat_neighbours(&self, pos: usize) -> (Option<f64>, f64, Option<f64>) {
        let x = |p: usize| self.set.nodes()[self.order[p]][0];
        let left = (pos > 0).then(|| x(pos - 1));
        let right = (pos + 1 < self.order.len()).then(|| x(pos + 1));
        (left, x(pos), right)
    }

    fn hat_value(&self, pos: usize, t: f64) -> f64 {
        let (left, c, right) = self.hat_neighbours(pos);
        if t <= c {
            match left {
                None => 1.0,
                Some(l) if t <= l => 0.0,
                Some(l) => (t - l) / (c - l),
            }
        } else {
            match right {
                None => 1.0,
                Some(r) if t >= r => 0.0,
                Some(r) => (r - t) / (r - c),
            }
        }
    }

    /// `ψ_ℓ(p)`.
    pub fn eval(&self, l: usize, p: &Point) -> f64 {
        match self.family {
            PsiFamily::Voronoi => {
                if self.set.nearest(p) == l {
                    1.0
                } else {
                    0.0
                }
            }
            PsiFamily::Hat => {
                let pos = self.order.iter().position(|&i| i == l).expect("valid index");
                self.hat_value(pos, p[0])
            }
            PsiFamily::Basis { .. } => {
                let b = self.basis.as_ref().expect("basis family");
                b.eval(l, p) / b.normalization()
            }
        }
    }

    /// `Q f(p) = Σ_ℓ f(x_ℓ) ψ_ℓ(p)`.
    pub fn quasi_interpolate(&self, samples: &[f64], p: &Point) -> f64 {
        match self.family {
            PsiFamily::Voronoi => samples[self.set.nearest(p)],
            PsiFamily::Hat => {
                let t = p[0];
                let pos = self
                    .order
                    .partition_point(|&i| self.set.nodes()[i][0] <= t)
                    .saturating_sub(1);
                let mut acc = 0.0;
                for q in pos..(pos + 2).min(self.order.len()) {
                    acc += samples[self.order[q]] * self.hat_value(q, t);
                }
                acc
            }
            PsiFamily::Basis { .. } => {
                let b = self.basis.as_ref().expect("basis family");
                b.expansion(samples, p) / b.normalization()
            }
        }
    }

    /// `R_{kℓ} = ∫_Ω ψ_ℓ e_k` for every element `e_k` of `family`.
    pub fn element_integrals(&self, family: &Basis) -> Result<DMatrix<f64>, SamplingError> {
        let n = family.len();
        let m = self.len();
        let mut r = DMatrix::zeros(n, m);
        match (self.family, family.dim()) {
            (PsiFamily::Voronoi, 1) => {
                let Some(VoronoiCells::Intervals(cells)) = &self.cells else {
                    unreachable!("1-D Voronoi cells are intervals")
                };
                let ax = family.axis(0);
                for (l, &(a, b)) in cells.iter().enumerate() {
                    for k in elements_meeting(ax, a, b) {
                        r[(k, l)] = ax.integral(k, a, b);
                    }
                }
            }
            (PsiFamily::Voronoi, _) => {
                let Some(VoronoiCells::Polygons(cells)) = &self.cells else {
                    unreachable!("2-D Voronoi cells are polygons")
                };
                let origin = [family.axis(0).interval().0, family.axis(1).interval().0];
                let step = [1.0 / family.axis(0).scale(), 1.0 / family.axis(1).scale()];
                let order = polygon_order(family);
                for (l, cell) in cells.iter().enumerate() {
                    for piece in cell.split_on_grid(origin, step) {
                        piece.for_each_quadrature_point(order, |p, w| {
                            family.for_each_active(&p, |k, v| r[(k, l)] += w * v);
                        });
                    }
                }
            }
            (PsiFamily::Hat, _) => {
                let ax = family.axis(0);
                for pos in 0..self.order.len() {
                    let l = self.order[pos];
                    let (left, c, right) = self.hat_neighbours(pos);
                    let (lo_dom, hi_dom) = ax.interval();
                    let lo = left.unwrap_or(lo_dom);
                    let hi = right.unwrap_or(hi_dom);
                    for k in elements_meeting(ax, lo, hi) {
                        r[(k, l)] = piecewise_integral(ax, k, lo, c, |t| self.hat_value(pos, t))
                            + piecewise_integral(ax, k, c, hi, |t| self.hat_value(pos, t));
                    }
                }
            }
            (PsiFamily::Basis { .. }, _) => {
                let psi = self.basis.as_ref().expect("basis family");
                let mut factors = family
                    .axes()
                    .iter()
                    .zip(psi.axes())
                    .map(|(e, p)| axis_cross_integrals(e, p));
                let first = factors.next().expect("one axis");
                let full = factors.fold(first, |acc, g| acc.kronecker(&g));
                r = full / psi.normalization();
            }
        }
        Ok(r)
    }
}

fn polygon_order(family: &Basis) -> usize {
    let p = family.axis(0).profile();
    if p.is_spline() {
        (p.piece_degree() as usize + 2).max(4)
    } else {
        8
    }
}

fn elements_meeting(ax: &AxisBasis, a: f64, b: f64) -> impl Iterator<Item = usize> + '_ {
    (0..ax.len()).filter(move |&k| {
        let (s0, s1) = ax.support(k);
        s1 > a && s0 < b
    })
}

/// `∫_a^b e_k(t) g(t) dt` with `g` linear on `[a, b]`.
fn piecewise_integral<G: Fn(f64) -> f64>(ax: &AxisBasis, k: usize, a: f64, b: f64, g: G) -> f64 {
    let (s0, s1) = ax.support(k);
    let (a, b) = (a.max(s0), b.min(s1));
    if b <= a {
        return 0.0;
    }
    let (points, order) = ax.quadrature_pieces(a, b, 1);
    let rule = quadrature::GaussLegendre::cached(order);
    points
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], |t| ax.eval(k, t) * g(t)))
        .sum()
}

/// `(∫ e_h p_k)_{h,k}` for axis families at possibly different levels.
pub fn axis_cross_integrals(e: &AxisBasis, p: &AxisBasis) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(e.len(), p.len());
    let fine = if e.scale() >= p.scale() { e } else { p };
    let extra = e.profile().piece_degree().max(p.profile().piece_degree());
    for h in 0..e.len() {
        let (a0, a1) = e.support(h);
        for k in 0..p.len() {
            let (b0, b1) = p.support(k);
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if hi <= lo {
                continue;
            }
            let (points, order) = fine.quadrature_pieces(lo, hi, extra);
            let rule = quadrature::GaussLegendre::cached(order);
            out[(h, k)] = points
                .windows(2)
                .map(|w| rule.integrate(w[0], w[1], |t| e.eval(h, t) * p.eval(k, t)))
                .sum();
        }
    }
    out
}

/// `S f(p) = 2^{−dj'/2} Σ_k f(ξ_{j',k}) φ_{j',k}(p)`.
pub fn quasi_interpolate_s(basis: &Basis, samples: &[f64], p: &Point) -> f64 {
    basis.expansion(samples, p) / basis.normalization()
}

/// Checks that every `ξ_k` lies in the support of `φ_{j',k}`.
pub fn check_s_points(basis: &Basis, points: &[Point]) -> Result<(), SamplingError> {
    for (k, xi) in points.iter().enumerate() {
        let s = basis.support(k);
        let inside = (0..basis.dim()).all(|d| xi[d] >= s[d].0 && xi[d] <= s[d].1);
        if !inside {
            return Err(SamplingError::OutsideSupport { index: k });
        }
    }
    Ok(())
}

/// `sup_x max_{y ∈ B_δ(x) ∩ Ω} |f(x) − f(y)|` over a grid of spacing at most `spacing`.
pub fn oscillation<F: Fn(&Point) -> f64>(f: F, domain: &BoxDomain, delta: f64, spacing: f64) -> f64 {
    let axes: Vec<Vec<f64>> = domain
        .axes()
        .iter()
        .map(|&(a, b)| {
            let m = ((b - a) / spacing - 1e-9).ceil().max(1.0) as usize;
            (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect()
        })
        .collect();
    match axes.as_slice() {
        [xs] => {
            let v: Vec<f64> = xs.iter().map(|&x| f(&[x, 0.0])).collect();
            let h = xs[1] - xs[0];
            let w = (delta / h + 1e-9).floor() as usize;
            let mut worst: f64 = 0.0;
            for i in 0..v.len() {
                let lo = i.saturating_sub(w);
                let hi = (i + w).min(v.len() - 1);
                for j in lo..=hi {
                    worst = worst.max((v[i] - v[j]).abs());
                }
            }
            worst
        }
        [xs, ys] => {
            let v: Vec<Vec<f64>> = xs
                .iter()
                .map(|&x| ys.iter().map(|&y| f(&[x, y])).collect())
                .collect();
            let hx = xs[1] - xs[0];
            let hy = ys[1] - ys[0];
            let wx = (delta / hx + 1e-9).floor() as i64;
            let wy = (delta / hy + 1e-9).floor() as i64;
            let mut worst: f64 = 0.0;
            for i in 0..xs.len() as i64 {
                for j in 0..ys.len() as i64 {
                    for di in -wx..=wx {
                        for dj in -wy..=wy {
                            let (p, q) = (i + di, j + dj);
                            if p < 0 || q < 0 || p >= xs.len() as i64 || q >= ys.len() as i64 {
                                continue;
                            }
                            let dist = ((di as f64 * hx).powi(2) + (dj as f64 * hy).powi(2)).sqrt();
                            if dist <= delta * (1.0 + 1e-12) {
                                let d = (v[i as usize][j as usize] - v[p as usize][q as usize]).abs();
                                worst = worst.max(d);
                            }
                        }
                    }
                }
            }
            worst
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> BoxDomain {
        BoxDomain::interval(0.0, 1.0).unwrap()
    }

    fn pts(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| [x, 0.0]).collect()
    }

    #[test]
    fn density_examples() {
        let c = check_delta_dense(&pts(&[0.0, 0.5, 1.0]), &unit(), 0.3, 0.05).unwrap();
        assert!(c.passed);
        let c = check_delta_dense(&pts(&[0.0, 1.0]), &unit(), 0.3, 0.05).unwrap();
        assert!(!c.passed);
        assert!((c.worst_point[0] - 0.5).abs() < 1e-12);
        assert!((c.worst_distance - 0.5).abs() < 1e-12);
        assert!(!check_delta_dense(&[], &unit(), 0.3, 0.05).unwrap().passed);
        assert!(check_delta_dense(&pts(&[0.5]), &unit(), 0.3, 0.1).is_err());
    }

    #[test]
    fn duplicates_merge_or_conflict() {
        let (set, values) =
            SamplingSet::with_values(&unit(), pts(&[0.2, 0.2, 0.7]), Some(vec![1.0, 1.0, 2.0])).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(values.unwrap(), vec![1.0, 2.0]);
        assert_eq!(
            SamplingSet::with_values(&unit(), pts(&[0.2, 0.2]), Some(vec![1.0, 3.0])).unwrap_err(),
            SamplingError::ConflictingDuplicate { first: 0, second: 1 }
        );
        // Near-coincident nodes are kept.
        assert_eq!(SamplingSet::new(&unit(), pts(&[0.2, 0.2 + 1e-9])).unwrap().len(), 2);
        assert!(SamplingSet::new(&unit(), pts(&[1.2])).is_err());
    }

    #[test]
    fn voronoi_q_reproduces_samples_at_nodes() {
        let set = SamplingSet::new(&unit(), pts(&[0.1, 0.45, 0.9])).unwrap();
        let psi = PartitionOfUnity::new(PsiFamily::Voronoi, &set).unwrap();
        let s = [3.0, -1.0, 2.0];
        for (l, p) in set.nodes().iter().enumerate() {
            assert_eq!(psi.quasi_interpolate(&s, p), s[l]);
        }
        assert_eq!(psi.quasi_interpolate(&s, &[0.2, 0.0]), 3.0);
    }

    #[test]
    fn hat_family_is_a_partition_of_unity() {
        let set = SamplingSet::new(&unit(), pts(&[0.8, 0.1, 0.45])).unwrap();
        let psi = PartitionOfUnity::new(PsiFamily::Hat, &set).unwrap();
        for i in 0..=100 {
            let p = [i as f64 / 100.0, 0.0];
            let total: f64 = (0..3).map(|l| psi.eval(l, &p)).sum();
            assert!((total - 1.0).abs() < 1e-14);
            assert!((psi.quasi_interpolate(&[1.0, 1.0, 1.0], &p) - 1.0).abs() < 1e-14);
        }
        assert_eq!(psi.quasi_interpolate(&[5.0, 6.0, 7.0], &[0.45, 0.0]), 7.0);
    }

    #[test]
    fn family_names_round_trip() {
        for f in [PsiFamily::Voronoi, PsiFamily::Hat, PsiFamily::Basis { level: 3 }] {
            assert_eq!(f.to_string().parse::<PsiFamily>().unwrap(), f);
        }
        assert!("cubic".parse::<PsiFamily>().is_err());
    }

    #[test]
    fn oscillation_of_identity() {
        let osc = oscillation(|p| p[0], &unit(), 0.1, 0.1 / 8.0);
        assert!((osc - 0.1).abs() < 1e-12);
        assert_eq!(oscillation(|_| 4.0, &unit(), 0.1, 0.01), 0.0);
    }
}
