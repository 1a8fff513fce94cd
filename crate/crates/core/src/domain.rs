//! Axis-aligned boxes in one or two dimensions.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// A point of the domain. One-dimensional points leave the second coordinate at zero.
pub type Point = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("interval [{0}, {1}] is empty or not finite")]
    EmptyInterval(f64, f64),
    #[error("only dimensions 1 and 2 are supported, got {0}")]
    Dimension(usize),
    #[error("cannot parse domain '{0}': expected a,b or a,b;c,d or a,b^2")]
    Parse(String),
}

/// `Ω = [α₁, β₁] (× [α₂, β₂])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    axes: Vec<(f64, f64)>,
}

impl BoxDomain {
    pub fn new(axes: Vec<(f64, f64)>) -> Result<Self, DomainError> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(DomainError::Dimension(axes.len()));
        }
        for &(a, b) in &axes {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(DomainError::EmptyInterval(a, b));
            }
        }
        Ok(Self { axes })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self, DomainError> {
        Self::new(vec![(a, b)])
    }

    pub fn rectangle(x: (f64, f64), y: (f64, f64)) -> Result<Self, DomainError> {
        Self::new(vec![x, y])
    }

    pub fn square(a: f64, b: f64) -> Result<Self, DomainError> {
        Self::new(vec![(a, b), (a, b)])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[(f64, f64)] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> (f64, f64) {
        self.axes[i]
    }

    /// Lebesgue measure `|Ω|`.
    pub fn measure(&self) -> f64 {
        self.axes.iter().map(|(a, b)| b - a).product()
    }

    pub fn diameter(&self) -> f64 {
        self.axes
            .iter()
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.axes
            .iter()
            .enumerate()
            .all(|(i, &(a, b))| p[i] >= a && p[i] <= b)
    }

    /// Nearest point of the box.
    pub fn clamp(&self, p: &Point) -> Point {
        let mut q = *p;
        for (i, &(a, b)) in self.axes.iter().enumerate() {
            q[i] = q[i].clamp(a, b);
        }
        q
    }

    /// Euclidean distance between points in this domain's dimension.
    pub fn distance(&self, p: &Point, q: &Point) -> f64 {
        (0..self.dim())
            .map(|i| (p[i] - q[i]) * (p[i] - q[i]))
            .sum::<f64>()
            .sqrt()
    }

    /// Uniform grid with spacing at most `tau` per axis, endpoints included, x-major.
    pub fn grid(&self, tau: f64) -> Vec<Point> {
        let axes: Vec<Vec<f64>> = self
            .axes
            .iter()
            .map(|&(a, b)| {
                let m = ((b - a) / tau - 1e-9).ceil().max(1.0) as usize;
                (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect()
            })
            .collect();
        match axes.as_slice() {
            [xs] => xs.iter().map(|&x| [x, 0.0]).collect(),
            [xs, ys] => xs
                .iter()
                .flat_map(|&x| ys.iter().map(move |&y| [x, y]))
                .collect(),
            _ => unreachable!("dimension checked at construction"),
        }
    }
}

impl fmt::Display for BoxDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.axes.iter().map(|(a, b)| format!("{a},{b}")).collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl FromStr for BoxDomain {
    type Err = DomainError;

    /// Accepts `a,b`, `a,b;c,d` and `a,b^2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DomainError::Parse(s.to_string());
        let s = s.trim();
        let (body, power) = match s.split_once('^') {
            Some((body, p)) => (body, p.trim().parse::<usize>().map_err(|_| err())?),
            None => (s, 1),
        };
        let mut axes = Vec::new();
        for part in body.split(';') {
            let part = part.trim().trim_start_matches(['[', '(']).trim_end_matches([']', ')']);
            let (a, b) = part.split_once(',').ok_or_else(err)?;
            let a = a.trim().parse::<f64>().map_err(|_| err())?;
            let b = b.trim().parse::<f64>().map_err(|_| err())?;
            axes.push((a, b));
        }
        if power != 1 {
            if axes.len() != 1 {
                return Err(err());
            }
            axes = vec![axes[0]; power];
        }
        Self::new(axes)
    }
}
