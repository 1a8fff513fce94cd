//! Gauss–Legendre rules and composite integration over dyadic subintervals.

use std::sync::OnceLock;

/// A Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

const MAX_CACHED_ORDER: usize = 32;

impl GaussLegendre {
    /// Computes the `order`-point rule by Newton iteration on the three-term recurrence.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss–Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th largest root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared cached rule.
    pub fn cached(order: usize) -> &'static GaussLegendre {
        static RULES: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
        let rules = RULES.get_or_init(|| (1..=MAX_CACHED_ORDER).map(GaussLegendre::new).collect());
        assert!(
            (1..=MAX_CACHED_ORDER).contains(&order),
            "order {order} outside cached range"
        );
        &rules[order - 1]
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Calls `visit(x, w)` for every mapped node of the rule on `[a, b]`.
    pub fn for_each_point<F: FnMut(f64, f64)>(&self, a: f64, b: f64, mut visit: F) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            visit(mid + half * x, w * half);
        }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Splits `[a, b]` at every point `origin + i * step` strictly inside it.
pub fn dyadic_breakpoints(a: f64, b: f64, origin: f64, step: f64) -> Vec<f64> {
    let mut points = vec![a];
    if b > a {
        let first = ((a - origin) / step).floor() as i64 + 1;
        let mut i = first;
        loop {
            let t = origin + i as f64 * step;
            if t >= b - 1e-14 * step {
                break;
            }
            if t > a + 1e-14 * step {
                points.push(t);
            }
            i += 1;
        }
    }
    points.push(b);
    points
}

/// Composite Gauss–Legendre integration of `f` on `[a, b]`, subdivided at the
/// grid `origin + i * step`.
pub fn composite<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    origin: f64,
    step: f64,
    order: usize,
    mut f: F,
) -> f64 {
    if b <= a {
        return 0.0;
    }
    let rule = GaussLegendre::cached(order);
    dyadic_breakpoints(a, b, origin, step)
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &mut f))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_rules_match_tabulated_values() {
        let r = GaussLegendre::new(2);
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes()[1] - x).abs() < 1e-15);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15);
        let r = GaussLegendre::new(3);
        assert!((r.nodes()[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((r.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn order_q_rule_is_exact_to_degree_2q_minus_1() {
        for q in 1..=12 {
            let rule = GaussLegendre::cached(q);
            for p in 0..(2 * q) {
                let got = rule.integrate(0.0, 2.0, |x| x.powi(p as i32));
                let exact = 2f64.powi(p as i32 + 1) / (p as f64 + 1.0);
                assert!(
                    (got - exact).abs() < 1e-12 * exact.max(1.0),
                    "q={q} p={p}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn composite_handles_kinks_at_breakpoints() {
        // |x - 1| has a kink on the unit grid.
        let got = composite(0.0, 3.0, 0.0, 1.0, 2, |x: f64| (x - 1.0).abs());
        assert!((got - 2.5).abs() < 1e-14);
        let pts = dyadic_breakpoints(0.3, 1.7, 0.0, 0.5);
        assert_eq!(pts, vec![0.3, 0.5, 1.0, 1.5, 1.7]);
    }
}
