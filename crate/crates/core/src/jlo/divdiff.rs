use crate::error::{Error, Result};

/// Nodes `λ₀..λ_n` of a simplex exponential integral, kept sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexNodes(Vec<f64>);

impl SimplexNodes {
    pub fn new(mut nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Config("simplex integral needs at least one node".into()));
        }
        if let Some(x) = nodes.iter().find(|x| !x.is_finite()) {
            return Err(Error::Config(format!("non-finite node {x}")));
        }
        nodes.sort_by(f64::total_cmp);
        Ok(SimplexNodes(nodes))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn integral(&self) -> f64 {
        simplex_sorted(&self.0)
    }
}

/// Subranges narrower than this use the Taylor expansion instead of the
/// difference quotient.
const TAYLOR_SPREAD: f64 = 1.0;
const TAYLOR_MAX_ORDER: usize = 80;

/// `∫_{Σ_n} exp(−Σ t_k λ_k) dt` over the standard simplex with the
/// `n`-dimensional measure, i.e. `(−1)^n` times the divided difference of
/// `e^{−x}` at the nodes. Order of the nodes does not matter.
pub fn simplex_exp_integral(nodes: &[f64]) -> f64 {
    let mut v = nodes.to_vec();
    v.sort_by(f64::total_cmp);
    simplex_sorted(&v)
}

fn simplex_sorted(x: &[f64]) -> f64 {
    let n = x.len();
    assert!(n > 0, "simplex integral needs at least one node");
    if x[n - 1] - x[0] < TAYLOR_SPREAD {
        return taylor(x);
    }
    // s[i] holds the integral over nodes x[i..i+len]
    let mut s: Vec<f64> = x.iter().map(|v| (-v).exp()).collect();
    for len in 2..=n {
        for i in 0..=(n - len) {
            let j = i + len - 1;
            let spread = x[j] - x[i];
            s[i] = if spread < TAYLOR_SPREAD { taylor(&x[i..=j]) } else { (s[i] - s[i + 1]) / spread };
        }
    }
    s[0]
}

/// `e^{−c} Σ_k (−1)^k h_k(x − c) / (m + k)!` with `c` the midpoint and `h_k`
/// the complete homogeneous symmetric polynomials.
fn taylor(x: &[f64]) -> f64 {
    let m = x.len() - 1;
    let c = 0.5 * (x[0] + x[m]);
    let y: Vec<f64> = x.iter().map(|v| v - c).collect();
    // h[i] = h_k(y_0..y_i) for the current k
    let mut h = vec![1.0f64; y.len()];
    let mut inv_fact = 1.0 / (1..=m).map(|v| v as f64).product::<f64>();
    let mut sum = inv_fact;
    let rho = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    // |h_k(y)| / (m+k)! ≤ ρ^k / (m! k!)
    let mut bound = inv_fact;
    for k in 1..=TAYLOR_MAX_ORDER {
        let mut prev = 0.0;
        for (i, yi) in y.iter().enumerate() {
            // h_k(y_0..y_i) = h_k(y_0..y_{i−1}) + y_i h_{k−1}(y_0..y_i)
            let v = prev + yi * h[i];
            h[i] = v;
            prev = v;
        }
        inv_fact /= (m + k) as f64;
        let term = prev * inv_fact;
        let term = if k % 2 == 1 { -term } else { term };
        sum += term;
        bound *= rho / k as f64;
        if bound <= 1e-18 * sum.abs() {
            break;
        }
    }
    (-c).exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn closed_forms() {
        assert!(close(simplex_exp_integral(&[2.5]), (-2.5f64).exp(), 1e-15));
        assert!(close(simplex_exp_integral(&[0.0, 1.0]), 1.0 - (-1.0f64).exp(), 1e-14));
        let e = (-3.0f64).exp();
        assert!(close(simplex_exp_integral(&[3.0; 4]), e / 6.0, 1e-14));
        let (a, b) = (6.409491804315058f64, 6.878418184281521f64);
        assert!(close(simplex_exp_integral(&[a, b]), ((-a).exp() - (-b).exp()) / (b - a), 1e-14));
        // two distinct far nodes
        let v = simplex_exp_integral(&[1.0, 40.0]);
        assert!(close(v, ((-1.0f64).exp() - (-40.0f64).exp()) / 39.0, 1e-14));
    }

    #[test]
    fn clustered_nodes_are_continuous() {
        let a = simplex_exp_integral(&[5.0, 5.0 + 1e-9, 5.0 + 2e-9]);
        let b = simplex_exp_integral(&[5.0, 5.0, 5.0]);
        assert!(close(a, b, 1e-8));
        let c = simplex_exp_integral(&[1.0, 1.0 + 0.999, 30.0]);
        let d = simplex_exp_integral(&[1.0, 1.0 + 1.001, 30.0]);
        assert!(close(c, d, 1e-2));
    }

    #[test]
    fn symmetric_in_nodes() {
        let a = simplex_exp_integral(&[0.3, 7.0, 2.0, 2.0000001]);
        let b = simplex_exp_integral(&[2.0000001, 2.0, 0.3, 7.0]);
        assert_eq!(a, b);
        assert!(SimplexNodes::new(vec![]).is_err());
        assert!(SimplexNodes::new(vec![f64::NAN]).is_err());
    }
}
