use super::MetricsError;

/// Error-free product `a·b = hi + lo`.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    (hi, a.mul_add(b, -hi))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Probability that a walk which stays inside its partition with
/// probability `p` per step does so for all `m` steps.
///
/// Evaluates `f(j) = p·f(j+1)`, `f(m) = 1` from the tail down to `f(0)`.
/// The running value is carried in double-double precision so the result is
/// the correctly rounded `pᵐ` for any realistic `m`.
pub fn chain_containment_probability(p: f64, m: usize) -> Result<f64, MetricsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(MetricsError::Domain {
            name: "p",
            value: p,
            domain: "(0, 1)",
        });
    }
    let (mut hi, mut lo) = (1.0f64, 0.0f64);
    for _ in (0..m).rev() {
        let (ph, pl) = two_prod(hi, p);
        let (h, l) = quick_two_sum(ph, pl + lo * p);
        hi = h;
        lo = l;
    }
    Ok(hi + lo)
}

/// Chernoff-type bound on a length-`t` chain staying inside a set of
/// stationary mass `pi_a`, for a chain with eigenvalue gap `eps`:
/// `(1 + (1−π)ε/10)·exp(−t(1−π)²ε/20)`.
pub fn full_visibility_bound(pi_a: f64, eps: f64, t: u64) -> Result<f64, MetricsError> {
    if !(0.0..=1.0).contains(&pi_a) {
        return Err(MetricsError::Domain {
            name: "pi_a",
            value: pi_a,
            domain: "[0, 1]",
        });
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(MetricsError::Domain {
            name: "eps",
            value: eps,
            domain: "(0, 1]",
        });
    }
    let out = 1.0 - pi_a;
    Ok((1.0 + out * eps / 10.0) * (-(t as f64) * out * out * eps / 20.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_examples() {
        assert_eq!(chain_containment_probability(0.3, 0).unwrap(), 1.0);
        assert_eq!(chain_containment_probability(0.5, 15).unwrap(), 0.5f64.powi(15));
        let twenty = chain_containment_probability(0.5, 20).unwrap();
        assert!((twenty - 9.5367e-7).abs() < 1e-10);
        assert!(chain_containment_probability(1.0, 3).is_err());
        assert!(chain_containment_probability(0.0, 3).is_err());
        assert!(chain_containment_probability(f64::NAN, 3).is_err());
    }

    #[test]
    fn bound_examples() {
        assert_eq!(full_visibility_bound(0.5, 0.1, 0).unwrap(), 1.0 + 0.5 * 0.1 / 10.0);
        let v = full_visibility_bound(0.5, 0.1, 100).unwrap();
        assert!((v - 1.005 * (-0.125f64).exp()).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for t in 0..200 {
            let b = full_visibility_bound(0.3, 0.2, t).unwrap();
            assert!(b < last);
            last = b;
        }
        assert!(full_visibility_bound(1.2, 0.1, 1).is_err());
        assert!(full_visibility_bound(0.5, 0.0, 1).is_err());
    }
}
