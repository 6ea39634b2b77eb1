//! Complete elliptic integral and the Gauss hypergeometric series.

use std::f64::consts::PI;

/// K(k) = ∫₀^{π/2} dθ / √(1 − k² sin²θ), with modulus k ∈ [0, 1).
pub fn elliptic_k(k: f64) -> f64 {
    elliptic_k_complement((1.0 - k * k).sqrt())
}

/// K as a function of the complementary modulus k′ = √(1 − k²), which keeps
/// precision as k → 1.
pub fn elliptic_k_complement(kp: f64) -> f64 {
    let (mut a, mut b) = (1.0f64, kp);
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    PI / (2.0 * a)
}

/// ₂F₁(a, b; c; z) by direct summation, for |z| < 1.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    for n in 0..100_000u32 {
        let n = f64::from(n);
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Same function through Euler's transformation
/// ₂F₁(a,b;c;z) = (1−z)^{c−a−b} ₂F₁(c−a, c−b; c; z).
pub fn hyp2f1_euler(a: f64, b: f64, c: f64, z: f64) -> f64 {
    (1.0 - z).powf(c - a - b) * hyp2f1(c - a, c - b, c, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_reference_values() {
        assert!((elliptic_k(0.0) - PI / 2.0).abs() < 1e-15);
        // K(1/√2) = Γ(1/4)² / (4√π)
        let g = statrs::function::gamma::gamma(0.25);
        let want = g * g / (4.0 * PI.sqrt());
        assert!((elliptic_k(0.5f64.sqrt()) - want).abs() < 1e-14);
    }

    #[test]
    fn series_known_closed_form() {
        // ₂F₁(1,1;2;z) = −ln(1−z)/z
        for z in [0.1, 0.5, 0.9] {
            let want = -(1.0 - z as f64).ln() / z;
            assert!((hyp2f1(1.0, 1.0, 2.0, z) - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn euler_form_agrees() {
        for i in 1..=99 {
            let z = i as f64 / 100.0;
            let a = hyp2f1(1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, z);
            let b = hyp2f1_euler(1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, z);
            assert!((a - b).abs() < 1e-9, "z={z}: {a} vs {b}");
        }
    }
}
