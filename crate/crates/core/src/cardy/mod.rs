//! Continuum crossing probabilities.
//!
//! Corner convention for rectangles (width/height = aspect): A bottom-right,
//! B top-right, C top-left, D bottom-left. The crossing event joins the right
//! side ∂_{AB} to the left side ∂_{CD}, so longer rectangles cross less often.

mod special;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

pub use special::{elliptic_k, elliptic_k_complement, hyp2f1, hyp2f1_euler};

use crate::error::{Error, Result};

/// Position of D̂ on the side from Ĉ to Â of the equilateral triangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrianglePosition(f64);

impl TrianglePosition {
    pub fn new(t: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&t) {
            Ok(Self(t))
        } else {
            Err(Error::InvalidParameter(format!(
                "triangle position {t} outside [0, 1]"
            )))
        }
    }

    pub fn t(self) -> f64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Quad {
    Triangle { t: f64 },
    Rectangle { aspect: f64 },
}

impl Quad {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Quad::Triangle { t } => TrianglePosition::new(t).map(|_| ()),
            Quad::Rectangle { aspect } if aspect > 0.0 && aspect.is_finite() => Ok(()),
            Quad::Rectangle { aspect } => Err(Error::NonPositiveAspect(aspect)),
        }
    }

    pub fn prediction(&self) -> Result<f64> {
        match *self {
            Quad::Triangle { t } => Ok(triangle_prediction(TrianglePosition::new(t)?)),
            Quad::Rectangle { aspect } => rectangle_prediction(aspect),
        }
    }
}

/// On the equilateral triangle φ is the identity, so the crossing
/// probability is |ĈD̂| / |ĈÂ| = t.
pub fn triangle_prediction(t: TrianglePosition) -> f64 {
    t.0
}

/// The m ∈ (0, 1) with K(√m) / K(√(1−m)) = aspect. Increasing in aspect,
/// m(1) = 1/2 and m(1/aspect) = 1 − m(aspect).
pub fn rectangle_cross_ratio(aspect: f64) -> Result<f64> {
    cross_ratio_pair(aspect).map(|(m, _)| m)
}

/// (m, 1 − m), each accurate to relative precision even where the other rounds to 1.
fn cross_ratio_pair(aspect: f64) -> Result<(f64, f64)> {
    if !(aspect > 0.0 && aspect.is_finite()) {
        return Err(Error::NonPositiveAspect(aspect));
    }
    if aspect == 1.0 {
        return Ok((0.5, 0.5));
    }
    // Solve in the symmetric variable to keep both tails accurate.
    let flip = aspect < 1.0;
    let r = if flip { 1.0 / aspect } else { aspect };
    // g(q) = K(√(1−q)) / K(√q) − r is decreasing in q ∈ (0, 1/2]; q = 1 − m.
    let g = |q: f64| elliptic_k_complement(q.sqrt()) / elliptic_k_complement((1.0 - q).sqrt()) - r;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    // q ≈ 16 e^{−π r} for large r gives a tight lower bracket.
    let guess = 16.0 * (-std::f64::consts::PI * r).exp();
    if guess < 0.5 && g(guess * 0.5) > 0.0 {
        lo = guess * 0.5;
    }
    if lo == 0.0 {
        lo = f64::MIN_POSITIVE;
    }
    for _ in 0..200 {
        let mid = if hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-17 * hi {
            break;
        }
    }
    let q = 0.5 * (lo + hi);
    Ok(if flip { (q, 1.0 - q) } else { (1.0 - q, q) })
}

/// Cardy's formula in the cross-ratio η:
/// P(η) = Γ(2/3) / (Γ(1/3)Γ(4/3)) · η^{1/3} · ₂F₁(1/3, 2/3; 4/3; η).
/// Evaluated as 1 − P(1−η) above η = 1/2.
pub fn cardy_hypergeometric(eta: f64) -> f64 {
    if eta <= 0.0 {
        return 0.0;
    }
    if eta >= 1.0 {
        return 1.0;
    }
    if eta > 0.5 {
        return 1.0 - cardy_hypergeometric(1.0 - eta);
    }
    let norm = gamma(2.0 / 3.0) / (gamma(1.0 / 3.0) * gamma(4.0 / 3.0));
    norm * eta.cbrt() * hyp2f1(1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, eta)
}

/// Probability that the right side of a width × height rectangle is joined to
/// the left side, with aspect = width / height.
pub fn rectangle_prediction(aspect: f64) -> Result<f64> {
    let (_, q) = cross_ratio_pair(aspect)?;
    Ok(cardy_hypergeometric(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_identity() {
        for t in [0.0, 0.25, 0.5, 1.0] {
            assert_eq!(triangle_prediction(TrianglePosition::new(t).unwrap()), t);
        }
        assert!(TrianglePosition::new(1.5).is_err());
    }

    #[test]
    fn square_fixed_point() {
        assert_eq!(rectangle_cross_ratio(1.0).unwrap(), 0.5);
        assert!((rectangle_prediction(1.0).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(
            rectangle_cross_ratio(0.0).unwrap_err(),
            Error::NonPositiveAspect(0.0)
        );
        assert!(rectangle_prediction(-1.0).is_err());
    }

    #[test]
    fn cross_ratio_is_monotone_with_inverse_symmetry() {
        let mut last = 0.0;
        for i in 1..60 {
            let a = 0.1 * i as f64;
            let m = rectangle_cross_ratio(a).unwrap();
            assert!(m > last);
            last = m;
            let mi = rectangle_cross_ratio(1.0 / a).unwrap();
            assert!((m + mi - 1.0).abs() < 1e-13);
        }
        assert!(rectangle_cross_ratio(0.05).unwrap() < 1e-20);
        // far tail: P ≈ const · (16 e^{−π a})^{1/3}
        let p = rectangle_prediction(20.0).unwrap();
        let norm = gamma(2.0 / 3.0) / (gamma(1.0 / 3.0) * gamma(4.0 / 3.0));
        let approx = norm * (16.0 * (-std::f64::consts::PI * 20.0).exp()).cbrt();
        assert!((p / approx - 1.0).abs() < 1e-6, "{p} {approx}");
    }

    #[test]
    fn duality() {
        for i in 1..=100 {
            let m = i as f64 / 101.0;
            assert!((cardy_hypergeometric(m) + cardy_hypergeometric(1.0 - m) - 1.0).abs() < 1e-9);
            let a = 0.2 + 0.05 * i as f64;
            let s = rectangle_prediction(a).unwrap() + rectangle_prediction(1.0 / a).unwrap();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn prediction_decreases_in_aspect() {
        let mut last = 1.0;
        for i in 1..80 {
            let p = rectangle_prediction(0.1 * i as f64).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn series_is_continuous_across_the_switch() {
        let lo = cardy_hypergeometric(0.5 - 1e-9);
        let hi = cardy_hypergeometric(0.5 + 1e-9);
        assert!((hi - lo).abs() < 1e-8);
    }
}
