//! Radial decomposition of the Coulomb kernel into ball indicators:
//! `1/|x − y| = ∫₀^∞ dr/(πr⁵) ∫ d³z χ_{B(z,r)}(x) χ_{B(z,r)}(y)`.
//!
//! The `z`-integral is the volume of the lens in which two radius-`r`
//! balls with centers `d = |x − y|` apart overlap, so only a 1D radial
//! integral is left to quadrature.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Volume of the intersection of two balls of radius `r` whose centers are
/// `d` apart.
pub fn lens_volume(d: f64, r: f64) -> Result<f64> {
    if !(d >= 0.0) || !(r > 0.0) {
        return Err(Error::Invalid(format!("lens volume needs d ≥ 0 and r > 0, got d = {d}, r = {r}")));
    }
    if d >= 2.0 * r {
        return Ok(0.0);
    }
    Ok(PI / 12.0 * (4.0 * r + d) * (2.0 * r - d).powi(2))
}

/// Composite Simpson rule in `s = ln r` on `[d/2, r_max_factor·d]`, plus
/// the exact tail beyond the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdlQuadrature {
    /// Cutoff as a multiple of `d`.
    pub r_max_factor: f64,
    /// Number of Simpson panels (rounded up to even).
    pub panels: usize,
}

impl Default for FdlQuadrature {
    fn default() -> Self {
        FdlQuadrature {
            r_max_factor: 50.0,
            panels: 2000,
        }
    }
}

/// `∫_R^∞ (4/(3r²) − d/r³ + d³/(12r⁵)) dr`.
pub fn analytic_tail(d: f64, r_max: f64) -> f64 {
    4.0 / (3.0 * r_max) - d / (2.0 * r_max * r_max) + d.powi(3) / (48.0 * r_max.powi(4))
}

/// Closed-form `∫_a^b (16r³ − 12r²d + d³)/(12r⁵) dr`.
pub fn radial_antiderivative_integral(d: f64, a: f64, b: f64) -> f64 {
    let f = |r: f64| -4.0 / (3.0 * r) + d / (2.0 * r * r) - d.powi(3) / (48.0 * r.powi(4));
    f(b) - f(a)
}

/// `∫ dr lens_volume(d, r)/(πr⁵)` over `r ≥ d/2`, which should equal `1/d`.
pub fn fdl_radial_integral(d: f64, quad: &FdlQuadrature) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Invalid(format!("separation must be positive, got {d}")));
    }
    if !(quad.r_max_factor > 0.5) || quad.panels == 0 {
        return Err(Error::Invalid("quadrature needs r_max_factor > 1/2 and at least one panel".into()));
    }
    let panels = quad.panels + quad.panels % 2;
    let r_max = quad.r_max_factor * d;
    let (s0, s1) = ((0.5 * d).ln(), r_max.ln());
    let h = (s1 - s0) / panels as f64;
    let mut sum = 0.0;
    for i in 0..=panels {
        let r = (s0 + i as f64 * h).exp();
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * lens_volume(d, r)? / (PI * r.powi(4));
    }
    Ok(sum * h / 3.0 + analytic_tail(d, r_max))
}

/// One row of the `(d, computed, expected, abs_err)` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdlRow {
    pub d: f64,
    pub computed: f64,
    pub expected: f64,
    pub abs_err: f64,
}

pub fn fdl_row(d: f64, quad: &FdlQuadrature) -> Result<FdlRow> {
    let computed = fdl_radial_integral(d, quad)?;
    let expected = 1.0 / d;
    Ok(FdlRow {
        d,
        computed,
        expected,
        abs_err: (computed - expected).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lens_examples() {
        assert!((lens_volume(0.0, 1.3).unwrap() - 4.0 / 3.0 * PI * 1.3f64.powi(3)).abs() < 1e-13);
        assert_eq!(lens_volume(2.0, 1.0).unwrap(), 0.0);
        assert!((lens_volume(1.0, 1.0).unwrap() - 5.0 * PI / 12.0).abs() < 1e-15);
        assert!(lens_volume(-1.0, 1.0).is_err());
        assert!(lens_volume(1.0, 0.0).is_err());
    }

    #[test]
    fn lens_matches_cap_slices() {
        // each half of the lens is a cap of height r − d/2; integrate π(r² − x²) over the cap
        for (d, r) in [(1.0, 1.0), (0.3, 2.0), (1.9, 1.0)] {
            let lo = d / 2.0;
            let m = 20000;
            let h = (r - lo) / m as f64;
            let cap: f64 = (0..m)
                .map(|i| {
                    let x = lo + (i as f64 + 0.5) * h;
                    PI * (r * r - x * x) * h
                })
                .sum();
            assert!((2.0 * cap - lens_volume(d, r).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn antiderivative_oracle() {
        for d in [0.5, 1.0, 2.0, 7.0] {
            let full = radial_antiderivative_integral(d, d / 2.0, 1e9 * d) + analytic_tail(d, 1e9 * d);
            assert!((full - 1.0 / d).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_integral_is_coulomb() {
        let q = FdlQuadrature::default();
        for d in [0.5, 1.0, 2.0] {
            assert!(fdl_row(d, &q).unwrap().abs_err < 1e-6);
        }
        assert!(fdl_radial_integral(0.0, &q).is_err());
        assert!(fdl_radial_integral(-1.0, &q).is_err());
    }

    #[test]
    fn doubling_panels_converges() {
        let err = |p| fdl_row(1.0, &FdlQuadrature { r_max_factor: 50.0, panels: p }).unwrap().abs_err;
        for p in [16, 32, 64] {
            assert!(err(2 * p) * 4.0 <= err(p), "{p}: {} {}", err(p), err(2 * p));
        }
    }
}
