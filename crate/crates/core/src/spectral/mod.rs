//! Principal eigenvalue problems.
//!
//! * [`qevp`]: the quadratic problem `φ'' + (λ² − Aᾱλ + f'(1))φ = 0` on
//!   `[0, L]`, `L = B^{-1/2}`, whose smallest positive eigenvalue sets the
//!   speed as `u_c → 1`.
//! * [`sl`]: the Sturm–Liouville problem `−ψ'' − kαψ = λψ` on `[0, 1]`
//!   governing weakly advected thin fronts.
//!
//! Both use a uniform grid with ghost-point Neumann ends. The resulting
//! matrices are symmetrised with the trapezoid weights, so grid integrals in
//! this module all use the trapezoid rule.

pub mod qevp;
pub mod sl;
pub mod tridiag;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad;

pub use qevp::{qevp_bounds, qevp_companion, qevp_interface, qevp_principal, qevp_speed_factor};
pub use sl::{
    eigenfunction_half_width, sl_bounds, sl_interface, sl_large_k_asymptote, sl_principal, sl_small_k_coefficient,
    LargeKAsymptote,
};

/// Default number of grid intervals.
pub const DEFAULT_N: usize = 400;
/// Smallest admissible number of grid intervals.
pub const MIN_N: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum EigenProblem {
    Qevp { a: f64, b: f64, fprime_at_one: f64 },
    Sl { k: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSolution {
    pub problem: EigenProblem,
    pub lambda0: f64,
    /// Node coordinates: `[0, L]` for the quadratic problem, `[0, 1]` for SL.
    pub grid: Vec<f64>,
    /// Principal eigenfunction with unit trapezoid integral over the grid.
    pub eigenfunction: Vec<f64>,
    /// Number of grid intervals.
    pub n: usize,
    pub residual: f64,
    pub positivity_margin: f64,
}

impl EigenSolution {
    /// Length of the domain the eigenfunction lives on.
    pub fn length(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// `log φ − ⟨log φ⟩` with the trapezoid mean.
    fn centred_log(&self) -> Result<Vec<f64>> {
        if !(self.positivity_margin > 0.0) {
            return Err(Error::NonPositiveEigenfunction {
                min: self.positivity_margin,
            });
        }
        let logs: Vec<f64> = self.eigenfunction.iter().map(|v| v.ln()).collect();
        let mean = quad::trapezoid_mean(&logs);
        Ok(logs.into_iter().map(|l| l - mean).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsReport {
    pub lower: f64,
    pub upper: f64,
    pub satisfied: bool,
}

impl BoundsReport {
    /// Strict containment, relaxed to closed containment when the bounds coincide.
    pub fn check(lower: f64, upper: f64, value: f64) -> Self {
        let satisfied = if lower < upper {
            lower < value && value < upper
        } else {
            (value - lower).abs() <= 1e-12 * (1.0 + lower.abs())
        };
        Self {
            lower,
            upper,
            satisfied,
        }
    }
}

/// `H(X) = ½(X + √(X² + 4|f'(1)|))`.
pub fn h_function(x: f64, fprime_at_one: f64) -> f64 {
    0.5 * (x + (x * x + 4.0 * fprime_at_one.abs()).sqrt())
}

pub(crate) fn check_grid(n: usize) -> Result<()> {
    if n < MIN_N {
        return Err(invalid("N", format!("need at least {MIN_N} intervals")));
    }
    Ok(())
}

/// Off-diagonal of the symmetrised ghost-point second difference scaled by
/// `c / h²`: `√2` at both ends, `1` inside.
pub(crate) fn neumann_offdiag(n: usize, c: f64) -> Vec<f64> {
    let h = 1.0 / n as f64;
    let mut e = vec![c / (h * h); n];
    e[0] *= std::f64::consts::SQRT_2;
    e[n - 1] *= std::f64::consts::SQRT_2;
    e
}

/// Map a symmetrised vector back to nodal values and normalise the trapezoid
/// integral over `[0, length]` to one.
pub(crate) fn nodal_normalised(z: &[f64], length: f64) -> Vec<f64> {
    let n = z.len() - 1;
    let r = std::f64::consts::SQRT_2;
    let mut phi = z.to_vec();
    phi[0] *= r;
    phi[n] *= r;
    let integral = quad::trapezoid(&phi, length / n as f64);
    phi.iter_mut().for_each(|v| *v /= integral);
    phi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_function_examples() {
        assert!((h_function(0.0, -1.0) - 1.0).abs() < 1e-15);
        assert!((h_function(0.5, -1.0) - 1.280776406).abs() < 1e-9);
        assert!((h_function(-0.5, -1.0) - 0.780776406).abs() < 1e-9);
        let xs: Vec<f64> = (-50..=50).map(|i| i as f64 * 0.2).collect();
        let hs: Vec<f64> = xs.iter().map(|&x| h_function(x, -1.0)).collect();
        assert!(hs.iter().all(|&h| h > 0.0));
        assert!(hs.windows(2).all(|w| w[1] > w[0]));
    }
}
