//! Physical constants pinned to the 2018 CODATA adjustment (revised SI).
//!
//! `C` and `H` are exact by definition; `HBAR` is derived as h/2π once, in
//! binary64, so every consumer sees the same bit pattern.  All computations
//! in the crate go through these values — nothing re-derives a constant.

/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 299_792_458.0;

/// Planck constant, J·s (exact).
pub const H: f64 = 6.626_070_15e-34;

/// Reduced Planck constant h/2π, J·s.
pub const HBAR: f64 = H / std::f64::consts::TAU;

/// c², m²/s², precomputed for the weak-field φ/c² factors.
pub const C_SQUARED: f64 = C * C;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hbar_is_h_over_two_pi() {
        assert_eq!(HBAR, H / std::f64::consts::TAU);
        assert!((HBAR - 1.054_571_817e-34).abs() / HBAR < 1e-9);
    }

    #[test]
    fn c_squared_matches_product() {
        assert_eq!(C_SQUARED, C * C);
    }
}
