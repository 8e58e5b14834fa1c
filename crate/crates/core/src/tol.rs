//! Three-valued numerical verdicts and the guard bands that produce them.
//!
//! Every orthogonality decision in this crate is a comparison of a
//! non-negative, scale-normalized margin against a guard band: margins below
//! `tol_lo` decide one way, margins at or above `tol_hi` the other, and the
//! band in between is reported as `Indeterminate` so that borderline
//! floating-point cases never masquerade as clean verdicts.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Outcome of a tolerance-banded orthogonality test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Orthogonal,
    NotOrthogonal,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Orthogonal => write!(f, "orthogonal"),
            Verdict::NotOrthogonal => write!(f, "not-orthogonal"),
            Verdict::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

/// A verdict together with the margin that produced it.
///
/// The margin is the normalized quantity that was compared against the guard
/// band; `Indeterminate` occurs exactly when `|margin|` lies inside
/// `[tol_lo, tol_hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriState {
    pub verdict: Verdict,
    pub margin: f64,
}

impl TriState {
    pub fn orthogonal(margin: f64) -> Self {
        TriState { verdict: Verdict::Orthogonal, margin }
    }

    pub fn is_orthogonal(&self) -> bool {
        self.verdict == Verdict::Orthogonal
    }

    pub fn is_not_orthogonal(&self) -> bool {
        self.verdict == Verdict::NotOrthogonal
    }

    pub fn is_indeterminate(&self) -> bool {
        self.verdict == Verdict::Indeterminate
    }
}

/// Guard band separating "zero up to rounding" from "genuinely nonzero".
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuardBand {
    pub tol_lo: f64,
    pub tol_hi: f64,
}

impl GuardBand {
    /// Band for exact vector-level margins (line minimizations resolve the
    /// margin to ~1e-10 of the norm scale).
    pub const VECTOR: GuardBand = GuardBand { tol_lo: 1e-8, tol_hi: 1e-6 };

    /// Band for supporting-functional pairings. Pairing values and
    /// definitional norm drops scale with different exponents (quadratically
    /// for smooth norms), so the indeterminate ceiling is kept wide enough
    /// that a pairing below it can never correspond to a drop above the
    /// vector band.
    pub const SUPPORT: GuardBand = GuardBand { tol_lo: 1e-8, tol_hi: 3e-3 };

    /// Band for operator-level margins computed over discretized spheres.
    /// Local refinement brings those margins to ~1e-8 accuracy, and the
    /// factor-100 gap keeps routes with different error profiles from
    /// contradicting each other instead of going indeterminate.
    pub const OPERATOR: GuardBand = GuardBand { tol_lo: 1e-7, tol_hi: 1e-5 };

    pub fn new(tol_lo: f64, tol_hi: f64) -> crate::Result<Self> {
        if !(tol_lo.is_finite() && tol_hi.is_finite()) || tol_lo < 0.0 || tol_hi <= tol_lo {
            return Err(crate::Error::InvalidSpec(format!(
                "guard band requires 0 <= tol_lo < tol_hi, got [{tol_lo}, {tol_hi})"
            )));
        }
        Ok(GuardBand { tol_lo, tol_hi })
    }

    /// Classify a normalized margin.
    pub fn classify(&self, margin: f64) -> TriState {
        let m = margin.abs();
        let verdict = if m < self.tol_lo {
            Verdict::Orthogonal
        } else if m >= self.tol_hi {
            Verdict::NotOrthogonal
        } else {
            Verdict::Indeterminate
        };
        TriState { verdict, margin }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_band_edges() {
        let band = GuardBand::VECTOR;
        assert_eq!(band.classify(0.0).verdict, Verdict::Orthogonal);
        assert_eq!(band.classify(9.9e-9).verdict, Verdict::Orthogonal);
        assert_eq!(band.classify(1e-8).verdict, Verdict::Indeterminate);
        assert_eq!(band.classify(9.9e-7).verdict, Verdict::Indeterminate);
        assert_eq!(band.classify(1e-6).verdict, Verdict::NotOrthogonal);
        assert_eq!(band.classify(0.5).verdict, Verdict::NotOrthogonal);
    }

    #[test]
    fn classification_uses_absolute_margin() {
        let band = GuardBand::VECTOR;
        assert_eq!(band.classify(-1e-12).verdict, Verdict::Orthogonal);
        assert_eq!(band.classify(-1.0).verdict, Verdict::NotOrthogonal);
    }

    #[test]
    fn invalid_bands_rejected() {
        assert!(GuardBand::new(1e-6, 1e-8).is_err());
        assert!(GuardBand::new(-1.0, 1.0).is_err());
        assert!(GuardBand::new(f64::NAN, 1.0).is_err());
    }
}
