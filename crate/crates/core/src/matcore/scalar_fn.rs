use alloc::format;
use alloc::vec::Vec;

use crate::num;
use crate::{Error, Result};

/// Closed-form expression used on one piece of a [`ScalarFn`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Formula {
    Constant(f64),
    /// `slope * t + intercept`
    Affine { slope: f64, intercept: f64 },
    /// `1 / sqrt(t)`
    InvSqrt,
}

impl Formula {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Formula::Constant(c) => c,
            Formula::Affine { slope, intercept } => slope * t + intercept,
            Formula::InvSqrt => 1.0 / num::sqrt(t),
        }
    }
}

/// One closed interval `[lo, hi]` with its formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub formula: Formula,
}

/// What happens to arguments not covered by any piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outside {
    /// Report a domain error.
    Error,
    /// Evaluate the nearest end piece at the nearest endpoint.
    Clamp,
}

/// Continuous piecewise real function on an interval of ℝ.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFn {
    pieces: Vec<Piece>,
    outside: Outside,
}

impl ScalarFn {
    /// Pieces must be sorted, share endpoints and agree there.
    pub fn new(pieces: Vec<Piece>, outside: Outside) -> Result<ScalarFn> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("scalar function needs at least one piece".into()));
        }
        for p in &pieces {
            if !(p.lo <= p.hi) {
                return Err(Error::InvalidInput(format!("empty piece [{}, {}]", p.lo, p.hi)));
            }
        }
        for w in pieces.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.hi != b.lo {
                return Err(Error::InvalidInput(format!(
                    "pieces not connected at {} / {}",
                    a.hi, b.lo
                )));
            }
            let (va, vb) = (a.formula.eval(a.hi), b.formula.eval(b.lo));
            if num::abs(va - vb) > 1e-12 * (1.0 + num::abs(va)) {
                return Err(Error::InvalidInput(format!(
                    "discontinuity at {}: {} vs {}",
                    a.hi, va, vb
                )));
            }
        }
        Ok(ScalarFn { pieces, outside })
    }

    fn total(pieces: Vec<Piece>) -> ScalarFn {
        ScalarFn::new(pieces, Outside::Error).expect("built-in function is continuous")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn outside(&self) -> Outside {
        self.outside
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if let Some(p) = self.pieces.iter().find(|p| p.lo <= t && t <= p.hi) {
            return Ok(p.formula.eval(t));
        }
        match self.outside {
            Outside::Error => Err(Error::Domain { eigenvalue: t }),
            Outside::Clamp => {
                let (lo, hi) = self.domain();
                if t < lo {
                    Ok(self.pieces[0].formula.eval(lo))
                } else {
                    Ok(self.pieces[self.pieces.len() - 1].formula.eval(hi))
                }
            }
        }
    }

    pub fn identity() -> ScalarFn {
        ScalarFn::total(alloc::vec![Piece {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            formula: Formula::Affine {
                slope: 1.0,
                intercept: 0.0
            },
        }])
    }

    /// 0 up to `lo`, 1 from `hi` on, linear in between.
    pub fn ramp(lo: f64, hi: f64) -> ScalarFn {
        let slope = 1.0 / (hi - lo);
        ScalarFn::total(alloc::vec![
            Piece {
                lo: f64::NEG_INFINITY,
                hi: lo,
                formula: Formula::Constant(0.0)
            },
            Piece {
                lo,
                hi,
                formula: Formula::Affine {
                    slope,
                    intercept: -lo * slope
                }
            },
            Piece {
                lo: hi,
                hi: f64::INFINITY,
                formula: Formula::Constant(1.0)
            },
        ])
    }

    /// The spectral retraction onto projections: 0 on `t ≤ 1/3`, `3t − 1`
    /// on `(1/3, 2/3)`, 1 on `t ≥ 2/3`.
    pub fn projection_retraction() -> ScalarFn {
        ScalarFn::ramp(1.0 / 3.0, 2.0 / 3.0)
    }

    /// Cutoff used to extract a central projection: 0 on `t ≤ 1/4`, 1 on `t ≥ 3/4`.
    pub fn central_cutoff() -> ScalarFn {
        ScalarFn::ramp(0.25, 0.75)
    }

    /// Normalizer of the partial-isometry corrector: 0 on `t ≤ 1/4`,
    /// `1/√t` on `t ≥ 3/4`, linear in between.
    pub fn partial_isometry_normalizer() -> ScalarFn {
        let top = 2.0 / num::sqrt(3.0);
        let slope = top / 0.5;
        ScalarFn::total(alloc::vec![
            Piece {
                lo: f64::NEG_INFINITY,
                hi: 0.25,
                formula: Formula::Constant(0.0)
            },
            Piece {
                lo: 0.25,
                hi: 0.75,
                formula: Formula::Affine {
                    slope,
                    intercept: -0.25 * slope
                }
            },
            Piece {
                lo: 0.75,
                hi: f64::INFINITY,
                formula: Formula::InvSqrt
            },
        ])
    }

    /// `1/√t` on `(0, ∞)`.
    pub fn inv_sqrt() -> ScalarFn {
        ScalarFn::total(alloc::vec![Piece {
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
            formula: Formula::InvSqrt,
        }])
    }

    /// Piecewise-linear interpolation through `(x_k, y_k)`, constant beyond the ends.
    pub fn interpolate(xs: &[f64], ys: &[f64]) -> Result<ScalarFn> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::InvalidInput("interpolation nodes and values differ in length".into()));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("interpolation nodes must increase".into()));
        }
        let mut pieces = Vec::with_capacity(xs.len() + 1);
        pieces.push(Piece {
            lo: f64::NEG_INFINITY,
            hi: xs[0],
            formula: Formula::Constant(ys[0]),
        });
        for k in 0..xs.len() - 1 {
            let slope = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
            pieces.push(Piece {
                lo: xs[k],
                hi: xs[k + 1],
                formula: Formula::Affine {
                    slope,
                    intercept: ys[k] - slope * xs[k],
                },
            });
        }
        pieces.push(Piece {
            lo: xs[xs.len() - 1],
            hi: f64::INFINITY,
            formula: Formula::Constant(ys[ys.len() - 1]),
        });
        ScalarFn::new(pieces, Outside::Error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retraction_values() {
        let h = ScalarFn::projection_retraction();
        assert_eq!(h.eval(0.05).unwrap(), 0.0);
        assert_eq!(h.eval(0.95).unwrap(), 1.0);
        assert!((h.eval(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(h.eval(-3.0).unwrap(), 0.0);
    }

    #[test]
    fn normalizer_is_continuous_and_matches_inverse_sqrt() {
        let f = ScalarFn::partial_isometry_normalizer();
        assert_eq!(f.eval(0.1).unwrap(), 0.0);
        assert!((f.eval(0.81).unwrap() - 1.0 / 0.9).abs() < 1e-15);
        assert!((f.eval(0.75).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((f.eval(1.5).unwrap() - 1.0 / 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_discontinuous_pieces() {
        let pieces = alloc::vec![
            Piece { lo: 0.0, hi: 1.0, formula: Formula::Constant(0.0) },
            Piece { lo: 1.0, hi: 2.0, formula: Formula::Constant(1.0) },
        ];
        assert!(ScalarFn::new(pieces, Outside::Error).is_err());
        let gap = alloc::vec![
            Piece { lo: 0.0, hi: 1.0, formula: Formula::Constant(0.0) },
            Piece { lo: 1.5, hi: 2.0, formula: Formula::Constant(0.0) },
        ];
        assert!(ScalarFn::new(gap, Outside::Error).is_err());
    }

    #[test]
    fn domain_conventions() {
        let f = ScalarFn::inv_sqrt();
        assert!(matches!(f.eval(-1.0), Err(Error::Domain { .. })));
        let clamp = ScalarFn::new(
            alloc::vec![Piece { lo: 0.0, hi: 1.0, formula: Formula::Affine { slope: 2.0, intercept: 0.0 } }],
            Outside::Clamp,
        )
        .unwrap();
        assert_eq!(clamp.eval(5.0).unwrap(), 2.0);
        assert_eq!(clamp.eval(-5.0).unwrap(), 0.0);
    }
}
