//! Radial profiles W(y) = f(|y|) that are piecewise quadratic in r.

/// a + b(r − anchor) + c(r − anchor)²
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub anchor: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub const ZERO: Quadratic = Quadratic {
        anchor: 0.0,
        a: 0.0,
        b: 0.0,
        c: 0.0,
    };

    pub fn constant(a: f64) -> Self {
        Quadratic { a, ..Self::ZERO }
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        let w = r - self.anchor;
        self.a + w * (self.b + self.c * w)
    }

    #[inline]
    pub fn slope(&self, r: f64) -> f64 {
        self.b + 2.0 * self.c * (r - self.anchor)
    }

    /// The same polynomial read at −r.
    pub fn mirrored(&self) -> Self {
        Quadratic {
            anchor: -self.anchor,
            a: self.a,
            b: -self.b,
            c: self.c,
        }
    }
}

/// Profile on r ≥ 0: piece `i` covers [knots[i−1], knots[i]] with the
/// convention that a knot belongs to the piece on its left (inside closure).
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseQuadratic {
    knots: Vec<f64>,
    pieces: Vec<Quadratic>,
}

impl PiecewiseQuadratic {
    pub fn new(knots: Vec<f64>, pieces: Vec<Quadratic>) -> Self {
        assert_eq!(pieces.len(), knots.len() + 1);
        assert!(knots.windows(2).all(|w| w[0] < w[1]));
        assert!(knots.first().is_none_or(|&k| k > 0.0));
        PiecewiseQuadratic { knots, pieces }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Quadratic] {
        &self.pieces
    }

    #[inline]
    pub fn piece_at(&self, r: f64) -> &Quadratic {
        let i = self.knots.partition_point(|&k| k < r);
        &self.pieces[i]
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        self.piece_at(r).value(r)
    }

    #[inline]
    pub fn slope(&self, r: f64) -> f64 {
        self.piece_at(r).slope(r)
    }

    /// Bounded iff the outermost piece is constant.
    pub fn is_bounded(&self) -> bool {
        let last = self.pieces.last().expect("at least one piece");
        last.b == 0.0 && last.c == 0.0
    }

    /// (sup f, sup |f'|) over r ≥ 0, from endpoint and vertex values.
    pub fn sup_bounds(&self) -> (f64, f64) {
        let mut sup_value: f64 = 0.0;
        let mut sup_slope: f64 = 0.0;
        let mut lo = 0.0;
        for (i, piece) in self.pieces.iter().enumerate() {
            let hi = self.knots.get(i).copied().unwrap_or(lo);
            for r in [lo, hi] {
                sup_value = sup_value.max(piece.value(r).abs());
                sup_slope = sup_slope.max(piece.slope(r).abs());
            }
            if piece.c != 0.0 {
                let vertex = piece.anchor - piece.b / (2.0 * piece.c);
                if vertex > lo && vertex < hi {
                    sup_value = sup_value.max(piece.value(vertex).abs());
                }
            }
            lo = hi;
        }
        (sup_value, sup_slope)
    }

    /// Lipschitz constant of y ↦ f'(|y|) y/|y| restricted to each smooth
    /// piece: max of |f''| and |f'(r)/r|.
    pub fn gradient_lipschitz(&self) -> f64 {
        let mut lip: f64 = 0.0;
        let mut lo = 0.0;
        for (i, piece) in self.pieces.iter().enumerate() {
            lip = lip.max((2.0 * piece.c).abs());
            let hi = self.knots.get(i).copied();
            if lo == 0.0 {
                if piece.slope(0.0) != 0.0 {
                    return f64::INFINITY;
                }
            } else {
                lip = lip.max((piece.slope(lo) / lo).abs());
            }
            if let Some(hi) = hi {
                lip = lip.max((piece.slope(hi) / hi).abs());
                lo = hi;
            }
        }
        lip
    }

    /// Segments (lo, hi, polynomial) of the even extension to all of ℝ,
    /// ordered left to right.
    pub fn even_extension(&self) -> Vec<(f64, f64, Quadratic)> {
        let mut bounds = vec![0.0];
        bounds.extend_from_slice(&self.knots);
        bounds.push(f64::INFINITY);
        let right: Vec<(f64, f64, Quadratic)> = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, p)| (bounds[i], bounds[i + 1], *p))
            .collect();
        let mut all: Vec<(f64, f64, Quadratic)> = right
            .iter()
            .rev()
            .map(|&(lo, hi, p)| (-hi, -lo, p.mirrored()))
            .collect();
        all.extend(right);
        all
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clipped(u_star: f64) -> PiecewiseQuadratic {
        PiecewiseQuadratic::new(
            vec![u_star],
            vec![
                Quadratic {
                    c: 1.0,
                    ..Quadratic::ZERO
                },
                Quadratic::constant(u_star * u_star),
            ],
        )
    }

    #[test]
    fn knot_belongs_to_left_piece() {
        let p = clipped(1.0);
        assert_eq!(p.slope(1.0), 2.0);
        assert_eq!(p.slope(1.0 + 1e-15), 0.0);
        assert_eq!(p.value(2.0), 1.0);
    }

    #[test]
    fn bounds_and_lipschitz() {
        let p = clipped(0.5);
        let (w, g) = p.sup_bounds();
        assert_eq!(w, 0.25);
        assert_eq!(g, 1.0);
        assert_eq!(p.gradient_lipschitz(), 2.0);
        assert!(p.is_bounded());
    }

    #[test]
    fn even_extension_matches_reflection() {
        let p = clipped(1.0);
        for (lo, hi, q) in p.even_extension() {
            let x = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if lo.is_finite() {
                lo + 1.0
            } else {
                hi - 1.0
            };
            assert_eq!(q.value(x), p.value(x.abs()));
            assert_eq!(q.slope(x), p.slope(x.abs()) * x.signum());
        }
    }
}
