/// Quadrature on a reference simplex, points in barycentric coordinates.
///
/// Weights sum to the reference measure (1 for the unit interval, 1/2 for
/// the unit triangle); on a physical cell `K` use `|K| / ref_measure`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
    pub ref_measure: f64,
}

impl QuadratureRule {
    /// Rule of at least the requested polynomial degree on a `dim`-simplex.
    pub fn for_cell(dim: usize, degree: usize) -> Self {
        match dim {
            1 => Self::interval(degree),
            2 => Self::triangle(degree),
            _ => panic!("no quadrature for dimension {dim}"),
        }
    }

    /// Gauss-Legendre with up to four points (exact to degree 7).
    pub fn interval(degree: usize) -> Self {
        let (nodes, weights, exact): (Vec<f64>, Vec<f64>, usize) = match degree {
            0 | 1 => (vec![0.0], vec![2.0], 1),
            2 | 3 => {
                let a = 1.0 / 3f64.sqrt();
                (vec![-a, a], vec![1.0, 1.0], 3)
            }
            4 | 5 => {
                let a = (0.6f64).sqrt();
                (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0], 5)
            }
            6 | 7 => {
                let (a, b) = (0.339_981_043_584_856_3, 0.861_136_311_594_052_6);
                let (wa, wb) = (0.652_145_154_862_546_1, 0.347_854_845_137_453_9);
                (vec![-b, -a, a, b], vec![wb, wa, wa, wb], 7)
            }
            _ => panic!("interval quadrature of degree {degree} is not available"),
        };
        let points = nodes
            .iter()
            .map(|&s| {
                let t = 0.5 * (s + 1.0);
                [1.0 - t, t, 0.0]
            })
            .collect();
        Self { points, weights: weights.iter().map(|w| 0.5 * w).collect(), degree: exact, ref_measure: 1.0 }
    }

    /// Symmetric triangle rules: centroid, 3-point, and the 6- and 12-point
    /// Dunavant rules (degrees 1, 2, 4, 6).
    pub fn triangle(degree: usize) -> Self {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut orbit3 = |a: f64, w: f64| {
            let b = 1.0 - 2.0 * a;
            for p in [[a, a, b], [a, b, a], [b, a, a]] {
                points.push(p);
                weights.push(w);
            }
        };
        let exact = match degree {
            0 | 1 => {
                orbit3(1.0 / 3.0, 1.0 / 9.0);
                points.truncate(1);
                weights.truncate(1);
                weights[0] = 1.0;
                1
            }
            2 => {
                orbit3(1.0 / 6.0, 1.0 / 3.0);
                2
            }
            3 | 4 => {
                orbit3(0.445_948_490_915_965, 0.223_381_589_678_011);
                orbit3(0.091_576_213_509_771, 0.109_951_743_655_322);
                4
            }
            5 | 6 => {
                orbit3(0.249_286_745_170_910, 0.116_786_275_726_379);
                orbit3(0.063_089_014_491_502, 0.050_844_906_370_207);
                let (a, b, c) = (0.053_145_049_844_817, 0.310_352_451_033_784, 0.636_502_499_121_399);
                for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    points.push(p);
                    weights.push(0.082_851_075_618_374);
                }
                6
            }
            _ => panic!("triangle quadrature of degree {degree} is not available"),
        };
        Self { points, weights: weights.iter().map(|w| 0.5 * w).collect(), degree: exact, ref_measure: 0.5 }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Physical points and weights on a cell with the given vertices and measure.
    pub fn mapped(&self, verts: &[[f64; 2]], measure: f64) -> impl Iterator<Item = ([f64; 2], [f64; 3], f64)> + '_ {
        let scale = measure / self.ref_measure;
        let v: Vec<[f64; 2]> = verts.to_vec();
        self.points.iter().zip(&self.weights).map(move |(b, &w)| {
            let mut x = [0.0; 2];
            for (k, vk) in v.iter().enumerate() {
                x[0] += b[k] * vk[0];
                x[1] += b[k] * vk[1];
            }
            (x, *b, w * scale)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn interval_monomials() {
        for deg in [1, 3, 5, 7] {
            let q = QuadratureRule::interval(deg);
            assert_eq!(q.degree, deg);
            for k in 0..=deg {
                let s: f64 = q.points.iter().zip(&q.weights).map(|(p, w)| w * p[1].powi(k as i32)).sum();
                assert!((s - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "deg {deg} k {k}");
            }
        }
    }

    #[test]
    fn triangle_monomials() {
        // int_T x^a y^b over the unit triangle = a! b! / (a + b + 2)!
        for deg in [1, 2, 4, 6] {
            let q = QuadratureRule::triangle(deg);
            assert_eq!(q.degree, deg);
            assert!((q.weights.iter().sum::<f64>() - 0.5).abs() < 1e-14);
            for a in 0..=deg {
                for b in 0..=deg - a {
                    let s: f64 = q
                        .points
                        .iter()
                        .zip(&q.weights)
                        .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
                        .sum();
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    assert!((s - exact).abs() < 1e-13, "deg {deg} x^{a} y^{b}: {s} vs {exact}");
                }
            }
        }
    }
}
