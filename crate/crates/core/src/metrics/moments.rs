use serde::Serialize;

use crate::error::{Error, Result};

/// First and second moments of a pair of equally sized sample sets,
/// population-normalised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean_a: f64,
    pub mean_b: f64,
    pub std_a: f64,
    pub std_b: f64,
    pub variance_a: f64,
    pub variance_b: f64,
    pub covariance: f64,
    pub pixel_count: usize,
    /// Every sample of `a` is identical (checked exactly, not via the variance).
    pub constant_a: bool,
    pub constant_b: bool,
}

fn all_equal(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

impl MomentSummary {
    pub fn compute(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch(format!("{} vs {} samples", a.len(), b.len())));
        }
        if a.is_empty() {
            return Err(Error::InvalidParameter("moments of an empty sample".into()));
        }
        let n = a.len() as f64;
        let mean_a = a.iter().sum::<f64>() / n;
        let mean_b = b.iter().sum::<f64>() / n;
        let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
        for (&x, &y) in a.iter().zip(b) {
            let (dx, dy) = (x - mean_a, y - mean_b);
            saa += dx * dx;
            sbb += dy * dy;
            sab += dx * dy;
        }
        let constant_a = all_equal(a);
        let constant_b = all_equal(b);
        let variance_a = if constant_a { 0.0 } else { saa / n };
        let variance_b = if constant_b { 0.0 } else { sbb / n };
        Ok(Self {
            mean_a,
            mean_b,
            std_a: variance_a.sqrt(),
            std_b: variance_b.sqrt(),
            variance_a,
            variance_b,
            covariance: if constant_a || constant_b { 0.0 } else { sab / n },
            pixel_count: a.len(),
            constant_a,
            constant_b,
        })
    }

    /// Universal image quality index of the pair.
    ///
    /// Degenerate blocks: two constant blocks score their luminance similarity
    /// (1 when equal), a single constant block scores 0.
    pub fn uiqi(&self) -> f64 {
        let lum = luminance(self.mean_a, self.mean_b);
        match (self.constant_a, self.constant_b) {
            (true, true) => lum,
            (true, false) | (false, true) => 0.0,
            (false, false) => 2.0 * self.covariance / (self.variance_a + self.variance_b) * lum,
        }
    }
}

/// `2 m_a m_b / (m_a² + m_b²)`, taken as 1 when both means vanish.
pub(crate) fn luminance(ma: f64, mb: f64) -> f64 {
    let den = ma * ma + mb * mb;
    if den == 0.0 {
        1.0
    } else {
        2.0 * ma * mb / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_schwarz_and_counts() {
        let a = [1.0, 5.0, 2.0, 8.0, 3.0];
        let b = [2.0, 1.0, 7.0, 3.0, 3.5];
        let m = MomentSummary::compute(&a, &b).unwrap();
        assert!(m.covariance.abs() <= m.std_a * m.std_b + 1e-12);
        assert_eq!(m.pixel_count, 5);
        assert!(MomentSummary::compute(&a, &b[..4]).is_err());
        assert!(MomentSummary::compute(&[], &[]).is_err());
    }

    #[test]
    fn degenerate_conventions() {
        let c = [3.0; 4];
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(MomentSummary::compute(&c, &c).unwrap().uiqi(), 1.0);
        assert_eq!(MomentSummary::compute(&c, &v).unwrap().uiqi(), 0.0);
        assert_eq!(MomentSummary::compute(&v, &c).unwrap().uiqi(), 0.0);
        let z = [0.0; 4];
        assert_eq!(MomentSummary::compute(&z, &z).unwrap().uiqi(), 1.0);
        // two different constants: luminance only
        let d = [6.0; 4];
        assert!((MomentSummary::compute(&c, &d).unwrap().uiqi() - 0.8).abs() < 1e-15);
    }
}
