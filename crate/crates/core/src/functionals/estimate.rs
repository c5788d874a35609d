use serde::Serialize;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, stderr: 0.0 }
    }

    /// Sample mean of per-path values and its standard error. A single
    /// value stands for a deterministic ensemble and has zero error.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        if samples.len() < 2 {
            return Estimate::exact(mean);
        }
        let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        Estimate { value: mean, stderr: (var / n).sqrt() }
    }

    /// √ of a nonnegative estimate with the delta-method error.
    pub fn sqrt(self) -> Self {
        let v = self.value.max(0.0).sqrt();
        let se = if v > 0.0 { self.stderr / (2.0 * v) } else { self.stderr.sqrt() };
        Estimate { value: v, stderr: se }
    }

    pub fn scale(self, c: f64) -> Self {
        Estimate { value: c * self.value, stderr: c.abs() * self.stderr }
    }
}

/// Machine-readable estimate record.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateRecord {
    pub name: String,
    pub value: f64,
    pub stderr: f64,
    pub params: serde_json::Value,
}

impl EstimateRecord {
    pub fn new(name: impl Into<String>, e: Estimate, params: serde_json::Value) -> Self {
        EstimateRecord { name: name.into(), value: e.value, stderr: e.stderr, params }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_statistics() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.value, 2.5);
        assert!((e.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(Estimate::from_samples(&[7.0]).stderr, 0.0);
    }

    #[test]
    fn sqrt_delta_method() {
        let e = Estimate { value: 4.0, stderr: 0.4 }.sqrt();
        assert_eq!(e.value, 2.0);
        assert!((e.stderr - 0.1).abs() < 1e-15);
    }
}
