use crate::error::{Error, Result};

/// Space-time function sampled on the radial nodes at a given time.
pub trait FieldSource: Sync {
    fn fill(&self, t: f64, radii: &[f64], out: &mut [f64]);
}

impl<F: Fn(f64, f64) -> f64 + Sync> FieldSource for F {
    fn fill(&self, t: f64, radii: &[f64], out: &mut [f64]) {
        for (o, &r) in out.iter_mut().zip(radii) {
            *o = self(t, r);
        }
    }
}

/// Node values on a uniform time grid, linearly interpolated in time.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    t0: f64,
    dt: f64,
    values: Vec<Vec<f64>>,
}

impl SampledField {
    pub fn new(t0: f64, dt: f64, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() || !(dt > 0.0) {
            return Err(Error::validation("sampled field needs samples and a positive step"));
        }
        Ok(Self { t0, dt, values })
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }
}

impl FieldSource for SampledField {
    fn fill(&self, t: f64, _radii: &[f64], out: &mut [f64]) {
        let x = ((t - self.t0) / self.dt).max(0.0);
        let last = self.values.len() - 1;
        let k = (x.floor() as usize).min(last);
        let theta = if k == last { 0.0 } else { (x - k as f64).min(1.0) };
        let a = &self.values[k];
        let b = &self.values[(k + 1).min(last)];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (1.0 - theta) * a[i] + theta * b[i];
        }
    }
}
