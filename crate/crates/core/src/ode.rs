//! Fixed-step explicit integrators over flat state vectors.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    /// Classical fourth-order Runge–Kutta.
    #[default]
    Rk4,
    /// Forward Euler.
    Euler,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::Euler => "euler",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "rk4" => Ok(Method::Rk4),
            "euler" => Ok(Method::Euler),
            other => Err(Error::InvalidArgument(format!(
                "unknown method `{other}` (expected `rk4` or `euler`)"
            ))),
        }
    }
}

/// Scratch buffers for one integrator so that stepping does not allocate.
pub struct Stepper {
    method: Method,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Stepper {
    pub fn new(method: Method, dim: usize) -> Self {
        Stepper {
            method,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
        }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Advances `state` by one step of size `h` for the autonomous field `f`,
    /// where `f(state, out)` writes the derivative into `out`.
    pub fn step<F>(&mut self, f: &mut F, state: &mut [f64], h: f64)
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        match self.method {
            Method::Euler => {
                f(state, &mut self.k[0]);
                for (s, d) in state.iter_mut().zip(&self.k[0]) {
                    *s += h * d;
                }
            }
            Method::Rk4 => {
                let [k1, k2, k3, k4] = &mut self.k;
                let tmp = &mut self.tmp;
                f(state, k1);
                axpy_into(tmp, state, 0.5 * h, k1);
                f(tmp, k2);
                axpy_into(tmp, state, 0.5 * h, k2);
                f(tmp, k3);
                axpy_into(tmp, state, h, k3);
                f(tmp, k4);
                for i in 0..state.len() {
                    state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
    }
}

fn axpy_into(out: &mut [f64], x: &[f64], a: f64, d: &[f64]) {
    for ((o, xi), di) in out.iter_mut().zip(x).zip(d) {
        *o = xi + a * di;
    }
}

/// Number of fixed steps used to cover `[0, duration]` with step `h`.
pub fn step_count(duration: f64, h: f64) -> usize {
    ((duration / h).round() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_is_fourth_order_on_exponential() {
        let mut errs = Vec::new();
        for &h in &[0.1, 0.05] {
            let mut s = Stepper::new(Method::Rk4, 1);
            let mut y = vec![1.0];
            let mut f = |y: &[f64], d: &mut [f64]| d[0] = y[0];
            for _ in 0..step_count(1.0, h) {
                s.step(&mut f, &mut y, h);
            }
            errs.push((y[0] - 1f64.exp()).abs());
        }
        let order = (errs[0] / errs[1]).log2();
        assert!((order - 4.0).abs() < 0.2, "observed order {order}");
    }

    #[test]
    fn euler_is_first_order() {
        let mut errs = Vec::new();
        for &h in &[0.01, 0.005] {
            let mut s = Stepper::new(Method::Euler, 1);
            let mut y = vec![1.0];
            let mut f = |y: &[f64], d: &mut [f64]| d[0] = -y[0];
            for _ in 0..step_count(1.0, h) {
                s.step(&mut f, &mut y, h);
            }
            errs.push((y[0] - (-1f64).exp()).abs());
        }
        let order = (errs[0] / errs[1]).log2();
        assert!((order - 1.0).abs() < 0.1, "observed order {order}");
    }

    #[test]
    fn harmonic_oscillator_energy_drift_is_small() {
        let mut s = Stepper::new(Method::Rk4, 2);
        let mut y = vec![1.0, 0.0];
        let mut f = |y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = -y[0];
        };
        for _ in 0..step_count(10.0, 1e-3) {
            s.step(&mut f, &mut y, 1e-3);
        }
        let energy = 0.5 * (y[0] * y[0] + y[1] * y[1]);
        assert!((energy - 0.5).abs() < 1e-12);
    }

    #[test]
    fn method_names() {
        assert_eq!("RK4".parse::<Method>().unwrap(), Method::Rk4);
        assert_eq!("euler".parse::<Method>().unwrap(), Method::Euler);
        assert!("midpoint".parse::<Method>().is_err());
        assert_eq!(step_count(1.0, 1.0), 1);
        assert_eq!(step_count(50.0, 1e-3), 50_000);
    }
}
