use crate::error::{Error, Result};

/// Orders, types, coupling and horizon of the two-term equation
/// D^{α₁,β₁}u + μ D^{α₂,β₂}u = u_xx + g.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrders {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub mu: f64,
    pub t_end: f64,
}

impl FractionalOrders {
    pub fn new(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64, mu: f64, t_end: f64) -> Result<Self> {
        let o = FractionalOrders {
            alpha1,
            alpha2,
            beta1,
            beta2,
            mu,
            t_end,
        };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha1, self.alpha2, self.beta1, self.beta2, self.mu, self.t_end];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidOrder(format!("non-finite value in {self:?}")));
        }
        if !(0.0 < self.alpha2 && self.alpha2 < self.alpha1 && self.alpha1 < 1.0) {
            return Err(Error::InvalidOrder(format!(
                "0<α₂<α₁<1 violated: alpha1 = {}, alpha2 = {}",
                self.alpha1, self.alpha2
            )));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::InvalidOrder(format!("0≤{name}≤1 violated: {name} = {b}")));
            }
        }
        if self.mu < 0.0 {
            return Err(Error::InvalidOrder(format!("mu must be non-negative, got {}", self.mu)));
        }
        if self.t_end <= 0.0 {
            return Err(Error::InvalidOrder(format!("T must be positive, got {}", self.t_end)));
        }
        Ok(())
    }

    /// Frequencies of the mode solutions: (α₁ - α₂, α₁).
    pub fn frequencies(&self) -> (f64, f64) {
        (self.alpha1 - self.alpha2, self.alpha1)
    }

    /// Standard parameter sets used by the self-checks.
    pub fn battery() -> Vec<FractionalOrders> {
        let mk = |a1, a2, b1, b2, mu| FractionalOrders {
            alpha1: a1,
            alpha2: a2,
            beta1: b1,
            beta2: b2,
            mu,
            t_end: 1.0,
        };
        vec![
            mk(0.8, 0.4, 1.0, 1.0, 0.5),
            mk(0.5, 0.2, 0.0, 1.0, 2.0),
            mk(0.8, 0.2, 0.5, 0.0, 0.0),
            mk(0.6, 0.3, 0.3, 0.7, 1.0),
            mk(0.9, 0.1, 0.0, 0.0, 0.5),
        ]
    }
}

impl Default for FractionalOrders {
    fn default() -> Self {
        FractionalOrders::battery()[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_each_invariant() {
        assert!(FractionalOrders::new(0.5, 0.9, 1.0, 1.0, 0.5, 1.0)
            .unwrap_err()
            .to_string()
            .contains("0<α₂<α₁<1"));
        assert!(FractionalOrders::new(1.0, 0.5, 1.0, 1.0, 0.5, 1.0).is_err());
        assert!(FractionalOrders::new(0.5, 0.0, 1.0, 1.0, 0.5, 1.0).is_err());
        assert!(FractionalOrders::new(0.5, 0.2, 1.1, 1.0, 0.5, 1.0).is_err());
        assert!(FractionalOrders::new(0.5, 0.2, 1.0, -0.1, 0.5, 1.0).is_err());
        assert!(FractionalOrders::new(0.5, 0.2, 1.0, 1.0, -1.0, 1.0).is_err());
        assert!(FractionalOrders::new(0.5, 0.2, 1.0, 1.0, 0.5, 0.0).is_err());
        assert!(FractionalOrders::new(0.5, 0.2, 1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn battery_is_valid() {
        for o in FractionalOrders::battery() {
            o.validate().unwrap();
        }
    }
}
