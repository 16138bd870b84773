//! Outcomes of numerical inequality and equality checks.

/// `lhs ≤ rhs`, accepted up to an additive `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
}

impl InequalityCheck {
    pub fn new(lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self { lhs, rhs, tolerance }
    }

    /// `rhs − lhs`; negative means the inequality is violated before tolerance.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + self.tolerance
    }
}

/// `a = b` up to an absolute `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualityCheck {
    pub a: f64,
    pub b: f64,
    pub tolerance: f64,
}

impl EqualityCheck {
    pub fn new(a: f64, b: f64, tolerance: f64) -> Self {
        Self { a, b, tolerance }
    }

    pub fn deviation(&self) -> f64 {
        (self.a - self.b).abs()
    }

    pub fn holds(&self) -> bool {
        self.deviation() <= self.tolerance
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_sign() {
        let ok = InequalityCheck::new(1.0, 2.0, 0.0);
        assert!(ok.holds());
        assert_eq!(ok.slack(), 1.0);
        let marginal = InequalityCheck::new(1.0 + 1e-12, 1.0, 1e-10);
        assert!(marginal.holds() && marginal.slack() < 0.0);
        assert!(!InequalityCheck::new(2.0, 1.0, 1e-10).holds());
    }

    #[test]
    fn equality_tolerance() {
        assert!(EqualityCheck::new(1.0, 1.0 + 1e-11, 1e-10).holds());
        assert!(!EqualityCheck::new(1.0, 1.1, 1e-10).holds());
    }
}
