use crate::bits::BitString;
use crate::error::{Error, Result};

use super::Problem;

/// Number of one-bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneMax {
    n: usize,
}

impl OneMax {
    pub fn new(n: usize) -> Self {
        OneMax { n }
    }
}

impl Problem for OneMax {
    fn dimension(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: &BitString) -> f64 {
        x.ones_count() as f64
    }

    fn is_target(&self, x: &BitString, _: f64) -> bool {
        x.ones_count() == self.n
    }

    fn descriptor(&self) -> String {
        format!("onemax(n={})", self.n)
    }
}

/// Length of the longest all-ones prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingOnes {
    n: usize,
}

impl LeadingOnes {
    pub fn new(n: usize) -> Self {
        LeadingOnes { n }
    }
}

impl Problem for LeadingOnes {
    fn dimension(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: &BitString) -> f64 {
        x.leading_ones() as f64
    }

    fn is_target(&self, x: &BitString, _: f64) -> bool {
        x.ones_count() == self.n
    }

    fn descriptor(&self) -> String {
        format!("leadingones(n={})", self.n)
    }
}

/// OneMax with the optimum moved to `0^n`, where it scores `n + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trap {
    n: usize,
}

impl Trap {
    pub fn new(n: usize) -> Self {
        Trap { n }
    }
}

impl Problem for Trap {
    fn dimension(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: &BitString) -> f64 {
        match x.ones_count() {
            0 => (self.n + 1) as f64,
            k => k as f64,
        }
    }

    fn is_target(&self, x: &BitString, _: f64) -> bool {
        x.ones_count() == 0
    }

    fn descriptor(&self) -> String {
        format!("trap(n={})", self.n)
    }
}

fn check_gap(n: usize, d: usize) -> Result<()> {
    if d == 0 || d >= n {
        return Err(Error::Config(format!("gap d must satisfy 1 <= d < n, got d={d}, n={n}")));
    }
    Ok(())
}

/// `d + |x|_1` outside the gap, `n - |x|_1` inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jump {
    n: usize,
    d: usize,
}

impl Jump {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        check_gap(n, d)?;
        Ok(Jump { n, d })
    }

    pub fn value_at(&self, ones: usize) -> f64 {
        if ones <= self.n - self.d || ones == self.n {
            (self.d + ones) as f64
        } else {
            (self.n - ones) as f64
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

impl Problem for Jump {
    fn dimension(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: &BitString) -> f64 {
        self.value_at(x.ones_count())
    }

    fn is_target(&self, x: &BitString, _: f64) -> bool {
        x.ones_count() == self.n
    }

    fn descriptor(&self) -> String {
        format!("jump(n={},d={})", self.n, self.d)
    }
}

/// OneMax up to `n - d` ones, then a drop of `d - 1/2` followed by a
/// second OneMax slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cliff {
    n: usize,
    d: usize,
}

impl Cliff {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        check_gap(n, d)?;
        Ok(Cliff { n, d })
    }

    pub fn value_at(&self, ones: usize) -> f64 {
        if ones <= self.n - self.d {
            ones as f64
        } else {
            ones as f64 - self.d as f64 + 0.5
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

impl Problem for Cliff {
    fn dimension(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: &BitString) -> f64 {
        self.value_at(x.ones_count())
    }

    fn is_target(&self, x: &BitString, _: f64) -> bool {
        x.ones_count() == self.n
    }

    fn descriptor(&self) -> String {
        format!("cliff(n={},d={})", self.n, self.d)
    }
}

/// A zero-gradient gadget leading to a short path `1^{n-k} 0^k`,
/// `5 <= k <= log2(n) + 1`, whose last point is the optimum.
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenPath {
    n: usize,
    log_n: usize,
    eps: f64,
}

impl HiddenPath {
    pub const DEFAULT_EPS: f64 = 0.5;

    pub fn new(n: usize, eps: f64) -> Result<Self> {
        if !n.is_power_of_two() || n < 32 {
            return Err(Error::Config(format!(
                "hiddenpath needs n a power of two with n >= 32, got {n}"
            )));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Config(format!("hiddenpath eps must lie in (0,1), got {eps}")));
        }
        Ok(HiddenPath {
            n,
            log_n: n.trailing_zeros() as usize,
            eps,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Number of trailing zeros `k` if `x = 1^{n-k} 0^k` on the path.
    fn path_index(&self, x: &BitString) -> Option<usize> {
        let k = x.zeros_count();
        if (5..=self.log_n + 1).contains(&k) && x.leading_ones() == self.n - k {
            Some(k)
        } else {
            None
        }
    }

    pub fn path_end(&self) -> BitString {
        let k = self.log_n + 1;
        let mut x = BitString::ones(self.n);
        for i in self.n - k..self.n {
            x.toggle(i);
        }
        x
    }
}

impl Problem for HiddenPath {
    fn dimension(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: &BitString) -> f64 {
        let n = self.n as f64;
        let zeros = x.zeros_count();
        if zeros < 5 || zeros == self.n {
            return 0.0;
        }
        if zeros == self.n - 1 {
            return n;
        }
        if let Some(k) = self.path_index(x) {
            return n - self.eps + self.eps * k as f64 / self.log_n as f64;
        }
        if zeros == 5 {
            let tail = (self.n - 5..self.n).filter(|&i| !x.get(i)).count();
            return n - self.eps + tail as f64 / n;
        }
        zeros as f64
    }

    fn is_target(&self, x: &BitString, _: f64) -> bool {
        self.path_index(x) == Some(self.log_n + 1)
    }

    fn descriptor(&self) -> String {
        format!("hiddenpath(n={},eps={})", self.n, self.eps)
    }
}

/// Constant objective; never reaches a target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flat {
    n: usize,
}

impl Flat {
    pub fn new(n: usize) -> Self {
        Flat { n }
    }
}

impl Problem for Flat {
    fn dimension(&self) -> usize {
        self.n
    }

    fn evaluate(&self, _: &BitString) -> f64 {
        0.0
    }

    fn is_target(&self, _: &BitString, _: f64) -> bool {
        false
    }

    fn descriptor(&self) -> String {
        format!("flat(n={})", self.n)
    }
}
