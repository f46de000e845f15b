//! Theorem identifiers and parameter points.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// Every checkable statement: the integral identity, seven bounds and their
/// corollaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremId {
    Lemma21,
    Thm31,
    Cor31_1,
    Cor31_2,
    Cor31_3a,
    Cor31_3b,
    Thm32,
    Cor32,
    Thm33,
    Cor33,
    Thm34,
    Cor34,
    Thm35,
    Cor35_1,
    Cor35_2,
    Cor35_3,
    Thm36,
    Cor36,
    Thm37,
    Cor37,
}

impl TheoremId {
    pub const ALL: [TheoremId; 20] = [
        TheoremId::Lemma21,
        TheoremId::Thm31,
        TheoremId::Cor31_1,
        TheoremId::Cor31_2,
        TheoremId::Cor31_3a,
        TheoremId::Cor31_3b,
        TheoremId::Thm32,
        TheoremId::Cor32,
        TheoremId::Thm33,
        TheoremId::Cor33,
        TheoremId::Thm34,
        TheoremId::Cor34,
        TheoremId::Thm35,
        TheoremId::Cor35_1,
        TheoremId::Cor35_2,
        TheoremId::Cor35_3,
        TheoremId::Thm36,
        TheoremId::Cor36,
        TheoremId::Thm37,
        TheoremId::Cor37,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Lemma21 => "lemma21",
            TheoremId::Thm31 => "thm31",
            TheoremId::Cor31_1 => "cor31_1",
            TheoremId::Cor31_2 => "cor31_2",
            TheoremId::Cor31_3a => "cor31_3a",
            TheoremId::Cor31_3b => "cor31_3b",
            TheoremId::Thm32 => "thm32",
            TheoremId::Cor32 => "cor32",
            TheoremId::Thm33 => "thm33",
            TheoremId::Cor33 => "cor33",
            TheoremId::Thm34 => "thm34",
            TheoremId::Cor34 => "cor34",
            TheoremId::Thm35 => "thm35",
            TheoremId::Cor35_1 => "cor35_1",
            TheoremId::Cor35_2 => "cor35_2",
            TheoremId::Cor35_3 => "cor35_3",
            TheoremId::Thm36 => "thm36",
            TheoremId::Cor36 => "cor36",
            TheoremId::Thm37 => "thm37",
            TheoremId::Cor37 => "cor37",
        }
    }

    /// Needs a second function `g`.
    pub fn is_product(self) -> bool {
        matches!(
            self,
            TheoremId::Thm35
                | TheoremId::Cor35_1
                | TheoremId::Cor35_2
                | TheoremId::Cor35_3
                | TheoremId::Thm36
                | TheoremId::Cor36
                | TheoremId::Thm37
                | TheoremId::Cor37
        )
    }

    /// The right-hand side bounds the left-hand side from below.
    pub fn is_lower_bound(self) -> bool {
        matches!(self, TheoremId::Thm37 | TheoremId::Cor37)
    }

    /// The general statement a corollary specializes, if any.
    pub fn parent(self) -> Option<TheoremId> {
        use TheoremId::*;
        Some(match self {
            Cor31_1 | Cor31_2 | Cor31_3a | Cor31_3b => Thm31,
            Cor32 => Thm32,
            Cor33 => Thm33,
            Cor34 => Thm34,
            Cor35_1 | Cor35_2 | Cor35_3 => Thm35,
            Cor36 => Thm36,
            Cor37 => Thm37,
            _ => return None,
        })
    }

    /// Bounds on `|f|` alone (everything except the identity and the
    /// product statements).
    pub fn single() -> impl Iterator<Item = TheoremId> {
        Self::ALL
            .into_iter()
            .filter(|t| *t != TheoremId::Lemma21 && !t.is_product())
    }

    pub fn product() -> impl Iterator<Item = TheoremId> {
        Self::ALL.into_iter().filter(|t| t.is_product())
    }

    /// Check the parameter restrictions of this statement at `pt`.
    pub fn admits(self, pt: &ParamPoint) -> Result<(), ParamError> {
        use TheoremId::*;
        pt.validate_base()?;
        let fail = |reason: &str| {
            Err(ParamError {
                theorem: Some(self),
                reason: reason.to_string(),
            })
        };
        if self == Lemma21 {
            return Ok(());
        }
        pt.validate_first()?;
        let q = pt.q;
        let strict = matches!(
            self,
            Thm32 | Cor32 | Thm33 | Cor33 | Thm34 | Cor34 | Cor35_3 | Thm36 | Cor36
        );
        if strict && q <= 1.0 {
            return fail("requires q > 1");
        }
        if matches!(self, Cor31_1 | Cor35_1 | Cor35_2) && q != 1.0 {
            return fail("requires q = 1");
        }
        if matches!(self, Cor31_2 | Cor32 | Cor33 | Cor34) && pt.alpha != 1.0 {
            return fail("requires alpha = 1");
        }
        if matches!(self, Thm34 | Cor34) {
            match pt.p {
                None => return fail("requires p"),
                Some(p) if !(p > 0.0 && p < q) => return fail("requires q > p > 0"),
                Some(_) => {}
            }
        }
        if self.is_product() {
            let (alpha2, m2) = pt.second();
            check_unit("alpha2", alpha2, Some(self))?;
            check_unit("m2", m2, Some(self))?;
            root_of(pt.a, m2, Some(self))?;
            let ones = pt.alpha == 1.0 && pt.m == 1.0 && alpha2 == 1.0 && m2 == 1.0;
            if matches!(self, Cor35_2 | Cor35_3 | Cor36 | Cor37) && !ones {
                return fail("requires alpha = m = alpha2 = m2 = 1");
            }
        }
        Ok(())
    }

    /// Statements admitted at `pt`, in canonical order.
    pub fn admitted(pt: &ParamPoint, with_g: bool) -> Vec<TheoremId> {
        Self::ALL
            .into_iter()
            .filter(|t| (with_g || !t.is_product()) && t.admits(pt).is_ok())
            .collect()
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown theorem id `{0}`")]
pub struct UnknownTheorem(pub String);

impl FromStr for TheoremId {
    type Err = UnknownTheorem;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| UnknownTheorem(s.to_string()))
    }
}

/// Parse `all`, `single`, `product`, or a comma-separated list of ids.
pub fn parse_theorem_list(text: &str) -> Result<Vec<TheoremId>, UnknownTheorem> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "all" => out.extend(TheoremId::ALL),
            "single" => out.extend(TheoremId::single()),
            "product" => out.extend(TheoremId::product()),
            other => out.push(other.parse()?),
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}{reason}", theorem.map(|t| alloc::format!("{t}: ")).unwrap_or_default())]
pub struct ParamError {
    pub theorem: Option<TheoremId>,
    pub reason: String,
}

impl ParamError {
    fn new(reason: impl Into<String>) -> Self {
        Self {
            theorem: None,
            reason: reason.into(),
        }
    }
}

/// One hypothesis tuple. `alpha2`/`m2` describe `g` in the product
/// statements and default to `alpha`/`m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub alpha: f64,
    pub m: f64,
    pub q: f64,
    pub p: Option<f64>,
    pub a: f64,
    pub b: f64,
    pub alpha2: Option<f64>,
    pub m2: Option<f64>,
}

impl ParamPoint {
    pub fn new(alpha: f64, m: f64, q: f64, a: f64, b: f64) -> Self {
        Self {
            alpha,
            m,
            q,
            p: None,
            a,
            b,
            alpha2: None,
            m2: None,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_second(mut self, alpha2: f64, m2: f64) -> Self {
        self.alpha2 = Some(alpha2);
        self.m2 = Some(m2);
        self
    }

    /// `(alpha2, m2)` with defaults applied.
    pub fn second(&self) -> (f64, f64) {
        (
            self.alpha2.unwrap_or(self.alpha),
            self.m2.unwrap_or(self.m),
        )
    }

    fn validate_base(&self) -> Result<(), ParamError> {
        if !(self.a > 0.0 && self.a < self.b && self.b.is_finite()) {
            return Err(ParamError::new(alloc::format!(
                "need 0 < a < b < inf, got a = {}, b = {}",
                self.a,
                self.b
            )));
        }
        Ok(())
    }

    fn validate_first(&self) -> Result<(), ParamError> {
        check_unit("alpha", self.alpha, None)?;
        check_unit("m", self.m, None)?;
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return Err(ParamError::new(alloc::format!("need q >= 1, got {}", self.q)));
        }
        if let Some(p) = self.p {
            if !(p > 0.0 && p.is_finite()) {
                return Err(ParamError::new(alloc::format!("need p > 0, got {p}")));
            }
        }
        root_of(self.a, self.m, None)?;
        Ok(())
    }

    /// Validate everything the bound-independent checks need: interval,
    /// `(alpha, m) ∈ (0,1]²`, `q ≥ 1` and a representable `a^{1/m}`.
    pub fn validate(&self) -> Result<(), ParamError> {
        self.validate_base()?;
        self.validate_first()
    }

    /// `a^{1/m}`, computed in log space.
    pub fn a_root(&self) -> f64 {
        libm::exp(libm::log(self.a) / self.m)
    }

    /// `a^{1/m2}`.
    pub fn a_root2(&self) -> f64 {
        libm::exp(libm::log(self.a) / self.second().1)
    }
}

fn check_unit(name: &str, v: f64, theorem: Option<TheoremId>) -> Result<(), ParamError> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(ParamError {
            theorem,
            reason: alloc::format!("need {name} in (0, 1], got {v}"),
        })
    }
}

fn root_of(a: f64, m: f64, theorem: Option<TheoremId>) -> Result<f64, ParamError> {
    let r = libm::exp(libm::log(a) / m);
    if r.is_finite() && r > 0.0 {
        Ok(r)
    } else {
        Err(ParamError {
            theorem,
            reason: alloc::format!("a^(1/m) is not representable (a = {a}, m = {m})"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.name().parse::<TheoremId>().unwrap(), t);
        }
        assert!("thm38".parse::<TheoremId>().is_err());
    }

    #[test]
    fn list_aliases() {
        assert_eq!(parse_theorem_list("all").unwrap().len(), 20);
        assert_eq!(parse_theorem_list("single").unwrap().len(), 11);
        assert_eq!(parse_theorem_list("product").unwrap().len(), 8);
        assert_eq!(
            parse_theorem_list("thm32, thm31,thm31").unwrap(),
            [TheoremId::Thm31, TheoremId::Thm32]
        );
    }

    #[test]
    fn restrictions() {
        let pt = ParamPoint::new(1.0, 1.0, 1.0, 1.0, 2.0);
        assert!(TheoremId::Thm31.admits(&pt).is_ok());
        assert!(TheoremId::Thm32.admits(&pt).is_err());
        assert!(TheoremId::Thm34.admits(&ParamPoint { q: 2.0, ..pt }).is_err());
        assert!(TheoremId::Thm34.admits(&ParamPoint { q: 2.0, ..pt }.with_p(2.0)).is_err());
        assert!(TheoremId::Thm34.admits(&ParamPoint { q: 2.0, ..pt }.with_p(1.0)).is_ok());
        assert!(TheoremId::Cor31_2.admits(&ParamPoint { alpha: 0.5, ..pt }).is_err());
        assert!(TheoremId::Cor37.admits(&pt.with_second(0.5, 1.0)).is_err());
        assert!(ParamPoint { alpha: 0.0, ..pt }.validate().is_err());
        assert!(ParamPoint { a: 2.0, b: 1.0, ..pt }.validate().is_err());
    }

    #[test]
    fn overflowing_root_is_rejected() {
        let pt = ParamPoint::new(1.0, 1e-3, 1.0, 10.0, 20.0);
        assert!(pt.validate().is_err());
        let ok = ParamPoint::new(1.0, 0.1, 1.0, 3.0, 4.0);
        assert!((ok.a_root() - 59049.0).abs() < 1e-8);
    }

    #[test]
    fn admitted_filters_by_g() {
        let pt = ParamPoint::new(1.0, 1.0, 1.0, 1.0, 2.0);
        let single = TheoremId::admitted(&pt, false);
        assert!(single.iter().all(|t| !t.is_product()));
        let all = TheoremId::admitted(&pt, true);
        assert!(all.contains(&TheoremId::Cor35_2));
        assert!(!all.contains(&TheoremId::Cor36));
    }
}
