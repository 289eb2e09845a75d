use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Certified,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// Worst of two verdicts: violated beats inconclusive beats certified.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Certified,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "certified",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A sample at which an inequality `lhs ≤ rhs` was tested.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub label: String,
    pub node: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

impl Witness {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Witness {
            label: label.into(),
            node: None,
            lhs,
            rhs,
        }
    }

    pub fn at_node(mut self, node: usize) -> Self {
        self.node = Some(node);
        self
    }

    /// `lhs − rhs`; positive means the inequality fails.
    pub fn excess(&self) -> f64 {
        self.lhs - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertReport {
    pub check: String,
    pub verdict: Verdict,
    pub tolerance: f64,
    /// For violations, the failing samples (worst first); otherwise the tightest sample.
    pub witnesses: Vec<Witness>,
    pub metadata: Vec<(String, String)>,
}

/// Number of witnesses kept in a report.
pub const MAX_WITNESSES: usize = 5;

impl CertReport {
    pub fn new(check: impl Into<String>, verdict: Verdict, tolerance: f64) -> Self {
        CertReport {
            check: check.into(),
            verdict,
            tolerance,
            witnesses: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn inconclusive(check: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut r = CertReport::new(check, Verdict::Inconclusive, 0.0);
        r.meta("reason", reason.into());
        r
    }

    /// Builds a report from tested samples: violated iff some `lhs > rhs + tol`.
    /// Samples with a non-finite side are treated as failures.
    pub fn from_samples(check: impl Into<String>, tolerance: f64, samples: Vec<Witness>) -> Self {
        let check = check.into();
        if samples.is_empty() {
            return CertReport::inconclusive(check, "no samples");
        }
        let fails = |w: &Witness| !(w.lhs <= w.rhs + tolerance);
        let mut failing: Vec<Witness> = samples.iter().filter(|w| fails(w)).cloned().collect();
        let total = samples.len();
        let mut r = if failing.is_empty() {
            let tightest = samples
                .into_iter()
                .max_by(|a, b| a.excess().total_cmp(&b.excess()))
                .expect("nonempty");
            let mut r = CertReport::new(check, Verdict::Certified, tolerance);
            r.witnesses.push(tightest);
            r
        } else {
            failing.sort_by(|a, b| excess_key(b).total_cmp(&excess_key(a)));
            failing.truncate(MAX_WITNESSES);
            let mut r = CertReport::new(check, Verdict::Violated, tolerance);
            r.witnesses = failing;
            r
        };
        r.meta("samples", total.to_string());
        r
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

fn excess_key(w: &Witness) -> f64 {
    let e = w.excess();
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

impl fmt::Display for CertReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.verdict)?;
        for (k, v) in &self.metadata {
            write!(f, " {k}={v}")?;
        }
        for w in &self.witnesses {
            write!(f, "\n  {} lhs={:e} rhs={:e}", w.label, w.lhs, w.rhs)?;
            if let Some(n) = w.node {
                write!(f, " node={n}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn violation_keeps_worst_witness_first() {
        let r = CertReport::from_samples(
            "c",
            1e-8,
            vec![
                Witness::new("a", 1.0, 0.0),
                Witness::new("b", 0.0, 1.0),
                Witness::new("c", 5.0, 0.0),
            ],
        );
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.witnesses[0].label, "c");
        assert_eq!(r.witnesses.len(), 2);
        assert!(r.witnesses.iter().all(|w| w.lhs > w.rhs + r.tolerance));
    }

    #[test]
    fn nan_counts_as_failure() {
        let r = CertReport::from_samples("c", 0.0, vec![Witness::new("a", f64::NAN, 0.0)]);
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn empty_is_inconclusive() {
        assert_eq!(
            CertReport::from_samples("c", 0.0, vec![]).verdict,
            Verdict::Inconclusive
        );
    }

    #[test]
    fn combine_order() {
        use Verdict::*;
        assert_eq!(Certified.combine(Inconclusive), Inconclusive);
        assert_eq!(Inconclusive.combine(Violated), Violated);
        assert_eq!(Certified.combine(Certified), Certified);
    }
}
