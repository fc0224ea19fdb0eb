use std::fmt;
use std::sync::Arc;

use crate::ideals::TailCertificate;
use crate::linalg::{LinalgError, Subspace};

use super::ConvergenceError;

pub type SubspaceRule = Arc<dyn Fn(u64) -> Result<Subspace, LinalgError> + Send + Sync>;
pub type ScalarRule = Arc<dyn Fn(u64) -> f64 + Send + Sync>;
/// Maps ε to a certificate for the exceptional set at ε, where one is known.
pub type CertificateRule = Arc<dyn Fn(f64) -> Option<TailCertificate> + Send + Sync>;

/// A sequence n ↦ U_n of k-dimensional subspaces of ℝ^d.
///
/// The rule fixes an orthonormal basis for every n; the per-vector
/// criteria read that basis in order.
#[derive(Clone)]
pub struct SubspaceSequence {
    name: String,
    ambient_dim: usize,
    dim: usize,
    rule: SubspaceRule,
    certificate: Option<CertificateRule>,
}

impl SubspaceSequence {
    pub fn new<F>(name: impl Into<String>, ambient_dim: usize, dim: usize, rule: F) -> Self
    where
        F: Fn(u64) -> Result<Subspace, LinalgError> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            ambient_dim,
            dim,
            rule: Arc::new(rule),
            certificate: None,
        }
    }

    /// U_n = `subspace` for every n.
    pub fn constant(name: impl Into<String>, subspace: Subspace) -> Self {
        let (d, k) = (subspace.ambient_dim(), subspace.dim());
        Self::new(name, d, k, move |_| Ok(subspace.clone()))
    }

    /// Attaches certificates for the gap exceptional sets
    /// A(ε) = {n : gap(U_n, V) ≥ ε}.
    pub fn with_certificate<F>(mut self, certificate: F) -> Self
    where
        F: Fn(f64) -> TailCertificate + Send + Sync + 'static,
    {
        self.certificate = Some(Arc::new(move |eps| Some(certificate(eps))));
        self
    }

    /// As [`Self::with_certificate`], for rules that cover only some ε.
    pub fn with_partial_certificate<F>(mut self, certificate: F) -> Self
    where
        F: Fn(f64) -> Option<TailCertificate> + Send + Sync + 'static,
    {
        self.certificate = Some(Arc::new(certificate));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn certificate_rule(&self) -> Option<&CertificateRule> {
        self.certificate.as_ref()
    }

    pub fn certificate(&self, epsilon: f64) -> Option<TailCertificate> {
        self.certificate.as_ref().and_then(|c| c(epsilon))
    }

    /// U_n, checked against the declared d and k.
    pub fn subspace(&self, n: u64) -> Result<Subspace, ConvergenceError> {
        let s = (self.rule)(n).map_err(|source| ConvergenceError::Rule { n, source })?;
        if s.ambient_dim() != self.ambient_dim || s.dim() != self.dim {
            return Err(ConvergenceError::RuleShape {
                n,
                expected: (self.ambient_dim, self.dim),
                found: (s.ambient_dim(), s.dim()),
            });
        }
        Ok(s)
    }

    /// Same subspaces, every basis right-multiplied by the k×k orthogonal
    /// matrix `q`. Gaps (and therefore certificates) are unchanged.
    pub fn with_rotated_bases(&self, q: Vec<Vec<f64>>) -> Self {
        let inner = self.rule.clone();
        let rule: SubspaceRule = Arc::new(move |n| inner(n)?.rotate_basis(&q));
        Self {
            name: format!("{}-rotated", self.name),
            ambient_dim: self.ambient_dim,
            dim: self.dim,
            rule,
            certificate: self.certificate.clone(),
        }
    }
}

impl fmt::Debug for SubspaceSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubspaceSequence")
            .field("name", &self.name)
            .field("ambient_dim", &self.ambient_dim)
            .field("dim", &self.dim)
            .field("certified", &self.certificate.is_some())
            .finish()
    }
}

/// A real sequence n ↦ x_n.
#[derive(Clone)]
pub struct ScalarSequence {
    rule: ScalarRule,
    certificate: Option<CertificateRule>,
}

impl ScalarSequence {
    pub fn new<F>(rule: F) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        Self {
            rule: Arc::new(rule),
            certificate: None,
        }
    }

    /// Certificates for {n : |x_n − candidate| ≥ ε}.
    pub fn with_certificate<F>(mut self, certificate: F) -> Self
    where
        F: Fn(f64) -> TailCertificate + Send + Sync + 'static,
    {
        self.certificate = Some(Arc::new(move |eps| Some(certificate(eps))));
        self
    }

    pub fn value(&self, n: u64) -> Result<f64, ConvergenceError> {
        let x = (self.rule)(n);
        if !x.is_finite() {
            return Err(ConvergenceError::NonFinite { n });
        }
        Ok(x)
    }

    pub fn certificate_rule(&self) -> Option<&CertificateRule> {
        self.certificate.as_ref()
    }
}

impl fmt::Debug for ScalarSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarSequence")
            .field("certified", &self.certificate.is_some())
            .finish()
    }
}
