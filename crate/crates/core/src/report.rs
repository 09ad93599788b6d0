//! Serializable report types shared across modules, plus input digests.
//! Numeric fields are `f64` regardless of the scalar type the computation
//! ran at; reports are artifacts, not working precision.

use crate::matrix::{IndexSet, Matrix};
use crate::scalar::Real;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Uniform relative tolerance for every `lhs ≤ rhs` check.
pub const REL_TOL: f64 = 1e-9;

/// `lhs ≤ rhs` up to `REL_TOL · max(1, |rhs|)`.
pub fn holds_leq(lhs: f64, rhs: f64) -> bool {
    rhs - lhs >= -REL_TOL * rhs.abs().max(1.0)
}

#[derive(Serialize, Clone, Debug, Default)]
pub struct Provenance {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn method(name: &str) -> Self {
        Provenance {
            method: name.to_string(),
            k: None,
            seed: None,
        }
    }
}

/// Outcome of one named inequality check.
#[derive(Serialize, Clone, Debug)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub constant_used: f64,
    pub inputs_digest: String,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub details: Map<String, Value>,
}

impl BoundReport {
    pub fn new(
        name: &str,
        lhs: f64,
        rhs: f64,
        constant_used: f64,
        inputs_digest: String,
        provenance: Provenance,
    ) -> Self {
        BoundReport {
            name: name.to_string(),
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: holds_leq(lhs, rhs),
            constant_used,
            inputs_digest,
            provenance,
            details: Map::new(),
        }
    }

    pub fn with_detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }

    /// And-combine an auxiliary condition into the holds flag, recording it
    /// under `details`.
    pub fn also_require(mut self, key: &str, ok: bool) -> Self {
        self.details.insert(key.to_string(), Value::Bool(ok));
        self.holds = self.holds && ok;
        self
    }
}

/// Content hash binding a result to its input matrix.
pub fn matrix_digest<T: Real>(m: &Matrix<T>) -> String {
    let mut h = Sha256::new();
    h.update(b"cutspec-matrix-v1");
    h.update((m.rows() as u64).to_le_bytes());
    h.update((m.cols() as u64).to_le_bytes());
    for z in m.entries() {
        h.update(z.re.to64().to_bits().to_le_bytes());
        h.update(z.im.to64().to_bits().to_le_bytes());
    }
    hex(&h.finalize())
}

pub fn pair_digest<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> String {
    format!("{}:{}", matrix_digest(a), matrix_digest(b))
}

pub fn index_set_digest(x: &IndexSet) -> String {
    let mut h = Sha256::new();
    h.update(b"cutspec-indexset-v1");
    h.update((x.universe() as u64).to_le_bytes());
    for i in x.members() {
        h.update((i as u64).to_le_bytes());
    }
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// 1-based member list for reports.
pub fn one_based(x: &IndexSet) -> Vec<usize> {
    x.one_based()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    #[test]
    fn holds_tolerance_behaviour() {
        assert!(holds_leq(1.0, 1.0));
        assert!(holds_leq(1.0 + 5e-10, 1.0));
        assert!(!holds_leq(1.0 + 5e-9, 1.0));
        assert!(holds_leq(0.0, 0.0));
        assert!(!holds_leq(1e-8, 0.0));
    }

    #[test]
    fn digest_depends_on_content_and_shape() {
        let a = Matrix::<f64>::from_real(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = Matrix::<f64>::from_real(1, 4, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let c = Matrix::<f64>::from_real(2, 2, vec![1.0, 2.0, 3.0, 5.0]).unwrap();
        assert_ne!(matrix_digest(&a), matrix_digest(&b));
        assert_ne!(matrix_digest(&a), matrix_digest(&c));
        assert_eq!(matrix_digest(&a), matrix_digest(&a.clone()));
    }
}
