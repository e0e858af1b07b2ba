//! Rational-valued measures on a finite vertex set.
//!
//! A measure carries its full domain explicitly (zero weights are listed, in
//! input order), so binary operations can insist on a common vertex set. All
//! arithmetic is exact.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::num::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("vertex sets differ: {0}")]
    VertexMismatch(String),
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("negative weight at {0:?}")]
    NegativeMass(String),
    #[error("expected a probability measure, total mass is {0}")]
    NotProbability(String),
    #[error("measures must have equal total mass ({0} vs {1})")]
    MassMismatch(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    values: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedMeasure {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    values: Vec<Rat>,
}

fn build_index(vertices: &[String]) -> Result<HashMap<String, usize>, MeasureError> {
    let mut index = HashMap::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        if index.insert(v.clone(), i).is_some() {
            return Err(MeasureError::DuplicateVertex(v.clone()));
        }
    }
    Ok(index)
}

impl Measure {
    pub fn new<I>(entries: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (String, Rat)>,
    {
        let mut vertices = Vec::new();
        let mut values = Vec::new();
        for (v, w) in entries {
            if w.is_negative() {
                return Err(MeasureError::NegativeMass(v));
            }
            vertices.push(v);
            values.push(w);
        }
        let index = build_index(&vertices)?;
        Ok(Measure { vertices, index, values })
    }

    /// A measure over `domain` with the given sparse weights; unlisted
    /// vertices get zero, weights off the domain are rejected.
    pub fn on_vertices<I>(domain: &[String], sparse: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (String, Rat)>,
    {
        let index = build_index(domain)?;
        let mut values = vec![Rat::zero(); domain.len()];
        for (v, w) in sparse {
            if w.is_negative() {
                return Err(MeasureError::NegativeMass(v));
            }
            match index.get(&v) {
                Some(&i) => values[i] = w,
                None => {
                    return Err(MeasureError::VertexMismatch(format!(
                        "vertex {v:?} not in the domain"
                    )))
                }
            }
        }
        Ok(Measure { vertices: domain.to_vec(), index, values })
    }

    pub fn dirac(domain: &[String], at: &str) -> Result<Self, MeasureError> {
        Self::on_vertices(domain, [(at.to_owned(), Rat::from_integer(1.into()))])
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn get(&self, v: &str) -> Rat {
        self.index
            .get(v)
            .map(|&i| self.values[i].clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn get_idx(&self, i: usize) -> &Rat {
        &self.values[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rat)> {
        self.vertices.iter().map(String::as_str).zip(self.values.iter())
    }

    pub fn total(&self) -> Rat {
        self.values.iter().sum()
    }

    pub fn is_probability(&self) -> bool {
        self.total() == Rat::from_integer(1.into())
    }

    pub fn require_probability(&self) -> Result<(), MeasureError> {
        if self.is_probability() {
            Ok(())
        } else {
            Err(MeasureError::NotProbability(self.total().to_string()))
        }
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.values.iter().all(|v| v.is_positive())
    }

    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.iter().filter(|(_, w)| w.is_positive()).map(|(v, _)| v)
    }

    pub fn scale(&self, factor: &Rat) -> Measure {
        Measure {
            vertices: self.vertices.clone(),
            index: self.index.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn to_signed(&self) -> SignedMeasure {
        SignedMeasure {
            vertices: self.vertices.clone(),
            index: self.index.clone(),
            values: self.values.clone(),
        }
    }

    /// Pointwise minimum; domains must agree.
    pub fn min_pointwise(&self, other: &Measure) -> Result<Measure, MeasureError> {
        let aligned = align(&self.vertices, &other.vertices, &other.index)?;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v.clone().min(other.values[aligned[i]].clone()))
            .collect();
        Ok(Measure { vertices: self.vertices.clone(), index: self.index.clone(), values })
    }

    pub fn add(&self, other: &Measure) -> Result<Measure, MeasureError> {
        let aligned = align(&self.vertices, &other.vertices, &other.index)?;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v + &other.values[aligned[i]])
            .collect();
        Ok(Measure { vertices: self.vertices.clone(), index: self.index.clone(), values })
    }
}

/// Positions of `left`'s vertices inside `right`'s order; errors unless the
/// two vertex sets are equal.
fn align(
    left: &[String],
    right: &[String],
    right_index: &HashMap<String, usize>,
) -> Result<Vec<usize>, MeasureError> {
    if left.len() != right.len() {
        return Err(MeasureError::VertexMismatch(format!(
            "{} vs {} vertices",
            left.len(),
            right.len()
        )));
    }
    left.iter()
        .map(|v| {
            right_index
                .get(v)
                .copied()
                .ok_or_else(|| MeasureError::VertexMismatch(format!("vertex {v:?} missing")))
        })
        .collect()
}

impl SignedMeasure {
    pub fn new<I>(entries: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (String, Rat)>,
    {
        let mut vertices = Vec::new();
        let mut values = Vec::new();
        for (v, w) in entries {
            vertices.push(v);
            values.push(w);
        }
        let index = build_index(&vertices)?;
        Ok(SignedMeasure { vertices, index, values })
    }

    pub fn zero(domain: &[String]) -> Result<Self, MeasureError> {
        let index = build_index(domain)?;
        Ok(SignedMeasure {
            vertices: domain.to_vec(),
            index,
            values: vec![Rat::zero(); domain.len()],
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn get(&self, v: &str) -> Rat {
        self.index
            .get(v)
            .map(|&i| self.values[i].clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn get_idx(&self, i: usize) -> &Rat {
        &self.values[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rat)> {
        self.vertices.iter().map(String::as_str).zip(self.values.iter())
    }

    pub fn total(&self) -> Rat {
        self.values.iter().sum()
    }

    /// `sum_x |value(x)|`.
    pub fn abs_sum(&self) -> Rat {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// `([d]_+, [-d]_+)`: disjoint supports, re-subtracting gives `d` back.
    pub fn positive_negative_parts(&self) -> (Measure, Measure) {
        let pos = self
            .values
            .iter()
            .map(|v| if v.is_positive() { v.clone() } else { Rat::zero() });
        let neg = self
            .values
            .iter()
            .map(|v| if v.is_negative() { -v.clone() } else { Rat::zero() });
        let make = |vals: Vec<Rat>| Measure {
            vertices: self.vertices.clone(),
            index: self.index.clone(),
            values: vals,
        };
        (make(pos.collect()), make(neg.collect()))
    }
}

/// Pointwise `m1 - m2`; sums to zero when both are probability measures.
pub fn difference(m1: &Measure, m2: &Measure) -> Result<SignedMeasure, MeasureError> {
    let aligned = align(&m1.vertices, &m2.vertices, &m2.index)?;
    let values = m1
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v - &m2.values[aligned[i]])
        .collect();
    Ok(SignedMeasure {
        vertices: m1.vertices.clone(),
        index: m1.index.clone(),
        values,
    })
}

/// `1/2 sum_x |m1(x) - m2(x)|`, the total-variation-style mass bound.
pub fn half_total_variation(m1: &Measure, m2: &Measure) -> Result<Rat, MeasureError> {
    Ok(difference(m1, m2)?.abs_sum() / Rat::from_integer(2.into()))
}

/// Partial sums of `m` along `chain_order`; the chain must list every
/// support vertex.
pub fn distribution_function(
    m: &Measure,
    chain_order: &[String],
) -> Result<Vec<(String, Rat)>, MeasureError> {
    let on_chain: std::collections::HashSet<&str> =
        chain_order.iter().map(String::as_str).collect();
    for v in m.support() {
        if !on_chain.contains(v) {
            return Err(MeasureError::VertexMismatch(format!(
                "support vertex {v:?} not on the chain"
            )));
        }
    }
    let mut acc = Rat::zero();
    Ok(chain_order
        .iter()
        .map(|v| {
            acc += m.get(v);
            (v.clone(), acc.clone())
        })
        .collect())
}

/// `(V_-, V_+)`: vertices where `m1 > m2`, resp. `m2 > m1`, in domain order.
pub fn v_minus_v_plus(
    m1: &Measure,
    m2: &Measure,
) -> Result<(Vec<String>, Vec<String>), MeasureError> {
    let d = difference(m1, m2)?;
    let minus = d
        .iter()
        .filter(|(_, w)| w.is_positive())
        .map(|(v, _)| v.to_owned())
        .collect();
    let plus = d
        .iter()
        .filter(|(_, w)| w.is_negative())
        .map(|(v, _)| v.to_owned())
        .collect();
    Ok((minus, plus))
}
