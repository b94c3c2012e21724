//! Discrete memoryless channels, cost functions and channel algebra.

use serde::{Deserialize, Serialize};

use crate::distribution::{check_len, entropy_of, kl_slices, ProbabilityVector};
use crate::error::{Error, Result};

/// Row-stochastic matrix `W(y|x)` stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelJson", into = "ChannelJson")]
pub struct DiscreteChannel {
    input_size: usize,
    output_size: usize,
    matrix: Vec<f64>,
}

/// Wire form: `{"input_size": n, "output_size": m, "matrix": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub input_size: usize,
    pub output_size: usize,
    pub matrix: Vec<Vec<f64>>,
}

impl TryFrom<ChannelJson> for DiscreteChannel {
    type Error = Error;

    fn try_from(json: ChannelJson) -> Result<Self> {
        check_len(json.input_size, json.matrix.len())?;
        if let Some(row) = json.matrix.iter().find(|r| r.len() != json.output_size) {
            return Err(Error::DimensionMismatch {
                expected: json.output_size,
                actual: row.len(),
            });
        }
        Self::from_rows(json.matrix)
    }
}

impl From<DiscreteChannel> for ChannelJson {
    fn from(w: DiscreteChannel) -> Self {
        ChannelJson {
            input_size: w.input_size,
            output_size: w.output_size,
            matrix: w.rows().map(<[f64]>::to_vec).collect(),
        }
    }
}

impl DiscreteChannel {
    /// Each row must be non-negative and sum to one within `1e-12`; rows are
    /// then renormalized exactly.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let input_size = rows.len();
        if input_size == 0 {
            return Err(Error::InvalidChannel("no input letters".into()));
        }
        let output_size = rows[0].len();
        if output_size == 0 {
            return Err(Error::InvalidChannel("no output letters".into()));
        }
        let mut matrix = Vec::with_capacity(input_size * output_size);
        for (x, row) in rows.into_iter().enumerate() {
            check_len(output_size, row.len())?;
            let row = ProbabilityVector::new(row)
                .map_err(|e| Error::InvalidChannel(format!("row {x}: {e}")))?;
            matrix.extend_from_slice(row.as_slice());
        }
        Ok(Self {
            input_size,
            output_size,
            matrix,
        })
    }

    pub fn identity(size: usize) -> Self {
        let rows = (0..size)
            .map(|x| ProbabilityVector::point_mass(size, x).into())
            .collect();
        Self::from_rows(rows).expect("identity rows are stochastic")
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::DomainError(format!("crossover probability {p}")));
        }
        Self::from_rows(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Binary erasure channel; outputs are `0, erasure, 1`.
    pub fn bec(e: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&e) {
            return Err(Error::DomainError(format!("erasure probability {e}")));
        }
        Self::from_rows(vec![vec![1.0 - e, e, 0.0], vec![0.0, e, 1.0 - e]])
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.matrix[x * self.output_size..(x + 1) * self.output_size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.matrix.chunks_exact(self.output_size)
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.matrix[x * self.output_size + y]
    }

    /// Channel restricted to the listed inputs (in that order).
    pub fn restrict_inputs(&self, inputs: &[usize]) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidChannel("empty input restriction".into()));
        }
        Self::from_rows(inputs.iter().map(|&x| self.row(x).to_vec()).collect())
    }

    pub(crate) fn output_raw(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.output_size];
        for (px, row) in p.iter().zip(self.rows()) {
            if *px > 0.0 {
                for (o, w) in out.iter_mut().zip(row) {
                    *o += px * w;
                }
            }
        }
        out
    }

    /// `D(W_x || q)` for every input letter.
    pub(crate) fn row_divergences(&self, q: &[f64]) -> Vec<f64> {
        self.rows().map(|row| kl_slices(row, q)).collect()
    }

    /// Output distribution `W_P(y) = sum_x P(x) W(y|x)`.
    pub fn output_distribution(&self, p: &ProbabilityVector) -> Result<ProbabilityVector> {
        check_len(self.input_size, p.len())?;
        Ok(ProbabilityVector::renormalized(
            self.output_raw(p.as_slice()),
        ))
    }

    /// `I(P, W) = sum_x P(x) D(W_x || W_P)` in nats.
    pub fn mutual_information(&self, p: &ProbabilityVector) -> Result<f64> {
        check_len(self.input_size, p.len())?;
        Ok(mutual_information_raw(self, p.as_slice()))
    }

    /// Row-major tensor product, `(x, x') -> x * |X'| + x'` and likewise on outputs.
    pub fn product(&self, other: &Self) -> Self {
        let mut matrix = Vec::with_capacity(self.matrix.len() * other.matrix.len());
        for row in self.rows() {
            for row2 in other.rows() {
                for a in row {
                    matrix.extend(row2.iter().map(|b| a * b));
                }
            }
        }
        Self {
            input_size: self.input_size * other.input_size,
            output_size: self.output_size * other.output_size,
            matrix,
        }
    }

    /// Entropy of each row.
    pub fn row_entropies(&self) -> Vec<f64> {
        self.rows().map(entropy_of).collect()
    }
}

pub(crate) fn mutual_information_raw(w: &DiscreteChannel, p: &[f64]) -> f64 {
    let q = w.output_raw(p);
    let i: f64 = p
        .iter()
        .zip(w.rows())
        .filter(|(px, _)| **px > 0.0)
        .map(|(px, row)| px * kl_slices(row, &q))
        .sum();
    i.max(0.0)
}

/// Free-function form of [`DiscreteChannel::product`].
pub fn product_channel(w: &DiscreteChannel, w2: &DiscreteChannel) -> DiscreteChannel {
    w.product(w2)
}

/// Per-letter cost `c(x)` with an average-cost cap `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CostJson", into = "CostJson")]
pub struct CostFunction {
    costs: Vec<f64>,
    cap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostJson {
    pub costs: Vec<f64>,
    pub cap: f64,
}

impl TryFrom<CostJson> for CostFunction {
    type Error = Error;

    fn try_from(json: CostJson) -> Result<Self> {
        Self::new(json.costs, json.cap)
    }
}

impl From<CostFunction> for CostJson {
    fn from(c: CostFunction) -> Self {
        CostJson {
            costs: c.costs,
            cap: c.cap,
        }
    }
}

impl CostFunction {
    pub fn new(costs: Vec<f64>, cap: f64) -> Result<Self> {
        if costs.is_empty() {
            return Err(Error::InvalidCost("no costs".into()));
        }
        if costs.iter().any(|c| !c.is_finite()) || !cap.is_finite() {
            return Err(Error::InvalidCost("costs and cap must be finite".into()));
        }
        let min_cost = costs.iter().copied().fold(f64::INFINITY, f64::min);
        if min_cost > cap {
            return Err(Error::EmptyFeasibleSet { min_cost, cap });
        }
        Ok(Self { costs, cap })
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn min_cost(&self) -> f64 {
        self.costs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_cost(&self) -> f64 {
        self.costs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn expected(&self, p: &[f64]) -> f64 {
        self.costs.iter().zip(p).map(|(c, q)| c * q).sum()
    }

    /// Additive cost on a product alphabet, `c(x) + c'(x')` capped at `K + K'`.
    pub fn product(&self, other: &Self) -> Self {
        let costs = self
            .costs
            .iter()
            .flat_map(|a| other.costs.iter().map(move |b| a + b))
            .collect();
        Self {
            costs,
            cap: self.cap + other.cap,
        }
    }
}
