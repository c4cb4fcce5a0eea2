use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::rng::RngStream;
use crate::split::{FiniteChain, StateSpace};
use crate::{Error, Result};

/// Blocks drawn while waiting for one coalescent block before giving up.
pub const DEFAULT_BLOCK_CAP: usize = 1_000_000;

/// A piecewise-constant update `g(x, u)` on `{0, ..., n−1}`.
///
/// Row `x` is a list of `(threshold, next)` pairs with strictly increasing
/// thresholds ending at 1; `g(x, u)` is the `next` of the first pair with
/// `u < threshold`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdMap {
    tables: Vec<Vec<(f64, usize)>>,
}

impl ThresholdMap {
    pub fn new(tables: Vec<Vec<(f64, usize)>>) -> Result<Self> {
        let n = tables.len();
        if n == 0 {
            return Err(Error::InvalidArgument("map has no states".into()));
        }
        for (x, row) in tables.iter().enumerate() {
            let Some(&(last, _)) = row.last() else {
                return Err(Error::InvalidArgument(format!("state {x} has an empty threshold table")));
            };
            if last != 1.0 {
                return Err(Error::InvalidArgument(format!("state {x}: last threshold is {last}, expected 1")));
            }
            let mut prev = 0.0;
            for &(t, y) in row {
                if !(t > prev) {
                    return Err(Error::InvalidArgument(format!("state {x}: thresholds must increase in (0, 1]")));
                }
                if y >= n {
                    return Err(Error::UnknownLabel(y));
                }
                prev = t;
            }
        }
        Ok(Self { tables })
    }

    pub fn n_states(&self) -> usize {
        self.tables.len()
    }

    pub fn tables(&self) -> &[Vec<(f64, usize)>] {
        &self.tables
    }

    #[inline]
    pub fn apply(&self, x: usize, u: f64) -> usize {
        let row = &self.tables[x];
        row.iter().find(|&&(t, _)| u < t).unwrap_or(row.last().expect("nonempty")).1
    }

    /// One-step kernel `S(x, y) = Pr[g(x, U) = y]`.
    pub fn transition_rows(&self) -> Vec<Vec<f64>> {
        let n = self.n_states();
        self.tables
            .iter()
            .map(|row| {
                let mut out = vec![0.0; n];
                let mut prev = 0.0;
                for &(t, y) in row {
                    out[y] += t - prev;
                    prev = t;
                }
                out
            })
            .collect()
    }

    pub fn transition_chain(&self) -> FiniteChain {
        FiniteChain::new(self.transition_rows()).expect("threshold tables partition (0, 1)")
    }

    /// Every threshold in (0, 1), sorted, with 0 and 1 at the ends.
    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = std::iter::once(0.0)
            .chain(self.tables.iter().flatten().map(|&(t, _)| t))
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

pub type DetectorFn = dyn Fn(&ThresholdMap, &[f64]) -> Option<usize> + Send + Sync;

/// Certifies that a block `G_k(·, u₁..u_k)` is constant in `x`.
///
/// A detector may miss coalescent blocks but must never certify one that
/// is not coalescent.
#[derive(Clone, Default)]
pub enum Detector {
    /// Evaluate the block at every state.
    #[default]
    Exact,
    /// Caller-supplied rule; cross-checked against exact evaluation when
    /// the model's soundness probe is on.
    Custom(Arc<DetectorFn>),
}

impl fmt::Debug for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Detector::Exact => f.write_str("Exact"),
            Detector::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Detector {
    pub fn custom(f: impl Fn(&ThresholdMap, &[f64]) -> Option<usize> + Send + Sync + 'static) -> Self {
        Detector::Custom(Arc::new(f))
    }

    /// A detector that never certifies anything.
    pub fn never() -> Self {
        Self::custom(|_, _| None)
    }
}

/// `k` uniforms and the detector's verdict on them.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDraw {
    pub uniforms: Vec<f64>,
    pub coalesced: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// A random-map model `(g, k, detector)`.
#[derive(Clone, Debug)]
pub struct RandomMapModel {
    pub map: ThresholdMap,
    pub k: usize,
    pub detector: Detector,
    /// Verify every certified block against exact evaluation.
    pub soundness_probe: bool,
}

impl RandomMapModel {
    pub fn new(map: ThresholdMap, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("block length k must be at least 1".into()));
        }
        Ok(Self {
            map,
            k,
            detector: Detector::Exact,
            soundness_probe: cfg!(debug_assertions),
        })
    }

    pub fn with_detector(mut self, detector: Detector) -> Self {
        self.detector = detector;
        self
    }

    pub fn space(&self) -> StateSpace {
        StateSpace::Finite(self.map.n_states())
    }

    /// `G_n(x, u₁..u_n) = g(g(⋯g(x, u₁)⋯, u_{n−1}), u_n)`.
    pub fn compose_block(&self, x: usize, uniforms: &[f64]) -> Result<usize> {
        if uniforms.is_empty() {
            return Err(Error::InvalidArgument("empty uniform sequence".into()));
        }
        if let Some(u) = uniforms.iter().find(|&&u| !(u > 0.0 && u < 1.0)) {
            return Err(Error::InvalidArgument(format!("uniform {u} is not in (0, 1)")));
        }
        if x >= self.map.n_states() {
            return Err(Error::UnknownLabel(x));
        }
        Ok(self.compose_unchecked(x, uniforms))
    }

    #[inline]
    fn compose_unchecked(&self, x: usize, uniforms: &[f64]) -> usize {
        uniforms.iter().fold(x, |s, &u| self.map.apply(s, u))
    }

    fn exact_coalescence(&self, uniforms: &[f64]) -> Option<usize> {
        let first = self.compose_unchecked(0, uniforms);
        (1..self.map.n_states())
            .all(|x| self.compose_unchecked(x, uniforms) == first)
            .then_some(first)
    }

    pub fn detect_coalescence(&self, uniforms: &[f64]) -> Result<Option<usize>> {
        if uniforms.len() != self.k {
            return Err(Error::DimensionMismatch(uniforms.len(), self.k));
        }
        match &self.detector {
            Detector::Exact => Ok(self.exact_coalescence(uniforms)),
            Detector::Custom(f) => {
                let verdict = f(&self.map, uniforms);
                if let (true, Some(v)) = (self.soundness_probe, verdict) {
                    if self.exact_coalescence(uniforms) != Some(v) {
                        return Err(Error::Precondition(format!(
                            "detector certified a non-coalescent block {uniforms:?} as {v}"
                        )));
                    }
                }
                Ok(verdict)
            }
        }
    }

    pub fn draw_block(&self, rng: &mut RngStream) -> Result<BlockDraw> {
        let uniforms: Vec<f64> = (0..self.k).map(|_| rng.uniform()).collect();
        let coalesced = self.detect_coalescence(&uniforms)?;
        Ok(BlockDraw { uniforms, coalesced })
    }

    /// Fraction of i.i.d. blocks certified coalescent, with its binomial
    /// standard error.
    pub fn estimate_block_epsilon(&self, trials: usize, rng: &mut RngStream) -> Result<BlockEstimate> {
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        let mut hits = 0usize;
        for _ in 0..trials {
            if self.draw_block(rng)?.coalesced.is_some() {
                hits += 1;
            }
        }
        let p = hits as f64 / trials as f64;
        Ok(BlockEstimate {
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        })
    }

    /// Read-once coupling-from-the-past emissions driven by `rng`.
    pub fn read_once(&self, rng: RngStream) -> ReadOnceStream<'_> {
        ReadOnceStream {
            model: self,
            rng,
            pending: None,
            block_cap: DEFAULT_BLOCK_CAP,
            blocks_consumed: 0,
            last_blocks: 0,
            emitted: 0,
        }
    }
}

/// Iterated read-once sampler. Each emission is an exact, independent draw
/// from the stationary law of `S`.
///
/// The coalescent block that closes one emission seeds the next, so every
/// uniform is read exactly once.
pub struct ReadOnceStream<'a> {
    model: &'a RandomMapModel,
    rng: RngStream,
    pending: Option<usize>,
    block_cap: usize,
    blocks_consumed: u64,
    last_blocks: usize,
    emitted: u64,
}

impl ReadOnceStream<'_> {
    pub fn with_block_cap(mut self, cap: usize) -> Self {
        self.block_cap = cap.max(1);
        self
    }

    pub fn blocks_consumed(&self) -> u64 {
        self.blocks_consumed
    }

    /// Blocks drawn for the latest emission, including its closing
    /// coalescent block.
    pub fn last_blocks(&self) -> usize {
        self.last_blocks
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    fn cap_error(&self) -> Error {
        Error::CapExceeded {
            what: "read-once coalescence search",
            cap: self.block_cap,
            acceptance_rate: 0.0,
        }
    }

    pub fn next_sample(&mut self) -> Result<usize> {
        let seed = match self.pending.take() {
            Some(s) => s,
            None => {
                let mut found = None;
                for _ in 0..self.block_cap {
                    self.blocks_consumed += 1;
                    if let Some(v) = self.model.draw_block(&mut self.rng)?.coalesced {
                        found = Some(v);
                        break;
                    }
                }
                found.ok_or_else(|| self.cap_error())?
            }
        };
        let mut stored: Vec<Vec<f64>> = Vec::new();
        for drawn in 1..=self.block_cap {
            self.blocks_consumed += 1;
            let block = self.model.draw_block(&mut self.rng)?;
            if let Some(next_seed) = block.coalesced {
                // Apply the stored blocks newest first, oldest last.
                let x = stored
                    .iter()
                    .rev()
                    .fold(seed, |s, u| self.model.compose_unchecked(s, u));
                self.pending = Some(next_seed);
                self.last_blocks = drawn;
                self.emitted += 1;
                return Ok(x);
            }
            stored.push(block.uniforms);
        }
        Err(self.cap_error())
    }
}

impl Iterator for ReadOnceStream<'_> {
    type Item = Result<usize>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_sample())
    }
}

/// Exact block decomposition `S^k(x, ·) = ε ν + (1 − ε) R(x, ·)` for a
/// piecewise-constant map, by enumerating the cells of `(0, 1)^k` on which
/// `G_k` is constant.
#[derive(Clone, Debug, Serialize)]
pub struct BlockLaw {
    pub epsilon: f64,
    pub nu: Vec<f64>,
    /// Rows of `R`; all zero when `ε = 1`.
    pub residual: Vec<Vec<f64>>,
}

pub fn exact_block_law(model: &RandomMapModel) -> Result<BlockLaw> {
    let b = model.map.breakpoints();
    let cells_per_axis = b.len() - 1;
    let n = model.map.n_states();
    let total_cells = (cells_per_axis as f64).powi(model.k as i32);
    if total_cells > 1e7 {
        return Err(Error::InvalidArgument(format!("{total_cells:.0} cells is too many to enumerate")));
    }
    let mut eps = 0.0;
    let mut nu = vec![0.0; n];
    let mut res = vec![vec![0.0; n]; n];
    let mut idx = vec![0usize; model.k];
    let mids: Vec<f64> = b.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let widths: Vec<f64> = b.windows(2).map(|w| w[1] - w[0]).collect();
    let mut u = vec![0.0; model.k];
    'cells: loop {
        let mut w = 1.0;
        for (j, &i) in idx.iter().enumerate() {
            u[j] = mids[i];
            w *= widths[i];
        }
        match model.exact_coalescence(&u) {
            Some(v) => {
                eps += w;
                nu[v] += w;
            }
            None => {
                for (x, row) in res.iter_mut().enumerate() {
                    row[model.compose_unchecked(x, &u)] += w;
                }
            }
        }
        for j in 0..model.k {
            idx[j] += 1;
            if idx[j] < cells_per_axis {
                continue 'cells;
            }
            idx[j] = 0;
        }
        break;
    }
    if eps > 0.0 {
        nu.iter_mut().for_each(|v| *v /= eps);
    }
    if eps < 1.0 {
        for row in &mut res {
            row.iter_mut().for_each(|v| *v /= 1.0 - eps);
        }
    }
    Ok(BlockLaw {
        epsilon: eps,
        nu,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::figure1_map;

    fn fig(k: usize) -> RandomMapModel {
        RandomMapModel::new(figure1_map(), k).unwrap()
    }

    #[test]
    fn compose_examples() {
        let m = fig(2);
        // 1-based labels 3 → 1 → 2 become 2 → 0 → 1.
        assert_eq!(m.compose_block(2, &[0.1, 0.9]).unwrap(), 1);
        assert_eq!(m.compose_block(1, &[0.7, 0.7]).unwrap(), 1);
        for x in 0..3 {
            for u in [0.1, 0.4, 0.6, 0.9] {
                assert_eq!(m.compose_block(x, &[u]).unwrap(), m.map.apply(x, u));
            }
        }
        assert!(m.compose_block(0, &[]).is_err());
        assert!(m.compose_block(0, &[1.0]).is_err());
    }

    #[test]
    fn detection_examples() {
        let m = fig(2);
        assert_eq!(m.detect_coalescence(&[0.3, 0.3]).unwrap(), Some(1));
        let brute: Vec<usize> = (0..3).map(|x| m.compose_block(x, &[0.6, 0.3]).unwrap()).collect();
        let expect = if brute.iter().all(|&v| v == brute[0]) { Some(brute[0]) } else { None };
        assert_eq!(m.detect_coalescence(&[0.6, 0.3]).unwrap(), expect);
        assert!(m.detect_coalescence(&[0.3]).is_err());
        let one = fig(1);
        for i in 1..1000 {
            assert_eq!(one.detect_coalescence(&[i as f64 / 1000.0]).unwrap(), None);
        }
    }

    #[test]
    fn unsound_detector_is_caught() {
        let m = fig(2).with_detector(Detector::custom(|_, _| Some(0)));
        let m = RandomMapModel { soundness_probe: true, ..m };
        assert!(m.detect_coalescence(&[0.9, 0.9]).is_err());
    }

    #[test]
    fn never_detector_estimates_zero() {
        let m = fig(2).with_detector(Detector::never());
        let e = m.estimate_block_epsilon(1000, &mut RngStream::from_seed(1)).unwrap();
        assert_eq!(e.estimate, 0.0);
        let e1 = fig(1).estimate_block_epsilon(1000, &mut RngStream::from_seed(1)).unwrap();
        assert_eq!(e1.estimate, 0.0);
    }

    #[test]
    fn exact_block_law_figure1() {
        let law = exact_block_law(&fig(2)).unwrap();
        assert!((law.epsilon - 0.25).abs() < 1e-15);
        assert_eq!(law.nu, vec![0.0, 1.0, 0.0]);
        let law1 = exact_block_law(&fig(1)).unwrap();
        assert_eq!(law1.epsilon, 0.0);
    }

    #[test]
    fn cap_exceeded_without_coalescence() {
        let m = fig(1);
        let mut s = m.read_once(RngStream::from_seed(0)).with_block_cap(1000);
        assert!(matches!(s.next_sample(), Err(Error::CapExceeded { cap: 1000, .. })));
    }
}
