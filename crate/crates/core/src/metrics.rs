//! The three evaluation metrics: ground-state probability, the
//! number-of-shots-to-reject fairness statistic, and aggregate circuit error
//! from calibration data.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::ising::GroundSet;
use crate::sim::SampleCounts;
use crate::{Error, Result};

/// Fraction of shots landing in the ground set, honoring the set's
/// complement mode for membership.
pub fn gsp(counts: &SampleCounts, ground: &GroundSet) -> f64 {
    if counts.shots == 0 {
        return 0.0;
    }
    let hit: u64 = counts
        .counts
        .iter()
        .filter(|(&state, _)| ground.contains(state))
        .map(|(_, &c)| c)
        .sum();
    hit as f64 / counts.shots as f64
}

/// Bucket the ground-state portion of `counts` for the fairness test.
///
/// In `Separate` mode every ground state is its own bucket; in `Combined`
/// mode complement pairs share one. Buckets with zero counts are kept: the
/// test is against the uniform distribution over all of them.
pub fn ground_distribution(counts: &SampleCounts, ground: &GroundSet) -> BTreeMap<usize, u64> {
    let mut buckets: BTreeMap<usize, u64> = ground.buckets().into_iter().map(|b| (b, 0)).collect();
    for (&state, &c) in &counts.counts {
        if ground.contains(state) {
            *buckets.entry(ground.bucket_of(state)).or_insert(0) += c;
        }
    }
    buckets
}

/// Parameters of the shots-to-reject search.
#[derive(Debug, Clone, PartialEq)]
pub struct FairnessConfig {
    /// Inner trials per candidate shot count.
    pub inner_loops: u64,
    /// p-value threshold for one trial to reject.
    pub significance: f64,
    /// Fraction of trials that must reject.
    pub rejection_fraction: f64,
    /// Largest shot count searched.
    pub cap: u64,
}

impl FairnessConfig {
    /// Defaults used for gate-model experiments.
    pub fn gate_default() -> FairnessConfig {
        FairnessConfig {
            inner_loops: 100_000,
            significance: 0.05,
            rejection_fraction: 0.95,
            cap: 10_000_000,
        }
    }

    /// Cheaper defaults used for annealing sweeps.
    pub fn anneal_default() -> FairnessConfig {
        FairnessConfig {
            inner_loops: 1_000,
            ..Self::gate_default()
        }
    }

    pub fn with_inner_loops(inner_loops: u64) -> FairnessConfig {
        FairnessConfig {
            inner_loops,
            ..Self::gate_default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::Invalid {
                what: "fairness config",
                reason: format!("significance {} not in (0,1)", self.significance),
            });
        }
        if self.inner_loops == 0 {
            return Err(Error::Invalid {
                what: "fairness config",
                reason: "inner_loops must be at least 1".into(),
            });
        }
        Ok(())
    }
}

impl Default for FairnessConfig {
    fn default() -> Self {
        Self::gate_default()
    }
}

/// Outcome of the fairness search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairnessResult {
    /// Smallest shot count rejecting the fair-sampling hypothesis.
    Shots(u64),
    /// No count up to the cap rejected it.
    CapReached { cap: u64 },
}

impl FairnessResult {
    pub fn shots(&self) -> Option<u64> {
        match self {
            FairnessResult::Shots(n) => Some(*n),
            FairnessResult::CapReached { .. } => None,
        }
    }
}

impl fmt::Display for FairnessResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FairnessResult::Shots(n) => write!(f, "{n}"),
            FairnessResult::CapReached { cap } => write!(f, ">{cap}"),
        }
    }
}

/// Number of shots to reject fair sampling.
///
/// Finds the smallest `N` such that, over `inner_loops` trials each drawing
/// `N` multinomial samples from the empirical ground-state distribution and
/// chi-squared-testing them against the uniform distribution over the `k`
/// buckets (df = k−1), at least `rejection_fraction` of the trials reject at
/// the configured significance. Searched by doubling then binary search;
/// deterministic for a fixed seed (per-trial generators are derived by
/// counter).
pub fn fairness_nstr(
    ground_counts: &BTreeMap<usize, u64>,
    cfg: &FairnessConfig,
    seed: u64,
) -> Result<FairnessResult> {
    cfg.validate()?;
    let k = ground_counts.len();
    if k < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 ground states, got {k}"
        )));
    }
    let total: u64 = ground_counts.values().sum();
    if total == 0 {
        return Err(Error::DegenerateInput(
            "ground-state counts are all zero".into(),
        ));
    }
    let probs: Vec<f64> = ground_counts
        .values()
        .map(|&c| c as f64 / total as f64)
        .collect();

    let rejects = |shots: u64| -> bool {
        let needed = (cfg.rejection_fraction * cfg.inner_loops as f64).ceil() as u64;
        let mut rejections = 0u64;
        for trial in 0..cfg.inner_loops {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial + 1);
            let sample = multinomial(&mut rng, shots, &probs);
            let p = chi2_uniform_pvalue(&sample, shots);
            if p < cfg.significance {
                rejections += 1;
            }
            // Early exits keep the doubling search cheap; the outcome is
            // unchanged because trials are independent.
            if rejections >= needed {
                return true;
            }
            let remaining = cfg.inner_loops - trial - 1;
            if rejections + remaining < needed {
                return false;
            }
        }
        rejections >= needed
    };

    // Doubling phase.
    let mut hi = 1u64;
    if !rejects(hi) {
        loop {
            if hi >= cfg.cap {
                return Ok(FairnessResult::CapReached { cap: cfg.cap });
            }
            hi = (hi * 2).min(cfg.cap);
            if rejects(hi) {
                break;
            }
            if hi == cfg.cap {
                return Ok(FairnessResult::CapReached { cap: cfg.cap });
            }
        }
        // Binary search in (hi/2, hi].
        let mut lo = hi / 2 + 1;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if rejects(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
    }
    Ok(FairnessResult::Shots(hi))
}

/// One multinomial draw by sequential binomial splitting.
fn multinomial(rng: &mut ChaCha8Rng, shots: u64, probs: &[f64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(probs.len());
    let mut remaining = shots;
    let mut mass = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() {
            out.push(remaining);
            break;
        }
        if remaining == 0 || mass <= 0.0 {
            out.push(0);
            mass -= p;
            continue;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining, q)
            .expect("valid binomial")
            .sample(rng);
        out.push(draw);
        remaining -= draw;
        mass -= p;
    }
    out
}

/// Upper-tail p-value of the uniform goodness-of-fit chi-squared statistic.
fn chi2_uniform_pvalue(observed: &[u64], shots: u64) -> f64 {
    let k = observed.len() as f64;
    let expected = shots as f64 / k;
    let stat: f64 = observed
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    chi2_sf(stat, k - 1.0)
}

/// Survival function of the chi-squared distribution:
/// `Q(df/2, x/2)`, the regularized upper incomplete gamma function.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(df / 2.0, x / 2.0)
}

/// Regularized upper incomplete gamma function `Q(a, x)`.
///
/// Series expansion for `x < a + 1`, continued fraction otherwise.
fn gamma_q(a: f64, x: f64) -> f64 {
    if x < 0.0 || a <= 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_cf(a: f64, x: f64) -> f64 {
    // Lentz's method for the continued fraction representation.
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Log-gamma via the Lanczos approximation (g = 7, n = 9).
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.3234287776531,
        -176.6150291621406,
        12.507343278686905,
        -0.13857109526572012,
        9.984369578019572e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.9999999999998099;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Class-wide fallback error rates.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct CalibrationDefaults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<f64>,
}

/// Per-gate and per-qubit error rates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CalibrationData {
    single_qubit: HashMap<(String, usize), f64>,
    two_qubit: HashMap<(String, usize, usize), f64>,
    readout: HashMap<usize, f64>,
    pub defaults: CalibrationDefaults,
}

#[derive(Serialize, Deserialize)]
struct SingleEntry {
    gate: String,
    qubit: usize,
    error: f64,
}

#[derive(Serialize, Deserialize)]
struct TwoEntry {
    gate: String,
    qubits: [usize; 2],
    error: f64,
}

#[derive(Serialize, Deserialize)]
struct ReadoutEntry {
    qubit: usize,
    error: f64,
}

#[derive(Serialize, Deserialize, Default)]
struct CalibrationJson {
    #[serde(default)]
    single_qubit: Vec<SingleEntry>,
    #[serde(default)]
    two_qubit: Vec<TwoEntry>,
    #[serde(default)]
    readout: Vec<ReadoutEntry>,
    #[serde(default)]
    defaults: CalibrationDefaults,
}

impl CalibrationData {
    pub fn set_single(&mut self, gate: &str, qubit: usize, error: f64) {
        self.single_qubit
            .insert((gate.to_ascii_lowercase(), qubit), error);
    }

    pub fn set_two(&mut self, gate: &str, a: usize, b: usize, error: f64) {
        self.two_qubit
            .insert((gate.to_ascii_lowercase(), a, b), error);
    }

    pub fn set_readout(&mut self, qubit: usize, error: f64) {
        self.readout.insert(qubit, error);
    }

    pub fn from_json(text: &str) -> Result<CalibrationData> {
        let raw: CalibrationJson = serde_json::from_str(text)?;
        let mut data = CalibrationData {
            defaults: raw.defaults,
            ..Default::default()
        };
        for e in raw.single_qubit {
            check_rate(e.error)?;
            data.set_single(&e.gate, e.qubit, e.error);
        }
        for e in raw.two_qubit {
            check_rate(e.error)?;
            data.set_two(&e.gate, e.qubits[0], e.qubits[1], e.error);
        }
        for e in raw.readout {
            check_rate(e.error)?;
            data.set_readout(e.qubit, e.error);
        }
        for rate in [
            data.defaults.single,
            data.defaults.two,
            data.defaults.readout,
        ]
        .into_iter()
        .flatten()
        {
            check_rate(rate)?;
        }
        Ok(data)
    }

    /// Error rate for one gate: specific entry first, then class default.
    fn rate(&self, kind: &GateKind, qubits: &[usize]) -> Result<f64> {
        let name = kind.name().to_ascii_lowercase();
        if *kind == GateKind::Measure {
            return self
                .readout
                .get(&qubits[0])
                .copied()
                .or(self.defaults.readout)
                .ok_or_else(|| Error::MissingCalibration(format!("readout on q{}", qubits[0])));
        }
        match qubits.len() {
            1 => self
                .single_qubit
                .get(&(name.clone(), qubits[0]))
                .copied()
                .or(self.defaults.single)
                .ok_or_else(|| Error::MissingCalibration(format!("{name} on q{}", qubits[0]))),
            2 => self
                .two_qubit
                .get(&(name.clone(), qubits[0], qubits[1]))
                .copied()
                .or_else(|| {
                    self.two_qubit
                        .get(&(name.clone(), qubits[1], qubits[0]))
                        .copied()
                })
                .or(self.defaults.two)
                .ok_or_else(|| {
                    Error::MissingCalibration(format!("{name} on q{} q{}", qubits[0], qubits[1]))
                }),
            _ => Err(Error::MissingCalibration(format!(
                "{name} on {} qubits (no class default)",
                qubits.len()
            ))),
        }
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Invalid {
            what: "calibration",
            reason: format!("error rate {rate} outside [0,1]"),
        });
    }
    Ok(())
}

/// Aggregate circuit error `E = 1 − Π (1 − e_i)` over all gates, including
/// per-qubit readout terms for Measure gates when `include_readout` is set.
pub fn aggregate_error(
    circuit: &Circuit,
    calib: &CalibrationData,
    include_readout: bool,
) -> Result<f64> {
    let mut success = 1.0f64;
    for gate in &circuit.gates {
        if gate.kind == GateKind::Measure && !include_readout {
            continue;
        }
        let e = calib.rate(&gate.kind, &gate.qubits)?;
        success *= 1.0 - e;
    }
    Ok(1.0 - success)
}
