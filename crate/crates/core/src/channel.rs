//! Always-open channel simulation.
//!
//! Alice holds the zero-extended message, a one-qubit transmission cell sits
//! between her and Bob, and Bob's register starts as all zeros. At step `i`
//! Alice swaps her `i`-th qubit into the cell, the cell suffers noise, and Bob
//! swaps the cell into his `i`-th qubit unless his first `i − 1` qubits already
//! hold a complete code word. Every operation permutes classical
//! configurations (noise branches are Pauli operators), so the joint state is
//! kept as a sparse map from configurations to amplitudes.
//!
//! Noise is sampled per trajectory: each step draws one Kraus branch.

use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::check_classical_prefix_free;
use crate::error::{Error, Result};
use crate::prefix::DEPENDENCY_TOL;
use crate::qstring::{BitString, QubitString, EPS};

pub const MAX_REGISTER_QUBITS: usize = 24;
pub const MAX_JOINT_SUPPORT: usize = 1 << 20;

/// Where noise acts within a step; echoed in reports.
pub const NOISE_PLACEMENT: &str = "between Alice's swap and Bob's conditional swap";

/// A classical prefix code shared by Alice and Bob.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BookRepr", into = "BookRepr")]
pub struct CodeBook {
    words: Vec<BitString>,
    #[serde(skip)]
    lookup: HashSet<BitString>,
}

#[derive(Serialize, Deserialize)]
struct BookRepr {
    words: Vec<BitString>,
}

impl TryFrom<BookRepr> for CodeBook {
    type Error = Error;

    fn try_from(r: BookRepr) -> Result<Self> {
        CodeBook::new(r.words)
    }
}

impl From<CodeBook> for BookRepr {
    fn from(b: CodeBook) -> Self {
        BookRepr { words: b.words }
    }
}

impl CodeBook {
    pub fn new(words: Vec<BitString>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::InvalidCodeBook("no code words".into()));
        }
        if words.len() > 1 && words.iter().any(BitString::is_empty) {
            return Err(Error::InvalidCodeBook(
                "the empty word is only allowed as the sole code word".into(),
            ));
        }
        check_classical_prefix_free(&words)?;
        let lookup = words.iter().cloned().collect();
        Ok(Self { words, lookup })
    }

    pub fn from_strs(words: &[&str]) -> Result<Self> {
        Self::new(words.iter().map(|w| w.parse()).collect::<Result<_>>()?)
    }

    /// Accepts only classical basis states as code words.
    pub fn from_qubit_strings(words: &[QubitString]) -> Result<Self> {
        let mut out = Vec::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            let mut support = w.support();
            match (support.next(), support.next()) {
                (Some(s), None) => out.push(s.clone()),
                _ => {
                    return Err(Error::InvalidCodeBook(format!(
                        "code word {i} is not a classical string; the conditional swap needs a classical book"
                    )))
                }
            }
        }
        Self::new(out)
    }

    pub fn words(&self) -> &[BitString] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &BitString) -> bool {
        self.lookup.contains(w)
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(BitString::len).max().unwrap_or(0)
    }

    /// Whether some prefix of `bob` of length `< i` is a code word.
    pub fn completed_before(&self, bob: &BitString, i: usize) -> bool {
        (0..i).any(|k| self.contains(&bob.prefix(k)))
    }
}

/// One Pauli branch of the single-qubit noise channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    None,
    Bitflip,
    Phaseflip,
    Depolarizing,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Schedule {
    /// Same probability at every step.
    Constant { q: f64 },
    /// `q_i = min(1, q0 · i)`.
    Linear { q0: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub schedule: Schedule,
    /// Inclusive 1-based step range where noise acts; all steps when absent.
    pub window: Option<(usize, usize)>,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, schedule: Schedule, seed: u64) -> Result<Self> {
        match schedule {
            Schedule::Constant { q } if !(0.0..=1.0).contains(&q) => {
                return Err(Error::InvalidNoise(format!(
                    "probability {q} outside [0, 1]"
                )))
            }
            Schedule::Linear { q0 } if !(q0.is_finite() && q0 >= 0.0) => {
                return Err(Error::InvalidNoise(format!(
                    "slope {q0} must be non-negative"
                )))
            }
            _ => {}
        }
        Ok(Self {
            kind,
            schedule,
            window: None,
            seed,
        })
    }

    pub fn noiseless() -> Self {
        Self {
            kind: NoiseKind::None,
            schedule: Schedule::Constant { q: 0.0 },
            window: None,
            seed: 0,
        }
    }

    pub fn with_window(mut self, first: usize, last: usize) -> Result<Self> {
        if first == 0 || first > last {
            return Err(Error::InvalidNoise(format!(
                "bad step window {first}..={last}"
            )));
        }
        self.window = Some((first, last));
        Ok(self)
    }

    /// Error probability at 1-based step `i`.
    pub fn probability_at(&self, i: usize) -> f64 {
        if self.kind == NoiseKind::None {
            return 0.0;
        }
        if let Some((a, b)) = self.window {
            if i < a || i > b {
                return 0.0;
            }
        }
        match self.schedule {
            Schedule::Constant { q } => q,
            Schedule::Linear { q0 } => (q0 * i as f64).min(1.0),
        }
    }

    /// Probability that step `i` flips a classical bit in the cell.
    pub fn flip_probability_at(&self, i: usize) -> f64 {
        let q = self.probability_at(i);
        match self.kind {
            NoiseKind::None | NoiseKind::Phaseflip => 0.0,
            NoiseKind::Bitflip => q,
            NoiseKind::Depolarizing => 2.0 * q / 3.0,
        }
    }

    /// Draws the Kraus branch for step `i`. Exactly one uniform is consumed
    /// per call so trajectories stay aligned across noise settings.
    pub fn sample<R: Rng>(&self, i: usize, rng: &mut R) -> Pauli {
        let u: f64 = rng.random();
        let q = self.probability_at(i);
        if u >= q {
            return Pauli::I;
        }
        match self.kind {
            NoiseKind::None => Pauli::I,
            NoiseKind::Bitflip => Pauli::X,
            NoiseKind::Phaseflip => Pauli::Z,
            NoiseKind::Depolarizing => match (3.0 * u / q) as u32 {
                0 => Pauli::X,
                1 => Pauli::Y,
                _ => Pauli::Z,
            },
        }
    }
}

/// A classical configuration of Alice's register, the cell, and Bob's register.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub alice: BitString,
    pub cell: bool,
    pub bob: BitString,
}

#[derive(Clone, Debug)]
pub struct ChannelState {
    joint: BTreeMap<Config, Complex64>,
    l_max: usize,
    book: CodeBook,
}

/// `zef(message) ⊗ |0⟩_cell ⊗ |0…0⟩_Bob`.
pub fn init_channel(message: &QubitString, book: &CodeBook, l_max: usize) -> Result<ChannelState> {
    if l_max > MAX_REGISTER_QUBITS {
        return Err(Error::LimitExceeded {
            what: "register length",
            got: l_max,
            max: MAX_REGISTER_QUBITS,
        });
    }
    if !message.is_normalized() {
        return Err(Error::NotNormalized(message.norm_sqr()));
    }
    let outside: f64 = message
        .terms()
        .filter(|(s, _)| !book.contains(s))
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if outside.sqrt() >= DEPENDENCY_TOL {
        return Err(Error::NotEncodable(outside.sqrt()));
    }
    let zef = message.zero_extended(l_max)?;
    if zef.support_size() > MAX_JOINT_SUPPORT {
        return Err(Error::LimitExceeded {
            what: "joint support",
            got: zef.support_size(),
            max: MAX_JOINT_SUPPORT,
        });
    }
    let joint = zef
        .terms()
        .map(|(s, a)| {
            (
                Config {
                    alice: s.clone(),
                    cell: false,
                    bob: BitString::zeros(l_max),
                },
                *a,
            )
        })
        .collect();
    Ok(ChannelState {
        joint,
        l_max,
        book: book.clone(),
    })
}

impl ChannelState {
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn book(&self) -> &CodeBook {
        &self.book
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Config, &Complex64)> {
        self.joint.iter()
    }

    pub fn support_size(&self) -> usize {
        self.joint.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.joint.values().map(|a| a.norm_sqr()).sum()
    }

    fn map_configs(&self, mut f: impl FnMut(&mut Config, &mut Complex64)) -> Self {
        let mut joint = BTreeMap::new();
        for (c, a) in &self.joint {
            let (mut c, mut a) = (c.clone(), *a);
            f(&mut c, &mut a);
            *joint.entry(c).or_insert(Complex64::default()) += a;
        }
        Self {
            joint,
            l_max: self.l_max,
            book: self.book.clone(),
        }
    }

    /// Applies step `i` (1-based) with a fixed noise branch on the cell.
    pub fn step_with_branch(&self, i: usize, branch: Pauli) -> Result<Self> {
        if i == 0 || i > self.l_max {
            return Err(Error::BadRestriction {
                n: i,
                l_max: self.l_max,
            });
        }
        let k = i - 1;
        let book = &self.book;
        Ok(self.map_configs(|c, a| {
            // Alice[i] ↔ cell
            let held = c.alice.get(k);
            c.alice.set(k, c.cell);
            c.cell = held;

            match branch {
                Pauli::I => {}
                Pauli::X => c.cell = !c.cell,
                Pauli::Y => {
                    *a *= if c.cell {
                        Complex64::new(0.0, -1.0)
                    } else {
                        Complex64::new(0.0, 1.0)
                    };
                    c.cell = !c.cell;
                }
                Pauli::Z => {
                    if c.cell {
                        *a = -*a;
                    }
                }
            }

            // Bob[i] ↔ cell unless a code word already arrived
            if !book.completed_before(&c.bob, i) {
                let held = c.bob.get(k);
                c.bob.set(k, c.cell);
                c.cell = held;
            }
        }))
    }

    /// Bob's register reduced state overlap `⟨m|ρ_Bob|m⟩`.
    pub fn bob_fidelity(&self, target: &QubitString) -> f64 {
        let mut overlaps: BTreeMap<(&BitString, bool), Complex64> = BTreeMap::new();
        for (c, a) in &self.joint {
            let m = target.amplitude(&c.bob);
            if m != Complex64::default() {
                *overlaps.entry((&c.alice, c.cell)).or_default() += m.conj() * a;
            }
        }
        overlaps.values().map(|o| o.norm_sqr()).sum()
    }

    /// Weight on configurations where Alice or the cell is not zero.
    pub fn residual_entanglement(&self) -> f64 {
        self.joint
            .iter()
            .filter(|(c, _)| c.cell || !c.alice.is_all_zero())
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Bob's register, when Alice and the cell hold only zeros.
    pub fn bob_register(&self) -> QubitString {
        QubitString::from_terms(
            self.joint
                .iter()
                .filter(|(c, _)| !c.cell && c.alice.is_all_zero())
                .map(|(c, a)| (c.bob.clone(), *a)),
        )
    }
}

/// One protocol step with a sampled noise branch; returns the branch taken.
pub fn protocol_step<R: Rng>(
    state: &ChannelState,
    i: usize,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<(ChannelState, Pauli)> {
    let branch = noise.sample(i, rng);
    Ok((state.step_with_branch(i, branch)?, branch))
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationReport {
    pub trials: usize,
    pub mean_fidelity: f64,
    #[serde(rename = "stdErr")]
    pub fidelity_std_err: f64,
    pub disentangled: bool,
    pub noise: NoiseModel,
    pub noise_placement: &'static str,
    #[serde(rename = "perStep")]
    pub per_step_error_counts: Vec<usize>,
}

fn transmit<R: Rng>(
    message: &QubitString,
    book: &CodeBook,
    l_max: usize,
    noise: &NoiseModel,
    rng: &mut R,
    errors: &mut [usize],
) -> Result<ChannelState> {
    let mut state = init_channel(message, book, l_max)?;
    for i in 1..=l_max {
        let (next, branch) = protocol_step(&state, i, noise, rng)?;
        if branch != Pauli::I {
            errors[i - 1] += 1;
        }
        state = next;
    }
    Ok(state)
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Transmits `message` `trials` times; trial `t` uses seed `noise.seed + t`.
pub fn run(
    message: &QubitString,
    book: &CodeBook,
    l_max: usize,
    noise: &NoiseModel,
    trials: usize,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::InvalidNoise("at least one trial is required".into()));
    }
    let target = message.zero_extended(l_max)?;
    let mut scratch = vec![0; l_max];
    let clean = transmit(
        message,
        book,
        l_max,
        &NoiseModel::noiseless(),
        &mut trial_rng(0, 0),
        &mut scratch,
    )?;
    let disentangled = clean.residual_entanglement() <= EPS;

    let mut errors = vec![0; l_max];
    let mut fidelities = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = trial_rng(noise.seed, t);
        let state = transmit(message, book, l_max, noise, &mut rng, &mut errors)?;
        fidelities.push(state.bob_fidelity(&target));
    }
    let (mean_fidelity, fidelity_std_err) = mean_and_stderr(&fidelities);
    Ok(SimulationReport {
        trials,
        mean_fidelity,
        fidelity_std_err,
        disentangled,
        noise: noise.clone(),
        noise_placement: NOISE_PLACEMENT,
        per_step_error_counts: errors,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BookOutcome {
    pub words: Vec<String>,
    pub successes: usize,
    pub success_rate: f64,
    pub std_err: f64,
    /// `Σᵢ pᵢ Π_{s ≤ ℓᵢ} (1 − f_s)` with `f_s` the per-step bit-flip probability.
    pub analytic: f64,
    /// `|empirical − analytic|` in units of the analytic binomial standard error.
    pub deviation_sigmas: f64,
    pub within_three_sigma: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComparisonReport {
    pub trials: usize,
    pub distribution: Vec<f64>,
    pub noise: NoiseModel,
    pub noise_placement: &'static str,
    pub book_a: BookOutcome,
    pub book_b: BookOutcome,
}

/// Analytic delivery probability of classical messages drawn from `dist`.
pub fn analytic_success(dist: &[f64], book: &CodeBook, noise: &NoiseModel) -> f64 {
    dist.iter()
        .zip(book.words())
        .map(|(p, w)| {
            p * (1..=w.len())
                .map(|s| 1.0 - noise.flip_probability_at(s))
                .product::<f64>()
        })
        .sum()
}

fn sample_index<R: Rng>(dist: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    dist.len() - 1
}

fn book_outcome(
    dist: &[f64],
    book: &CodeBook,
    noise: &NoiseModel,
    trials: usize,
) -> Result<BookOutcome> {
    let l_max = book.max_len();
    let kets: Vec<QubitString> = book
        .words()
        .iter()
        .cloned()
        .map(QubitString::basis)
        .collect();
    let targets: Vec<QubitString> = kets
        .iter()
        .map(|k| k.zero_extended(l_max))
        .collect::<Result<_>>()?;
    let mut errors = vec![0; l_max];
    let mut successes = 0;
    for t in 0..trials {
        let mut rng = trial_rng(noise.seed, t);
        let m = sample_index(dist, &mut rng);
        let state = transmit(&kets[m], book, l_max, noise, &mut rng, &mut errors)?;
        if state.bob_fidelity(&targets[m]) >= 1.0 - EPS {
            successes += 1;
        }
    }
    let rate = successes as f64 / trials as f64;
    let analytic = analytic_success(dist, book, noise);
    let sigma = (analytic * (1.0 - analytic) / trials as f64).sqrt();
    let diff = (rate - analytic).abs();
    let deviation_sigmas = if sigma > 0.0 {
        diff / sigma
    } else if diff <= EPS {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(BookOutcome {
        words: book.words().iter().map(|w| w.to_string()).collect(),
        successes,
        success_rate: rate,
        std_err: (rate * (1.0 - rate) / trials as f64).sqrt(),
        analytic,
        deviation_sigmas,
        within_three_sigma: deviation_sigmas <= 3.0,
    })
}

/// Sends classical messages `i ~ dist` encoded by each book and counts exact
/// deliveries. Both books see the same per-trial random streams.
pub fn compare_codes(
    dist: &[f64],
    book_a: &CodeBook,
    book_b: &CodeBook,
    noise: &NoiseModel,
    trials: usize,
) -> Result<ComparisonReport> {
    if trials == 0 {
        return Err(Error::InvalidNoise("at least one trial is required".into()));
    }
    if dist.len() != book_a.len() || dist.len() != book_b.len() {
        return Err(Error::InvalidDistribution(format!(
            "{} message probabilities for books of size {} and {}",
            dist.len(),
            book_a.len(),
            book_b.len()
        )));
    }
    if dist.iter().any(|&p| !(p.is_finite() && p >= 0.0))
        || (dist.iter().sum::<f64>() - 1.0).abs() > EPS
    {
        return Err(Error::InvalidDistribution("message distribution".into()));
    }
    Ok(ComparisonReport {
        trials,
        distribution: dist.to_vec(),
        noise: noise.clone(),
        noise_placement: NOISE_PLACEMENT,
        book_a: book_outcome(dist, book_a, noise, trials)?,
        book_b: book_outcome(dist, book_b, noise, trials)?,
    })
}
