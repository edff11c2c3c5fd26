//! Closed-form analytics for the n-fold repeated coin.
//!
//! Histories are ordered sequences of `n` outcomes with the product measure.
//! Everything here comes from binomial identities evaluated with big
//! integers; no `2^n` object is ever built, so `n = 1000` or `n = 2000` is
//! cheap. [`product_theory`] materialises the explicit theory for a handful
//! of tosses so the symbolic results can be checked against the generic
//! machinery.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::event::{Event, SampleSpace};
use crate::rational::ceil;
use crate::theory::HistoriesTheory;

/// `n` independent tosses with `P(heads) = p`, analysed at level `eps`.
#[derive(Debug)]
pub struct BernoulliModel {
    n: usize,
    p: BigRational,
    eps: BigRational,
    tail: OnceLock<Tail>,
}

impl Clone for BernoulliModel {
    fn clone(&self) -> Self {
        BernoulliModel {
            n: self.n,
            p: self.p.clone(),
            eps: self.eps.clone(),
            tail: self.tail.clone(),
        }
    }
}

// P(N_H) = numer[H] / denom and P(L_H) = prefix[H] / denom, all over the
// common denominator b^n where p = a/b.
#[derive(Debug, Clone)]
struct Tail {
    numer: Vec<BigInt>,
    prefix: Vec<BigInt>,
    denom: BigInt,
}

impl Tail {
    fn new(n: usize, p: &BigRational) -> Tail {
        let a = p.numer().clone();
        let b = p.denom().clone();
        let q = &b - &a;
        // a^H, (b-a)^(n-H) built incrementally alongside C(n, H).
        let mut a_pow = Vec::with_capacity(n + 1);
        let mut q_pow = Vec::with_capacity(n + 1);
        a_pow.push(BigInt::one());
        q_pow.push(BigInt::one());
        for i in 1..=n {
            a_pow.push(&a_pow[i - 1] * &a);
            q_pow.push(&q_pow[i - 1] * &q);
        }
        let mut numer = Vec::with_capacity(n + 1);
        let mut prefix = Vec::with_capacity(n + 1);
        let mut binom = BigInt::one();
        let mut running = BigInt::zero();
        for h in 0..=n {
            if h > 0 {
                binom = binom * BigInt::from(n - h + 1) / BigInt::from(h);
            }
            let term = &binom * &a_pow[h] * &q_pow[n - h];
            running += &term;
            numer.push(term);
            prefix.push(running.clone());
        }
        let denom = Pow::pow(&b, n);
        Tail {
            numer,
            prefix,
            denom,
        }
    }

    fn prob(&self, h: usize) -> BigRational {
        BigRational::new(self.numer[h].clone(), self.denom.clone())
    }

    fn cumulative(&self, h: usize) -> BigRational {
        BigRational::new(self.prefix[h].clone(), self.denom.clone())
    }

    /// Greatest `H` with `P(L_H) < eps`.
    fn threshold(&self, eps: &BigRational) -> Option<usize> {
        // prefix[h] / denom < eps  <=>  prefix[h] * eps.denom < eps.numer * denom
        let bound = eps.numer() * &self.denom;
        let scale = eps.denom();
        let below = self.prefix.partition_point(|s| s * scale < bound);
        below.checked_sub(1)
    }
}

fn check_probability(p: &BigRational) -> Result<()> {
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(Error::OutOfRange("p must lie in [0, 1]".into()));
    }
    Ok(())
}

fn check_eps(eps: &BigRational) -> Result<()> {
    if eps <= &BigRational::zero() || eps > &BigRational::one() {
        return Err(Error::OutOfRange("epsilon must lie in (0, 1]".into()));
    }
    Ok(())
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

impl BernoulliModel {
    pub fn new(n: usize, p: BigRational, eps: BigRational) -> Result<Self> {
        check_probability(&p)?;
        check_eps(&eps)?;
        Ok(BernoulliModel {
            n,
            p,
            eps,
            tail: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn eps(&self) -> &BigRational {
        &self.eps
    }

    fn tail(&self) -> &Tail {
        self.tail.get_or_init(|| Tail::new(self.n, &self.p))
    }

    fn check_heads(&self, heads: usize) -> Result<()> {
        if heads > self.n {
            return Err(Error::OutOfRange(format!(
                "heads count {heads} exceeds n = {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Probability of one particular history with `heads` heads.
    pub fn prob_history(&self, heads: usize) -> Result<BigRational> {
        self.check_heads(heads)?;
        let q = BigRational::one() - &self.p;
        Ok(Pow::pow(&self.p, heads) * Pow::pow(&q, self.n - heads))
    }

    /// Whether the dual of a single history with `heads` heads is
    /// eps-preclusive. The product measure is classical, hence monotone, so
    /// the history lies in an eps-null event iff it is eps-null itself.
    pub fn is_singleton_preclusive(&self, heads: usize) -> Result<bool> {
        Ok(self.prob_history(heads)? >= self.eps)
    }

    /// `P(N_H)`: exactly `heads` heads in `n` tosses.
    pub fn prob_heads_count(&self, heads: usize) -> Result<BigRational> {
        self.check_heads(heads)?;
        Ok(self.tail().prob(heads))
    }

    /// `P(L_H)`: at most `heads` heads, summed from zero heads.
    pub fn cumulative(&self, heads: usize) -> Result<BigRational> {
        self.check_heads(heads)?;
        Ok(self.tail().cumulative(heads))
    }

    /// Greatest `H` with `P(L_H) < eps`, or `None` when `P(L_0) >= eps`.
    pub fn h_epsilon(&self) -> Option<usize> {
        self.tail().threshold(&self.eps)
    }

    /// Rows `(H, P(N_H), P(L_H))` for every heads count.
    pub fn tail_rows(&self) -> Vec<(usize, BigRational, BigRational)> {
        let tail = self.tail();
        (0..=self.n)
            .map(|h| (h, tail.prob(h), tail.cumulative(h)))
            .collect()
    }

    fn require_uniform(&self) -> Result<()> {
        if self.p != half() {
            return Err(Error::Unsupported(
                "equal single-history weights (p = 1/2) are required".into(),
            ));
        }
        Ok(())
    }

    /// Size of a minimal set `S` of histories with `H_eps + 1` heads such
    /// that `S ∪ L_{H_eps}` is not eps-null: `ceil((eps - P(L_{H_eps})) / p^n)`.
    pub fn straddle_set_cardinality(&self) -> Result<BigInt> {
        self.require_uniform()?;
        let h = self.h_epsilon().ok_or(Error::NoThreshold)?;
        let gap = &self.eps - self.tail().cumulative(h);
        let inverse_weight = BigRational::from_integer(BigInt::one() << self.n);
        Ok(ceil(&(gap * inverse_weight)))
    }

    /// `ceil(eps * 2^n)`: the least cardinality of an event that is not
    /// eps-null under the uniform product measure.
    pub fn uniform_primitive_cardinality(&self) -> Result<BigInt> {
        self.require_uniform()?;
        Ok(ceil(
            &(&self.eps * BigRational::from_integer(BigInt::one() << self.n)),
        ))
    }

    /// Certificate that the even and odd coarse grainings of `n = 2m` tosses
    /// are not both treated classically by a primitive approximate co-event.
    pub fn even_odd_witness(&self) -> Result<EvenOddReport> {
        self.require_uniform()?;
        if !self.n.is_multiple_of(2) {
            return Err(Error::OutOfRange(format!("n = {} must be even", self.n)));
        }
        let m = self.n / 2;
        let half_model = BernoulliModel::new(m, self.p.clone(), self.eps.clone())?;
        let h = half_model.h_epsilon().ok_or(Error::NoThreshold)?;
        let tail = half_model.tail();
        // Counts of full-length histories: 2^m choices for the other half.
        let other_half = BigInt::one() << m;
        let total_half = BigInt::one() << m;
        let l_half = &tail.prefix[h];
        let g_half = &total_half - l_half;
        let g_even_count = &g_half * &other_half;
        let l_odd_count = l_half * &other_half;
        let threshold = &self.eps * BigRational::from_integer(BigInt::one() << self.n);
        let g_even_exceeds = BigRational::from_integer(g_even_count.clone()) > threshold;
        let primitive_cardinality = ceil(&threshold);

        let witness = TrialSequence::new(
            (1..=self.n)
                .map(|i| {
                    if i % 2 == 0 {
                        Outcome::Heads
                    } else {
                        Outcome::Tails
                    }
                })
                .collect(),
        );
        let (even_heads, odd_heads) = witness.even_odd_heads();
        let witness_in_g_even = even_heads > h;
        let witness_in_l_odd = odd_heads <= h;

        // C is chosen inside G_E, contains the witness and has the primitive
        // cardinality. It lies in L_O only if L_O has at least that many
        // histories, and it meets L_O at the witness so it is never inside G_O.
        let dual_fits = primitive_cardinality <= g_even_count;
        let valuations = EvenOddValuations {
            l_even: false,
            g_even: dual_fits,
            l_odd: primitive_cardinality <= l_odd_count,
            g_odd: !witness_in_l_odd,
        };
        Ok(EvenOddReport {
            m,
            h_even: h,
            h_odd: h,
            g_even_count,
            l_odd_count,
            threshold,
            g_even_exceeds,
            primitive_cardinality,
            witness,
            witness_in_g_even,
            witness_in_l_odd,
            valuations,
        })
    }
}

/// Truth values of the witness co-event on the blocks of the even and odd
/// partitions `{L_{H^E}, G_{H^E}}` and `{L_{H^O}, G_{H^O}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvenOddValuations {
    pub l_even: bool,
    pub g_even: bool,
    pub l_odd: bool,
    pub g_odd: bool,
}

impl EvenOddValuations {
    /// Classical on the even partition and zero on both odd blocks.
    pub fn shows_incompatibility(&self) -> bool {
        !self.l_even && self.g_even && !self.l_odd && !self.g_odd
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvenOddReport {
    pub m: usize,
    pub h_even: usize,
    pub h_odd: usize,
    /// `|G_{H^E}|` as a number of full-length histories.
    pub g_even_count: BigInt,
    /// `|L_{H^O}|` as a number of full-length histories.
    pub l_odd_count: BigInt,
    /// `eps * 2^(2m)`.
    pub threshold: BigRational,
    pub g_even_exceeds: bool,
    pub primitive_cardinality: BigInt,
    pub witness: TrialSequence,
    pub witness_in_g_even: bool,
    pub witness_in_l_odd: bool,
    pub valuations: EvenOddValuations,
}

impl EvenOddReport {
    pub fn certified(&self) -> bool {
        self.g_even_exceeds
            && self.witness_in_g_even
            && self.witness_in_l_odd
            && self.valuations.shows_incompatibility()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Heads,
    Tails,
}

/// An ordered sequence of toss outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrialSequence {
    outcomes: Vec<Outcome>,
}

impl TrialSequence {
    pub fn new(outcomes: Vec<Outcome>) -> Self {
        TrialSequence { outcomes }
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn heads(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| **o == Outcome::Heads)
            .count()
    }

    /// Heads among the even-numbered and odd-numbered tosses (1-based).
    pub fn even_odd_heads(&self) -> (usize, usize) {
        let mut even = 0;
        let mut odd = 0;
        for (i, o) in self.outcomes.iter().enumerate() {
            if *o == Outcome::Heads {
                if (i + 1) % 2 == 0 {
                    even += 1;
                } else {
                    odd += 1;
                }
            }
        }
        (even, odd)
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.trim()
            .chars()
            .map(|c| match c {
                'h' | 'H' => Ok(Outcome::Heads),
                't' | 'T' => Ok(Outcome::Tails),
                other => Err(Error::Parse(format!("unexpected outcome {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(TrialSequence::new)
    }

    /// History index in a [`product_theory`]: bit `i` set when toss `i + 1`
    /// is heads.
    pub fn history_index(&self) -> usize {
        self.outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| **o == Outcome::Heads)
            .map(|(i, _)| 1usize << i)
            .sum()
    }
}

impl fmt::Display for TrialSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            f.write_str(match o {
                Outcome::Heads => "h",
                Outcome::Tails => "t",
            })?;
        }
        Ok(())
    }
}

/// Draws `n` tosses from ChaCha8 seeded with `seed` (via `seed_from_u64`).
/// Each toss takes one `u64` draw `u` and is heads iff `u < p * 2^64`,
/// compared exactly.
pub fn simulate(n: usize, p: &BigRational, seed: u64) -> Result<TrialSequence> {
    check_probability(p)?;
    // u < p * 2^64  <=>  u < ceil(p * 2^64) for integer u.
    let scaled = p * BigRational::from_integer(BigInt::one() << 64);
    let threshold = ceil(&scaled).to_u128().expect("threshold within [0, 2^64]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(TrialSequence::new(
        (0..n)
            .map(|_| {
                if u128::from(rng.next_u64()) < threshold {
                    Outcome::Heads
                } else {
                    Outcome::Tails
                }
            })
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Reject,
    FailToReject,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    pub heads: usize,
    /// `P(L_H)` under the hypothesis.
    pub cumulative: BigRational,
    pub decision: Decision,
}

/// One-tailed test of `P(heads) = p0`: reject at level `eps` when too few
/// heads were seen, i.e. `P(L_H) < eps`. The tail table is built once and
/// reused across sequences of the same length.
#[derive(Debug, Clone)]
pub struct HypothesisTest {
    model: BernoulliModel,
}

impl HypothesisTest {
    pub fn new(n: usize, p0: BigRational, eps: BigRational) -> Result<Self> {
        let model = BernoulliModel::new(n, p0, eps)?;
        model.tail();
        Ok(HypothesisTest { model })
    }

    /// `P(L_{H_eps})`: the probability of rejecting a true hypothesis.
    pub fn rejection_mass(&self) -> BigRational {
        match self.model.h_epsilon() {
            Some(h) => self.model.tail().cumulative(h),
            None => BigRational::zero(),
        }
    }

    pub fn test(&self, sequence: &TrialSequence) -> Result<TestOutcome> {
        if sequence.len() != self.model.n {
            return Err(Error::OutOfRange(format!(
                "sequence has {} tosses, test expects {}",
                sequence.len(),
                self.model.n
            )));
        }
        let heads = sequence.heads();
        let cumulative = self.model.tail().cumulative(heads);
        let decision = if cumulative < self.model.eps {
            Decision::Reject
        } else {
            Decision::FailToReject
        };
        Ok(TestOutcome {
            heads,
            cumulative,
            decision,
        })
    }
}

pub fn hypothesis_test(
    sequence: &TrialSequence,
    p0: &BigRational,
    eps: &BigRational,
) -> Result<TestOutcome> {
    HypothesisTest::new(sequence.len(), p0.clone(), eps.clone())?.test(sequence)
}

/// Explicit product-measure theory of `tosses` coin tosses (at most 4, so
/// 16 histories). History `i` has bit `j` set when toss `j + 1` is heads and
/// is labelled like `hth`.
pub fn product_theory(tosses: usize, p: &BigRational) -> Result<HistoriesTheory> {
    check_probability(p)?;
    if tosses == 0 || tosses > 4 {
        return Err(Error::OutOfRange(format!(
            "{tosses} tosses; explicit theories need 1..=4"
        )));
    }
    let count = 1usize << tosses;
    let q = BigRational::one() - p;
    let labels: Vec<String> = (0..count)
        .map(|i| {
            (0..tosses)
                .map(|j| if i >> j & 1 == 1 { 'h' } else { 't' })
                .collect()
        })
        .collect();
    let weights: Vec<BigRational> = (0..count)
        .map(|i| {
            let heads = (i as u32).count_ones() as usize;
            Pow::pow(p, heads) * Pow::pow(&q, tosses - heads)
        })
        .collect();
    HistoriesTheory::classical(SampleSpace::new(labels)?, &weights)
}

/// The events `L_H` (at most `heads` heads) of an explicit product theory.
pub fn lower_tail_event(tosses: usize, heads: usize) -> Event {
    let count = 1u32 << tosses;
    let bits = (0..count)
        .filter(|i| i.count_ones() as usize <= heads)
        .fold(0u32, |acc, i| acc | 1 << i);
    Event::from_bits(count as usize, bits)
}

/// Blocks `(L_{H^E}, G_{H^E}, L_{H^O}, G_{H^O})` of the even and odd
/// partitions in an explicit theory of `2m` tosses.
pub fn even_odd_events(tosses: usize, h_even: usize, h_odd: usize) -> (Event, Event, Event, Event) {
    let count = 1usize << tosses;
    let even_mask: u32 = (0..tosses)
        .filter(|j| (j + 1) % 2 == 0)
        .map(|j| 1u32 << j)
        .sum();
    let odd_mask: u32 = (0..tosses)
        .filter(|j| (j + 1) % 2 == 1)
        .map(|j| 1u32 << j)
        .sum();
    let mut l_even = 0u32;
    let mut l_odd = 0u32;
    for i in 0..count as u32 {
        if (i & even_mask).count_ones() as usize <= h_even {
            l_even |= 1 << i;
        }
        if (i & odd_mask).count_ones() as usize <= h_odd {
            l_odd |= 1 << i;
        }
    }
    let l_even = Event::from_bits(count, l_even);
    let l_odd = Event::from_bits(count, l_odd);
    (l_even, l_even.complement(), l_odd, l_odd.complement())
}

/// The witness dual of an [`EvenOddReport`] built explicitly: the witness
/// history plus the lowest-indexed other histories of `G_{H^E}` up to the
/// primitive cardinality. Only for `2m <= 4`.
pub fn explicit_witness_dual(report: &EvenOddReport) -> Result<Event> {
    let tosses = 2 * report.m;
    if tosses > 4 {
        return Err(Error::OutOfRange(
            "explicit witness needs at most 4 tosses".into(),
        ));
    }
    let (_, g_even, _, _) = even_odd_events(tosses, report.h_even, report.h_odd);
    let size = report
        .primitive_cardinality
        .to_usize()
        .unwrap_or(usize::MAX);
    let start = report.witness.history_index();
    let mut dual = Event::singleton(1 << tosses, start);
    for i in g_even.members() {
        if dual.len() >= size {
            break;
        }
        dual = dual.with(i);
    }
    if dual.len() != size || !dual.is_subset_of(g_even) {
        return Err(Error::OutOfRange(
            "G_{H^E} is too small for the witness dual".into(),
        ));
    }
    Ok(dual)
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}
