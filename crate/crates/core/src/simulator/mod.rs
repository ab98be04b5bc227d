//! Monte Carlo simulation of the superposition/binning code at small
//! blocklengths.
//!
//! Codewords are generated counter-style: codeword `k` of a book is drawn
//! from its own ChaCha stream, so books can be materialized or produced on
//! demand with identical contents. Message index 0 plays the role of the
//! transmitted "1" in the usual error analysis.

mod typicality;

use std::borrow::Cow;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, LpOutcome};
use crate::probability::{axis, induced_joint, AuxScheme, Channel};
use crate::rate_regions::{MiConstants, SplitRates};

pub use typicality::{is_entropy_typical, is_jointly_typical, Tester, Typicality};

/// Default cap on the product of all message-set and bin sizes.
pub const DEFAULT_MAX_PRODUCT: u128 = 1_000_000;

/// Trials between progress callbacks.
pub const PROGRESS_EVERY: usize = 100;

/// Books with more symbols than this are generated on demand.
const MATERIALIZE_LIMIT: usize = 1 << 24;

const BOOK_U0: u8 = 0;
const BOOK_U1: u8 = 1;
const BOOK_U2: u8 = 2;
const STREAM_MESSAGES: u8 = 3;
const STREAM_NOISE: u8 = 4;

/// `ceil(2^(n R))` for every message and bin index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MessageSizes {
    pub m1: usize,
    pub m21: usize,
    pub m22: usize,
    pub m31: usize,
    pub m32: usize,
    pub m4: usize,
    pub m5: usize,
    pub l1: usize,
    pub l2: usize,
}

fn set_size(n: usize, rate: f64) -> Result<usize> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::InvalidArgument(format!("rate {rate} must be finite and nonnegative")));
    }
    let bits = (n as f64 * rate * 1e9).round() / 1e9;
    if bits > 60.0 {
        return Err(Error::Guard(format!("2^{bits} messages at blocklength {n}")));
    }
    Ok(bits.exp2().ceil() as usize)
}

impl MessageSizes {
    pub fn new(n: usize, r: &SplitRates) -> Result<Self> {
        Ok(Self {
            m1: set_size(n, r.r1)?,
            m21: set_size(n, r.r21)?,
            m22: set_size(n, r.r22)?,
            m31: set_size(n, r.r31)?,
            m32: set_size(n, r.r32)?,
            m4: set_size(n, r.r4)?,
            m5: set_size(n, r.r5)?,
            l1: set_size(n, r.rp1)?,
            l2: set_size(n, r.rp2)?,
        })
    }

    fn all(&self) -> [usize; 9] {
        [self.m1, self.m21, self.m22, self.m31, self.m32, self.m4, self.m5, self.l1, self.l2]
    }

    pub fn product(&self) -> u128 {
        self.all().iter().map(|&s| s as u128).product()
    }

    pub fn clouds(&self) -> usize {
        self.m1 * self.m4 * self.m5 * self.m21 * self.m31
    }

    pub fn sat1(&self) -> usize {
        self.m22 * self.l1
    }

    pub fn sat2(&self) -> usize {
        self.m32 * self.l2
    }

    pub fn cloud_index(&self, m1: usize, m4: usize, m5: usize, m21: usize, m31: usize) -> usize {
        (((m1 * self.m4 + m4) * self.m5 + m5) * self.m21 + m21) * self.m31 + m31
    }

    /// `log2(size) / n` per index.
    pub fn realized(&self, n: usize) -> SplitRates {
        let r = |s: usize| (s as f64).log2() / n as f64;
        SplitRates {
            r1: r(self.m1),
            r21: r(self.m21),
            r22: r(self.m22),
            r31: r(self.m31),
            r32: r(self.m32),
            r4: r(self.m4),
            r5: r(self.m5),
            rp1: r(self.l1),
            rp2: r(self.l2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub scheme: AuxScheme,
    pub n: usize,
    pub rates: SplitRates,
    pub eps_prime: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub seed: u64,
    pub typicality: Typicality,
    /// New codebooks every trial; otherwise one book shared by all trials.
    pub fresh_codebooks: bool,
    pub max_product: u128,
}

impl SchemeConfig {
    /// `eps' = eps / 2`, `eps1 = eps2 = eps`.
    pub fn new(scheme: AuxScheme, n: usize, rates: SplitRates, eps: f64, seed: u64) -> Self {
        Self {
            scheme,
            n,
            rates,
            eps_prime: eps / 2.0,
            eps1: eps,
            eps2: eps,
            seed,
            typicality: Typicality::default(),
            fresh_codebooks: true,
            max_product: DEFAULT_MAX_PRODUCT,
        }
    }

    pub fn sizes(&self) -> Result<MessageSizes> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("blocklength must be positive".into()));
        }
        for (name, e) in [("eps'", self.eps_prime), ("eps1", self.eps1), ("eps2", self.eps2)] {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        if self.eps_prime >= self.eps1.min(self.eps2) {
            return Err(Error::InvalidArgument("eps' must be below both decoding slacks".into()));
        }
        let sizes = MessageSizes::new(self.n, &self.rates)?;
        if sizes.product() > self.max_product {
            return Err(Error::Guard(format!(
                "message and bin sets multiply to {} (limit {})",
                sizes.product(),
                self.max_product
            )));
        }
        Ok(sizes)
    }
}

/// Picks bin rates for a target `(R1..R5)` maximizing the smallest slack
/// of the coding conditions. `split` gives `(R21, R31)`; by default each
/// private rate is halved between the layers.
pub fn split_rates(consts: &MiConstants, rates: [f64; 5], split: Option<(f64, f64)>) -> Result<SplitRates> {
    let [r1, r2, r3, r4, r5] = rates;
    if rates.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
        return Err(Error::InvalidArgument("rates must be finite and nonnegative".into()));
    }
    let (r21, r31) = split.unwrap_or((r2 / 2.0, r3 / 2.0));
    if !(0.0..=r2).contains(&r21) || !(0.0..=r3).contains(&r31) {
        return Err(Error::InvalidArgument("layer split outside [0, R]".into()));
    }
    let (r22, r32) = (r2 - r21, r3 - r31);
    let [a, b, c, d, e] = consts.bits();
    // Variables (Rp1, Rp2, t).
    let mut lp = LinearProgram::new(3).maximize(vec![0.0, 0.0, 1.0]);
    lp.bound(0, 0.0, 64.0).bound(1, 0.0, 64.0).bound(2, -64.0, 64.0);
    lp.constrain(vec![1.0, 1.0, -1.0], Cmp::Ge, e);
    lp.constrain(vec![1.0, 0.0, 1.0], Cmp::Le, c - r22);
    lp.constrain(vec![1.0, 0.0, 1.0], Cmp::Le, a - (r1 + r21 + r31 + r4 + r22));
    lp.constrain(vec![0.0, 1.0, 1.0], Cmp::Le, d - r32);
    lp.constrain(vec![0.0, 1.0, 1.0], Cmp::Le, b - (r1 + r21 + r31 + r5 + r32));
    let (rp1, rp2) = match lp.solve() {
        LpOutcome::Optimal { x, .. } => (x[0].max(0.0), x[1].max(0.0)),
        other => return Err(Error::Internal(format!("bin-rate LP returned {other:?}"))),
    };
    Ok(SplitRates { r1, r21, r22, r31, r32, r4, r5, rp1, rp2 })
}

/// Message indices of one transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Messages {
    pub m1: usize,
    pub m21: usize,
    pub m22: usize,
    pub m31: usize,
    pub m32: usize,
    pub m4: usize,
    pub m5: usize,
}

impl Messages {
    pub fn cloud(&self, s: &MessageSizes) -> usize {
        s.cloud_index(self.m1, self.m4, self.m5, self.m21, self.m31)
    }
}

/// Receiver 1's estimate `(m1, m21, m22, m4)`.
pub type Rx1Tuple = (usize, usize, usize, usize);
/// Receiver 2's estimate `(m1, m31, m32, m5)`.
pub type Rx2Tuple = (usize, usize, usize, usize);

fn cdf(mass: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = mass
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    if let Some(last) = mass.iter().rposition(|&p| p > 0.0) {
        for v in &mut out[last..] {
            *v = 1.0;
        }
    }
    out
}

fn draw(cdf: &[f64], u: f64) -> u8 {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1) as u8
}

fn stream_key(seed: u64, trial: u64, tag: u8) -> [u8; 32] {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16] = tag;
    key
}

fn stream(key: &[u8; 32], index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(*key);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
struct Books {
    cb0: Vec<u8>,
    cb1: Vec<u8>,
    cb2: Vec<u8>,
}

/// The three codebooks of one trial.
#[derive(Debug, Clone)]
pub struct Codebooks {
    n: usize,
    sizes: MessageSizes,
    keys: [[u8; 32]; 3],
    cdf0: Vec<f64>,
    cdf1: Vec<Vec<f64>>,
    cdf2: Vec<Vec<f64>>,
    cache: Option<Books>,
}

impl Codebooks {
    fn build(scheme: &AuxScheme, n: usize, sizes: MessageSizes, seed: u64, trial: u64) -> Result<Self> {
        let aux = scheme.aux_joint();
        let p0 = aux.marginalize(&[0])?;
        let conditional = |k: usize| -> Result<Vec<Vec<f64>>> {
            let pk = aux.marginalize(&[0, k])?;
            let m = aux.shape()[k];
            Ok(p0
                .mass()
                .iter()
                .enumerate()
                .map(|(u0, &p)| {
                    if p > 0.0 {
                        cdf(&pk.mass()[u0 * m..(u0 + 1) * m].iter().map(|q| q / p).collect::<Vec<_>>())
                    } else {
                        vec![1.0; m]
                    }
                })
                .collect())
        };
        let mut cb = Self {
            n,
            sizes,
            keys: [BOOK_U0, BOOK_U1, BOOK_U2].map(|t| stream_key(seed, trial, t)),
            cdf0: cdf(p0.mass()),
            cdf1: conditional(1)?,
            cdf2: conditional(2)?,
            cache: None,
        };
        let c = sizes.clouds();
        let symbols = c.saturating_mul(1 + sizes.sat1() + sizes.sat2()).saturating_mul(n);
        if symbols <= MATERIALIZE_LIMIT {
            let cb0: Vec<u8> = (0..c).flat_map(|i| cb.gen_u0(i)).collect();
            let sat = |book: u8, count: usize| -> Vec<u8> {
                let mut out = Vec::with_capacity(c * count * n);
                for i in 0..c {
                    let u0 = &cb0[i * n..(i + 1) * n];
                    for s in 0..count {
                        out.extend(cb.gen_sat(book, i, u0, s));
                    }
                }
                out
            };
            let cb1 = sat(BOOK_U1, sizes.sat1());
            let cb2 = sat(BOOK_U2, sizes.sat2());
            cb.cache = Some(Books { cb0, cb1, cb2 });
        }
        Ok(cb)
    }

    fn gen_u0(&self, cloud: usize) -> Vec<u8> {
        let mut rng = stream(&self.keys[0], cloud as u64);
        (0..self.n).map(|_| draw(&self.cdf0, rng.random())).collect()
    }

    fn gen_sat(&self, book: u8, cloud: usize, u0: &[u8], s: usize) -> Vec<u8> {
        let (per, cdfs) =
            if book == BOOK_U1 { (self.sizes.sat1(), &self.cdf1) } else { (self.sizes.sat2(), &self.cdf2) };
        let mut rng = stream(&self.keys[book as usize], (cloud * per + s) as u64);
        u0.iter().map(|&a| draw(&cdfs[a as usize], rng.random())).collect()
    }

    pub fn sizes(&self) -> &MessageSizes {
        &self.sizes
    }

    pub fn is_materialized(&self) -> bool {
        self.cache.is_some()
    }

    /// Cloud-center codeword for `(m1, m4, m5, m21, m31)` flattened.
    pub fn u0(&self, cloud: usize) -> Cow<'_, [u8]> {
        match &self.cache {
            Some(b) => Cow::Borrowed(&b.cb0[cloud * self.n..(cloud + 1) * self.n]),
            None => Cow::Owned(self.gen_u0(cloud)),
        }
    }

    /// Satellite `s = m22 * L1 + l1` of book 1 over `cloud`.
    pub fn u1(&self, cloud: usize, s: usize) -> Cow<'_, [u8]> {
        self.sat(BOOK_U1, cloud, s)
    }

    /// Satellite `s = m32 * L2 + l2` of book 2 over `cloud`.
    pub fn u2(&self, cloud: usize, s: usize) -> Cow<'_, [u8]> {
        self.sat(BOOK_U2, cloud, s)
    }

    fn sat(&self, book: u8, cloud: usize, s: usize) -> Cow<'_, [u8]> {
        let per = if book == BOOK_U1 { self.sizes.sat1() } else { self.sizes.sat2() };
        match &self.cache {
            Some(b) => {
                let buf = if book == BOOK_U1 { &b.cb1 } else { &b.cb2 };
                let at = (cloud * per + s) * self.n;
                Cow::Borrowed(&buf[at..at + self.n])
            }
            None => {
                let u0 = self.gen_u0(cloud);
                Cow::Owned(self.gen_sat(book, cloud, &u0, s))
            }
        }
    }

    fn sat_given(&self, book: u8, cloud: usize, u0: &[u8], s: usize) -> Cow<'_, [u8]> {
        if self.cache.is_some() {
            self.sat(book, cloud, s)
        } else {
            Cow::Owned(self.gen_sat(book, cloud, u0, s))
        }
    }
}

/// Codebooks for `trial` (ignored when codebooks are fixed).
pub fn generate_codebooks(cfg: &SchemeConfig, trial: u64) -> Result<Codebooks> {
    let sizes = cfg.sizes()?;
    let t = if cfg.fresh_codebooks { trial } else { u64::MAX };
    Codebooks::build(&cfg.scheme, cfg.n, sizes, cfg.seed, t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub x: Vec<u8>,
    pub l1: usize,
    pub l2: usize,
    /// No jointly typical bin pair existed and `(0, 0)` was sent.
    pub fallback: bool,
}

/// How one receiver's decoding went, with errors attributed to the most
/// damaging wrong candidate found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RxOutcome {
    Correct,
    /// No candidate passed, including the true one.
    NoCandidate,
    /// A wrong candidate on the true cloud center with a wrong satellite
    /// message passed.
    WrongSatellite,
    /// A candidate with a wrong decoded cloud index passed.
    WrongCloud,
    /// Any other wrong candidate passed.
    Other,
}

/// What one receiver decodes and what it treats as nuisance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Rx1,
    Rx2,
}

/// Decoding view for one receiver: the decoded cloud key `k` (three
/// indices), a nuisance cloud index `v`, a decoded satellite message and a
/// nuisance bin index.
struct View<'a> {
    side: Side,
    sizes: &'a MessageSizes,
    known: usize,
}

impl View<'_> {
    fn key_sizes(&self) -> [usize; 3] {
        let s = self.sizes;
        match self.side {
            Side::Rx1 => [s.m1, s.m4, s.m21],
            Side::Rx2 => [s.m1, s.m5, s.m31],
        }
    }

    fn nuisance(&self) -> usize {
        match self.side {
            Side::Rx1 => self.sizes.m31,
            Side::Rx2 => self.sizes.m21,
        }
    }

    fn sat_msgs(&self) -> usize {
        match self.side {
            Side::Rx1 => self.sizes.m22,
            Side::Rx2 => self.sizes.m32,
        }
    }

    fn bins(&self) -> usize {
        match self.side {
            Side::Rx1 => self.sizes.l1,
            Side::Rx2 => self.sizes.l2,
        }
    }

    fn book(&self) -> u8 {
        match self.side {
            Side::Rx1 => BOOK_U1,
            Side::Rx2 => BOOK_U2,
        }
    }

    fn cloud(&self, k: [usize; 3], v: usize) -> usize {
        match self.side {
            Side::Rx1 => self.sizes.cloud_index(k[0], k[1], self.known, k[2], v),
            Side::Rx2 => self.sizes.cloud_index(k[0], self.known, k[1], v, k[2]),
        }
    }

    fn keys(&self) -> impl Iterator<Item = [usize; 3]> {
        let [a, b, c] = self.key_sizes();
        (0..a).flat_map(move |i| (0..b).flat_map(move |j| (0..c).map(move |k| [i, j, k])))
    }
}

/// Precomputed state for simulating one configuration on one channel.
pub struct Simulator {
    cfg: SchemeConfig,
    sizes: MessageSizes,
    enc: Tester,
    rx_cloud: [Tester; 2],
    rx_full: [Tester; 2],
    row_cdfs: Vec<Vec<f64>>,
    y2_size: usize,
}

impl Simulator {
    pub fn new(ch: &Channel, cfg: SchemeConfig) -> Result<Self> {
        let sizes = cfg.sizes()?;
        let j = induced_joint(&cfg.scheme, ch)?;
        if j.shape().iter().any(|&s| s > 256) {
            return Err(Error::InvalidArgument("alphabets above 256 symbols are not simulated".into()));
        }
        use axis::*;
        let t = |axes: &[usize], eps: f64| Tester::new(&j.marginalize(axes)?, cfg.typicality, eps);
        Ok(Self {
            enc: t(&[U0, U1, U2], cfg.eps_prime)?,
            rx_cloud: [t(&[U0, Y1], cfg.eps1)?, t(&[U0, Y2], cfg.eps2)?],
            rx_full: [t(&[U0, U1, Y1], cfg.eps1)?, t(&[U0, U2, Y2], cfg.eps2)?],
            row_cdfs: ch.rows().iter().map(|r| cdf(r.mass())).collect(),
            y2_size: ch.y2_size(),
            sizes,
            cfg,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn sizes(&self) -> &MessageSizes {
        &self.sizes
    }

    pub fn codebooks(&self, trial: u64) -> Result<Codebooks> {
        generate_codebooks(&self.cfg, trial)
    }

    /// Scans `(l1, l2)` lexicographically for an `eps'`-typical triple and
    /// maps it through `gamma`.
    pub fn encode(&self, cb: &Codebooks, m: &Messages) -> Encoded {
        let s = &self.sizes;
        let cloud = m.cloud(s);
        let u0 = cb.u0(cloud);
        let u1s: Vec<Cow<[u8]>> = (0..s.l1).map(|l| cb.sat_given(BOOK_U1, cloud, &u0, m.m22 * s.l1 + l)).collect();
        let u2s: Vec<Cow<[u8]>> = (0..s.l2).map(|l| cb.sat_given(BOOK_U2, cloud, &u0, m.m32 * s.l2 + l)).collect();
        let mut chosen = None;
        'scan: for (l1, u1) in u1s.iter().enumerate() {
            for (l2, u2) in u2s.iter().enumerate() {
                if self.enc.check(&[&u0, u1, u2]) {
                    chosen = Some((l1, l2));
                    break 'scan;
                }
            }
        }
        let fallback = chosen.is_none();
        let (l1, l2) = chosen.unwrap_or((0, 0));
        let (u1, u2) = (&u1s[l1], &u2s[l2]);
        let x =
            (0..cb.n).map(|j| self.cfg.scheme.gamma_at(u0[j] as usize, u1[j] as usize, u2[j] as usize) as u8).collect();
        Encoded { x, l1, l2, fallback }
    }

    /// Passes `x^n` through the channel memorylessly.
    pub fn transmit(&self, x: &[u8], rng: &mut impl Rng) -> (Vec<u8>, Vec<u8>) {
        x.iter()
            .map(|&a| {
                let k = draw(&self.row_cdfs[a as usize], rng.random()) as usize;
                ((k / self.y2_size) as u8, (k % self.y2_size) as u8)
            })
            .unzip()
    }

    fn view(&self, side: Side, known: usize) -> View<'_> {
        View { side, sizes: &self.sizes, known }
    }

    /// Some nuisance bin makes `(u0, u_sat, y)` typical.
    fn passes(&self, view: &View, cb: &Codebooks, y: &[u8], cloud: usize, u0: &[u8], msg: usize) -> bool {
        let r = view.side as usize;
        let l = view.bins();
        (0..l).any(|b| {
            let u = cb.sat_given(view.book(), cloud, u0, msg * l + b);
            self.rx_full[r].check(&[u0, &u, y])
        })
    }

    fn cloud_typical(&self, view: &View, y: &[u8], u0: &[u8]) -> bool {
        self.rx_cloud[view.side as usize].check(&[u0, y])
    }

    /// Plain unique-tuple decoding: returns the decoded key and satellite
    /// message iff exactly one passes.
    fn decode(&self, view: &View, cb: &Codebooks, y: &[u8]) -> Option<([usize; 3], usize)> {
        let mut found: Option<([usize; 3], usize)> = None;
        let mut passing = vec![false; view.sat_msgs()];
        for k in view.keys() {
            passing.iter_mut().for_each(|p| *p = false);
            for v in 0..view.nuisance() {
                let cloud = view.cloud(k, v);
                let u0 = cb.u0(cloud);
                if !self.cloud_typical(view, y, &u0) {
                    continue;
                }
                for (msg, p) in passing.iter_mut().enumerate() {
                    if !*p && self.passes(view, cb, y, cloud, &u0, msg) {
                        *p = true;
                    }
                }
            }
            for (msg, &p) in passing.iter().enumerate() {
                if p {
                    if found.is_some() {
                        return None;
                    }
                    found = Some((k, msg));
                }
            }
        }
        found
    }

    pub fn decode_rx1(&self, cb: &Codebooks, y1: &[u8], m5: usize) -> Option<Rx1Tuple> {
        let view = self.view(Side::Rx1, m5);
        self.decode(&view, cb, y1).map(|([m1, m4, m21], m22)| (m1, m21, m22, m4))
    }

    pub fn decode_rx2(&self, cb: &Codebooks, y2: &[u8], m4: usize) -> Option<Rx2Tuple> {
        let view = self.view(Side::Rx2, m4);
        self.decode(&view, cb, y2).map(|([m1, m5, m31], m32)| (m1, m31, m32, m5))
    }

    /// Decodes against a known truth, stopping as soon as the outcome is
    /// settled. Agrees with [`Self::decode_rx1`]/[`Self::decode_rx2`] on
    /// whether decoding succeeds.
    fn classify(&self, view: &View, cb: &Codebooks, y: &[u8], key: [usize; 3], nu: usize, msg: usize) -> RxOutcome {
        for k in view.keys().filter(|&k| k != key) {
            for v in 0..view.nuisance() {
                let cloud = view.cloud(k, v);
                let u0 = cb.u0(cloud);
                if self.cloud_typical(view, y, &u0)
                    && (0..view.sat_msgs()).any(|m| self.passes(view, cb, y, cloud, &u0, m))
                {
                    return RxOutcome::WrongCloud;
                }
            }
        }
        let on_true_cloud = |v: usize, pred: &dyn Fn(usize) -> bool| -> bool {
            let cloud = view.cloud(key, v);
            let u0 = cb.u0(cloud);
            self.cloud_typical(view, y, &u0)
                && (0..view.sat_msgs()).filter(|&m| pred(m)).any(|m| self.passes(view, cb, y, cloud, &u0, m))
        };
        if on_true_cloud(nu, &|m| m != msg) {
            return RxOutcome::WrongSatellite;
        }
        if (0..view.nuisance()).filter(|&v| v != nu).any(|v| on_true_cloud(v, &|m| m != msg)) {
            return RxOutcome::Other;
        }
        if (0..view.nuisance()).any(|v| on_true_cloud(v, &|m| m == msg)) {
            RxOutcome::Correct
        } else {
            RxOutcome::NoCandidate
        }
    }

    pub fn classify_rx1(&self, cb: &Codebooks, y1: &[u8], m: &Messages) -> RxOutcome {
        self.classify(&self.view(Side::Rx1, m.m5), cb, y1, [m.m1, m.m4, m.m21], m.m31, m.m22)
    }

    pub fn classify_rx2(&self, cb: &Codebooks, y2: &[u8], m: &Messages) -> RxOutcome {
        self.classify(&self.view(Side::Rx2, m.m4), cb, y2, [m.m1, m.m5, m.m31], m.m21, m.m32)
    }

    /// Whether the transmitted cloud/satellite pair is typical with `y`.
    fn true_pair_typical(&self, side: Side, cb: &Codebooks, y: &[u8], m: &Messages, enc: &Encoded) -> bool {
        let s = &self.sizes;
        let cloud = m.cloud(s);
        let u0 = cb.u0(cloud);
        let u = match side {
            Side::Rx1 => cb.u1(cloud, m.m22 * s.l1 + enc.l1),
            Side::Rx2 => cb.u2(cloud, m.m32 * s.l2 + enc.l2),
        };
        self.rx_full[side as usize].check(&[&u0, &u, y])
    }

    pub fn draw_messages(&self, trial: u64) -> Messages {
        let mut rng = stream(&stream_key(self.cfg.seed, trial, STREAM_MESSAGES), 0);
        let s = &self.sizes;
        let mut pick = |k: usize| rng.random_range(0..k);
        Messages {
            m1: pick(s.m1),
            m21: pick(s.m21),
            m22: pick(s.m22),
            m31: pick(s.m31),
            m32: pick(s.m32),
            m4: pick(s.m4),
            m5: pick(s.m5),
        }
    }

    pub fn run_trial(&self, trial: u64) -> Result<Tally> {
        let cb = self.codebooks(trial)?;
        let m = self.draw_messages(trial);
        let enc = self.encode(&cb, &m);
        let mut rng = stream(&stream_key(self.cfg.seed, trial, STREAM_NOISE), 0);
        let (y1, y2) = self.transmit(&enc.x, &mut rng);
        let o1 = self.classify_rx1(&cb, &y1, &m);
        let o2 = self.classify_rx2(&cb, &y2, &m);
        let mut t = Tally { trials: 1, encoder_fallbacks: usize::from(enc.fallback), ..Tally::default() };
        t.rx[0].record(o1, !self.true_pair_typical(Side::Rx1, &cb, &y1, &m, &enc));
        t.rx[1].record(o2, !self.true_pair_typical(Side::Rx2, &cb, &y2, &m, &enc));
        t.errors = usize::from(o1 != RxOutcome::Correct || o2 != RxOutcome::Correct);
        Ok(t)
    }

    /// Runs `trials` independent trials. `progress(done, total)` is called
    /// every [`PROGRESS_EVERY`] completed trials.
    pub fn estimate_error(&self, trials: usize, progress: Option<&(dyn Fn(usize, usize) + Sync)>) -> Result<SimReport> {
        if trials == 0 {
            return Err(Error::InvalidArgument("at least one trial is needed".into()));
        }
        let done = AtomicUsize::new(0);
        let tally = (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let r = self.run_trial(t);
                let d = done.fetch_add(1, Ordering::Relaxed) + 1;
                if let Some(p) = progress {
                    if d % PROGRESS_EVERY == 0 {
                        p(d, trials);
                    }
                }
                r
            })
            .try_reduce(Tally::default, |a, b| Ok(a.merge(&b)))?;
        Ok(self.report(tally))
    }

    fn report(&self, t: Tally) -> SimReport {
        let p = t.errors as f64 / t.trials as f64;
        SimReport {
            trials: t.trials,
            n: self.cfg.n,
            seed: self.cfg.seed,
            typicality: self.cfg.typicality,
            eps_prime: self.cfg.eps_prime,
            eps1: self.cfg.eps1,
            eps2: self.cfg.eps2,
            fresh_codebooks: self.cfg.fresh_codebooks,
            nominal_rates: self.cfg.rates,
            realized_rates: self.sizes.realized(self.cfg.n),
            sizes: self.sizes,
            encoder_fallbacks: t.encoder_fallbacks,
            errors: t.errors,
            rx1_errors: t.rx[0].errors(),
            rx2_errors: t.rx[1].errors(),
            rx1_events: t.rx[0],
            rx2_events: t.rx[1],
            pe_estimate: p,
            pe_half_width: 1.96 * (p * (1.0 - p) / t.trials as f64).sqrt(),
        }
    }
}

/// Per-receiver counts. The last four fields partition the errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct EventCounts {
    /// The transmitted pair was not typical with the output (error or not).
    pub true_pair_atypical: usize,
    pub no_candidate: usize,
    pub wrong_satellite: usize,
    pub wrong_cloud: usize,
    pub other: usize,
}

impl EventCounts {
    fn record(&mut self, o: RxOutcome, atypical: bool) {
        self.true_pair_atypical += usize::from(atypical);
        match o {
            RxOutcome::Correct => {}
            RxOutcome::NoCandidate => self.no_candidate += 1,
            RxOutcome::WrongSatellite => self.wrong_satellite += 1,
            RxOutcome::WrongCloud => self.wrong_cloud += 1,
            RxOutcome::Other => self.other += 1,
        }
    }

    pub fn errors(&self) -> usize {
        self.no_candidate + self.wrong_satellite + self.wrong_cloud + self.other
    }

    fn merge(&self, o: &Self) -> Self {
        Self {
            true_pair_atypical: self.true_pair_atypical + o.true_pair_atypical,
            no_candidate: self.no_candidate + o.no_candidate,
            wrong_satellite: self.wrong_satellite + o.wrong_satellite,
            wrong_cloud: self.wrong_cloud + o.wrong_cloud,
            other: self.other + o.other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub trials: usize,
    pub encoder_fallbacks: usize,
    pub errors: usize,
    pub rx: [EventCounts; 2],
}

impl Tally {
    pub fn merge(&self, o: &Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            encoder_fallbacks: self.encoder_fallbacks + o.encoder_fallbacks,
            errors: self.errors + o.errors,
            rx: [self.rx[0].merge(&o.rx[0]), self.rx[1].merge(&o.rx[1])],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub trials: usize,
    pub n: usize,
    pub seed: u64,
    pub typicality: Typicality,
    pub eps_prime: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub fresh_codebooks: bool,
    pub nominal_rates: SplitRates,
    pub realized_rates: SplitRates,
    pub sizes: MessageSizes,
    pub encoder_fallbacks: usize,
    /// Trials where either receiver erred.
    pub errors: usize,
    pub rx1_errors: usize,
    pub rx2_errors: usize,
    pub rx1_events: EventCounts,
    pub rx2_events: EventCounts,
    pub pe_estimate: f64,
    /// Normal-approximation 95% half-width.
    pub pe_half_width: f64,
}

/// One-shot helper around [`Simulator`].
pub fn estimate_error(ch: &Channel, cfg: &SchemeConfig, trials: usize) -> Result<SimReport> {
    Simulator::new(ch, cfg.clone())?.estimate_error(trials, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::{Alphabet, JointPmf};
    use crate::rate_regions::{specialize_scheme, SchemeKind};

    fn px(mass: Vec<f64>) -> JointPmf {
        JointPmf::new(vec![Alphabet::indexed("X", mass.len())], mass).unwrap()
    }

    fn complementary(ch: &Channel) -> AuxScheme {
        specialize_scheme(SchemeKind::Complementary, &px(vec![0.5, 0.5]), ch).unwrap()
    }

    fn r1_only(r1: f64) -> SplitRates {
        SplitRates { r1, ..SplitRates::default() }
    }

    #[test]
    fn sizes_and_guard() {
        let s = MessageSizes::new(12, &r1_only(0.5)).unwrap();
        assert_eq!(s.m1, 64);
        assert_eq!(s.product(), 64);
        assert!((s.realized(12).r1 - 0.5).abs() < 1e-12);
        let ch = Channel::noiseless(2);
        let cfg = SchemeConfig::new(complementary(&ch), 12, r1_only(2.0), 0.3, 1);
        assert!(matches!(cfg.sizes(), Err(Error::Guard(_))));
        let mut bad = SchemeConfig::new(complementary(&ch), 4, r1_only(0.5), 0.3, 1);
        bad.eps_prime = 0.4;
        assert!(bad.sizes().is_err());
    }

    #[test]
    fn zero_rates_never_err() {
        let ch = Channel::independent(&Channel::bsc_kernel(0.2), &Channel::bsc_kernel(0.3)).unwrap();
        let cfg = SchemeConfig::new(complementary(&ch), 6, SplitRates::default(), 0.3, 3);
        let r = estimate_error(&ch, &cfg, 50).unwrap();
        // A single codeword: only "no candidate" outcomes can occur.
        assert_eq!(r.rx1_events.wrong_cloud + r.rx1_events.wrong_satellite + r.rx1_events.other, 0);
        let noiseless = Channel::noiseless(2);
        let cfg = SchemeConfig::new(complementary(&noiseless), 6, SplitRates::default(), 0.3, 3);
        assert_eq!(estimate_error(&noiseless, &cfg, 50).unwrap().pe_estimate, 0.0);
    }

    #[test]
    fn seeded_runs_repeat() {
        let ch = Channel::independent(&Channel::bsc_kernel(0.1), &Channel::bsc_kernel(0.2)).unwrap();
        let cfg = SchemeConfig::new(complementary(&ch), 8, r1_only(0.25), 0.3, 11);
        let a = estimate_error(&ch, &cfg, 120).unwrap();
        let b = estimate_error(&ch, &cfg, 120).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.errors, a.errors.min(a.trials));
        assert_eq!(a.rx1_errors, a.rx1_events.errors());
    }

    #[test]
    fn codebooks_repeat_and_virtual_matches_materialized() {
        let ch = Channel::noiseless(2);
        let cfg = SchemeConfig::new(complementary(&ch), 8, r1_only(0.5), 0.3, 5);
        let a = generate_codebooks(&cfg, 2).unwrap();
        let b = generate_codebooks(&cfg, 2).unwrap();
        assert!(a.is_materialized());
        let mut v = a.clone();
        v.cache = None;
        for c in 0..a.sizes().clouds() {
            assert_eq!(a.u0(c), b.u0(c));
            assert_eq!(a.u0(c), v.u0(c));
            assert_eq!(a.u1(c, 0), v.u1(c, 0));
        }
    }

    #[test]
    fn degenerate_scheme_gives_constant_codewords_and_no_fallback() {
        let ch = Channel::noiseless(2);
        let s = specialize_scheme(SchemeKind::Complementary, &px(vec![0.0, 1.0]), &ch).unwrap();
        let cfg = SchemeConfig::new(s, 6, SplitRates::default(), 0.3, 9);
        let sim = Simulator::new(&ch, cfg).unwrap();
        let cb = sim.codebooks(0).unwrap();
        assert_eq!(&*cb.u0(0), &[1u8; 6][..]);
        let e = sim.encode(&cb, &Messages::default());
        assert_eq!((e.l1, e.l2, e.fallback), (0, 0, false));
        assert_eq!(e.x, vec![1u8; 6]);
        // An output symbol the scheme can never produce.
        assert_eq!(sim.decode_rx1(&cb, &[0, 1, 1, 1, 1, 1], 0), None);
        assert_eq!(sim.decode_rx1(&cb, &[1; 6], 0), Some((0, 0, 0, 0)));
    }

    #[test]
    fn encoder_output_follows_gamma() {
        let ch = Channel::independent(&Channel::bsc_kernel(0.1), &Channel::bsc_kernel(0.2)).unwrap();
        let aux = JointPmf::new(
            vec![Alphabet::indexed("U0", 2), Alphabet::indexed("U1", 2), Alphabet::indexed("U2", 2)],
            vec![0.2, 0.05, 0.05, 0.2, 0.1, 0.15, 0.15, 0.1],
        )
        .unwrap();
        let gamma = vec![0, 1, 1, 0, 1, 0, 0, 1];
        let scheme = AuxScheme::new(aux, gamma, 2).unwrap();
        let rates = SplitRates { r1: 0.25, r22: 0.25, r32: 0.25, rp1: 0.25, rp2: 0.25, ..SplitRates::default() };
        let sim = Simulator::new(&ch, SchemeConfig::new(scheme.clone(), 8, rates, 0.3, 4)).unwrap();
        for trial in 0..20 {
            let cb = sim.codebooks(trial).unwrap();
            let m = sim.draw_messages(trial);
            let e = sim.encode(&cb, &m);
            let s = sim.sizes();
            let c = m.cloud(s);
            let (u0, u1, u2) = (cb.u0(c), cb.u1(c, m.m22 * s.l1 + e.l1), cb.u2(c, m.m32 * s.l2 + e.l2));
            for j in 0..8 {
                assert_eq!(e.x[j] as usize, scheme.gamma_at(u0[j] as usize, u1[j] as usize, u2[j] as usize));
            }
        }
    }

    #[test]
    fn classification_agrees_with_plain_decoding() {
        let ch = Channel::independent(&Channel::bsc_kernel(0.05), &Channel::bsc_kernel(0.1)).unwrap();
        let aux = JointPmf::new(
            vec![Alphabet::indexed("U0", 2), Alphabet::indexed("U1", 2), Alphabet::indexed("U2", 2)],
            vec![0.2, 0.05, 0.05, 0.2, 0.1, 0.15, 0.15, 0.1],
        )
        .unwrap();
        let scheme = AuxScheme::new(aux, vec![0, 1, 1, 0, 1, 0, 0, 1], 2).unwrap();
        let rates = SplitRates {
            r1: 0.25,
            r21: 0.125,
            r22: 0.25,
            r31: 0.125,
            r32: 0.125,
            r4: 0.125,
            r5: 0.125,
            rp1: 0.125,
            rp2: 0.125,
        };
        let mut cfg = SchemeConfig::new(scheme, 8, rates, 0.4, 21);
        cfg.max_product = 1 << 22;
        let sim = Simulator::new(&ch, cfg).unwrap();
        let mut seen = std::collections::HashSet::new();
        for trial in 0..30 {
            let cb = sim.codebooks(trial).unwrap();
            let m = sim.draw_messages(trial);
            let e = sim.encode(&cb, &m);
            let mut rng = ChaCha8Rng::seed_from_u64(trial);
            let (y1, y2) = sim.transmit(&e.x, &mut rng);
            let o1 = sim.classify_rx1(&cb, &y1, &m);
            let o2 = sim.classify_rx2(&cb, &y2, &m);
            seen.insert(o1);
            let d1 = sim.decode_rx1(&cb, &y1, m.m5);
            let d2 = sim.decode_rx2(&cb, &y2, m.m4);
            assert_eq!(o1 == RxOutcome::Correct, d1 == Some((m.m1, m.m21, m.m22, m.m4)), "trial {trial}");
            assert_eq!(o2 == RxOutcome::Correct, d2 == Some((m.m1, m.m31, m.m32, m.m5)), "trial {trial}");
        }
        assert!(seen.len() >= 2, "{seen:?}");
    }

    #[test]
    fn split_rates_maximize_slack() {
        let c = MiConstants::from_bits(1.0, 1.0, 0.5, 0.5, 0.2).unwrap();
        let s = split_rates(&c, [0.1, 0.2, 0.2, 0.0, 0.0], None).unwrap();
        assert_eq!((s.r21, s.r22), (0.1, 0.1));
        assert!(s.rp1 + s.rp2 >= 0.2);
        assert!(s.r22 + s.rp1 <= 0.5);
        assert!(split_rates(&c, [0.1, 0.2, 0.2, 0.0, 0.0], Some((0.3, 0.0))).is_err());
    }
}
