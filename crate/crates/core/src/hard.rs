//! Hard-instance samplers over a positive-matching family.
//!
//! Fix a hidden matching `M_i`. Its positivity witness is normalized to a
//! margin witness `wt = w / delta - 1/4`, so edge sums are `>= +1/2` on
//! `M_i` and `<= -1/2` elsewhere. The induced base `f_i` is flattened into a
//! slack monotone base `g_i` that is *equal* across matching edges and keeps
//! slack `1/2` on the rest.
//!
//! Both distributions add 4-letter noise `eta = Z/8`, `Z` uniform on
//! `{0,1,2,3}`, per matching edge. The YES distribution adds the same noise
//! to both endpoints (still monotone: slack `1/2` beats noise `3/8`); the NO
//! distribution cyclically shifts the right endpoint to
//! `eta' = ((Z-1) mod 4)/8`, violating exactly the edges with `Z != 0` while
//! keeping every single-endpoint marginal uniform on `{0, 1/8, 2/8, 3/8}`.
//! Only the endpoint correlation distinguishes the two, which is what the
//! exact transcript enumerator measures.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::monotonicity::Assignment;
use crate::pmrs::PmrsFamily;
use crate::positivity::{Matching, WeightWitness};
use crate::rat::{rat, Rat};

/// Noise alphabet size and step: values `{0, h, 2h, 3h}` with `h = 1/8`.
pub const NOISE_LETTERS: u8 = 4;

pub fn noise_step() -> Rat {
    rat(1, 8)
}

/// Margin-normalized witness and the derived bases for one matching.
#[derive(Debug, Clone)]
pub struct MarginWitness {
    /// `wt = w / delta - 1/4`, indexed like the weight witness.
    pub normalized: Vec<Rat>,
    /// Base `f_i` on DAG vertex ids: `f(l) = wt(l)`, `f(n0 + r) = -wt(r)`.
    pub base: Vec<Rat>,
    /// Slack base `g_i`: matched endpoints shifted together by half the gap.
    pub slack_base: Vec<Rat>,
    /// Gap `Delta_e = f_i(l) - f_i(r)` per matching edge, `>= 1/2`.
    pub edge_gap: Vec<Rat>,
}

/// Normalize a positivity witness into the margin form and build the bases.
pub fn normalize_margin(
    u: &crate::graph::BipartiteGraph,
    m: &Matching,
    w: &WeightWitness,
) -> Result<MarginWitness> {
    w.validate(u, m)?;
    let n0 = u.n0();
    if m.is_empty() {
        return Err(Error::InvalidParameter(
            "margin normalization needs a nonempty matching".into(),
        ));
    }
    let delta = m
        .edges()
        .iter()
        .map(|&(l, r)| w.sum_on(n0, l, r))
        .min()
        .expect("nonempty matching");
    let quarter = rat(1, 4);
    let normalized: Vec<Rat> = w.w.iter().map(|x| x / delta - quarter).collect();

    let mut base = Vec::with_capacity(2 * n0);
    for l in 0..n0 {
        base.push(normalized[l]);
    }
    for r in 0..n0 {
        base.push(-normalized[n0 + r]);
    }

    let mut slack_base = base.clone();
    let mut edge_gap = Vec::with_capacity(m.len());
    let two = Rat::from_integer(2);
    for &(l, r) in m.edges() {
        let gap = base[l] - base[n0 + r];
        debug_assert!(gap >= rat(1, 2));
        let half_gap = gap / two;
        slack_base[l] = base[l] - half_gap;
        slack_base[n0 + r] = base[n0 + r] + half_gap;
        edge_gap.push(gap);
    }
    Ok(MarginWitness {
        normalized,
        base,
        slack_base,
        edge_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleTag {
    Yes,
    No,
}

/// A draw from `D+` or `D-`. The hidden index and noise stay private:
/// tester code paths only see the assignment, the harness uses
/// [`HardSample::verification_view`] to check structure.
#[derive(Debug, Clone)]
pub struct HardSample {
    tag: SampleTag,
    index: usize,
    noise: Vec<u8>,
    f: Assignment,
}

/// Hidden fields of a sample, for verification only.
#[derive(Debug, Clone, Copy)]
pub struct VerificationView<'a> {
    pub index: usize,
    pub noise: &'a [u8],
}

impl HardSample {
    pub fn tag(&self) -> SampleTag {
        self.tag
    }

    pub fn assignment(&self) -> &Assignment {
        &self.f
    }

    pub fn into_assignment(self) -> Assignment {
        self.f
    }

    /// Sealed accessor for the hidden index and noise vector. Harness and
    /// verification code only; never hand this to a tester.
    pub fn verification_view(&self) -> VerificationView<'_> {
        VerificationView {
            index: self.index,
            noise: &self.noise,
        }
    }

    pub fn to_file<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        let file = HardSampleFile::from(self);
        std::fs::write(path, serde_json::to_string(&file)?)?;
        Ok(())
    }

    pub fn from_file<P: AsRef<std::path::Path>>(path: P) -> Result<Self> {
        let data = std::fs::read_to_string(path)?;
        let file: HardSampleFile = serde_json::from_str(&data)?;
        file.try_into()
    }
}

/// On-disk format: `{"kind": "hard_sample", "tag": .., "i": .., "z": [..],
/// "values": [..], "family": optional path}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct HardSampleFile {
    pub kind: String,
    pub tag: SampleTag,
    pub i: usize,
    pub z: Vec<u8>,
    #[serde(with = "crate::rat::serde_rat_vec")]
    pub values: Vec<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

impl From<&HardSample> for HardSampleFile {
    fn from(s: &HardSample) -> Self {
        HardSampleFile {
            kind: "hard_sample".into(),
            tag: s.tag,
            i: s.index,
            z: s.noise.clone(),
            values: match &s.f {
                Assignment::Exact(v) => v.clone(),
                Assignment::Float(_) => unreachable!("hard samples are exact"),
            },
            family: None,
        }
    }
}

impl TryFrom<HardSampleFile> for HardSample {
    type Error = Error;
    fn try_from(f: HardSampleFile) -> Result<HardSample> {
        if f.kind != "hard_sample" {
            return Err(Error::Parse(format!(
                "expected kind \"hard_sample\", got {:?}",
                f.kind
            )));
        }
        Ok(HardSample {
            tag: f.tag,
            index: f.i,
            noise: f.z,
            f: Assignment::Exact(f.values),
        })
    }
}

/// Sampler with margin witnesses prepared for every matching of a family.
pub struct HardSampler<'a> {
    family: &'a PmrsFamily,
    margins: Vec<MarginWitness>,
}

impl<'a> HardSampler<'a> {
    pub fn new(family: &'a PmrsFamily) -> Result<Self> {
        let margins = family
            .matchings
            .iter()
            .zip(&family.witnesses)
            .map(|(m, w)| normalize_margin(&family.scaffold, m, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(HardSampler { family, margins })
    }

    pub fn family(&self) -> &PmrsFamily {
        self.family
    }

    pub fn margin(&self, i: usize) -> &MarginWitness {
        &self.margins[i]
    }

    pub fn sample_yes(&self, rng: &mut impl Rng) -> HardSample {
        self.sample(SampleTag::Yes, rng)
    }

    pub fn sample_no(&self, rng: &mut impl Rng) -> HardSample {
        self.sample(SampleTag::No, rng)
    }

    pub fn sample(&self, tag: SampleTag, rng: &mut impl Rng) -> HardSample {
        let i = rng.random_range(0..self.family.s());
        let noise: Vec<u8> = (0..self.family.matchings[i].len())
            .map(|_| rng.random_range(0..NOISE_LETTERS))
            .collect();
        self.sample_with(tag, i, &noise)
    }

    /// Deterministic core of the samplers: values from `(i, Z)`.
    pub fn sample_with(&self, tag: SampleTag, i: usize, noise: &[u8]) -> HardSample {
        let n0 = self.family.n0();
        let m = &self.family.matchings[i];
        assert_eq!(noise.len(), m.len(), "one noise letter per matching edge");
        let h = noise_step();
        let mut values = self.margins[i].slack_base.clone();
        for (&(l, r), &z) in m.edges().iter().zip(noise) {
            let eta = Rat::from_integer(z as i128) * h;
            values[l] += &eta;
            let eta_right = match tag {
                SampleTag::Yes => eta,
                SampleTag::No => {
                    Rat::from_integer(((z + NOISE_LETTERS - 1) % NOISE_LETTERS) as i128) * h
                }
            };
            values[n0 + r] += &eta_right;
        }
        HardSample {
            tag,
            index: i,
            noise: noise.to_vec(),
            f: Assignment::Exact(values),
        }
    }
}

/// Cap on touched matching edges in exact transcript enumeration
/// (`4^t` outcomes).
pub const TRANSCRIPT_EDGE_CAP: usize = 12;

/// Exact distribution of the answers on a query set: value tuples mapped to
/// outcome counts out of `4^t`.
pub type TranscriptDistribution = BTreeMap<Vec<Rat>, u64>;

#[derive(Debug, Clone)]
pub struct TranscriptComparison {
    pub yes: TranscriptDistribution,
    pub no: TranscriptDistribution,
    /// Number of enumerated outcomes, `4^t`.
    pub outcomes: u64,
    pub equal: bool,
}

/// Enumerate the exact transcript distributions under `D+` and `D-` for a
/// fixed hidden index and query set (DAG vertex ids).
///
/// Equality holds whenever the query set contains no full matching edge of
/// `M_i`: a single observed endpoint sees noise through a permutation of the
/// uniform alphabet either way.
pub fn transcript_distribution(
    sampler: &HardSampler,
    i: usize,
    q_set: &[VertexId],
) -> Result<TranscriptComparison> {
    let family = sampler.family();
    let n0 = family.n0();
    let m = &family.matchings[i];
    let mut q: Vec<VertexId> = q_set.to_vec();
    q.sort_unstable();
    q.dedup();
    for &v in &q {
        if v >= 2 * n0 {
            return Err(Error::VertexOutOfRange(v, 2 * n0));
        }
    }
    let queried = |v: VertexId| q.binary_search(&v).is_ok();

    // Matching edges with at least one queried endpoint, in edge order.
    let touched: Vec<usize> = m
        .edges()
        .iter()
        .enumerate()
        .filter(|&(_, &(l, r))| queried(l) || queried(n0 + r))
        .map(|(j, _)| j)
        .collect();
    if touched.len() > TRANSCRIPT_EDGE_CAP {
        return Err(Error::EnumerationTooLarge(
            touched.len(),
            TRANSCRIPT_EDGE_CAP,
        ));
    }

    let t = touched.len();
    let outcomes = 1u64 << (2 * t); // 4^t
    let mut yes = TranscriptDistribution::new();
    let mut no = TranscriptDistribution::new();
    let g = &sampler.margin(i).slack_base;
    let h = noise_step();
    let mut z = vec![0u8; t];
    for code in 0..outcomes {
        for (j, zj) in z.iter_mut().enumerate() {
            *zj = ((code >> (2 * j)) & 3) as u8;
        }
        let mut tuple_yes = Vec::with_capacity(q.len());
        let mut tuple_no = Vec::with_capacity(q.len());
        for &v in &q {
            let mut val_yes = g[v];
            let mut val_no = g[v];
            for (j, &ei) in touched.iter().enumerate() {
                let (l, r) = m.edges()[ei];
                if v == l {
                    let eta = Rat::from_integer(z[j] as i128) * h;
                    val_yes += &eta;
                    val_no += &eta;
                } else if v == n0 + r {
                    let eta = Rat::from_integer(z[j] as i128) * h;
                    let eta_shift =
                        Rat::from_integer(((z[j] + NOISE_LETTERS - 1) % NOISE_LETTERS) as i128)
                            * h;
                    val_yes += &eta;
                    val_no += &eta_shift;
                }
            }
            tuple_yes.push(val_yes);
            tuple_no.push(val_no);
        }
        *yes.entry(tuple_yes).or_insert(0) += 1;
        *no.entry(tuple_no).or_insert(0) += 1;
    }
    let equal = yes == no;
    Ok(TranscriptComparison {
        yes,
        no,
        outcomes,
        equal,
    })
}

/// Replace values by their rank among the distinct used values, an
/// order-preserving injection into `{0..bound-1}`. Preserves every strict
/// and non-strict comparison, hence the violated-pair set.
pub fn quantize_to_range(f: &Assignment, bound: usize) -> Result<Assignment> {
    if bound == 0 {
        return Err(Error::InvalidParameter("range bound must be >= 1".into()));
    }
    let vals = f.as_exact()?;
    let mut distinct: Vec<&Rat> = vals.iter().collect();
    distinct.sort();
    distinct.dedup();
    if distinct.len() > bound {
        return Err(Error::RangeExceeded {
            distinct: distinct.len(),
            bound,
        });
    }
    let rank: BTreeMap<&Rat, usize> = distinct.into_iter().zip(0..).collect();
    Ok(Assignment::Exact(
        vals.iter()
            .map(|v| Rat::from_integer(rank[v] as i128))
            .collect(),
    ))
}
