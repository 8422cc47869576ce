//! The SC and CL reconciliation protocols, with leakage accounting.
//!
//! Both protocols are written as explicit Alice and Bob steps. Bob-side
//! decoders ([`ScBob`], [`ClBob`]) own their scratch memory so a harness can
//! reuse them across frames; the free functions build one per call.
//!
//! Virtual strings are drawn from whatever generator the caller passes in.
//! The simulation uses seeded ChaCha streams, which is fine for measuring
//! error rates and not suitable for key material.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bits::{binary_entropy, polar_transform, transform_in_place, xor_blocks, BitBlock, IndexSet};
use crate::construction::CodeProfile;
use crate::crc::CrcSpec;
use crate::decode::{crc_aided_select, llr_from_bsc, CrcLayout, FrozenPlan, ListDecoder, ScDecoder};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolId {
    Sc,
    Cl,
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolId::Sc => "sc",
            ProtocolId::Cl => "cl",
        })
    }
}

impl FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sc" => Ok(ProtocolId::Sc),
            "cl" => Ok(ProtocolId::Cl),
            _ => Err(Error::InvalidParameter(format!("unknown protocol {s:?} (expected sc or cl)"))),
        }
    }
}

/// Everything one run put on the public channel, and what it was charged.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconTranscript {
    protocol: ProtocolId,
    public_bits: BitBlock,
    leak_bits: usize,
    n: usize,
    k: usize,
    alpha: usize,
    crc_len: usize,
    success: Option<bool>,
    crc_ok: Option<bool>,
}

impl ReconTranscript {
    /// Records a run, checking the ledger: the charge must be `n - k`, the
    /// sizes must add up to `n`, and the wire must carry `alpha` bits (SC)
    /// or `n` bits (CL).
    pub fn new(
        protocol: ProtocolId,
        public_bits: BitBlock,
        leak_bits: usize,
        n: usize,
        alpha: usize,
        crc_len: usize,
    ) -> Result<Self> {
        let k = n
            .checked_sub(alpha + crc_len)
            .ok_or(Error::NoInformationPositions { alpha, crc_len, n })?;
        if leak_bits != n - k {
            return Err(Error::LeakageInvariant { charged: leak_bits, expected: n - k });
        }
        let wire = match protocol {
            ProtocolId::Sc => alpha,
            ProtocolId::Cl => n,
        };
        if public_bits.len() != wire {
            return Err(Error::LeakageInvariant { charged: public_bits.len(), expected: wire });
        }
        if protocol == ProtocolId::Sc && crc_len != 0 {
            return Err(Error::InvalidParameter("the SC protocol carries no CRC".into()));
        }
        Ok(ReconTranscript { protocol, public_bits, leak_bits, n, k, alpha, crc_len, success: None, crc_ok: None })
    }

    fn with_crc(mut self, crc_ok: Option<bool>) -> Self {
        self.crc_ok = crc_ok;
        self
    }

    /// Marks the outcome against Alice's key (a simulation-only check).
    pub fn with_outcome(mut self, x: &BitBlock, x_hat: &BitBlock) -> Self {
        self.success = Some(x == x_hat);
        self
    }

    pub fn protocol(&self) -> ProtocolId {
        self.protocol
    }

    pub fn public_bits(&self) -> &BitBlock {
        &self.public_bits
    }

    /// Number of bits that crossed the public channel.
    pub fn wire_bits(&self) -> usize {
        self.public_bits.len()
    }

    pub fn leak_bits(&self) -> usize {
        self.leak_bits
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn crc_len(&self) -> usize {
        self.crc_len
    }

    /// `None` until [`Self::with_outcome`] has been applied.
    pub fn success(&self) -> Option<bool> {
        self.success
    }

    /// CL only, and only when the profile carries a CRC.
    pub fn crc_ok(&self) -> Option<bool> {
        self.crc_ok
    }
}

/// Alice's precoded word: zeros on the high-entropy set, random payload bits
/// on the data positions and a CRC on the check positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualString {
    v: BitBlock,
    k: usize,
    alpha: usize,
    crc_len: usize,
}

impl VirtualString {
    pub fn bits(&self) -> &BitBlock {
        &self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn crc_len(&self) -> usize {
        self.crc_len
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }
}

/// Information charged for one block: `n - k = alpha + c`.
pub fn leakage_bits(profile: &CodeProfile) -> usize {
    profile.n() - profile.k()
}

/// `leak / (n·h(p))`.
pub fn efficiency(leak: usize, n: usize, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::ProbabilityOutOfRange { value: p, range: "(0, 0.5)" });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("block size must be positive".into()));
    }
    Ok(leak as f64 / (n as f64 * binary_entropy(p)?))
}

fn check_len(expected: usize, block: &BitBlock) -> Result<()> {
    if block.len() == expected {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual: block.len() })
    }
}

fn check_crc(profile: &CodeProfile, spec: &CrcSpec) -> Result<()> {
    if profile.crc_len() != 0 && profile.crc_len() != spec.len() {
        return Err(Error::InvalidParameter(format!(
            "profile reserves {} check bits but the CRC is {} bits wide",
            profile.crc_len(),
            spec.len()
        )));
    }
    Ok(())
}

/// Builds Alice's virtual string for `profile`.
pub fn cl_precode<R: Rng + ?Sized>(profile: &CodeProfile, spec: &CrcSpec, rng: &mut R) -> Result<VirtualString> {
    check_crc(profile, spec)?;
    let n = profile.n();
    let mut v = BitBlock::zeros(n);
    for &i in profile.data_positions() {
        v.set(i, rng.gen::<bool>() as u8);
    }
    let check = profile.crc_positions();
    if !check.is_empty() {
        // The CRC covers every other position in index order; check
        // positions are still zero here, so skipping them is enough.
        let message: Vec<u8> =
            v.as_slice().iter().enumerate().filter(|(i, _)| check.binary_search(i).is_err()).map(|(_, &b)| b).collect();
        let crc = spec.remainder(&message);
        let c = check.len();
        for (j, &pos) in check.iter().enumerate() {
            v.set(pos, ((crc >> (c - 1 - j)) & 1) as u8);
        }
    }
    if profile.alpha() + profile.k() + profile.crc_len() != n {
        return Err(Error::NoInformationPositions { alpha: profile.alpha(), crc_len: profile.crc_len(), n });
    }
    Ok(VirtualString { v, k: profile.k(), alpha: profile.alpha(), crc_len: profile.crc_len() })
}

/// `u = vG ⊕ x`, the single public message of the CL protocol.
pub fn cl_alice_message(x: &BitBlock, v: &VirtualString) -> Result<BitBlock> {
    check_len(v.len(), x)?;
    xor_blocks(&polar_transform(&v.v)?, x)
}

/// Bob's side of the CL protocol with reusable decoder state.
pub struct ClBob {
    profile: CodeProfile,
    spec: CrcSpec,
    layout: Option<CrcLayout>,
    plan: FrozenPlan,
    decoder: ListDecoder<f64>,
}

impl ClBob {
    pub fn new(profile: &CodeProfile, list_size: usize, spec: &CrcSpec) -> Result<Self> {
        check_crc(profile, spec)?;
        let plan = FrozenPlan::new(profile.high_entropy_set(), &BitBlock::zeros(profile.alpha()))?;
        Ok(ClBob {
            profile: profile.clone(),
            spec: *spec,
            layout: (profile.crc_len() > 0).then(|| profile.crc_layout()),
            plan,
            decoder: ListDecoder::new(profile.n(), list_size)?,
        })
    }

    pub fn list_size(&self) -> usize {
        self.decoder.list_size()
    }

    /// Returns `x̂` and the transcript (outcome not yet marked).
    pub fn decode(&mut self, y: &BitBlock, u: &BitBlock) -> Result<(BitBlock, ReconTranscript)> {
        let n = self.profile.n();
        check_len(n, y)?;
        check_len(n, u)?;
        let w = xor_blocks(u, y)?;
        let llr = llr_from_bsc(&w, self.profile.design_p())?;
        let candidates = self.decoder.decode(&llr, &self.plan)?;
        let chosen = match &self.layout {
            Some(layout) => crc_aided_select(&candidates, &self.spec, layout)?,
            None => candidates.into_iter().next().ok_or(Error::EmptyCandidates)?,
        };
        let mut z_hat = chosen.transform_word.into_vec();
        transform_in_place(&mut z_hat);
        let x_hat = xor_blocks(&BitBlock::new(z_hat)?, u)?;
        let transcript = ReconTranscript::new(
            ProtocolId::Cl,
            u.clone(),
            leakage_bits(&self.profile),
            n,
            self.profile.alpha(),
            self.profile.crc_len(),
        )?
        .with_crc(chosen.crc_ok);
        Ok((x_hat, transcript))
    }
}

/// Bob decodes `u` against `y` with a list of size `list_size`.
pub fn cl_bob_decode(
    y: &BitBlock,
    u: &BitBlock,
    profile: &CodeProfile,
    list_size: usize,
    spec: &CrcSpec,
) -> Result<(BitBlock, ReconTranscript)> {
    ClBob::new(profile, list_size, spec)?.decode(y, u)
}

/// A full CL run: precode, send, decode, and mark the outcome.
pub fn cl_protocol_run<R: Rng + ?Sized>(
    x: &BitBlock,
    y: &BitBlock,
    profile: &CodeProfile,
    list_size: usize,
    spec: &CrcSpec,
    rng: &mut R,
) -> Result<(BitBlock, ReconTranscript)> {
    let v = cl_precode(profile, spec, rng)?;
    let u = cl_alice_message(x, &v)?;
    let (x_hat, t) = cl_bob_decode(y, &u, profile, list_size, spec)?;
    let t = t.with_outcome(x, &x_hat);
    Ok((x_hat, t))
}

/// Bob's side of the SC protocol with reusable decoder state.
pub struct ScBob {
    profile: CodeProfile,
    decoder: ScDecoder<f64>,
}

impl ScBob {
    pub fn new(profile: &CodeProfile) -> Result<Self> {
        if profile.crc_len() != 0 {
            return Err(Error::InvalidParameter("the SC protocol needs a profile with crc_len = 0".into()));
        }
        Ok(ScBob { profile: profile.clone(), decoder: ScDecoder::new(profile.n())? })
    }

    /// Decodes with the published bits `u_E`; returns `x̂` and the transcript.
    pub fn decode(&mut self, y: &BitBlock, u_e: &BitBlock) -> Result<(BitBlock, ReconTranscript)> {
        let n = self.profile.n();
        check_len(n, y)?;
        let plan = FrozenPlan::new(self.profile.high_entropy_set(), u_e)?;
        let llr = llr_from_bsc(y, self.profile.design_p())?;
        let mut u_hat = self.decoder.decode(&llr, &plan)?.transform_word.into_vec();
        transform_in_place(&mut u_hat);
        let transcript = ReconTranscript::new(
            ProtocolId::Sc,
            u_e.clone(),
            leakage_bits(&self.profile),
            n,
            self.profile.alpha(),
            0,
        )?;
        Ok((BitBlock::new(u_hat)?, transcript))
    }
}

/// Alice's SC message: the high-entropy bits of `u = xG`.
pub fn sc_alice_message(x: &BitBlock, high_entropy_set: &IndexSet) -> Result<BitBlock> {
    check_len(high_entropy_set.universe(), x)?;
    Ok(polar_transform(x)?.gather(high_entropy_set.as_slice()))
}

/// A full SC run; the transcript has its outcome marked.
pub fn sc_protocol_run(x: &BitBlock, y: &BitBlock, profile: &CodeProfile) -> Result<ReconTranscript> {
    check_len(profile.n(), x)?;
    let u_e = sc_alice_message(x, profile.high_entropy_set())?;
    let (x_hat, t) = ScBob::new(profile)?.decode(y, &u_e)?;
    Ok(t.with_outcome(x, &x_hat))
}
