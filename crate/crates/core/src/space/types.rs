//! Search-space domain types: architectures, main blocks, and genomes.
//!
//! An [`Architecture`] is a decoded point of the block-wise convolutional
//! search space: a stem convolution followed by up to five main blocks,
//! each holding a run of residual blocks with parallel convolution
//! branches. A [`Genome`] is the fixed-length real-number encoding used by
//! the evolutionary search; absent blocks are padded with a sentinel.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Version stamped into every serialized artifact of this workspace.
pub const SCHEMA_VERSION: u32 = 1;

/// Maximum number of main blocks (genome reserves slots for all of them).
pub const MAX_MAIN_BLOCKS: usize = 5;
/// Genome slots per main block: r, b, ct, wf, st.
pub const SLOTS_PER_BLOCK: usize = 5;
/// Stem slots: oc0, ks0, m.
pub const STEM_SLOTS: usize = 3;
/// Total genome length.
pub const GENOME_LEN: usize = STEM_SLOTS + MAX_MAIN_BLOCKS * SLOTS_PER_BLOCK;
/// Pad value for slots of absent main blocks.
pub const SENTINEL: f64 = -1.0;

/// Convolution block variant used by every branch of a residual block.
///
/// `A` is the bottleneck block and `B` the basic block; `C` and `D` are the
/// same blocks with the ReLU / batch-norm order inverted (identical weight
/// shapes, so all static accounting treats C like A and D like B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConvBlockType {
    A,
    B,
    C,
    D,
}

impl ConvBlockType {
    pub const ALL: [ConvBlockType; 4] = [
        ConvBlockType::A,
        ConvBlockType::B,
        ConvBlockType::C,
        ConvBlockType::D,
    ];

    /// True for the bottleneck-shaped variants (A and C).
    pub fn is_bottleneck(self) -> bool {
        matches!(self, ConvBlockType::A | ConvBlockType::C)
    }

    /// Genome slot value of the variant.
    pub fn index(self) -> usize {
        match self {
            ConvBlockType::A => 0,
            ConvBlockType::B => 1,
            ConvBlockType::C => 2,
            ConvBlockType::D => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl std::fmt::Display for ConvBlockType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConvBlockType::A => "A",
            ConvBlockType::B => "B",
            ConvBlockType::C => "C",
            ConvBlockType::D => "D",
        };
        f.write_str(s)
    }
}

/// Per-main-block searchable settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MainBlockSpec {
    /// Residual blocks in this main block.
    pub r: u32,
    /// Parallel convolution branches per residual block.
    pub b: u32,
    /// Convolution block variant used by every branch.
    pub ct: ConvBlockType,
    /// Widening factor applied to this main block.
    pub wf: u32,
    /// Skip policy: when set, every residual block of this main block uses a
    /// 1x1 projection on its identity path even if shapes already match.
    #[serde(default)]
    pub st: bool,
}

/// A decoded architecture: stem hyper-parameters plus main-block settings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Architecture {
    /// Output channels of the stem convolution.
    pub oc0: u32,
    /// Kernel size of the stem convolution.
    pub ks0: u32,
    /// Main blocks, in network order (1 to 5 entries).
    pub blocks: Vec<MainBlockSpec>,
}

impl Architecture {
    /// Content hash used as the stable identifier of an architecture.
    ///
    /// First 16 hex digits of the SHA-256 of the canonical JSON document.
    pub fn arch_id(&self) -> String {
        let doc = ArchitectureDoc::from(self);
        let bytes = serde_json::to_vec(&doc).expect("architecture serializes");
        let digest = Sha256::digest(&bytes);
        let mut id = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            id.push_str(&format!("{byte:02x}"));
        }
        id
    }

    /// Numeric form of [`Self::arch_id`], used to derive per-architecture
    /// random streams.
    pub fn seed_tag(&self) -> u64 {
        u64::from_str_radix(&self.arch_id(), 16).expect("hex id")
    }

    /// Mean widening factor over the main blocks.
    pub fn mean_wf(&self) -> f64 {
        self.blocks.iter().map(|b| b.wf as f64).sum::<f64>() / self.blocks.len() as f64
    }

    /// Mean branch count over the main blocks.
    pub fn mean_branches(&self) -> f64 {
        self.blocks.iter().map(|b| b.b as f64).sum::<f64>() / self.blocks.len() as f64
    }

    /// Total branch count over all main blocks.
    pub fn total_branches(&self) -> u32 {
        self.blocks.iter().map(|b| b.b).sum()
    }

    /// Checks every field against the given bounds.
    pub fn validate(&self, bounds: &SpaceBounds) -> Result<()> {
        let m = self.blocks.len() as u32;
        if m < bounds.m.0 || m > bounds.m.1 {
            return Err(Error::InvalidArchitecture(format!(
                "main block count {m} outside [{}, {}]",
                bounds.m.0, bounds.m.1
            )));
        }
        if self.oc0 < bounds.oc0.0 || self.oc0 > bounds.oc0.1 {
            return Err(Error::InvalidArchitecture(format!(
                "oc0 = {} outside [{}, {}]",
                self.oc0, bounds.oc0.0, bounds.oc0.1
            )));
        }
        if !bounds.ks0.contains(&self.ks0) {
            return Err(Error::InvalidArchitecture(format!(
                "ks0 = {} not in {:?}",
                self.ks0, bounds.ks0
            )));
        }
        for (i, blk) in self.blocks.iter().enumerate() {
            if blk.r < bounds.r.0 || blk.r > bounds.r.1 {
                return Err(Error::InvalidArchitecture(format!(
                    "block {i}: r = {} outside [{}, {}]",
                    blk.r, bounds.r.0, bounds.r.1
                )));
            }
            if blk.b < bounds.b.0 || blk.b > bounds.b.1 {
                return Err(Error::InvalidArchitecture(format!(
                    "block {i}: b = {} outside [{}, {}]",
                    blk.b, bounds.b.0, bounds.b.1
                )));
            }
            if !bounds.ct.contains(&blk.ct) {
                return Err(Error::InvalidArchitecture(format!(
                    "block {i}: ct = {} not in {:?}",
                    blk.ct, bounds.ct
                )));
            }
            if blk.wf < bounds.wf.0 || blk.wf > bounds.wf.1 {
                return Err(Error::InvalidArchitecture(format!(
                    "block {i}: wf = {} outside [{}, {}]",
                    blk.wf, bounds.wf.0, bounds.wf.1
                )));
            }
            if !bounds.st.contains(&blk.st) {
                return Err(Error::InvalidArchitecture(format!(
                    "block {i}: st = {} not allowed",
                    blk.st
                )));
            }
        }
        Ok(())
    }
}

/// Versioned on-disk form of an architecture (canonical JSON object).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchitectureDoc {
    pub schema_version: u32,
    pub oc0: u32,
    pub ks0: u32,
    pub blocks: Vec<MainBlockSpec>,
}

impl From<&Architecture> for ArchitectureDoc {
    fn from(a: &Architecture) -> Self {
        ArchitectureDoc {
            schema_version: SCHEMA_VERSION,
            oc0: a.oc0,
            ks0: a.ks0,
            blocks: a.blocks.clone(),
        }
    }
}

impl From<ArchitectureDoc> for Architecture {
    fn from(d: ArchitectureDoc) -> Self {
        Architecture {
            oc0: d.oc0,
            ks0: d.ks0,
            blocks: d.blocks,
        }
    }
}

/// Searchable ranges for every dimension of the space.
///
/// Defaults are the full space; restricted bounds describe sub-spaces for
/// exhaustive enumeration and constrained searches. Inclusive ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceBounds {
    pub oc0: (u32, u32),
    /// Allowed stem kernel sizes, ascending.
    pub ks0: Vec<u32>,
    pub m: (u32, u32),
    pub r: (u32, u32),
    pub b: (u32, u32),
    pub ct: Vec<ConvBlockType>,
    pub wf: (u32, u32),
    /// Allowed skip-policy values.
    pub st: Vec<bool>,
}

impl Default for SpaceBounds {
    fn default() -> Self {
        SpaceBounds {
            oc0: (8, 128),
            ks0: vec![1, 3, 5, 7],
            m: (1, MAX_MAIN_BLOCKS as u32),
            r: (1, 16),
            b: (1, 12),
            ct: ConvBlockType::ALL.to_vec(),
            wf: (1, 4),
            st: vec![false, true],
        }
    }
}

impl SpaceBounds {
    pub fn validate(&self) -> Result<()> {
        let ranges = [
            ("oc0", self.oc0),
            ("m", self.m),
            ("r", self.r),
            ("b", self.b),
            ("wf", self.wf),
        ];
        for (name, (lo, hi)) in ranges {
            if lo < 1 || lo > hi {
                return Err(Error::Config(format!("bounds.{name}: bad range [{lo}, {hi}]")));
            }
        }
        if self.m.1 > MAX_MAIN_BLOCKS as u32 {
            return Err(Error::Config(format!(
                "bounds.m upper limit {} exceeds {MAX_MAIN_BLOCKS}",
                self.m.1
            )));
        }
        if self.ks0.is_empty() || self.ct.is_empty() || self.st.is_empty() {
            return Err(Error::Config("bounds: empty choice list".into()));
        }
        Ok(())
    }

    /// The smallest architecture expressible within these bounds.
    pub fn minimal(&self) -> Architecture {
        Architecture {
            oc0: self.oc0.0,
            ks0: self.ks0[0],
            blocks: vec![
                MainBlockSpec {
                    r: self.r.0,
                    b: self.b.0,
                    ct: self.ct[0],
                    wf: self.wf.0,
                    st: self.st[0],
                };
                self.m.0 as usize
            ],
        }
    }

    /// Number of architectures in the bounded space.
    pub fn cardinality(&self) -> u128 {
        let span = |(lo, hi): (u32, u32)| (hi - lo + 1) as u128;
        let per_block = span(self.r) * span(self.b) * self.ct.len() as u128
            * span(self.wf)
            * self.st.len() as u128;
        let mut blocks_total = 0u128;
        let mut pow = 1u128;
        for m in 1..=self.m.1 {
            pow = pow.saturating_mul(per_block);
            if m >= self.m.0 {
                blocks_total = blocks_total.saturating_add(pow);
            }
        }
        span(self.oc0) * self.ks0.len() as u128 * blocks_total
    }
}

/// Fixed-length real-number encoding of an architecture.
///
/// Layout: `[oc0, ks0, m, (r, b, ct, wf, st) x 5]` with `ct` as the variant
/// index, `st` as 0/1, and all slots of absent blocks set to [`SENTINEL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome(pub Vec<f64>);

impl Genome {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Encodes an architecture into its fixed-length genome.
pub fn encode(arch: &Architecture) -> Genome {
    let mut slots = vec![SENTINEL; GENOME_LEN];
    slots[0] = arch.oc0 as f64;
    slots[1] = arch.ks0 as f64;
    slots[2] = arch.blocks.len() as f64;
    for (i, blk) in arch.blocks.iter().enumerate() {
        let base = STEM_SLOTS + i * SLOTS_PER_BLOCK;
        slots[base] = blk.r as f64;
        slots[base + 1] = blk.b as f64;
        slots[base + 2] = blk.ct.index() as f64;
        slots[base + 3] = blk.wf as f64;
        slots[base + 4] = if blk.st { 1.0 } else { 0.0 };
    }
    Genome(slots)
}

fn slot_int(slots: &[f64], slot: usize, lo: i64, hi: i64, what: &str) -> Result<i64> {
    let v = slots[slot];
    if !v.is_finite() || v.fract() != 0.0 {
        return Err(Error::InvalidGenome {
            slot,
            value: v,
            reason: format!("{what} must be an integral value"),
        });
    }
    let n = v as i64;
    if n < lo || n > hi {
        return Err(Error::InvalidGenome {
            slot,
            value: v,
            reason: format!("{what} outside [{lo}, {hi}]"),
        });
    }
    Ok(n)
}

/// Decodes a genome, checking every slot against the full search space.
pub fn decode(genome: &Genome) -> Result<Architecture> {
    let bounds = SpaceBounds::default();
    decode_in(genome, &bounds)
}

/// Decodes a genome against explicit bounds.
pub fn decode_in(genome: &Genome, bounds: &SpaceBounds) -> Result<Architecture> {
    let slots = genome.as_slice();
    if slots.len() != GENOME_LEN {
        return Err(Error::ShapeError {
            expected: format!("genome of length {GENOME_LEN}"),
            got: format!("length {}", slots.len()),
        });
    }
    let oc0 = slot_int(slots, 0, bounds.oc0.0 as i64, bounds.oc0.1 as i64, "oc0")? as u32;
    let ks0 = slot_int(slots, 1, 1, i64::MAX, "ks0")? as u32;
    if !bounds.ks0.contains(&ks0) {
        return Err(Error::InvalidGenome {
            slot: 1,
            value: slots[1],
            reason: format!("ks0 not in {:?}", bounds.ks0),
        });
    }
    let m = slot_int(slots, 2, bounds.m.0 as i64, bounds.m.1 as i64, "m")? as usize;

    let mut blocks = Vec::with_capacity(m);
    for i in 0..MAX_MAIN_BLOCKS {
        let base = STEM_SLOTS + i * SLOTS_PER_BLOCK;
        if i >= m {
            // Sentinel padding only after block m.
            for (k, &v) in slots[base..base + SLOTS_PER_BLOCK].iter().enumerate() {
                if v != SENTINEL {
                    return Err(Error::InvalidGenome {
                        slot: base + k,
                        value: v,
                        reason: format!("expected sentinel {SENTINEL} for absent block {i}"),
                    });
                }
            }
            continue;
        }
        let r = slot_int(slots, base, bounds.r.0 as i64, bounds.r.1 as i64, "r")? as u32;
        let b = slot_int(slots, base + 1, bounds.b.0 as i64, bounds.b.1 as i64, "b")? as u32;
        let ct_idx = slot_int(slots, base + 2, 0, 3, "ct")? as usize;
        let ct = ConvBlockType::from_index(ct_idx).expect("index checked");
        if !bounds.ct.contains(&ct) {
            return Err(Error::InvalidGenome {
                slot: base + 2,
                value: slots[base + 2],
                reason: format!("ct not in {:?}", bounds.ct),
            });
        }
        let wf = slot_int(slots, base + 3, bounds.wf.0 as i64, bounds.wf.1 as i64, "wf")? as u32;
        let st_val = slot_int(slots, base + 4, 0, 1, "st")?;
        let st = st_val == 1;
        if !bounds.st.contains(&st) {
            return Err(Error::InvalidGenome {
                slot: base + 4,
                value: slots[base + 4],
                reason: "st value not allowed".into(),
            });
        }
        blocks.push(MainBlockSpec { r, b, ct, wf, st });
    }
    Ok(Architecture { oc0, ks0, blocks })
}
