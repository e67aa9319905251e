//! Bit-exact encoder/decoder/executor for the single-symbol host-to-DPU
//! interface image.
//!
//! Each DPU is driven through one MRAM symbol: a fixed 64-byte header
//! followed by the *main data*, into which the header carries byte offsets.
//! The host can therefore place (and update) the twiddle, command, and
//! sub-polynomial sections freely, as long as offsets stay 8-byte aligned
//! and strictly increasing. All integers are little-endian.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "DRMH"
//! 4       4     version (u32, currently 1)
//! 8       8     polynomial length n (u64, power of two)
//! 16      8     modulus p (u64, a 32-bit prime)
//! 24      8     n_inv = n^-1 mod p (u64)
//! 32      8     number of commands (u64)
//! 40      8     offset of the twiddle section   (bytes into main data)
//! 48      8     offset of the command section   (bytes into main data)
//! 56      8     offset of the sub-polynomials   (bytes into main data)
//! 64      ...   main data
//! ```
//!
//! Sections inside the main data:
//!
//! * twiddles: the forward table (`n` x 4 bytes) immediately followed by
//!   the scrambled inverse table (`n` x 4 bytes);
//! * commands: 32 bytes each -- opcode (u32), 4 reserved zero bytes, then
//!   `src1`, `src2`, `dst` as u64 sub-polynomial indices. Unused operand
//!   slots hold the all-ones sentinel [`OPERAND_UNUSED`];
//! * sub-polynomials: back-to-back arrays of `n` 4-byte residues, filling
//!   the rest of the image (the count is the region size over `4n`).
//!
//! A worked dump of a minimal image (n = 2, p = 257, psi = 241, one
//! command `NttFwd s0 -> s0`, one sub-polynomial `[5, 6]`):
//!
//! ```text
//! 00000000  44 52 4d 48 01 00 00 00  02 00 00 00 00 00 00 00  |DRMH............|
//! 00000010  01 01 00 00 00 00 00 00  81 00 00 00 00 00 00 00  |................|
//! 00000020  01 00 00 00 00 00 00 00  00 00 00 00 00 00 00 00  |................|
//! 00000030  10 00 00 00 00 00 00 00  30 00 00 00 00 00 00 00  |........0.......|
//! 00000040  01 00 00 00 f1 00 00 00  01 00 00 00 10 00 00 00  |................|
//! 00000050  00 00 00 00 00 00 00 00  00 00 00 00 00 00 00 00  |................|
//! 00000060  ff ff ff ff ff ff ff ff  00 00 00 00 00 00 00 00  |................|
//! 00000070  05 00 00 00 06 00 00 00                           |........|
//! ```
//!
//! (Header: n = 2, p = 0x101 = 257, n_inv = 0x81 = 129, one command,
//! twiddles at +0x00, commands at +0x10, sub-polynomials at +0x30 of the
//! main data. Twiddles: forward [1, 241], inverse [1, 16].)
//!
//! Future header fields extend behind the version field under a bumped
//! version number; existing fields never change meaning.

use thiserror::Error;

use crate::error::Error as CoreError;
use crate::modarith::{mod_add, mod_mul, ResidueModulus};
use crate::ntt::TwiddleTable;
use crate::pimsim::{capacity, DpuModel};
use crate::polyring::Domain;

pub const MAGIC: [u8; 4] = *b"DRMH";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 64;
pub const COMMAND_BYTES: usize = 32;
/// All-ones sentinel marking an unused operand slot.
pub const OPERAND_UNUSED: u64 = u64::MAX;

/// Operations a DPU executes against its sub-polynomial region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum Opcode {
    NttFwd = 0,
    NttInv = 1,
    PointwiseMul = 2,
    PointwiseAdd = 3,
    /// Treats `src1`/`src2` as the first of two consecutive sub-polynomial
    /// slots (a ciphertext each) and `dst` as the first of three.
    BgvMul = 4,
}

impl Opcode {
    fn from_u32(v: u32) -> Option<Self> {
        match v {
            0 => Some(Opcode::NttFwd),
            1 => Some(Opcode::NttInv),
            2 => Some(Opcode::PointwiseMul),
            3 => Some(Opcode::PointwiseAdd),
            4 => Some(Opcode::BgvMul),
            _ => None,
        }
    }

    fn is_unary(self) -> bool {
        matches!(self, Opcode::NttFwd | Opcode::NttInv)
    }
}

/// One fixed-width command: opcode plus three operand slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Command {
    pub opcode: Opcode,
    pub src1: u64,
    pub src2: u64,
    pub dst: u64,
}

impl Command {
    pub fn unary(opcode: Opcode, src: u64, dst: u64) -> Self {
        debug_assert!(opcode.is_unary());
        Self {
            opcode,
            src1: src,
            src2: OPERAND_UNUSED,
            dst,
        }
    }

    pub fn binary(opcode: Opcode, src1: u64, src2: u64, dst: u64) -> Self {
        debug_assert!(!opcode.is_unary());
        Self {
            opcode,
            src1,
            src2,
            dst,
        }
    }
}

/// The decoded fixed header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterfaceHeader {
    pub version: u32,
    pub poly_len: u64,
    pub modulus: u64,
    pub n_inv: u64,
    pub num_commands: u64,
    pub offset_twiddles: u64,
    pub offset_commands: u64,
    pub offset_subpolys: u64,
}

/// Section placement inside the main data, in bytes. Offsets must be
/// 8-byte aligned and strictly increasing; gaps are allowed (zero-filled
/// on encode).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageLayout {
    pub offset_twiddles: u64,
    pub offset_commands: u64,
    pub offset_subpolys: u64,
}

impl ImageLayout {
    /// Sections packed back-to-back.
    pub fn packed(n: usize, num_commands: usize) -> Self {
        let offset_twiddles = 0u64;
        let offset_commands = offset_twiddles + 8 * n as u64;
        let offset_subpolys = offset_commands + (COMMAND_BYTES * num_commands) as u64;
        Self {
            offset_twiddles,
            offset_commands,
            offset_subpolys,
        }
    }
}

/// Codec failures; every structural defect gets its own variant so a bad
/// image names the offending section.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("buffer truncated: need {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },

    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),

    #[error("unsupported version {0}")]
    BadVersion(u32),

    #[error("polynomial length {0} is not a power of two >= 2")]
    BadPolyLen(u64),

    #[error("modulus {0} is not a 32-bit prime")]
    BadModulus(u64),

    #[error("n_inv {n_inv} is not the inverse of n modulo p")]
    BadInverse { n_inv: u64 },

    #[error("{section} offset {offset} is not 8-byte aligned")]
    MisalignedOffset { section: &'static str, offset: u64 },

    #[error("section offsets must not decrease: twiddles <= commands <= subpolys")]
    NonMonotoneOffsets,

    #[error("{section} section at offset {offset} exceeds main data ({main_len} bytes)")]
    OffsetOutOfRange {
        section: &'static str,
        offset: u64,
        main_len: u64,
    },

    #[error("{section} section overlaps the next one")]
    OverlappingSections { section: &'static str },

    #[error("sub-polynomial region size {region} is not a multiple of 4n = {stride}")]
    RaggedSubpolyRegion { region: u64, stride: u64 },

    #[error("command {ordinal}: invalid opcode {value}")]
    BadOpcode { ordinal: usize, value: u32 },

    #[error("command {ordinal}: reserved bytes must be zero")]
    BadReserved { ordinal: usize },

    #[error("command {ordinal}: operand {index} out of range ({count} sub-polynomials)")]
    OperandOutOfRange {
        ordinal: usize,
        index: u64,
        count: u64,
    },

    #[error("command {ordinal}: unary op requires the src2 sentinel")]
    MissingSentinel { ordinal: usize },

    #[error("twiddle entry {index} = {value} not below modulus {modulus}")]
    TwiddleOutOfRange {
        index: usize,
        value: u64,
        modulus: u64,
    },

    #[error("residue {value} in sub-polynomial {subpoly} not below modulus {modulus}")]
    ResidueOutOfRange {
        subpoly: u64,
        value: u64,
        modulus: u64,
    },

    #[error(
        "image needs {needed} bytes but the MRAM budget is {budget} \
         (capacity: {capacity} sub-polynomials of this length per DPU)"
    )]
    MramOverflow {
        needed: u64,
        budget: u64,
        capacity: u64,
    },
}

/// Execution failures, pinned to the offending command ordinal.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error(transparent)]
    Codec(#[from] CodecError),

    #[error("command {ordinal}: operand {index} out of range ({count} sub-polynomials)")]
    BadOperand {
        ordinal: usize,
        index: u64,
        count: u64,
    },

    #[error("command {ordinal}: {source}")]
    Kernel {
        ordinal: usize,
        source: CoreError,
    },
}

/// A decoded image: header, parsed twiddle tables, commands, and borrowed
/// views of the raw sub-polynomial bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedImage<'a> {
    pub header: InterfaceHeader,
    pub forward_twiddles: Vec<u32>,
    pub inverse_twiddles: Vec<u32>,
    pub commands: Vec<Command>,
    pub subpolys: Vec<&'a [u8]>,
}

impl DecodedImage<'_> {
    pub fn n(&self) -> usize {
        self.header.poly_len as usize
    }

    /// Residues of sub-polynomial `i` decoded to host words.
    pub fn subpoly_residues(&self, i: usize) -> Vec<u32> {
        self.subpolys[i]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect()
    }
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn read_u64(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

/// Serializes one image. `subpolys` are raw residue arrays of length `n`;
/// sections land where `layout` puts them; the whole image must fit within
/// the DPU's usable MRAM.
pub fn encode_image(
    table: &TwiddleTable,
    commands: &[Command],
    subpolys: &[Vec<u32>],
    layout: &ImageLayout,
    model: &DpuModel,
) -> Result<Vec<u8>, CodecError> {
    let n = table.n() as u64;
    let p = table.modulus().p() as u64;

    for (name, offset) in [
        ("twiddle", layout.offset_twiddles),
        ("command", layout.offset_commands),
        ("sub-polynomial", layout.offset_subpolys),
    ] {
        if offset % 8 != 0 {
            return Err(CodecError::MisalignedOffset {
                section: name,
                offset,
            });
        }
    }
    // Offsets must be monotone; empty sections may share a boundary.
    if layout.offset_twiddles > layout.offset_commands
        || layout.offset_commands > layout.offset_subpolys
    {
        return Err(CodecError::NonMonotoneOffsets);
    }
    if layout.offset_twiddles + 8 * n > layout.offset_commands {
        return Err(CodecError::OverlappingSections { section: "twiddle" });
    }
    if layout.offset_commands + (commands.len() * COMMAND_BYTES) as u64 > layout.offset_subpolys {
        return Err(CodecError::OverlappingSections { section: "command" });
    }

    let count = subpolys.len() as u64;
    for (ordinal, cmd) in commands.iter().enumerate() {
        validate_command(cmd, ordinal, count)?;
    }
    for (i, sp) in subpolys.iter().enumerate() {
        if sp.len() as u64 != n {
            return Err(CodecError::RaggedSubpolyRegion {
                region: (sp.len() * 4) as u64,
                stride: 4 * n,
            });
        }
        if let Some(&bad) = sp.iter().find(|&&c| c as u64 >= p) {
            return Err(CodecError::ResidueOutOfRange {
                subpoly: i as u64,
                value: bad as u64,
                modulus: p,
            });
        }
    }

    let main_len = layout.offset_subpolys + count * 4 * n;
    let total = HEADER_BYTES as u64 + main_len;
    let budget = model.mram_bytes.saturating_sub(model.reserved_bytes);
    if total > budget {
        return Err(CodecError::MramOverflow {
            needed: total,
            budget,
            capacity: capacity(table.n(), model),
        });
    }

    let mut out = vec![0u8; total as usize];
    out[0..4].copy_from_slice(&MAGIC);
    out[4..8].copy_from_slice(&VERSION.to_le_bytes());
    out[8..16].copy_from_slice(&n.to_le_bytes());
    out[16..24].copy_from_slice(&p.to_le_bytes());
    out[24..32].copy_from_slice(&(table.n_inv() as u64).to_le_bytes());
    out[32..40].copy_from_slice(&(commands.len() as u64).to_le_bytes());
    out[40..48].copy_from_slice(&layout.offset_twiddles.to_le_bytes());
    out[48..56].copy_from_slice(&layout.offset_commands.to_le_bytes());
    out[56..64].copy_from_slice(&layout.offset_subpolys.to_le_bytes());

    let main = HEADER_BYTES + layout.offset_twiddles as usize;
    for (i, &t) in table
        .forward()
        .iter()
        .chain(table.inverse_scrambled())
        .enumerate()
    {
        out[main + 4 * i..main + 4 * i + 4].copy_from_slice(&t.to_le_bytes());
    }

    let mut at = HEADER_BYTES + layout.offset_commands as usize;
    for cmd in commands {
        out[at..at + 4].copy_from_slice(&(cmd.opcode as u32).to_le_bytes());
        // 4 reserved zero bytes already in place
        out[at + 8..at + 16].copy_from_slice(&cmd.src1.to_le_bytes());
        out[at + 16..at + 24].copy_from_slice(&cmd.src2.to_le_bytes());
        out[at + 24..at + 32].copy_from_slice(&cmd.dst.to_le_bytes());
        at += COMMAND_BYTES;
    }

    let mut at = HEADER_BYTES + layout.offset_subpolys as usize;
    for sp in subpolys {
        for &c in sp {
            out[at..at + 4].copy_from_slice(&c.to_le_bytes());
            at += 4;
        }
    }
    Ok(out)
}

fn validate_command(cmd: &Command, ordinal: usize, count: u64) -> Result<(), CodecError> {
    let check = |index: u64, width: u64| -> Result<(), CodecError> {
        if index == OPERAND_UNUSED || index + width > count {
            return Err(CodecError::OperandOutOfRange {
                ordinal,
                index,
                count,
            });
        }
        Ok(())
    };
    match cmd.opcode {
        Opcode::NttFwd | Opcode::NttInv => {
            check(cmd.src1, 1)?;
            check(cmd.dst, 1)?;
            if cmd.src2 != OPERAND_UNUSED {
                return Err(CodecError::MissingSentinel { ordinal });
            }
        }
        Opcode::PointwiseMul | Opcode::PointwiseAdd => {
            check(cmd.src1, 1)?;
            check(cmd.src2, 1)?;
            check(cmd.dst, 1)?;
        }
        Opcode::BgvMul => {
            check(cmd.src1, 2)?;
            check(cmd.src2, 2)?;
            check(cmd.dst, 3)?;
        }
    }
    Ok(())
}

/// Parses and validates an image. Rejects anything that does not satisfy
/// the documented invariants; never panics on arbitrary bytes.
pub fn decode_image(bytes: &[u8]) -> Result<DecodedImage<'_>, CodecError> {
    if bytes.len() < HEADER_BYTES {
        return Err(CodecError::Truncated {
            needed: HEADER_BYTES,
            have: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(CodecError::BadMagic(magic));
    }
    let version = read_u32(bytes, 4);
    if version != VERSION {
        return Err(CodecError::BadVersion(version));
    }
    let header = InterfaceHeader {
        version,
        poly_len: read_u64(bytes, 8),
        modulus: read_u64(bytes, 16),
        n_inv: read_u64(bytes, 24),
        num_commands: read_u64(bytes, 32),
        offset_twiddles: read_u64(bytes, 40),
        offset_commands: read_u64(bytes, 48),
        offset_subpolys: read_u64(bytes, 56),
    };

    let n = header.poly_len;
    if !(2..=(1 << 26)).contains(&n) || !n.is_power_of_two() {
        return Err(CodecError::BadPolyLen(n));
    }
    let n = n as usize;
    if header.modulus < 3 || header.modulus > u32::MAX as u64 {
        return Err(CodecError::BadModulus(header.modulus));
    }
    let modulus = ResidueModulus::new(header.modulus as u32)
        .map_err(|_| CodecError::BadModulus(header.modulus))?;
    let p = modulus.p() as u64;
    if header.n_inv >= p
        || mod_mul(
            header.n_inv as u32,
            (n as u64 % p) as u32,
            &modulus,
        ) != 1
    {
        return Err(CodecError::BadInverse {
            n_inv: header.n_inv,
        });
    }

    let main_len = (bytes.len() - HEADER_BYTES) as u64;
    for (name, offset) in [
        ("twiddle", header.offset_twiddles),
        ("command", header.offset_commands),
        ("sub-polynomial", header.offset_subpolys),
    ] {
        if offset % 8 != 0 {
            return Err(CodecError::MisalignedOffset {
                section: name,
                offset,
            });
        }
        if offset > main_len {
            return Err(CodecError::OffsetOutOfRange {
                section: name,
                offset,
                main_len,
            });
        }
    }
    if header.offset_twiddles > header.offset_commands
        || header.offset_commands > header.offset_subpolys
    {
        return Err(CodecError::NonMonotoneOffsets);
    }
    let twiddle_end = header
        .offset_twiddles
        .checked_add(8 * n as u64)
        .ok_or(CodecError::OverlappingSections { section: "twiddle" })?;
    if twiddle_end > header.offset_commands {
        return Err(CodecError::OverlappingSections { section: "twiddle" });
    }
    let commands_end = header
        .offset_commands
        .checked_add(header.num_commands.saturating_mul(COMMAND_BYTES as u64))
        .ok_or(CodecError::OverlappingSections { section: "command" })?;
    if commands_end > header.offset_subpolys {
        return Err(CodecError::OverlappingSections { section: "command" });
    }

    let region = main_len - header.offset_subpolys;
    let stride = 4 * n as u64;
    if !region.is_multiple_of(stride) {
        return Err(CodecError::RaggedSubpolyRegion { region, stride });
    }
    let count = region / stride;

    let twiddle_at = HEADER_BYTES + header.offset_twiddles as usize;
    let read_table = |base: usize| -> Result<Vec<u32>, CodecError> {
        (0..n)
            .map(|i| {
                let v = read_u32(bytes, base + 4 * i);
                if v as u64 >= p {
                    Err(CodecError::TwiddleOutOfRange {
                        index: i,
                        value: v as u64,
                        modulus: p,
                    })
                } else {
                    Ok(v)
                }
            })
            .collect()
    };
    let forward_twiddles = read_table(twiddle_at)?;
    let inverse_twiddles = read_table(twiddle_at + 4 * n)?;

    let mut commands = Vec::with_capacity(header.num_commands as usize);
    let mut at = HEADER_BYTES + header.offset_commands as usize;
    for ordinal in 0..header.num_commands as usize {
        let raw = read_u32(bytes, at);
        let opcode = Opcode::from_u32(raw).ok_or(CodecError::BadOpcode {
            ordinal,
            value: raw,
        })?;
        if read_u32(bytes, at + 4) != 0 {
            return Err(CodecError::BadReserved { ordinal });
        }
        let cmd = Command {
            opcode,
            src1: read_u64(bytes, at + 8),
            src2: read_u64(bytes, at + 16),
            dst: read_u64(bytes, at + 24),
        };
        validate_command(&cmd, ordinal, count)?;
        commands.push(cmd);
        at += COMMAND_BYTES;
    }

    let mut subpolys = Vec::with_capacity(count as usize);
    let mut at = HEADER_BYTES + header.offset_subpolys as usize;
    for index in 0..count {
        let view = &bytes[at..at + 4 * n];
        if let Some(pos) = view
            .chunks_exact(4)
            .position(|c| read_u32(c, 0) as u64 >= p)
        {
            return Err(CodecError::ResidueOutOfRange {
                subpoly: index,
                value: read_u32(view, 4 * pos) as u64,
                modulus: p,
            });
        }
        subpolys.push(view);
        at += 4 * n;
    }

    Ok(DecodedImage {
        header,
        forward_twiddles,
        inverse_twiddles,
        commands,
        subpolys,
    })
}

/// Runs the image's command list in order against its own sub-polynomial
/// region, mutating the buffer in place. Data starts in the coefficient
/// domain (as uploaded by a host); domains are tracked per slot and the
/// usual transform/pointwise rules are enforced.
pub fn execute_image(image: &mut [u8]) -> Result<(), ExecError> {
    let (header, table, commands, count) = {
        let decoded = decode_image(image)?;
        let modulus = ResidueModulus::new(decoded.header.modulus as u32)
            .map_err(|_| CodecError::BadModulus(decoded.header.modulus))?;
        let table = TwiddleTable::from_raw_parts(
            modulus,
            0,
            decoded.forward_twiddles.clone(),
            decoded.inverse_twiddles.clone(),
            decoded.header.n_inv as u32,
        )
        .map_err(|e| ExecError::Kernel {
            ordinal: 0,
            source: e,
        })?;
        (
            decoded.header,
            table,
            decoded.commands.clone(),
            decoded.subpolys.len() as u64,
        )
    };
    let n = header.poly_len as usize;
    let region = HEADER_BYTES + header.offset_subpolys as usize;
    let m = *table.modulus();

    let mut domains = vec![Domain::Coefficient; count as usize];
    let load = |image: &[u8], slot: u64| -> Vec<u32> {
        let at = region + slot as usize * 4 * n;
        image[at..at + 4 * n]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect()
    };
    let store = |image: &mut [u8], slot: u64, data: &[u32]| {
        let at = region + slot as usize * 4 * n;
        for (i, &c) in data.iter().enumerate() {
            image[at + 4 * i..at + 4 * i + 4].copy_from_slice(&c.to_le_bytes());
        }
    };
    let operand = |ordinal: usize, index: u64, width: u64| -> Result<u64, ExecError> {
        if index == OPERAND_UNUSED || index + width > count {
            return Err(ExecError::BadOperand {
                ordinal,
                index,
                count,
            });
        }
        Ok(index)
    };

    for (ordinal, cmd) in commands.iter().enumerate() {
        let kernel_err = |source: CoreError| ExecError::Kernel { ordinal, source };
        match cmd.opcode {
            Opcode::NttFwd | Opcode::NttInv => {
                let src = operand(ordinal, cmd.src1, 1)?;
                let dst = operand(ordinal, cmd.dst, 1)?;
                let sub = crate::polyring::SubPolynomial::from_parts_unchecked(
                    load(image, src),
                    0,
                    domains[src as usize],
                );
                let out = if cmd.opcode == Opcode::NttFwd {
                    crate::ntt::ntt_forward(sub, &table)
                } else {
                    crate::ntt::ntt_inverse(sub, &table)
                }
                .map_err(kernel_err)?;
                domains[dst as usize] = out.domain();
                store(image, dst, out.coeffs());
            }
            Opcode::PointwiseMul | Opcode::PointwiseAdd => {
                let a = operand(ordinal, cmd.src1, 1)?;
                let b = operand(ordinal, cmd.src2, 1)?;
                let dst = operand(ordinal, cmd.dst, 1)?;
                if domains[a as usize] != domains[b as usize] {
                    return Err(kernel_err(CoreError::DomainMismatch {
                        expected: domains[a as usize],
                        found: domains[b as usize],
                    }));
                }
                if cmd.opcode == Opcode::PointwiseMul
                    && domains[a as usize] != Domain::NttBitReversed
                {
                    return Err(kernel_err(CoreError::DomainMismatch {
                        expected: Domain::NttBitReversed,
                        found: domains[a as usize],
                    }));
                }
                let (va, vb) = (load(image, a), load(image, b));
                let out: Vec<u32> = va
                    .iter()
                    .zip(&vb)
                    .map(|(&x, &y)| {
                        if cmd.opcode == Opcode::PointwiseMul {
                            mod_mul(x, y, &m)
                        } else {
                            mod_add(x, y, &m)
                        }
                    })
                    .collect();
                domains[dst as usize] = domains[a as usize];
                store(image, dst, &out);
            }
            Opcode::BgvMul => {
                let a = operand(ordinal, cmd.src1, 2)?;
                let b = operand(ordinal, cmd.src2, 2)?;
                let dst = operand(ordinal, cmd.dst, 3)?;
                for slot in [a, a + 1, b, b + 1] {
                    if domains[slot as usize] != Domain::NttBitReversed {
                        return Err(kernel_err(CoreError::DomainMismatch {
                            expected: Domain::NttBitReversed,
                            found: domains[slot as usize],
                        }));
                    }
                }
                let (a0, a1) = (load(image, a), load(image, a + 1));
                let (b0, b1) = (load(image, b), load(image, b + 1));
                let mul = |x: &[u32], y: &[u32]| -> Vec<u32> {
                    x.iter().zip(y).map(|(&u, &v)| mod_mul(u, v, &m)).collect()
                };
                let c0 = mul(&a0, &b0);
                let cross1 = mul(&a0, &b1);
                let cross2 = mul(&a1, &b0);
                let c1: Vec<u32> = cross1
                    .iter()
                    .zip(&cross2)
                    .map(|(&x, &y)| mod_add(x, y, &m))
                    .collect();
                let c2 = mul(&a1, &b1);
                for (off, data) in [(0u64, &c0), (1, &c1), (2, &c2)] {
                    domains[(dst + off) as usize] = Domain::NttBitReversed;
                    store(image, dst + off, data);
                }
            }
        }
    }
    Ok(())
}
