//! Bit-serial CRC over [`BitBlock`] messages.
//!
//! The register is shifted once per message bit, most significant bit first,
//! so messages need not be byte aligned.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitBlock;
use crate::error::{Error, Result};

/// Parameters of a CRC with width up to 64 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CrcSpec {
    pub width: u32,
    /// Generator polynomial without the implicit leading `x^width` term.
    pub poly: u64,
    pub init: u64,
    /// Consume each 8-bit group least significant bit first and reflect the
    /// final remainder.
    pub reflect: bool,
    pub xor_out: u64,
}

impl CrcSpec {
    /// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection.
    pub const CCITT_FALSE: CrcSpec =
        CrcSpec { width: 16, poly: 0x1021, init: 0xFFFF, reflect: false, xor_out: 0 };

    /// CRC-32/ISO-HDLC as used by zlib and Ethernet.
    pub const CRC32: CrcSpec = CrcSpec {
        width: 32,
        poly: 0x04C1_1DB7,
        init: 0xFFFF_FFFF,
        reflect: true,
        xor_out: 0xFFFF_FFFF,
    };

    pub fn new(width: u32, poly: u64, init: u64) -> Result<Self> {
        let spec = CrcSpec { width, poly, init, reflect: false, xor_out: 0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=64).contains(&self.width) {
            return Err(Error::InvalidParameter(format!("CRC width {} not in 1..=64", self.width)));
        }
        let mask = self.mask();
        for (name, v) in [("poly", self.poly), ("init", self.init), ("xor_out", self.xor_out)] {
            if v & !mask != 0 {
                return Err(Error::InvalidParameter(format!(
                    "CRC {name} {v:#x} wider than {} bits",
                    self.width
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.width as usize
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0
    }

    fn mask(&self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    /// Remainder of `bits` as an integer.
    pub fn remainder(&self, bits: &[u8]) -> u64 {
        let top = 1u64 << (self.width - 1);
        let mask = self.mask();
        let mut reg = self.init;
        let mut feed = |bit: u8| {
            let fb = ((reg & top) != 0) as u8 ^ (bit & 1);
            reg = (reg << 1) & mask;
            if fb == 1 {
                reg ^= self.poly;
            }
        };
        if self.reflect {
            for group in bits.chunks(8) {
                group.iter().rev().for_each(|&b| feed(b));
            }
        } else {
            bits.iter().for_each(|&b| feed(b));
        }
        if self.reflect {
            reg = reg.reverse_bits() >> (64 - self.width);
        }
        reg ^ self.xor_out
    }
}

impl Default for CrcSpec {
    fn default() -> Self {
        CrcSpec::CCITT_FALSE
    }
}

/// `<width>:<poly-hex>:<init-hex>`, e.g. `16:1021:FFFF`.
impl FromStr for CrcSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad CRC spec {s:?}, want <width>:<poly-hex>:<init-hex>"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [w, p, i] = parts.as_slice() else {
            return Err(bad());
        };
        let hex = |t: &str| {
            let t = t.trim_start_matches("0x").trim_start_matches("0X");
            u64::from_str_radix(t, 16).map_err(|_| bad())
        };
        let width = w.parse::<u32>().map_err(|_| bad())?;
        CrcSpec::new(width, hex(p)?, hex(i)?)
    }
}

impl fmt::Display for CrcSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.width.div_ceil(4) as usize;
        write!(f, "{}:{:0digits$X}:{:0digits$X}", self.width, self.poly, self.init)
    }
}

/// CRC of `message` as a `width`-bit block, most significant bit first.
pub fn crc_compute(message: &BitBlock, spec: &CrcSpec) -> BitBlock {
    BitBlock::from_u64(spec.remainder(message.as_slice()), spec.len())
}

/// Whether the trailing `width` bits equal the CRC of the prefix.
pub fn crc_check(message_with_crc: &BitBlock, spec: &CrcSpec) -> Result<bool> {
    let c = spec.len();
    let len = message_with_crc.len();
    if len < c {
        return Err(Error::LengthMismatch { expected: c, actual: len });
    }
    let (body, tail) = message_with_crc.as_slice().split_at(len - c);
    let stored = tail.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
    Ok(spec.remainder(body) == stored)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    /// Long division of `msg(x)·x^w` by the generator, with the init register
    /// folded into the first `w` message bits.
    fn long_division(msg: &[u8], width: usize, poly: u64, init: u64) -> u64 {
        let mut dividend: Vec<u8> = msg.to_vec();
        for k in 0..width.min(dividend.len()) {
            dividend[k] ^= ((init >> (width - 1 - k)) & 1) as u8;
        }
        let init_overflow = width.saturating_sub(msg.len());
        dividend.extend(std::iter::repeat(0).take(width));
        if init_overflow > 0 {
            // Short message: the unconsumed init bits land in the appended zeros.
            for k in msg.len()..width {
                dividend[k] ^= ((init >> (width - 1 - k)) & 1) as u8;
            }
        }
        let mut generator = vec![1u8];
        generator.extend((0..width).rev().map(|k| ((poly >> k) & 1) as u8));
        for i in 0..msg.len() {
            if dividend[i] == 1 {
                for (j, &g) in generator.iter().enumerate() {
                    dividend[i + j] ^= g;
                }
            }
        }
        dividend[msg.len()..].iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    #[test]
    fn known_answer_ccitt_false() {
        let msg = BitBlock::from_bytes_msb(b"123456789");
        assert_eq!(msg.len(), 72);
        let crc = crc_compute(&msg, &CrcSpec::CCITT_FALSE);
        assert_eq!(crc.to_u64(), Some(0x29B1));
        assert_eq!(long_division(msg.as_slice(), 16, 0x1021, 0xFFFF), 0x29B1);
    }

    #[test]
    fn known_answer_reflected_crc32() {
        let msg = BitBlock::from_bytes_msb(b"123456789");
        assert_eq!(CrcSpec::CRC32.remainder(msg.as_slice()), 0xCBF4_3926);
    }

    #[test]
    fn register_matches_long_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for len in [0usize, 1, 5, 15, 16, 17, 40, 100] {
            let msg = BitBlock::random(len, &mut rng);
            for (poly, init) in [(0x1021, 0xFFFF), (0x8005, 0), (0x1021, 0x1D0F)] {
                let spec = CrcSpec::new(16, poly, init).unwrap();
                assert_eq!(
                    spec.remainder(msg.as_slice()),
                    long_division(msg.as_slice(), 16, poly, init),
                    "len {len} poly {poly:#x} init {init:#x}"
                );
            }
        }
    }

    #[test]
    fn empty_message_zero_init() {
        let spec = CrcSpec::new(16, 0x1021, 0).unwrap();
        assert_eq!(crc_compute(&BitBlock::zeros(0), &spec), BitBlock::zeros(16));
    }

    #[test]
    fn adding_shifted_generator_keeps_crc() {
        let spec = CrcSpec::new(16, 0x1021, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let msg = BitBlock::random(64, &mut rng);
        // Generator g(x) = x^16 + poly, placed at shift s inside the message.
        let gen = BitBlock::from_u64((1 << 16) | 0x1021, 17);
        for shift in [0usize, 7, 47] {
            let mut m = msg.clone();
            for k in 0..17 {
                if gen[k] == 1 {
                    m.flip(shift + k);
                }
            }
            assert_eq!(crc_compute(&m, &spec), crc_compute(&msg, &spec));
        }
    }

    #[test]
    fn check_round_trip_and_flips() {
        let spec = CrcSpec::CCITT_FALSE;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let len = rng.gen_range(0..200);
            let msg = BitBlock::random(len, &mut rng);
            let framed = msg.concat(&crc_compute(&msg, &spec));
            assert!(crc_check(&framed, &spec).unwrap());
            let mut bad = framed.clone();
            bad.flip(rng.gen_range(0..framed.len()));
            assert!(!crc_check(&bad, &spec).unwrap());
        }
    }

    #[test]
    fn detects_bursts_up_to_width() {
        let spec = CrcSpec::CCITT_FALSE;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let msg = BitBlock::random(80, &mut rng);
        let framed = msg.concat(&crc_compute(&msg, &spec));
        for burst in 1..=16usize {
            for start in 0..=(framed.len() - burst) {
                let mut bad = framed.clone();
                // Burst pattern with both end bits set.
                bad.flip(start);
                if burst > 1 {
                    bad.flip(start + burst - 1);
                }
                for k in 1..burst.saturating_sub(1) {
                    if rng.gen::<bool>() {
                        bad.flip(start + k);
                    }
                }
                assert!(!crc_check(&bad, &spec).unwrap(), "burst {burst} at {start}");
            }
        }
    }

    #[test]
    fn check_rejects_short_input() {
        assert!(crc_check(&BitBlock::zeros(15), &CrcSpec::CCITT_FALSE).is_err());
    }

    #[test]
    fn parse_and_display() {
        let spec: CrcSpec = "16:1021:FFFF".parse().unwrap();
        assert_eq!(spec, CrcSpec::CCITT_FALSE);
        assert_eq!(spec.to_string(), "16:1021:FFFF");
        assert_eq!("8:0x07:0".parse::<CrcSpec>().unwrap().poly, 7);
        assert!("16:10210:0".parse::<CrcSpec>().is_err());
        assert!("0:1:0".parse::<CrcSpec>().is_err());
        assert!("16:1021".parse::<CrcSpec>().is_err());
    }

    #[test]
    fn random_tail_pass_rate() {
        // 10^6 random tails: expected passes 10^6 / 65536 ≈ 15.26, and
        // P(Poisson(15.26) ∉ [3, 35]) < 1e-5.
        let spec = CrcSpec::CCITT_FALSE;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let passes = (0..1_000_000)
            .filter(|_| {
                let msg = BitBlock::random(48, &mut rng);
                crc_check(&msg, &spec).unwrap()
            })
            .count();
        assert!((3..=35).contains(&passes), "passes = {passes}");
    }
}
