//! MSB-first bit packing plus the two integer codes used by descriptors:
//! LEB128 varints for byte-aligned header fields and a unary-length prefixed
//! two's-complement code for quantized coefficients.

use crate::error::{Error, Result};

#[derive(Default, Debug)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bits: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit_len(&self) -> u64 {
        self.bits
    }

    pub fn write_bit(&mut self, bit: bool) {
        let offset = (self.bits % 8) as u32;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> offset;
        }
        self.bits += 1;
    }

    /// Low `width` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for i in (0..width).rev() {
            self.write_bit((value >> i) & 1 == 1);
        }
    }

    /// Byte-aligned LEB128.
    pub fn write_varint(&mut self, mut value: u64) {
        debug_assert_eq!(self.bits % 8, 0, "varints are byte aligned");
        loop {
            let byte = (value & 0x7f) as u8;
            value >>= 7;
            if value == 0 {
                self.write_bits(byte as u64, 8);
                break;
            }
            self.write_bits((byte | 0x80) as u64, 8);
        }
    }

    pub fn write_bytes(&mut self, data: &[u8]) {
        for &b in data {
            self.write_bits(b as u64, 8);
        }
    }

    /// `L` ones, a zero, then the low `L` bits of `q`, where `L` is the
    /// shortest two's-complement width holding `q` (`L = 0` for `q = 0`).
    pub fn write_signed(&mut self, q: i64) {
        let width = signed_width(q);
        for _ in 0..width {
            self.write_bit(true);
        }
        self.write_bit(false);
        self.write_bits(q as u64, width);
    }

    /// Pads with zero bits to a byte boundary; returns the pad length.
    pub fn align(&mut self) -> u64 {
        let pad = (8 - self.bits % 8) % 8;
        self.bits += pad;
        pad
    }

    pub fn into_bytes(mut self) -> Vec<u8> {
        self.align();
        self.bytes
    }
}

/// Shortest two's-complement width of `q`; 0 for `q = 0`.
pub fn signed_width(q: i64) -> u32 {
    if q == 0 {
        0
    } else if q > 0 {
        65 - q.leading_zeros()
    } else {
        65 - (!q).leading_zeros()
    }
}

/// Bits used by [`BitWriter::write_signed`].
pub fn signed_code_len(q: i64) -> u64 {
    2 * signed_width(q) as u64 + 1
}

pub struct BitReader<'a> {
    data: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn bit_pos(&self) -> u64 {
        self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let byte = self
            .data
            .get((self.pos / 8) as usize)
            .ok_or_else(|| Error::MalformedDescriptor("stream truncated".into()))?;
        let bit = byte & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | u64::from(self.read_bit()?);
        }
        Ok(v)
    }

    pub fn read_varint(&mut self) -> Result<u64> {
        let mut value = 0u64;
        for shift in (0..64).step_by(7) {
            let byte = self.read_bits(8)?;
            value |= (byte & 0x7f) << shift;
            if byte & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(Error::MalformedDescriptor("varint longer than 64 bits".into()))
    }

    pub fn read_bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut out = [0u8; N];
        for b in out.iter_mut() {
            *b = self.read_bits(8)? as u8;
        }
        Ok(out)
    }

    pub fn read_signed(&mut self) -> Result<i64> {
        let mut width = 0u32;
        while self.read_bit()? {
            width += 1;
            if width > 64 {
                return Err(Error::MalformedDescriptor("integer prefix longer than 64".into()));
            }
        }
        if width == 0 {
            return Ok(0);
        }
        let raw = self.read_bits(width)?;
        // sign-extend from `width` bits
        let shift = 64 - width;
        Ok(((raw << shift) as i64) >> shift)
    }

    /// Consumes the padding up to the next byte boundary; it must be zero.
    pub fn finish_byte(&mut self) -> Result<()> {
        while !self.pos.is_multiple_of(8) {
            if self.read_bit()? {
                return Err(Error::MalformedDescriptor("nonzero padding bits".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn signed_widths() {
        assert_eq!(signed_width(0), 0);
        assert_eq!(signed_width(-1), 1);
        assert_eq!(signed_width(1), 2);
        assert_eq!(signed_width(-2), 2);
        assert_eq!(signed_width(2), 3);
        assert_eq!(signed_width(i64::MIN), 64);
        assert_eq!(signed_width(i64::MAX), 64);
    }

    #[test]
    fn zero_costs_one_bit() {
        let mut w = BitWriter::new();
        w.write_signed(0);
        assert_eq!(w.bit_len(), 1);
        assert_eq!(w.into_bytes(), vec![0]);
    }

    #[test]
    fn truncated_reads_fail() {
        let mut r = BitReader::new(&[0xff]);
        assert!(r.read_signed().is_err());
        let mut r = BitReader::new(&[0x80]);
        assert!(r.read_varint().is_err());
    }

    proptest! {
        #[test]
        fn mixed_stream_roundtrip(ints in prop::collection::vec(any::<i64>(), 0..40), v in any::<u64>(), raw in any::<u32>()) {
            let mut w = BitWriter::new();
            w.write_varint(v);
            for &q in &ints {
                w.write_signed(q);
            }
            w.write_bits(raw as u64, 32);
            let expected_bits = 8 * ((64 - v.leading_zeros()).max(1) as u64).div_ceil(7)
                + ints.iter().map(|&q| signed_code_len(q)).sum::<u64>() + 32;
            prop_assert_eq!(w.bit_len(), expected_bits);
            let bytes = w.into_bytes();
            let mut r = BitReader::new(&bytes);
            prop_assert_eq!(r.read_varint().unwrap(), v);
            for &q in &ints {
                prop_assert_eq!(r.read_signed().unwrap(), q);
            }
            prop_assert_eq!(r.read_bits(32).unwrap(), raw as u64);
            prop_assert!(r.finish_byte().is_ok());
            prop_assert_eq!(r.bit_pos(), 8 * bytes.len() as u64);
        }
    }
}
