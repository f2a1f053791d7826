//! Arithmetic in GF(2^8) modulo the primitive polynomial x^8+x^4+x^3+x^2+1.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Sub};
use std::sync::LazyLock;

/// Reduction polynomial, including the x^8 term.
pub const POLYNOMIAL: u16 = 0x11D;

struct Tables {
    exp: [u8; 512],
    log: [u8; 256],
}

static TABLES: LazyLock<Tables> = LazyLock::new(|| {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    for (i, slot) in exp.iter_mut().take(255).enumerate() {
        *slot = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= POLYNOMIAL;
        }
    }
    // doubled so exp[log a + log b] needs no reduction
    let (head, tail) = exp.split_at_mut(255);
    for (i, slot) in tail.iter_mut().enumerate() {
        *slot = head[i % 255];
    }
    Tables { exp, log }
});

/// Full 256x256 product table, used by the bulk slice kernels.
static MUL_TABLE: LazyLock<Box<[[u8; 256]; 256]>> = LazyLock::new(|| {
    let mut table = Box::new([[0u8; 256]; 256]);
    for a in 0..256 {
        for b in 0..256 {
            table[a][b] = (Gf256(a as u8) * Gf256(b as u8)).0;
        }
    }
    table
});

/// An element of GF(256).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);
    /// The generator `x`, whose powers run through every nonzero element.
    pub const GENERATOR: Gf256 = Gf256(2);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(self) -> Option<Gf256> {
        if self.0 == 0 {
            return None;
        }
        let t = &*TABLES;
        Some(Gf256(t.exp[255 - t.log[self.0 as usize] as usize]))
    }

    pub fn pow(self, e: u32) -> Gf256 {
        if e == 0 {
            return Gf256::ONE;
        }
        if self.0 == 0 {
            return Gf256::ZERO;
        }
        let t = &*TABLES;
        let l = (u64::from(t.log[self.0 as usize]) * u64::from(e)) % 255;
        Gf256(t.exp[l as usize])
    }
}

impl fmt::Debug for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf256({:#04x})", self.0)
    }
}

impl Add for Gf256 {
    type Output = Gf256;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf256 {
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

impl Sub for Gf256 {
    type Output = Gf256;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl Mul for Gf256 {
    type Output = Gf256;

    fn mul(self, rhs: Gf256) -> Gf256 {
        if self.0 == 0 || rhs.0 == 0 {
            return Gf256::ZERO;
        }
        let t = &*TABLES;
        Gf256(t.exp[t.log[self.0 as usize] as usize + t.log[rhs.0 as usize] as usize])
    }
}

impl MulAssign for Gf256 {
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = *self * rhs;
    }
}

impl Div for Gf256 {
    type Output = Gf256;

    /// Panics on division by zero.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Gf256) -> Gf256 {
        self * rhs.inverse().expect("division by zero in GF(256)")
    }
}

/// `dst[i] ^= c * src[i]` for every byte.
pub fn mul_add_slice(dst: &mut [u8], src: &[u8], c: Gf256) {
    debug_assert_eq!(dst.len(), src.len());
    match c.0 {
        0 => {}
        1 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s),
        _ => {
            let row = &MUL_TABLE[c.0 as usize];
            dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= row[*s as usize]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> impl Iterator<Item = Gf256> {
        (0..=255u8).map(Gf256)
    }

    #[test]
    fn generator_is_primitive() {
        let mut seen = std::collections::HashSet::new();
        for e in 0..255 {
            assert!(seen.insert(Gf256::GENERATOR.pow(e)));
        }
        assert_eq!(Gf256::GENERATOR.pow(255), Gf256::ONE);
        assert!(!seen.contains(&Gf256::ZERO));
    }

    #[test]
    fn inverses() {
        assert_eq!(Gf256::ZERO.inverse(), None);
        for x in all().skip(1) {
            let inv = x.inverse().unwrap();
            assert_eq!(x * inv, Gf256::ONE);
            assert_eq!(Gf256::ONE / x, inv);
        }
    }

    #[test]
    fn add_self_inverse_and_commutative_mul() {
        for a in all() {
            assert_eq!(a + a, Gf256::ZERO);
            assert_eq!(a * Gf256::ONE, a);
            assert_eq!(a * Gf256::ZERO, Gf256::ZERO);
            for b in all() {
                assert_eq!(a * b, b * a);
                assert_eq!(a + b, b + a);
                if !b.is_zero() {
                    assert_eq!((a * b) / b, a);
                }
            }
        }
    }

    #[test]
    fn associative_and_distributive_sampled() {
        // every (a, b) pair against a spread of c values
        for a in all() {
            for b in all() {
                for c in (0..=255u8).step_by(17).map(Gf256) {
                    assert_eq!((a * b) * c, a * (b * c));
                    assert_eq!(a * (b + c), a * b + a * c);
                }
            }
        }
    }

    #[test]
    fn carryless_reference() {
        // schoolbook shift-and-reduce multiply as an independent check
        fn slow(mut a: u8, mut b: u8) -> u8 {
            let mut r = 0u8;
            while b != 0 {
                if b & 1 != 0 {
                    r ^= a;
                }
                let hi = a & 0x80 != 0;
                a <<= 1;
                if hi {
                    a ^= (POLYNOMIAL & 0xFF) as u8;
                }
                b >>= 1;
            }
            r
        }
        for a in all() {
            for b in all() {
                assert_eq!((a * b).0, slow(a.0, b.0));
            }
        }
    }

    #[test]
    fn slice_kernel() {
        let src: Vec<u8> = (0..=255).collect();
        for c in [0u8, 1, 2, 0x53, 0xFF] {
            let mut dst = vec![0x5Au8; 256];
            mul_add_slice(&mut dst, &src, Gf256(c));
            for (i, d) in dst.iter().enumerate() {
                assert_eq!(*d, 0x5A ^ (Gf256(c) * Gf256(i as u8)).0);
            }
        }
    }
}
