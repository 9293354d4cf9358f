//! In-place kernels over a flat amplitude buffer, addressed by bit position.

use num_complex::Complex64;

pub(crate) fn apply_1q(amps: &mut [Complex64], bit: usize, m: &[[Complex64; 2]; 2]) {
    let stride = 1usize << bit;
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for i0 in base..base + stride {
            let i1 = i0 + stride;
            let (a0, a1) = (amps[i0], amps[i1]);
            amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += 2 * stride;
    }
}

/// Multiply every amplitude by `same` when bits `a` and `b` agree, else `diff`.
pub(crate) fn apply_parity_phase(
    amps: &mut [Complex64],
    a: usize,
    b: usize,
    same: Complex64,
    diff: Complex64,
) {
    for (i, amp) in amps.iter_mut().enumerate() {
        let parity = ((i >> a) ^ (i >> b)) & 1;
        *amp *= if parity == 0 { same } else { diff };
    }
}

/// Phase picked up by basis state `i` under a Pauli string with the given
/// masks: `P|i> = phase(i) |i ^ x_mask>`.
#[inline]
pub(crate) fn pauli_phase(i: usize, z_mask: usize, y_phase: Complex64) -> Complex64 {
    if (i & z_mask).count_ones() % 2 == 0 {
        y_phase
    } else {
        -y_phase
    }
}

/// `i^k` for the number of Y factors in a Pauli string.
pub(crate) fn y_phase(num_y: usize) -> Complex64 {
    match num_y % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}
