//! Arbitrary-length discrete Fourier transforms.
//!
//! Forward is unnormalized, `X_k = Σ x_j e^{-2πijk/N}`; inverse carries the
//! `1/N`. Lengths that come out of the extension geometry are rarely powers of
//! two, so transforms go through rustfft's planner (mixed radix with a
//! Bluestein fallback for large prime factors). Plans are cached per thread.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place transform. `Inverse` includes the `1/N` factor.
pub fn fft_in_place(x: &mut [C64], direction: Direction) -> Result<()> {
    if x.is_empty() {
        return Err(Error::invalid("N", "transform length must be positive"));
    }
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match direction {
            Direction::Forward => p.plan_fft_forward(x.len()),
            Direction::Inverse => p.plan_fft_inverse(x.len()),
        }
    });
    plan.process(x);
    if direction == Direction::Inverse {
        let scale = 1.0 / x.len() as f64;
        x.iter_mut().for_each(|z| *z *= scale);
    }
    Ok(())
}

pub fn fft(x: &[C64], direction: Direction) -> Result<Vec<C64>> {
    let mut out = x.to_vec();
    fft_in_place(&mut out, direction)?;
    Ok(out)
}

/// O(N²) direct summation with the same conventions as [`fft`].
pub fn naive_dft(x: &[C64], direction: Direction) -> Result<Vec<C64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::invalid("N", "transform length must be positive"));
    }
    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    // Twiddles indexed by (j·k mod N) keep the phase argument small.
    let twiddle: Vec<C64> = (0..n)
        .map(|r| C64::from_polar(1.0, sign * 2.0 * PI * r as f64 / n as f64))
        .collect();
    let mut out: Vec<C64> = (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, xj)| xj * twiddle[(j * k) % n])
                .sum()
        })
        .collect();
    if direction == Direction::Inverse {
        let scale = 1.0 / n as f64;
        out.iter_mut().for_each(|z| *z *= scale);
    }
    Ok(out)
}
