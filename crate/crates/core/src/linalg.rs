//! Dense complex matrices and the SVD used for the truncated least-squares
//! solve.
//!
//! The SVD is Golub–Kahan–Reinsch: Householder reduction to a complex upper
//! bidiagonal, a diagonal unitary scaling that makes the bidiagonal real and
//! non-negative, then implicit-shift QR sweeps on the real bidiagonal with
//! the rotations accumulated into the complex singular vectors. Wide
//! matrices are handled through their conjugate transpose.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        Error::check_len("matrix entries", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        Error::check_len("matrix-vector operand", self.cols, x.len())?;
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        Error::check_len("matrix product inner dimension", self.cols, other.rows)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn to_col_major(&self) -> Vec<C64> {
        let mut out = vec![ZERO; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[i + j * self.rows] = self.get(i, j);
            }
        }
        out
    }

    fn from_col_major(rows: usize, cols: usize, cm: &[C64]) -> Self {
        Self::from_fn(rows, cols, |i, j| cm[i + j * rows])
    }
}

/// Thin SVD `A = U·diag(σ)·Vᴴ` with `r = min(rows, cols)` singular triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactorization {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdFactorization {
    pub fn rank_above(&self, tau: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > tau).count()
    }

    /// `U·diag(σ)·Vᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n, r) = (self.u.rows(), self.v.rows(), self.singular_values.len());
        ComplexMatrix::from_fn(m, n, |i, j| {
            (0..r)
                .map(|k| self.u.get(i, k) * self.singular_values[k] * self.v.get(j, k).conj())
                .sum()
        })
    }
}

/// Computes the thin SVD of `a`. Singular values come out non-increasing.
pub fn svd(a: &ComplexMatrix) -> Result<SvdFactorization> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::invalid("matrix", "must have at least one row and column"));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("SVD input matrix"));
    }
    if a.rows() >= a.cols() {
        let (u, s, v) = svd_tall(a.to_col_major(), a.rows(), a.cols())?;
        Ok(SvdFactorization {
            u: ComplexMatrix::from_col_major(a.rows(), a.cols(), &u),
            singular_values: s,
            v: ComplexMatrix::from_col_major(a.cols(), a.cols(), &v),
        })
    } else {
        let ah = a.conj_transpose();
        let (u, s, v) = svd_tall(ah.to_col_major(), ah.rows(), ah.cols())?;
        Ok(SvdFactorization {
            u: ComplexMatrix::from_col_major(a.rows(), a.rows(), &v),
            singular_values: s,
            v: ComplexMatrix::from_col_major(a.cols(), a.rows(), &u),
        })
    }
}

/// Result of a truncated pseudo-inverse solve.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSolution {
    pub x: Vec<C64>,
    /// Number of singular modes with `σ_i > τ` that contributed.
    pub rank: usize,
}

/// `x = Σ_{σ_i > τ} (u_iᴴ b / σ_i) v_i`.
///
/// When no singular value exceeds `τ` the zero vector is returned with
/// `rank == 0`.
pub fn truncated_pinv_apply(
    f: &SvdFactorization,
    b: &[C64],
    tau: f64,
) -> Result<TruncatedSolution> {
    Error::check_len("right-hand side", f.u.rows(), b.len())?;
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::invalid("tau", format!("{tau} must be non-negative")));
    }
    let r = f.singular_values.len();
    let rank = f.rank_above(tau);
    // uᴴb for all retained columns in a single pass over U's rows.
    let mut proj = vec![ZERO; rank];
    for (i, bi) in b.iter().enumerate() {
        let urow = &f.u.row(i)[..rank];
        for (p, u) in proj.iter_mut().zip(urow) {
            *p += u.conj() * bi;
        }
    }
    for (p, s) in proj.iter_mut().zip(&f.singular_values) {
        *p /= *s;
    }
    let n = f.v.rows();
    let mut x = vec![ZERO; n];
    for (j, xj) in x.iter_mut().enumerate() {
        let vrow = f.v.row(j);
        *xj = vrow[..rank].iter().zip(&proj).map(|(v, p)| v * p).sum();
    }
    debug_assert!(rank <= r);
    Ok(TruncatedSolution { x, rank })
}

/// Householder vector for `x` in place: on return `x` holds `v` and the
/// function yields `(β, τ)` with `(I - τ v vᴴ) x_in = β e_1`. `τ = 0` means
/// no reflection was applied and `β = x_0`.
fn householder(x: &mut [C64]) -> (C64, f64) {
    if x.len() <= 1 {
        return (x.first().copied().unwrap_or(ZERO), 0.0);
    }
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return (ZERO, 0.0);
    }
    let alpha = x[0];
    let abs_alpha = alpha.norm();
    let phase = if abs_alpha > 0.0 { alpha / abs_alpha } else { ONE };
    let beta = -phase * norm;
    x[0] = alpha - beta;
    (beta, 1.0 / (norm * (norm + abs_alpha)))
}

fn phase_of(z: C64) -> C64 {
    let r = z.norm();
    if r > 0.0 {
        z / r
    } else {
        ONE
    }
}

/// Applies the plane rotation `[c s; -s c]` to columns `a` and `b` (a < b)
/// of a column-major matrix with `rows` rows.
fn rotate_cols(mat: &mut [C64], rows: usize, a: usize, b: usize, c: f64, s: f64) {
    debug_assert!(a < b);
    let (lo, hi) = mat.split_at_mut(b * rows);
    let ca = &mut lo[a * rows..(a + 1) * rows];
    let cb = &mut hi[..rows];
    for (x, y) in ca.iter_mut().zip(cb.iter_mut()) {
        let t = *x * c + *y * s;
        *y = *y * c - *x * s;
        *x = t;
    }
}

fn swap_cols(mat: &mut [C64], rows: usize, a: usize, b: usize) {
    if a == b {
        return;
    }
    let (a, b) = (a.min(b), a.max(b));
    let (lo, hi) = mat.split_at_mut(b * rows);
    lo[a * rows..(a + 1) * rows].swap_with_slice(&mut hi[..rows]);
}

struct Bidiagonal {
    /// Householder vectors below the diagonal and right of the superdiagonal.
    a: Vec<C64>,
    d: Vec<C64>,
    e: Vec<C64>,
    tau_l: Vec<f64>,
    tau_r: Vec<f64>,
}

/// Reduces a column-major `m × n` matrix (`m ≥ n`) to upper bidiagonal form
/// `A = Q_L B Q_Rᴴ`.
fn bidiagonalize(mut a: Vec<C64>, m: usize, n: usize) -> Bidiagonal {
    debug_assert!(m >= n && n >= 1);
    let idx = |i: usize, j: usize| i + j * m;

    let mut d = vec![ZERO; n];
    let mut e = vec![ZERO; n];
    let mut tau_l = vec![0.0; n];
    let mut tau_r = vec![0.0; n];
    let mut work = vec![ZERO; m];
    let mut row_v = vec![ZERO; n];

    for k in 0..n {
        // Left reflector annihilates A[k+1.., k].
        let (beta, tau) = householder(&mut a[idx(k, k)..idx(m, k)]);
        d[k] = beta;
        tau_l[k] = tau;
        if tau != 0.0 {
            let (head, tail) = a.split_at_mut(idx(0, k + 1));
            let v = &head[idx(k, k)..idx(m, k)];
            for j in 0..n - k - 1 {
                let col = &mut tail[j * m + k..j * m + m];
                let s: C64 = v.iter().zip(col.iter()).map(|(vi, ci)| vi.conj() * ci).sum();
                let s = s * tau;
                for (ci, vi) in col.iter_mut().zip(v) {
                    *ci -= vi * s;
                }
            }
        }

        // Right reflector annihilates A[k, k+2..].
        if k + 1 < n {
            let len = n - k - 1;
            for (jj, r) in row_v[..len].iter_mut().enumerate() {
                *r = a[idx(k, k + 1 + jj)].conj();
            }
            let (beta, tau) = householder(&mut row_v[..len]);
            e[k] = beta.conj();
            tau_r[k] = tau;
            for jj in 0..len {
                a[idx(k, k + 1 + jj)] = row_v[jj];
            }
            if tau != 0.0 && k + 1 < m {
                let w = &mut work[..m - k - 1];
                w.iter_mut().for_each(|x| *x = ZERO);
                for jj in 0..len {
                    let vj = row_v[jj];
                    let col = &a[idx(k + 1, k + 1 + jj)..idx(m, k + 1 + jj)];
                    for (wi, ci) in w.iter_mut().zip(col) {
                        *wi += ci * vj;
                    }
                }
                for jj in 0..len {
                    let s = row_v[jj].conj() * tau;
                    let col = &mut a[idx(k + 1, k + 1 + jj)..idx(m, k + 1 + jj)];
                    for (ci, wi) in col.iter_mut().zip(w.iter()) {
                        *ci -= wi * s;
                    }
                }
            }
        }
    }

    Bidiagonal {
        a,
        d,
        e,
        tau_l,
        tau_r,
    }
}

impl Bidiagonal {
    /// `Q_L[:, :n]`, column-major `m × n`.
    fn left_factor(&self, m: usize, n: usize) -> Vec<C64> {
        let a = &self.a;
        let idx = |i: usize, j: usize| i + j * m;
        // H_0 H_1 … H_{n-1} I[:, :n], accumulated backwards.
    let mut u = vec![ZERO; m * n];
    for j in 0..n {
        u[idx(j, j)] = ONE;
    }
    for k in (0..n).rev() {
        let tau = self.tau_l[k];
        if tau == 0.0 {
            continue;
        }
        let v = &a[idx(k, k)..idx(m, k)];
        for j in k..n {
            let col = &mut u[j * m + k..j * m + m];
            let s: C64 = v.iter().zip(col.iter()).map(|(vi, ci)| vi.conj() * ci).sum();
            let s = s * tau;
            for (ci, vi) in col.iter_mut().zip(v) {
                *ci -= vi * s;
            }
        }
    }

        u
    }

    /// `(Q_L[:, :n])ᴴ b` as a row `bᴴ Q_L[:, :n]` (conjugated), i.e. a
    /// one-row left factor that picks up the same column operations as `U`.
    fn project_left(&self, b: &[C64], m: usize, n: usize) -> Vec<C64> {
        let a = &self.a;
        let idx = |i: usize, j: usize| i + j * m;
        let mut y = b.to_vec();
        for k in 0..n {
            let tau = self.tau_l[k];
            if tau == 0.0 {
                continue;
            }
            let v = &a[idx(k, k)..idx(m, k)];
            let col = &mut y[k..m];
            let s: C64 = v.iter().zip(col.iter()).map(|(vi, ci)| vi.conj() * ci).sum();
            let s = s * tau;
            for (ci, vi) in col.iter_mut().zip(v) {
                *ci -= vi * s;
            }
        }
        y.truncate(n);
        y.iter().map(|z| z.conj()).collect()
    }

    /// `Q_R`, column-major `n × n`.
    fn right_factor(&self, m: usize, n: usize) -> Vec<C64> {
        let a = &self.a;
        let idx = |i: usize, j: usize| i + j * m;
        let mut row_v = vec![ZERO; n];
        // G_0 G_1 … I, with G_k acting on indices k+1...
    let mut v = vec![ZERO; n * n];
    for j in 0..n {
        v[j + j * n] = ONE;
    }
    for k in (0..n.saturating_sub(1)).rev() {
        let tau = self.tau_r[k];
        if tau == 0.0 {
            continue;
        }
        let len = n - k - 1;
        for jj in 0..len {
            row_v[jj] = a[idx(k, k + 1 + jj)];
        }
        for j in k + 1..n {
            let col = &mut v[j * n + k + 1..j * n + n];
            let s: C64 = row_v[..len]
                .iter()
                .zip(col.iter())
                .map(|(vi, ci)| vi.conj() * ci)
                .sum();
            let s = s * tau;
            for (ci, vi) in col.iter_mut().zip(&row_v[..len]) {
                *ci -= vi * s;
            }
        }
    }

        v
    }
}

/// Turns the bidiagonal into `σ` and rotates the columns of `u`
/// (`u_rows × n`) and `v` (`n × n`) into singular vectors, sorted by
/// non-increasing `σ`.
fn diagonalize(
    b: &Bidiagonal,
    mut u: Vec<C64>,
    u_rows: usize,
    mut v: Vec<C64>,
    n: usize,
) -> Result<(Vec<C64>, Vec<f64>, Vec<C64>)> {
    let (m, d, e) = (u_rows, &b.d, &b.e);
    // Make the bidiagonal real and non-negative: B' = D_Lᴴ B D_R.
    let mut s = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut p_right = ONE;
    for k in 0..n {
        let val = d[k] * p_right;
        let p_left = phase_of(val);
        s[k] = val.norm();
        for x in &mut u[k * m..(k + 1) * m] {
            *x *= p_left;
        }
        for x in &mut v[k * n..(k + 1) * n] {
            *x *= p_right;
        }
        if k + 1 < n {
            let val = p_left.conj() * e[k];
            p_right = phase_of(val).conj();
            sup[k] = val.norm();
        }
    }

    bidiagonal_qr(&mut s, &mut sup, &mut u, m, &mut v, n)?;

    // Final ordering; the QR loop already leaves σ nearly sorted.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    if order.iter().enumerate().any(|(i, &o)| i != o) {
        let su: Vec<f64> = order.iter().map(|&i| s[i]).collect();
        let mut uu = vec![ZERO; m * n];
        let mut vv = vec![ZERO; n * n];
        for (dst, &src) in order.iter().enumerate() {
            uu[dst * m..(dst + 1) * m].copy_from_slice(&u[src * m..(src + 1) * m]);
            vv[dst * n..(dst + 1) * n].copy_from_slice(&v[src * n..(src + 1) * n]);
        }
        return Ok((uu, su, vv));
    }
    Ok((u, s, v))
}

/// SVD of a column-major `m × n` matrix with `m ≥ n`. Returns column-major
/// `U` (m × n), `σ` (n), `V` (n × n).
fn svd_tall(a: Vec<C64>, m: usize, n: usize) -> Result<(Vec<C64>, Vec<f64>, Vec<C64>)> {
    let b = bidiagonalize(a, m, n);
    let u = b.left_factor(m, n);
    let v = b.right_factor(m, n);
    diagonalize(&b, u, m, v, n)
}

/// Singular values, right singular vectors and `Uᴴ b` of a tall matrix,
/// without forming `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdProjection {
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
    /// `u_iᴴ b` for every singular triple.
    pub uh_b: Vec<C64>,
}

impl SvdProjection {
    /// `x = Σ_{σ_i > τ} (u_iᴴ b / σ_i) v_i`.
    pub fn truncated_solve(&self, tau: f64) -> Result<TruncatedSolution> {
        if tau.is_nan() || tau < 0.0 {
            return Err(Error::invalid("tau", format!("{tau} must be non-negative")));
        }
        let rank = self.singular_values.iter().take_while(|&&s| s > tau).count();
        let coef: Vec<C64> = self.uh_b[..rank]
            .iter()
            .zip(&self.singular_values)
            .map(|(p, s)| p / s)
            .collect();
        let x = (0..self.v.rows())
            .map(|j| self.v.row(j)[..rank].iter().zip(&coef).map(|(v, c)| v * c).sum())
            .collect();
        Ok(TruncatedSolution { x, rank })
    }
}

/// SVD of `a` (rows ≥ cols) applied to a single right-hand side. Much cheaper
/// than [`svd`] for tall matrices since `U` is never accumulated.
pub fn svd_project(a: &ComplexMatrix, b: &[C64]) -> Result<SvdProjection> {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return Err(Error::invalid("matrix", "must have at least one row and column"));
    }
    if m < n {
        return Err(Error::invalid("matrix", format!("{m}x{n} is wider than tall")));
    }
    Error::check_len("right-hand side", m, b.len())?;
    if !a.is_finite() {
        return Err(Error::NonFinite("SVD input matrix"));
    }
    if b.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("right-hand side"));
    }
    let bd = bidiagonalize(a.to_col_major(), m, n);
    let y = bd.project_left(b, m, n);
    let v = bd.right_factor(m, n);
    let (y, s, v) = diagonalize(&bd, y, 1, v, n)?;
    Ok(SvdProjection {
        singular_values: s,
        v: ComplexMatrix::from_col_major(n, n, &v),
        uh_b: y.iter().map(|z| z.conj()).collect(),
    })
}

/// Diagonalizes the real upper bidiagonal `(s, e)` in place (`e[k]` couples
/// `k` and `k+1`; `e[n-1]` must be zero), rotating the columns of `u`
/// (`m` rows, any `m ≥ 1`) and `v` alongside.
fn bidiagonal_qr(
    s: &mut [f64],
    e: &mut [f64],
    u: &mut [C64],
    m: usize,
    v: &mut [C64],
    n: usize,
) -> Result<()> {
    // Total budget of inner rotation steps, as in LAPACK's bdsqr. Graded
    // matrices can need a few hundred sweeps before the first deflation.
    let mut budget = 6 * n * n + 100;
    let eps = f64::EPSILON;
    let tiny = 2f64.powi(-966);
    let mut p = n;
    let pp = n - 1;
    e[n - 1] = 0.0;

    while p > 0 {
        if budget == 0 {
            return Err(Error::Numerical(format!(
                "SVD did not converge for singular value {}",
                p - 1
            )));
        }
        // Find the largest unreduced block ending at p-1.
        let mut k = p as isize - 2;
        while k >= 0 {
            let ku = k as usize;
            if e[ku].abs() <= tiny + eps * (s[ku].abs() + s[ku + 1].abs()) {
                e[ku] = 0.0;
                break;
            }
            k -= 1;
        }
        let kase;
        if k == p as isize - 2 {
            kase = 4;
        } else {
            let mut ks = p as isize - 1;
            while ks > k {
                let ksu = ks as usize;
                let t = (if ksu != p { e[ksu].abs() } else { 0.0 })
                    + (if ks != k + 1 { e[ksu - 1].abs() } else { 0.0 });
                if s[ksu].abs() <= tiny + eps * t {
                    s[ksu] = 0.0;
                    break;
                }
                ks -= 1;
            }
            if ks == k {
                kase = 3;
            } else if ks == p as isize - 1 {
                kase = 1;
            } else {
                kase = 2;
                k = ks;
            }
        }
        let k = (k + 1) as usize;

        match kase {
            // s[p-1] negligible: chase e[p-2] out from the right.
            1 => {
                let mut f = e[p - 2];
                e[p - 2] = 0.0;
                let mut j = p - 2;
                loop {
                    let t = s[j].hypot(f);
                    let (cs, sn) = (s[j] / t, f / t);
                    s[j] = t;
                    if j != k {
                        f = -sn * e[j - 1];
                        e[j - 1] *= cs;
                    }
                    rotate_cols(v, n, j, p - 1, cs, sn);
                    if j == k {
                        break;
                    }
                    j -= 1;
                }
            }
            // s[k-1] negligible: split the block.
            2 => {
                let mut f = e[k - 1];
                e[k - 1] = 0.0;
                for j in k..p {
                    let t = s[j].hypot(f);
                    let (cs, sn) = (s[j] / t, f / t);
                    s[j] = t;
                    f = -sn * e[j];
                    e[j] *= cs;
                    // rotate_cols wants the lower index first.
                    rotate_cols(u, m, k - 1, j, cs, -sn);
                }
            }
            // One implicit-shift QR sweep on the block k..p.
            3 => {
                let scale = s[p - 1]
                    .abs()
                    .max(s[p - 2].abs())
                    .max(e[p - 2].abs())
                    .max(s[k].abs())
                    .max(e[k].abs());
                let sp = s[p - 1] / scale;
                let spm1 = s[p - 2] / scale;
                let epm1 = e[p - 2] / scale;
                let sk = s[k] / scale;
                let ek = e[k] / scale;
                let b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / 2.0;
                let c = (sp * epm1) * (sp * epm1);
                let mut shift = 0.0;
                if b != 0.0 || c != 0.0 {
                    shift = (b * b + c).sqrt();
                    if b < 0.0 {
                        shift = -shift;
                    }
                    shift = c / (b + shift);
                }
                let mut f = (sk + sp) * (sk - sp) + shift;
                let mut g = sk * ek;
                for j in k..p - 1 {
                    let t = f.hypot(g);
                    let (cs, sn) = (f / t, g / t);
                    if j != k {
                        e[j - 1] = t;
                    }
                    f = cs * s[j] + sn * e[j];
                    e[j] = cs * e[j] - sn * s[j];
                    g = sn * s[j + 1];
                    s[j + 1] *= cs;
                    rotate_cols(v, n, j, j + 1, cs, sn);

                    let t = f.hypot(g);
                    let (cs, sn) = (f / t, g / t);
                    s[j] = t;
                    f = cs * e[j] + sn * s[j + 1];
                    s[j + 1] = -sn * e[j] + cs * s[j + 1];
                    g = sn * e[j + 1];
                    e[j + 1] *= cs;
                    rotate_cols(u, m, j, j + 1, cs, sn);
                }
                e[p - 2] = f;
                budget = budget.saturating_sub(p - 1 - k);
            }
            // Converged: make s[k] non-negative and bubble it into place.
            _ => {
                let mut k = k;
                if s[k] <= 0.0 {
                    s[k] = if s[k] < 0.0 { -s[k] } else { 0.0 };
                    for x in &mut v[k * n..(k + 1) * n] {
                        *x = -*x;
                    }
                }
                while k < pp {
                    if s[k] >= s[k + 1] {
                        break;
                    }
                    s.swap(k, k + 1);
                    swap_cols(v, n, k, k + 1);
                    swap_cols(u, m, k, k + 1);
                    k += 1;
                }
                p -= 1;
            }
        }
    }
    Ok(())
}
