//! Dense kernels applied to a single Fourier slice.
//!
//! The DC slice (and the Nyquist slice for even depth) of a real tensor's
//! spectrum is real. Those slices are factored in real arithmetic so their
//! factors stay exactly real and the inverse transform stays exactly real.

use nalgebra::{ComplexField, DMatrix};

use crate::fourier::{CMat, C64};

pub(crate) trait Scalar: ComplexField<RealField = f64> + Copy {
    fn from_c(z: C64) -> Self;
    fn to_c(self) -> C64;
}

impl Scalar for f64 {
    fn from_c(z: C64) -> Self {
        z.re
    }
    fn to_c(self) -> C64 {
        C64::new(self, 0.0)
    }
}

impl Scalar for C64 {
    fn from_c(z: C64) -> Self {
        z
    }
    fn to_c(self) -> C64 {
        self
    }
}

/// True for the stored slices whose spectrum values are real.
pub(crate) fn is_real_slice(f: usize, n3: usize) -> bool {
    f == 0 || (n3.is_multiple_of(2) && f == n3 / 2)
}

fn down<T: Scalar>(a: &CMat) -> DMatrix<T> {
    a.map(T::from_c)
}

fn up<T: Scalar>(a: DMatrix<T>) -> CMat {
    a.map(T::to_c)
}

pub(crate) fn cutoff(m: usize, n: usize, largest: f64) -> f64 {
    m.max(n) as f64 * f64::EPSILON * largest
}

macro_rules! dispatch {
    ($real:expr, $f:ident ( $($arg:expr),* )) => {
        if $real { $f::<f64>($($arg),*) } else { $f::<C64>($($arg),*) }
    };
}

/// Thin QR: `Q` is `m x min(m,n)` with orthonormal columns, `R` is
/// `min(m,n) x n` upper triangular.
pub(crate) fn qr(a: &CMat, real: bool) -> (CMat, CMat) {
    dispatch!(real, qr_g(a))
}

fn qr_g<T: Scalar>(a: &CMat) -> (CMat, CMat) {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        let k = m.min(n);
        return (CMat::zeros(m, k), CMat::zeros(k, n));
    }
    let f = down::<T>(a).qr();
    (up(f.q()), up(f.r()))
}

pub(crate) struct SliceSvd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

/// Economic SVD with singular values in nonincreasing order.
///
/// Computed with faer: nalgebra's SVD iteration loses accuracy on some
/// rank-deficient inputs.
pub(crate) fn svd(a: &CMat, real: bool) -> SliceSvd {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return SliceSvd {
            u: CMat::zeros(m, 0),
            s: Vec::new(),
            v: CMat::zeros(n, 0),
        };
    }
    macro_rules! run {
        ($to:expr, $back:expr, $re:expr) => {{
            let f = faer::Mat::from_fn(m, n, |i, j| $to(a[(i, j)]))
                .thin_svd()
                .expect("SVD iteration did not converge");
            let (u, v, s) = (f.U(), f.V(), f.S().column_vector());
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&i, &j| $re(s[j]).total_cmp(&$re(s[i])));
            SliceSvd {
                u: CMat::from_fn(m, k, |i, j| $back(u[(i, order[j])])),
                s: order.iter().map(|&j| $re(s[j])).collect(),
                v: CMat::from_fn(n, k, |i, j| $back(v[(i, order[j])])),
            }
        }};
    }
    if real {
        run!(|z: C64| z.re, |x: f64| C64::new(x, 0.0), |x: f64| x)
    } else {
        run!(
            |z: C64| faer::c64::new(z.re, z.im),
            |z: faer::c64| C64::new(z.re, z.im),
            |z: faer::c64| z.re
        )
    }
}

/// Pivoted LU with the row permutation folded into `L`, so `A = L U`.
/// The flag reports an exactly zero pivot.
pub(crate) fn lu(a: &CMat, real: bool) -> (CMat, CMat, bool) {
    dispatch!(real, lu_g(a))
}

fn lu_g<T: Scalar>(a: &CMat) -> (CMat, CMat, bool) {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return (CMat::zeros(m, k), CMat::zeros(k, n), false);
    }
    let (p, mut l, u) = down::<T>(a).lu().unpack();
    p.inv_permute_rows(&mut l);
    let singular = (0..k).any(|i| u[(i, i)].is_zero());
    (up(l), up(u), singular)
}

/// Hermitian eigendecomposition of the Hermitian part of `a`, eigenvalues
/// ascending.
pub(crate) fn eigh(a: &CMat, real: bool) -> (CMat, Vec<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (CMat::zeros(0, 0), Vec::new());
    }
    let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
    macro_rules! run {
        ($to:expr, $back:expr, $re:expr) => {{
            let f = faer::Mat::from_fn(n, n, |i, j| $to(h[(i, j)]))
                .self_adjoint_eigen(faer::Side::Lower)
                .expect("eigenvalue iteration did not converge");
            let (v, d) = (f.U(), f.S().column_vector());
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| $re(d[i]).total_cmp(&$re(d[j])));
            let vals = order.iter().map(|&j| $re(d[j])).collect();
            (CMat::from_fn(n, n, |i, j| $back(v[(i, order[j])])), vals)
        }};
    }
    if real {
        run!(|z: C64| z.re, |x: f64| C64::new(x, 0.0), |x: f64| x)
    } else {
        run!(
            |z: C64| faer::c64::new(z.re, z.im),
            |z: faer::c64| C64::new(z.re, z.im),
            |z: faer::c64| z.re
        )
    }
}

/// Moore–Penrose pseudoinverse with singular values at or below
/// `max(m,n)·eps·σmax` treated as zero.
pub(crate) fn pinv(a: &CMat, real: bool) -> CMat {
    let (m, n) = a.shape();
    let f = svd(a, real);
    let top = f.s.first().copied().unwrap_or(0.0);
    let tol = cutoff(m, n, top);
    let mut vs = f.v.clone();
    let mut kept = 0;
    for (j, &s) in f.s.iter().enumerate() {
        if s > tol {
            for z in vs.column_mut(j).iter_mut() {
                *z *= 1.0 / s;
            }
            kept += 1;
        }
    }
    if kept == 0 {
        return CMat::zeros(n, m);
    }
    crate::fourier::cmul(&vs.columns(0, kept).into_owned(), &f.u.columns(0, kept).adjoint())
}

/// 2-norm condition number; infinite for a zero smallest singular value.
pub(crate) fn cond(a: &CMat, real: bool) -> f64 {
    let s = svd(a, real).s;
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

pub(crate) fn inverse(a: &CMat, real: bool) -> Option<CMat> {
    if real {
        down::<f64>(a).try_inverse().map(up)
    } else {
        a.clone().try_inverse()
    }
}
