//! Binary quadratic forms `a x² + b xy + c y²` attached to 2×2 matrices.
//!
//! Two constructions matter: `det(u | A u)` vanishes exactly on the real
//! eigenlines of `A`, and `det(B u | B' u)` vanishes where `B u` and `B' u`
//! are parallel. Common real projective roots of a family of such forms
//! decide reducibility and spannability in the plane.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{Num, Signed, Zero};

use super::exact::to_f64;

/// Coefficients `[a, b, c]` of `a x² + b xy + c y²`.
pub type Form<T> = [T; 3];

/// `det(u | A u)` for row-major `A = [[p, q], [r, s]]`: `r x² + (s − p) xy − q y²`.
pub fn eigen_form<T: Num + Clone>(a: &[T]) -> Form<T> {
    let (p, q, r, s) = (a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone());
    [r, s - p, T::zero() - q]
}

/// `det(B u | B' u)` for row-major `B = [[a, b], [c, d]]`, `B' = [[e, f], [g, h]]`.
pub fn pair_form<T: Num + Clone>(m: &[T], n: &[T]) -> Form<T> {
    let (a, b, c, d) = (&m[0], &m[1], &m[2], &m[3]);
    let (e, f, g, h) = (&n[0], &n[1], &n[2], &n[3]);
    let m = |x: &T, y: &T| x.clone() * y.clone();
    [
        m(a, g) - m(c, e),
        m(a, h) + m(b, g) - m(c, f) - m(d, e),
        m(b, h) - m(d, f),
    ]
}

pub fn eval(form: &Form<f64>, u: [f64; 2]) -> f64 {
    form[0] * u[0] * u[0] + form[1] * u[0] * u[1] + form[2] * u[1] * u[1]
}

/// Largest value of `|form|` on the unit circle.
pub fn circle_sup(form: &Form<f64>) -> f64 {
    let s = Sinusoid::of(form);
    s.alpha.abs() + s.beta.hypot(s.gamma)
}

/// A common real projective root of rational forms, decided exactly.
///
/// Returns a unit direction, or `None` when the forms share no real root.
/// When every form vanishes at `e₁` that direction is returned first.
pub fn exact_common_root(forms: &[Form<BigRational>]) -> Option<[f64; 2]> {
    let live: Vec<&Form<BigRational>> =
        forms.iter().filter(|f| f.iter().any(|c| !c.is_zero())).collect();
    if live.iter().all(|f| f[0].is_zero()) {
        return Some([1.0, 0.0]);
    }
    // Roots away from e₁ have y ≠ 0; set y = 1 and take the gcd in ℚ[x].
    let mut g: Vec<BigRational> = Vec::new();
    for f in &live {
        let p = trim(vec![f[2].clone(), f[1].clone(), f[0].clone()]);
        g = if g.is_empty() { p } else { poly_gcd(g, p) };
        if g.len() == 1 {
            return None;
        }
    }
    let x = match g.len() {
        2 => to_f64(&(-(&g[0]) / &g[1])),
        3 => {
            let disc = &g[1] * &g[1] - BigRational::from_integer(4.into()) * &g[2] * &g[0];
            if disc.is_negative() {
                return None;
            }
            (-to_f64(&g[1]) + to_f64(&disc).sqrt()) / (2.0 * to_f64(&g[2]))
        }
        _ => return None,
    };
    let n = x.hypot(1.0);
    Some([x / n, 1.0 / n])
}

/// Coefficients low-to-high with trailing zeros removed (zero poly is empty).
fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_rem(mut a: Vec<BigRational>, b: &[BigRational]) -> Vec<BigRational> {
    let lead = b.last().expect("nonzero divisor").clone();
    while a.len() >= b.len() {
        let shift = a.len() - b.len();
        let q = a.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            let t = &q * bc;
            a[i + shift] -= t;
        }
        a.pop();
        a = trim(a);
    }
    a
}

/// Monic gcd; a nonzero constant comes back as `[1]`.
fn poly_gcd(a: Vec<BigRational>, b: Vec<BigRational>) -> Vec<BigRational> {
    let (mut a, mut b) = (trim(a), trim(b));
    if a.is_empty() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = poly_rem(a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        a.iter_mut().for_each(|c| *c /= &lead);
    }
    a
}

/// `α + β cos 2θ + γ sin 2θ`, the restriction of a form to `u = (cos θ, sin θ)`.
#[derive(Clone, Copy, Debug)]
struct Sinusoid {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl Sinusoid {
    fn of(f: &Form<f64>) -> Self {
        Sinusoid { alpha: 0.5 * (f[0] + f[2]), beta: 0.5 * (f[0] - f[2]), gamma: 0.5 * f[1] }
    }

    fn at(&self, theta: f64) -> f64 {
        self.alpha + self.beta * (2.0 * theta).cos() + self.gamma * (2.0 * theta).sin()
    }

    fn combine(&self, other: &Sinusoid, sign: f64) -> Sinusoid {
        Sinusoid {
            alpha: self.alpha + sign * other.alpha,
            beta: self.beta + sign * other.beta,
            gamma: self.gamma + sign * other.gamma,
        }
    }

    /// Critical points, plus zeros when they exist (tangent zeros included up to rounding).
    fn push_candidates(&self, out: &mut Vec<f64>) {
        let rho = self.beta.hypot(self.gamma);
        if rho == 0.0 {
            return;
        }
        let phi = self.gamma.atan2(self.beta);
        out.push(0.5 * phi);
        out.push(0.5 * (phi + PI));
        let ratio = -self.alpha / rho;
        if ratio.abs() <= 1.0 + 1e-12 {
            let w = ratio.clamp(-1.0, 1.0).acos();
            out.push(0.5 * (phi + w));
            out.push(0.5 * (phi - w));
        }
    }
}

/// `min_{|u|=1} max_i |form_i(u)|` and a minimizing angle, computed exactly up to rounding.
///
/// The minimum of a maximum of rectified sinusoids sits at a critical point or zero
/// of one of them, or where two of them cross; all those angles are enumerated.
pub fn circle_margin(forms: &[Form<f64>]) -> (f64, f64) {
    let sins: Vec<Sinusoid> = forms.iter().map(Sinusoid::of).collect();
    let mut cands = vec![0.0];
    for (i, s) in sins.iter().enumerate() {
        s.push_candidates(&mut cands);
        for t in &sins[i + 1..] {
            s.combine(t, 1.0).push_candidates(&mut cands);
            s.combine(t, -1.0).push_candidates(&mut cands);
        }
    }
    let mut best = (f64::INFINITY, 0.0);
    for &c in &cands {
        let theta = c.rem_euclid(PI);
        let v = sins.iter().map(|s| s.at(theta).abs()).fold(0.0, f64::max);
        if v < best.0 {
            best = (v, theta);
        }
    }
    if sins.is_empty() {
        best.0 = 0.0;
    }
    best
}

/// Float decision of a common real root: forms are scaled to unit sup on the circle and
/// a root is reported when the margin is at most `tol`.
pub fn float_common_root(forms: &[Form<f64>], tol: f64) -> (Option<[f64; 2]>, f64) {
    let scaled: Vec<Form<f64>> = forms
        .iter()
        .filter_map(|f| {
            let s = circle_sup(f);
            (s > 0.0).then(|| [f[0] / s, f[1] / s, f[2] / s])
        })
        .collect();
    if scaled.is_empty() {
        return (Some([1.0, 0.0]), 0.0);
    }
    let (m, theta) = circle_margin(&scaled);
    let root = (m <= tol).then(|| [theta.cos(), theta.sin()]);
    (root, m)
}
