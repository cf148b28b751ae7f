//! Adaptive Gauss–Kronrod quadrature, generic over the real scalar type.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::Debug;

pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {}
impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {}

fn c<T: Real>(x: f64) -> T {
    T::from_f64(x).unwrap()
}

/// Values that can be integrated: a vector space with a norm.
pub trait Accumulate<T: Real>: Clone {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, w: T, x: &Self);
    fn norm(&self) -> T;
    fn dist(&self, other: &Self) -> T;
}

macro_rules! real_accumulate {
    ($t:ty) => {
        impl Accumulate<$t> for $t {
            fn zero_like(&self) -> Self {
                0.0
            }
            fn add_scaled(&mut self, w: $t, x: &Self) {
                *self += w * x;
            }
            fn norm(&self) -> $t {
                self.abs()
            }
            fn dist(&self, other: &Self) -> $t {
                (self - other).abs()
            }
        }
    };
}
real_accumulate!(f32);
real_accumulate!(f64);

impl<T: Real> Accumulate<T> for Complex<T> {
    fn zero_like(&self) -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn add_scaled(&mut self, w: T, x: &Self) {
        self.re = self.re + w * x.re;
        self.im = self.im + w * x.im;
    }
    fn norm(&self) -> T {
        self.re.hypot(self.im)
    }
    fn dist(&self, other: &Self) -> T {
        (self.re - other.re).hypot(self.im - other.im)
    }
}

impl<T: Real> Accumulate<T> for Vec<Complex<T>> {
    fn zero_like(&self) -> Self {
        vec![Complex::new(T::zero(), T::zero()); self.len()]
    }
    fn add_scaled(&mut self, w: T, x: &Self) {
        for (a, b) in self.iter_mut().zip(x) {
            a.add_scaled(w, b);
        }
    }
    fn norm(&self) -> T {
        self.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }
    fn dist(&self, other: &Self) -> T {
        self.iter()
            .zip(other)
            .fold(T::zero(), |m, (a, b)| m.max(a.dist(b)))
    }
}

impl<T: Real, const N: usize> Accumulate<T> for [T; N] {
    fn zero_like(&self) -> Self {
        [T::zero(); N]
    }
    fn add_scaled(&mut self, w: T, x: &Self) {
        for (a, b) in self.iter_mut().zip(x) {
            *a = *a + w * *b;
        }
    }
    fn norm(&self) -> T {
        self.iter().fold(T::zero(), |m, z| m.max(z.abs()))
    }
    fn dist(&self, other: &Self) -> T {
        self.iter()
            .zip(other)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GkRule {
    G7K15,
    G10K21,
}

const XGK15: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK15: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG7: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
const XGK21: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK21: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208983463283,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG10: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

impl GkRule {
    fn tables(self) -> (&'static [f64], &'static [f64], &'static [f64]) {
        match self {
            GkRule::G7K15 => (&XGK15, &WGK15, &WG7),
            GkRule::G10K21 => (&XGK21, &WGK21, &WG10),
        }
    }

    pub fn points(self) -> usize {
        match self {
            GkRule::G7K15 => 15,
            GkRule::G10K21 => 21,
        }
    }

    /// One Kronrod panel on [a, b]: (estimate, error estimate).
    pub fn apply<T: Real, V: Accumulate<T>, F: FnMut(T) -> V>(
        self,
        f: &mut F,
        a: T,
        b: T,
    ) -> (V, T) {
        let (xk, wk, wg) = self.tables();
        let n = xk.len();
        let center_gauss = n % 2 == 0;
        let half = (b - a) * c::<T>(0.5);
        let mid = (a + b) * c::<T>(0.5);
        let fc = f(mid);
        let mut resk = fc.zero_like();
        resk.add_scaled(c(wk[n - 1]), &fc);
        let mut resg = fc.zero_like();
        if center_gauss {
            resg.add_scaled(c(wg[wg.len() - 1]), &fc);
        }
        let mut resabs = c::<T>(wk[n - 1]) * fc.norm();
        let mut vals = Vec::with_capacity(2 * n - 2);
        for i in 0..n - 1 {
            let x = half * c(xk[i]);
            let f1 = f(mid - x);
            let f2 = f(mid + x);
            resabs = resabs + c::<T>(wk[i]) * (f1.norm() + f2.norm());
            resk.add_scaled(c(wk[i]), &f1);
            resk.add_scaled(c(wk[i]), &f2);
            if i % 2 == 1 {
                resg.add_scaled(c(wg[i / 2]), &f1);
                resg.add_scaled(c(wg[i / 2]), &f2);
            }
            vals.push((i, f1, f2));
        }
        let mut reskh = resk.zero_like();
        reskh.add_scaled(c(0.5), &resk);
        let mut resasc = c::<T>(wk[n - 1]) * fc.dist(&reskh);
        for (i, f1, f2) in &vals {
            resasc = resasc + c::<T>(wk[*i]) * (f1.dist(&reskh) + f2.dist(&reskh));
        }
        let ah = half.abs();
        let mut err = resk.dist(&resg) * ah;
        let resasc = resasc * ah;
        let resabs = resabs * ah;
        if resasc > T::zero() && err > T::zero() {
            let r = (c::<T>(200.0) * err / resasc).powf(c(1.5));
            err = resasc * r.min(T::one());
        }
        let tiny = T::epsilon() * c(50.0) * resabs;
        if tiny > err {
            err = tiny;
        }
        let mut out = resk.zero_like();
        out.add_scaled(half, &resk);
        (out, err)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
    pub rule: GkRule,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        QuadOptions {
            abs_tol: c(1e-10),
            rel_tol: c(1e-10),
            max_subdivisions: 2000,
            rule: GkRule::G7K15,
        }
    }
}

impl<T: Real> QuadOptions<T> {
    pub fn tol(abs_tol: T, rel_tol: T) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadOutput<T, V> {
    pub value: V,
    pub error: T,
    pub evals: usize,
    pub converged: bool,
}

struct Segment<T, V> {
    a: T,
    b: T,
    value: V,
    error: T,
    splittable: bool,
}

/// Globally adaptive integration of `f` over [a, b].
pub fn integrate<T: Real, V: Accumulate<T>, F: FnMut(T) -> V>(
    f: F,
    a: T,
    b: T,
    opts: &QuadOptions<T>,
) -> QuadOutput<T, V> {
    integrate_breaks(f, &[a, b], opts)
}

/// Adaptive integration with an initial partition at the given ordered breakpoints.
pub fn integrate_breaks<T: Real, V: Accumulate<T>, F: FnMut(T) -> V>(
    mut f: F,
    breaks: &[T],
    opts: &QuadOptions<T>,
) -> QuadOutput<T, V> {
    assert!(breaks.len() >= 2, "need at least one interval");
    let rule = opts.rule;
    let mut segs: Vec<Segment<T, V>> = Vec::with_capacity(breaks.len() * 2);
    let mut evals = 0usize;
    for w in breaks.windows(2) {
        let (v, e) = rule.apply(&mut f, w[0], w[1]);
        evals += rule.points();
        segs.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
            splittable: true,
        });
    }
    let limit = opts.max_subdivisions.max(segs.len());
    let span = (breaks[breaks.len() - 1] - breaks[0]).abs();
    loop {
        let total = sum_segments(&segs);
        let err: T = segs.iter().fold(T::zero(), |s, g| s + g.error);
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= target {
            return QuadOutput {
                value: total,
                error: err,
                evals,
                converged: true,
            };
        }
        let pick = segs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.splittable)
            .max_by(|x, y| {
                x.1.error
                    .partial_cmp(&y.1.error)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(y.0.cmp(&x.0))
            })
            .map(|(i, _)| i);
        let Some(i) = pick else {
            return QuadOutput {
                value: total,
                error: err,
                evals,
                converged: false,
            };
        };
        if segs.len() >= limit {
            return QuadOutput {
                value: total,
                error: err,
                evals,
                converged: false,
            };
        }
        let (a, b) = (segs[i].a, segs[i].b);
        let m = (a + b) * c::<T>(0.5);
        if (b - a).abs() <= span * c::<T>(1e-13) || m <= a.min(b) || m >= a.max(b) {
            segs[i].splittable = false;
            continue;
        }
        let (v1, e1) = rule.apply(&mut f, a, m);
        let (v2, e2) = rule.apply(&mut f, m, b);
        evals += 2 * rule.points();
        segs[i] = Segment {
            a,
            b: m,
            value: v1,
            error: e1,
            splittable: true,
        };
        segs.push(Segment {
            a: m,
            b,
            value: v2,
            error: e2,
            splittable: true,
        });
    }
}

fn sum_segments<T: Real, V: Accumulate<T>>(segs: &[Segment<T, V>]) -> V {
    let mut order: Vec<usize> = (0..segs.len()).collect();
    order.sort_by(|&i, &j| {
        segs[i]
            .a
            .partial_cmp(&segs[j].a)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut acc = segs[0].value.zero_like();
    for i in order {
        acc.add_scaled(T::one(), &segs[i].value);
    }
    acc
}

/// Splits [a, b] into panels no longer than `panel`, then integrates adaptively.
pub fn integrate_panels<T: Real, V: Accumulate<T>, F: FnMut(T) -> V>(
    f: F,
    a: T,
    b: T,
    panel: T,
    opts: &QuadOptions<T>,
) -> QuadOutput<T, V> {
    let len = (b - a).abs();
    let n = if panel > T::zero() && len > T::zero() {
        (len / panel).ceil().to_usize().unwrap_or(1).clamp(1, 200_000)
    } else {
        1
    };
    let breaks: Vec<T> = (0..=n)
        .map(|k| {
            if k == n {
                b
            } else {
                a + (b - a) * T::from_usize(k).unwrap() / T::from_usize(n).unwrap()
            }
        })
        .collect();
    let mut o = *opts;
    o.max_subdivisions = o.max_subdivisions.max(4 * n);
    integrate_breaks(f, &breaks, &o)
}
