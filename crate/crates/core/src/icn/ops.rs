//! The elementary operation catalog of the four network layers.

use super::EvalContext;

/// Magnitude ceiling for every intermediate value; larger results saturate.
pub const CEILING: i64 = i32::MAX as i64;

pub(crate) fn clamp(v: i64) -> (i64, bool) {
    if v > CEILING {
        (CEILING, true)
    } else if v < -CEILING {
        (-CEILING, true)
    } else {
        (v, false)
    }
}

/// Element-wise transformations, each mapping `(x, i)` to one integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transformation {
    Identity,
    CountEqRight,
    CountEqLeft,
    CountEq,
    CountLtRight,
    CountGtRight,
    CountLtLeft,
    CountGtLeft,
    MaxNext,
    MinNext,
    DropNext,
    DropPrev,
    BelowParam,
    AboveParam,
    CountNearRight,
    CountNear,
    EqParam,
    LtParam,
}

impl Transformation {
    pub const ALL: [Transformation; 18] = [
        Transformation::Identity,
        Transformation::CountEqRight,
        Transformation::CountEqLeft,
        Transformation::CountEq,
        Transformation::CountLtRight,
        Transformation::CountGtRight,
        Transformation::CountLtLeft,
        Transformation::CountGtLeft,
        Transformation::MaxNext,
        Transformation::MinNext,
        Transformation::DropNext,
        Transformation::DropPrev,
        Transformation::BelowParam,
        Transformation::AboveParam,
        Transformation::CountNearRight,
        Transformation::CountNear,
        Transformation::EqParam,
        Transformation::LtParam,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Transformation::Identity => "identity",
            Transformation::CountEqRight => "count_eq_right",
            Transformation::CountEqLeft => "count_eq_left",
            Transformation::CountEq => "count_eq",
            Transformation::CountLtRight => "count_lt_right",
            Transformation::CountGtRight => "count_gt_right",
            Transformation::CountLtLeft => "count_lt_left",
            Transformation::CountGtLeft => "count_gt_left",
            Transformation::MaxNext => "max_next",
            Transformation::MinNext => "min_next",
            Transformation::DropNext => "drop_next",
            Transformation::DropPrev => "drop_prev",
            Transformation::BelowParam => "below_p",
            Transformation::AboveParam => "above_p",
            Transformation::CountNearRight => "count_near_right",
            Transformation::CountNear => "count_near",
            Transformation::EqParam => "eq_p",
            Transformation::LtParam => "lt_p",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }

    /// Writes the transformed vector of `x` into `out` (same length).
    pub fn apply(self, x: &[i64], ctx: &EvalContext, out: &mut [i64]) {
        use Transformation::*;
        let n = x.len();
        let p = ctx.p;
        let count = |i: usize, range: std::ops::Range<usize>, pred: &dyn Fn(i64, i64) -> bool| {
            x[range].iter().filter(|&&xj| pred(xj, x[i])).count() as i64
        };
        for i in 0..n {
            let xi = x[i];
            out[i] = match self {
                Identity => xi,
                CountEqRight => count(i, i + 1..n, &|xj, xi| xj == xi),
                CountEqLeft => count(i, 0..i, &|xj, xi| xj == xi),
                CountEq => {
                    count(i, 0..i, &|xj, xi| xj == xi) + count(i, i + 1..n, &|xj, xi| xj == xi)
                }
                CountLtRight => count(i, i + 1..n, &|xj, xi| xj < xi),
                CountGtRight => count(i, i + 1..n, &|xj, xi| xj > xi),
                CountLtLeft => count(i, 0..i, &|xj, xi| xj < xi),
                CountGtLeft => count(i, 0..i, &|xj, xi| xj > xi),
                MaxNext => x.get(i + 1).map_or(xi, |&next| xi.max(next)),
                MinNext => x.get(i + 1).map_or(xi, |&next| xi.min(next)),
                DropNext => x.get(i + 1).map_or(0, |&next| (xi - next).max(0)),
                DropPrev => {
                    if i == 0 {
                        0
                    } else {
                        (x[i - 1] - xi).max(0)
                    }
                }
                BelowParam => (p - xi).max(0),
                AboveParam => (xi - p).max(0),
                CountNearRight => count(i, i + 1..n, &|xj, xi| (xj - xi).abs() < p),
                CountNear => {
                    count(i, 0..i, &|xj, xi| (xj - xi).abs() < p)
                        + count(i, i + 1..n, &|xj, xi| (xj - xi).abs() < p)
                }
                EqParam => i64::from(xi == p),
                LtParam => i64::from(xi < p),
            };
        }
    }
}

/// Component-wise combination of the selected transformation outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arithmetic {
    Add,
    Mul,
}

impl Arithmetic {
    pub const ALL: [Arithmetic; 2] = [Arithmetic::Add, Arithmetic::Mul];

    pub fn symbol(self) -> &'static str {
        match self {
            Arithmetic::Add => "+",
            Arithmetic::Mul => "*",
        }
    }

    /// `acc[i] = acc[i] (op) v[i]`, saturating; returns whether anything saturated.
    pub fn fold_into(self, acc: &mut [i64], v: &[i64]) -> bool {
        let mut saturated = false;
        for (a, b) in acc.iter_mut().zip(v) {
            let (r, s) = clamp(match self {
                Arithmetic::Add => *a + *b,
                Arithmetic::Mul => *a * *b,
            });
            *a = r;
            saturated |= s;
        }
        saturated
    }
}

/// Reduction of the combined vector to one integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregation {
    Sum,
    CountPositive,
}

impl Aggregation {
    pub const ALL: [Aggregation; 2] = [Aggregation::Sum, Aggregation::CountPositive];

    pub fn name(self) -> &'static str {
        match self {
            Aggregation::Sum => "Sum",
            Aggregation::CountPositive => "Count>0",
        }
    }

    pub fn apply(self, v: &[i64]) -> (i64, bool) {
        match self {
            Aggregation::Sum => clamp(v.iter().sum()),
            Aggregation::CountPositive => (v.iter().filter(|x| **x > 0).count() as i64, false),
        }
    }
}

/// Final comparison of the aggregated scalar with `n`, `d` or `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Identity,
    DistParam,
    EuclidParam,
    DistVars,
    DistDomain,
    ExcessParam,
    DeficitParam,
    NonZero,
    EuclidDomain,
}

impl Comparison {
    pub const ALL: [Comparison; 9] = [
        Comparison::Identity,
        Comparison::DistParam,
        Comparison::EuclidParam,
        Comparison::DistVars,
        Comparison::DistDomain,
        Comparison::ExcessParam,
        Comparison::DeficitParam,
        Comparison::NonZero,
        Comparison::EuclidDomain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Comparison::Identity => "Identity",
            Comparison::DistParam => "Abs_p",
            Comparison::EuclidParam => "Euclid_p",
            Comparison::DistVars => "Abs_n",
            Comparison::DistDomain => "Abs_d",
            Comparison::ExcessParam => "Excess_p",
            Comparison::DeficitParam => "Deficit_p",
            Comparison::NonZero => "NonZero",
            Comparison::EuclidDomain => "Euclid_d",
        }
    }

    pub fn apply(self, y: i64, ctx: &EvalContext) -> u64 {
        let d = ctx.d as i64;
        let ceil_div = |a: i64| (a + d - 1) / d;
        let r = match self {
            Comparison::Identity => y.abs(),
            Comparison::DistParam => (y - ctx.p).abs(),
            Comparison::EuclidParam => ceil_div((y - ctx.p).abs()),
            Comparison::DistVars => (y - ctx.n as i64).abs(),
            Comparison::DistDomain => (y - d).abs(),
            Comparison::ExcessParam => (y - ctx.p).max(0),
            Comparison::DeficitParam => (ctx.p - y).max(0),
            Comparison::NonZero => i64::from(y != 0),
            Comparison::EuclidDomain => ceil_div(y.abs()),
        };
        r as u64
    }
}
