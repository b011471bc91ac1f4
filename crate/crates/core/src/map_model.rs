//! Interval maps: piecewise linear Markov maps and smooth full-branch maps.
//!
//! A [`PiecewiseLinearMarkovMap`] stores its partition breakpoints once; the
//! branch domains are the consecutive breakpoint pairs, so the partition can
//! never have gaps. A breakpoint belongs to the branch on its right, except
//! the right end of the domain which belongs to the last branch.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Absolute tolerance for matching branch image endpoints to breakpoints.
pub const DEFAULT_ALIGNMENT_TOL: f64 = 1e-9;

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::InvalidArgument("interval needs finite lo < hi"))
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Point at relative position `t ∈ [0,1]`.
    pub fn lerp(&self, t: f64) -> f64 {
        self.lo + t * (self.hi - self.lo)
    }
}

/// `x ↦ slope·x + intercept` on `domain`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineBranch {
    pub slope: f64,
    pub intercept: f64,
    pub domain: Interval,
}

impl AffineBranch {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// Image of the branch domain as `(lo, hi)`.
    pub fn image(&self) -> (f64, f64) {
        let a = self.eval(self.domain.lo);
        let b = self.eval(self.domain.hi);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// Topological transition matrix: `entry(k, l)` iff `int(I_l) ⊆ f(int(I_k))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    n: usize,
    entries: Vec<bool>,
    mixing_power: Option<usize>,
}

impl TransitionMatrix {
    /// Builds the matrix from row-major 0/1 entries and determines the
    /// smallest mixing power (if any).
    pub fn from_entries(n: usize, entries: Vec<bool>) -> Self {
        assert_eq!(entries.len(), n * n, "transition matrix must be square");
        let mut a = TransitionMatrix { n, entries, mixing_power: None };
        a.mixing_power = is_topologically_mixing(&a, wielandt_bound(n));
        a
    }

    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let n = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), n);
                r.iter().map(|&v| v != 0)
            })
            .collect();
        Self::from_entries(n, entries)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> bool {
        self.entries[k * self.n + l]
    }

    /// Entry as `0.0`/`1.0`.
    #[inline]
    pub fn value(&self, k: usize, l: usize) -> f64 {
        if self.get(k, l) {
            1.0
        } else {
            0.0
        }
    }

    /// Smallest `p` with `A^p` entrywise positive, if the matrix is primitive.
    pub fn mixing_power(&self) -> Option<usize> {
        self.mixing_power
    }

    pub fn is_mixing(&self) -> bool {
        self.mixing_power.is_some()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[bool]> {
        self.entries.chunks(self.n.max(1))
    }
}

/// Upper bound `(n-1)² + 1` on the exponent of a primitive `n×n` matrix.
pub fn wielandt_bound(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (n - 1) * (n - 1) + 1
    }
}

/// Smallest `p ≤ p_max` such that every entry of `A^p` is positive.
pub fn is_topologically_mixing(a: &TransitionMatrix, p_max: usize) -> Option<usize> {
    let n = a.n;
    if n == 0 || p_max == 0 || !is_primitive(a) {
        return None;
    }
    let words = n.div_ceil(64);
    let mut base = vec![0u64; n * words];
    for k in 0..n {
        for l in 0..n {
            if a.get(k, l) {
                base[k * words + l / 64] |= 1 << (l % 64);
            }
        }
    }
    let full = |row: &[u64]| {
        (0..n).all(|l| row[l / 64] >> (l % 64) & 1 == 1)
    };
    let mut power = base.clone();
    let mut next = vec![0u64; n * words];
    for p in 1..=p_max {
        if (0..n).all(|k| full(&power[k * words..(k + 1) * words])) {
            return Some(p);
        }
        // next[k] = OR over l in power[k] of base[l]
        next.iter_mut().for_each(|w| *w = 0);
        for k in 0..n {
            for l in 0..n {
                if power[k * words + l / 64] >> (l % 64) & 1 == 1 {
                    for w in 0..words {
                        next[k * words + w] |= base[l * words + w];
                    }
                }
            }
        }
        core::mem::swap(&mut power, &mut next);
    }
    None
}

/// Irreducible with period one, decided on the transition graph.
fn is_primitive(a: &TransitionMatrix) -> bool {
    let n = a.n;
    // Breadth-first levels from vertex 0 along forward edges.
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = vec![0usize];
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for v in 0..n {
            if a.get(u, v) && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push(v);
            }
        }
    }
    if queue.len() != n {
        return false;
    }
    // Backward reachability to vertex 0.
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        for u in 0..n {
            if a.get(u, v) && !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return false;
    }
    let mut g = 0usize;
    for u in 0..n {
        for v in 0..n {
            if a.get(u, v) {
                let d = (level[u] + 1).abs_diff(level[v]);
                g = gcd(g, d);
            }
        }
    }
    g == 1
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Outcome of the three structural checks on a candidate map.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub coverage: Result<()>,
    pub markov: Result<()>,
    pub expanding: Result<()>,
    /// Present when all checks pass.
    pub transition: Option<TransitionMatrix>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.transition.is_some()
    }

    pub fn first_error(&self) -> Option<&Error> {
        [&self.coverage, &self.expanding, &self.markov]
            .into_iter()
            .find_map(|r| r.as_ref().err())
    }
}

/// Checks partition coverage, Markov alignment and expansivity of the map
/// given by `breakpoints` and per-element `(slope, intercept)` pairs.
pub fn validate(breakpoints: &[f64], branches: &[(f64, f64)], tol: f64) -> ValidationReport {
    let coverage = check_partition(breakpoints, branches);
    let expanding = branches
        .iter()
        .enumerate()
        .find(|(_, (slope, _))| !(slope.abs() > 1.0) || !slope.is_finite())
        .map_or(Ok(()), |(branch, &(slope, _))| Err(Error::NotExpanding { branch, slope }));
    let (markov, entries) = match coverage {
        Ok(()) => match markov_entries(breakpoints, branches, tol) {
            Ok(e) => (Ok(()), Some(e)),
            Err(e) => (Err(e), None),
        },
        Err(_) => (Err(Error::NotAPartition("Markov check needs a valid partition")), None),
    };
    let transition = match (&expanding, entries) {
        (Ok(()), Some(e)) => Some(TransitionMatrix::from_entries(branches.len(), e)),
        _ => None,
    };
    ValidationReport { coverage, markov, expanding, transition }
}

fn check_partition(breakpoints: &[f64], branches: &[(f64, f64)]) -> Result<()> {
    if branches.is_empty() {
        return Err(Error::NotAPartition("no branches"));
    }
    if breakpoints.len() != branches.len() + 1 {
        return Err(Error::NotAPartition("need exactly one more breakpoint than branches"));
    }
    if breakpoints.iter().any(|b| !b.is_finite()) {
        return Err(Error::NotAPartition("non-finite breakpoint"));
    }
    if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::NotAPartition("breakpoints must be strictly increasing"));
    }
    if branches.iter().any(|(s, d)| !s.is_finite() || !d.is_finite()) {
        return Err(Error::NotAPartition("non-finite branch coefficient"));
    }
    Ok(())
}

fn markov_entries(breakpoints: &[f64], branches: &[(f64, f64)], tol: f64) -> Result<Vec<bool>> {
    let n = branches.len();
    let (lo_dom, hi_dom) = (breakpoints[0], breakpoints[n]);
    let mut entries = vec![false; n * n];
    for (k, &(slope, intercept)) in branches.iter().enumerate() {
        let a = slope * breakpoints[k] + intercept;
        let b = slope * breakpoints[k + 1] + intercept;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo < lo_dom - tol || hi > hi_dom + tol {
            return Err(Error::ImageOutsideDomain { branch: k });
        }
        let first = aligned_index(breakpoints, lo, tol)
            .ok_or(Error::NotMarkov { branch: k, element: element_containing(breakpoints, lo) })?;
        let last = aligned_index(breakpoints, hi, tol)
            .ok_or(Error::NotMarkov { branch: k, element: element_containing(breakpoints, hi) })?;
        if first >= last {
            return Err(Error::NotMarkov { branch: k, element: first.min(n - 1) });
        }
        for l in first..last {
            entries[k * n + l] = true;
        }
    }
    Ok(entries)
}

/// Index of the breakpoint within `tol` of `x`.
fn aligned_index(breakpoints: &[f64], x: f64, tol: f64) -> Option<usize> {
    let i = breakpoints.partition_point(|&b| b < x);
    [i.checked_sub(1), Some(i)]
        .into_iter()
        .flatten()
        .filter(|&j| j < breakpoints.len())
        .find(|&j| (breakpoints[j] - x).abs() <= tol)
}

fn element_containing(breakpoints: &[f64], x: f64) -> usize {
    let n = breakpoints.len() - 1;
    breakpoints.partition_point(|&b| b <= x).saturating_sub(1).min(n - 1)
}

/// Piecewise linear expanding Markov map, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearMarkovMap {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
    transition: TransitionMatrix,
}

impl PiecewiseLinearMarkovMap {
    /// Validates with [`DEFAULT_ALIGNMENT_TOL`].
    pub fn new(breakpoints: Vec<f64>, branches: Vec<(f64, f64)>) -> Result<Self> {
        Self::with_tolerance(breakpoints, branches, DEFAULT_ALIGNMENT_TOL)
    }

    pub fn with_tolerance(breakpoints: Vec<f64>, branches: Vec<(f64, f64)>, tol: f64) -> Result<Self> {
        let report = validate(&breakpoints, &branches, tol);
        match report.transition {
            Some(transition) => Ok(PiecewiseLinearMarkovMap {
                breakpoints,
                slopes: branches.iter().map(|b| b.0).collect(),
                intercepts: branches.iter().map(|b| b.1).collect(),
                transition,
            }),
            None => Err(report.first_error().cloned().unwrap_or(Error::NotAPartition("invalid map"))),
        }
    }

    /// Tent map on `[0,1]`: `2x` then `2 − 2x`.
    pub fn tent() -> Self {
        Self::new(vec![0.0, 0.5, 1.0], vec![(2.0, 0.0), (-2.0, 2.0)]).expect("tent map is valid")
    }

    /// Doubling map on `[0,1]`: `2x` then `2x − 1`.
    pub fn doubling() -> Self {
        Self::new(vec![0.0, 0.5, 1.0], vec![(2.0, 0.0), (2.0, -1.0)]).expect("doubling map is valid")
    }

    /// Two-element map with golden-mean transitions: `(3/2)x` on `[0,⅔]`
    /// and `2x − 4/3` on `[⅔,1]`.
    pub fn golden() -> Self {
        Self::new(vec![0.0, 2.0 / 3.0, 1.0], vec![(1.5, 0.0), (2.0, -4.0 / 3.0)])
            .expect("golden map is valid")
    }

    /// Number of partition elements `N`.
    pub fn len(&self) -> usize {
        self.slopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }

    pub fn domain(&self) -> Interval {
        Interval { lo: self.breakpoints[0], hi: self.breakpoints[self.len()] }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    pub fn element(&self, k: usize) -> Interval {
        Interval { lo: self.breakpoints[k], hi: self.breakpoints[k + 1] }
    }

    pub fn branch(&self, k: usize) -> AffineBranch {
        AffineBranch { slope: self.slopes[k], intercept: self.intercepts[k], domain: self.element(k) }
    }

    pub fn branches(&self) -> impl Iterator<Item = AffineBranch> + '_ {
        (0..self.len()).map(|k| self.branch(k))
    }

    pub fn transition(&self) -> &TransitionMatrix {
        &self.transition
    }

    pub fn is_mixing(&self) -> bool {
        self.transition.is_mixing()
    }

    /// Common sign of all slopes, if there is one.
    pub fn common_slope_sign(&self) -> Option<f64> {
        let s = self.slopes[0].signum();
        self.slopes.iter().all(|g| g.signum() == s).then_some(s)
    }

    pub fn min_abs_slope(&self) -> f64 {
        self.slopes.iter().map(|g| g.abs()).fold(f64::INFINITY, f64::min)
    }

    /// Element owning `x` under the right-ownership rule.
    pub fn locate(&self, x: f64) -> Result<usize> {
        let dom = self.domain();
        if !dom.contains(x) {
            return Err(Error::OutOfDomain { x });
        }
        let i = self.breakpoints.partition_point(|&b| b <= x);
        Ok((i - 1).min(self.len() - 1))
    }

    /// Image of `x` and the index of the branch that maps it.
    pub fn eval(&self, x: f64) -> Result<(f64, usize)> {
        let k = self.locate(x)?;
        Ok((self.slopes[k] * x + self.intercepts[k], k))
    }

    /// Inverse branch `φ_{kl}`: the preimage in `I_l` of `x ∈ I_k`.
    pub fn inverse_branch(&self, k: usize, l: usize, x: f64) -> Result<f64> {
        let n = self.len();
        if k >= n || l >= n || !self.transition.get(l, k) {
            return Err(Error::NoSuchBranch { element: k, branch: l });
        }
        if !self.element(k).contains(x) {
            return Err(Error::OutOfDomain { x });
        }
        Ok((x - self.intercepts[l]) / self.slopes[l])
    }
}

/// Analytic map whose branches each map their domain monotonically onto
/// the whole domain interval.
///
/// Implementors provide branch evaluation and derivative; inverse branches
/// fall back to bisection unless overridden with a closed form.
pub trait FullBranchMap {
    fn domain(&self) -> Interval;

    fn branch_count(&self) -> usize;

    fn branch_domain(&self, b: usize) -> Interval;

    fn eval_branch(&self, b: usize, x: f64) -> f64;

    fn deriv_branch(&self, b: usize, x: f64) -> f64;

    /// Solves `eval_branch(b, x) = y` for `x` in the domain of branch `b`.
    fn inverse_branch(&self, b: usize, y: f64) -> Result<f64> {
        bisect_inverse(self, b, y)
    }

    /// Derivative of the inverse branch at `y`.
    fn inverse_derivative(&self, b: usize, y: f64) -> Result<f64> {
        let x = self.inverse_branch(b, y)?;
        Ok(1.0 / self.deriv_branch(b, x))
    }

    /// Branch owning `x`; shared endpoints go to the branch on the right.
    fn branch_of(&self, x: f64) -> Result<usize> {
        if !self.domain().contains(x) {
            return Err(Error::OutOfDomain { x });
        }
        let nb = self.branch_count();
        (0..nb)
            .find(|&b| {
                let d = self.branch_domain(b);
                d.lo() <= x && (x < d.hi() || b == nb - 1)
            })
            .ok_or(Error::OutOfDomain { x })
    }

    fn eval(&self, x: f64) -> Result<(f64, usize)> {
        let b = self.branch_of(x)?;
        Ok((self.eval_branch(b, x), b))
    }

    /// True if `x` is an endpoint of some branch domain.
    fn is_branch_endpoint(&self, x: f64) -> bool {
        (0..self.branch_count()).any(|b| {
            let d = self.branch_domain(b);
            d.lo() == x || d.hi() == x
        })
    }

    /// `(F(x), F′(x))` with the owning branch; points outside the domain
    /// use the nearest end branch.
    fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let b = self.branch_of(x).unwrap_or(if x < self.domain().midpoint() {
            0
        } else {
            self.branch_count() - 1
        });
        (self.eval_branch(b, x), self.deriv_branch(b, x))
    }
}

/// Tolerance of the bisection fallback for inverse branches.
pub const BISECTION_TOL: f64 = 1e-14;

fn bisect_inverse<F: FullBranchMap + ?Sized>(map: &F, b: usize, y: f64) -> Result<f64> {
    let d = map.branch_domain(b);
    let (mut lo, mut hi) = (d.lo(), d.hi());
    let g_lo = map.eval_branch(b, lo) - y;
    let g_hi = map.eval_branch(b, hi) - y;
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if !(g_lo.signum() != g_hi.signum()) {
        let slack = 1e-12 * map.domain().len();
        if g_lo.abs() <= slack {
            return Ok(lo);
        }
        if g_hi.abs() <= slack {
            return Ok(hi);
        }
        return Err(Error::InverseBranchFailure { branch: b, y });
    }
    let increasing = g_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECTION_TOL || mid == lo || mid == hi {
            return Ok(mid);
        }
        let g = map.eval_branch(b, mid) - y;
        if (g < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Families of smooth full-branch maps with closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmoothFamily {
    /// `F_c(x) = (1 − 2(c+1)|x|) / (1 + 2c|x|)` on `[−1, 1]`.
    Moebius { c: f64 },
}

/// Smooth full-branch map from one of the [`SmoothFamily`] families.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFullBranchMap {
    domain: Interval,
    branch_domains: Vec<Interval>,
    family: SmoothFamily,
}

impl SmoothFullBranchMap {
    /// Piecewise Möbius map on `[−1,1]`; expanding for `c ∈ (−1/4, 1/2)`.
    pub fn moebius(c: f64) -> Result<Self> {
        if !(c > -0.25 && c < 0.5) {
            return Err(Error::ParameterOutOfRange { name: "c", value: c });
        }
        Ok(SmoothFullBranchMap {
            domain: Interval { lo: -1.0, hi: 1.0 },
            branch_domains: vec![Interval { lo: -1.0, hi: 0.0 }, Interval { lo: 0.0, hi: 1.0 }],
            family: SmoothFamily::Moebius { c },
        })
    }

    pub fn family(&self) -> SmoothFamily {
        self.family
    }
}

impl FullBranchMap for SmoothFullBranchMap {
    fn domain(&self) -> Interval {
        self.domain
    }

    fn branch_count(&self) -> usize {
        self.branch_domains.len()
    }

    fn branch_domain(&self, b: usize) -> Interval {
        self.branch_domains[b]
    }

    fn eval_branch(&self, _b: usize, x: f64) -> f64 {
        match self.family {
            SmoothFamily::Moebius { c } => {
                let a = x.abs();
                (1.0 - 2.0 * (c + 1.0) * a) / (1.0 + 2.0 * c * a)
            }
        }
    }

    fn deriv_branch(&self, b: usize, x: f64) -> f64 {
        match self.family {
            SmoothFamily::Moebius { c } => {
                let den = 1.0 + 2.0 * c * x.abs();
                let mag = (4.0 * c + 2.0) / (den * den);
                if b == 0 {
                    mag
                } else {
                    -mag
                }
            }
        }
    }

    fn inverse_branch(&self, b: usize, y: f64) -> Result<f64> {
        match self.family {
            SmoothFamily::Moebius { c } => {
                if !self.domain.contains(y) {
                    return Err(Error::InverseBranchFailure { branch: b, y });
                }
                let x = (1.0 - y) / (2.0 * (c * (y + 1.0) + 1.0));
                Ok(if b == 0 { -x } else { x })
            }
        }
    }

    #[inline]
    fn is_branch_endpoint(&self, x: f64) -> bool {
        match self.family {
            SmoothFamily::Moebius { .. } => x == 0.0 || x == 1.0 || x == -1.0,
        }
    }

    #[inline]
    fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        match self.family {
            SmoothFamily::Moebius { c } => {
                let a = x.abs();
                let den = 1.0 + 2.0 * c * a;
                let y = (1.0 - 2.0 * (c + 1.0) * a) / den;
                let mag = (4.0 * c + 2.0) / (den * den);
                (y, if x < 0.0 { mag } else { -mag })
            }
        }
    }

    fn inverse_derivative(&self, b: usize, y: f64) -> Result<f64> {
        match self.family {
            SmoothFamily::Moebius { c } => {
                if !self.domain.contains(y) {
                    return Err(Error::InverseBranchFailure { branch: b, y });
                }
                let den = c * (y + 1.0) + 1.0;
                let mag = (2.0 * c + 1.0) / (2.0 * den * den);
                Ok(if b == 0 { mag } else { -mag })
            }
        }
    }
}

/// Uniform view of a map as a dynamical system, used by orbit-based
/// estimators.
pub trait IntervalMap {
    /// Interval the orbits live in.
    fn state_space(&self) -> Interval;

    /// Image and derivative at `x`, using the owning branch.
    fn step(&self, x: f64) -> (f64, f64);

    /// True if `x` is exactly a partition point (including domain ends).
    fn is_breakpoint(&self, x: f64) -> bool;
}

impl IntervalMap for PiecewiseLinearMarkovMap {
    fn state_space(&self) -> Interval {
        self.domain()
    }

    #[inline]
    fn step(&self, x: f64) -> (f64, f64) {
        let n = self.len();
        let i = self.breakpoints.partition_point(|&b| b <= x);
        let k = i.saturating_sub(1).min(n - 1);
        (self.slopes[k] * x + self.intercepts[k], self.slopes[k])
    }

    fn is_breakpoint(&self, x: f64) -> bool {
        self.breakpoints.binary_search_by(|b| b.total_cmp(&x)).is_ok()
    }
}

impl<T: FullBranchMap> IntervalMap for T {
    fn state_space(&self) -> Interval {
        FullBranchMap::domain(self)
    }

    #[inline]
    fn step(&self, x: f64) -> (f64, f64) {
        self.eval_with_derivative(x)
    }

    #[inline]
    fn is_breakpoint(&self, x: f64) -> bool {
        self.is_branch_endpoint(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: [f64; 3] = [0.0, 2.0 / 3.0, 1.0];

    #[test]
    fn tent_is_valid_full_branch() {
        let r = validate(&[0.0, 0.5, 1.0], &[(2.0, 0.0), (-2.0, 2.0)], DEFAULT_ALIGNMENT_TOL);
        assert!(r.is_valid());
        let a = r.transition.unwrap();
        assert!((0..2).all(|k| (0..2).all(|l| a.get(k, l))));
        assert_eq!(a.mixing_power(), Some(1));
    }

    #[test]
    fn golden_transition_matrix() {
        let r = validate(&GOLDEN, &[(1.5, 0.0), (2.0, -4.0 / 3.0)], DEFAULT_ALIGNMENT_TOL);
        let a = r.transition.expect("golden map is Markov");
        assert_eq!(a, TransitionMatrix::from_rows(&[&[1, 1], &[1, 0]]));
        assert_eq!(a.mixing_power(), Some(2));
    }

    #[test]
    fn misaligned_image_is_not_markov() {
        let r = validate(&[0.0, 0.5, 1.0], &[(1.5, 0.0), (2.0, -1.0)], DEFAULT_ALIGNMENT_TOL);
        assert!(!r.is_valid());
        assert_eq!(r.markov, Err(Error::NotMarkov { branch: 0, element: 1 }));
        assert!(r.coverage.is_ok());
        assert!(r.expanding.is_ok());
    }

    #[test]
    fn contracting_slope_rejected() {
        let err = PiecewiseLinearMarkovMap::new(vec![0.0, 0.5, 1.0], vec![(0.5, 0.0), (2.0, -1.0)]);
        assert!(matches!(err, Err(Error::NotExpanding { branch: 0, .. })));
    }

    #[test]
    fn bad_partitions_rejected() {
        let r = validate(&[0.0, 0.5, 0.5, 1.0], &[(2.0, 0.0), (2.0, 0.0), (2.0, -1.0)], 1e-9);
        assert!(matches!(r.coverage, Err(Error::NotAPartition(_))));
        let r = validate(&[0.0, 1.0], &[], 1e-9);
        assert!(matches!(r.coverage, Err(Error::NotAPartition(_))));
        let r = validate(&[0.0, 0.5, 1.0], &[(3.0, 0.0), (-2.0, 2.0)], 1e-9);
        assert_eq!(r.markov, Err(Error::ImageOutsideDomain { branch: 0 }));
    }

    #[test]
    fn mixing_power_examples() {
        let id = TransitionMatrix::from_rows(&[&[1, 0], &[0, 1]]);
        assert_eq!(is_topologically_mixing(&id, 100), None);
        let g = TransitionMatrix::from_rows(&[&[1, 1], &[1, 0]]);
        assert_eq!(is_topologically_mixing(&g, 100), Some(2));
        assert_eq!(is_topologically_mixing(&g, 1), None);
        let cycle = TransitionMatrix::from_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(is_topologically_mixing(&cycle, 100), None);
    }

    #[test]
    fn eval_respects_boundary_ownership() {
        let tent = PiecewiseLinearMarkovMap::tent();
        assert_eq!(tent.eval(0.75).unwrap(), (0.5, 1));
        assert_eq!(tent.eval(0.5).unwrap().1, 1);
        assert_eq!(tent.eval(1.0).unwrap(), (0.0, 1));
        let golden = PiecewiseLinearMarkovMap::golden();
        let (y, k) = golden.eval(1.0).unwrap();
        assert!((y - 2.0 / 3.0).abs() < 1e-15 && k == 1);
        assert!(matches!(tent.eval(1.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn inverse_branch_examples() {
        let tent = PiecewiseLinearMarkovMap::tent();
        assert_eq!(tent.inverse_branch(0, 1, 0.0).unwrap(), 1.0);
        let doubling = PiecewiseLinearMarkovMap::doubling();
        assert_eq!(doubling.inverse_branch(0, 1, 0.0).unwrap(), 0.5);
        let golden = PiecewiseLinearMarkovMap::golden();
        let x = golden.inverse_branch(0, 1, 0.5).unwrap();
        assert!((x - 11.0 / 12.0).abs() < 1e-15);
        // Branch 1 of the golden map never lands in element 1.
        assert_eq!(golden.inverse_branch(1, 1, 0.8), Err(Error::NoSuchBranch { element: 1, branch: 1 }));
    }

    #[test]
    fn moebius_examples() {
        let f = SmoothFullBranchMap::moebius(-0.11).unwrap();
        assert_eq!(f.eval(0.0).unwrap().0, 1.0);
        assert!((f.deriv_branch(1, 0.0).abs() - 1.56).abs() < 1e-14);
        let tent = SmoothFullBranchMap::moebius(0.0).unwrap();
        for x in [-0.9, -0.3, 0.2, 0.7] {
            assert!((tent.eval(x).unwrap().0 - (1.0 - 2.0 * f64::abs(x))).abs() < 1e-15);
            let b = tent.branch_of(x).unwrap();
            assert_eq!(tent.deriv_branch(b, x).abs(), 2.0);
        }
        assert_eq!(
            SmoothFullBranchMap::moebius(-0.3),
            Err(Error::ParameterOutOfRange { name: "c", value: -0.3 })
        );
        assert!(SmoothFullBranchMap::moebius(0.5).is_err());
    }

    #[test]
    fn closed_form_step_matches_branches() {
        let f = SmoothFullBranchMap::moebius(0.23).unwrap();
        for x in [-1.0, -0.4, 0.0, 0.35, 1.0] {
            let b = f.branch_of(x).unwrap();
            assert_eq!(f.eval_with_derivative(x), (f.eval_branch(b, x), f.deriv_branch(b, x)));
        }
    }

    #[test]
    fn moebius_inverse_matches_bisection() {
        struct Bisected(SmoothFullBranchMap);
        impl FullBranchMap for Bisected {
            fn domain(&self) -> Interval {
                self.0.domain()
            }
            fn branch_count(&self) -> usize {
                2
            }
            fn branch_domain(&self, b: usize) -> Interval {
                self.0.branch_domain(b)
            }
            fn eval_branch(&self, b: usize, x: f64) -> f64 {
                self.0.eval_branch(b, x)
            }
            fn deriv_branch(&self, b: usize, x: f64) -> f64 {
                self.0.deriv_branch(b, x)
            }
        }
        let f = SmoothFullBranchMap::moebius(0.3).unwrap();
        let g = Bisected(f.clone());
        for b in 0..2 {
            for y in [-1.0, -0.4, 0.0, 0.35, 1.0] {
                let exact = f.inverse_branch(b, y).unwrap();
                let approx = g.inverse_branch(b, y).unwrap();
                assert!((exact - approx).abs() < 1e-13, "b={b} y={y}");
                let d1 = f.inverse_derivative(b, y).unwrap();
                let d2 = g.inverse_derivative(b, y).unwrap();
                assert!((d1 - d2).abs() < 1e-10);
            }
        }
    }
}
