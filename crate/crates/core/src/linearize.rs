//! Piecewise linear approximation of smooth full-branch maps through
//! cylinder sets.
//!
//! The level-`n` cylinder of a word `i₀…i_{n−1}` is `φ_{i₀}(U_{i₁…i_{n−1}})`,
//! so cylinders are built level by level from branch inverses. The map `f_n`
//! is affine on each level-`n` cylinder, agrees with `F` at its endpoints and
//! maps `U_{i₀…i_{n−1}}` onto `U_{i₁…i_{n−1}}`.

use alloc::vec::Vec;

use crate::map_model::{FullBranchMap, Interval, PiecewiseLinearMarkovMap};
use crate::{Error, Result};

/// Default cap on the number of cylinders `Bⁿ`.
pub const DEFAULT_CYLINDER_CAP: usize = 4096;

/// Cylinder set of a word of branch indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderSet {
    pub word: Vec<usize>,
    pub interval: Interval,
}

/// Level-`n` cylinders in lexicographic word order, with the default cap.
pub fn cylinders<F: FullBranchMap + ?Sized>(map: &F, n: usize) -> Result<Vec<CylinderSet>> {
    cylinders_with_cap(map, n, DEFAULT_CYLINDER_CAP)
}

pub fn cylinders_with_cap<F: FullBranchMap + ?Sized>(map: &F, n: usize, cap: usize) -> Result<Vec<CylinderSet>> {
    if n == 0 {
        return Err(Error::InvalidArgument("cylinder level must be at least 1"));
    }
    let b = map.branch_count();
    let count = (b as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::LevelTooDeep { cylinders: count, cap });
    }
    let mut level = alloc::vec![CylinderSet { word: Vec::new(), interval: map.domain() }];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * b);
        for branch in 0..b {
            for cyl in &level {
                let a = preimage(map, branch, cyl.interval.lo())?;
                let z = preimage(map, branch, cyl.interval.hi())?;
                let mut word = Vec::with_capacity(cyl.word.len() + 1);
                word.push(branch);
                word.extend_from_slice(&cyl.word);
                next.push(CylinderSet { word, interval: Interval::new(a.min(z), a.max(z))? });
            }
        }
        level = next;
    }
    Ok(level)
}

/// Branch inverse with domain endpoints sent exactly to branch-domain
/// endpoints, so neighbouring cylinders from different branches share them.
fn preimage<F: FullBranchMap + ?Sized>(map: &F, branch: usize, y: f64) -> Result<f64> {
    let x = map.inverse_branch(branch, y)?;
    let dom = map.domain();
    if y == dom.lo() || y == dom.hi() {
        let bd = map.branch_domain(branch);
        return Ok(if (x - bd.lo()).abs() <= (x - bd.hi()).abs() { bd.lo() } else { bd.hi() });
    }
    Ok(x)
}

/// The level-`n` linearization `f_n` of `F`.
pub fn linearize<F: FullBranchMap + ?Sized>(map: &F, n: usize) -> Result<PiecewiseLinearMarkovMap> {
    let cyls = cylinders(map, n)?;
    let images = if n == 1 {
        alloc::vec![CylinderSet { word: Vec::new(), interval: map.domain() }]
    } else {
        cylinders(map, n - 1)?
    };
    let stride = images.len();
    let increasing: Vec<bool> = (0..map.branch_count())
        .map(|b| map.deriv_branch(b, map.branch_domain(b).midpoint()) > 0.0)
        .collect();

    let mut order: Vec<usize> = (0..cyls.len()).collect();
    order.sort_by(|&i, &j| cyls[i].interval.lo().total_cmp(&cyls[j].interval.lo()));

    let mut breakpoints = Vec::with_capacity(cyls.len() + 1);
    let mut branches = Vec::with_capacity(cyls.len());
    for &i in &order {
        let cyl = &cyls[i];
        let img = images[i % stride].interval;
        let (a, z) = (cyl.interval.lo(), cyl.interval.hi());
        let (fa, fz) = if increasing[cyl.word[0]] { (img.lo(), img.hi()) } else { (img.hi(), img.lo()) };
        let slope = (fz - fa) / (z - a);
        breakpoints.push(a);
        branches.push((slope, fa - slope * a));
    }
    breakpoints.push(map.domain().hi());
    PiecewiseLinearMarkovMap::new(breakpoints, branches)
}
