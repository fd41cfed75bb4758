//! Counting experiments over orbit balls and the slope oracle for simple
//! closed curves on the punctured torus.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{geodesic_length, SurfaceStructure};
use crate::mcg::OrbitBall;
use crate::words::{conj_class, ConjClass, Letter, Word};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    #[serde(rename = "L")]
    pub l: f64,
    pub count: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CensusMeta {
    pub seed: String,
    pub functional: String,
    pub margin: Option<f64>,
    pub surface: String,
    pub exponent: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusTable {
    pub rows: Vec<CensusRow>,
    pub meta: CensusMeta,
    /// Set for orbit-ball censuses.
    pub frontier_exhausted: Option<bool>,
}

impl CensusTable {
    pub fn count_at(&self, l: f64) -> Option<u64> {
        self.rows.iter().find(|r| r.l == l).map(|r| r.count)
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].l > w[1].l || w[0].count <= w[1].count)
    }

    /// `N(L) / L^e` per row.
    pub fn normalized(&self, exponent: f64) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.count as f64 / r.l.powf(exponent))
            .collect()
    }
}

/// `n` evenly spaced values `L·i/n`, `i = 1..=n`.
pub fn uniform_grid(l: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| l * i as f64 / n as f64).collect()
}

fn check_grid(grid: &[f64], cutoff: f64) -> Result<()> {
    if let Some(g) = grid.iter().find(|&&g| !(g <= cutoff) || g.is_nan()) {
        return Err(Error::Input(format!("grid value {g} exceeds the cutoff {cutoff}")));
    }
    Ok(())
}

fn cumulative(values: &mut [f64], grid: &[f64]) -> Vec<CensusRow> {
    values.sort_by(f64::total_cmp);
    grid.iter()
        .map(|&l| CensusRow {
            l,
            count: values.partition_point(|&v| v <= l) as u64,
        })
        .collect()
}

/// Cumulative counts of ball elements with functional value ≤ each grid point.
pub fn count_by_length(ball: &OrbitBall, grid: &[f64]) -> Result<CensusTable> {
    check_grid(grid, ball.cutoff)?;
    let mut values = ball.values();
    Ok(CensusTable {
        rows: cumulative(&mut values, grid),
        meta: CensusMeta {
            seed: ball.seed.to_string(),
            functional: ball.functional.name(),
            margin: Some(ball.margin),
            surface: String::new(),
            exponent: 0,
        },
        frontier_exhausted: Some(ball.frontier_exhausted),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub window: (f64, f64),
    pub rows_used: usize,
}

/// Least-squares line through `(ln L, ln N)` over rows with `N > 0` and `L` in the window.
pub fn fit_exponent(t: &CensusTable, window: (f64, f64)) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = t
        .rows
        .iter()
        .filter(|r| r.count > 0 && r.l >= window.0 && r.l <= window.1)
        .map(|r| (r.l.ln(), (r.count as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Input(format!(
            "fit needs at least 3 rows with positive counts in [{}, {}], found {}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Input("fit window has a single distinct L".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(FitResult {
        slope,
        intercept,
        r2,
        window,
        rows_used: pts.len(),
    })
}

/// Sizes of the fibers of `B` restricted to the ball: fiber size → number of fibers.
pub fn fiber_histogram(ball: &OrbitBall) -> Result<BTreeMap<usize, usize>> {
    if ball.elements.is_empty() {
        return Err(Error::Input("empty ball".into()));
    }
    // B is equivariant, so it vanishes on the seed iff it vanishes on every element.
    if ball.elements.iter().all(|e| e.b_key.is_empty()) {
        return Err(Error::LemmaHypothesis(
            "the seed has zero boundary projection".into(),
        ));
    }
    if !ball.frontier_exhausted {
        return Err(Error::Input("fiber histogram needs a frontier-exhausted ball".into()));
    }
    let mut fibers: HashMap<&str, usize> = HashMap::new();
    for e in &ball.elements {
        *fibers.entry(e.b_key.as_str()).or_default() += 1;
    }
    let mut hist = BTreeMap::new();
    for size in fibers.into_values() {
        *hist.entry(size).or_default() += 1;
    }
    Ok(hist)
}

/// Lower Christoffel word with `|p|` letters `a` and `|q|` letters `b`
/// (`B` when `q < 0`). `(p, q)` and `(−p, −q)` name the same unoriented class.
pub fn christoffel_word(p: i64, q: i64) -> Result<Word> {
    if p.gcd(&q) != 1 {
        return Err(Error::Input(format!("({p}, {q}) is not a primitive slope")));
    }
    let (p, q) = if p < 0 || (p == 0 && q < 0) { (-p, -q) } else { (p, q) };
    let b = Letter::new(1, q < 0);
    let a = Letter::new(0, false);
    let q = q.unsigned_abs() as i128;
    let p = p as i128;
    let n = p + q;
    let letters = (1..=n).map(|i| {
        if (i * q) / n > ((i - 1) * q) / n {
            b
        } else {
            a
        }
    });
    Ok(Word::from_letters(letters))
}

fn require_punctured_torus(s: &SurfaceStructure) -> Result<()> {
    if s.rank == 2 && s.genus == 1 && s.cusps == 1 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "the slope oracle needs a once-punctured torus, got genus {} with {} cusps",
            s.genus, s.cusps
        )))
    }
}

/// A simple closed curve found by the slope oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
    pub class: ConjClass,
    pub length: f64,
}

/// Every primitive slope whose Christoffel geodesic has length ≤ `l`.
///
/// Stern–Brocot traversal of both quadrants. A subtree is cut only after
/// checking that the mediants of both of its child intervals also exceed `l`.
pub fn scc_slopes(s: &SurfaceStructure, l: f64) -> Result<Vec<Slope>> {
    require_punctured_torus(s)?;
    let eval = |p: i64, q: i64| -> Result<Slope> {
        let class = conj_class(&christoffel_word(p, q)?)?;
        let length = geodesic_length(&class, s)?;
        Ok(Slope { p, q, class, length })
    };
    let mut out = Vec::new();
    for (p, q) in [(1, 0), (0, 1)] {
        let sl = eval(p, q)?;
        if sl.length <= l {
            out.push(sl);
        }
    }
    for lower in [(0i64, 1i64), (0, -1)] {
        let mut stack = vec![((1i64, 0i64), lower)];
        while let Some((x, y)) = stack.pop() {
            let m = (x.0 + y.0, x.1 + y.1);
            let sl = eval(m.0, m.1)?;
            if sl.length <= l {
                out.push(sl);
                stack.push((x, m));
                stack.push((m, y));
                continue;
            }
            for (u, v) in [(x, m), (m, y)] {
                let child = eval(u.0 + v.0, u.1 + v.1)?;
                if child.length <= l {
                    stack.push((u, v));
                }
            }
        }
    }
    out.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.class.cmp(&b.class)));
    Ok(out)
}

fn oracle_meta(s: &SurfaceStructure, functional: &str) -> CensusMeta {
    CensusMeta {
        seed: "slope oracle".into(),
        functional: functional.into(),
        margin: None,
        surface: s.name.clone(),
        exponent: s.counting_exponent(),
    }
}

/// Number of simple closed geodesics of length ≤ each grid value.
pub fn scc_census(s: &SurfaceStructure, l: f64, grid: &[f64]) -> Result<CensusTable> {
    check_grid(grid, l)?;
    let mut lengths: Vec<f64> = scc_slopes(s, l)?.iter().map(|x| x.length).collect();
    Ok(CensusTable {
        rows: cumulative(&mut lengths, grid),
        meta: oracle_meta(s, "length"),
        frontier_exhausted: None,
    })
}

/// Integer simple multicurves of length ≤ each grid value.
///
/// On the once-punctured torus two distinct simple closed curves always
/// intersect, so an integral simple multicurve is `m·c`: the count at `L` is
/// `Σ_c ⌊L / ℓ(c)⌋`.
pub fn mlz_census(s: &SurfaceStructure, l: f64, grid: &[f64]) -> Result<CensusTable> {
    check_grid(grid, l)?;
    let slopes = scc_slopes(s, l)?;
    let rows = grid
        .iter()
        .map(|&g| CensusRow {
            l: g,
            count: slopes
                .iter()
                .filter(|x| x.length <= g)
                .map(|x| (g / x.length).floor() as u64)
                .sum(),
        })
        .collect();
    Ok(CensusTable {
        rows,
        meta: oracle_meta(s, "length"),
        frontier_exhausted: None,
    })
}
