//! Tensor-product Gauss-Kronrod cubature on boxes of dimension at most three.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::rules::GkRule;
use super::adaptive::{integrate_endpoint_singular, EndPt};
use super::{pairwise_sum, QuadOptions, QuadResult, SingularityPlan};
use crate::error::{Error, Result};

/// An axis-aligned box `[lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}]`, `d <= 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub ranges: Vec<(f64, f64)>,
}

impl Domain {
    pub fn new(ranges: Vec<(f64, f64)>) -> Result<Self> {
        if ranges.is_empty() || ranges.len() > 3 {
            return Err(Error::InvalidArgument(format!(
                "cubature supports 1 to 3 dimensions, got {}",
                ranges.len()
            )));
        }
        if ranges.iter().any(|&(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(Error::InvalidArgument(format!("bad box {ranges:?}")));
        }
        Ok(Domain { ranges })
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn volume(&self) -> f64 {
        self.ranges.iter().map(|(a, b)| b - a).product()
    }
}

#[derive(Clone)]
struct Cell {
    lo: [f64; 3],
    hi: [f64; 3],
    value: Complex64,
    err: f64,
    split_dim: usize,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

struct Evaluator<'a, F> {
    f: &'a F,
    rule: GkRule,
    dim: usize,
}

impl<F: Fn(&[f64]) -> Complex64> Evaluator<'_, F> {
    fn cell(&self, lo: [f64; 3], hi: [f64; 3]) -> Cell {
        let n = self.rule.len();
        let d = self.dim;
        let mut c = [0.0; 3];
        let mut h = [0.0; 3];
        for k in 0..d {
            c[k] = 0.5 * (lo[k] + hi[k]);
            h[k] = 0.5 * (hi[k] - lo[k]);
        }
        let vol: f64 = h[..d].iter().product();
        let total = n.pow(d as u32);
        let mut vals = Vec::with_capacity(total);
        let mut point = [0.0; 3];
        for flat in 0..total {
            let mut r = flat;
            for k in 0..d {
                point[k] = c[k] + h[k] * self.rule.nodes[r % n];
                r /= n;
            }
            vals.push((self.f)(&point[..d]));
        }
        let weights = |flat: usize, gauss_dim: Option<usize>| -> f64 {
            let mut r = flat;
            let mut w = 1.0;
            for k in 0..d {
                let i = r % n;
                r /= n;
                w *= if Some(k) == gauss_dim { self.rule.gauss[i] } else { self.rule.kronrod[i] };
            }
            w
        };
        let mut vk = Complex64::new(0.0, 0.0);
        let mut mixed = [Complex64::new(0.0, 0.0); 3];
        let mut resabs = 0.0;
        for (flat, v) in vals.iter().enumerate() {
            let wk = weights(flat, None);
            vk += v * wk;
            resabs += wk * v.norm();
            for (k, m) in mixed.iter_mut().enumerate().take(d) {
                *m += v * weights(flat, Some(k));
            }
        }
        let mean = vk / 2f64.powi(d as i32);
        let resasc: f64 = vals
            .iter()
            .enumerate()
            .map(|(flat, v)| weights(flat, None) * (v - mean).norm())
            .sum();
        let per_dim: Vec<f64> = (0..d).map(|k| ((vk - mixed[k]) * vol).norm()).collect();
        let raw: f64 = per_dim.iter().sum();
        let mut err = super::adaptive::rescale(raw, resabs * vol, resasc * vol);
        if !(vk.re.is_finite() && vk.im.is_finite()) {
            err = f64::INFINITY;
        }
        let split_dim = (0..d)
            .max_by(|&a, &b| per_dim[a].total_cmp(&per_dim[b]))
            .unwrap_or(0);
        Cell {
            lo,
            hi,
            value: vk * vol,
            err,
            split_dim,
        }
    }
}

/// Adaptive cubature of `f` over `domain`.
///
/// Each cell is integrated with the tensor 15-point Kronrod rule; replacing the
/// rule by the embedded 7-point Gauss rule along one axis at a time gives the
/// per-axis error indicators that pick the split direction.
///
/// Diagonals `x_i = x_j` declared in `plan` are handled by iterating: `x_j` is
/// integrated innermost, split at every declared partner `x_i` with an
/// endpoint-singular substitution there, and the remaining coordinates are
/// integrated by cubature of the result.
pub fn integrate<F: Fn(&[f64]) -> Complex64>(
    f: F,
    domain: &Domain,
    plan: Option<&SingularityPlan>,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let d = domain.dim();
    let mut diagonals = Vec::new();
    if let Some(p) = plan {
        p.validate()?;
        if !p.all_integrable() {
            return Err(Error::InvalidArgument(
                "cubature only handles integrable diagonals; regularize first".into(),
            ));
        }
        for (i, j, sing) in p.diagonals() {
            if i >= d || j >= d || i == j {
                return Err(Error::InvalidArgument(format!("diagonal ({i}, {j}) outside {d} dimensions")));
            }
            diagonals.push((i, j, sing.exponent));
        }
    }
    if domain.volume() == 0.0 {
        return Ok(QuadResult::exact(Complex64::new(0.0, 0.0)));
    }
    if diagonals.is_empty() {
        Ok(tensor(&f, domain, opts))
    } else {
        iterated(&f, domain, &diagonals, opts)
    }
}

fn iterated(
    f: &dyn Fn(&[f64]) -> Complex64,
    domain: &Domain,
    diagonals: &[(usize, usize, Complex64)],
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let d = domain.dim();
    // integrate innermost a coordinate tied to a single other one, so no two
    // singular points of the inner integral can merge
    let degree = |x: usize| diagonals.iter().filter(|&&(a, b, _)| a == x || b == x).count();
    let j = match (0..d).find(|&x| degree(x) == 1) {
        Some(j) => j,
        None => {
            return Err(Error::InvalidArgument(
                "declared diagonals must not form a cycle".into(),
            ))
        }
    };
    // partners of the innermost coordinate, with the worst exponent each
    let partners: Vec<(usize, Complex64)> = diagonals
        .iter()
        .filter_map(|&(a, b, re)| {
            if b == j {
                Some((a, re))
            } else if a == j {
                Some((b, re))
            } else {
                None
            }
        })
        .collect();
    let outer_dims: Vec<usize> = (0..d).filter(|&k| k != j).collect();
    let pos = |x: usize| outer_dims.iter().position(|&k| k == x).expect("outer dim");
    let rest: Vec<(usize, usize, Complex64)> = diagonals
        .iter()
        .filter(|&&(a, b, _)| a != j && b != j)
        .map(|&(a, b, re)| (pos(a), pos(b), re))
        .collect();
    let outer_domain = Domain::new(outer_dims.iter().map(|&k| domain.ranges[k]).collect())?;
    let (c, e) = domain.ranges[j];
    let inner_opts = QuadOptions {
        abs_tol: 0.1 * opts.abs_tol / outer_domain.volume(),
        rel_tol: 0.1 * opts.rel_tol,
        max_evals: (opts.max_evals / 64).max(2000),
        freq_hint: opts.freq_hint,
    };
    let inner_ok = std::cell::Cell::new(true);
    let inner_evals = std::cell::Cell::new(0usize);
    let g = |xo: &[f64]| -> Complex64 {
        let mut full = [0.0; 3];
        for (slot, &k) in outer_dims.iter().enumerate() {
            full[k] = xo[slot];
        }
        // breakpoints: domain ends plus partner values inside, each tagged
        // with the exponent of the singularity sitting there
        let mut pts: Vec<(f64, Option<Complex64>)> = vec![(c, None), (e, None)];
        for &(k, re) in &partners {
            let x = full[k];
            if x > c && x < e {
                pts.push((x, Some(re)));
            } else if x == c {
                pts[0].1 = Some(re);
            } else if x == e {
                pts[1].1 = Some(re);
            }
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = Complex64::new(0.0, 0.0);
        for w in pts.windows(2) {
            let ((a, sa), (b, sb)) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let r = integrate_endpoint_singular(
                |p: EndPt| {
                    let mut pt = full;
                    pt[j] = p.x;
                    f(&pt[..d])
                },
                a,
                b,
                sa,
                sb,
                &inner_opts,
            );
            inner_ok.set(inner_ok.get() && r.converged);
            inner_evals.set(inner_evals.get() + r.evaluations);
            acc += r.value;
        }
        acc
    };
    let outer_opts = QuadOptions {
        max_evals: (opts.max_evals / 20).max(5000),
        ..*opts
    };
    let mut res = if rest.is_empty() {
        tensor(&g, &outer_domain, &outer_opts)
    } else {
        iterated(&g, &outer_domain, &rest, &outer_opts)?
    };
    res.converged &= inner_ok.get();
    res.evaluations = inner_evals.get();
    Ok(res)
}

fn tensor<F: Fn(&[f64]) -> Complex64>(f: &F, domain: &Domain, opts: &QuadOptions) -> QuadResult {
    let d = domain.dim();
    let ev = Evaluator {
        f,
        rule: GkRule::g7k15(),
        dim: d,
    };
    let per_cell = ev.rule.len().pow(d as u32);

    let counts: Vec<usize> = domain.ranges.iter().map(|&(a, b)| opts.initial_cells(b - a)).collect();
    let total_cells: usize = counts.iter().product();
    let mut evals = 0usize;
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for flat in 0..total_cells {
        let mut r = flat;
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for k in 0..d {
            let i = r % counts[k];
            r /= counts[k];
            let (a, b) = domain.ranges[k];
            lo[k] = a + (b - a) * i as f64 / counts[k] as f64;
            hi[k] = if i + 1 == counts[k] { b } else { a + (b - a) * (i + 1) as f64 / counts[k] as f64 };
        }
        let c = ev.cell(lo, hi);
        evals += per_cell;
        total += c.value;
        total_err += c.err;
        heap.push(c);
    }
    let mut subdivisions = 0usize;
    let mut stuck = false;
    while total_err > opts.target(total) {
        if evals + 2 * per_cell > opts.max_evals {
            break;
        }
        let worst = heap.pop().expect("nonempty");
        let k = worst.split_dim;
        let m = 0.5 * (worst.lo[k] + worst.hi[k]);
        if !(m > worst.lo[k] && m < worst.hi[k]) {
            stuck = true;
            heap.push(worst);
            break;
        }
        let mut hi1 = worst.hi;
        hi1[k] = m;
        let mut lo2 = worst.lo;
        lo2[k] = m;
        let c1 = ev.cell(worst.lo, hi1);
        let c2 = ev.cell(lo2, worst.hi);
        evals += 2 * per_cell;
        subdivisions += 1;
        total += c1.value + c2.value - worst.value;
        total_err += c1.err + c2.err - worst.err;
        heap.push(c1);
        heap.push(c2);
        if subdivisions % 64 == 0 {
            total_err = heap.iter().map(|c| c.err).sum();
        }
    }
    let mut cells = heap.into_vec();
    cells.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(Ordering::Equal));
    let vals: Vec<Complex64> = cells.iter().map(|c| c.value).collect();
    let value = pairwise_sum(&vals);
    let err: f64 = cells.iter().map(|c| c.err).sum();
    QuadResult {
        value,
        err_estimate: err,
        converged: !stuck && err.is_finite() && err <= opts.target(value),
        subdivisions,
        evaluations: evals,
    }
}

/// Sum of [`integrate`] over several boxes, sharing the tolerance.
pub fn integrate_boxes<F: Fn(&[f64]) -> Complex64>(
    f: F,
    boxes: &[Domain],
    plan: Option<&SingularityPlan>,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let n = boxes.len().max(1) as f64;
    let sub = QuadOptions {
        abs_tol: opts.abs_tol / n,
        max_evals: (opts.max_evals as f64 / n) as usize,
        ..*opts
    };
    let parts = boxes
        .iter()
        .map(|b| integrate(&f, b, plan, &sub))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadResult::combine(&parts))
}
