use alloc::format;
use alloc::vec::Vec;

use super::lift::polar_lift;
use crate::correct::MatrixUnitSystem;
use crate::matcore::{eigh, projection_rank, Mat};
use crate::num;
use crate::{Error, Result, C64};

const ONE: C64 = C64::new(1.0, 0.0);

/// A unital inclusion `A = ⊕_a M_{p_a} ⊂ B = ⊕_b M_{q_b}` with multiplicity
/// matrix `mult[b][a]`, and the trace weights of `B`.
///
/// Block `b` of `B` contains, in order, `mult[b][0]` copies of `A`'s first
/// block, then `mult[b][1]` copies of the second, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct Inclusion {
    a_blocks: Vec<usize>,
    b_blocks: Vec<usize>,
    mult: Vec<Vec<usize>>,
    b_weights: Vec<f64>,
}

impl Inclusion {
    /// Inclusion with dimension-proportional weights on `B`.
    pub fn new(a_blocks: Vec<usize>, b_blocks: Vec<usize>, mult: Vec<Vec<usize>>) -> Result<Inclusion> {
        let total: usize = b_blocks.iter().sum();
        let weights = b_blocks.iter().map(|&q| q as f64 / total.max(1) as f64).collect();
        Inclusion::with_weights(a_blocks, b_blocks, mult, weights)
    }

    pub fn with_weights(
        a_blocks: Vec<usize>,
        b_blocks: Vec<usize>,
        mult: Vec<Vec<usize>>,
        b_weights: Vec<f64>,
    ) -> Result<Inclusion> {
        if a_blocks.is_empty() || b_blocks.is_empty() || a_blocks.contains(&0) || b_blocks.contains(&0) {
            return Err(Error::InvalidInput("block dimensions must be positive".into()));
        }
        if mult.len() != b_blocks.len() {
            return Err(Error::Shape {
                expected: b_blocks.len(),
                found: mult.len(),
            });
        }
        if b_weights.len() != b_blocks.len() {
            return Err(Error::Shape {
                expected: b_blocks.len(),
                found: b_weights.len(),
            });
        }
        if b_weights.iter().any(|w| !(*w > 0.0) || !w.is_finite())
            || num::abs(b_weights.iter().sum::<f64>() - 1.0) > 1e-12
        {
            return Err(Error::InvalidInput(
                "weights must be positive and sum to 1".into(),
            ));
        }
        for (b, row) in mult.iter().enumerate() {
            if row.len() != a_blocks.len() {
                return Err(Error::Shape {
                    expected: a_blocks.len(),
                    found: row.len(),
                });
            }
            let found: usize = row.iter().zip(&a_blocks).map(|(m, p)| m * p).sum();
            if found != b_blocks[b] {
                return Err(Error::Bratteli {
                    block: b + 1,
                    expected: b_blocks[b],
                    found,
                });
            }
        }
        for a in 0..a_blocks.len() {
            if mult.iter().all(|row| row[a] == 0) {
                return Err(Error::InvalidInput(format!(
                    "block {} of the subalgebra is not represented",
                    a + 1
                )));
            }
        }
        Ok(Inclusion {
            a_blocks,
            b_blocks,
            mult,
            b_weights,
        })
    }

    pub fn a_blocks(&self) -> &[usize] {
        &self.a_blocks
    }

    pub fn b_blocks(&self) -> &[usize] {
        &self.b_blocks
    }

    pub fn mult(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn b_weights(&self) -> &[f64] {
        &self.b_weights
    }

    /// Copies of `A`-blocks inside `B`-block `b`: `(a, offset)` in order.
    fn segments(&self, b: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for (a, &m) in self.mult[b].iter().enumerate() {
            for _ in 0..m {
                out.push((a, off));
                off += self.a_blocks[a];
            }
        }
        out
    }

    /// `ρ|_A`: each unit `e^{(a)}_{st}` goes to the sum of the corresponding
    /// units over all copies of block `a` in `B`.
    pub fn restrict(&self, rho: &MatrixUnitSystem) -> Result<MatrixUnitSystem> {
        if rho.blocks() != self.b_blocks.as_slice() {
            return Err(Error::InvalidInput(
                "unit system does not match the larger algebra".into(),
            ));
        }
        let d = rho.dim();
        let mut units: Vec<Vec<Mat>> = self
            .a_blocks
            .iter()
            .map(|&p| alloc::vec![Mat::zeros(d); p * p])
            .collect();
        for b in 0..self.b_blocks.len() {
            for (a, off) in self.segments(b) {
                let p = self.a_blocks[a];
                for s in 0..p {
                    for t in 0..p {
                        units[a][s * p + t] += rho.unit(b, off + s, off + t);
                    }
                }
            }
        }
        MatrixUnitSystem::new(self.a_blocks.clone(), units)
    }
}

/// Eigenvectors of a projection with eigenvalue one.
fn range_vectors(p: &Mat) -> Vec<Vec<C64>> {
    let e = eigh(&p.hermitian_part());
    (0..e.values.len())
        .rev()
        .filter(|&j| e.values[j] > 0.5)
        .map(|j| e.vector(j))
        .collect()
}

fn projector(d: usize, vs: &[Vec<C64>]) -> Mat {
    let mut p = Mat::zeros(d);
    for v in vs {
        p.add_outer(ONE, v, v);
    }
    p
}

fn outer_sum(d: usize, to: &[Vec<C64>], from: &[Vec<C64>]) -> Mat {
    let mut m = Mat::zeros(d);
    for (u, v) in to.iter().zip(from) {
        m.add_outer(ONE, u, v);
    }
    m
}

/// Ranks `k_b` of the diagonal units of each `B`-block in dimension `d`.
fn unit_ranks(inc: &Inclusion, d: usize, a_ranks: &[usize]) -> Result<Vec<usize>> {
    let ks: Vec<usize> = inc
        .b_blocks
        .iter()
        .zip(&inc.b_weights)
        .map(|(&q, &w)| num::round(d as f64 * w / q as f64) as usize)
        .collect();
    if let Some(b) = ks.iter().position(|&k| k == 0) {
        return Err(Error::Resolution(format!(
            "trace atom {:.4e} of block {} is below 1/{d}",
            inc.b_weights[b] / inc.b_blocks[b] as f64,
            b + 1
        )));
    }
    for (a, &r) in a_ranks.iter().enumerate() {
        let got: usize = inc.mult.iter().zip(&ks).map(|(row, k)| row[a] * k).sum();
        if got != r {
            return Err(Error::Resolution(format!(
                "unit ranks {ks:?} in dimension {d} do not split a rank-{r} unit of block {}",
                a + 1
            )));
        }
    }
    Ok(ks)
}

/// Units of `B` extending the exact units `pi` of `A` in one ambient space.
///
/// Each minimal projection `π(e^{(a)}_{11})` is cut into the heads of the
/// copies of block `a` inside `B`; every other diagonal unit is a
/// translate `π(e_{s1}) R π(e_{1s})` of a head `R`. Heads within one block
/// of `B` are linked by partial isometries, and the units are
/// `ρ(E_{(j,s),(j',t)}) = π(e_{s1}) V_j V_{j'}* π(e_{1t})`.
///
/// A `target` approximating the image of the generator
/// `Σ_k k·E_kk + i·Σ_b Σ_{k≥2} (E^{(b)}_{1k} + E^{(b)}_{k1})` of `B` steers
/// both choices: heads are cut along the eigenvectors of its compressed real
/// part, and links are the polar factors of its compressed imaginary part.
/// Without one the eigenbases of `π` are used directly.
pub fn extend_units(
    inc: &Inclusion,
    pi: &MatrixUnitSystem,
    target: Option<&Mat>,
) -> Result<MatrixUnitSystem> {
    if pi.blocks() != inc.a_blocks.as_slice() {
        return Err(Error::InvalidInput(
            "unit system does not match the subalgebra".into(),
        ));
    }
    if !pi.is_exact() {
        return Err(Error::InvalidInput(format!(
            "subalgebra units are not exact (defect {:.3e})",
            pi.defect()
        )));
    }
    let d = pi.dim();
    if let Some(t) = target {
        pi.unit(0, 0, 0).check_same_dim(t)?;
        t.check_finite()?;
    }
    let a_ranks: Vec<usize> = (0..inc.a_blocks.len())
        .map(|a| projection_rank(pi.unit(a, 0, 0)))
        .collect();
    let ks = unit_ranks(inc, d, &a_ranks)?;
    let re = target.map(|t| t.hermitian_part());
    let im = target.map(|t| t.skew_part());

    // heads[b][j]: basis of the head of segment j in block b.
    let mut heads: Vec<Vec<Vec<Vec<C64>>>> = inc
        .b_blocks
        .iter()
        .enumerate()
        .map(|(b, _)| alloc::vec![Vec::new(); inc.segments(b).len()])
        .collect();
    for a in 0..inc.a_blocks.len() {
        let mut basis = range_vectors(pi.unit(a, 0, 0));
        if let Some(re) = &re {
            let y = Mat::from_columns(d, &basis);
            let r = basis.len();
            let comp = y.adjoint_mul(&re.matmul(&y)).principal_block(0, r);
            let e = eigh(&comp.hermitian_part());
            basis = (0..r)
                .map(|j| {
                    let c = e.vector(j);
                    let mut v = alloc::vec![C64::new(0.0, 0.0); d];
                    for (k, ck) in c.iter().enumerate() {
                        for (vi, bi) in v.iter_mut().zip(&basis[k]) {
                            *vi += bi * ck;
                        }
                    }
                    v
                })
                .collect();
        }
        let mut next = 0;
        for b in 0..inc.b_blocks.len() {
            for (j, (seg_a, _)) in inc.segments(b).into_iter().enumerate() {
                if seg_a == a {
                    heads[b][j] = basis[next..next + ks[b]].to_vec();
                    next += ks[b];
                }
            }
        }
    }

    let mut all_units = Vec::with_capacity(inc.b_blocks.len());
    for (b, &q) in inc.b_blocks.iter().enumerate() {
        let segs = inc.segments(b);
        let h0 = projector(d, &heads[b][0]);
        let mut links = Vec::with_capacity(segs.len());
        links.push(h0.clone());
        for j in 1..segs.len() {
            let link = match &im {
                Some(im) => {
                    let hj = projector(d, &heads[b][j]);
                    polar_lift(&h0, &hj, &hj.matmul(im).matmul(&h0))
                        .map_err(|e| e.at_unit(b + 1, segs[j].1 + 1, 1))?
                }
                None => outer_sum(d, &heads[b][j], &heads[b][0]),
            };
            links.push(link);
        }
        let mut position = alloc::vec![(0usize, 0usize); q];
        for (j, &(a, off)) in segs.iter().enumerate() {
            for s in 0..inc.a_blocks[a] {
                position[off + s] = (j, s);
            }
        }
        // left[x] = π(e_{s1}) V_j for position x = (j, s).
        let left: Vec<Mat> = position
            .iter()
            .map(|&(j, s)| pi.unit(segs[j].0, s, 0).matmul(&links[j]))
            .collect();
        let mut units = Vec::with_capacity(q * q);
        for x in 0..q {
            for y in 0..q {
                units.push(left[x].matmul(&left[y].adjoint()));
            }
        }
        all_units.push(units);
    }
    MatrixUnitSystem::new(inc.b_blocks.clone(), all_units)
}

/// `extend_units` at every index of a sequence.
pub fn extend_matrix_units(
    inc: &Inclusion,
    pi: &[MatrixUnitSystem],
    targets: Option<&[Mat]>,
) -> Result<Vec<MatrixUnitSystem>> {
    if let Some(ts) = targets {
        if ts.len() != pi.len() {
            return Err(Error::Shape {
                expected: pi.len(),
                found: ts.len(),
            });
        }
    }
    pi.iter()
        .enumerate()
        .map(|(i, p)| {
            extend_units(inc, p, targets.map(|ts| &ts[i])).map_err(|e| e.at_index(i + 1))
        })
        .collect()
}

/// Image of the generator of `B` named in [`extend_units`] under a unit system.
pub fn unit_generator(units: &MatrixUnitSystem) -> Mat {
    let mut y = Mat::zeros(units.dim());
    let mut label = 0.0;
    for (b, &n) in units.blocks().iter().enumerate() {
        for k in 0..n {
            label += 1.0;
            y += &units.unit(b, k, k).scale_real(label);
            if k > 0 {
                let sym = units.unit(b, 0, k) + units.unit(b, k, 0);
                y += &sym.scale(C64::new(0.0, 1.0));
            }
        }
    }
    y
}

/// Iterates [`extend_units`] along a chain `ℂ·1 = A_0 ⊂ A_1 ⊂ … ⊂ A_depth`
/// inside `M_d` for every ambient dimension `d` in `dims`.
///
/// Returns `tower[level][index]`, level `0` being `A_1`.
pub fn bratteli_lift(
    chain: &[Inclusion],
    depth: usize,
    dims: &[usize],
) -> Result<Vec<Vec<MatrixUnitSystem>>> {
    if depth == 0 || depth > chain.len() {
        return Err(Error::InvalidParameter {
            name: "depth",
            value: depth as f64,
        });
    }
    if chain[0].a_blocks != [1] {
        return Err(Error::InvalidInput(
            "the chain must start from the scalars".into(),
        ));
    }
    for (l, w) in chain[..depth].windows(2).enumerate() {
        if w[0].b_blocks != w[1].a_blocks {
            return Err(Error::InvalidInput(format!(
                "inclusions {} and {} do not compose",
                l + 1,
                l + 2
            )));
        }
    }
    let mut current = dims
        .iter()
        .map(|&d| MatrixUnitSystem::new(alloc::vec![1], alloc::vec![alloc::vec![Mat::identity(d)]]))
        .collect::<Result<Vec<_>>>()?;
    let mut tower = Vec::with_capacity(depth);
    for inc in &chain[..depth] {
        current = extend_matrix_units(inc, &current, None)?;
        tower.push(current.clone());
    }
    Ok(tower)
}
