//! The signal conditioned on a fixed observation window `y_0..y_N`.
//!
//! Conditioned on the observations the signal is still a Markov chain, now
//! with time-dependent kernels
//!
//! ```text
//! K_n[x][x'] = P[x][x'] g(x', y_n) B_n(x') / B_{n-1}(x),
//! B_n(x)     = E[ prod_{k=n+1..N} g(X_k, y_k) | X_n = x ],   B_N = 1.
//! ```
//!
//! Everything here is expressed through those kernels: conditioned
//! marginals, the merging functional `beta_n(z, z')` for two pinned starts,
//! the coupled pair chain, and the pinned smoother `P(X_0 | y_0..y_n, X_n)`.

use crate::error::{Error, Result};
use crate::filtering::{filter_run, likelihood_weights};
use crate::model::{tv_slices, Distribution, HmmModel, ObservationPath, TransitionKernel};

/// Backward variables `B_0..B_N`, each row renormalized to unit sum.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardTable {
    rows: Vec<Vec<f64>>,
    log_scales: Vec<f64>,
}

impl BackwardTable {
    /// Normalized row `B_n / sum_x B_n(x)`.
    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }

    pub fn horizon(&self) -> usize {
        self.rows.len() - 1
    }

    /// Log of the normalization removed from row `n` (relative to row `n+1`).
    pub fn log_scales(&self) -> &[f64] {
        &self.log_scales
    }

    /// `sum_{k >= n} log_scales[k]`, so that
    /// `ln B_n(x) = ln row(n)[x] + log_scale_from(n)`.
    pub fn log_scale_from(&self, n: usize) -> f64 {
        self.log_scales[n..].iter().sum()
    }

    pub fn log_value(&self, n: usize, x: usize) -> f64 {
        self.rows[n][x].ln() + self.log_scale_from(n)
    }
}

pub fn backward_table(model: &HmmModel, y: &ObservationPath) -> Result<BackwardTable> {
    model.check_path(y)?;
    let d = model.dim();
    let horizon = y.horizon();
    let mut rows = vec![Vec::new(); horizon + 1];
    let mut log_scales = vec![0.0; horizon + 1];
    rows[horizon] = vec![1.0 / d as f64; d];
    log_scales[horizon] = (d as f64).ln();
    for n in (1..=horizon).rev() {
        let (weights, shift) = likelihood_weights(model, y.get(n));
        let v: Vec<f64> = weights.iter().zip(&rows[n]).map(|(g, b)| g * b).collect();
        let mut prev = model.kernel.rows().iter().map(|r| dot(r, &v)).collect::<Vec<_>>();
        let total: f64 = prev.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::AllZeroRow { time: n - 1 });
        }
        prev.iter_mut().for_each(|b| *b /= total);
        rows[n - 1] = prev;
        log_scales[n - 1] = total.ln() + shift;
    }
    Ok(BackwardTable { rows, log_scales })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One conditional kernel `K_n`; rows whose normalizer vanishes are flagged
/// unreachable and left at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentKernel {
    rows: Vec<Vec<f64>>,
    reachable: Vec<bool>,
}

impl EnvironmentKernel {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn is_reachable(&self, x: usize) -> bool {
        self.reachable[x]
    }

    pub fn reachable(&self) -> &[bool] {
        &self.reachable
    }

    /// The kernel as a [`TransitionKernel`], if every row is reachable.
    pub fn as_transition_kernel(&self) -> Option<TransitionKernel> {
        self.reachable
            .iter()
            .all(|&r| r)
            .then(|| TransitionKernel::from_rows_unchecked(self.rows.clone()))
    }

    /// `law * K`; mass sitting on unreachable rows is dropped.
    pub fn apply(&self, law: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (x, &w) in law.iter().enumerate() {
            if w == 0.0 || !self.reachable[x] {
                continue;
            }
            for (o, k) in out.iter_mut().zip(&self.rows[x]) {
                *o += w * k;
            }
        }
        out
    }
}

/// Product chain on state pairs driven by one common environment step:
/// `Q[(x, x')][(z, z')] = K[x][z] K[x'][z']`. Pair `(x, x')` is indexed
/// `x * d + x'`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledKernel {
    dim: usize,
    rows: Vec<Vec<f64>>,
    reachable: Vec<bool>,
}

impl CoupledKernel {
    pub fn from_environment(kernel: &EnvironmentKernel) -> Self {
        let d = kernel.dim();
        let mut rows = Vec::with_capacity(d * d);
        let mut reachable = Vec::with_capacity(d * d);
        for x in 0..d {
            for xp in 0..d {
                let ok = kernel.is_reachable(x) && kernel.is_reachable(xp);
                reachable.push(ok);
                let mut row = vec![0.0; d * d];
                if ok {
                    for z in 0..d {
                        for zp in 0..d {
                            row[z * d + zp] = kernel.row(x)[z] * kernel.row(xp)[zp];
                        }
                    }
                }
                rows.push(row);
            }
        }
        Self { dim: d, rows, reachable }
    }

    pub fn pair_index(&self, x: usize, xp: usize) -> usize {
        x * self.dim + xp
    }

    pub fn row(&self, x: usize, xp: usize) -> &[f64] {
        &self.rows[self.pair_index(x, xp)]
    }

    pub fn is_reachable(&self, x: usize, xp: usize) -> bool {
        self.reachable[self.pair_index(x, xp)]
    }
}

/// The conditional kernels `K_1..K_N` for one observation window.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentKernelSequence {
    kernels: Vec<EnvironmentKernel>,
    /// `g(x, y_0) B_0(x)` up to a constant: reweights a start law into the
    /// conditional law of `X_0`.
    start_weights: Vec<f64>,
    path: ObservationPath,
}

pub fn conditional_kernels(model: &HmmModel, y: &ObservationPath) -> Result<EnvironmentKernelSequence> {
    let table = backward_table(model, y)?;
    let d = model.dim();
    let mut kernels = Vec::with_capacity(y.horizon());
    for n in 1..=y.horizon() {
        let (weights, _) = likelihood_weights(model, y.get(n));
        let v: Vec<f64> = weights.iter().zip(table.row(n)).map(|(g, b)| g * b).collect();
        let mut rows = Vec::with_capacity(d);
        let mut reachable = Vec::with_capacity(d);
        for x in 0..d {
            let mut row: Vec<f64> = model.kernel.row(x).iter().zip(&v).map(|(p, w)| p * w).collect();
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                row.iter_mut().for_each(|k| *k /= total);
                reachable.push(true);
            } else {
                row.iter_mut().for_each(|k| *k = 0.0);
                reachable.push(false);
            }
            rows.push(row);
        }
        kernels.push(EnvironmentKernel { rows, reachable });
    }
    let (w0, _) = likelihood_weights(model, y.get(0));
    let start_weights = w0.iter().zip(table.row(0)).map(|(g, b)| g * b).collect();
    Ok(EnvironmentKernelSequence {
        kernels,
        start_weights,
        path: y.clone(),
    })
}

/// `beta_n(z, z') = || P_{z,y}(X_n in .) - P_{z',y}(X_n in .) ||_TV` for
/// `n = 1..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaCurve {
    pub start: (usize, usize),
    /// `values[n - 1] = beta_n`.
    pub values: Vec<f64>,
}

impl BetaCurve {
    pub fn at(&self, n: usize) -> f64 {
        self.values[n - 1]
    }

    /// First `n` with `beta_n <= eps`.
    pub fn first_below(&self, eps: f64) -> Option<usize> {
        self.values.iter().position(|&b| b <= eps).map(|i| i + 1)
    }
}

impl EnvironmentKernelSequence {
    pub fn horizon(&self) -> usize {
        self.kernels.len()
    }

    pub fn dim(&self) -> usize {
        self.start_weights.len()
    }

    pub fn path(&self) -> &ObservationPath {
        &self.path
    }

    /// `K_n` for `n = 1..=N`.
    pub fn kernel(&self, n: usize) -> &EnvironmentKernel {
        &self.kernels[n - 1]
    }

    pub fn kernels(&self) -> &[EnvironmentKernel] {
        &self.kernels
    }

    pub fn coupled_kernel(&self, n: usize) -> CoupledKernel {
        CoupledKernel::from_environment(self.kernel(n))
    }

    /// `law * K_{from+1} ... K_to`.
    pub fn propagate(&self, law: &[f64], from: usize, to: usize) -> Vec<f64> {
        let mut out = law.to_vec();
        for k in &self.kernels[from..to] {
            out = k.apply(&out);
        }
        out
    }

    /// Conditional law of `X_0` given `y_0..y_N` for a start law.
    pub fn conditioned_start(&self, start: &Distribution) -> Result<Vec<f64>> {
        let mut w: Vec<f64> = start
            .weights()
            .iter()
            .zip(&self.start_weights)
            .map(|(p, b)| p * b)
            .collect();
        let total: f64 = w.iter().sum();
        if !(total > 0.0) {
            return Err(Error::DegenerateFilter { time: 0 });
        }
        w.iter_mut().for_each(|v| *v /= total);
        Ok(w)
    }

    /// `P(X_n in . | y_0..y_N)` for `X_0 ~ start`.
    pub fn conditioned_marginal(&self, start: &Distribution, n: usize) -> Result<Distribution> {
        if n > self.horizon() {
            return Err(Error::IndexOutOfRange {
                index: n,
                limit: self.horizon(),
            });
        }
        let w = self.conditioned_start(start)?;
        Ok(Distribution::from_weights_unchecked(self.propagate(&w, 0, n)))
    }

    /// Whether a start pinned at `z` has a conditional future.
    pub fn is_reachable_start(&self, z: usize) -> bool {
        match self.kernels.first() {
            Some(k) => k.is_reachable(z),
            None => true,
        }
    }

    fn check_starts(&self, z: usize, zp: usize) -> Result<()> {
        for s in [z, zp] {
            if s >= self.dim() {
                return Err(Error::IndexOutOfRange {
                    index: s,
                    limit: self.dim(),
                });
            }
            if !self.is_reachable_start(s) {
                return Err(Error::UnreachableStart { state: s });
            }
        }
        Ok(())
    }

    /// Laws of `X_n` pinned at `X_0 = z`, for `n = 0..=N`. The time-0
    /// observation does not reweight a pinned start.
    fn pinned_laws(&self, z: usize) -> Vec<Vec<f64>> {
        let mut laws = Vec::with_capacity(self.horizon() + 1);
        let mut law = Distribution::point(self.dim(), z).into_weights();
        laws.push(law.clone());
        for k in &self.kernels {
            law = k.apply(&law);
            laws.push(law.clone());
        }
        laws
    }

    /// Propagates the signed difference of the two pinned laws rather than
    /// the laws themselves, so small values keep their relative precision
    /// instead of bottoming out at the rounding level of a difference of
    /// near-equal laws.
    pub fn beta_curve(&self, z: usize, zp: usize) -> Result<BetaCurve> {
        self.check_starts(z, zp)?;
        let mut diff = vec![0.0; self.dim()];
        diff[z] += 1.0;
        diff[zp] -= 1.0;
        let values = self
            .kernels
            .iter()
            .map(|k| {
                diff = k.apply(&diff);
                diff.iter().map(|v| v.abs()).sum()
            })
            .collect();
        Ok(BetaCurve {
            start: (z, zp),
            values,
        })
    }

    /// Smallest `n in 1..=N` at which the two pinned laws share a state of
    /// positive mass under both; `None` if they stay mutually singular.
    pub fn irreducibility_check(&self, z: usize, zp: usize) -> Result<Option<usize>> {
        self.check_starts(z, zp)?;
        let a = self.pinned_laws(z);
        let b = self.pinned_laws(zp);
        Ok((1..=self.horizon())
            .find(|&n| a[n].iter().zip(&b[n]).any(|(p, q)| *p > 0.0 && *q > 0.0)))
    }

    /// Largest value of
    /// `beta_{n+1}(z, z') - sum_{(w, w')} Q_1[(z, z')][(w, w')] beta'_n(w, w')`
    /// over reachable start pairs and `0 <= n < horizon`, where `beta'` is
    /// the merging functional of the window shifted by one step (kernels
    /// `K_2, K_3, ...`). Nonpositive up to rounding.
    pub fn submartingale_check(&self, horizon: usize) -> Result<f64> {
        if horizon + 1 > self.horizon() {
            return Err(Error::IndexOutOfRange {
                index: horizon + 1,
                limit: self.horizon(),
            });
        }
        let d = self.dim();
        let first = self.kernel(1);
        let coupled = CoupledKernel::from_environment(first);
        // shifted[w][n] = law of X_{n+1} given X_1 = w, n = 0..=horizon
        let shifted: Vec<Vec<Vec<f64>>> = (0..d)
            .map(|w| {
                let mut law = Distribution::point(d, w).into_weights();
                let mut laws = vec![law.clone()];
                for k in &self.kernels[1..=horizon] {
                    law = k.apply(&law);
                    laws.push(law.clone());
                }
                laws
            })
            .collect();
        let mut worst = f64::NEG_INFINITY;
        for n in 0..horizon {
            let beta_shift: Vec<f64> = (0..d * d)
                .map(|i| tv_slices(&shifted[i / d][n], &shifted[i % d][n]))
                .collect();
            let unshifted: Vec<Vec<f64>> = (0..d)
                .map(|z| {
                    let mut law = vec![0.0; d];
                    if first.is_reachable(z) {
                        for (w, &k) in first.row(z).iter().enumerate() {
                            if k > 0.0 {
                                law.iter_mut().zip(&shifted[w][n]).for_each(|(l, s)| *l += k * s);
                            }
                        }
                    }
                    law
                })
                .collect();
            for z in 0..d {
                for zp in 0..d {
                    if !coupled.is_reachable(z, zp) {
                        continue;
                    }
                    let lhs = tv_slices(&unshifted[z], &unshifted[zp]);
                    let rhs: f64 = dot(coupled.row(z, zp), &beta_shift);
                    worst = worst.max(lhs - rhs);
                }
            }
        }
        Ok(worst)
    }
}

pub fn conditioned_marginal(
    model: &HmmModel,
    y: &ObservationPath,
    start: &Distribution,
    n: usize,
) -> Result<Distribution> {
    model.check_prior(start)?;
    conditional_kernels(model, y)?.conditioned_marginal(start, n)
}

pub fn beta_curve(model: &HmmModel, y: &ObservationPath, z: usize, zp: usize) -> Result<BetaCurve> {
    conditional_kernels(model, y)?.beta_curve(z, zp)
}

pub fn irreducibility_check(
    kernels: &EnvironmentKernelSequence,
    z: usize,
    zp: usize,
) -> Result<Option<usize>> {
    kernels.irreducibility_check(z, zp)
}

pub fn submartingale_check(kernels: &EnvironmentKernelSequence, horizon: usize) -> Result<f64> {
    kernels.submartingale_check(horizon)
}

/// `P(X_0 = . | y_0..y_n, X_n = x)` for each terminal state `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PinnedSmoother {
    /// `None` for terminal states of zero posterior mass.
    pub rows: Vec<Option<Distribution>>,
    /// `P(X_n | y_0..y_n)` from the same joint pass.
    pub terminal: Distribution,
    /// `P(X_0 | y_0..y_n)` from the same joint pass.
    pub initial: Distribution,
}

impl PinnedSmoother {
    /// `sum_x terminal[x] * rows[x]`.
    pub fn mixed_initial(&self) -> Vec<f64> {
        let d = self.terminal.dim();
        let mut out = vec![0.0; d];
        for (x, row) in self.rows.iter().enumerate() {
            if let Some(row) = row {
                for (o, r) in out.iter_mut().zip(row.weights()) {
                    *o += self.terminal[x] * r;
                }
            }
        }
        out
    }
}

/// Forward pass over the joint law of `(X_0, X_k)`, renormalized each step.
pub fn pinned_smoother(
    model: &HmmModel,
    y: &ObservationPath,
    prior: &Distribution,
    n: usize,
) -> Result<PinnedSmoother> {
    model.check_prior(prior)?;
    model.check_path(y)?;
    if n > y.horizon() {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: y.horizon(),
        });
    }
    let d = model.dim();
    // joint[x0 * d + x]
    let mut joint = vec![0.0; d * d];
    let (w0, _) = likelihood_weights(model, y.get(0));
    for x in 0..d {
        joint[x * d + x] = prior[x] * w0[x];
    }
    normalize_joint(&mut joint, 0)?;
    for k in 1..=n {
        let (w, _) = likelihood_weights(model, y.get(k));
        let mut next = vec![0.0; d * d];
        for x0 in 0..d {
            let from = &joint[x0 * d..(x0 + 1) * d];
            let to = model.kernel.apply_slice(from);
            for x in 0..d {
                next[x0 * d + x] = to[x] * w[x];
            }
        }
        normalize_joint(&mut next, k)?;
        joint = next;
    }
    let mut terminal = vec![0.0; d];
    let mut initial = vec![0.0; d];
    for x0 in 0..d {
        for x in 0..d {
            terminal[x] += joint[x0 * d + x];
            initial[x0] += joint[x0 * d + x];
        }
    }
    let rows = (0..d)
        .map(|x| {
            (terminal[x] > 0.0).then(|| {
                Distribution::from_weights_unchecked(
                    (0..d).map(|x0| joint[x0 * d + x] / terminal[x]).collect(),
                )
            })
        })
        .collect();
    Ok(PinnedSmoother {
        rows,
        terminal: Distribution::from_weights_unchecked(terminal),
        initial: Distribution::from_weights_unchecked(initial),
    })
}

fn normalize_joint(joint: &mut [f64], time: usize) -> Result<()> {
    let total: f64 = joint.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegenerateFilter { time });
    }
    joint.iter_mut().for_each(|v| *v /= total);
    Ok(())
}

/// `sum_x Pi_n(x) || P(X_0 | y_0..n, X_n = x) - P(X_0 | y_0..n) ||_TV`: how
/// much pinning the current state still tells about the initial one.
pub fn merge_distance(
    model: &HmmModel,
    y: &ObservationPath,
    prior: &Distribution,
    n: usize,
) -> Result<f64> {
    let pinned = pinned_smoother(model, y, prior, n)?;
    let window = y.prefix(n);
    let filter = filter_run(model, prior, &window)?;
    let smoothed_start = conditional_kernels(model, &window)?.conditioned_start(prior)?;
    let pi_n = filter.last();
    Ok(pinned
        .rows
        .iter()
        .enumerate()
        .filter_map(|(x, row)| row.as_ref().map(|r| pi_n[x] * tv_slices(r.weights(), &smoothed_start)))
        .sum())
}
