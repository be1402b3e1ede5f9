//! Two-point decompositions certifying that a point of `F0+ ∩ F_s+` lies in
//! the conic hull of `F0+ ∩ F1`, plus the samplers used to feed them.
//!
//! Given `d ∈ Null(A_s)` with `dᵀA1d < 0`, the line `x + εd` keeps the value
//! of `A_s` fixed and crosses the boundary of `F1` at two roots `ε- < 0 < ε+`.
//! The crossing points are the endpoints of the decomposition.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cutgen::{ConeInstance, CutResult};
use crate::error::{Error, Result};
use crate::options::{rng, Stream};
use crate::socr::SocrCone;
use crate::spectral::sym_eigen;

/// Relative tolerance for endpoint membership and reconstruction.
pub const CERT_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub x_l: DVector<f64>,
    pub x_u: DVector<f64>,
    pub eps_l: f64,
    pub eps_u: f64,
    /// `x = weight·x_l + (1 - weight)·x_u`.
    pub weight: f64,
    pub trivial: bool,
}

impl Decomposition {
    pub fn reconstruct(&self) -> DVector<f64> {
        &self.x_l * self.weight + &self.x_u * (1.0 - self.weight)
    }
}

/// Split `x` along `d` into two points of `F0+ ∩ bd(F1)`.
pub fn decompose_point(x: &DVector<f64>, inst: &ConeInstance, d: &DVector<f64>) -> Result<Decomposition> {
    let n = inst.dim();
    if x.len() != n || d.len() != n {
        return Err(Error::Dimension(format!(
            "point/direction lengths {}/{} against dimension {n}",
            x.len(),
            d.len()
        )));
    }
    let a1 = &inst.a1;
    let scale = sym_eigen(a1)?.scale();
    let tol = inst.opts.tol;
    let c = a1.quad(x);
    let a = a1.quad(d);
    if a >= -tol * scale * d.norm_squared() {
        return Err(Error::InvalidWitness(a));
    }
    if c <= tol * scale * x.norm_squared() {
        return Ok(Decomposition {
            x_l: x.clone(),
            x_u: x.clone(),
            eps_l: 0.0,
            eps_u: 0.0,
            weight: 1.0,
            trivial: true,
        });
    }
    let b = a1.bilinear(d, x);
    let mut disc = b * b - a * c;
    if disc < 0.0 {
        if disc < -tol * scale * scale * (x.norm_squared() * d.norm_squared()) {
            return Err(Error::Domain(format!("negative discriminant {disc:e}")));
        }
        disc = 0.0;
    }
    // a ε² + 2 b ε + c = 0, in cancellation-free form.
    let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -(b + sgn * disc.sqrt());
    let (r1, r2) = (q / a, c / q);
    let (eps_l, eps_u) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    let x_l = x + d * eps_l;
    let x_u = x + d * eps_u;
    for e in [&x_l, &x_u] {
        let bx = inst.cone0.b().dot(e);
        if bx < -CERT_TOL * inst.cone0.scale() * e.norm().max(x.norm()) {
            return Err(Error::EndpointOutsideCone(bx));
        }
    }
    Ok(Decomposition {
        x_l,
        x_u,
        eps_l,
        eps_u,
        weight: eps_u / (eps_u - eps_l),
        trivial: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleSet {
    F0F1,
    F0Fs,
    F0FsH1,
    F0F1H1,
    FsH1,
}

impl std::str::FromStr for SampleSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "F0F1" => SampleSet::F0F1,
            "F0Fs" => SampleSet::F0Fs,
            "F0FsH1" => SampleSet::F0FsH1,
            "F0F1H1" => SampleSet::F0F1H1,
            "FsH1" => SampleSet::FsH1,
            other => return Err(Error::Input(format!("unknown sample set {other}"))),
        })
    }
}

impl SampleSet {
    fn on_h1(self) -> bool {
        matches!(self, SampleSet::F0FsH1 | SampleSet::F0F1H1 | SampleSet::FsH1)
    }

    fn uses_cut(self) -> bool {
        !matches!(self, SampleSet::F0F1 | SampleSet::F0F1H1)
    }
}

/// Smallest `θ ∈ (0, 1]` with `(p + θ(q - p))ᵀA1(…) = 0`, given `pᵀA1p ≤ 0 < qᵀA1q`.
fn boundary_crossing(inst: &ConeInstance, p: &DVector<f64>, q: &DVector<f64>) -> Option<DVector<f64>> {
    let dir = q - p;
    let a = inst.a1.quad(&dir);
    let b = inst.a1.bilinear(p, &dir);
    let c = inst.a1.quad(p);
    // a θ² + 2bθ + c, c ≤ 0, value at 1 positive: take the root in (0, 1].
    let theta = if a.abs() < 1e-300 {
        if b <= 0.0 {
            return None;
        }
        -c / (2.0 * b)
    } else {
        let disc = (b * b - a * c).max(0.0).sqrt();
        let roots = [(-b - disc) / a, (-b + disc) / a];
        roots
            .into_iter()
            .filter(|t| *t >= 0.0 && *t <= 1.0)
            .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |v| v.min(t))))?
    };
    Some(p + dir * theta)
}

struct Sampler<'a> {
    inst: &'a ConeInstance,
    cone_s: Option<&'a SocrCone>,
    xbar: Option<&'a DVector<f64>>,
    which: SampleSet,
    tol: f64,
}

impl Sampler<'_> {
    fn accepts(&self, x: &DVector<f64>) -> bool {
        let tol = self.tol;
        let in0 = || self.inst.cone0.contains(x, tol);
        let in1 = || self.inst.a1.quad(x) <= tol * self.inst.a1.max_abs().max(1.0) * x.norm_squared();
        let ins = || self.cone_s.is_none_or(|c| c.contains(x, tol));
        match self.which {
            SampleSet::F0F1 | SampleSet::F0F1H1 => in0() && in1(),
            SampleSet::F0Fs | SampleSet::F0FsH1 => in0() && ins(),
            SampleSet::FsH1 => ins(),
        }
    }

    fn to_h1(&self, x: DVector<f64>) -> Option<DVector<f64>> {
        if !self.which.on_h1() {
            return Some(x);
        }
        let h = self.inst.h.as_ref()?;
        let hx = h.dot(&x);
        if hx <= 1e-9 * h.norm() * x.norm() {
            return None;
        }
        Some(x / hx)
    }

    fn candidate<R: Rng>(&self, r: &mut R, k: usize) -> Option<DVector<f64>> {
        let inst = self.inst;
        let boundary = k % 4 == 1;
        let raw = match (self.which, self.cone_s) {
            (SampleSet::FsH1, Some(c)) => c.sample(r, boundary),
            (SampleSet::F0Fs | SampleSet::F0FsH1, Some(c)) if k.is_multiple_of(2) => c.sample(r, boundary),
            _ => inst.cone0.sample(r, boundary),
        };
        let is_f1_set = matches!(self.which, SampleSet::F0F1 | SampleSet::F0F1H1);
        let x = if is_f1_set && k % 5 == 2 && inst.a1.quad(&raw) > 0.0 {
            // Push onto bd(F1) towards the interior point.
            boundary_crossing(inst, self.xbar?, &raw)?
        } else if is_f1_set && k % 11 == 3 {
            let xb = self.xbar?;
            let noise = DVector::from_fn(xb.len(), |_, _| r.gen_range(-0.5..0.5)) * xb.norm();
            (xb + noise) * (0.1 + 2.0 * r.gen::<f64>())
        } else {
            raw
        };
        self.to_h1(x)
    }
}

/// Points of the requested set, deterministic per seed. Sets involving `F_s`
/// need `cut`; sets on `H1` need `inst.h`.
pub fn sample_set(
    inst: &ConeInstance,
    cut: Option<&CutResult>,
    which: SampleSet,
    n: usize,
    seed: u64,
) -> Result<Vec<DVector<f64>>> {
    if which.uses_cut() && cut.is_none() {
        return Err(Error::Input(format!("{which:?} needs a cut")));
    }
    if which.on_h1() && inst.h.is_none() {
        return Err(Error::Input(format!("{which:?} needs a hyperplane h")));
    }
    let sampler = Sampler {
        inst,
        cone_s: cut.and_then(|c| c.cone()),
        xbar: cut.map(|c| &c.xbar),
        which,
        tol: inst.opts.tol,
    };
    let mut r = rng(seed, Stream::Sample);
    let mut out = Vec::with_capacity(n);
    let max_attempts = 2000 * n + 10_000;
    let mut k = 0usize;
    // Apex rays and x̄ copies come first so small runs still see them.
    let mut extras: Vec<DVector<f64>> = Vec::new();
    if n > 0 {
        if let Some(xb) = sampler.xbar {
            extras.push(xb.clone());
            extras.push(xb * 3.0);
        }
        let apex = inst.cone0.apex_basis();
        for j in 0..apex.ncols() {
            let z = apex.column(j).into_owned();
            extras.push(z.clone());
            extras.push(-z);
        }
    }
    for x in extras {
        if out.len() >= n / 10 {
            break;
        }
        if let Some(y) = sampler.to_h1(x) {
            if sampler.accepts(&y) {
                out.push(y);
            }
        }
    }
    while out.len() < n && k < max_attempts {
        if let Some(x) = sampler.candidate(&mut r, k) {
            if x.iter().all(|v| v.is_finite()) && sampler.accepts(&x) {
                out.push(x);
            }
        }
        k += 1;
    }
    if out.len() < n {
        return Err(Error::EmptySet {
            found: out.len(),
            wanted: n,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertMode {
    /// Homogeneous instance, Condition 4 witness.
    Cone,
    /// On `H1` with a witness in `H0`.
    Apex,
    /// On `H1` with a witness off `H0`; crossings through `H0` are checked
    /// explicitly.
    Crossing,
}

#[derive(Debug, Clone)]
pub struct CertFailure {
    pub x: DVector<f64>,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct CertReport {
    pub mode: CertMode,
    pub heuristic: bool,
    pub n_certified: usize,
    pub n_failed: usize,
    pub max_reconstruction: f64,
    pub max_endpoint_violation: f64,
    pub failures: Vec<CertFailure>,
}

/// Largest violation of `F0+ ∩ F1` membership at `e`, relative to `‖e‖²`
/// and the size of the matrices.
fn endpoint_violation(inst: &ConeInstance, e: &DVector<f64>) -> f64 {
    let nn = e.norm_squared().max(1e-300);
    let v0 = inst.a0.quad(e).max(0.0) / (nn * inst.a0.max_abs().max(1.0));
    let v1 = inst.a1.quad(e).max(0.0) / (nn * inst.a1.max_abs().max(1.0));
    let vb = (-inst.cone0.b().dot(e)).max(0.0) / e.norm().max(1e-300);
    v0.max(v1).max(vb)
}

/// Decompose sampled points of `F0+ ∩ F_s+` (on `H1` when the instance has
/// a hyperplane) and collect failures.
pub fn certify_hull(inst: &ConeInstance, cut: &CutResult, n_samples: usize, seed: u64) -> Result<CertReport> {
    let tol = inst.opts.tol;
    let (mode, d) = match (&inst.h, cut.report.cond5_witness(), cut.report.cond4_witness()) {
        (None, _, Some(d)) => (CertMode::Cone, d.clone()),
        (Some(_), Some(d), _) => (CertMode::Apex, d.clone()),
        (Some(_), None, Some(d)) => (CertMode::Crossing, d.clone()),
        _ => return Err(Error::Precondition("no Condition 4 witness to decompose with".into())),
    };
    let which = if inst.h.is_some() { SampleSet::F0FsH1 } else { SampleSet::F0Fs };
    let mut r = rng(seed, Stream::Certify);
    let pts = sample_set(inst, Some(cut), which, n_samples, r.gen())?;
    let mut rep = CertReport {
        mode,
        heuristic: mode == CertMode::Crossing,
        n_certified: 0,
        n_failed: 0,
        max_reconstruction: 0.0,
        max_endpoint_violation: 0.0,
        failures: Vec::new(),
    };
    for x in pts {
        match certify_point(inst, &x, &d, mode, tol) {
            Ok((recon, viol)) => {
                rep.n_certified += 1;
                rep.max_reconstruction = rep.max_reconstruction.max(recon);
                rep.max_endpoint_violation = rep.max_endpoint_violation.max(viol);
            }
            Err(reason) => {
                rep.n_failed += 1;
                rep.failures.push(CertFailure { x, reason });
            }
        }
    }
    Ok(rep)
}

fn certify_point(
    inst: &ConeInstance,
    x: &DVector<f64>,
    d: &DVector<f64>,
    mode: CertMode,
    tol: f64,
) -> std::result::Result<(f64, f64), String> {
    let dec = decompose_point(x, inst, d).map_err(|e| e.to_string())?;
    let recon = (dec.reconstruct() - x).norm() / x.norm().max(1e-300);
    let viol = endpoint_violation(inst, &dec.x_l).max(endpoint_violation(inst, &dec.x_u));
    if recon > CERT_TOL || viol > CERT_TOL {
        return Err(format!("reconstruction {recon:e}, endpoint violation {viol:e}"));
    }
    if mode == CertMode::Crossing && !dec.trivial {
        let h = inst.h.as_ref().expect("crossing mode has h");
        let hx = h.dot(x);
        for e in [&dec.x_l, &dec.x_u] {
            let he = h.dot(e);
            if he >= -tol * h.norm() * e.norm() {
                continue;
            }
            // Combine x and the endpoint into a point of H0; it must lie in F1.
            let y = e * hx - x * he;
            let yv = inst.a1.quad(&y);
            if yv > CERT_TOL * inst.a1.max_abs().max(1.0) * y.norm_squared() {
                return Err(format!(
                    "endpoint crosses H0 (hᵀe = {he:.3e}) and the H0 combination is outside F1 ({yv:.3e})"
                ));
            }
        }
    }
    Ok((recon, viol))
}
