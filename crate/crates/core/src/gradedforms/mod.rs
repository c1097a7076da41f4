//! Horizontal forms, vertical multivectors and the graded Poisson bracket on
//! the polymomentum phase space `(xⁱ, yᵃ, pⁱₐ)`.
//!
//! Every coordinate doubles as a polynomial variable and as a differential:
//! `xⁱ ↦ i`, `yᵃ ↦ n + a`, `pⁱₐ ↦ n + m + a·n + i`. Horizontal forms only
//! carry `dxⁱ` factors; the vertical differential adds one `dzᵛ` on the left.
//!
//! The polysymplectic form `Ω = −dyᵃ ∧ dpⁱₐ ∧ ωᵢ`, `ωᵢ = ∂ᵢ ⌟ ω`, maps a
//! horizontal `q`-form `F` to a vertical multivector `X` of degree `n − q`
//! with `X ⌟ Ω = dⱽF`. For `q = n` the map targets tangent-valued one-forms
//! `X̃ = X̃ᵛₖ dxᵏ ⊗ ∂ᵥ` acting as `X̃ ⌟ α = X̃ᵛₖ dxᵏ ∧ (∂ᵥ ⌟ α)`.
//!
//! The map is found by solving the linear system obtained from expanding the
//! contraction on basis multivectors. Free (kernel) components are set to
//! zero; [`hamiltonian_kernel`] exposes the kernel so callers can check that
//! brackets do not depend on that choice.

mod exterior;
mod linear;
mod motion;
pub mod poly;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use crate::clifford::Metric;
use crate::error::{Error, Result};

pub use exterior::ExteriorForm;
pub use motion::{equation_of_motion_residual, MotionResidual};
pub use poly::{rational, Monomial, Poly};
pub use text::{parse_form, render_poly};

use linear::{ReducedSystem, Solve};

/// Variable registry of the polymomentum phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseContext {
    n: usize,
    m: usize,
}

impl PhaseContext {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter(format!(
                "phase context needs n >= 1 and m >= 1, got n = {n}, m = {m}"
            )));
        }
        if n + m + n * m > 63 {
            return Err(Error::InvalidParameter(format!(
                "phase context with n = {n}, m = {m} exceeds 63 coordinates"
            )));
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_coords(&self) -> usize {
        self.n + self.m + self.n * self.m
    }

    pub fn num_vertical(&self) -> usize {
        self.m + self.n * self.m
    }

    pub fn x_index(&self, i: usize) -> usize {
        i
    }

    pub fn y_index(&self, a: usize) -> usize {
        self.n + a
    }

    pub fn p_index(&self, i: usize, a: usize) -> usize {
        self.n + self.m + a * self.n + i
    }

    pub fn x(&self, i: usize) -> Poly {
        Poly::var(self.x_index(i))
    }

    pub fn y(&self, a: usize) -> Poly {
        Poly::var(self.y_index(a))
    }

    pub fn p(&self, i: usize, a: usize) -> Poly {
        Poly::var(self.p_index(i, a))
    }

    pub fn vertical_coords(&self) -> std::ops::Range<usize> {
        self.n..self.num_coords()
    }

    pub fn horizontal_mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    pub fn volume_mask(&self) -> u64 {
        self.horizontal_mask()
    }

    /// Mask of `ωᵢ` and the sign with which it carries that basis element.
    pub fn omega_i(&self, i: usize) -> (u64, i64) {
        let mask = self.horizontal_mask() & !(1u64 << i);
        let sign = if i % 2 == 0 { 1 } else { -1 };
        (mask, sign)
    }

    pub fn coord_name(&self, c: usize) -> String {
        if c < self.n {
            format!("x[{c}]")
        } else if c < self.n + self.m {
            format!("y[{}]", c - self.n)
        } else {
            let k = c - self.n - self.m;
            format!("p[{},{}]", k % self.n, k / self.n)
        }
    }

    /// `½ pⁱₐ pₐ,ᵢ + V`, with the spacetime index lowered by the metric and `V`
    /// given in field variables `0..m`.
    pub fn dw_hamiltonian(&self, metric: &Metric, potential: &Poly) -> Result<Poly> {
        if metric.dim() != self.n {
            return Err(Error::MetricMismatch);
        }
        let mut h = potential.map_vars(|a| self.y_index(a));
        let half = rational(1, 2);
        for a in 0..self.m {
            for i in 0..self.n {
                let p = self.p(i, a);
                let g = rational(i64::from(metric.diag()[i]), 1);
                h += &(&p * &p).scale(&(&half * &g));
            }
        }
        Ok(h)
    }
}

/// A horizontal form `(1/q!) F_I dx^I` with polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorizontalForm {
    ctx: PhaseContext,
    degree: usize,
    form: ExteriorForm,
}

impl HorizontalForm {
    pub fn zero(ctx: PhaseContext, degree: usize) -> Result<Self> {
        Self::from_exterior(ctx, degree, ExteriorForm::zero())
    }

    pub fn from_exterior(ctx: PhaseContext, degree: usize, form: ExteriorForm) -> Result<Self> {
        if degree > ctx.n {
            return Err(Error::UnsupportedDegree { degree, n: ctx.n });
        }
        if !form.supported_on(ctx.horizontal_mask()) {
            return Err(Error::InvalidParameter(
                "horizontal form carries vertical differentials".into(),
            ));
        }
        if form
            .terms()
            .any(|(m, _)| m.count_ones() as usize != degree)
        {
            return Err(Error::InvalidParameter(format!(
                "form is not homogeneous of degree {degree}"
            )));
        }
        Ok(Self { ctx, degree, form })
    }

    /// A function viewed as a 0-form.
    pub fn function(ctx: PhaseContext, f: Poly) -> Self {
        Self {
            ctx,
            degree: 0,
            form: ExteriorForm::basis(0, f),
        }
    }

    /// `f ω`.
    pub fn top(ctx: PhaseContext, f: Poly) -> Self {
        Self {
            ctx,
            degree: ctx.n,
            form: ExteriorForm::basis(ctx.volume_mask(), f),
        }
    }

    /// `Σᵢ Fⁱ ωᵢ`.
    pub fn current(ctx: PhaseContext, components: &[Poly]) -> Result<Self> {
        if components.len() != ctx.n {
            return Err(Error::InvalidParameter(format!(
                "expected {} current components, got {}",
                ctx.n,
                components.len()
            )));
        }
        let mut form = ExteriorForm::zero();
        for (i, f) in components.iter().enumerate() {
            let (mask, sign) = ctx.omega_i(i);
            form.add_term(mask, f.scale(&rational(sign, 1)));
        }
        Ok(Self {
            ctx,
            degree: ctx.n - 1,
            form,
        })
    }

    /// `f ωᵢ`.
    pub fn omega_i(ctx: PhaseContext, i: usize, f: Poly) -> Self {
        let mut comps = vec![Poly::zero(); ctx.n];
        comps[i] = f;
        Self::current(ctx, &comps).expect("component count matches")
    }

    /// The polymomentum form `pₐ = pⁱₐ ωᵢ`.
    pub fn polymomentum(ctx: PhaseContext, a: usize) -> Self {
        let comps: Vec<Poly> = (0..ctx.n).map(|i| ctx.p(i, a)).collect();
        Self::current(ctx, &comps).expect("component count matches")
    }

    pub fn ctx(&self) -> PhaseContext {
        self.ctx
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn exterior(&self) -> &ExteriorForm {
        &self.form
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }

    /// Coefficient on the increasing multi-index `mask`.
    pub fn coeff(&self, mask: u64) -> Poly {
        self.form.coeff(mask)
    }

    /// For an `(n−1)`-form, the components `Fⁱ` in `Σ Fⁱ ωᵢ`.
    pub fn current_components(&self) -> Option<Vec<Poly>> {
        if self.degree + 1 != self.ctx.n {
            return None;
        }
        Some(
            (0..self.ctx.n)
                .map(|i| {
                    let (mask, sign) = self.ctx.omega_i(i);
                    self.form.coeff(mask).scale(&rational(sign, 1))
                })
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx || self.degree != other.degree {
            return Err(Error::InvalidParameter(
                "sum of forms with different degree or context".into(),
            ));
        }
        Ok(Self {
            ctx: self.ctx,
            degree: self.degree,
            form: self.form.add(&other.form),
        })
    }

    pub fn scale(&self, p: &Poly) -> Self {
        Self {
            ctx: self.ctx,
            degree: self.degree,
            form: self.form.scale(p),
        }
    }
}

impl fmt::Display for HorizontalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", text::render_form(self))
    }
}

fn check_degree(ctx: &PhaseContext, q: usize) -> Result<()> {
    let n = ctx.n;
    if q == 0 || q == n || q + 1 == n {
        Ok(())
    } else {
        Err(Error::UnsupportedDegree { degree: q, n })
    }
}

/// `dⱽF = dzᵛ ∧ ∂ᵥF`, horizontal coordinates held fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerticalDifferential {
    form: ExteriorForm,
    degree: usize,
}

impl VerticalDifferential {
    pub fn exterior(&self) -> &ExteriorForm {
        &self.form
    }

    /// Horizontal degree of the source form.
    pub fn source_degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `dzᵛ ∧ dx^I`.
    pub fn coeff(&self, v: usize, horizontal: u64) -> Poly {
        let sign = if horizontal.count_ones() % 2 == 0 { 1 } else { -1 };
        self.form
            .coeff(horizontal | (1u64 << v))
            .scale(&rational(sign, 1))
    }
}

pub fn vertical_differential(f: &HorizontalForm) -> Result<VerticalDifferential> {
    check_degree(&f.ctx, f.degree)?;
    Ok(VerticalDifferential {
        form: vertical_differential_raw(f),
        degree: f.degree,
    })
}

fn vertical_differential_raw(f: &HorizontalForm) -> ExteriorForm {
    let mut out = ExteriorForm::zero();
    for v in f.ctx.vertical_coords() {
        let d = f.form.map_coeffs(|c| c.derivative(v));
        out = out.add(&d.wedge_left(v));
    }
    out
}

/// The canonical polysymplectic form of a [`PhaseContext`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polysymplectic {
    ctx: PhaseContext,
    form: ExteriorForm,
}

impl Polysymplectic {
    pub fn new(ctx: PhaseContext) -> Self {
        let volume = ExteriorForm::basis(ctx.volume_mask(), Poly::one());
        let mut form = ExteriorForm::zero();
        for a in 0..ctx.m {
            for i in 0..ctx.n {
                let term = volume
                    .interior(ctx.x_index(i))
                    .wedge_left(ctx.p_index(i, a))
                    .wedge_left(ctx.y_index(a));
                form = form.add(&term.neg());
            }
        }
        Self { ctx, form }
    }

    pub fn exterior(&self) -> &ExteriorForm {
        &self.form
    }
}

/// Vertical multivector assigned to a horizontal form by the polysymplectic
/// map. Every component carries exactly one vertical direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerticalMultivector {
    /// `Σ X^{v,J} ∂ᵥ ∧ ∂_J` with `J` an increasing horizontal multi-index of
    /// size `degree − 1`.
    Multivector {
        degree: usize,
        components: BTreeMap<(usize, u64), Poly>,
    },
    /// `Σ X̃ᵛₖ dxᵏ ⊗ ∂ᵥ`.
    TangentOneForm {
        components: BTreeMap<(usize, usize), Poly>,
    },
}

impl VerticalMultivector {
    /// Contraction into a phase-space form. `∂ᵥ` acts first, then the
    /// horizontal factors in increasing order.
    pub fn contract(&self, alpha: &ExteriorForm) -> ExteriorForm {
        let mut out = ExteriorForm::zero();
        match self {
            Self::Multivector { components, .. } => {
                for ((v, j), c) in components {
                    let mut t = alpha.interior(*v);
                    let mut rest = *j;
                    while rest != 0 {
                        let i = rest.trailing_zeros() as usize;
                        t = t.interior(i);
                        rest &= rest - 1;
                    }
                    out = out.add(&t.scale(c));
                }
            }
            Self::TangentOneForm { components } => {
                for ((v, k), c) in components {
                    let t = alpha.interior(*v).wedge_left(*k);
                    out = out.add(&t.scale(c));
                }
            }
        }
        out
    }

    pub fn component(&self, v: usize, horizontal: u64) -> Poly {
        match self {
            Self::Multivector { components, .. } => components
                .get(&(v, horizontal))
                .cloned()
                .unwrap_or_default(),
            Self::TangentOneForm { components } => {
                let k = horizontal.trailing_zeros() as usize;
                components.get(&(v, k)).cloned().unwrap_or_default()
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (
                Self::Multivector {
                    degree,
                    components: a,
                },
                Self::Multivector {
                    degree: d2,
                    components: b,
                },
            ) if degree == d2 => Ok(Self::Multivector {
                degree: *degree,
                components: merge(a, b),
            }),
            (Self::TangentOneForm { components: a }, Self::TangentOneForm { components: b }) => {
                Ok(Self::TangentOneForm {
                    components: merge(a, b),
                })
            }
            _ => Err(Error::InvalidParameter(
                "sum of vertical multivectors of different kinds".into(),
            )),
        }
    }

    pub fn scale(&self, p: &Poly) -> Self {
        fn scale_map<K: Ord + Copy>(m: &BTreeMap<K, Poly>, p: &Poly) -> BTreeMap<K, Poly> {
            m.iter()
                .map(|(k, c)| (*k, c * p))
                .filter(|(_, c)| !c.is_zero())
                .collect()
        }
        match self {
            Self::Multivector { degree, components } => Self::Multivector {
                degree: *degree,
                components: scale_map(components, p),
            },
            Self::TangentOneForm { components } => Self::TangentOneForm {
                components: scale_map(components, p),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Multivector { components, .. } => components.is_empty(),
            Self::TangentOneForm { components } => components.is_empty(),
        }
    }
}

fn merge<K: Ord + Copy>(a: &BTreeMap<K, Poly>, b: &BTreeMap<K, Poly>) -> BTreeMap<K, Poly> {
    let mut out = a.clone();
    for (k, c) in b {
        let slot = out.entry(*k).or_default();
        *slot += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unknown {
    Multi(usize, u64),
    Tangent(usize, usize),
}

/// The linear system `X ⌟ Ω = ·` for a fixed horizontal degree.
struct PolysymplecticSystem {
    ctx: PhaseContext,
    degree: usize,
    unknowns: Vec<Unknown>,
    rows: Vec<u64>,
    reduced: ReducedSystem,
}

fn masks_of_size(n: usize, size: usize) -> Vec<u64> {
    (0..(1u64 << n))
        .filter(|m| m.count_ones() as usize == size)
        .collect()
}

impl PolysymplecticSystem {
    fn new(ctx: PhaseContext, degree: usize) -> Result<Self> {
        check_degree(&ctx, degree)?;
        let omega = Polysymplectic::new(ctx);
        let unknowns: Vec<Unknown> = if degree < ctx.n {
            let js = masks_of_size(ctx.n, ctx.n - degree - 1);
            ctx.vertical_coords()
                .flat_map(|v| js.iter().map(move |&j| Unknown::Multi(v, j)))
                .collect()
        } else {
            ctx.vertical_coords()
                .flat_map(|v| (0..ctx.n).map(move |k| Unknown::Tangent(v, k)))
                .collect()
        };
        let images: Vec<ExteriorForm> = unknowns
            .iter()
            .map(|u| unit(ctx, degree, *u).contract(omega.exterior()))
            .collect();
        // one row per (one vertical + `degree` horizontal) basis element
        let mut rows = Vec::new();
        for v in ctx.vertical_coords() {
            for h in masks_of_size(ctx.n, degree) {
                rows.push(h | (1u64 << v));
            }
        }
        let matrix: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|&r| {
                images
                    .iter()
                    .map(|img| {
                        img.coeff(r)
                            .as_constant()
                            .expect("polysymplectic images have constant coefficients")
                    })
                    .collect()
            })
            .collect();
        let reduced = ReducedSystem::new(matrix, unknowns.len());
        Ok(Self {
            ctx,
            degree,
            unknowns,
            rows,
            reduced,
        })
    }

    fn assemble(&self, values: &[Poly]) -> VerticalMultivector {
        let mut multi = BTreeMap::new();
        let mut tangent = BTreeMap::new();
        for (u, c) in self.unknowns.iter().zip(values) {
            if c.is_zero() {
                continue;
            }
            match *u {
                Unknown::Multi(v, j) => {
                    multi.insert((v, j), c.clone());
                }
                Unknown::Tangent(v, k) => {
                    tangent.insert((v, k), c.clone());
                }
            }
        }
        if self.degree < self.ctx.n {
            VerticalMultivector::Multivector {
                degree: self.ctx.n - self.degree,
                components: multi,
            }
        } else {
            VerticalMultivector::TangentOneForm {
                components: tangent,
            }
        }
    }

    fn solve(&self, target: &ExteriorForm) -> Result<VerticalMultivector> {
        let row_set: std::collections::BTreeSet<u64> = self.rows.iter().copied().collect();
        if let Some((m, _)) = target.terms().find(|(m, _)| !row_set.contains(m)) {
            return Err(Error::NotHamiltonian(format!(
                "vertical differential has a component on basis {m:#b} outside the image of the polysymplectic map"
            )));
        }
        let rhs: Vec<Poly> = self.rows.iter().map(|&r| target.coeff(r)).collect();
        match self.reduced.solve(&rhs) {
            Solve::Solution(x) => Ok(self.assemble(&x)),
            Solve::Inconsistent(row) => Err(Error::NotHamiltonian(format!(
                "the polysymplectic equation has no solution (reduced row {row})"
            ))),
        }
    }

    fn kernel(&self) -> Vec<VerticalMultivector> {
        self.reduced
            .kernel()
            .into_iter()
            .map(|v| {
                let polys: Vec<Poly> = v.into_iter().map(Poly::constant).collect();
                self.assemble(&polys)
            })
            .collect()
    }
}

fn unit(ctx: PhaseContext, degree: usize, u: Unknown) -> VerticalMultivector {
    match u {
        Unknown::Multi(v, j) => VerticalMultivector::Multivector {
            degree: ctx.n - degree,
            components: BTreeMap::from([((v, j), Poly::one())]),
        },
        Unknown::Tangent(v, k) => VerticalMultivector::TangentOneForm {
            components: BTreeMap::from([((v, k), Poly::one())]),
        },
    }
}

/// Solves `X ⌟ Ω = dⱽF` (or `X̃ ⌟ Ω = dⱽ(Fω)` for top forms), with kernel
/// components set to zero.
pub fn hamiltonian_multivector(f: &HorizontalForm) -> Result<VerticalMultivector> {
    let system = PolysymplecticSystem::new(f.ctx, f.degree)?;
    system.solve(&vertical_differential_raw(f))
}

/// Constant-coefficient basis of the kernel of the polysymplectic map at
/// horizontal degree `degree`. Polynomial multiples of these can be added to
/// any Hamiltonian multivector.
pub fn hamiltonian_kernel(ctx: PhaseContext, degree: usize) -> Result<Vec<VerticalMultivector>> {
    Ok(PolysymplecticSystem::new(ctx, degree)?.kernel())
}

/// Degree of `{F₁, F₂}`: `r + s − n + 1`, when it lies in `[0, n]`.
pub fn bracket_degree(n: usize, r: usize, s: usize) -> Result<usize> {
    let d = r as i64 + s as i64 - n as i64 + 1;
    if d < 0 || d > n as i64 {
        Err(Error::UndefinedBracketDegree { r, s, n })
    } else {
        Ok(d as usize)
    }
}

/// `{F₁, F₂} = (−1)^{n−r} X₁ ⌟ dⱽF₂`; for `r = n` the tangent-valued
/// one-form acts without extra sign.
pub fn graded_bracket(f1: &HorizontalForm, f2: &HorizontalForm) -> Result<HorizontalForm> {
    let x1 = hamiltonian_multivector(f1)?;
    bracket_with(&x1, f1, f2)
}

/// Bracket using a caller-supplied multivector for the first argument.
pub fn bracket_with(
    x1: &VerticalMultivector,
    f1: &HorizontalForm,
    f2: &HorizontalForm,
) -> Result<HorizontalForm> {
    if f1.ctx != f2.ctx {
        return Err(Error::InvalidParameter(
            "bracket of forms over different phase spaces".into(),
        ));
    }
    let ctx = f1.ctx;
    let (r, s) = (f1.degree, f2.degree);
    let degree = bracket_degree(ctx.n, r, s)?;
    // the second argument must be Hamiltonian as well
    hamiltonian_multivector(f2)?;
    let mut result = x1.contract(&vertical_differential_raw(f2));
    if r < ctx.n && (ctx.n - r) % 2 == 1 {
        result = result.neg();
    }
    HorizontalForm::from_exterior(ctx, degree, result)
}

/// Sign `ε` in `{F₁, F₂} = ε {F₂, F₁}`: `ε = −(−1)^{(n−r−1)(n−s−1)}`.
pub fn antisymmetry_sign(n: usize, r: usize, s: usize) -> i64 {
    let e = (n as i64 - r as i64 - 1) * (n as i64 - s as i64 - 1);
    if e.rem_euclid(2) == 0 {
        -1
    } else {
        1
    }
}

/// Checks `{F₁, F₂} = −(−1)^{(n−r−1)(n−s−1)} {F₂, F₁}` by exact equality.
pub fn graded_antisymmetry_check(f1: &HorizontalForm, f2: &HorizontalForm) -> Result<bool> {
    let forward = graded_bracket(f1, f2)?;
    let backward = graded_bracket(f2, f1)?;
    let sign = antisymmetry_sign(f1.ctx.n, f1.degree, f2.degree);
    let expected = backward.scale(&Poly::from_int(sign));
    Ok(forward == expected)
}
