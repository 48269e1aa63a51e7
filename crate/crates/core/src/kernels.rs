//! Compact-support kernels, their closed-form CDFs and moments, and the
//! asymptotic variance constant sigma^2_{H,K}.
//!
//! Every built-in family integrates to one and is strictly positive exactly
//! on the open interior of its support. CDFs are closed-form because the
//! estimator evaluates them O(n * eval points) times per replication.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// (1 - |u|) on [-1, 1]
    Triangular,
    /// 3/4 (1 - u^2) on [-1, 1]
    Epanechnikov,
    /// 1/2 on [-1, 1]
    Box,
    /// 2 (1 - u) on [0, 1]; support starts at 0 as the pointwise
    /// asymptotics require.
    OneSidedTriangular,
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Triangular => "triangular",
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Box => "box",
            KernelFamily::OneSidedTriangular => "one_sided_triangular",
        }
    }

    pub fn parse_name(name: &str) -> Result<Self> {
        match name {
            "triangular" => Ok(KernelFamily::Triangular),
            "epanechnikov" => Ok(KernelFamily::Epanechnikov),
            "box" => Ok(KernelFamily::Box),
            "one_sided_triangular" => Ok(KernelFamily::OneSidedTriangular),
            _ => Err(Error::InvalidConfig(format!(
                "unknown kernel `{name}`; expected one of triangular, epanechnikov, box, \
                 one_sided_triangular"
            ))),
        }
    }

    fn natural_support(&self) -> (f64, f64) {
        match self {
            KernelFamily::OneSidedTriangular => (0.0, 1.0),
            _ => (-1.0, 1.0),
        }
    }

    fn base_pdf(&self, z: f64) -> f64 {
        match self {
            KernelFamily::Triangular => {
                if z.abs() <= 1.0 {
                    1.0 - z.abs()
                } else {
                    0.0
                }
            }
            KernelFamily::Epanechnikov => {
                if z.abs() <= 1.0 {
                    0.75 * (1.0 - z * z)
                } else {
                    0.0
                }
            }
            KernelFamily::Box => {
                if z.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            KernelFamily::OneSidedTriangular => {
                if (0.0..=1.0).contains(&z) {
                    2.0 * (1.0 - z)
                } else {
                    0.0
                }
            }
        }
    }

    fn base_cdf(&self, z: f64) -> f64 {
        match self {
            KernelFamily::Triangular => {
                if z <= -1.0 {
                    0.0
                } else if z <= 0.0 {
                    0.5 * (z + 1.0) * (z + 1.0)
                } else if z <= 1.0 {
                    1.0 - 0.5 * (1.0 - z) * (1.0 - z)
                } else {
                    1.0
                }
            }
            KernelFamily::Epanechnikov => {
                if z <= -1.0 {
                    0.0
                } else if z <= 1.0 {
                    0.25 * (2.0 + 3.0 * z - z * z * z)
                } else {
                    1.0
                }
            }
            KernelFamily::Box => {
                if z <= -1.0 {
                    0.0
                } else if z <= 1.0 {
                    0.5 * (z + 1.0)
                } else {
                    1.0
                }
            }
            KernelFamily::OneSidedTriangular => {
                if z <= 0.0 {
                    0.0
                } else if z <= 1.0 {
                    z * (2.0 - z)
                } else {
                    1.0
                }
            }
        }
    }

    fn base_first_moment(&self) -> f64 {
        match self {
            KernelFamily::OneSidedTriangular => 1.0 / 3.0,
            _ => 0.0,
        }
    }

    /// Interior points (base coordinates) where the density is not smooth.
    fn base_breakpoints(&self) -> &'static [f64] {
        match self {
            KernelFamily::Triangular => &[0.0],
            _ => &[],
        }
    }
}

/// A kernel family together with its (possibly rescaled) support [A, B].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    family: KernelFamily,
    supp_lo: f64,
    supp_hi: f64,
}

impl KernelSpec {
    /// Kernel on its natural support.
    pub fn new(family: KernelFamily) -> Self {
        let (lo, hi) = family.natural_support();
        Self {
            family,
            supp_lo: lo,
            supp_hi: hi,
        }
    }

    /// Kernel affinely rescaled onto [lo, hi]; the mass stays one.
    pub fn with_support(family: KernelFamily, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "kernel support must satisfy A < B, got [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            family,
            supp_lo: lo,
            supp_hi: hi,
        })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn support(&self) -> (f64, f64) {
        (self.supp_lo, self.supp_hi)
    }

    fn to_base(self, u: f64) -> f64 {
        let (a0, b0) = self.family.natural_support();
        a0 + (u - self.supp_lo) * (b0 - a0) / (self.supp_hi - self.supp_lo)
    }

    fn base_jacobian(self) -> f64 {
        let (a0, b0) = self.family.natural_support();
        (b0 - a0) / (self.supp_hi - self.supp_lo)
    }

    /// Density value; zero outside [A, B].
    pub fn pdf(&self, u: f64) -> f64 {
        self.family.base_pdf(self.to_base(u)) * self.base_jacobian()
    }

    /// Phi_K(v) = ∫_A^{min(v, B)} K, monotone from 0 to 1.
    pub fn cdf(&self, v: f64) -> f64 {
        self.family.base_cdf(self.to_base(v))
    }

    /// ∫ K(u) u du in closed form.
    pub fn first_moment(&self) -> f64 {
        let (a0, b0) = self.family.natural_support();
        let scale = (self.supp_hi - self.supp_lo) / (b0 - a0);
        self.supp_lo + scale * (self.family.base_first_moment() - a0)
    }

    /// Interior non-smooth points of the density, in support coordinates.
    fn breakpoints(&self) -> Vec<f64> {
        let (a0, b0) = self.family.natural_support();
        let scale = (self.supp_hi - self.supp_lo) / (b0 - a0);
        self.family
            .base_breakpoints()
            .iter()
            .map(|&z| self.supp_lo + (z - a0) * scale)
            .collect()
    }

    /// Kernel autocorrelation rho(w) = ∫ K(u) K(u - w) du. Symmetric in w.
    pub fn autocorrelation(&self, w: f64) -> f64 {
        let lo = self.supp_lo + w.max(0.0);
        let hi = self.supp_hi + w.min(0.0);
        if lo >= hi {
            return 0.0;
        }
        // split at every point where either factor kinks
        let mut cuts = vec![lo, hi];
        for &p in self
            .breakpoints()
            .iter()
            .chain([self.supp_lo, self.supp_hi].iter())
        {
            for q in [p, p + w] {
                if q > lo && q < hi {
                    cuts.push(q);
                }
            }
        }
        cuts.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        let rule = quad::gauss_legendre(12);
        let mut total = 0.0;
        for pair in cuts.windows(2) {
            total += quad::integrate(&rule, pair[0], pair[1], |u| {
                self.pdf(u) * self.pdf(u - w)
            });
        }
        total
    }

    /// Asymptotic variance constant
    /// sigma^2 = H(2H-1) ∫∫ |u - v|^{2H-2} K(u) K(v) du dv,
    /// computed as 2 H(2H-1) ∫_0^{B-A} w^{2H-2} rho(w) dw with the integrable
    /// singularity absorbed into a Gauss-Jacobi weight. Relative accuracy is
    /// far below the 1e-6 target because rho is piecewise polynomial.
    pub fn sigma2(&self, hurst: f64) -> Result<f64> {
        if !(hurst > 0.5 && hurst < 1.0) {
            return Err(Error::HurstOutOfRange(hurst));
        }
        let beta = 2.0 * hurst - 2.0;
        let width = self.supp_hi - self.supp_lo;

        // panel boundaries where rho kinks: pairwise gaps of the kernel's
        // non-smooth points (support ends included)
        let mut pts = self.breakpoints();
        pts.push(self.supp_lo);
        pts.push(self.supp_hi);
        let mut panels = vec![0.0, width];
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let gap = (pts[i] - pts[j]).abs();
                if gap > 1e-14 && gap < width - 1e-14 {
                    panels.push(gap);
                }
            }
        }
        panels.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        panels.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

        // first panel: Gauss-Jacobi absorbs w^beta, leaving the polynomial rho
        let w1 = panels[1];
        let jacobi = quad::gauss_jacobi(48, beta);
        let mut total = (0.5 * w1).powf(beta + 1.0)
            * jacobi
                .iter()
                .map(|&(x, w)| w * self.autocorrelation(0.5 * w1 * (1.0 + x)))
                .sum::<f64>();

        // remaining panels: the integrand is analytic (w bounded away from 0)
        let legendre = quad::gauss_legendre(48);
        for pair in panels[1..].windows(2) {
            total += quad::integrate(&legendre, pair[0], pair[1], |w| {
                w.powf(beta) * self.autocorrelation(w)
            });
        }

        Ok(2.0 * hurst * (2.0 * hurst - 1.0) * total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn all_specs() -> Vec<KernelSpec> {
        vec![
            KernelSpec::new(KernelFamily::Triangular),
            KernelSpec::new(KernelFamily::Epanechnikov),
            KernelSpec::new(KernelFamily::Box),
            KernelSpec::new(KernelFamily::OneSidedTriangular),
        ]
    }

    #[test]
    fn pdf_reference_values() {
        let tri = KernelSpec::new(KernelFamily::Triangular);
        let epa = KernelSpec::new(KernelFamily::Epanechnikov);
        assert_eq!(tri.pdf(0.0), 1.0);
        assert_eq!(epa.pdf(0.0), 0.75);
        assert_eq!(tri.pdf(1.0), 0.0);
        assert_eq!(tri.pdf(-1.0), 0.0);
        assert_eq!(tri.pdf(1.5), 0.0);
    }

    #[test]
    fn cdf_endpoints_and_midpoint() {
        for k in all_specs() {
            let (a, b) = k.support();
            assert_eq!(k.cdf(a - 1.0), 0.0);
            assert_eq!(k.cdf(a), 0.0);
            assert_eq!(k.cdf(b), 1.0);
            assert_eq!(k.cdf(b + 1.0), 1.0);
        }
        let tri = KernelSpec::new(KernelFamily::Triangular);
        assert_eq!(tri.cdf(0.0), 0.5);
    }

    #[test]
    fn cdf_is_nondecreasing_and_differentiates_to_pdf() {
        for k in all_specs() {
            let (a, b) = k.support();
            let mut prev = -1.0;
            for i in 0..1000 {
                // offset keeps sample points away from density kinks
                let v = a + (i as f64 + 0.5) * (b - a) / 1000.0;
                let c = k.cdf(v);
                assert!(c >= prev - 1e-15, "cdf decreasing at {v}");
                prev = c;
                let d = 1e-6;
                let fd = (k.cdf(v + d) - k.cdf(v - d)) / (2.0 * d);
                assert!(
                    (fd - k.pdf(v)).abs() < 1e-8,
                    "{:?}: d/dv cdf = {fd} vs pdf = {} at {v}",
                    k.family(),
                    k.pdf(v)
                );
            }
        }
    }

    #[test]
    fn kernels_integrate_to_one() {
        let rule = quad::gauss_legendre(32);
        for k in all_specs() {
            let (a, b) = k.support();
            // integrate piecewise to keep kinks on panel edges
            let mid = 0.5 * (a + b);
            let mass = quad::integrate(&rule, a, mid, |u| k.pdf(u))
                + quad::integrate(&rule, mid, b, |u| k.pdf(u));
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn first_moments() {
        assert_eq!(KernelSpec::new(KernelFamily::Triangular).first_moment(), 0.0);
        assert_eq!(
            KernelSpec::new(KernelFamily::Epanechnikov).first_moment(),
            0.0
        );
        let os = KernelSpec::new(KernelFamily::OneSidedTriangular);
        // quadrature cross-check of the closed form 1/3
        let rule = quad::gauss_legendre(32);
        let m = quad::integrate(&rule, 0.0, 1.0, |u| os.pdf(u) * u);
        assert_abs_diff_eq!(os.first_moment(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(os.first_moment(), m, epsilon = 1e-13);
    }

    #[test]
    fn rescaled_support_keeps_mass_and_shifts_moment() {
        let k = KernelSpec::with_support(KernelFamily::Box, 0.0, 4.0).unwrap();
        assert_eq!(k.pdf(1.0), 0.25);
        assert_eq!(k.cdf(4.0), 1.0);
        assert_abs_diff_eq!(k.first_moment(), 2.0, epsilon = 1e-15);
        let k = KernelSpec::with_support(KernelFamily::Box, 0.0, 2.0).unwrap();
        assert_eq!(k.pdf(1.0), 0.5);
        assert_eq!(k.cdf(2.0), 1.0);
        assert_abs_diff_eq!(k.first_moment(), 1.0, epsilon = 1e-15);
        assert!(KernelSpec::with_support(KernelFamily::Box, 1.0, 1.0).is_err());
    }

    #[test]
    fn sigma2_box_closed_form_across_hurst() {
        let k = KernelSpec::new(KernelFamily::Box);
        for i in 0..9 {
            let h = 0.55 + 0.05 * i as f64;
            let got = k.sigma2(h).unwrap();
            let want = 4.0_f64.powf(h - 1.0);
            assert!(
                ((got - want) / want).abs() < 1e-6,
                "H = {h}: got {got}, want {want}"
            );
        }
    }

    // Frozen from the exact piecewise-polynomial reduction of the double
    // integral: rho(w) = w^3/2 - w^2 + 2/3 on [0,1] and
    // -w^3/6 + w^2 - 2w + 4/3 on [1,2] for the triangular kernel.
    #[test]
    fn sigma2_triangular_reference_values() {
        let k = KernelSpec::new(KernelFamily::Triangular);
        let reference = [
            (0.55, 0.7026401997373802),
            (0.60, 0.7371572215875398),
            (0.65, 0.7706396978602543),
            (0.70, 0.8034391282087199),
            (0.75, 0.8358523998839726),
            (0.80, 0.8681338175302548),
            (0.85, 0.9005043385084853),
            (0.90, 0.9331587417986829),
            (0.95, 0.9662712523951299),
        ];
        for (h, want) in reference {
            let got = k.sigma2(h).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-9,
                "H = {h}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn sigma2_other_family_reference_values() {
        let epa = KernelSpec::new(KernelFamily::Epanechnikov);
        let got = epa.sigma2(0.75).unwrap();
        assert!(((got - 0.7934289077210092) / got).abs() < 1e-9);

        let os = KernelSpec::new(KernelFamily::OneSidedTriangular);
        let got = os.sigma2(0.75).unwrap();
        assert!(((got - 8.0 / 7.0) / got).abs() < 1e-9);
        let got = os.sigma2(0.6).unwrap();
        assert!(((got - 1.25) / got).abs() < 1e-9);
    }

    #[test]
    fn sigma2_positive_for_all_builtins() {
        for k in all_specs() {
            for h in [0.55, 0.7, 0.9, 0.99] {
                assert!(k.sigma2(h).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn sigma2_rejects_hurst_outside_open_interval() {
        let k = KernelSpec::new(KernelFamily::Box);
        assert!(matches!(k.sigma2(0.5), Err(Error::HurstOutOfRange(_))));
        assert!(matches!(k.sigma2(1.0), Err(Error::HurstOutOfRange(_))));
    }

    #[test]
    fn autocorrelation_is_symmetric_in_lag() {
        for k in all_specs() {
            for w in [0.1, 0.37, 0.8, 1.4] {
                assert_abs_diff_eq!(
                    k.autocorrelation(w),
                    k.autocorrelation(-w),
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn autocorrelation_reference_points() {
        // rho(0) = ∫ K^2
        let tri = KernelSpec::new(KernelFamily::Triangular);
        assert_abs_diff_eq!(tri.autocorrelation(0.0), 2.0 / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(tri.autocorrelation(1.0), 1.0 / 6.0, epsilon = 1e-13);
        assert_eq!(tri.autocorrelation(2.0), 0.0);
        let boxk = KernelSpec::new(KernelFamily::Box);
        assert_abs_diff_eq!(boxk.autocorrelation(0.5), (2.0 - 0.5) / 4.0, epsilon = 1e-13);
    }
}
