//! Built-in scenarios: small models with priors and weights exercising every
//! bound and oracle.

use crate::error::Result;
use crate::linalg::{c, ComplexMatrix, DensityMatrix, RealMatrix};
use crate::model::{ModelSpec, PriorDensity, PriorNode, PriorNodeSet, QuadraturePrior, WeightSpec};
use crate::oracle::classical_view_of_commuting_model;
use crate::quadrature::QuadratureRule;

/// A named model/prior/weight triple. `quadrature` records how the prior
/// was discretized when it came from a density.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub model: ModelSpec,
    pub prior: PriorNodeSet,
    pub weight: WeightSpec,
    pub quadrature: Option<QuadraturePrior>,
}

impl Scenario {
    /// Whether all node states commute pairwise.
    pub fn is_commuting(&self) -> bool {
        classical_view_of_commuting_model(&self.model, &self.prior).is_ok()
    }

    /// Same scenario with the prior rediscretized at `points` per axis.
    pub fn with_quadrature_points(&self, points: usize) -> Option<Result<Scenario>> {
        let q = self.quadrature.as_ref()?.with_points(points);
        Some(q.discretize().map(|prior| Scenario { prior, quadrature: Some(q), ..self.clone() }))
    }
}

/// Mixed reference state of the rotation scenario (Bloch vector).
pub const ROTATION_BLOCH: [f64; 3] = [0.6, 0.0, 0.3];

/// Prior width and truncation of the rotation scenario.
pub const ROTATION_PRIOR_STD: f64 = 0.5;
pub const ROTATION_PRIOR_BOX: [f64; 2] = [-3.0, 3.0];
pub const ROTATION_PRIOR_POINTS: usize = 21;

/// Bloch length of the coin states.
pub const COIN_R: f64 = 0.5;

/// Half-width of the uniform box of the displacement scenarios.
pub const XY_HALF_WIDTH: f64 = 0.4;
pub const XY_PRIOR_POINTS: usize = 5;
pub const XY_BLOCH_Z: f64 = 0.5;

pub fn rotation_model() -> ModelSpec {
    let s0 = DensityMatrix::from_bloch(ROTATION_BLOCH).expect("valid reference state");
    ModelSpec::new("qubit_rotation", 1, 2, move |t| {
        let half = t[0] / 2.0;
        // e^{−iθσ_z/2} is diagonal.
        let u = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(half.cos(), -half.sin()),
            c(half.cos(), half.sin()),
        ]));
        DensityMatrix::new(&u * s0.matrix() * u.adjoint())
    })
}

pub fn coin_model() -> ModelSpec {
    ModelSpec::new("coin", 1, 2, |t| DensityMatrix::from_bloch([0.0, 0.0, COIN_R * t[0]]))
}

/// `½(I + θ₁σ_x + θ₂σ_y + 0.5σ_z)`.
pub fn xy_model() -> ModelSpec {
    ModelSpec::new("qubit_xy", 2, 2, |t| DensityMatrix::from_bloch([t[0], t[1], XY_BLOCH_Z]))
}

/// Diagonal qutrit `diag(1/3 + 0.15θ₁, 1/3 + 0.1θ₂, 1/3 − 0.15θ₁ − 0.1θ₂)`.
pub fn qutrit_model() -> ModelSpec {
    ModelSpec::new("qutrit_diagonal", 2, 3, |t| {
        let (a, b) = (0.15 * t[0], 0.1 * t[1]);
        DensityMatrix::diagonal(&[1.0 / 3.0 + a, 1.0 / 3.0 + b, 1.0 / 3.0 - a - b])
    })
}

pub fn xy_quadrature() -> QuadraturePrior {
    let h = XY_HALF_WIDTH;
    QuadraturePrior {
        density: PriorDensity::Uniform,
        bounds: vec![[-h, h], [-h, h]],
        rule: QuadratureRule::GaussLegendre,
        points: XY_PRIOR_POINTS,
    }
}

pub fn rotation_quadrature() -> QuadraturePrior {
    QuadraturePrior {
        density: PriorDensity::Gaussian { mean: vec![0.0], std: vec![ROTATION_PRIOR_STD] },
        bounds: vec![ROTATION_PRIOR_BOX],
        rule: QuadratureRule::GaussLegendre,
        points: ROTATION_PRIOR_POINTS,
    }
}

fn nodes(list: &[(&[f64], f64)]) -> PriorNodeSet {
    PriorNodeSet::new(list.iter().map(|(t, w)| PriorNode { theta: t.to_vec(), weight: *w }).collect())
        .expect("catalog prior is valid")
}

fn from_quadrature(
    name: &str,
    description: &str,
    model: ModelSpec,
    q: QuadraturePrior,
    weight: WeightSpec,
) -> Scenario {
    Scenario {
        name: name.into(),
        description: description.into(),
        model,
        prior: q.discretize().expect("catalog quadrature is valid"),
        weight,
        quadrature: Some(q),
    }
}

pub fn catalog() -> Vec<Scenario> {
    let qutrit_w = RealMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
    vec![
        from_quadrature(
            "qubit_rotation",
            "phase rotation e^{-iθσz/2} of a mixed qubit, Gaussian prior σ=0.5 truncated to [-3,3]",
            rotation_model(),
            rotation_quadrature(),
            WeightSpec::identity(1),
        ),
        Scenario {
            name: "two_node_coin".into(),
            description: "θ ∈ {-1, 1} equally likely, S_± = (I ± 0.5σz)/2, W = 1".into(),
            model: coin_model(),
            prior: nodes(&[(&[-1.0], 0.5), (&[1.0], 0.5)]),
            weight: WeightSpec::identity(1),
            quadrature: None,
        },
        from_quadrature(
            "qubit_xy",
            "σx/σy displacement ½(I + θ1σx + θ2σy + 0.5σz), uniform prior on [-0.4,0.4]², W = I",
            xy_model(),
            xy_quadrature(),
            WeightSpec::identity(2),
        ),
        from_quadrature(
            "qubit_xy_varying_weight",
            "σx/σy displacement with W(θ) = diag(1, 1 + θ1²)",
            xy_model(),
            xy_quadrature(),
            WeightSpec::varying(|t| RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0 + t[0] * t[0]]))),
        ),
        Scenario {
            name: "qutrit_commuting".into(),
            description: "diagonal qutrit with two parameters on a 3×3 grid, W = [[2, 0.5], [0.5, 1]]".into(),
            model: qutrit_model(),
            prior: nodes(&[
                (&[-1.0, -1.0], 0.05),
                (&[-1.0, 0.0], 0.10),
                (&[-1.0, 1.0], 0.05),
                (&[0.0, -1.0], 0.15),
                (&[0.0, 0.0], 0.25),
                (&[0.0, 1.0], 0.10),
                (&[1.0, -1.0], 0.10),
                (&[1.0, 0.0], 0.15),
                (&[1.0, 1.0], 0.05),
            ]),
            weight: WeightSpec::constant(qutrit_w).expect("SPD"),
            quadrature: None,
        },
        Scenario {
            name: "point_mass".into(),
            description: "σx/σy displacement model with all prior mass at θ = (0.1, -0.2)".into(),
            model: xy_model(),
            prior: nodes(&[(&[0.1, -0.2], 1.0)]),
            weight: WeightSpec::identity(2),
            quadrature: None,
        },
    ]
}

pub fn scenario(name: &str) -> Option<Scenario> {
    catalog().into_iter().find(|s| s.name == name)
}

/// Model constructors by name, for configs that pair a catalog model with
/// their own prior and weight.
pub fn model_by_name(name: &str) -> Option<ModelSpec> {
    match name {
        "qubit_rotation" => Some(rotation_model()),
        "coin" | "two_node_coin" => Some(coin_model()),
        "qubit_xy" => Some(xy_model()),
        "qutrit_diagonal" | "qutrit_commuting" => Some(qutrit_model()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed::solve_lambda_ld;
    use crate::linalg::{eig_hermitian, pauli, trace};
    use crate::model::compute_averages;

    #[test]
    fn catalog_shape() {
        let cat = catalog();
        assert!(cat.len() >= 4);
        for s in &cat {
            let avg = compute_averages(&s.model, &s.prior, &s.weight).unwrap();
            assert!((trace(avg.s_b.matrix()).re - 1.0).abs() < 1e-12, "{}", s.name);
            assert!(eig_hermitian(avg.s_b.hermitian()).unwrap().min_value() > 0.0);
            assert!(s.prior.len() <= 41);
        }
        let names: Vec<&str> = cat.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names.iter().collect::<std::collections::HashSet<_>>().len(), names.len());
    }

    #[test]
    fn commutativity_flags() {
        assert!(scenario("two_node_coin").unwrap().is_commuting());
        assert!(scenario("qutrit_commuting").unwrap().is_commuting());
        assert!(!scenario("qubit_xy").unwrap().is_commuting());
        assert!(!scenario("qubit_rotation").unwrap().is_commuting());
    }

    #[test]
    fn xy_has_imaginary_k() {
        let s = scenario("qubit_xy").unwrap();
        let avg = compute_averages(&s.model, &s.prior, &s.weight).unwrap();
        let sol = solve_lambda_ld(&avg, 1.0).unwrap();
        assert!(sol.im_k().iter().any(|v| v.abs() > 1e-3));
    }

    #[test]
    fn rotation_state_is_rotated() {
        let s = rotation_model().state(&[std::f64::consts::FRAC_PI_2]).unwrap();
        // Bloch x component rotates into y.
        let y = trace(&(s.matrix() * pauli::y())).re;
        assert!((y - ROTATION_BLOCH[0]).abs() < 1e-12);
    }

    #[test]
    fn requadrature() {
        let s = scenario("qubit_rotation").unwrap();
        let t = s.with_quadrature_points(31).unwrap().unwrap();
        assert_eq!(t.prior.len(), 31);
        assert!(scenario("two_node_coin").unwrap().with_quadrature_points(3).is_none());
    }
}
