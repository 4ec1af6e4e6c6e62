use super::ModelSpec;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub spec: ModelSpec,
    pub description: &'static str,
}

fn cp1(c: f64) -> ModelSpec {
    ModelSpec::fubini_study(1, c)
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "s2",
            spec: ModelSpec::round_sphere(2, 1.0),
            description: "unit round 2-sphere, stereographic chart",
        },
        CatalogEntry {
            name: "s4",
            spec: ModelSpec::round_sphere(4, 1.0),
            description: "unit round 4-sphere, stereographic chart",
        },
        CatalogEntry {
            name: "torus4",
            spec: ModelSpec::flat_torus(4),
            description: "flat 4-torus with constant J",
        },
        CatalogEntry {
            name: "torus4_twisted",
            spec: ModelSpec::FlatTorus {
                dim: 4,
                twist: 0.3,
            },
            description: "flat 4-torus with a position-dependent compatible J",
        },
        CatalogEntry {
            name: "cp1",
            spec: cp1(1.0),
            description: "CP^1 with holomorphic curvature 1 (unit 2-sphere)",
        },
        CatalogEntry {
            name: "cp2",
            spec: ModelSpec::fubini_study(2, 1.0),
            description: "CP^2, Fubini-Study, holomorphic curvature 1",
        },
        CatalogEntry {
            name: "cp2_c2",
            spec: ModelSpec::fubini_study(2, 2.0),
            description: "CP^2, Fubini-Study, holomorphic curvature 2 (unnormalized)",
        },
        CatalogEntry {
            name: "cp3",
            spec: ModelSpec::fubini_study(3, 1.0),
            description: "CP^3, Fubini-Study, holomorphic curvature 1",
        },
        CatalogEntry {
            name: "ch2",
            spec: ModelSpec::complex_hyperbolic(2, -1.0),
            description: "complex hyperbolic plane, ball model, holomorphic curvature -1",
        },
        CatalogEntry {
            name: "cp1xcp1",
            spec: ModelSpec::product(vec![cp1(1.0), cp1(1.0)]),
            description: "CP^1 x CP^1 with the product metric, each factor curvature 1",
        },
        CatalogEntry {
            name: "cp1xcp1_c2",
            spec: ModelSpec::product(vec![cp1(2.0), cp1(2.0)]),
            description: "CP^1 x CP^1, each factor curvature 2 (unnormalized)",
        },
        CatalogEntry {
            name: "conformal_cp1xcp1",
            spec: ModelSpec::conformal(0.1, 0.5, ModelSpec::product(vec![cp1(1.0), cp1(1.0)])),
            description: "CP^1 x CP^1 rescaled by exp(2u) with a compact bump u; Hermitian, not Kaehler",
        },
    ]
}

pub fn catalog_names() -> Vec<&'static str> {
    catalog().iter().map(|e| e.name).collect()
}
