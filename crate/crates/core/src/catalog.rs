//! Built-in test functions with analytic reference values on the unit
//! square and unit interval.

/// A two-variable test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub source: &'static str,
    /// Total bivariation on `[0,1]²`.
    pub variation: f64,
    pub note: &'static str,
}

/// A one-variable test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineEntry {
    pub source: &'static str,
    /// Total variation on `[0,1]`.
    pub variation: f64,
}

pub fn catalog() -> Vec<CatalogEntry> {
    let s1 = 1f64.sin();
    let e1 = std::f64::consts::E - 1.0;
    vec![
        CatalogEntry {
            name: "product",
            source: "t*s",
            variation: 1.0,
            note: "bilinear; D^(1,1) = 1",
        },
        CatalogEntry {
            name: "square-product",
            source: "t^2*s^2",
            variation: 1.0,
            note: "D^(1,1) = 4ts",
        },
        CatalogEntry {
            name: "sine-product",
            source: "sin(t)*sin(s)",
            variation: s1 * s1,
            note: "V = sin(1)^2",
        },
        CatalogEntry {
            name: "bubble",
            source: "t*(1-t)*s*(1-s)",
            variation: 0.25,
            note: "vanishes on the boundary; D^(1,1) changes sign on the midlines",
        },
        CatalogEntry {
            name: "exponential",
            source: "exp(t+s)",
            variation: e1 * e1,
            note: "V = (e-1)^2",
        },
        CatalogEntry {
            name: "tensor-square-sine",
            source: "t^2*sin(s)",
            variation: 1f64.sin(),
            note: "tensor g(t)h(s) with V(g) = 1, V(h) = sin(1)",
        },
        CatalogEntry {
            name: "tensor-cube-exp",
            source: "t^3*exp(s)",
            variation: e1,
            note: "tensor g(t)h(s) with V(g) = 1, V(h) = e - 1",
        },
    ]
}

pub fn line_catalog() -> Vec<LineEntry> {
    vec![
        LineEntry {
            source: "t",
            variation: 1.0,
        },
        LineEntry {
            source: "t^2",
            variation: 1.0,
        },
        LineEntry {
            source: "sin(t)",
            variation: 1f64.sin(),
        },
        LineEntry {
            source: "exp(t)",
            variation: std::f64::consts::E - 1.0,
        },
        LineEntry {
            source: "t*(1-t)",
            variation: 0.5,
        },
        LineEntry {
            source: "cos(3*t)",
            variation: 1.0 - 3f64.cos(),
        },
    ]
}
