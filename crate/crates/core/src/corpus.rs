//! Built-in scenarios reproducing worked examples of K-V geometry, embedded
//! at compile time and addressable as `builtin:NAME`.

pub struct CorpusEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Where the example comes from, by topic.
    pub anchor: &'static str,
    pub text: &'static str,
    /// The entry documents a claim the engine does not reproduce; the
    /// affected checks carry `expect fail`.
    pub known_discrepancy: bool,
}

macro_rules! entry {
    ($name:literal, $desc:literal, $anchor:literal, $disc:literal) => {
        CorpusEntry {
            name: $name,
            description: $desc,
            anchor: $anchor,
            text: include_str!(concat!("../corpus/", $name, ".kvs")),
            known_discrepancy: $disc,
        }
    };
}

static ENTRIES: &[CorpusEntry] = &[
    entry!(
        "paper_examples",
        "every worked example in one scenario; exits 0",
        "all topics",
        false
    ),
    entry!(
        "hamiltonian_diagonal",
        "h = x dx dx + y dy dy, f = x: L_{X_f}h(dx,dx) = -f; Lie identity as stated vs corrected",
        "Hamiltonian vector fields, diagonal example",
        true
    ),
    entry!(
        "algebra_dual_linear",
        "dual of e1.e1 = e1: functions of y alone lie in E and preserve h",
        "the space E, linear example",
        false
    ),
    entry!(
        "special_class_counterexample",
        "h = x^2 dx dx: f = x lies in E but h(df,df) does not",
        "special class, counterexample",
        false
    ),
    entry!(
        "kv_maps_products",
        "projections of a product and duals of algebra morphisms are K-V maps",
        "K-V maps, examples",
        false
    ),
    entry!(
        "linear_family_maps",
        "t -> (lambda t, mu t): K-V map only for lambda = 0 or mu = 0",
        "K-V submanifolds, examples",
        false
    ),
    entry!(
        "quadratic_submanifolds",
        "h = sum x_i x_j: coordinate subspaces are K-V submanifolds",
        "K-V submanifolds, examples",
        false
    ),
    entry!(
        "diagonal_submanifolds",
        "diagonal f_i(x_i): the x-axis is a K-V submanifold iff f_2(0) = 0",
        "K-V submanifolds, examples",
        false
    ),
    entry!(
        "preimage_nonfunctorial",
        "preimage of a line under a K-V map is not a K-V submanifold",
        "K-V submanifolds, failure of functoriality",
        false
    ),
    entry!(
        "ideal_annihilator",
        "annihilator of an ideal is a K-V submanifold of the dual",
        "K-V submanifolds, examples",
        false
    ),
    entry!(
        "regular_value_transversal",
        "fibres of affine surjections under the standard metric are transversals",
        "K-V transversals, closing example",
        false
    ),
    entry!(
        "zaxis_transversal_discrepancy",
        "z-axis under x dx dx + y dy dy: claimed transversal, but D vanishes on it",
        "K-V transversals, inclusion example",
        true
    ),
    entry!(
        "coisotropic_conormal",
        "annihilators of subalgebras, zeros of h, and their conormal algebroids",
        "coisotropic submanifolds, examples",
        false
    ),
    entry!(
        "graph_coisotropic",
        "Graph(F) is coisotropic in M1 x (-M2) iff F is a K-V map",
        "coisotropic submanifolds, graph characterization",
        false
    ),
];

pub fn entries() -> &'static [CorpusEntry] {
    ENTRIES
}

/// Looks up an entry by name, with or without the `.kvs` extension.
pub fn find(name: &str) -> Option<&'static CorpusEntry> {
    let name = name.strip_suffix(".kvs").unwrap_or(name);
    ENTRIES.iter().find(|e| e.name == name)
}

/// One line per entry: name, description, anchor, discrepancy flag.
pub fn list_corpus() -> String {
    let w = ENTRIES.iter().map(|e| e.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for e in ENTRIES {
        let flag = if e.known_discrepancy { " [known-discrepancy]" } else { "" };
        out.push_str(&format!("{:<w$}  {} ({}){flag}\n", e.name, e.description, e.anchor));
    }
    out
}
