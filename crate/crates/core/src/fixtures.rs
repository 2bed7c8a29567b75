//! Small hand-encoded graphs and passages used by tests, benches and the
//! CLI smoke checks.

use crate::graph::KnowledgeGraph;

/// Running example: a lady, her secret daughter, and the church near the house.
pub const LADY_TRIPLES: &[(&str, &str, &str)] = &[
    ("lady", "AtLocation", "church"),
    ("lady", "RelatedTo", "mother"),
    ("lady", "RelatedTo", "person"),
    ("church", "RelatedTo", "house"),
    ("mother", "RelatedTo", "daughter"),
    ("mother", "RelatedTo", "married"),
    ("mother", "RelatedTo", "book"),
    ("house", "RelatedTo", "child"),
    ("house", "RelatedTo", "home"),
    ("daughter", "RelatedTo", "child"),
    ("child", "RelatedTo", "their"),
    ("home", "AtLocation", "family"),
    ("family", "RelatedTo", "daughter"),
];

pub const LADY_CONTEXT: &str = "Lady Dedlock hides that she is a mother. \
Her daughter Esther was raised in another house, far from the church. \
The daughter never knew her mother, and the daughter was told she was an unwanted child. \
Lady Dedlock married Sir Leicester and keeps to the church on Sundays. \
Their secret stays hidden until the daughter and her mother meet. \
A person reads a book in the house; the person was once her lover. \
Esther later married, and the daughter finds peace.";

pub const LADY_QUERY: &str = "Who is the lady related to?";

pub fn lady_graph() -> KnowledgeGraph {
    KnowledgeGraph::from_triples("en", LADY_TRIPLES.iter().copied())
}

/// Mines, goblins and a kingdom.
pub const MINES_TRIPLES: &[(&str, &str, &str)] = &[
    ("species", "RelatedTo", "kingdom"),
    ("species", "RelatedTo", "race"),
    ("kingdom", "RelatedTo", "queen"),
    ("kingdom", "DerivedFrom", "king"),
    ("queen", "UsedFor", "people"),
    ("queen", "RelatedTo", "person"),
    ("people", "HasA", "feet"),
    ("person", "Desires", "feet"),
    ("king", "RelatedTo", "master"),
    ("king", "RelatedTo", "leader"),
    ("leader", "AtLocation", "company"),
    ("master", "RelatedTo", "young"),
    ("mines", "FormOf", "mine"),
    ("lives", "FormOf", "life"),
    ("mine", "AtLocation", "home"),
    ("home", "RelatedTo", "person"),
    ("home", "RelatedTo", "line"),
    ("line", "RelatedTo", "thread"),
    ("race", "RelatedTo", "goblin"),
];

pub const MINES_CONTEXT: &str = "Long ago the kingdom was ruled by a king and a queen. \
The king was master of the mine, and the queen cared for the people. \
The nearby mines are inhabited by a race of goblins. \
Every person in the kingdom feared the goblins, and the young leader of the company \
went home to warn the people. A thread of light marked the line of the mine, \
and the people of the kingdom kept their feet away from it. \
The king and the queen sent the company to the mine.";

pub const MINES_QUERY: &str = "What species lives in the nearby mines?";

pub fn mines_graph() -> KnowledgeGraph {
    KnowledgeGraph::from_triples("en", MINES_TRIPLES.iter().copied())
}

/// Renders triples as a tab-separated assertion dump.
pub fn triples_to_dump(lang: &str, triples: &[(&str, &str, &str)]) -> String {
    let mut out = String::new();
    for (s, r, e) in triples {
        out.push_str(&format!(
            "/a/[/r/{r}/,/c/{lang}/{s}/,/c/{lang}/{e}/]\t/r/{r}\t/c/{lang}/{s}\t/c/{lang}/{e}\t{{\"weight\": 1.0}}\n"
        ));
    }
    out
}

/// Shape of a generated ConceptNet-like dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub concepts: usize,
    pub edges: usize,
    /// One in `foreign_every` lines is a non-English assertion (0 = none).
    pub foreign_every: usize,
}

const SYNTHETIC_RELATIONS: &[(&str, u32)] = &[
    ("RelatedTo", 50),
    ("IsA", 12),
    ("AtLocation", 8),
    ("UsedFor", 6),
    ("HasContext", 6),
    ("Synonym", 5),
    ("PartOf", 4),
    ("HasProperty", 3),
    ("CapableOf", 3),
    ("Antonym", 2),
    ("DerivedFrom", 1),
];

/// Surface of the i-th synthetic concept. Every twentieth one is a two-word
/// phrase.
pub fn synthetic_surface(i: usize) -> String {
    if i % 20 == 19 {
        format!("w{} x{}", i, i % 97)
    } else {
        format!("w{i}")
    }
}

fn skewed_index<R: rand::Rng>(rng: &mut R, n: usize) -> usize {
    // u^3 concentrates mass on low indices, giving hub concepts and a long
    // tail, roughly like real degree distributions
    let u: f64 = rng.random();
    ((u * u * u) * n as f64) as usize % n
}

/// Streams a tab-separated dump with a heavy-tailed degree distribution.
pub fn write_synthetic_dump<W: std::io::Write>(spec: SyntheticSpec, mut sink: W) -> std::io::Result<()> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.seed);
    let total: u32 = SYNTHETIC_RELATIONS.iter().map(|r| r.1).sum();
    for line in 0..spec.edges {
        let a = skewed_index(&mut rng, spec.concepts);
        let b = rng.random_range(0..spec.concepts);
        let mut pick = rng.random_range(0..total);
        let rel = SYNTHETIC_RELATIONS
            .iter()
            .find(|r| {
                if pick < r.1 {
                    true
                } else {
                    pick -= r.1;
                    false
                }
            })
            .map(|r| r.0)
            .unwrap_or("RelatedTo");
        let lang = if spec.foreign_every > 0 && line % spec.foreign_every == 0 {
            "fr"
        } else {
            "en"
        };
        let (s, e) = (
            synthetic_surface(a).replace(' ', "_"),
            synthetic_surface(b).replace(' ', "_"),
        );
        let w = 1.0 + (line % 4) as f32 * 0.5;
        writeln!(
            sink,
            "/a/[/r/{rel}/,/c/{lang}/{s}/,/c/{lang}/{e}/]\t/r/{rel}\t/c/{lang}/{s}/n\t/c/{lang}/{e}\t{{\"dataset\": \"/d/synthetic\", \"weight\": {w}}}"
        )?;
    }
    Ok(())
}

/// A passage of `tokens` words mixing synthetic concept surfaces with
/// function words.
pub fn synthetic_context(seed: u64, concepts: usize, tokens: usize) -> String {
    use rand::{Rng, SeedableRng};
    const FILLER: &[&str] = &["the", "and", "of", "was", "in", "a", "to", "it"];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut words = Vec::with_capacity(tokens);
    while words.len() < tokens {
        if rng.random_bool(0.3) {
            words.push(FILLER[rng.random_range(0..FILLER.len())].to_string());
        } else {
            words.push(format!("w{}", skewed_index(&mut rng, concepts)));
        }
    }
    words.join(" ")
}
