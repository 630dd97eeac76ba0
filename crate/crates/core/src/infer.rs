//! Semantic names for obfuscated activities, found by comparing layout
//! hierarchies against a corpus of named activities.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bundle::{simple_class_name, AppBundle, ClassKind, ComponentNode, LayoutDocument};

pub const DEFAULT_THRESHOLD: usize = 5;

/// Ordered tree of widget tags, attributes dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LayoutTree {
    pub label: String,
    pub children: Vec<LayoutTree>,
}

impl LayoutTree {
    pub fn leaf(label: impl Into<String>) -> Self {
        LayoutTree {
            label: label.into(),
            children: Vec::new(),
        }
    }

    pub fn from_node(node: &ComponentNode) -> Self {
        LayoutTree {
            label: node.tag.clone(),
            children: node.children.iter().map(LayoutTree::from_node).collect(),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(LayoutTree::size).sum::<usize>()
    }
}

pub fn extract_layout_tree(doc: &LayoutDocument) -> LayoutTree {
    LayoutTree::from_node(&doc.root)
}

fn is_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '$')
}

/// `Label(child,child)`: preorder, no whitespace, leaves have no parentheses.
impl fmt::Display for LayoutTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad tree at byte {position}: {message}")]
pub struct TreeSyntaxError {
    pub position: usize,
    pub message: String,
}

impl FromStr for LayoutTree {
    type Err = TreeSyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        struct P<'a> {
            s: &'a str,
            pos: usize,
        }
        impl P<'_> {
            fn err<T>(&self, message: &str) -> Result<T, TreeSyntaxError> {
                Err(TreeSyntaxError {
                    position: self.pos,
                    message: message.to_string(),
                })
            }
            fn peek(&self) -> Option<char> {
                self.s[self.pos..].chars().next()
            }
            fn tree(&mut self, depth: usize) -> Result<LayoutTree, TreeSyntaxError> {
                if depth > 512 {
                    return self.err("nesting too deep");
                }
                let start = self.pos;
                while self.peek().is_some_and(is_label_char) {
                    self.pos += 1;
                }
                if self.pos == start {
                    return self.err("expected a label");
                }
                let mut node = LayoutTree::leaf(&self.s[start..self.pos]);
                if self.peek() == Some('(') {
                    self.pos += 1;
                    loop {
                        node.children.push(self.tree(depth + 1)?);
                        match self.peek() {
                            Some(',') => self.pos += 1,
                            Some(')') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return self.err("expected `,` or `)`"),
                        }
                    }
                }
                Ok(node)
            }
        }
        let mut p = P { s, pos: 0 };
        let tree = p.tree(0)?;
        if p.pos != s.len() {
            return p.err("trailing input");
        }
        Ok(tree)
    }
}

impl Serialize for LayoutTree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LayoutTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// True when the simple class name has fewer than three letters; digits,
/// underscores, and `$` do not count.
pub fn is_obfuscated(name: &str) -> bool {
    let simple = simple_class_name(name);
    let simple = simple.rsplit('$').next().unwrap_or(simple);
    simple.chars().filter(|c| c.is_alphabetic()).count() < 3
}

/// Postorder view of a tree for the edit distance tables.
struct Postorder<'a> {
    labels: Vec<&'a str>,
    /// Postorder index of the leftmost leaf under each node.
    leftmost: Vec<usize>,
    keyroots: Vec<usize>,
}

impl<'a> Postorder<'a> {
    fn new(tree: &'a LayoutTree) -> Self {
        fn visit<'a>(
            t: &'a LayoutTree,
            labels: &mut Vec<&'a str>,
            leftmost: &mut Vec<usize>,
        ) -> usize {
            let mut first = None;
            for c in &t.children {
                let l = visit(c, labels, leftmost);
                first.get_or_insert(l);
            }
            let me = labels.len();
            labels.push(&t.label);
            let l = first.unwrap_or(me);
            leftmost.push(l);
            l
        }
        let mut labels = Vec::new();
        let mut leftmost = Vec::new();
        visit(tree, &mut labels, &mut leftmost);
        // A keyroot is the highest node with a given leftmost leaf.
        let mut seen = BTreeMap::new();
        for (i, &l) in leftmost.iter().enumerate() {
            seen.insert(l, i);
        }
        let mut keyroots: Vec<usize> = seen.into_values().collect();
        keyroots.sort_unstable();
        Postorder {
            labels,
            leftmost,
            keyroots,
        }
    }
}

/// Zhang-Shasha ordered tree edit distance with unit insert, delete, and
/// relabel costs.
pub fn tree_edit_distance(a: &LayoutTree, b: &LayoutTree) -> usize {
    let (a, b) = (Postorder::new(a), Postorder::new(b));
    let (n, m) = (a.labels.len(), b.labels.len());
    let mut td = vec![vec![0usize; m]; n];
    let mut fd = vec![vec![0usize; m + 1]; n + 1];
    for &i in &a.keyroots {
        for &j in &b.keyroots {
            let (li, lj) = (a.leftmost[i], b.leftmost[j]);
            // fd[x][y]: distance between forests a[li..li+x) and b[lj..lj+y).
            fd[0][0] = 0;
            for x in 1..=i - li + 1 {
                fd[x][0] = fd[x - 1][0] + 1;
            }
            for y in 1..=j - lj + 1 {
                fd[0][y] = fd[0][y - 1] + 1;
            }
            for x in 1..=i - li + 1 {
                let ai = li + x - 1;
                for y in 1..=j - lj + 1 {
                    let bj = lj + y - 1;
                    let del = fd[x - 1][y] + 1;
                    let ins = fd[x][y - 1] + 1;
                    if a.leftmost[ai] == li && b.leftmost[bj] == lj {
                        let sub = fd[x - 1][y - 1] + usize::from(a.labels[ai] != b.labels[bj]);
                        fd[x][y] = del.min(ins).min(sub);
                        td[ai][bj] = fd[x][y];
                    } else {
                        let px = a.leftmost[ai] - li;
                        let py = b.leftmost[bj] - lj;
                        fd[x][y] = del.min(ins).min(fd[px][py] + td[ai][bj]);
                    }
                }
            }
        }
    }
    td[n - 1][m - 1]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub app_id: String,
    pub activity_name: String,
    pub layout_name: String,
    pub tree: LayoutTree,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus line {line}: {source}")]
    Record {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("cannot access corpus file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Named activities with their layout trees. Entries are unique per
/// `(app_id, activity_name)`; the first one wins.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
    name_frequency: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn new(entries: impl IntoIterator<Item = CorpusEntry>) -> Self {
        let mut c = Corpus::default();
        c.extend(entries);
        c
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = CorpusEntry>) {
        let mut seen: BTreeSet<(String, String)> = self
            .entries
            .iter()
            .map(|e| (e.app_id.clone(), e.activity_name.clone()))
            .collect();
        for e in entries {
            if seen.insert((e.app_id.clone(), e.activity_name.clone())) {
                *self
                    .name_frequency
                    .entry(e.activity_name.clone())
                    .or_default() += 1;
                self.entries.push(e);
            }
        }
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn frequency(&self, name: &str) -> usize {
        self.name_frequency.get(name).copied().unwrap_or(0)
    }

    pub fn name_frequency(&self) -> &BTreeMap<String, usize> {
        &self.name_frequency
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One JSON record per line; blank lines are skipped.
    pub fn from_jsonl(text: &str) -> Result<Self, CorpusError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let e = serde_json::from_str(line).map_err(|source| CorpusError::Record {
                line: i + 1,
                source,
            })?;
            entries.push(e);
        }
        Ok(Corpus::new(entries))
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("corpus entries serialize"));
            out.push('\n');
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_jsonl(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        std::fs::write(path, self.to_jsonl()).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// One entry per non-obfuscated activity that names a layout file.
/// Activities that build their UI purely in code have no layout name and are
/// skipped.
pub fn build_corpus<'a>(bundles: impl IntoIterator<Item = &'a AppBundle>) -> Corpus {
    let mut entries = Vec::new();
    for b in bundles {
        for class in b
            .code
            .classes
            .iter()
            .filter(|c| c.kind == ClassKind::Activity)
        {
            let name = class.simple_name();
            if is_obfuscated(name) {
                continue;
            }
            let Some(doc) = class.layout.as_deref().and_then(|l| b.layout(l)) else {
                continue;
            };
            entries.push(CorpusEntry {
                app_id: b.app_id.clone(),
                activity_name: name.to_string(),
                layout_name: doc.name.clone(),
                tree: extract_layout_tree(doc),
            });
        }
    }
    Corpus::new(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchedBy {
    Keyword,
    TopFrequency,
    NotObfuscated,
    NoCandidates,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub name: String,
    /// Smallest distance from the target over this name's corpus entries.
    pub ted: usize,
    pub frequency: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InferenceResult {
    pub original_name: String,
    pub inferred_name: String,
    pub candidates: Vec<Candidate>,
    pub matched_by: MatchedBy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferenceConfig {
    /// Entries strictly closer than this are candidates.
    pub threshold: usize,
    /// Lower-case words ignored when matching names against layout names.
    pub stopwords: Vec<String>,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            threshold: DEFAULT_THRESHOLD,
            stopwords: vec!["activity".into(), "layout".into()],
        }
    }
}

/// Split on underscores, digits, other punctuation, and camel-case humps
/// (`HTTPServer` gives `http`, `server`); lower-cased.
pub fn split_words(name: &str) -> Vec<String> {
    let chars: Vec<char> = name.chars().collect();
    let mut words = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphabetic() {
            if !cur.is_empty() {
                words.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if c.is_uppercase() && !cur.is_empty() {
            let prev_lower = chars[i - 1].is_lowercase();
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            let prev_upper = chars[i - 1].is_uppercase();
            if prev_lower || (prev_upper && next_lower) {
                words.push(std::mem::take(&mut cur));
            }
        }
        cur.extend(c.to_lowercase());
    }
    if !cur.is_empty() {
        words.push(cur);
    }
    words
}

fn keywords(name: &str, stopwords: &[String]) -> Vec<String> {
    split_words(name)
        .into_iter()
        .filter(|w| !stopwords.contains(w))
        .collect()
}

/// Equal words match; otherwise one must be a prefix of the other and the
/// shorter at least three letters long.
fn words_match(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    short.len() >= 3 && long.starts_with(short)
}

/// Rank corpus names whose layouts lie within the threshold of `target`, then
/// pick the first whose words match the layout name, else the most frequent.
pub fn infer_semantic_name(
    original_name: &str,
    target: &LayoutTree,
    layout_name: Option<&str>,
    corpus: &Corpus,
    config: &InferenceConfig,
) -> InferenceResult {
    if !is_obfuscated(original_name) {
        return InferenceResult {
            original_name: original_name.to_string(),
            inferred_name: original_name.to_string(),
            candidates: Vec::new(),
            matched_by: MatchedBy::NotObfuscated,
        };
    }
    let mut best: BTreeMap<&str, usize> = BTreeMap::new();
    for e in corpus.entries() {
        let d = tree_edit_distance(target, &e.tree);
        if d < config.threshold {
            let slot = best.entry(&e.activity_name).or_insert(d);
            *slot = (*slot).min(d);
        }
    }
    let mut candidates: Vec<Candidate> = best
        .into_iter()
        .map(|(name, ted)| Candidate {
            name: name.to_string(),
            ted,
            frequency: corpus.frequency(name),
        })
        .collect();
    candidates
        .sort_by(|a, b| (Reverse(a.frequency), &a.name).cmp(&(Reverse(b.frequency), &b.name)));

    let layout_words = layout_name
        .map(|l| keywords(l, &config.stopwords))
        .unwrap_or_default();
    let keyword_hit = candidates.iter().find(|c| {
        keywords(&c.name, &config.stopwords)
            .iter()
            .any(|w| layout_words.iter().any(|l| words_match(w, l)))
    });
    let (inferred_name, matched_by) = match (keyword_hit, candidates.first()) {
        (Some(c), _) => (c.name.clone(), MatchedBy::Keyword),
        (None, Some(c)) => (c.name.clone(), MatchedBy::TopFrequency),
        (None, None) => (original_name.to_string(), MatchedBy::NoCandidates),
    };
    InferenceResult {
        original_name: original_name.to_string(),
        inferred_name,
        candidates,
        matched_by,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use crate::ted_oracle as oracle;

    fn t(s: &str) -> LayoutTree {
        s.parse().unwrap()
    }

    #[test]
    fn obfuscation_gate() {
        assert!(is_obfuscated("a"));
        assert!(is_obfuscated("ab"));
        assert!(!is_obfuscated("abc"));
        assert!(is_obfuscated("com.example.a"));
        assert!(is_obfuscated("a1_2"));
        assert!(is_obfuscated("Outer$b"));
        assert!(!is_obfuscated("MainActivity"));
    }

    #[test]
    fn notation_round_trip_and_errors() {
        let s = "LinearLayout(TextView,EditText(android.widget.X,Y$1))";
        assert_eq!(t(s).to_string(), s);
        assert_eq!(t(s).size(), 5);
        for bad in ["", "A()", "A(B", "A(B,)", "A B", "(A)", "A)B"] {
            assert!(bad.parse::<LayoutTree>().is_err(), "{bad}");
        }
    }

    #[test]
    fn tree_from_layout_document() {
        let doc = LayoutDocument::parse(
            "login",
            "login.xml",
            r#"<LinearLayout orientation="vertical"><TextView text="x"/><LinearLayout><EditText/></LinearLayout></LinearLayout>"#,
        )
        .unwrap();
        let tree = extract_layout_tree(&doc);
        assert_eq!(
            tree.to_string(),
            "LinearLayout(TextView,LinearLayout(EditText))"
        );
        let single = LayoutDocument::parse("r", "r.xml", "<RelativeLayout/>").unwrap();
        assert_eq!(extract_layout_tree(&single).size(), 1);
    }

    #[test]
    fn ted_small_cases() {
        let a = t("LinearLayout(TextView,EditText)");
        assert_eq!(tree_edit_distance(&a, &a), 0);
        assert_eq!(
            tree_edit_distance(&a, &t("LinearLayout(TextView,EditText,View)")),
            1
        );
        assert_eq!(
            tree_edit_distance(&a, &t("FrameLayout(TextView,EditText)")),
            1
        );
        assert_eq!(tree_edit_distance(&t("A"), &t("B(C,D)")), 3);
        // Classic example: f(d(a,c(b)),e) vs f(c(d(a,b)),e) is 2.
        assert_eq!(
            tree_edit_distance(&t("f(d(a,c(b)),e)"), &t("f(c(d(a,b)),e)")),
            2
        );
    }

    #[test]
    fn word_splitting() {
        assert_eq!(split_words("activity_about"), vec!["activity", "about"]);
        assert_eq!(split_words("grid_base"), vec!["grid", "base"]);
        assert_eq!(split_words("SearchActivity"), vec!["search", "activity"]);
        assert_eq!(
            split_words("HTTPServerView2x"),
            vec!["http", "server", "view", "x"]
        );
        assert!(words_match("search", "searcher"));
        assert!(!words_match("se", "search"));
        assert!(words_match("ok", "ok"));
    }

    fn entry(app: &str, name: &str, layout: &str, tree: &str) -> CorpusEntry {
        CorpusEntry {
            app_id: app.into(),
            activity_name: name.into(),
            layout_name: layout.into(),
            tree: t(tree),
        }
    }

    fn corpus() -> Corpus {
        Corpus::new(vec![
            entry(
                "a1",
                "AboutActivity",
                "about",
                "LinearLayout(ImageView,TextView,TextView)",
            ),
            entry(
                "a2",
                "AboutActivity",
                "activity_about",
                "LinearLayout(ImageView,TextView)",
            ),
            entry(
                "a3",
                "Searcher",
                "search",
                "LinearLayout(EditText,GridView)",
            ),
            entry(
                "a4",
                "Searcher",
                "searcher",
                "LinearLayout(EditText,GridView)",
            ),
            entry("a5", "Searcher", "find", "LinearLayout(EditText,ListView)"),
            entry(
                "a6",
                "SearchActivity",
                "search_main",
                "LinearLayout(EditText,GridView)",
            ),
            entry(
                "a7",
                "SettingsActivity",
                "settings",
                "RelativeLayout(ListView)",
            ),
        ])
    }

    #[test]
    fn about_matches_by_keyword() {
        let r = infer_semantic_name(
            "a",
            &t("LinearLayout(ImageView,TextView,TextView)"),
            Some("about"),
            &corpus(),
            &InferenceConfig::default(),
        );
        assert_eq!(r.inferred_name, "AboutActivity");
        assert_eq!(r.matched_by, MatchedBy::Keyword);
        assert_eq!(r.candidates[0].name, "Searcher");
        assert!(r
            .candidates
            .iter()
            .any(|c| c.name == "AboutActivity" && c.ted == 0));
    }

    #[test]
    fn grid_base_falls_back_to_top_frequency() {
        let r = infer_semantic_name(
            "b",
            &t("LinearLayout(EditText,GridView)"),
            Some("grid_base"),
            &corpus(),
            &InferenceConfig::default(),
        );
        assert_eq!(r.inferred_name, "Searcher");
        assert_eq!(r.matched_by, MatchedBy::TopFrequency);
    }

    #[test]
    fn pass_through_and_no_candidates() {
        let c = corpus();
        let cfg = InferenceConfig::default();
        let r = infer_semantic_name("MainActivity", &t("A"), Some("about"), &c, &cfg);
        assert_eq!(
            (r.inferred_name.as_str(), r.matched_by),
            ("MainActivity", MatchedBy::NotObfuscated)
        );
        let far = t("X(X,X,X,X,X,X,X,X)");
        let r = infer_semantic_name("c", &far, Some("about"), &c, &cfg);
        assert_eq!(
            (r.inferred_name.as_str(), r.matched_by),
            ("c", MatchedBy::NoCandidates)
        );
    }

    #[test]
    fn frequency_ties_are_lexicographic() {
        let c = Corpus::new(vec![
            entry("x", "Beta", "b", "A"),
            entry("y", "Alpha", "a", "A"),
        ]);
        let r = infer_semantic_name("q", &t("A"), None, &c, &InferenceConfig::default());
        let names: Vec<_> = r.candidates.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, vec!["Alpha", "Beta"]);
        assert_eq!(r.inferred_name, "Alpha");
    }

    #[test]
    fn corpus_dedup_frequency_and_jsonl() {
        let mut c = Corpus::new(vec![
            entry("a", "LoginActivity", "login", "A(B)"),
            entry("b", "LoginActivity", "login", "A(B)"),
            entry("a", "LoginActivity", "login2", "A"),
        ]);
        assert_eq!(c.len(), 2);
        assert_eq!(c.frequency("LoginActivity"), 2);
        c.extend(vec![entry("b", "LoginActivity", "x", "A")]);
        assert_eq!(c.len(), 2);
        let text = c.to_jsonl();
        assert_eq!(
            text.lines().next().unwrap(),
            r#"{"app_id":"a","activity_name":"LoginActivity","layout_name":"login","tree":"A(B)"}"#
        );
        assert_eq!(Corpus::from_jsonl(&text).unwrap(), c);
        assert!(matches!(
            Corpus::from_jsonl("{}\n"),
            Err(CorpusError::Record { line: 1, .. })
        ));
    }

    const VOCAB: &[&str] = &[
        "LinearLayout",
        "FrameLayout",
        "TextView",
        "Button",
        "ImageView",
        "EditText",
    ];

    fn arb_tree() -> impl Strategy<Value = LayoutTree> {
        let leaf = (0..VOCAB.len()).prop_map(|i| LayoutTree::leaf(VOCAB[i]));
        leaf.prop_recursive(3, 8, 3, |inner| {
            (0..VOCAB.len(), proptest::collection::vec(inner, 0..3)).prop_map(|(i, children)| {
                LayoutTree {
                    label: VOCAB[i].to_string(),
                    children,
                }
            })
        })
        .prop_filter("at most 8 nodes", |t| t.size() <= 8)
    }

    proptest! {
        #[test]
        fn equals_reference(a in arb_tree(), b in arb_tree()) {
            prop_assert_eq!(tree_edit_distance(&a, &b), oracle::ted(&a.to_string(), &b.to_string()));
        }

        #[test]
        fn metric_axioms(a in arb_tree(), b in arb_tree(), c in arb_tree()) {
            prop_assert_eq!(tree_edit_distance(&a, &a), 0);
            let ab = tree_edit_distance(&a, &b);
            prop_assert_eq!(ab, tree_edit_distance(&b, &a));
            prop_assert!(tree_edit_distance(&a, &c) <= ab + tree_edit_distance(&b, &c));
        }

        #[test]
        fn notation_round_trips(a in arb_tree()) {
            prop_assert_eq!(a.to_string().parse::<LayoutTree>().unwrap(), a);
        }

        #[test]
        fn candidates_are_exactly_the_close_entries(target in arb_tree(), trees in proptest::collection::vec(arb_tree(), 1..10)) {
            let corpus = Corpus::new(trees.iter().enumerate().map(|(i, tr)| CorpusEntry {
                app_id: format!("app{i}"),
                activity_name: format!("Name{}", i % 3),
                layout_name: "x".into(),
                tree: tr.clone(),
            }));
            let cfg = InferenceConfig::default();
            let r = infer_semantic_name("z", &target, None, &corpus, &cfg);
            let close: BTreeSet<String> = corpus.entries().iter()
                .filter(|e| oracle::ted(&target.to_string(), &e.tree.to_string()) < cfg.threshold)
                .map(|e| e.activity_name.clone())
                .collect();
            let got: BTreeSet<String> = r.candidates.iter().map(|c| c.name.clone()).collect();
            prop_assert_eq!(got, close);
            prop_assert!(r.candidates.iter().all(|c| c.ted < cfg.threshold));
        }
    }
}
