//! The identities and transformations, shipped as DSL source.
//!
//! The built-in files under `data/catalog` are embedded at compile time.
//! Setting `QRR_DATA_DIR` makes [`Catalog::load`] read `*.qrr` files from
//! `$QRR_DATA_DIR/catalog` instead.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::dsl::{
    evaluate, evaluate_mono, parse_file, EvalError, Expr, IdentityRecord, InstanceSpec, MonoExpr, ParseError, QSub,
    RecordBody, Specialization,
};
use crate::QSeries;

const BUILTIN: &[(&str, &str)] = &[
    (
        "01_rogers_ramanujan.qrr",
        include_str!("../data/catalog/01_rogers_ramanujan.qrr"),
    ),
    ("02_classical.qrr", include_str!("../data/catalog/02_classical.qrr")),
    (
        "03_constant_term.qrr",
        include_str!("../data/catalog/03_constant_term.qrr"),
    ),
    ("04_watson.qrr", include_str!("../data/catalog/04_watson.qrr")),
    (
        "05_q_difference.qrr",
        include_str!("../data/catalog/05_q_difference.qrr"),
    ),
    ("06_theta.qrr", include_str!("../data/catalog/06_theta.qrr")),
];

/// Alternative names accepted by [`Catalog::get`].
pub const ALIASES: &[(&str, &str)] = &[("slater36", "GG1"), ("slater34", "GG2")];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntryKind {
    /// No free parameters.
    Identity,
    /// Free symbols or integer parameters to be specialized.
    Transformation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    pub symbols: BTreeSet<String>,
    pub ints: BTreeSet<String>,
}

impl Params {
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty() && self.ints.is_empty()
    }

    /// All parameter names, symbols first.
    pub fn names(&self) -> BTreeSet<String> {
        self.symbols.iter().chain(&self.ints).cloned().collect()
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub record: IdentityRecord,
    pub kind: EntryKind,
    pub params: Params,
    /// Source file the entry was read from.
    pub file: String,
}

impl CatalogEntry {
    pub fn id(&self) -> &str {
        &self.record.id
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("{file}:{err}")]
    Parse { file: String, err: ParseError },
    #[error("unknown id '{0}'")]
    UnknownId(String),
    #[error("duplicate id '{0}'")]
    DuplicateId(String),
    #[error("'{id}' instantiates unknown entry '{parent}'")]
    UnknownParent { id: String, parent: String },
    #[error("'{id}' binds '{name}', which is not a parameter of its parent")]
    BadBinding { id: String, name: String },
    #[error("instance cycle through '{0}'")]
    Cycle(String),
    #[error("'{0}': the two sides have different free parameters")]
    SideMismatch(String),
    #[error("{0}")]
    Io(String),
}

/// A resolved instance: bindings applied on top of a parent entry.
#[derive(Debug, Clone)]
struct Binding {
    parent: usize,
    symbols: BTreeMap<String, MonoExpr>,
    ints: BTreeMap<String, i64>,
    qsub: QSub,
}

#[derive(Debug, Clone)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
    index: HashMap<String, usize>,
    bindings: HashMap<usize, Binding>,
}

impl Catalog {
    /// Builds a catalog from `(file name, source)` pairs.
    pub fn from_sources<S: AsRef<str>, T: AsRef<str>>(sources: &[(S, T)]) -> Result<Self, CatalogError> {
        let mut records = Vec::new();
        for (file, text) in sources {
            let recs = parse_file(text.as_ref()).map_err(|err| CatalogError::Parse {
                file: file.as_ref().to_string(),
                err,
            })?;
            records.extend(recs.into_iter().map(|r| (file.as_ref().to_string(), r)));
        }
        let mut index = HashMap::new();
        for (i, (_, r)) in records.iter().enumerate() {
            if index.insert(r.id.clone(), i).is_some() {
                return Err(CatalogError::DuplicateId(r.id.clone()));
            }
        }
        let mut params: Vec<Option<Params>> = vec![None; records.len()];
        let mut bindings = HashMap::new();
        for i in 0..records.len() {
            resolve_params(i, &records, &index, &mut params, &mut bindings, &mut Vec::new())?;
        }
        let entries = records
            .into_iter()
            .zip(params)
            .map(|((file, record), p)| {
                let params = p.expect("every entry resolved");
                let kind = if params.is_empty() {
                    EntryKind::Identity
                } else {
                    EntryKind::Transformation
                };
                CatalogEntry {
                    record,
                    kind,
                    params,
                    file,
                }
            })
            .collect();
        Ok(Catalog {
            entries,
            index,
            bindings,
        })
    }

    /// The embedded catalog.
    pub fn builtin() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::from_sources(BUILTIN).expect("built-in catalog is valid"))
    }

    /// Reads every `*.qrr` file in `dir`, in file-name order.
    pub fn from_dir(dir: &Path) -> Result<Self, CatalogError> {
        let rd = std::fs::read_dir(dir).map_err(|e| CatalogError::Io(format!("{}: {e}", dir.display())))?;
        let mut files: Vec<_> = rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "qrr"))
            .collect();
        files.sort();
        let mut sources = Vec::new();
        for f in files {
            let text = std::fs::read_to_string(&f).map_err(|e| CatalogError::Io(format!("{}: {e}", f.display())))?;
            let name = f
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            sources.push((name, text));
        }
        Catalog::from_sources(&sources)
    }

    /// The catalog from `$QRR_DATA_DIR/catalog` if set, else the built-in one.
    pub fn load() -> Result<Catalog, CatalogError> {
        match std::env::var_os("QRR_DATA_DIR") {
            Some(dir) => Catalog::from_dir(&Path::new(&dir).join("catalog")),
            None => Ok(Catalog::builtin().clone()),
        }
    }

    /// The embedded source files, for printing or round-trip tests.
    pub fn builtin_sources() -> &'static [(&'static str, &'static str)] {
        BUILTIN
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Result<&CatalogEntry, CatalogError> {
        let id = ALIASES.iter().find(|(a, _)| *a == id).map_or(id, |(_, t)| t);
        self.index
            .get(id)
            .map(|&i| &self.entries[i])
            .ok_or_else(|| CatalogError::UnknownId(id.to_string()))
    }

    /// The equation an entry ultimately instantiates, with its id.
    pub fn root_equation(&self, id: &str) -> Result<(&str, &Expr, &Expr), CatalogError> {
        let mut i = self.index_of(id)?;
        while let Some(b) = self.bindings.get(&i) {
            i = b.parent;
        }
        match &self.entries[i].record.body {
            RecordBody::Equation { lhs, rhs } => Ok((&self.entries[i].record.id, lhs, rhs)),
            RecordBody::Instance(_) => unreachable!("bindings cover every instance"),
        }
    }

    fn index_of(&self, id: &str) -> Result<usize, CatalogError> {
        let entry = self.get(id)?;
        Ok(self.index[&entry.record.id])
    }

    /// Evaluates one side of an entry under `spec`, which binds the entry's
    /// own parameters.
    pub fn evaluate_side(
        &self,
        id: &str,
        side: Side,
        spec: &Specialization,
        order: i64,
    ) -> Result<Result<QSeries, EvalError>, CatalogError> {
        let i = self.index_of(id)?;
        Ok(self.eval_index(i, side, spec, order))
    }

    fn eval_index(&self, i: usize, side: Side, spec: &Specialization, order: i64) -> Result<QSeries, EvalError> {
        match self.bindings.get(&i) {
            None => {
                let RecordBody::Equation { lhs, rhs } = &self.entries[i].record.body else {
                    unreachable!("equations have no binding")
                };
                evaluate(if side == Side::Lhs { lhs } else { rhs }, spec, order)
            }
            Some(b) => self.eval_binding(b, side, spec, order),
        }
    }

    fn eval_binding(&self, b: &Binding, side: Side, spec: &Specialization, order: i64) -> Result<QSeries, EvalError> {
        let mut inner = Specialization {
            symbols: spec.symbols.clone(),
            ints: spec.ints.clone(),
            qsub: spec.qsub.after(b.qsub),
        };
        for (name, m) in &b.symbols {
            inner.symbols.insert(name.clone(), evaluate_mono(m, spec)?);
        }
        for (name, v) in &b.ints {
            inner.ints.insert(name.clone(), *v);
        }
        self.eval_index(b.parent, side, &inner, order)
    }

    /// Evaluates one side of an instance that is not itself in the
    /// catalog. Its parent must be.
    pub fn evaluate_instance(
        &self,
        inst: &InstanceSpec,
        side: Side,
        spec: &Specialization,
        order: i64,
    ) -> Result<Result<QSeries, EvalError>, CatalogError> {
        let parent = self.index_of(&inst.parent)?;
        let (b, _) = make_binding(&inst.parent, inst, parent, &self.entries[parent].params)?;
        Ok(self.eval_binding(&b, side, spec, order))
    }
}

fn resolve_params(
    i: usize,
    records: &[(String, IdentityRecord)],
    index: &HashMap<String, usize>,
    params: &mut Vec<Option<Params>>,
    bindings: &mut HashMap<usize, Binding>,
    stack: &mut Vec<usize>,
) -> Result<Params, CatalogError> {
    if let Some(p) = &params[i] {
        return Ok(p.clone());
    }
    let rec = &records[i].1;
    if stack.contains(&i) {
        return Err(CatalogError::Cycle(rec.id.clone()));
    }
    stack.push(i);
    let p = match &rec.body {
        RecordBody::Equation { lhs, rhs } => {
            if lhs.symbols() != rhs.symbols() || lhs.int_params() != rhs.int_params() {
                return Err(CatalogError::SideMismatch(rec.id.clone()));
            }
            Params {
                symbols: lhs.symbols(),
                ints: lhs.int_params(),
            }
        }
        RecordBody::Instance(spec) => {
            let parent = *index.get(&spec.parent).ok_or_else(|| CatalogError::UnknownParent {
                id: rec.id.clone(),
                parent: spec.parent.clone(),
            })?;
            let pp = resolve_params(parent, records, index, params, bindings, stack)?;
            let (b, out) = make_binding(&rec.id, spec, parent, &pp)?;
            bindings.insert(i, b);
            out
        }
    };
    stack.pop();
    params[i] = Some(p.clone());
    Ok(p)
}

fn make_binding(id: &str, spec: &InstanceSpec, parent: usize, pp: &Params) -> Result<(Binding, Params), CatalogError> {
    let bad = |name: &String| CatalogError::BadBinding {
        id: id.to_string(),
        name: name.clone(),
    };
    let mut b = Binding {
        parent,
        symbols: BTreeMap::new(),
        ints: BTreeMap::new(),
        qsub: spec.qsub.map_or(QSub::default(), |(s, p)| QSub::new(s, p)),
    };
    let mut out = Params::default();
    for (name, m) in &spec.symbols {
        if !pp.symbols.contains(name) {
            return Err(bad(name));
        }
        out.symbols.extend(m.symbols().map(|(s, _)| s.clone()));
        out.ints.extend(m.int_vars());
        b.symbols.insert(name.clone(), m.clone());
    }
    for (name, v) in &spec.ints {
        if pp.ints.contains(name) {
            b.ints.insert(name.clone(), *v);
        } else if pp.symbols.contains(name) && *v != 0 {
            // an integer literal bound to a symbol
            b.symbols.insert(name.clone(), MonoExpr::integer(*v).expect("nonzero"));
        } else {
            return Err(bad(name));
        }
    }
    out.symbols
        .extend(pp.symbols.iter().filter(|s| !b.symbols.contains_key(*s)).cloned());
    out.ints
        .extend(pp.ints.iter().filter(|s| !b.ints.contains_key(*s)).cloned());
    Ok((b, out))
}

/// All entries of the active catalog (see [`Catalog::load`]).
pub fn list_entries() -> Result<Vec<CatalogEntry>, CatalogError> {
    Ok(Catalog::load()?.entries().to_vec())
}

/// One entry of the active catalog.
pub fn get(id: &str) -> Result<CatalogEntry, CatalogError> {
    Catalog::load()?.get(id).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_file, print_record};
    use crate::Monomial;

    fn cat() -> &'static Catalog {
        Catalog::builtin()
    }

    #[test]
    fn kinds_and_params() {
        assert_eq!(cat().get("rr1-a").unwrap().kind, EntryKind::Identity);
        let eq1 = cat().get("eq1").unwrap();
        assert_eq!(eq1.kind, EntryKind::Transformation);
        let names: Vec<&str> = eq1.params.symbols.iter().map(String::as_str).collect();
        assert_eq!(names, ["a", "b", "gamma"]);
        let wat = cat().get("Wat").unwrap();
        assert_eq!(
            wat.params.names().into_iter().collect::<Vec<_>>(),
            ["a", "b", "c", "d", "e", "n"]
        );
        assert_eq!(cat().get("slater36").unwrap().id(), "GG1");
        assert_eq!(cat().get("slater34").unwrap().id(), "GG2");
        assert!(matches!(cat().get("nope"), Err(CatalogError::UnknownId(_))));
    }

    #[test]
    fn instance_params() {
        assert_eq!(cat().get("c1-eq1").unwrap().kind, EntryKind::Identity);
        let w = cat().get("Wat1-W4").unwrap();
        assert_eq!(
            w.params.symbols,
            ["a", "b", "c"].iter().map(|s| s.to_string()).collect()
        );
        assert_eq!(cat().get("c13-W13").unwrap().kind, EntryKind::Identity);
    }

    #[test]
    fn size_and_coverage() {
        let ids: BTreeSet<&str> = cat().entries().iter().map(|e| e.id()).collect();
        for id in [
            "rr1-a",
            "rr1-b",
            "GG1",
            "GG2",
            "id13",
            "id13a",
            "eq1",
            "eq2",
            "eq3",
            "eq4",
            "eq5",
            "eq6",
            "eq1a",
            "absym1",
            "a28",
            "a25",
            "c1eq",
            "c2eq",
            "c3eq",
            "id14",
            "id17",
            "Wat",
            "W1",
            "W3",
            "W4",
            "Wat1",
            "W11",
            "W12",
            "W13",
            "eq11",
            "leb1",
            "c12eq",
            "beq",
            "c13eq",
            "slater27-neg",
            "qdeq",
            "id21eq",
            "binomeq",
            "andeq",
            "jtpeq",
            "baileyeq",
            "bbgid",
            "bbgid2",
            "tseq",
            "c15eq",
        ] {
            assert!(ids.contains(id), "{id} missing");
        }
        let identities = cat().entries().iter().filter(|e| e.kind == EntryKind::Identity).count();
        assert!(identities >= 38, "{identities} identities");
    }

    #[test]
    fn print_parse_round_trip() {
        for e in cat().entries() {
            let text = print_record(&e.record);
            let back = parse_file(&text).unwrap_or_else(|err| panic!("{}: {err}\n{text}", e.id()));
            assert_eq!(back, vec![e.record.clone()], "{}", e.id());
            assert_eq!(print_record(&back[0]), text);
        }
    }

    #[test]
    fn instance_with_substitution_matches_direct_form() {
        // c1-eq1 LHS is the c1eq LHS written with the substitution applied
        let s = Specialization::new();
        let a = cat().evaluate_side("c1-eq1", Side::Lhs, &s, 60).unwrap().unwrap();
        let b = cat().evaluate_side("c1eq", Side::Lhs, &s, 60).unwrap().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn binding_commutes_with_dilation() {
        // binding a = q^2 under q -> q^2 is binding a = q, then dilating
        let direct = Specialization::new()
            .with_symbol("a", Monomial::q(1))
            .with_symbol("b", Monomial::neg_q(2))
            .with_symbol("gamma", Monomial::neg_q(3));
        let lifted = Specialization::new()
            .with_symbol("a", Monomial::q(2))
            .with_symbol("b", Monomial::neg_q(4))
            .with_symbol("gamma", Monomial::neg_q(6))
            .with_qsub(QSub::new(1, 2));
        for side in [Side::Lhs, Side::Rhs] {
            let x = cat().evaluate_side("eq1", side, &direct, 80).unwrap().unwrap();
            let y = cat().evaluate_side("eq1", side, &lifted, 80).unwrap().unwrap();
            assert_eq!(x.substitute_power(2).unwrap(), y);
        }
    }

    #[test]
    fn bad_sources() {
        let dup = Catalog::from_sources(&[("x", "a: 1 = 1"), ("y", "a: q = q")]);
        assert!(matches!(dup, Err(CatalogError::DuplicateId(_))), "{dup:?}");
        assert!(matches!(
            Catalog::from_sources(&[("x", "a: instance(b; z = q)")]),
            Err(CatalogError::UnknownParent { .. })
        ));
        assert!(matches!(
            Catalog::from_sources(&[("x", "a: poch(z; q; inf) = poch(z; q; inf)\n\nb: instance(a; w = q)")]),
            Err(CatalogError::BadBinding { .. })
        ));
        assert!(matches!(
            Catalog::from_sources(&[("x", "a: instance(b; z = q)\n\nb: instance(a; z = q)")]),
            Err(CatalogError::Cycle(_)) | Err(CatalogError::BadBinding { .. })
        ));
        assert!(matches!(
            Catalog::from_sources(&[("x", "a: poch(z; q; inf) = 1")]),
            Err(CatalogError::SideMismatch(_))
        ));
    }
}
