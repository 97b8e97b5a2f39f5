use std::collections::HashMap;

use crate::error::ContextError;
use crate::expr::Expr;

/// Reserved words of the expression DSL that may not be declared as names.
pub const RESERVED: &[&str] = &["d", "exp", "ln"];

macro_rules! id_type {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(VarId, "Independent variable.");
id_type!(DepId, "Dependent variable.");
id_type!(ParamId, "Named commuting constant.");
id_type!(FuncId, "Smooth function symbol.");
id_type!(DefId, "Defined atom with user-declared rules.");

/// What a declared name refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameKind {
    Indep(VarId),
    Dep(DepId),
    Param(ParamId),
    Func(FuncId),
    Def(DefId),
}

#[derive(Debug, Clone)]
pub struct FuncDecl {
    pub name: String,
    pub arity: usize,
}

/// A power relation `atom^degree = rhs` used to rewrite the atom during
/// normalization. The rhs must not mention the atom itself.
#[derive(Debug, Clone)]
pub struct Relation {
    pub degree: u32,
    pub rhs: Expr,
}

#[derive(Debug, Clone)]
pub struct DefinedAtom {
    pub name: String,
    pub relation: Option<Relation>,
    /// Total-derivative rule per independent variable, if declared.
    pub drules: Vec<Option<Expr>>,
}

/// Symbol table shared by every operation: independent and dependent
/// variables, parameters, function symbols with their arity, and defined
/// atoms with their rewrite relations and derivative rules.
///
/// Names are unique across all categories. The declaration order of
/// independent variables fixes the jet ranking; the declaration order of
/// defined atoms fixes their position in the global atom order.
#[derive(Debug, Clone)]
pub struct Context {
    indep: Vec<String>,
    deps: Vec<String>,
    params: Vec<String>,
    funcs: Vec<FuncDecl>,
    defined: Vec<DefinedAtom>,
    names: HashMap<String, NameKind>,
    /// Rewrite ln(exp(v)) -> v. On by default.
    pub ln_of_exp: bool,
    /// Rewrite exp(ln(v)) -> v. On by default; sound on the domains the
    /// scenarios evaluate on (arguments of ln kept positive).
    pub exp_of_ln: bool,
}

impl Default for Context {
    fn default() -> Self {
        Self::new()
    }
}

impl Context {
    pub fn new() -> Self {
        Context {
            indep: Vec::new(),
            deps: Vec::new(),
            params: Vec::new(),
            funcs: Vec::new(),
            defined: Vec::new(),
            names: HashMap::new(),
            ln_of_exp: true,
            exp_of_ln: true,
        }
    }

    fn check_name(&self, name: &str) -> Result<(), ContextError> {
        let mut chars = name.chars();
        let ok_head = chars.next().map_or(false, |c| c.is_ascii_alphabetic() || c == '_');
        if !ok_head || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(ContextError::InvalidName(name.to_string()));
        }
        if RESERVED.contains(&name) {
            return Err(ContextError::ReservedName(name.to_string()));
        }
        if self.names.contains_key(name) {
            return Err(ContextError::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    pub fn add_indep(&mut self, name: &str) -> Result<VarId, ContextError> {
        self.check_name(name)?;
        let id = VarId(self.indep.len() as u32);
        self.indep.push(name.to_string());
        self.names.insert(name.to_string(), NameKind::Indep(id));
        Ok(id)
    }

    pub fn add_dep(&mut self, name: &str) -> Result<DepId, ContextError> {
        self.check_name(name)?;
        let id = DepId(self.deps.len() as u32);
        self.deps.push(name.to_string());
        self.names.insert(name.to_string(), NameKind::Dep(id));
        Ok(id)
    }

    pub fn add_param(&mut self, name: &str) -> Result<ParamId, ContextError> {
        self.check_name(name)?;
        let id = ParamId(self.params.len() as u32);
        self.params.push(name.to_string());
        self.names.insert(name.to_string(), NameKind::Param(id));
        Ok(id)
    }

    pub fn add_func(&mut self, name: &str, arity: usize) -> Result<FuncId, ContextError> {
        self.check_name(name)?;
        let id = FuncId(self.funcs.len() as u32);
        self.funcs.push(FuncDecl { name: name.to_string(), arity });
        self.names.insert(name.to_string(), NameKind::Func(id));
        Ok(id)
    }

    /// Register a defined atom. Its relation and derivative rules are attached
    /// afterwards so they can mention the atom itself.
    pub fn add_defined(&mut self, name: &str) -> Result<DefId, ContextError> {
        self.check_name(name)?;
        let id = DefId(self.defined.len() as u32);
        self.defined.push(DefinedAtom {
            name: name.to_string(),
            relation: None,
            drules: vec![None; self.indep.len()],
        });
        self.names.insert(name.to_string(), NameKind::Def(id));
        Ok(id)
    }

    /// Attach the rewrite relation `atom^degree = rhs`. The rhs may reference
    /// only the atom set excluding this atom and any later-declared defined
    /// atom, which guarantees rewriting terminates.
    pub fn set_relation(&mut self, id: DefId, degree: u32, rhs: Expr) -> Result<(), ContextError> {
        if degree == 0 {
            return Err(ContextError::ZeroDegreeRelation);
        }
        let name = self.defined[id.index()].name.clone();
        if rhs.references_def_at_or_after(id) {
            return Err(ContextError::RecursiveRelation(name));
        }
        self.defined[id.index()].relation = Some(Relation { degree, rhs });
        Ok(())
    }

    /// Attach the total-derivative rule `D_v(atom) = rhs`.
    pub fn set_drule(&mut self, id: DefId, v: VarId, rhs: Expr) {
        let rules = &mut self.defined[id.index()].drules;
        if rules.len() < self.indep.len() {
            rules.resize(self.indep.len(), None);
        }
        rules[v.index()] = Some(rhs);
    }

    pub fn lookup(&self, name: &str) -> Option<NameKind> {
        self.names.get(name).copied()
    }

    pub fn indep_count(&self) -> usize {
        self.indep.len()
    }

    pub fn indep_names(&self) -> &[String] {
        &self.indep
    }

    pub fn indep_name(&self, id: VarId) -> &str {
        &self.indep[id.index()]
    }

    pub fn dep_name(&self, id: DepId) -> &str {
        &self.deps[id.index()]
    }

    pub fn dep_count(&self) -> usize {
        self.deps.len()
    }

    pub fn param_name(&self, id: ParamId) -> &str {
        &self.params[id.index()]
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn func(&self, id: FuncId) -> &FuncDecl {
        &self.funcs[id.index()]
    }

    pub fn func_count(&self) -> usize {
        self.funcs.len()
    }

    pub fn defined(&self, id: DefId) -> &DefinedAtom {
        &self.defined[id.index()]
    }

    pub fn defined_count(&self) -> usize {
        self.defined.len()
    }

    pub fn relation(&self, id: DefId) -> Option<&Relation> {
        self.defined[id.index()].relation.as_ref()
    }

    pub fn drule(&self, id: DefId, v: VarId) -> Option<&Expr> {
        self.defined[id.index()]
            .drules
            .get(v.index())
            .and_then(|r| r.as_ref())
    }

    pub fn require_indep(&self, name: &str) -> Result<VarId, ContextError> {
        match self.lookup(name) {
            Some(NameKind::Indep(v)) => Ok(v),
            Some(k) => Err(ContextError::WrongKind {
                name: name.to_string(),
                actual: kind_str(k),
                expected: "an independent variable",
            }),
            None => Err(ContextError::UnknownName(name.to_string())),
        }
    }

    pub fn require_dep(&self, name: &str) -> Result<DepId, ContextError> {
        match self.lookup(name) {
            Some(NameKind::Dep(v)) => Ok(v),
            Some(k) => Err(ContextError::WrongKind {
                name: name.to_string(),
                actual: kind_str(k),
                expected: "a dependent variable",
            }),
            None => Err(ContextError::UnknownName(name.to_string())),
        }
    }

    pub fn require_param(&self, name: &str) -> Result<ParamId, ContextError> {
        match self.lookup(name) {
            Some(NameKind::Param(v)) => Ok(v),
            Some(k) => Err(ContextError::WrongKind {
                name: name.to_string(),
                actual: kind_str(k),
                expected: "a parameter",
            }),
            None => Err(ContextError::UnknownName(name.to_string())),
        }
    }

    pub fn require_func(&self, name: &str) -> Result<FuncId, ContextError> {
        match self.lookup(name) {
            Some(NameKind::Func(v)) => Ok(v),
            Some(k) => Err(ContextError::WrongKind {
                name: name.to_string(),
                actual: kind_str(k),
                expected: "a function symbol",
            }),
            None => Err(ContextError::UnknownName(name.to_string())),
        }
    }

    pub fn require_defined(&self, name: &str) -> Result<DefId, ContextError> {
        match self.lookup(name) {
            Some(NameKind::Def(v)) => Ok(v),
            Some(k) => Err(ContextError::WrongKind {
                name: name.to_string(),
                actual: kind_str(k),
                expected: "a defined atom",
            }),
            None => Err(ContextError::UnknownName(name.to_string())),
        }
    }
}

fn kind_str(k: NameKind) -> &'static str {
    match k {
        NameKind::Indep(_) => "an independent variable",
        NameKind::Dep(_) => "a dependent variable",
        NameKind::Param(_) => "a parameter",
        NameKind::Func(_) => "a function symbol",
        NameKind::Def(_) => "a defined atom",
    }
}
