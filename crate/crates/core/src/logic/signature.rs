//! Multi-sorted signatures: sorts, function and predicate symbols, and the
//! monitored state variables.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SortId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FunId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PredId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub u32);

/// Interpretation class of a sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SortKind {
    Uninterpreted,
    /// Dense, unbounded order (linear rational arithmetic).
    Rational,
    Integer,
}

impl SortKind {
    pub fn is_arithmetic(self) -> bool {
        !matches!(self, SortKind::Uninterpreted)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sort {
    pub name: String,
    pub kind: SortKind,
}

/// A function symbol; constants are functions without arguments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Function {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicate {
    pub name: String,
    pub args: Vec<SortId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub sort: SortId,
}

/// What a bare identifier resolves to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Sort(SortId),
    Fun(FunId),
    Pred(PredId),
    Var(VarId),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("V must be nonempty")]
    NoVariables,
}

/// A validated multi-sorted signature. Equality is implicitly available at
/// every sort.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Signature {
    sorts: Vec<Sort>,
    functions: Vec<Function>,
    predicates: Vec<Predicate>,
    variables: Vec<Variable>,
    #[serde(skip)]
    names: HashMap<String, Symbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn claim(&mut self, name: &str, sym: Symbol) -> Result<(), SignatureError> {
        if self.names.contains_key(name) {
            return Err(SignatureError::Duplicate(name.to_string()));
        }
        self.names.insert(name.to_string(), sym);
        Ok(())
    }

    pub fn add_sort(&mut self, name: &str, kind: SortKind) -> Result<SortId, SignatureError> {
        let id = SortId(self.sorts.len() as u32);
        self.claim(name, Symbol::Sort(id))?;
        self.sorts.push(Sort { name: name.to_string(), kind });
        Ok(id)
    }

    fn check_sort(&self, s: SortId) -> Result<(), SignatureError> {
        if (s.0 as usize) < self.sorts.len() {
            Ok(())
        } else {
            Err(SignatureError::UnknownSort(format!("#{}", s.0)))
        }
    }

    pub fn add_function(
        &mut self,
        name: &str,
        args: Vec<SortId>,
        result: SortId,
    ) -> Result<FunId, SignatureError> {
        for &a in args.iter().chain(std::iter::once(&result)) {
            self.check_sort(a)?;
        }
        let id = FunId(self.functions.len() as u32);
        self.claim(name, Symbol::Fun(id))?;
        self.functions.push(Function { name: name.to_string(), args, result });
        Ok(id)
    }

    pub fn add_constant(&mut self, name: &str, sort: SortId) -> Result<FunId, SignatureError> {
        self.add_function(name, Vec::new(), sort)
    }

    pub fn add_predicate(&mut self, name: &str, args: Vec<SortId>) -> Result<PredId, SignatureError> {
        for &a in &args {
            self.check_sort(a)?;
        }
        let id = PredId(self.predicates.len() as u32);
        self.claim(name, Symbol::Pred(id))?;
        self.predicates.push(Predicate { name: name.to_string(), args });
        Ok(id)
    }

    pub fn add_variable(&mut self, name: &str, sort: SortId) -> Result<VarId, SignatureError> {
        self.check_sort(sort)?;
        let id = VarId(self.variables.len() as u32);
        self.claim(name, Symbol::Var(id))?;
        self.variables.push(Variable { name: name.to_string(), sort });
        Ok(id)
    }

    /// Final validation; a monitor needs at least one state variable.
    pub fn validate(&self) -> Result<(), SignatureError> {
        if self.variables.is_empty() {
            return Err(SignatureError::NoVariables);
        }
        Ok(())
    }

    /// Rebuild the name index, e.g. after deserialization.
    pub fn reindex(&mut self) {
        let mut names = HashMap::new();
        for (i, s) in self.sorts.iter().enumerate() {
            names.insert(s.name.clone(), Symbol::Sort(SortId(i as u32)));
        }
        for (i, f) in self.functions.iter().enumerate() {
            names.insert(f.name.clone(), Symbol::Fun(FunId(i as u32)));
        }
        for (i, p) in self.predicates.iter().enumerate() {
            names.insert(p.name.clone(), Symbol::Pred(PredId(i as u32)));
        }
        for (i, v) in self.variables.iter().enumerate() {
            names.insert(v.name.clone(), Symbol::Var(VarId(i as u32)));
        }
        self.names = names;
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.names.get(name).copied()
    }

    pub fn sort_by_name(&self, name: &str) -> Option<SortId> {
        match self.lookup(name) {
            Some(Symbol::Sort(s)) => Some(s),
            _ => None,
        }
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        match self.lookup(name) {
            Some(Symbol::Var(v)) => Some(v),
            _ => None,
        }
    }

    pub fn fun_by_name(&self, name: &str) -> Option<FunId> {
        match self.lookup(name) {
            Some(Symbol::Fun(f)) => Some(f),
            _ => None,
        }
    }

    pub fn pred_by_name(&self, name: &str) -> Option<PredId> {
        match self.lookup(name) {
            Some(Symbol::Pred(p)) => Some(p),
            _ => None,
        }
    }

    pub fn sort(&self, id: SortId) -> &Sort {
        &self.sorts[id.0 as usize]
    }

    pub fn function(&self, id: FunId) -> &Function {
        &self.functions[id.0 as usize]
    }

    pub fn predicate(&self, id: PredId) -> &Predicate {
        &self.predicates[id.0 as usize]
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0 as usize]
    }

    pub fn var_sort(&self, id: VarId) -> SortId {
        self.variable(id).sort
    }

    pub fn sort_kind(&self, id: SortId) -> SortKind {
        self.sort(id).kind
    }

    pub fn sort_ids(&self) -> impl Iterator<Item = SortId> + '_ {
        (0..self.sorts.len() as u32).map(SortId)
    }

    pub fn fun_ids(&self) -> impl Iterator<Item = FunId> + '_ {
        (0..self.functions.len() as u32).map(FunId)
    }

    pub fn pred_ids(&self) -> impl Iterator<Item = PredId> + '_ {
        (0..self.predicates.len() as u32).map(PredId)
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.variables.len() as u32).map(VarId)
    }

    pub fn num_sorts(&self) -> usize {
        self.sorts.len()
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// First declared sort of the given kind, used to type bare numerals.
    pub fn arithmetic_sort(&self, kind: SortKind) -> Option<SortId> {
        self.sort_ids().find(|&s| self.sort_kind(s) == kind)
    }

    /// Directed sort graph: an edge from every argument sort of a function to
    /// its result sort.
    pub fn sort_edges(&self) -> Vec<(SortId, SortId, FunId)> {
        let mut edges = Vec::new();
        for f in self.fun_ids() {
            let func = self.function(f);
            for &a in &func.args {
                edges.push((a, func.result, f));
            }
        }
        edges
    }

    /// A cycle in the sort graph, if any, as a list of sorts.
    pub fn sort_cycle(&self) -> Option<Vec<SortId>> {
        let n = self.sorts.len();
        let mut adj = vec![Vec::new(); n];
        for (a, b, _) in self.sort_edges() {
            adj[a.0 as usize].push(b.0 as usize);
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        let mut stack: Vec<usize> = Vec::new();
        fn dfs(
            u: usize,
            adj: &[Vec<usize>],
            state: &mut [u8],
            stack: &mut Vec<usize>,
        ) -> Option<Vec<usize>> {
            state[u] = 1;
            stack.push(u);
            for &v in &adj[u] {
                if state[v] == 1 {
                    let pos = stack.iter().position(|&x| x == v).unwrap();
                    return Some(stack[pos..].to_vec());
                }
                if state[v] == 0 {
                    if let Some(c) = dfs(v, adj, state, stack) {
                        return Some(c);
                    }
                }
            }
            stack.pop();
            state[u] = 2;
            None
        }
        for s in 0..n {
            if state[s] == 0 {
                if let Some(c) = dfs(s, &adj, &mut state, &mut stack) {
                    return Some(c.into_iter().map(|i| SortId(i as u32)).collect());
                }
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.sort_cycle().is_none()
    }

    /// Arithmetic sorts are leaves of the sort graph.
    pub fn is_tame(&self) -> bool {
        self.sort_edges()
            .iter()
            .all(|&(from, _, _)| !self.sort_kind(from).is_arithmetic())
    }

    pub fn max_function_arity(&self) -> usize {
        self.functions.iter().map(|f| f.args.len()).max().unwrap_or(0)
    }

    /// Predicates taking an argument of arithmetic sort.
    pub fn has_arithmetic_predicates(&self) -> bool {
        self.predicates
            .iter()
            .any(|p| p.args.iter().any(|&a| self.sort_kind(a).is_arithmetic()))
    }

    pub fn uses_arithmetic(&self) -> bool {
        self.sorts.iter().any(|s| s.kind.is_arithmetic())
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn functions(&self) -> &[Function] {
        &self.functions
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }
}
