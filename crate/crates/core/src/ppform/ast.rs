use std::fmt;

/// A variable or a domain constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(u8),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Rel { name: String, args: Vec<Term> },
    Eq(Term, Term),
}

impl Atom {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Rel { args, .. } => args.iter().collect(),
            Atom::Eq(a, b) => vec![a, b],
        }
    }
}

/// `exists e1 .. em. atom & .. & atom` with an ordered list of free variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PpFormula {
    pub free: Vec<String>,
    pub exists: Vec<String>,
    pub atoms: Vec<Atom>,
    /// Whether constants may appear; evaluation then expands the structure by singletons.
    pub constants: bool,
}

impl PpFormula {
    pub fn has_constants(&self) -> bool {
        self.atoms
            .iter()
            .flat_map(Atom::terms)
            .any(|t| matches!(t, Term::Const(_)))
    }

    /// Variables in order of first occurrence in the atoms.
    pub fn occurring_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for t in self.atoms.iter().flat_map(Atom::terms) {
            if let Term::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    pub fn with_constants(mut self, allowed: bool) -> Self {
        self.constants = allowed;
        self
    }
}

/// `let Name(params) := formula`; the formula's free variables are the parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binding {
    pub name: String,
    pub formula: PpFormula,
}

/// Bindings evaluated in order; later ones may use earlier names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PpProgram {
    pub bindings: Vec<Binding>,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Rel { name, args } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Atom::Eq(a, b) => write!(f, "{a} = {b}"),
        }
    }
}

/// Prints the body only: `exists u v. A(x,u) & u = v`, or `true` for the empty conjunction.
impl fmt::Display for PpFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.exists.is_empty() {
            write!(f, "exists {}. ", self.exists.join(" "))?;
        }
        if self.atoms.is_empty() {
            return write!(f, "true");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "let {}({}) := {}", self.name, self.formula.free.join(","), self.formula)
    }
}

impl fmt::Display for PpProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bindings {
            writeln!(f, "{b}")?;
        }
        Ok(())
    }
}
