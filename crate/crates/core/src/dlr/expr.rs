use std::fmt;

/// Kind of extension an expression denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    /// Sets of individuals (objects, or domain values for value concepts).
    Concept,
    /// Sets of n-tuples of objects.
    Relation(usize),
    /// Sets of (object, value) pairs.
    Attribute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    AtLeast,
    AtMost,
}

/// Attribute component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    From,
    To,
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::From => "From",
            Dir::To => "To",
        })
    }
}

/// Unary temporal operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TOp {
    Next,
    Prev,
    Future,
    Past,
    AlwaysFuture,
    AlwaysPast,
    Sometime,
    Always,
}

impl TOp {
    pub fn symbol(self) -> &'static str {
        match self {
            TOp::Next => "X+",
            TOp::Prev => "X-",
            TOp::Future => "F",
            TOp::Past => "P",
            TOp::AlwaysFuture => "G",
            TOp::AlwaysPast => "H",
            TOp::Sometime => "F*",
            TOp::Always => "G*",
        }
    }
}

/// A DLR_US concept, relation or attribute expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Top(Sort),
    Bottom(Sort),
    /// All domain values.
    TopD,
    /// The values of one basic domain.
    Domain(String),
    /// A class, relationship, attribute or defined transition set.
    Name(String),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    /// `exists>=k[U]R` / `exists<=k[U]R`; `index` is the role position.
    RelCount {
        cmp: Cmp,
        k: u32,
        role: String,
        index: usize,
        rel: Box<Expr>,
    },
    /// `exists>=k[F]A` / `exists<=k[F]A`.
    AttrCount {
        cmp: Cmp,
        k: u32,
        dir: Dir,
        attr: Box<Expr>,
    },
    /// Relation selection `[U/n]C`.
    Select {
        role: String,
        index: usize,
        arity: usize,
        concept: Box<Expr>,
    },
    /// Attribute selection `F:C`.
    AttrSelect {
        dir: Dir,
        concept: Box<Expr>,
    },
    Temporal(TOp, Box<Expr>),
    Until(Box<Expr>, Box<Expr>),
    Since(Box<Expr>, Box<Expr>),
}

pub fn name(n: impl Into<String>) -> Expr {
    Expr::Name(n.into())
}

impl Expr {
    pub fn not(self) -> Expr {
        Expr::Not(Box::new(self))
    }

    pub fn and(items: Vec<Expr>) -> Expr {
        if items.len() == 1 {
            items.into_iter().next().unwrap()
        } else {
            Expr::And(items)
        }
    }

    pub fn or(items: Vec<Expr>) -> Expr {
        if items.len() == 1 {
            items.into_iter().next().unwrap()
        } else {
            Expr::Or(items)
        }
    }

    pub fn t(self, op: TOp) -> Expr {
        Expr::Temporal(op, Box::new(self))
    }

    /// `n` nested applications of `op`.
    pub fn repeat(self, op: TOp, n: u32) -> Expr {
        (0..n).fold(self, |e, _| e.t(op))
    }

    pub fn until(self, other: Expr) -> Expr {
        Expr::Until(Box::new(self), Box::new(other))
    }

    pub fn since(self, other: Expr) -> Expr {
        Expr::Since(Box::new(self), Box::new(other))
    }

    /// `exists[F]A`, at least one pair.
    pub fn exists_attr(dir: Dir, attr: Expr) -> Expr {
        Expr::AttrCount { cmp: Cmp::AtLeast, k: 1, dir, attr: Box::new(attr) }
    }

    /// `forall[From](A -> To:D)` as `!exists[From](A & !To:D)`.
    pub fn forall_attr(attr: Expr, target: Expr) -> Expr {
        Expr::exists_attr(
            Dir::From,
            Expr::And(vec![attr, Expr::AttrSelect { dir: Dir::To, concept: Box::new(target) }.not()]),
        )
        .not()
    }

    fn is_compound(&self) -> bool {
        matches!(self, Expr::And(v) | Expr::Or(v) if v.len() > 1)
            || matches!(self, Expr::Until(..) | Expr::Since(..))
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_compound() {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Top(Sort::Concept) => f.write_str("Top"),
            Expr::Top(Sort::Relation(n)) => write!(f, "Top{n}"),
            Expr::Top(Sort::Attribute) => f.write_str("TopA"),
            Expr::Bottom(_) => f.write_str("Bot"),
            Expr::TopD => f.write_str("TopD"),
            Expr::Domain(d) | Expr::Name(d) => f.write_str(d),
            Expr::Not(e) => {
                f.write_str("!")?;
                e.fmt_operand(f)
            }
            Expr::And(items) | Expr::Or(items) => {
                if items.is_empty() {
                    return f.write_str(if matches!(self, Expr::And(_)) { "Top" } else { "Bot" });
                }
                let sep = if matches!(self, Expr::And(_)) { " & " } else { " | " };
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    e.fmt_operand(f)?;
                }
                Ok(())
            }
            Expr::RelCount { cmp, k, role, rel, .. } => {
                let c = if *cmp == Cmp::AtLeast { ">=" } else { "<=" };
                write!(f, "exists{c}{k}[{role}]")?;
                rel.fmt_operand(f)
            }
            Expr::AttrCount { cmp, k, dir, attr } => {
                if *cmp == Cmp::AtLeast && *k == 1 {
                    write!(f, "exists[{dir}]")?;
                } else {
                    let c = if *cmp == Cmp::AtLeast { ">=" } else { "<=" };
                    write!(f, "exists{c}{k}[{dir}]")?;
                }
                attr.fmt_operand(f)
            }
            Expr::Select { role, arity, concept, .. } => {
                write!(f, "[{role}/{arity}]")?;
                concept.fmt_operand(f)
            }
            Expr::AttrSelect { dir, concept } => {
                write!(f, "{dir}:")?;
                concept.fmt_operand(f)
            }
            Expr::Temporal(op, e) => {
                write!(f, "{} ", op.symbol())?;
                e.fmt_operand(f)
            }
            Expr::Until(a, b) | Expr::Since(a, b) => {
                a.fmt_operand(f)?;
                f.write_str(if matches!(self, Expr::Until(..)) { " U " } else { " S " })?;
                b.fmt_operand(f)
            }
        }
    }
}
