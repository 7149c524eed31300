use nalgebra::{DMatrix, DVector};

use super::SimError;
use crate::passivity::StaticNonlinearity;
use crate::poly::RationalTransfer;

/// `ẋ = Ax + Bu`, `y = Cx`, with no direct term.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearBlockSS {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
}

impl LinearBlockSS {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>) -> Result<Self, SimError> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n || b.len() != n || c.len() != n {
            return Err(SimError::InvalidRealization(format!(
                "A is {}x{}, B has {} rows, C has {} columns",
                a.nrows(),
                a.ncols(),
                b.len(),
                c.len()
            )));
        }
        if a.iter().chain(b.iter()).chain(c.iter()).any(|x| !x.is_finite()) {
            return Err(SimError::InvalidRealization("non-finite entry".into()));
        }
        Ok(LinearBlockSS { a, b, c })
    }

    pub fn from_rows(a: &[&[f64]], b: &[f64], c: &[f64]) -> Result<Self, SimError> {
        let n = a.len();
        if a.iter().any(|r| r.len() != n) {
            return Err(SimError::InvalidRealization("A is not square".into()));
        }
        Self::new(
            DMatrix::from_fn(n, n, |i, j| a[i][j]),
            DVector::from_column_slice(b),
            DVector::from_column_slice(c),
        )
    }

    /// Controllable canonical realization of a strictly proper transfer function.
    pub fn from_transfer(g: &RationalTransfer) -> Self {
        let q = g.den().coeffs();
        let n = q.len() - 1;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i + 1)] = 1.0;
        }
        for j in 0..n {
            a[(n - 1, j)] = -q[j];
        }
        let mut b = DVector::zeros(n);
        b[n - 1] = 1.0;
        let c = DVector::from_fn(n, |j, _| g.num().coeff(j));
        LinearBlockSS { a, b, c }
    }

    /// `β/(s+α)` as `ẋ = -αx + u`, `y = βx`.
    pub fn first_order(alpha: f64, beta: f64) -> Result<Self, SimError> {
        Self::from_rows(&[&[-alpha]], &[1.0], &[beta])
    }

    pub fn order(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn output(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    fn derivative(&self, x: &[f64], u: f64, dx: &mut [f64]) {
        for (i, d) in dx.iter_mut().enumerate() {
            *d = self.b[i] * u + x.iter().enumerate().map(|(j, xj)| self.a[(i, j)] * xj).sum::<f64>();
        }
    }

    /// `ẋ = Ax + Bu` evaluated into a fresh vector.
    pub fn rhs(&self, x: &[f64], u: f64) -> Vec<f64> {
        let mut dx = vec![0.0; x.len()];
        self.derivative(x, u, &mut dx);
        dx
    }

    /// All eigenvalues of `A` in the open left half plane.
    pub fn is_hurwitz(&self) -> bool {
        self.a.complex_eigenvalues().iter().all(|l| l.re < 0.0)
    }

    /// Static gain `-C A⁻¹ B`, or `None` for singular `A`.
    pub fn dc_gain(&self) -> Option<f64> {
        let x = self.a.clone().lu().solve(&self.b)?;
        Some(-self.c.dot(&x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockKind {
    Linear(LinearBlockSS),
    /// `ẏ = -αy + βu`
    FirstOrder {
        alpha: f64,
        beta: f64,
    },
    Static(StaticNonlinearity),
    /// Linear dynamics read out through `h(x) = -M/(K + Cx)`.
    InhibitoryOutput {
        ss: LinearBlockSS,
        m: f64,
        k: f64,
    },
}

/// A block together with its current state.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockInstance {
    kind: BlockKind,
    state: Vec<f64>,
}

impl BlockInstance {
    pub fn new(kind: BlockKind) -> Self {
        let n = match &kind {
            BlockKind::Linear(ss) | BlockKind::InhibitoryOutput { ss, .. } => ss.order(),
            BlockKind::FirstOrder { .. } => 1,
            BlockKind::Static(_) => 0,
        };
        BlockInstance {
            kind,
            state: vec![0.0; n],
        }
    }

    pub fn with_state(kind: BlockKind, state: Vec<f64>) -> Result<Self, SimError> {
        let mut b = Self::new(kind);
        if state.len() != b.state.len() {
            return Err(SimError::StateDimension {
                expected: b.state.len(),
                got: state.len(),
            });
        }
        if state.iter().any(|x| !x.is_finite()) {
            return Err(SimError::InvalidRealization("non-finite initial state".into()));
        }
        b.state = state;
        Ok(b)
    }

    pub fn linear(ss: LinearBlockSS) -> Self {
        Self::new(BlockKind::Linear(ss))
    }

    pub fn transfer(g: &RationalTransfer) -> Self {
        Self::linear(LinearBlockSS::from_transfer(g))
    }

    pub fn first_order(alpha: f64, beta: f64) -> Self {
        Self::new(BlockKind::FirstOrder { alpha, beta })
    }

    pub fn static_map(nl: StaticNonlinearity) -> Self {
        Self::new(BlockKind::Static(nl))
    }

    pub fn kind(&self) -> &BlockKind {
        &self.kind
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn order(&self) -> usize {
        self.state.len()
    }

    pub fn is_dynamic(&self) -> bool {
        !matches!(self.kind, BlockKind::Static(_))
    }

    pub fn zeroed(&self) -> Self {
        Self::new(self.kind.clone())
    }

    /// Output of a dynamic block from its state.
    fn dyn_output(&self, x: &[f64]) -> Result<f64, SimError> {
        match &self.kind {
            BlockKind::Linear(ss) => Ok(ss.output(x)),
            BlockKind::FirstOrder { beta, .. } => Ok(beta * x[0]),
            BlockKind::InhibitoryOutput { ss, m, k } => {
                let d = k + ss.output(x);
                if d <= 0.0 {
                    return Err(SimError::Domain { value: ss.output(x) });
                }
                Ok(-m / d)
            }
            BlockKind::Static(_) => unreachable!("static blocks have no state"),
        }
    }

    fn dyn_derivative(&self, x: &[f64], u: f64, dx: &mut [f64]) {
        match &self.kind {
            BlockKind::Linear(ss) | BlockKind::InhibitoryOutput { ss, .. } => ss.derivative(x, u, dx),
            BlockKind::FirstOrder { alpha, .. } => dx[0] = -alpha * x[0] + u,
            BlockKind::Static(_) => {}
        }
    }

    fn static_output(nl: &StaticNonlinearity, r: f64) -> Result<f64, SimError> {
        if let StaticNonlinearity::MichaelisMenten { k, a, .. } = nl {
            if k + a + r <= 0.0 {
                return Err(SimError::Domain { value: r });
            }
        }
        Ok(nl.eval(r))
    }
}

/// Blocks flattened into one ODE, optionally closed by unity negative feedback.
pub(crate) struct Network<'a> {
    blocks: &'a [BlockInstance],
    offsets: Vec<usize>,
    closed: bool,
    last_dynamic: Option<usize>,
}

impl<'a> Network<'a> {
    pub(crate) fn new(blocks: &'a [BlockInstance], closed: bool) -> Result<Self, SimError> {
        if blocks.is_empty() {
            return Err(SimError::NoBlocks);
        }
        let last_dynamic = blocks.iter().rposition(BlockInstance::is_dynamic);
        if closed && last_dynamic.is_none() {
            return Err(SimError::AlgebraicLoop);
        }
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut o = 0;
        for b in blocks {
            offsets.push(o);
            o += b.order();
        }
        offsets.push(o);
        Ok(Network {
            blocks,
            offsets,
            closed,
            last_dynamic,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.blocks.len()
    }

    pub(crate) fn dim(&self) -> usize {
        self.offsets[self.blocks.len()]
    }

    pub(crate) fn initial_state(&self, zero: bool) -> Vec<f64> {
        if zero {
            vec![0.0; self.dim()]
        } else {
            self.blocks.iter().flat_map(|b| b.state.iter().copied()).collect()
        }
    }

    fn slice<'x>(&self, x: &'x [f64], i: usize) -> &'x [f64] {
        &x[self.offsets[i]..self.offsets[i + 1]]
    }

    fn output(&self, i: usize, x: &[f64], input: f64) -> Result<f64, SimError> {
        let b = &self.blocks[i];
        match &b.kind {
            BlockKind::Static(nl) => BlockInstance::static_output(nl, input),
            _ => b.dyn_output(self.slice(x, i)),
        }
    }

    /// Fills `outs` with every block output and `dx` with the state derivative.
    pub(crate) fn eval(&self, x: &[f64], u: f64, dx: &mut [f64], outs: &mut [f64]) -> Result<(), SimError> {
        let n = self.blocks.len();
        let e = if self.closed {
            let j = self.last_dynamic.expect("checked at construction");
            let mut y = self.output(j, x, 0.0)?;
            for i in j + 1..n {
                y = self.output(i, x, y)?;
            }
            u - y
        } else {
            u
        };
        for i in 0..n {
            let input = if i == 0 { e } else { outs[i - 1] };
            outs[i] = self.output(i, x, input)?;
            let (lo, hi) = (self.offsets[i], self.offsets[i + 1]);
            if hi > lo {
                self.blocks[i].dyn_derivative(&x[lo..hi], input, &mut dx[lo..hi]);
            }
        }
        Ok(())
    }
}
