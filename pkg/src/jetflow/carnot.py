"""Lie-theoretic core of the step-3 jet-space Carnot group.

The group is the space of second-order jets of real functions on the
plane, a Carnot group of topological dimension 8 with growth vector
(5, 7, 8).  Its algebra carries the ordered graded basis

    index   0    1    2     3     4     5     6     7
    name    X1   X2   Y20   Y11   Y02   Y10   Y01   Y
    layer   1    1    1     1     1     2     2     3

with the only nonzero brackets (and their antisymmetric partners)

    [X1, Y20] = [X2, Y11] = Y10
    [X1, Y11] = [X2, Y02] = Y01
    [X1, Y10] = [X2, Y01] = Y

Algebra vectors are length-8 float arrays of coefficients over this
basis.  Group elements live in exponential coordinates of the second
kind, stored as length-8 arrays (x, y, theta_1..theta_6): the point with
coordinates (x, y, theta) is

    g = exp(sum_i theta_i A_i) * exp(y X2) * exp(x X1)

where (A_1..A_6) = (Y20, Y11, Y02, Y10, Y01, Y) spans the abelian ideal
generated by the vertical directions.  The group product is evaluated
through the Baker-Campbell-Hausdorff series, which terminates exactly at
triple brackets because the algebra is nilpotent of step 3.

The dual basis of the ideal is written (e1..e6); covectors over it are
length-6 arrays.  `alpha_at` evaluates the ideal-valued one-form whose
rows express the three second-layer-generating frame momenta as affine
polynomials in (x, y).
"""

from __future__ import annotations

import numpy as np

DIM = 8
IDEAL_DIM = 6

BASIS_NAMES = ("X1", "X2", "Y20", "Y11", "Y02", "Y10", "Y01", "Y")
LAYERS = (1, 1, 1, 1, 1, 2, 2, 3)

IX1, IX2, IY20, IY11, IY02, IY10, IY01, IY = range(DIM)

# Bracket table as (i, j, k): [basis_i, basis_j] = basis_k, i < j.
_BRACKET_TABLE = (
    (IX1, IY20, IY10),
    (IX2, IY11, IY10),
    (IX1, IY11, IY01),
    (IX2, IY02, IY01),
    (IX1, IY10, IY),
    (IX2, IY01, IY),
)


def basis_vector(index):
    """Return the algebra basis vector with a 1 in the given slot."""
    v = np.zeros(DIM)
    v[index] = 1.0
    return v


def bracket(a, b):
    """Lie bracket of two algebra vectors.

    Bilinear extension of the six-entry bracket table.  Layer-2 output
    components are driven by (layer-1, layer-1) input pairs and the
    layer-3 component by (layer-1, layer-2) pairs; everything else
    vanishes.

    Parameters
    ----------
    a, b : array_like, shape (8,)
        Coefficients over the graded basis.

    Returns
    -------
    ndarray, shape (8,)
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros(DIM)
    out[IY10] = a[IX1] * b[IY20] - a[IY20] * b[IX1] + a[IX2] * b[IY11] - a[IY11] * b[IX2]
    out[IY01] = a[IX1] * b[IY11] - a[IY11] * b[IX1] + a[IX2] * b[IY02] - a[IY02] * b[IX2]
    out[IY] = a[IX1] * b[IY10] - a[IY10] * b[IX1] + a[IX2] * b[IY01] - a[IY01] * b[IX2]
    return out


class StructureConstants:
    """Dense structure tensor c[i, j, :] = [basis_i, basis_j].

    The canonical tensor reproduces the bracket table; `replace_entry`
    returns a deliberately tampered copy for fault-injection tests of
    the verification suite.
    """

    def __init__(self, tensor):
        tensor = np.asarray(tensor, dtype=float)
        if tensor.shape != (DIM, DIM, DIM):
            raise ValueError("structure tensor must have shape (8, 8, 8)")
        self.tensor = tensor

    @classmethod
    def canonical(cls):
        """The structure tensor of the jet-space algebra."""
        c = np.zeros((DIM, DIM, DIM))
        for i, j, k in _BRACKET_TABLE:
            c[i, j, k] = 1.0
            c[j, i, k] = -1.0
        return cls(c)

    def replace_entry(self, i, j, value):
        """Copy of the tensor with c[i,j] = value and c[j,i] = -value."""
        value = np.asarray(value, dtype=float)
        t = self.tensor.copy()
        t[i, j, :] = value
        t[j, i, :] = -value
        return StructureConstants(t)

    def bracket(self, a, b):
        """Bracket via tensor contraction (oracle for the closed form)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return np.einsum("i,j,ijk->k", a, b, self.tensor)

    def entry(self, i, j):
        """[basis_i, basis_j] as an algebra vector."""
        return self.tensor[i, j].copy()


def bch(a, b):
    """Baker-Campbell-Hausdorff product log(exp(a) exp(b)).

    Exact for this algebra: the series truncates after the two triple
    brackets because all quadruple brackets land beyond layer 3.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = bracket(a, b)
    return a + b + 0.5 * ab + (bracket(a, ab) + bracket(b, bracket(b, a))) / 12.0


# ---------------------------------------------------------------------------
# Group points in exponential coordinates of the second kind.
# Layout: g = (x, y, theta_1..theta_6), length 8.
# ---------------------------------------------------------------------------

def identity_point():
    """Identity element of the group."""
    return np.zeros(DIM)


def group_point(x, y, theta):
    """Assemble a group point from x, y and the six vertical coordinates."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (IDEAL_DIM,):
        raise ValueError("theta must have 6 components")
    g = np.empty(DIM)
    g[0] = x
    g[1] = y
    g[2:] = theta
    return g


def to_first_kind(g):
    """Algebra vector xi with exp(xi) = g (first-kind coordinates).

    Folds the second-kind factorization into a single exponential:
    xi = BCH(BCH(Theta, y X2), x X1) with Theta in the ideal.
    """
    g = np.asarray(g, dtype=float)
    theta_vec = np.zeros(DIM)
    theta_vec[2:] = g[2:]
    return bch(bch(theta_vec, g[1] * basis_vector(IX2)), g[0] * basis_vector(IX1))


def from_first_kind(xi):
    """Group point of exp(xi), inverting `to_first_kind`.

    The X1, X2 coefficients of xi are exactly (x, y) since brackets
    never produce first-layer components; the vertical part is peeled
    off by multiplying with exp(-x X1) exp(-y X2) on the right.
    """
    xi = np.asarray(xi, dtype=float)
    x = xi[0]
    y = xi[1]
    theta_vec = bch(bch(xi, -x * basis_vector(IX1)), -y * basis_vector(IX2))
    g = np.empty(DIM)
    g[0] = x
    g[1] = y
    g[2:] = theta_vec[2:]
    return g


def group_multiply(g, h):
    """Group product g * h in second-kind coordinates (BCH route)."""
    return from_first_kind(bch(to_first_kind(g), to_first_kind(h)))


def group_inverse(g):
    """Group inverse in second-kind coordinates."""
    return from_first_kind(-to_first_kind(g))


def ad_ideal_matrix(x, y):
    """Matrix of Ad_{exp(y X2) exp(x X1)} on the ideal, basis (A_1..A_6).

    Columns are the images of (Y20, Y11, Y02, Y10, Y01, Y); the map is
    unipotent and encodes how horizontal translation shears the
    vertical directions.
    """
    m = np.eye(IDEAL_DIM)
    # Y20 -> Y20 + x Y10 + (x^2/2) Y
    m[3, 0] = x
    m[5, 0] = 0.5 * x * x
    # Y11 -> Y11 + y Y10 + x Y01 + xy Y
    m[3, 1] = y
    m[4, 1] = x
    m[5, 1] = x * y
    # Y02 -> Y02 + y Y01 + (y^2/2) Y
    m[4, 2] = y
    m[5, 2] = 0.5 * y * y
    # Y10 -> Y10 + x Y ; Y01 -> Y01 + y Y
    m[5, 3] = x
    m[5, 4] = y
    return m


def group_multiply_affine(g, h):
    """Group product via the semidirect closed form (test oracle).

    Because X1 and X2 commute and the ideal is abelian, the product in
    second-kind coordinates is (x+x', y+y', theta + Ad_{h(x,y)} theta').
    Independent of the BCH route and used to cross-check it.
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    out = np.empty(DIM)
    out[0] = g[0] + h[0]
    out[1] = g[1] + h[1]
    out[2:] = g[2:] + ad_ideal_matrix(g[0], g[1]) @ h[2:]
    return out


def dleft_jacobian(g):
    """Jacobian of h -> g*h in second-kind coordinates.

    Left translation is affine-linear here, so the Jacobian is constant
    in h: identity on (x, y) and Ad_{h(x,y)} on the vertical block.
    """
    g = np.asarray(g, dtype=float)
    jac = np.zeros((DIM, DIM))
    jac[0, 0] = 1.0
    jac[1, 1] = 1.0
    jac[2:, 2:] = ad_ideal_matrix(g[0], g[1])
    return jac


# ---------------------------------------------------------------------------
# Left-invariant frame and the ideal-valued one-form alpha.
# ---------------------------------------------------------------------------

def frame_at(x, y):
    """Horizontal left-invariant frame at a point with coordinates (x, y).

    Rows are the coordinate components of (X1, X2, Y20, Y11, Y02) in the
    coordinate order (x, y, theta_1..theta_6):

        X1  = d/dx
        X2  = d/dy
        Y20 = d/dth1 + x d/dth4 + (x^2/2) d/dth6
        Y11 = d/dth2 + y d/dth4 + x d/dth5 + xy d/dth6
        Y02 = d/dth3 + y d/dth5 + (y^2/2) d/dth6

    Components depend on (x, y) only, never on the theta's.

    Returns
    -------
    ndarray, shape (5, 8)
    """
    f = np.zeros((5, DIM))
    f[0, 0] = 1.0
    f[1, 1] = 1.0
    f[2, 2] = 1.0
    f[2, 5] = x
    f[2, 7] = 0.5 * x * x
    f[3, 3] = 1.0
    f[3, 5] = y
    f[3, 6] = x
    f[3, 7] = x * y
    f[4, 4] = 1.0
    f[4, 6] = y
    f[4, 7] = 0.5 * y * y
    return f


def extended_frame_at(x, y):
    """All eight left-invariant basis fields at (x, y), rows in basis order.

    Extends `frame_at` with the higher-layer fields

        Y10 = d/dth4 + x d/dth6
        Y01 = d/dth5 + y d/dth6
        Y   = d/dth6

    Returns
    -------
    ndarray, shape (8, 8)
    """
    f = np.zeros((DIM, DIM))
    f[:5] = frame_at(x, y)
    f[5, 5] = 1.0
    f[5, 7] = x
    f[6, 6] = 1.0
    f[6, 7] = y
    f[7, 7] = 1.0
    return f


def alpha_at(x, y):
    """Ideal-valued one-form evaluated at (x, y), as a 3x6 matrix.

    Row r holds the e-basis coefficients of the dtheta_{r+1} component:

        row 1: e1 + x e4 + (x^2/2) e6
        row 2: e2 + y e4 + x e5 + xy e6
        row 3: e3 + y e5 + (y^2/2) e6

    Contracting the rows with a covector mu in the dual of the ideal
    yields the three affine margins whose squares build the reduced
    potential; contracting with vertical momenta yields the frame
    momentum functions.
    """
    a = np.zeros((3, IDEAL_DIM))
    a[0, 0] = 1.0
    a[0, 3] = x
    a[0, 5] = 0.5 * x * x
    a[1, 1] = 1.0
    a[1, 3] = y
    a[1, 4] = x
    a[1, 5] = x * y
    a[2, 2] = 1.0
    a[2, 4] = y
    a[2, 5] = 0.5 * y * y
    return a


def pair_alpha(c, x, y):
    """Contract a 6-covector with the alpha rows at (x, y), scalar path.

    Returns the tuple (c.row1, c.row2, c.row3) evaluated with a fixed
    operation order.  This single code path feeds the potential margins,
    the frame momentum functions, and the reconstruction integrands, so
    quantities that coincide algebraically coincide bit for bit.
    """
    c1, c2, c3, c4, c5, c6 = (float(c[0]), float(c[1]), float(c[2]),
                              float(c[3]), float(c[4]), float(c[5]))
    m1 = c1 + c4 * x + 0.5 * x * x * c6
    m2 = c2 + c5 * x + c4 * y + c6 * x * y
    m3 = c3 + c5 * y + 0.5 * y * y * c6
    return m1, m2, m3


# ---------------------------------------------------------------------------
# Optional conversion to jet coordinates (x, y, u20, u11, u02, u10, u01, u).
# ---------------------------------------------------------------------------

def to_jet(g):
    """Convert second-kind coordinates to jet coordinates.

    The jet chart labels a point by the second derivatives (u20, u11,
    u02), first derivatives (u10, u01) and value u of the underlying
    2-jet.  Derived by integrating the frame fields from the identity:

        u20 = th1, u11 = th2, u02 = th3,
        u10 = th1 x + th2 y - th4,
        u01 = th2 x + th3 y - th5,
        u   = th1 x^2/2 + th2 xy + th3 y^2/2 - th4 x - th5 y + th6.
    """
    g = np.asarray(g, dtype=float)
    x, y = g[0], g[1]
    t1, t2, t3, t4, t5, t6 = g[2:]
    return np.array([
        x, y, t1, t2, t3,
        t1 * x + t2 * y - t4,
        t2 * x + t3 * y - t5,
        0.5 * t1 * x * x + t2 * x * y + 0.5 * t3 * y * y - t4 * x - t5 * y + t6,
    ])


def from_jet(j):
    """Convert jet coordinates back to second-kind coordinates."""
    j = np.asarray(j, dtype=float)
    x, y, u20, u11, u02, u10, u01, u = j
    t1, t2, t3 = u20, u11, u02
    t4 = t1 * x + t2 * y - u10
    t5 = t2 * x + t3 * y - u01
    t6 = u - (0.5 * t1 * x * x + t2 * x * y + 0.5 * t3 * y * y - t4 * x - t5 * y)
    return np.array([x, y, t1, t2, t3, t4, t5, t6])
