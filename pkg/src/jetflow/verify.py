"""Deterministic structure and consistency checks behind `jetflow verify`.

Each check compares an implemented object against an independent route
to the same quantity (closed form vs tensor contraction, analytic
pushforward vs finite differences of the product, margins vs matrix
contraction, full energy vs reduced energy) and reports its maximum
residual.  All randomness comes from one fixed seed, so the report is
byte-identical across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import carnot, hamiltonian, reduction

# Central-difference step for the differentiation oracles.  The frame
# and product are polynomial of degree <= 2 in the differentiated
# variables, so central differences are exact up to roundoff; 1e-4
# balances that roundoff well below the 1e-10 thresholds.
_FD_STEP = 1e-4


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    threshold: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name:<26s} max residual {self.residual:.3e}"
                f"  (threshold {self.threshold:.1e})")


def _expected_bracket_table():
    c = np.zeros((carnot.DIM, carnot.DIM, carnot.DIM))
    for i, j, k in carnot._BRACKET_TABLE:
        c[i, j, k] = 1.0
        c[j, i, k] = -1.0
    return c


def check_bracket_table(structure):
    """Closed-form bracket, tensor route, and the published table agree."""
    expected = _expected_bracket_table()
    resid = 0.0
    for i in range(carnot.DIM):
        for j in range(carnot.DIM):
            closed = carnot.bracket(carnot.basis_vector(i),
                                    carnot.basis_vector(j))
            resid = max(resid,
                        float(np.max(np.abs(closed - expected[i, j]))),
                        float(np.max(np.abs(structure.entry(i, j)
                                            - expected[i, j]))))
    return CheckResult("bracket-table", resid == 0.0, resid, 0.0)


def check_bracket_bilinearity(structure, rng, n):
    resid = 0.0
    for _ in range(n):
        a, b, c = rng.uniform(-1, 1, (3, carnot.DIM))
        al, be = rng.uniform(-2, 2, 2)
        lin = carnot.bracket(al * a + be * b, c) \
            - al * carnot.bracket(a, c) - be * carnot.bracket(b, c)
        anti = carnot.bracket(a, b) + carnot.bracket(b, a)
        routes = carnot.bracket(a, b) - structure.bracket(a, b)
        resid = max(resid, float(np.max(np.abs(lin))),
                    float(np.max(np.abs(anti))),
                    float(np.max(np.abs(routes))))
    return CheckResult("bracket-bilinearity", resid < 1e-12, resid, 1e-12)


def _jacobi_residual(structure, a, b, c):
    br = structure.bracket
    return br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))


def check_jacobi_basis(structure):
    resid = 0.0
    for i in range(carnot.DIM):
        for j in range(carnot.DIM):
            for k in range(carnot.DIM):
                r = _jacobi_residual(structure, carnot.basis_vector(i),
                                     carnot.basis_vector(j),
                                     carnot.basis_vector(k))
                resid = max(resid, float(np.max(np.abs(r))))
    return CheckResult("jacobi-basis", resid == 0.0, resid, 0.0)


def check_jacobi_random(structure, rng, n):
    resid = 0.0
    for _ in range(n):
        a, b, c = rng.uniform(-1, 1, (3, carnot.DIM))
        r = _jacobi_residual(structure, a, b, c)
        resid = max(resid, float(np.max(np.abs(r))))
    return CheckResult("jacobi-random", resid < 1e-10, resid, 1e-10)


def check_layer_grading(structure):
    """Bracket support lands exactly one layer up (empty past layer 3)."""
    resid = 0.0
    for i in range(carnot.DIM):
        for j in range(carnot.DIM):
            target = carnot.LAYERS[i] + carnot.LAYERS[j]
            entry = structure.entry(i, j)
            for k in range(carnot.DIM):
                if carnot.LAYERS[k] != target:
                    resid = max(resid, abs(float(entry[k])))
    return CheckResult("layer-grading", resid == 0.0, resid, 0.0)


def check_frame_duality(rng, n):
    """First five coordinate pairings of the frame form the identity block."""
    resid = 0.0
    for _ in range(n):
        x, y = rng.uniform(-2, 2, 2)
        f = carnot.frame_at(x, y)
        resid = max(resid, float(np.max(np.abs(f[:, :5] - np.eye(5)))))
    return CheckResult("frame-duality-block", resid == 0.0, resid, 0.0)


def check_frame_commutators(structure, rng, n):
    """FD commutators of the frame fields reproduce the bracket table.

    [V, W]^k = V^m d_m W^k - W^m d_m V^k with the coordinate derivatives
    taken by central differences in (x, y) (the only variables the
    components depend on), compared against the structure-tensor
    combination of the frame fields themselves.
    """
    resid = 0.0
    d = _FD_STEP
    for _ in range(n):
        x, y = rng.uniform(-1.5, 1.5, 2)
        frame = carnot.extended_frame_at(x, y)
        dx = (carnot.extended_frame_at(x + d, y)
              - carnot.extended_frame_at(x - d, y)) / (2 * d)
        dy = (carnot.extended_frame_at(x, y + d)
              - carnot.extended_frame_at(x, y - d)) / (2 * d)
        for i in range(carnot.DIM):
            vi = frame[i]
            for j in range(carnot.DIM):
                vj = frame[j]
                comm = (vi[0] * dx[j] + vi[1] * dy[j]
                        - vj[0] * dx[i] - vj[1] * dy[i])
                expected = structure.entry(i, j) @ frame
                resid = max(resid, float(np.max(np.abs(comm - expected))))
    return CheckResult("frame-commutators", resid < 1e-10, resid, 1e-10)


def check_frame_theta_independence(rng, n):
    """Left translation moves the frame identically for any vertical part."""
    resid = 0.0
    for _ in range(n):
        x, y = rng.uniform(-2, 2, 2)
        th1, th2 = rng.uniform(-2, 2, (2, 6))
        j1 = carnot.dleft_jacobian(carnot.group_point(x, y, th1))
        j2 = carnot.dleft_jacobian(carnot.group_point(x, y, th2))
        resid = max(resid, float(np.max(np.abs(j1 - j2))))
    return CheckResult("frame-theta-independence", resid == 0.0, resid, 0.0)


def check_left_invariance(rng, n):
    """Pushforward of the frame along g-translation lands on the frame.

    The differential of h -> g*h is taken by central differences of the
    implemented (BCH) product along each frame direction and compared
    with the frame at g*h.
    """
    resid = 0.0
    d = _FD_STEP
    for _ in range(n):
        g = rng.uniform(-1, 1, carnot.DIM)
        h = rng.uniform(-1, 1, carnot.DIM)
        gh = carnot.group_multiply(g, h)
        frame_h = carnot.extended_frame_at(h[0], h[1])
        frame_gh = carnot.extended_frame_at(gh[0], gh[1])
        for r in range(5):
            w = frame_h[r]
            push = (carnot.group_multiply(g, h + d * w)
                    - carnot.group_multiply(g, h - d * w)) / (2 * d)
            resid = max(resid, float(np.max(np.abs(push - frame_gh[r]))))
    return CheckResult("left-invariance", resid < 1e-10, resid, 1e-10)


def check_alpha_consistency(rng, n):
    """Matrix alpha rows, the scalar contraction path, and the potential agree."""
    resid = 0.0
    for _ in range(n):
        x, y = rng.uniform(-2, 2, 2)
        c = rng.uniform(-1, 1, 6)
        mat = carnot.alpha_at(x, y) @ c
        scal = np.array(carnot.pair_alpha(c, x, y))
        resid = max(resid, float(np.max(np.abs(mat - scal))))
        pot = reduction.phi(c, x, y)
        resid = max(resid, abs(pot - float(mat @ mat)))
        s = np.concatenate([[x, y], rng.uniform(-1, 1, 6),
                            rng.uniform(-1, 1, 2), c])
        five = hamiltonian.momentum_five(s)
        resid = max(resid, float(np.max(np.abs(five[2:] - mat))),
                    abs(five[0] - s[8]), abs(five[1] - s[9]))
    return CheckResult("alpha-consistency", resid < 1e-12, resid, 1e-12)


def check_reduction_identity(rng, n):
    """Full energy equals the reduced energy at the state's momentum level."""
    resid = 0.0
    for _ in range(n):
        s = rng.uniform(-1, 1, hamiltonian.STATE_DIM)
        e_full = hamiltonian.energy(s)
        e_red = reduction.h_mu(hamiltonian.momentum_map(s),
                               hamiltonian.reduced_block(s))
        resid = max(resid, abs(e_full - e_red))
    return CheckResult("reduction-identity", resid < 1e-14, resid, 1e-14)


def run_structure_suite(n_points=1000, seed=0, structure=None):
    """Run every check; returns the list of CheckResults.

    `structure` lets tests inject a tampered structure tensor; the
    default is the canonical one.
    """
    if structure is None:
        structure = carnot.StructureConstants.canonical()
    rng = np.random.default_rng(seed)
    return [
        check_bracket_table(structure),
        check_bracket_bilinearity(structure, rng, min(n_points, 200)),
        check_jacobi_basis(structure),
        check_jacobi_random(structure, rng, n_points),
        check_layer_grading(structure),
        check_frame_duality(rng, min(n_points, 200)),
        check_frame_commutators(structure, rng, min(n_points, 100)),
        check_frame_theta_independence(rng, min(n_points, 200)),
        check_left_invariance(rng, n_points),
        check_alpha_consistency(rng, min(n_points, 200)),
        check_reduction_identity(rng, max(n_points, 10000)),
    ]


def format_report(results):
    lines = [r.line() for r in results]
    n_fail = sum(1 for r in results if not r.passed)
    overall = "PASS" if n_fail == 0 else f"FAIL ({n_fail} failing)"
    lines.append(f"overall: {overall} [{len(results)} checks]")
    return "\n".join(lines) + "\n"
