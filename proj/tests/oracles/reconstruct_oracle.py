"""Minimax physical-state oracle for two-mode covariance matrices.

Bisection on the level t with an SDP feasibility check at each step:
does a symmetric V exist with |V - V'| <= t*sigma elementwise and
V + i*Omega >= 0 (written as the real embedding [[V, -Omega], [Omega, V]])?
Writes inputs and optimal levels to tests/data/reconstruct_oracle.json.
"""
import json
import pathlib

import cvxpy as cp
import numpy as np

N_CASES = 50
DIM = 4
OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def random_symplectic(rng):
    def local(r, a, b):
        rot = lambda t: np.array([[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]])
        return rot(a) @ np.diag([np.exp(r), np.exp(-r)]) @ rot(b)

    s1 = np.zeros((4, 4))
    s1[:2, :2] = local(rng.uniform(-0.6, 0.6), rng.uniform(0, np.pi), rng.uniform(0, np.pi))
    s1[2:, 2:] = local(rng.uniform(-0.6, 0.6), rng.uniform(0, np.pi), rng.uniform(0, np.pi))
    r = rng.uniform(0.0, 0.9)
    c, s = np.cosh(r), np.sinh(r)
    tms = np.array([[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]])
    return s1 @ tms


def feasible(vp, sig, t):
    # Largest margin lam with [[V, -Omega], [Omega, V]] >= lam*I inside the box;
    # the level t is feasible when lam >= 0.
    v = cp.Variable((DIM, DIM), symmetric=True)
    lam = cp.Variable()
    big = cp.bmat([[v, -OMEGA], [OMEGA, v]])
    cons = [big - lam * np.eye(2 * DIM) >> 0, cp.abs(v - vp) <= t * sig]
    prob = cp.Problem(cp.Maximize(lam), cons)
    try:
        prob.solve(solver=cp.CLARABEL, tol_feas=1e-10, tol_gap_abs=1e-10, tol_gap_rel=1e-10)
    except cp.error.SolverError:
        prob.solve(solver=cp.SCS, eps=1e-10, max_iters=200000)
    return lam.value >= 0.0


def min_phys_eig(v):
    return np.linalg.eigvalsh(v + 1j * OMEGA).min()


def solve(vp, sig):
    if min_phys_eig(vp) >= -1e-9:
        return 0.0
    lo, hi = 0.0, 1.0
    while not feasible(vp, sig, hi):
        lo, hi = hi, 2.0 * hi
    while hi - lo > 1e-8:
        mid = 0.5 * (lo + hi)
        if feasible(vp, sig, mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def main():
    rng = np.random.default_rng(20240611)
    cases = []
    while len(cases) < N_CASES:
        s = random_symplectic(rng)
        nbar = rng.uniform(0.0, 0.1)
        v = (2 * nbar + 1) * s @ s.T
        noise = rng.normal(scale=0.3, size=(DIM, DIM))
        vp = v + (noise + noise.T) / 2
        sig = rng.uniform(0.02, 0.2, size=(DIM, DIM))
        sig = (sig + sig.T) / 2
        if len(cases) % 10 == 9:
            vp = v  # keep a few physical inputs in the set
        cases.append({"v": vp.tolist(), "sigma": sig.tolist(), "objective": solve(vp, sig)})
        print(len(cases), cases[-1]["objective"])
    out = pathlib.Path(__file__).resolve().parents[1] / "data" / "reconstruct_oracle.json"
    out.write_text(json.dumps({"cases": cases}, indent=1))


if __name__ == "__main__":
    main()
