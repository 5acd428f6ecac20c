#!/usr/bin/env python3
# Copyright 2026 The nisq-omp2 Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerate the integral fixtures and reference energies under fixtures/.

Requires PySCF. The C++ build never runs this script; its output is committed.

For every (molecule, bond distance) it writes an FCIDUMP of the canonical RHF
molecular-orbital integrals (full orbital space) and appends one record to the
molecule's reference.json holding HF, MP2, OMP2 and FCI total energies, the
canonical orbital energies of the active orbitals and the active-space choice.

The OMP2 value is the minimum over occupied-virtual orbital rotations of
  E(k) = <Phi(k)|H|Phi(k)> + sum_{i<j,a<b} |<ij||ab>_k|^2 / (e_i + e_j - e_a - e_b)
with the canonical orbital energies e held fixed, evaluated by rotating the
integrals directly (no circuits, no Fock rebuild).
"""
import json
import os
import sys

import numpy as np
import pyscf
from pyscf import ao2mo, fci, gto, mcscf, mp, scf, symm
from pyscf.tools import fcidump
from scipy.linalg import expm
from scipy.optimize import minimize

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def grid(lo, hi, step=0.2):
    n = int(round((hi - lo) / step)) + 1
    return [round(lo + k * step, 10) for k in range(n)]


MOLECULES = {
    "h2": dict(charge=0, grid=grid(0.8, 4.0),
               atoms=lambda r: [("H", (0, 0, 0)), ("H", (0, 0, r))]),
    "h3p": dict(charge=1, grid=grid(1.0, 4.8),
                atoms=lambda r: [("H", (0, 0, k * r)) for k in range(3)]),
    "lih": dict(charge=0, grid=grid(1.9, 5.7),
                atoms=lambda r: [("Li", (0, 0, 0)), ("H", (0, 0, r))]),
    "h4": dict(charge=0, grid=grid(1.0, 4.6),
               atoms=lambda r: [("H", (0, 0, k * r)) for k in range(4)]),
}


def active_space(name, mol, mf):
    """(frozen_occupied, deleted_virtual) as 0-based spatial MO indices."""
    if name != "lih":
        return [], []
    labels = symm.label_orb_symm(mol, mol.irrep_name, mol.symm_orb, mf.mo_coeff)
    # Core 1s is frozen; virtuals not sharing the sigma symmetry of the
    # occupied valence orbital are deleted.
    sigma = labels[1]
    deleted = [p for p in range(2, len(labels)) if labels[p] != sigma]
    return [0], deleted


def reduce_integrals(h1, eri, ecore, frozen, deleted):
    m = h1.shape[0]
    active = [p for p in range(m) if p not in frozen and p not in deleted]
    h = h1.copy()
    e = ecore
    for i in frozen:
        e += 2.0 * h1[i, i]
        h += 2.0 * eri[:, :, i, i] - eri[:, i, i, :]
    for i in frozen:
        for j in frozen:
            e += 2.0 * eri[i, i, j, j] - eri[i, j, j, i]
    a = np.ix_(active, active)
    return h[a], eri[np.ix_(active, active, active, active)], e, active


def omp2_functional(kappa_vec, pairs, h, g, eps, nocc):
    m = h.shape[0]
    k = np.zeros((m, m))
    for v, (i, a) in zip(kappa_vec, pairs):
        k[i, a] = v
        k[a, i] = -v
    c = expm(k)
    hr = c.T @ h @ c
    gr = np.einsum("pqrs,pi,qj,rk,sl->ijkl", g, c, c, c, c, optimize=True)
    o = slice(0, nocc)
    e_det = 2.0 * np.trace(hr[o, o]) + 2.0 * np.einsum("iijj->", gr[o, o, o, o]) \
        - np.einsum("ijji->", gr[o, o, o, o])
    v = slice(nocc, m)
    ovov = gr[o, v, o, v]  # (ia|jb)
    e_o, e_v = eps[:nocc], eps[nocc:]
    denom = e_o[:, None, None, None] - e_v[None, :, None, None] \
        + e_o[None, None, :, None] - e_v[None, None, None, :]
    e2 = np.sum(ovov * (2.0 * ovov - ovov.transpose(0, 3, 2, 1)) / denom)
    return e_det + e2


def minimize_omp2(h, g, eps, nocc):
    m = h.shape[0]
    pairs = [(i, a) for i in range(nocc) for a in range(nocc, m)]
    x0 = np.zeros(len(pairs))
    res = minimize(omp2_functional, x0, args=(pairs, h, g, eps, nocc),
                   method="L-BFGS-B", options=dict(ftol=1e-15, gtol=1e-10, maxiter=1000))
    return res.fun, res.x, pairs


def run(name, spec):
    outdir = os.path.join(ROOT, name)
    os.makedirs(outdir, exist_ok=True)
    records = []
    for r in spec["grid"]:
        mol = gto.M(atom=spec["atoms"](r), basis="sto-3g", unit="Bohr",
                    charge=spec["charge"], spin=0, symmetry=True, verbose=0)
        mf = scf.RHF(mol)
        mf.conv_tol = 1e-13
        mf.conv_tol_grad = 1e-10
        mf.kernel()
        assert mf.converged, (name, r)
        nocc = mol.nelectron // 2
        if mf.mo_energy[nocc - 1] > mf.mo_energy[nocc]:
            print(f"warning: non-aufbau {name} {r}", file=sys.stderr)
        fname = f"{name}_{r:.2f}.fcidump"
        fcidump.from_scf(mf, os.path.join(outdir, fname), tol=1e-15)

        frozen, deleted = active_space(name, mol, mf)
        c = mf.mo_coeff
        m = c.shape[1]
        h1 = c.T @ mf.get_hcore() @ c
        eri = ao2mo.restore(1, ao2mo.kernel(mol, c), m)
        h_act, g_act, ecore, active = reduce_integrals(h1, eri, mol.energy_nuc(), frozen, deleted)
        nocc_act = nocc - len(frozen)
        eps = mf.mo_energy[active]

        e_hf = mf.e_tot
        frozen_mp2 = sorted(frozen + deleted)
        e_mp2 = e_hf + mp.MP2(mf, frozen=frozen_mp2 or None).kernel()[0]
        if frozen or deleted:
            cas = mcscf.CASCI(mf, len(active), 2 * nocc_act)
            cas.ncore = len(frozen)
            mo = cas.sort_mo([p + 1 for p in active])
            e_fci = cas.kernel(mo)[0]
        else:
            e_fci = fci.FCI(mf).kernel()[0]
        e_omp2_el, kappa, pairs = minimize_omp2(h_act, g_act, eps, nocc_act)
        e_omp2 = e_omp2_el + ecore

        rec = dict(molecule=name, distance_bohr=r, fcidump=fname,
                   n_electrons=mol.nelectron, n_spatial=m,
                   frozen_occupied=frozen, deleted_virtual=deleted,
                   e_hf=e_hf, e_mp2=e_mp2, e_omp2=e_omp2, e_fci=e_fci,
                   orbital_energies=[float(x) for x in eps],
                   omp2_rotation=[dict(occupied=int(i), virtual=int(a), angle=float(v))
                                  for (i, a), v in zip(pairs, kappa)],
                   source=f"PySCF {pyscf.__version__}")
        records.append(rec)
        print(f"{name} {r:.2f} hf={e_hf:.10f} mp2={e_mp2:.10f} omp2={e_omp2:.10f} fci={e_fci:.10f}")
    with open(os.path.join(outdir, "reference.json"), "w") as f:
        json.dump(dict(format="nisq-omp2-reference/1", records=records), f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    names = sys.argv[1:] or list(MOLECULES)
    for n in names:
        run(n, MOLECULES[n])
