"""Command-line harness: validation, level builds, checks, suites, reports.

Determinism contract: every randomized suite item draws from
``np.random.default_rng([seed, item_index])``, and aggregate reports are
ordered by item index, so output is byte-identical across reruns and
parallelism widths.  Exit codes: 0 = pass, 1 = check failed, 2 = usage,
parse, or schema error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io as rio
from .errors import RtpError, ValidationError
from .families import (block_irreps_with_vectors, random_corr_family,
                       random_module_family)
from .limits import (CorrFamily, ModuleFamily, coherence_check,
                     coherence_sufficient_check, compacts_iso_check,
                     connecting_map, factorize_irrep,
                     induction_commutes_check, left_action_square_defect,
                     level_algebra, level_module, validate_corr_family,
                     validate_module_family)
from .cstar import irreps_of, StarHom, make_algebra
from .report import SCHEMA, VerificationReport, _fmt

SUITES = ("isometry", "compacts", "coherence", "induction",
          "parabolic", "factorization")


def _rng(seed: int, idx: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFF, idx])


def _fixture_path(path: str) -> str:
    if os.path.exists(path):
        return path
    root = os.environ.get("RTP_FIXTURES") or \
        os.path.join(os.path.dirname(__file__), "fixtures")
    cand = os.path.join(root, path)
    if os.path.exists(cand):
        return cand
    raise ValidationError(f"no such file or fixture: {path}")


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_S(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t != "")
    except ValueError as e:
        raise ValidationError(f"bad level set {text!r}") from e


# --------------------------------------------------------------------------
# individual commands
# --------------------------------------------------------------------------

def cmd_family_validate(args) -> int:
    doc = rio.load(_fixture_path(args.file))
    fam = rio.family_from_json(doc)
    if isinstance(fam, CorrFamily):
        rep = validate_corr_family(fam, tol=args.tol)
    else:
        rep = validate_module_family(fam, tol=args.tol)
    _emit(rep.to_json(), args.out)
    return 0 if rep.passed else 1


def cmd_level_build(args) -> int:
    doc = rio.load(_fixture_path(args.file))
    fam = rio.family_from_json(doc)
    MF = fam.modules if isinstance(fam, CorrFamily) else fam
    S = _parse_S(args.S)
    La = level_algebra(MF.base, S)
    Lx = level_module(MF, S)
    out = {"schema": SCHEMA, "S": list(La.S),
           "algebra": rio.algebra_to_json(La.algebra),
           "module": rio.module_to_json(Lx.module),
           "distinguished": rio._carray(Lx.distinguished())}
    _emit(out, args.out)
    return 0


def _load_or_random(args):
    if args.family:
        fam = rio.family_from_json(rio.load(_fixture_path(args.family)))
    else:
        rng = _rng(args.seed, 0)
        fam = random_corr_family(rng, n_indices=max(3, len(_parse_S(args.Sprime or args.S))))
    return fam


def cmd_check(args) -> int:
    fam = _load_or_random(args)
    MF = fam.modules if isinstance(fam, CorrFamily) else fam
    S = _parse_S(args.S)
    Sp = _parse_S(args.Sprime) if args.Sprime else S
    if args.kind == "isometry":
        _, rep = connecting_map(MF, S, Sp, tol=args.tol, rng=_rng(args.seed, 1))
    elif args.kind == "compacts":
        rep = compacts_iso_check(MF, S, Sp, tol=args.tol, rng=_rng(args.seed, 1))
    elif args.kind == "coherence":
        if not isinstance(fam, CorrFamily):
            raise ValidationError("coherence check needs a correspondence family")
        rep = coherence_check(fam, tol=args.tol)
    elif args.kind == "induction":
        if not isinstance(fam, CorrFamily):
            raise ValidationError("induction check needs a correspondence family")
        reps, vecs = block_irreps_with_vectors(fam.modules.base)
        rep = induction_commutes_check(fam, reps, vecs, Sp, tol=args.tol)
    else:
        raise ValidationError(f"unknown check {args.kind!r}")
    _emit(rep.to_json(), args.out)
    return 0 if rep.passed else 1


def cmd_parabolic_demo(args) -> int:
    from .groups import trivial_rep
    from .parabolic import (adelic_family, asspar_check,
                            global_induction_check, local_induction_check)
    qs = [int(t) for t in args.q.split(",")]
    rho_names = (args.rho.split(",") if args.rho
                 else ["trivial"] * len(qs))
    if len(rho_names) != len(qs):
        raise ValidationError("--rho needs one entry per prime in --q")
    A = adelic_family(qs, seed=args.seed, tol=max(args.tol, 1e-8))
    rhos = []
    for v, name in enumerate(rho_names):
        Lg = A.locals[v].CL.group
        chars = [r for r in Lg.irreps(seed=args.seed) if r.dim == 1]
        if name == "trivial":
            rhos.append(trivial_rep(Lg))
        elif name.startswith("char"):
            k = int(name[4:])
            if k >= len(chars):
                raise ValidationError(f"L has only {len(chars)} characters")
            rhos.append(chars[k])
        else:
            raise ValidationError(f"unknown rho {name!r}")
    checks = []
    for v, q in enumerate(qs):
        rep = local_induction_check(A.data[v], rhos[v], seed=args.seed,
                                    tol=args.tol)
        rep.check = f"parabolic.local-induction.q={q}"
        checks.append(rep)
        x = A.vectors[v]
        asr = asspar_check(A.locals[v], x, tol=args.tol)
        asr.check = f"parabolic.asspar.q={q}"
        checks.append(asr)
    checks.append(coherence_check(A.family, tol=args.tol))
    if len(qs) > 1:
        checks.append(global_induction_check(A, rhos, tol=args.tol))
    doc = {"schema": SCHEMA, "check": "parabolic.demo",
           "pass": all(c.passed for c in checks),
           "q": qs, "rho": rho_names,
           "group_orders": [d.G.n for d in A.data],
           "normalization_constants": [_fmt(c) for c in A.constants],
           "reports": [c.to_json() for c in checks]}
    _emit(doc, args.report or args.out)
    return 0 if doc["pass"] else 1


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------

def _family_for_item(idx: int, seed: int) -> tuple[ModuleFamily, tuple, tuple]:
    """A random compatible family plus nested levels S ⊆ S' (⊆ S'')."""
    rng = _rng(seed, idx)
    n_idx = 2 + idx % 4                      # 2..5 indices
    exceptional = (0,) if idx % 3 == 0 else ()
    F = random_module_family(rng, n_indices=n_idx, exceptional=exceptional)
    base = sorted(set(exceptional) | {min(v for v in range(n_idx)
                                          if v not in exceptional)})
    rest = [v for v in range(n_idx) if v not in base]
    order = list(rng.permutation(rest))
    S = tuple(base)
    Sp = tuple(sorted(S + tuple(order[:1])))[:4]
    Spp = tuple(sorted(set(Sp) | set(order[1:2])))[:4]
    return F, S, (Sp if len(Sp) > len(S) else S), Spp


def _isometry_item(idx: int, seed: int, tol: float) -> dict:
    F, S, Sp, Spp = _family_for_item(idx, seed)
    rng = _rng(seed, idx + 1_000_003)
    _, rep = connecting_map(F, S, Sp, tol=tol, rng=rng)
    rep.check = f"isometry[{idx}]"
    i_ab, _ = connecting_map(F, S, Sp, tol=tol, rng=rng)
    i_bc, _ = connecting_map(F, Sp, Spp, tol=tol, rng=rng)
    i_ac, _ = connecting_map(F, S, Spp, tol=tol, rng=rng)
    rep.add("functoriality", float(np.abs(i_bc @ i_ab - i_ac).max()))
    return rep.settle().to_json()


def _compacts_item(idx: int, seed: int, tol: float) -> dict:
    F, S, Sp, _ = _family_for_item(idx, seed)
    rep = compacts_iso_check(F, S, Sp, tol=tol,
                             rng=_rng(seed, idx + 2_000_003), samples=3)
    rep.check = f"compacts[{idx}]"
    return rep.settle().to_json()


def _coherence_item(idx: int, seed: int, tol: float) -> dict:
    rng = _rng(seed, idx)
    F = random_corr_family(rng, n_indices=2 + idx % 3)
    rep = coherence_check(F, tol=tol)
    rep.check = f"coherence[{idx}]"
    suff = coherence_sufficient_check(F, tol=tol)
    rep.add("sufficient-conditions", suff.max_defect())
    n = F.size
    sq = left_action_square_defect(F, tuple(range(1)), tuple(range(n)), tol=tol)
    rep.add("connecting-square", sq.max_defect())
    return rep.settle().to_json()


def _induction_item(idx: int, seed: int, tol: float) -> dict:
    rng = _rng(seed, idx)
    F = random_corr_family(rng, n_indices=2 + idx % 2)
    reps, vecs = block_irreps_with_vectors(F.modules.base)
    rep = induction_commutes_check(F, reps, vecs, tuple(range(F.size)), tol=tol)
    rep.check = f"induction[{idx}]"
    return rep.settle().to_json()


def _factorization_item(idx: int, seed: int, tol: float) -> dict:
    rng = _rng(seed, idx)
    n_idx = 2 + idx % 3
    F = random_module_family(rng, n_indices=n_idx).base
    S = tuple(range(min(n_idx, 4)))
    La = level_algebra(F, S)
    rep = VerificationReport(f"factorization[{idx}]", True, tol=tol)
    for b, rho in enumerate(irreps_of(La.algebra)):
        d = rho.codomain.blocks[0]
        Q = np.linalg.qr(rng.standard_normal((d, d))
                         + 1j * rng.standard_normal((d, d)))[0]
        eye = np.eye(La.algebra.dim)
        cols = [(Q @ rho(La.algebra.from_flat(eye[i])).data[0]
                 @ Q.conj().T).reshape(-1) for i in range(La.algebra.dim)]
        twisted = StarHom(La.algebra, make_algebra([d]), np.stack(cols, axis=1))
        factors, frep = factorize_irrep(F, twisted, S, tol=tol)
        rep.add(f"block={b}", frep.max_defect())
        got = tuple(frep.extra["block_tuple"])
        rep.add(f"block={b}:tuple", 0.0 if got == La.block_tuples[b] else 1.0)
    return rep.settle().to_json()


def _parabolic_item(idx: int, seed: int, tol: float) -> dict:
    from .groups import trivial_rep
    from .parabolic import (adelic_family, asspar_check,
                            global_induction_check, local_induction_check)
    A = adelic_family([2, 3], seed=seed, tol=max(tol, 1e-8))
    rep = VerificationReport("parabolic[0]", True, tol=tol)
    for v, q in enumerate((2, 3)):
        Lg = A.locals[v].CL.group
        for k, ch in enumerate(r for r in Lg.irreps(seed=seed) if r.dim == 1):
            lrep = local_induction_check(A.data[v], ch, seed=seed, tol=tol)
            rep.add(f"local:q={q}:char={k}", lrep.max_defect())
        rep.add(f"asspar:q={q}",
                asspar_check(A.locals[v], A.vectors[v], tol=tol).max_defect())
    rep.add("coherence", coherence_check(A.family, tol=tol).max_defect())
    L2, L3 = (A.locals[v].CL.group for v in (0, 1))
    chars3 = [r for r in L3.irreps(seed=seed) if r.dim == 1]
    for j, rhos in enumerate(([trivial_rep(L2), trivial_rep(L3)],
                              [trivial_rep(L2), chars3[-1]])):
        g = global_induction_check(A, rhos, tol=tol)
        rep.add(f"global:{j}", g.max_defect())
    return rep.settle().to_json()


_SUITE_ITEMS = {
    "isometry": (_isometry_item, 100),
    "compacts": (_compacts_item, 100),
    "coherence": (_coherence_item, 24),
    "induction": (_induction_item, 12),
    "factorization": (_factorization_item, 16),
    "parabolic": (_parabolic_item, 1),
}


def run_suite(name: str, seed: int, tol: float, jobs: int = 1,
              n: int | None = None) -> dict:
    if name not in _SUITE_ITEMS:
        raise ValidationError(f"unknown suite {name!r}; choose from {SUITES}")
    fn, default_n = _SUITE_ITEMS[name]
    count = n or default_n
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(lambda i: fn(i, seed, tol), range(count)))
    else:
        results = [fn(i, seed, tol) for i in range(count)]
    max_defect = max((d["value"] for r in results for d in r["defects"]),
                     default=0.0)
    return {"schema": SCHEMA, "suite": name, "seed": seed, "tol": _fmt(tol),
            "items": count, "pass": all(r["pass"] for r in results),
            "max_defect": _fmt(max_defect), "reports": results}


def cmd_suite(args) -> int:
    doc = run_suite(args.name, args.seed, args.tol, jobs=args.jobs, n=args.n)
    _emit(doc, args.out)
    return 0 if doc["pass"] else 1


def cmd_report(args) -> int:
    rows = []
    for path in args.paths:
        doc = rio.load(_fixture_path(path))
        if doc.get("schema") != SCHEMA:
            raise ValidationError(f"{path}: schema mismatch")
        reports = doc.get("reports", [doc] if "check" in doc else [])
        for r in reports:
            md = max((d["value"] for d in r.get("defects", [])), default=0.0)
            rows.append({"check": r.get("check", doc.get("suite", "?")),
                         "pass": bool(r.get("pass")),
                         "max_defect": _fmt(md),
                         "ms": r.get("ms", 0.0)})
    rows.sort(key=lambda r: r["check"])
    _emit({"schema": SCHEMA, "summary": rows}, args.out)
    return 0


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rtp",
        description="verification engine for restricted tensor products "
                    "of C*-algebras, Hilbert modules, and correspondences")
    sub = ap.add_subparsers(dest="command", required=True)

    fam = sub.add_parser("family", help="family-level operations")
    fsub = fam.add_subparsers(dest="sub", required=True)
    fv = fsub.add_parser("validate", help="validate a family JSON document")
    fv.add_argument("file")
    _common(fv)
    fv.set_defaults(fn=cmd_family_validate)

    lvl = sub.add_parser("level", help="level-object construction")
    lsub = lvl.add_subparsers(dest="sub", required=True)
    lb = lsub.add_parser("build", help="build the level algebra and module")
    lb.add_argument("file")
    lb.add_argument("--S", required=True)
    _common(lb)
    lb.set_defaults(fn=cmd_level_build)

    chk = sub.add_parser("check", help="run a single structural check")
    chk.add_argument("kind", choices=["isometry", "compacts",
                                      "coherence", "induction"])
    chk.add_argument("--family", default=None,
                     help="family JSON (omit for a seeded random family)")
    chk.add_argument("--S", required=True)
    chk.add_argument("--Sprime", default=None)
    _common(chk)
    chk.set_defaults(fn=cmd_check)

    par = sub.add_parser("parabolic", help="parabolic-induction pipeline")
    psub = par.add_subparsers(dest="sub", required=True)
    pd = psub.add_parser("demo", help="run the full pipeline over given primes")
    pd.add_argument("--q", default="2,3")
    pd.add_argument("--rho", default=None,
                    help="comma list: trivial or charK, one per prime")
    pd.add_argument("--report", default=None)
    _common(pd)
    pd.set_defaults(fn=cmd_parabolic_demo)

    st = sub.add_parser("suite", help="run a named verification suite")
    st.add_argument("name", choices=list(SUITES))
    st.add_argument("--n", type=int, default=None,
                    help="override the number of suite items")
    _common(st)
    st.set_defaults(fn=cmd_suite)

    rp = sub.add_parser("report", help="merge report JSONs into a summary")
    rp.add_argument("paths", nargs="*")
    _common(rp)
    rp.set_defaults(fn=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    if args.tol <= 0:
        sys.stderr.write("error: --tol must be positive\n")
        return 2
    try:
        return args.fn(args)
    except ValidationError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except RtpError as e:
        sys.stderr.write(f"check error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
