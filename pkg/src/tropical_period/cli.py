"""Command line front end: run the verification pipeline on an instance file."""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Any

import mpmath

from . import gamma as gm
from . import plh as ph
from . import radiance as rd
from . import sphere as sp
from .errors import InvalidInstance, TropicalPeriodError
from .instances import InstanceSpec, load_instance
from .lattice_core import convexity_report, det, identity, mat_mul, mat_sub, validate_input
from .toric_cohomology import ToricModel

STAGES = ("validate", "sphere", "cohomology", "radiance", "plh", "gamma")
REQUIRES = {
    "validate": (),
    "sphere": ("validate",),
    "cohomology": ("validate", "sphere"),
    "radiance": ("sphere", "cohomology"),
    "plh": ("radiance",),
    "gamma": ("plh",),
}
ALIASES = {"period": "plh", "validation": "validate", "intersection": "cohomology"}

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2


def resolve_stages(names) -> list[str]:
    """Requested stages plus their prerequisites, in pipeline order."""
    wanted = set()

    def add(s):
        s = ALIASES.get(s, s)
        if s not in REQUIRES:
            raise ValueError(f"unknown stage {s!r}; choose from {', '.join(STAGES)}")
        if s in wanted:
            return
        wanted.add(s)
        for dep in REQUIRES[s]:
            add(dep)

    for n in names:
        if n == "all":
            wanted.update(STAGES)
        else:
            add(n)
    return [s for s in STAGES if s in wanted]


def jsonable(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, ph.ScaledScalar):
        return str(x)
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(x, 15)
    return x


class InputInvalid(Exception):
    pass


class Pipeline:
    """Runs stages in order and records ``{name, status, value?}`` checks per section."""

    def __init__(self, spec: InstanceSpec, y_sweep=None, tolerance=None):
        self.spec = spec
        self.ys = list(y_sweep if y_sweep is not None else spec.options["y_sweep"])
        self.tol = float(tolerance if tolerance is not None else spec.options["tolerance"])
        self.report: dict[str, Any] = {"instance": spec.name}
        self.timings: dict[str, float] = {}

    def check(self, section: str, name: str, ok: bool, value=None):
        entry = {"name": name, "status": "pass" if ok else "fail"}
        if value is not None:
            entry["value"] = jsonable(value)
        self.report.setdefault(section, {}).setdefault("checks", []).append(entry)

    def run(self, stages) -> dict:
        self.report["stages"] = list(stages)
        for s in stages:
            t0 = time.perf_counter()
            getattr(self, "stage_" + s)()
            self.timings[s] = round(time.perf_counter() - t0, 6)
        return self.report

    # -- stages ---------------------------------------------------------------

    def stage_validate(self):
        fan, h = self.spec.fan, self.spec.h
        v = validate_input(fan)
        sec = self.report.setdefault("validation", {})
        sec["cone_determinants"] = list(v.cone_determinants)
        sec["diagnostics"] = list(v.diagnostics)
        self.check("validation", "unimodular", v.unimodular)
        self.check("validation", "complete", v.complete)
        self.check("validation", "reflexive", v.reflexive and v.rays_on_boundary)
        cv = convexity_report(h, fan)
        sec["convexity"] = {"h": cv.h.value, "h_prime": cv.h_prime.value}
        sec["diagnostics"].extend(cv.violations)
        self.check("validation", "h_strictly_convex", cv.h.value == "StrictlyConvex", cv.h.value)
        self.check("validation", "h_prime_convex", cv.h_prime.value != "NotConvex", cv.h_prime.value)
        ok = v.ok and cv.ok
        if self.spec.sigma is not None:
            sv = validate_input(self.spec.sigma)
            self.check("validation", "sigma_unimodular", sv.unimodular)
            sec["diagnostics"].extend(f"sigma: {m}" for m in sv.diagnostics if "determinant" in m)
            ok = ok and sv.unimodular
        if not ok:
            raise InputInvalid("; ".join(sec["diagnostics"]) or "input rejected")

    def stage_sphere(self):
        B = sp.build_sphere(self.spec.fan, self.spec.h)
        self.B = B
        sec = self.report.setdefault("sphere", {})
        sec["vertices"] = [list(p) for p in B.vertex_positions]
        sec["face_counts"] = B.face_counts()
        chi = B.euler_characteristic()
        sec["euler_characteristic"] = chi
        self.check("sphere", "euler_characteristic", chi == 1 + (-1) ** B.d, chi)

        n = B.fan.rank
        loops = sp.all_loops(B)
        unipotent = True
        unimodular = True
        for loop in loops:
            T = sp.monodromy_transport(B, loop)
            D = mat_sub(T, identity(n))
            unipotent &= all(x == 0 for row in mat_mul(D, D) for x in row)
            unimodular &= det(T) == 1
        self.check("sphere", "transport_square_zero", unipotent, len(loops))
        self.check("sphere", "transport_det_one", unimodular)

        strata = []
        fixed = True
        for cell in sp.singular_cells(B):
            inv = sp.local_monodromy_invariants(B, cell)
            strata.append({"rays": sorted(cell.rays), "dim": cell.dim,
                           "invariant_rank": inv.rank, "invariant_basis": [list(b) for b in inv.basis]})
            fixed &= inv.rank > 0
        sec["singular_strata"] = strata
        self.check("sphere", "invariant_lattice_nonzero", fixed, len(strata))

        simp = sp.simplicity_check(B, self.spec.sigma)
        sec["simplicity"] = [{"rays": sorted(s.cell.rays), "dual": s.dual_standard,
                              "primal": s.primal_standard, "refinement": s.refinement} for s in simp]
        self.check("sphere", "simplicity", all(s.dual_standard and s.primal_standard for s in simp),
                   len(simp))

    def stage_cohomology(self):
        T = ToricModel(self.spec.fan)
        self.model = T
        sec = self.report.setdefault("intersection", {})
        sec["amb_dims"] = list(T.dims)
        sec["amb_basis"] = [[list(b) for b in T.amb_graded_basis(i)[0]] for i in range(T.d + 1)]
        rows = rd.intersection_table(self.B, T)
        sec["table"] = [{"multiset": list(r.multiset), "tropical": r.tropical, "toric": r.toric}
                        for r in rows]
        self.check("intersection", "tropical_equals_toric", all(r.ok for r in rows), len(rows))

    def stage_radiance(self):
        B, T, h = self.B, self.model, self.spec.h
        vc = rd.vertex_identity_check(B, h)
        self.check("radiance", "vertex_identity", all(v.ok for v in vc), len(vc))
        c = rd.radiance_class(T, h)
        self.c = c
        value, ok = rd.top_power_positivity(T, c)
        sec = self.report.setdefault("radiance", {})
        sec["coefficients"] = list(c.coefficients)
        sec["class_coords"] = jsonable(list(c.cls.coords))
        sec["top_power"] = value
        self.check("radiance", "top_power_positive", ok, value)

    def _lattice(self):
        if not hasattr(self, "lattice"):
            self.chars = gm.characteristic_data(self.model)
            self.gamma_hat = gm.gamma_class_Y(self.chars)
            self.lattice = gm.lattice_basis(self.model, self.gamma_hat)
        return self.lattice

    def stage_plh(self):
        T = self.model
        P = ph.build_plh(T, self.c)
        self.P = P
        sec = self.report.setdefault("plh", {})
        sec["basis"] = P.labels()
        sec["N"] = jsonable(P.N)
        sec["monodromy_monomial"] = jsonable(P.monodromy)
        st = ph.structure_checks(P)
        self.check("plh", "griffiths_transversality", all(st.griffiths.values()), st.griffiths)
        self.check("plh", "orthogonality", all(st.orthogonality.values()), st.orthogonality)
        self.check("plh", "hodge_accounting", st.hodge_accounting, st.hodge_numbers)
        d = P.d
        Nk = identity(P.dim)
        for _ in range(d + 1):
            Nk = mat_mul(P.N, Nk)
        self.check("plh", "nilpotent", all(x == 0 for row in Nk for x in row))
        self.check("plh", "monodromy_preserves_pairing", ph.monodromy_preserves_pairing(P))
        self.check("plh", "pairing_symmetry", ph.pairing_symmetric(P), (-1) ** d)
        L = self._lattice()
        try:
            # integrality is recorded once, by the gamma stage
            sec["monodromy_gamma"] = ph.monodromy_matrix(P, "gamma", L, self.tol)
        except TropicalPeriodError:
            sec["monodromy_gamma"] = None
        try:
            pr = ph.positivity_sweep(P, self.ys, L, self.tol)
            sec["positivity"] = [{"y": e.y, "p": e.p, "q": e.q, "dim": e.dim,
                                  "min_eigenvalue": e.min_eigenvalue} for e in pr.entries]
            for y in self.ys:
                es = [e for e in pr.entries if e.y == y]
                self.check("plh", f"positivity_y={y:g}", all(e.positive for e in es),
                           min(e.min_eigenvalue for e in es))
        except TropicalPeriodError as exc:
            self.check("plh", "positivity", False, str(exc))

    def stage_gamma(self):
        L = self._lattice()
        cd = self.chars
        sec = self.report.setdefault("gamma", {})
        sec["euler_number"] = cd.euler_number
        sec["chern_TY"] = jsonable(cd.chern_TY)
        sec["gamma_class"] = jsonable(self.gamma_hat)
        sec["lattice"] = [[{"coefficient": c, "exponents": list(a)} for c, a in combo]
                          for combo in L.combinations]
        sec["virtual_basis"] = L.virtual
        sec["greedy_index"] = L.greedy_index
        self.check("gamma", "c1_vanishes", not any(cd.component(cd.chern_TY, 1)))
        rep = gm.lattice_checks(self.P, L, self.tol)
        sec["gram"] = rep.gram
        sec["monodromy"] = rep.monodromy
        for c in rep.checks:
            self.check("gamma", c.name, c.ok, c.value)
        if self.P.d % 2 == 0 and not L.virtual and L.exponents[0] == (0,) * self.spec.fan.n_rays:
            sec["pairing_of_structure_sheaf"] = rep.gram[0][0]


def check_matrix(report: dict) -> dict[str, str]:
    out = {}
    for section in ("validation", "sphere", "intersection", "radiance", "plh", "gamma"):
        for c in report.get(section, {}).get("checks", []):
            out[f"{section}.{c['name']}"] = c["status"]
    return out


def run(spec: InstanceSpec, stages=("all",), y_sweep=None, tolerance=None) -> tuple[dict, int]:
    """Run the pipeline; returns the report (timings under ``timings``) and an exit code."""
    pipe = Pipeline(spec, y_sweep, tolerance)
    order = resolve_stages(stages)
    code = EXIT_OK
    try:
        pipe.run(order)
    except InputInvalid as exc:
        pipe.report["error"] = str(exc)
        code = EXIT_INVALID
    except (TropicalPeriodError, ArithmeticError) as exc:
        # anything raised after validation passed is a mathematical failure
        pipe.report["error"] = f"{type(exc).__name__}: {exc}"
        code = EXIT_FAILED
    matrix = check_matrix(pipe.report)
    if code == EXIT_OK and any(v != "pass" for v in matrix.values()):
        code = EXIT_FAILED
    pipe.report["check_matrix"] = matrix
    pipe.report["status"] = {EXIT_OK: "pass", EXIT_INVALID: "invalid_input", EXIT_FAILED: "fail"}[code]
    pipe.report["timings"] = pipe.timings
    return pipe.report, code


def format_text(report: dict) -> str:
    lines = [f"instance: {report['instance']}", f"status: {report['status']}"]
    if "error" in report:
        lines.append(f"error: {report['error']}")
    for section in ("validation", "sphere", "intersection", "radiance", "plh", "gamma"):
        for c in report.get(section, {}).get("checks", []):
            val = f"  {json.dumps(c['value'])}" if "value" in c else ""
            lines.append(f"{section}.{c['name']}: {c['status'].upper()}{val}")
    for d in report.get("validation", {}).get("diagnostics", []):
        lines.append(f"diagnostic: {d}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropical-period",
                                description="Verify the tropical period of a toric instance.")
    p.add_argument("--input", required=True,
                   help="instance JSON file, or one of the shipped names: cubic, quartic, cube")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--stages", default="all",
                   help="comma-separated subset of " + ",".join(STAGES) + " (prerequisites are added)")
    p.add_argument("--y-sweep", help="comma-separated imaginary parts for the positivity sweep")
    p.add_argument("--tolerance", type=float, help="numeric tolerance (default 1e-9)")
    p.add_argument("--format", choices=("json", "text"), help="report format")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_instance(args.input)
        stages = [s.strip() for s in args.stages.split(",") if s.strip()]
        resolve_stages(stages)
        ys = [float(y) for y in args.y_sweep.split(",")] if args.y_sweep else None
        if ys is not None and any(y <= 0 for y in ys):
            raise InvalidInstance("y-sweep values must be positive")
    except (InvalidInstance, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report, code = run(spec, stages, ys, args.tolerance)
    fmt = args.format or spec.options.get("format", "json")
    text = json.dumps(report, indent=2) + "\n" if fmt == "json" else format_text(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_INVALID and "error" in report:
        print(f"invalid input: {report['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
