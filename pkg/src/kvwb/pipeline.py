"""End-to-end analysis pipeline over a single model.

Stages run in dependency order; each gets a status out of
pass / fail / not-applicable / unknown.  A failed prerequisite marks the
dependents not-applicable — never pass.  Everything downstream of the
random seed is deterministic, so two runs with the same inputs produce
byte-identical reports.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import composites, cones, effectspace, forms, jordan, models
from .builtins import conjugation_bijection
from .linalg import frac
from .serialize import dumps_canonical, model_to_json

PASS = "pass"
FAIL = "fail"
NA = "not-applicable"
UNKNOWN = "unknown"

#: --expect tokens and the stage each one excuses.
EXPECT_TOKENS = {
    "not-bisymmetric": "bisymmetry",
    "not-sharp": "sharpness",
    "not-irreducible": "irreducibility",
    "no-spin-form": "spin-form",
    "no-conjugate": "conjugate",
    "not-self-dual": "self-duality",
    "not-weakly-self-dual": "weak-self-duality",
}

STAGE_ORDER = [
    "validation", "bisymmetry", "sharpness", "effect-space",
    "irreducibility", "spin-form", "unitarity", "conjugate",
    "self-duality", "weak-self-duality", "homogeneity",
    "jordan-recovery", "identification",
]


@dataclass
class Stage:
    name: str
    status: str
    data: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


@dataclass
class PipelineReport:
    model: models.Model
    seed: int
    tol: float
    stages: list
    expected: list
    spin_form: object = None          # carried for subcommands, not serialized
    recovered: object = None

    def stage(self, name: str) -> Stage:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)

    @property
    def failures(self) -> list:
        return [s.name for s in self.stages if s.status == FAIL]

    @property
    def ok(self) -> bool:
        expected_stages = sorted(EXPECT_TOKENS[t] for t in self.expected)
        return sorted(self.failures) == expected_stages

    def to_json(self) -> dict:
        m = self.model
        return {
            "tool": "kvwb",
            "seed": self.seed,
            "tol": self.tol,
            "model": {"name": m.name, "backend": m.states.kind,
                      "outcomes": len(m.outcomes), "tests": len(m.tests),
                      "rank": m.rank},
            "model_spec": model_to_json(m),
            "stages": [{"name": s.name, "status": s.status,
                        "data": s.data, "notes": s.notes}
                       for s in self.stages],
            "expected_failures": sorted(self.expected),
            "failures": sorted(self.failures),
            "ok": self.ok,
        }

    def to_markdown(self) -> str:
        j = self.to_json()
        lines = [f"# kvwb report: {j['model']['name']}", ""]
        lines.append(f"- backend: {j['model']['backend']}, "
                     f"outcomes: {j['model']['outcomes']}, "
                     f"tests: {j['model']['tests']}, rank: {j['model']['rank']}")
        lines.append(f"- seed: {j['seed']}, tol: {j['tol']}")
        if j["expected_failures"]:
            lines.append(f"- expected failures: "
                         f"{', '.join(j['expected_failures'])}")
        lines.append(f"- verdict: {'OK' if j['ok'] else 'MISMATCH'} "
                     f"(failures: {', '.join(j['failures']) or 'none'})")
        lines += ["", "| stage | status |", "|---|---|"]
        for s in j["stages"]:
            lines.append(f"| {s['name']} | {s['status']} |")
        lines.append("")
        for s in j["stages"]:
            lines.append(f"## {s['name']} — {s['status']}")
            lines.append("")
            if s["notes"]:
                for n in s["notes"]:
                    lines.append(f"- {n}")
                lines.append("")
            if s["data"]:
                lines.append("```json")
                lines.append(dumps_canonical(s["data"]).rstrip("\n"))
                lines.append("```")
                lines.append("")
        return "\n".join(lines).rstrip("\n") + "\n"


def _barycenter(vertices) -> list:
    n = len(vertices)
    return [sum(col, Fraction(0)) / n for col in zip(*vertices)]


def _homogeneity_inputs(m: models.Model, eta):
    """Deterministic interior samples plus whatever witnesses we can build.

    Single-test polytope models get one diagonal witness per sample (the
    table supported on the diagonal with the sample as its profile), which
    covers the sample whenever the diagonal map is an order isomorphism.
    Everything else relies on the conjugate state's marginal.
    """
    witnesses = []
    if eta is not None:
        witnesses.append(eta)
    if isinstance(m.states, models.PolytopeBackend):
        bary = _barycenter(m.states.vertices)
        samples = [bary]
        if len(m.tests) == 1:
            n = len(m.outcomes)
            total = n * (n + 1) // 2
            samples.append([Fraction(i + 1, total) for i in range(n)])
            for s in samples:
                table = {(x, y): (s[i] if x == y else Fraction(0))
                         for i, x in enumerate(m.outcomes)
                         for y in m.outcomes}
                witnesses.append(composites.BipartiteState(m, m, table))
    else:
        qb = m.states
        mixed = [float(np.trace(np.asarray(qb.outcome_matrices[x])).real)
                 / qb.dim for x in m.outcomes]
        samples = [mixed]
    return witnesses, samples


def run_pipeline(m: models.Model, seed: int = 42, tol: float = 1e-9,
                 expect=(), sample_count: int = 50) -> PipelineReport:
    expect = sorted(set(expect))
    unknown_tokens = [t for t in expect if t not in EXPECT_TOKENS]
    if unknown_tokens:
        raise ValueError(f"unknown expectation tokens {unknown_tokens}; "
                         f"valid: {sorted(EXPECT_TOKENS)}")
    stages: list[Stage] = []
    status: dict[str, str] = {}

    def add(name, st, data=None, notes=None):
        stages.append(Stage(name, st, data or {}, notes or []))
        status[name] = st
        return st

    def blocked(*prereqs):
        return any(status.get(p) != PASS for p in prereqs)

    # -- validation ---------------------------------------------------------
    vrep = models.validate_model(m, tol=tol)
    add("validation", PASS if vrep.ok else FAIL,
        {"problems": vrep.problems, **vrep.data})
    if not vrep.ok:
        for name in STAGE_ORDER[1:]:
            add(name, NA, notes=["validation failed"])
        return PipelineReport(m, seed, tol, stages, expect)

    # -- bisymmetry ---------------------------------------------------------
    brep = models.check_bisymmetry(m)
    if brep.fully_bisymmetric is None:
        bst = UNKNOWN
    else:
        bst = PASS if brep.fully_bisymmetric else FAIL
    add("bisymmetry", bst,
        {"pure_state_transitive": brep.pure_state_transitive,
         "test_transitive": brep.test_transitive,
         "pair_transitive": brep.pair_transitive,
         "fully_bisymmetric": brep.fully_bisymmetric,
         "orbit_counts": brep.orbit_counts}, brep.notes)

    # -- sharpness ----------------------------------------------------------
    srep = models.is_sharp(m)
    add("sharpness", PASS if srep.sharp else FAIL,
        {"sharp": srep.sharp, "witness": srep.witness}, srep.notes)

    # -- effect space -------------------------------------------------------
    try:
        E = effectspace.build_effect_space(m)
        add("effect-space", PASS,
            {"dim": E.dim, "kind": E.kind, "span_dim": E.span_dim,
             "generators": len(E.cone_generators)}, E.notes)
    except Exception as exc:  # surfaced, not swallowed: the report says why
        E = None
        add("effect-space", FAIL, {"error": str(exc)})

    actions = E.all_effect_actions() if E is not None else []

    # -- irreducibility -----------------------------------------------------
    if blocked("effect-space"):
        add("irreducibility", NA, notes=["needs the effect space"])
        irr = None
    else:
        irr = forms.is_irreducible(E, actions)
        add("irreducibility", PASS if irr else FAIL,
            {"irreducible": irr,
             "meaning": "exactly one invariant symmetric form on the "
                        "trace-zero subspace, up to scale"})

    # -- orthogonalizing unit-normalized invariant form ----------------------
    spin = None
    if blocked("effect-space"):
        add("spin-form", NA, notes=["needs the effect space"])
    else:
        sres = forms.find_orthogonalizing_spin_form(m, E, actions, tol=tol)
        flags = sres.form.flag_summary() if sres.form is not None else {}
        if sres.form is not None and all(flags.values()):
            spin = sres.form
            add("spin-form", PASS,
                {"solution_space_dim": sres.solution_space_dim,
                 "unique_up_to_normalization": sres.solution_space_dim == 1,
                 "flags": flags,
                 "matrix": spin.matrix}, sres.notes)
        else:
            notes = list(sres.notes)
            if sres.form is not None:
                notes.append("a form satisfying the linear constraints "
                             "exists but fails "
                             + ", ".join(k for k, v in flags.items() if not v))
            add("spin-form", FAIL,
                {"solution_space_dim": sres.solution_space_dim,
                 "flags": flags}, notes)

    # -- unitarity of the symmetry action ------------------------------------
    if blocked("spin-form"):
        add("unitarity", NA, notes=["needs the invariant form"])
    else:
        uok = forms.check_unitarity(actions, spin, tol=tol)
        add("unitarity", PASS if uok else FAIL,
            {"all_generators_unitary": uok,
             "meaning": "M^T B M = B for every symmetry generator"})

    # -- conjugate state ------------------------------------------------------
    eta = None
    eta_iso = None
    if blocked("effect-space"):
        add("conjugate", NA, notes=["needs the effect space"])
    else:
        cdata: dict = {}
        cnotes: list = []
        try:
            gamma = conjugation_bijection(m, tol=tol)
            eta = composites.find_conjugate_state(m, gamma=gamma, tol=tol)
        except composites.CompositeError as exc:
            cnotes.append(f"search aborted: {exc}")
        if eta is None:
            add("conjugate", FAIL,
                {"found": False,
                 "note": "no bipartite state satisfies the conjugate "
                         "constraints (normalization, conditionals in the "
                         "cone both ways, uniform diagonal, symmetry "
                         "invariance)"}, cnotes)
        else:
            vrep2 = composites.validate_bipartite(eta, tol=tol)
            cdata["found"] = True
            cdata["valid_bipartite"] = vrep2.ok
            cdata["diagonal"] = [eta.value(x, gamma[x]) for x in m.outcomes]
            eta_iso = composites.is_isomorphism_state(eta, E, E, tol=tol)
            cdata["isomorphism_state"] = {
                "is_iso": eta_iso.is_iso, "invertible": eta_iso.invertible,
                "forward_positive": eta_iso.forward_positive,
                "inverse_positive": eta_iso.inverse_positive,
                "failures": eta_iso.failures}
            if spin is not None:
                conj = composites.make_conjugate(m, gamma, eta)
                derived = composites.spin_form_from_conjugate(conj, E, tol=tol)
                if spin.kind == "exact":
                    dev = max(abs(a - b) for ra, rb in
                              zip(derived.matrix, spin.matrix)
                              for a, b in zip(ra, rb))
                    agree = dev == 0
                else:
                    dev = float(np.max(np.abs(np.asarray(derived.matrix)
                                              - np.asarray(spin.matrix))))
                    agree = dev <= tol
                cdata["derived_form_flags"] = derived.flag_summary()
                cdata["derived_matches_invariant_form"] = agree
                cdata["derived_form_deviation"] = dev
            add("conjugate", PASS, cdata, cnotes)

    # -- self-duality ---------------------------------------------------------
    if blocked("spin-form"):
        add("self-duality", NA, notes=["needs the invariant form"])
    elif E.kind == "exact":
        K = cones.cone(E.cone_generators)
        rep = cones.is_self_dual(K, spin.matrix)
        add("self-duality", PASS if rep.self_dual else FAIL,
            {"self_dual": rep.self_dual,
             "pairwise_min": rep.pairwise_min,
             "pairwise_argmin": rep.pairwise_argmin,
             "dual_generators": [list(g) for g in rep.dual.all_generators()],
             "failures": rep.failures},
            ["exact double-description computation of the dual cone"])
        sd_ok = rep.self_dual
    else:
        # sampled + analytic: pair the sampled effects under the form, and
        # certify the full cone analytically when the form is the trace
        # pairing (the positive-semidefinite cone is self-dual under it).
        gens = [np.asarray(g, float) for g in E.cone_generators]
        Bm = np.asarray(spin.matrix, float)
        pmin, parg = None, ()
        for i, g in enumerate(gens):
            for j, h in enumerate(gens):
                v = float(g @ Bm @ h)
                if pmin is None or v < pmin:
                    pmin, parg = v, (i, j)
        trace_form = np.eye(E.dim) / m.states.dim
        dev = float(np.max(np.abs(Bm - trace_form)))
        analytic = bool(m.states.builtin) and dev <= 1e-6
        ok = (pmin is not None and pmin >= -tol) and analytic
        add("self-duality", PASS if ok else FAIL,
            {"self_dual": ok, "sampled_pairwise_min": pmin,
             "sampled_pairwise_argmin": list(parg),
             "trace_form_deviation": dev,
             "analytic_certificate": analytic},
            ["sampled check: all pairs of sampled effects pair "
             "nonnegatively under the form",
             "analytic certificate: the form equals the normalized trace "
             "pairing, under which the positive-semidefinite cone is "
             "self-dual"])
        sd_ok = ok

    # -- weak self-duality ------------------------------------------------------
    if blocked("spin-form"):
        add("weak-self-duality", NA, notes=["needs the invariant form"])
    elif E.kind == "exact":
        K = cones.cone(E.cone_generators)
        wrep = cones.is_weakly_self_dual(K, spin.matrix)
        wst = {"yes": PASS, "no": FAIL, "unknown": UNKNOWN}[wrep.status]
        add("weak-self-duality", wst,
            {"status": wrep.status, "map": wrep.map,
             "ray_bijection": wrep.bijection, "scalars": wrep.scalars},
            wrep.notes)
    else:
        if status["self-duality"] == PASS:
            add("weak-self-duality", PASS,
                {"status": "yes", "map": "identity"},
                ["a self-dual cone is weakly self-dual via the identity"])
        else:
            add("weak-self-duality", UNKNOWN,
                {"status": "unknown"},
                ["no exact ray enumeration for sampled quantum cones"])

    # -- homogeneity (hypothesis-checking report) --------------------------------
    if blocked("effect-space"):
        add("homogeneity", NA, notes=["needs the effect space"])
    else:
        wits, samples = _homogeneity_inputs(m, eta)
        hrep = composites.homogeneity_report(m, wits, samples, tol=tol)
        hst = PASS if (hrep.verified_on_samples and all(hrep.witness_ok)) \
            else UNKNOWN
        add("homogeneity", hst,
            {"witnesses": len(wits), "witness_ok": hrep.witness_ok,
             "covered": hrep.covered, "uncovered": hrep.uncovered,
             "verified_on_samples": hrep.verified_on_samples,
             "samples": samples}, hrep.notes)

    # -- order-unit product recovery ----------------------------------------------
    recovered = None
    if blocked("spin-form", "self-duality"):
        add("jordan-recovery", NA,
            notes=["needs a self-dual cone and the invariant form"])
    else:
        prob = _recovery_problem(m, E, spin, tol)
        res = jordan.recover_jordan_product(prob, seed=seed)
        ok = (res.algebra is not None and res.residual is not None
              and res.residual <= 1e-8 and res.seeds_agree is True
              and all(v for v in res.gates.values()))
        rdata = {"linear_solution_dim": res.linear_solution_dim,
                 "residual": res.residual, "seeds_agree": res.seeds_agree,
                 "gates": res.gates, "exact": prob.exact}
        if ok:
            recovered = res.algebra
            vrep3 = jordan.verify_symmetric_cone(
                recovered, sample_count=sample_count, seed=seed, tol=tol)
            rdata["symmetric_cone_check"] = {
                "ok": vrep3.ok, "failures": vrep3.failures,
                "max_homogeneity_error": vrep3.max_homogeneity_error,
                "min_self_duality_pairing": vrep3.min_pairing}
            ok = ok and vrep3.ok
        add("jordan-recovery", PASS if ok else FAIL, rdata, res.notes)

    # -- identification ---------------------------------------------------------
    if blocked("jordan-recovery"):
        add("identification", NA, notes=["needs a recovered product"])
    else:
        cands = jordan.identify_algebra(recovered, seed=seed)
        idata = {"dim": recovered.dim,
                 "rank": jordan.generic_rank(recovered, seed=seed),
                 "candidates": cands}
        inotes = []
        if len(cands) > 1:
            inotes.append("dimension and rank do not separate these "
                          "candidates; listed in full")
        add("identification", PASS if cands else FAIL, idata, inotes)

    return PipelineReport(m, seed, tol, stages, expect,
                          spin_form=spin, recovered=recovered)


def _recovery_problem(m: models.Model, E, spin, tol: float
                      ) -> jordan.RecoveryProblem:
    """Assemble recovery inputs from the verified pipeline prerequisites."""
    gens = E.cone_generators
    if E.kind == "exact":
        # Membership questions arrive as floats from the numeric probes;
        # answer them exactly after absorbing rounding noise into a
        # tol-sized multiple of the order unit (interior direction).
        slack = Fraction(tol).limit_denominator(10**12)
        uvec = [frac(x) for x in E.u]

        def membership(v):
            vv = [Fraction(float(x)) + slack * b for x, b in zip(v, uvec)]
            return E.effect_cone.contains(vv).feasible

        acts = E.all_effect_actions()
        return jordan.RecoveryProblem(
            dim=E.dim,
            B=np.array([[float(x) for x in row] for row in spin.matrix]),
            u=np.array([float(x) for x in E.u]),
            cone_generators=[np.array([float(x) for x in g]) for g in gens],
            actions=[np.array([[float(x) for x in row] for row in M])
                     for M in acts],
            outcome_vectors=[np.array([float(x) for x in g]) for g in gens],
            cone_membership=membership,
            exact=True,
            B_exact=[[frac(x) for x in row] for row in spin.matrix],
            u_exact=[frac(x) for x in E.u],
            actions_exact=[[[frac(x) for x in row] for row in M]
                           for M in acts],
            outcome_vectors_exact=[[frac(x) for x in g] for g in gens])
    membership = lambda v: effectspace.cone_membership(E, v, tol).feasible
    acts = [np.asarray(M, float) for M in E.all_effect_actions()]
    return jordan.RecoveryProblem(
        dim=E.dim, B=np.asarray(spin.matrix, float),
        u=np.asarray(E.u, float),
        cone_generators=[np.asarray(g, float) for g in gens],
        actions=acts,
        outcome_vectors=[np.asarray(g, float) for g in gens],
        cone_membership=membership, exact=False)
