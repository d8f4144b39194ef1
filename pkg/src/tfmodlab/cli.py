"""Command line front end: ``tfmodlab <subcommand> [flags] < payload.json``.

Exit codes: 0 success, 2 invalid input, 3 uncertified or failed computation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

import jsonschema

from . import __version__
from .algebra import PROBABLY_LOCAL
from .exactfield import FieldTower, Poly, QQ, TowerMismatch, parse_rational, theta7
from .linalg import Matrix
from .pairs import (PairError, PairModule, UncertifiedFactors, bass_pair, decompose, hom_pairs, is_indecomposable,
                    is_isomorphic, psi_matrix_text, psi_pair, quotient_pair)
from .ringop import (M0, GenusDescriptor, IdealOfR, MaximalIdealDesc, ModuleDescriptor, RingError, RingR,
                     UnrepresentableDescriptor, comaximal_factorization, coprime_obstruction, crt_idempotents,
                     factor_element, genus_of, genus_realizable, glue_submodule, iso_from_genus,
                     local_pair_submodule, local_power_submodule, match_decompositions, min_generators,
                     realizability_conditions, same_genus, support, validate_trace_chain)
from .semigroup import NotCoprime, NumericalSemigroup, dr_check, frobenius, gaps, multiplicity, normalization_local, overmodule_report

REPORT_SCHEMA = "tfmodlab.report/v1"
EXACT = "Complete"


class SchemaError(ValueError):
    """Payload or flag validation failure (exit 2)."""


class ComputeError(RuntimeError):
    """A computation could not be completed or certified (exit 3)."""


# ------------------------------------------------------------------ parsing


def load_tower(spec: str) -> FieldTower:
    if spec.startswith("builtin:") or spec == "theta7":
        try:
            return FieldTower.from_string(spec)
        except ValueError as exc:
            raise SchemaError(str(exc)) from None
    try:
        with open(spec) as fh:
            data = json.load(fh)
        coeffs = [parse_rational(str(c)) for c in data["min_poly"]]
        return FieldTower(Poly(coeffs), name=data.get("name") or f"file:{os.path.basename(spec)}")
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"cannot load tower from {spec!r}: {exc}") from None


def _schema_doc():
    text = resources.files("tfmodlab").joinpath("schemas/v1/payloads.json").read_text()
    return json.loads(text)


def validate_payload(command: str, payload) -> None:
    doc = _schema_doc()
    schema = {"$schema": doc["$schema"], "$defs": doc["$defs"], "$ref": f"#/$defs/{command}"}
    try:
        jsonschema.Draft202012Validator(schema).validate(payload)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"payload fails the {command} schema at {where}: {exc.message}") from None


def _elem(data, tower):
    if isinstance(data, list):
        return tower([parse_rational(str(c)) for c in data])
    return tower(parse_rational(str(data)))


def _poly(data, tower):
    return Poly([_elem(c, tower) for c in data], tower)


def _pair(data, tower):
    if data.get("tower", tower.name) != tower.name:
        raise SchemaError(f"pair declares tower {data['tower']!r} but --tower is {tower.name!r}")
    return PairModule(data["n"], [[_elem(e, tower) for e in v] for v in data["V"]], tower)


def _module(data, tower):
    pair = _pair(data, tower)
    if "B" not in data:
        return ModuleDescriptor.from_pair(pair)
    return ModuleDescriptor([[_poly(e, tower) for e in row] for row in data["B"]], pair)


def _prime(data, tower):
    if data["tag"] == "M0":
        return M0
    return MaximalIdealDesc.poly(_poly(data["q"], tower), tower)


def _ideal(gens, tower):
    return IdealOfR.from_generators([_poly(g, tower) for g in gens], tower)


def _matrix_json(m: Matrix):
    return [[e.to_json() for e in m.row(i)] for i in range(m.rows)]


# ------------------------------------------------------------------ subcommands


def cmd_psi(cfg, payload, tower):
    n = cfg.n if cfg.n is not None else payload.get("n", 2)
    ts = cfg.t if cfg.t is not None else [str(t) for t in payload.get("t", [0, 1, 2])]
    if n < 2:
        raise SchemaError("--n must be at least 2")
    ts = [QQ(parse_rational(str(t))) for t in ts]
    alpha = _elem(payload["alpha"], tower) if "alpha" in payload else None
    beta = _elem(payload["beta"], tower) if "beta" in payload else None
    pairs = [psi_pair(n, t, alpha, beta, tower) for t in ts]
    members = []
    for t, p in zip(ts, pairs):
        v = is_indecomposable(p, cfg.seed)
        members.append({"t": str(t), "pair": p.to_json(), "indecomposable": v.is_local,
                        "certificate": v.tag, "note": v.note, "matrix_text": psi_matrix_text(n, t)})
    homs = [[len(hom_pairs(p, q)) for q in pairs] for p in pairs]
    iso = [[is_isomorphic(p, q, cfg.seed)[0] for q in pairs] for p in pairs]
    nonisomorphic = all(not iso[i][j] for i in range(len(pairs)) for j in range(len(pairs)) if i != j)
    count = sum(1 for m in members if m["indecomposable"])
    report = {"n": n, "members": members, "hom_dims": homs, "isomorphic": iso,
              "iso_certificate": EXACT, "pairwise_nonisomorphic": nonisomorphic,
              "indecomposable_count": count,
              "anchors": ["Construction Ψ_t", "endomorphism reduction to K-linear algebra"]}
    summary = [f"n = {n}, t in {{{', '.join(str(t) for t in ts)}}}",
               f"{count} indecomposable ({', '.join(m['certificate'] for m in members)})",
               "pairwise non-isomorphic" if nonisomorphic else "some members are isomorphic"]
    caveat = any(m["certificate"] == PROBABLY_LOCAL for m in members)
    return report, summary, caveat


def cmd_decompose(cfg, payload, tower):
    if "pair" in payload:
        p, source = _pair(payload["pair"], tower), "pair"
    elif "quotient" in payload:
        q = payload["quotient"]
        gens = [[_poly(c, tower) for c in g] for g in q["generators"]]
        p, source = quotient_pair(q["k"], gens, tower, truncation=cfg.truncation), "quotient"
    else:
        a, b, c = (_elem(e, tower) for e in payload["bass"])
        p, source = bass_pair(a, b, c, tower), "bass"
    rep = decompose(p, cfg.seed)
    report = {"source": source, "input": p.to_json(), **rep.to_json(),
              "certified": rep.certified,
              "anchors": ["Krull–Schmidt decomposition of artinian pairs"]}
    if source == "bass":
        report["anchors"].append("rank-two indecomposable from a three-generated ideal")
    summary = [f"rank {p.n}, dim_K V = {p.dim}",
               f"{len(rep.factors)} factor(s): " + ", ".join(f"rank {f.n} [{lv}]" for f, lv in zip(rep.factors, rep.levels)),
               f"isomorphism classes: {rep.classes}"]
    return report, summary, not rep.certified


def cmd_iso(cfg, payload, tower):
    p, q = _pair(payload["p"], tower), _pair(payload["q"], tower)
    ok, A = is_isomorphic(p, q, cfg.seed)
    report = {"isomorphic": ok, "certificate": EXACT, "witness": _matrix_json(A) if ok else None,
              "anchors": ["isomorphism of artinian pairs reflects isomorphism of modules"]}
    return report, [f"isomorphic: {str(ok).lower()}"], False


def cmd_glue(cfg, payload, tower):
    if "ambient" in payload:
        M = _module(payload["ambient"], tower)
    else:
        M = ModuleDescriptor.free(payload.get("rank", 2), tower)
    assignments = {}
    wanted = {}
    for a in payload["assignments"]:
        desc = _prime(a["prime"], tower)
        if desc in assignments:
            raise SchemaError(f"prime {desc} assigned twice")
        if "pair" in a or "psi" in a:
            if desc != M0:
                raise SchemaError("pair assignments are only meaningful at M0")
            P = _pair(a["pair"], tower) if "pair" in a else psi_pair(M.n, parse_rational(str(a["psi"]["t"])), tower=tower)
            assignments[desc] = local_pair_submodule(M, P)
            wanted[desc] = P
        elif "power" in a:
            assignments[desc] = local_power_submodule(M, desc, a["power"])
        else:
            assignments[desc] = _module(a["module"], tower)
    res = glue_submodule(M, assignments, variant=payload.get("variant", 0))
    N = res.module
    probes = RingR(tower).probe_primes(payload.get("probes", 3), cfg.seed, exclude=assignments)
    local = []
    for desc in [M0] + sorted(assignments, key=lambda d: d.key()) + probes:
        if any(e["prime"] == desc.to_json() for e in local):
            continue
        loc = N.localize(desc)
        entry = {"prime": desc.to_json(), "label": str(desc), "assigned": desc in assignments}
        if desc == M0:
            entry["pair"] = loc.to_json()
            if desc in wanted:
                entry["isomorphic_to_assignment"] = is_isomorphic(loc, wanted[desc], cfg.seed)[0]
                entry["certificate"] = EXACT
        else:
            entry.update(loc.to_json())
        local.append(entry)
    report = {"ambient": M.to_json(), "glue": res.to_json(), "localizations": local,
              "anchors": ["package deal gluing of local submodules", "Chinese remainder idempotents"]}
    summary = [f"glued rank-{N.n} module, det B = {N.det}",
               f"d = {' * '.join(f'({d})' for d in res.d_factors) or '1'}"]
    for e in local:
        summary.append(f"  {e['label']}: " + (
            f"dim V = {len(e['pair']['V'])}" if "pair" in e else f"free rank {e['free_rank']}, v(det) {e['valuation']}"))
    return report, summary, False


def cmd_ideal(cfg, payload, tower):
    op = payload["op"]
    anchors = ["maximal ideals of K + xL[x]"]
    if op == "factor":
        fe = factor_element(_poly(payload["element"], tower), tower)
        out = fe.to_json()
        summary = [f"unit {fe.unit}, x^{fe.e}, " + (" * ".join(f"({q})^{k}" for q, k in fe.factors) or "no other factors")]
    elif op == "support":
        I = _ideal(payload["generators"], tower)
        out = {"ideal": I.to_json(), "support": [d.to_json() for d in support(I)],
               "components": [c.to_json() for c in comaximal_factorization(I)] if not I.is_unit else []}
        summary = [str(I), "support: " + ", ".join(str(d) for d in support(I))]
        anchors.append("comaximal factorization in an h-local domain")
    elif op == "crt":
        mod = _ideal(payload["modulus"], tower)
        c = crt_idempotents([_prime(t, tower) for t in payload["targets"]], mod)
        out = c.to_json()
        out["verified"] = True
        summary = [f"b_{i + 1} = {b}" for i, b in enumerate(c.b_targets)] + [f"b = {c.b}"]
        anchors.append("Chinese remainder idempotents")
    elif op == "min_gens":
        I = _ideal(payload["generators"], tower)
        desc = _prime(payload["prime"], tower)
        k = min_generators(I, desc)
        out = {"ideal": I.to_json(), "prime": desc.to_json(), "min_generators": k}
        summary = [f"mu at {desc} = {k}"]
    else:
        chain = [_ideal(g, tower) for g in payload["chain"]]
        r = validate_trace_chain(chain)
        out = r.to_json()
        summary = ["valid trace chain" if r.valid else f"violation at index {r.first_violation}: {r.reason}"]
        anchors.append("trace chains of ideals")
    return {"op": op, **out, "certificate": EXACT, "anchors": anchors}, summary, False


def cmd_semigroup(cfg, payload, tower):
    gens = cfg.gens if cfg.gens is not None else payload.get("generators")
    if not gens:
        raise SchemaError("semigroup needs --gens or a 'generators' payload")
    s = NumericalSemigroup(gens)
    local = normalization_local(s)
    ov = overmodule_report(s)
    dr = dr_check(s)
    report = {"generators": list(s.generators), "minimal_generators": list(s.minimal_generators),
              "multiplicity": multiplicity(s), "frobenius": frobenius(s), "gaps": sorted(gaps(s)),
              "normalization_local": local, "overmodule": ov.to_json(), "drozd_roiter": dr.to_json(),
              "certificate": EXACT,
              "notes": ["dr1 (mu of the normalization at most 3) follows the external Drozd-Roiter convention"],
              "anchors": ["numerical semigroup rings", "Drozd-Roiter conditions"]}
    summary = [f"S = <{','.join(map(str, s.generators))}>, multiplicity {report['multiplicity']}, frobenius {report['frobenius']}",
               f"overmodule mu = {ov.count}, witnesses {{{', '.join(f't^{j}' for j in ov.witnesses)}}}",
               "Drozd-Roiter: " + ("pass" if dr.passes else "fail " + ", ".join(dr.failing))]
    return report, summary, False


def cmd_genus(cfg, payload, tower):
    op = payload["op"]
    anchors = ["genus of torsion-free modules"]
    caveat = False
    if op == "realizable":
        g = GenusDescriptor.from_json(payload["descriptor"], tower)
        i, ii = realizability_conditions(g)
        out = {"condition_i": i, "condition_ii": ii, "realizable": genus_realizable(g), "descriptor": g.to_json()}
        summary = [f"realizable: {str(out['realizable']).lower()} (i: {i}, ii: {ii})"]
        anchors.append("realizability of a genus by direct sums")
    elif op == "of":
        g = genus_of(_module(payload["module"], tower), cfg.seed)
        out = {"genus": g.to_json()}
        summary = [f"rank {g.rank}, non-free at {len(g.local)} prime(s)"]
    elif op == "compare":
        m, n = _module(payload["m"], tower), _module(payload["n"], tower)
        same = same_genus(m, n, cfg.seed)
        iso = iso_from_genus(m, n, cfg.seed) if same else None
        out = {"same_genus": same, "isomorphic": iso is not None, "certificate": EXACT,
               "isomorphism": iso.to_json() if iso else None}
        summary = [f"same genus: {str(same).lower()}, isomorphic: {str(iso is not None).lower()}"]
        anchors.append("genus determines isomorphism class")
    elif op == "match":
        blocks = match_decompositions([_pair(p, tower) for p in payload["a"]], [_pair(p, tower) for p in payload["b"]], cfg.seed)
        out = {"blocks": [b.to_json() for b in blocks], "certificate": EXACT}
        summary = [f"block {b.a} <-> {b.b}" for b in blocks]
        anchors.append("finite-prefix matching of direct sums")
    else:
        r = coprime_obstruction(payload["r1"], payload["r2"])
        out = r.to_json()
        summary = [f"gcd({r.r1}, {r.r2}) = {r.gcd}; closure fails: {str(r.closure_fails).lower()}"]
        anchors.append("coprime rank obstruction")
    return {"op": op, **out, "anchors": anchors}, summary, caveat


COMMANDS = {
    "psi": cmd_psi, "decompose": cmd_decompose, "iso": cmd_iso, "glue": cmd_glue,
    "ideal": cmd_ideal, "semigroup": cmd_semigroup, "genus": cmd_genus,
}

FLAG_COMMANDS = ("psi", "semigroup")

VALIDATION_ERRORS = (SchemaError, PairError, RingError, NotCoprime, TowerMismatch, UnrepresentableDescriptor,
                     json.JSONDecodeError)


# ------------------------------------------------------------------ driver


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tower", default="builtin:theta7", help="builtin:theta7 or a JSON file with 'min_poly'")
    common.add_argument("--seed", type=int, default=None, help="random seed (default $TFMODLAB_SEED or 0)")
    common.add_argument("--truncation", type=int, default=None, help="x-adic truncation for quotient checks")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--input", default=None, help="payload file, '-' for stdin (default: stdin except for psi and semigroup)")
    parser = argparse.ArgumentParser(prog="tfmodlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tfmodlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("psi", parents=[common], help="build the Psi_t family and its verdicts")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--t", type=lambda s: [x for x in s.split(",") if x.strip()], default=None)
    sub.add_parser("decompose", parents=[common], help="Krull-Schmidt decomposition of a pair")
    sub.add_parser("iso", parents=[common], help="isomorphism test with witness")
    sub.add_parser("glue", parents=[common], help="glue local submodules into a global one")
    sub.add_parser("ideal", parents=[common], help="factor / support / crt / min_gens / trace_chain")
    s = sub.add_parser("semigroup", parents=[common], help="numerical semigroup criteria")
    s.add_argument("--gens", type=_int_list, default=None)
    sub.add_parser("genus", parents=[common], help="genus realizability, comparison and matching")
    return parser


def _read_payload(cfg, stdin):
    if cfg.input and cfg.input != "-":
        with open(cfg.input) as fh:
            text = fh.read()
    elif cfg.input == "-" or cfg.command not in FLAG_COMMANDS:
        text = stdin.read()
    else:
        # flag-driven commands never block on an open stdin
        text = ""
    return json.loads(text) if text.strip() else {}


def _emit(doc, summary, cfg, stdout):
    if cfg.format == "json":
        text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    else:
        head = f"{doc['command']} [{doc['status']}] tower={doc['tower']} seed={doc['seed']}"
        text = "\n".join([head] + list(summary)) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def main(argv=None, stdin=None, stdout=None) -> int:
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    cfg = build_parser().parse_args(argv)
    if cfg.seed is None:
        env = os.environ.get("TFMODLAB_SEED", "0")
        try:
            cfg.seed = int(env)
        except ValueError:
            cfg.seed = None
    base = {"schema": REPORT_SCHEMA, "command": cfg.command, "tower": cfg.tower, "seed": cfg.seed}
    try:
        if cfg.seed is None:
            raise SchemaError("TFMODLAB_SEED must be an integer")
        if cfg.truncation is not None and cfg.truncation < 1:
            raise SchemaError("--truncation must be a positive integer")
        tower = load_tower(cfg.tower)
        base["tower"] = tower.name
        payload = _read_payload(cfg, stdin)
        validate_payload(cfg.command, payload)
        report, summary, caveat = COMMANDS[cfg.command](cfg, payload, tower)
    except UncertifiedFactors as exc:
        doc = {**base, "status": "uncertified", "error": {"kind": "UncertifiedFactors", "cause": type(exc).__name__, "message": str(exc)}}
        _emit(doc, [f"error: {exc}"], cfg, stdout)
        return 3
    except VALIDATION_ERRORS as exc:
        doc = {**base, "status": "invalid", "error": {"kind": "SchemaError", "cause": type(exc).__name__, "message": str(exc)}}
        _emit(doc, [f"error: {type(exc).__name__}: {exc}"], cfg, stdout)
        return 2
    except (ArithmeticError, AssertionError, RuntimeError) as exc:
        doc = {**base, "status": "failed", "error": {"kind": "ComputeError", "cause": type(exc).__name__, "message": str(exc)}}
        _emit(doc, [f"error: {type(exc).__name__}: {exc}"], cfg, stdout)
        return 3
    doc = {**base, "status": "uncertified" if caveat else "ok", "report": report}
    if caveat:
        doc["caveats"] = ["at least one verdict is only ProbablyLocal"]
    _emit(doc, summary, cfg, stdout)
    return 3 if caveat else 0


if __name__ == "__main__":
    sys.exit(main())
