"""Command-line entry point: ``raagkit <command> ...``.

Exit codes: 0 everything passed, 1 a verification failed (or the graph is
not of the requested kind), 2 the input could not be used.
"""
from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass

from . import atlas, austere, focused_out, matalg
from .errors import CapabilityError, InputError, RaagkitError, VerificationError
from .graph import SimplicialGraph, classify_focused, is_austere, load_graph
from .words import GroupWord, normal_form

DEFAULT_SEED = 20240601
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    graph_path: str | None = None
    bound: int = 2
    word_len: int = 4
    t_max: int = 10
    max_n: int = 6
    output_path: str | None = None
    seed: int = DEFAULT_SEED
    inject_fault: str | None = None

    def __post_init__(self):
        for name in ("bound", "word_len", "t_max", "max_n"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name.replace('_', '-')} must be positive")

    def header(self) -> str:
        return (f"# raagkit {self.command} seed={self.seed} bound={self.bound} "
                f"word-len={self.word_len} t-max={self.t_max}")


# ---------------------------------------------------------------------------
# classify

def classify_lines(g: SimplicialGraph) -> tuple[list[str], bool, bool]:
    lines = []
    d = classify_focused(g)
    if d:
        lines.append(f"focused: l={d.l} m={d.m} k={d.k} rank={d.rank}")
        lines.append(f"  focus={d.c} L={' '.join(d.L) or '-'} S={' '.join(d.S) or '-'}")
        for j, P in enumerate(d.Q, 1):
            lines.append(f"  P{j} = {{{', '.join(g.sort_vertices(P))}}}")
        lines.append(f"  trivial-aut={'yes' if d.trivial_aut else 'no'}")
        lines += [f"  note: {n}" for n in d.notes]
    else:
        lines.append(str(d))
    a = is_austere(g)
    if a:
        lines.append(f"austere: maxDegree={a.maxDegree} diameter={a.diameter}")
    else:
        lines.append(str(a))
    return lines, bool(d), bool(a)


# ---------------------------------------------------------------------------
# verify

def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def verify_focused(d, cfg: RunConfig) -> list[str]:
    if cfg.inject_fault == "relation11":
        raise InputError("fault relation11 applies to austere graphs only")
    if cfg.inject_fault == "witness" and d.k < 3:
        raise InputError("fault witness needs k >= 3")
    strict = d.trivial_aut
    lines = []
    if not strict:
        lines.append("NOTE graph has nontrivial automorphisms; checking the PCT-level statements only")
    M = focused_out.model(d)
    alpha_override = None
    if cfg.inject_fault == "relation5":
        if d.l < 1:
            raise InputError("fault relation5 needs a non-adjacent dominated vertex (l >= 1)")
        alpha_override = {v: M.alpha_closed_form(v) for v in d.graph.vertices}
        alpha_override[d.x(1)] = matalg.IntMatrix.identity(M.basis.dim)
    rel = focused_out.verify_inversion_relations(d, alpha=alpha_override, strict=strict)
    lines += rel.lines()
    lines.append(f"RANK {focused_out.out_rank(d)}")
    img = focused_out.alpha_image(d, strict=strict)
    lines.append(f"ALPHA_ORDER {img.order}")
    expected = focused_out.expected_alpha_order(d)
    lines.append(f"ALPHA_ORDER_CHECK {_status(img.order == expected)} expected={expected} "
                 f"2^n={2 ** d.graph.n}")
    gens = list(img.generators.values())
    desc = matalg.build_centralizer(M.basis, gens)
    lines.append(f"CENTRALIZER {desc.structure} generators={len(desc.generators)}")
    try:
        bf = matalg.centralizer_bruteforce(gens, cfg.bound)
        ball = desc.ball(cfg.bound)
        lines.append(f"CENTRALIZER_ORACLE {_status(set(bf) == ball)} bound={cfg.bound} "
                     f"brute={len(bf)} ball={len(ball)}")
    except CapabilityError as exc:
        lines.append(f"CENTRALIZER_ORACLE SKIP {exc}")
    inner_ok = all(matalg.is_alpha_inner(A, img) for A in img.elements)
    infinite = [G for G in desc.lattice_generators if matalg.has_infinite_order(G)]
    outer_ok = not any(matalg.is_alpha_inner(G, img) for G in infinite)
    lines.append(f"INNER_CHECK {_status(inner_ok and outer_ok)} alpha={len(img.elements)} "
                 f"infinite_generators={len(infinite)}")
    if d.k >= 3:
        shear = None
        if cfg.inject_fault == "witness":
            shear = desc.finite_generators[0] if desc.finite_generators else None
        lines += matalg.cbar_infinite_witness(M.basis, img, cfg.t_max, matrix=shear).lines()
    else:
        lines.append("CBAR_WITNESS SKIP k < 3")
    # pct inner test against the bounded conjugator search on seeded samples
    rng = random.Random(cfg.seed)
    search = focused_out.ConjugatorSearch(d.graph, cfg.word_len)
    samples = [tuple(0 for _ in range(M.basis.dim))]
    samples += [tuple(rng.randint(-2, 2) for _ in range(M.basis.dim)) for _ in range(8)]
    agree = 0
    for w in samples:
        vec = focused_out.ExponentVector(w, M.basis)
        f = M.realize(vec)
        back = M.exponent_vector(f)
        found = search.search(f) is not None
        agree += back == vec and found == focused_out.pct_inner_test(vec)
    lines.append(f"PCT_INNER {_status(agree == len(samples))} samples={len(samples)} "
                 f"word-len={cfg.word_len}")
    return lines


def verify_austere(g, cfg: RunConfig) -> list[str]:
    model = austere.AustereModel(g)
    if cfg.inject_fault in ("relation5", "witness"):
        raise InputError(f"fault {cfg.inject_fault} applies to focused graphs only")
    if cfg.inject_fault == "relation11":
        model.act = lambda bits, letters: letters
        rep = austere.verify_presentation(g, model)
        return rep.lines()
    lines, _ = austere.report_lines(g)
    return lines


def verify_lines(g: SimplicialGraph, cfg: RunConfig) -> list[str]:
    # austere graphs are also focused (l = m = 0, k = 1); the austere checks say more
    a = is_austere(g)
    if a and g.n > 1:
        return [f"CLASS austere n={g.n}"] + verify_austere(g, cfg)
    d = classify_focused(g)
    if d:
        return [f"CLASS focused l={d.l} m={d.m} k={d.k}"] + verify_focused(d, cfg)
    return ["CLASS other", f"UNVERIFIABLE FAIL {d}; {a}"]


def lines_ok(lines: list[str]) -> bool:
    return not any(" FAIL" in line for line in lines)


# ---------------------------------------------------------------------------
# centralizer

def centralizer_lines(l: int, m: int, k: int, bound: int) -> list[str]:
    basis = focused_out.PCTBasis(l, m, k)
    gens = focused_out.closed_form_generators(basis)
    desc = matalg.build_centralizer(basis, gens)
    lines = [f"SHAPE l={l} m={m} k={k} dim={basis.dim}",
             f"STRUCTURE {desc.structure}"]
    for name in ("lambda_part", "sign_part", "diag_part", "gl_part", "coupling_part"):
        for G in getattr(desc, name):
            lines.append(f"GEN {name} {G}")
    bf = matalg.centralizer_bruteforce(gens, bound)
    lines.append(f"BRUTE_FORCE {len(bf)} bound={bound}")
    lines += [f"  {M}" for M in bf]
    ball = desc.ball(bound)
    lines.append(f"BALL_MATCH {_status(set(bf) == ball)} ball={len(ball)}")
    return lines


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="raagkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify a graph as focused / austere")
    c.add_argument("file")
    c.add_argument("--as", dest="want", choices=["any", "focused", "austere"], default="any")

    v = sub.add_parser("verify", help="run every check that applies to a graph")
    v.add_argument("file")
    v.add_argument("--bound", type=int, default=2)
    v.add_argument("--word-len", type=int, default=4)
    v.add_argument("--t-max", type=int, default=10)
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--inject-fault", choices=["relation5", "relation11", "witness"],
                   help="corrupt one closed form to exercise the failure path")

    n = sub.add_parser("nf", help="normal form of a word")
    n.add_argument("file")
    n.add_argument("word")

    a = sub.add_parser("atlas", help="enumerate connected graphs up to isomorphism")
    a.add_argument("--max-n", type=int, default=6)
    a.add_argument("--out")

    z = sub.add_parser("centralizer", help="centralizer of the inversion action for a shape")
    z.add_argument("--l", type=int, required=True)
    z.add_argument("--m", type=int)
    z.add_argument("--k", type=int)
    z.add_argument("--bound", type=int, default=2)

    r = sub.add_parser("report", help="verify every focused and austere graph of a catalog")
    r.add_argument("catalog")
    r.add_argument("--bound", type=int, default=2)
    r.add_argument("--word-len", type=int, default=4)
    r.add_argument("--t-max", type=int, default=10)
    r.add_argument("--seed", type=int, default=DEFAULT_SEED)
    r.add_argument("--out")
    return p


def _emit(lines: list[str], out_path: str | None = None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(args) -> int:
    cmd = args.command
    if cmd == "classify":
        g = load_graph(args.file)
        lines, focused, aust = classify_lines(g)
        _emit(lines)
        ok = {"any": focused or aust, "focused": focused, "austere": aust}[args.want]
        return EXIT_OK if ok else EXIT_FAIL
    if cmd == "verify":
        cfg = RunConfig("verify", args.file, args.bound, args.word_len, args.t_max,
                        seed=args.seed, inject_fault=args.inject_fault)
        g = load_graph(args.file)
        lines = [cfg.header(), f"# graph {g.name} n={g.n}"] + verify_lines(g, cfg)
        _emit(lines)
        return EXIT_OK if lines_ok(lines) else EXIT_FAIL
    if cmd == "nf":
        g = load_graph(args.file)
        _emit([str(normal_form(GroupWord.parse(g, args.word)))])
        return EXIT_OK
    if cmd == "atlas":
        cfg = RunConfig("atlas", max_n=args.max_n, output_path=args.out)
        c = atlas.enumerate_catalog(cfg.max_n)
        if args.out:
            atlas.save_catalog(c, args.out)
            summary = [f"{n}: " + " ".join(f"{k}={v}" for k, v in row.items())
                       for n, row in sorted(c.counts().items())]
            _emit([f"wrote {len(c.records)} records to {args.out}"] + summary)
        else:
            sys.stdout.write(atlas.format_catalog(c))
        return EXIT_OK
    if cmd == "centralizer":
        l = args.l
        m = l if args.m is None else args.m
        k = l + 1 if args.k is None else args.k
        RunConfig("centralizer", bound=args.bound)
        lines = centralizer_lines(l, m, k, args.bound)
        _emit(lines)
        return EXIT_OK if lines_ok(lines) else EXIT_FAIL
    if cmd == "report":
        cfg = RunConfig("report", args.catalog, args.bound, args.word_len, args.t_max,
                        seed=args.seed)
        c = atlas.load_catalog(args.catalog)
        lines = [cfg.header(), f"# catalog maxN={c.maxN} records={len(c.records)}"]
        ok = True
        for rec in c.records:
            if rec.cls == "other":
                continue
            body = verify_lines(rec.graph, cfg)
            ok &= lines_ok(body)
            lines.append(f"== {rec.line()}")
            lines += body
        lines.append(f"SUMMARY {_status(ok)}")
        _emit(lines, args.out)
        return EXIT_OK if ok else EXIT_FAIL
    raise InputError(f"unknown command {cmd}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return run(args)
    except (InputError, CapabilityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except RaagkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
