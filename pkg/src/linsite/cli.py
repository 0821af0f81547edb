"""Command-line front end: ``linsite [options] COMMAND ARGS...``.

Exit status is 0 when every check passes, 1 on a falsification finding and 2
on malformed input.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from .topology import TopologyError, check_topology, is_subcanonical
from .workspace import Workspace, WorkspaceError, builtin_workspace, parse_file

PASS, FAIL, INPUT = 0, 1, 2


@dataclass
class Result:
    command: str
    subject: str
    fields: list = field(default_factory=list)
    findings: list = field(default_factory=list)

    @property
    def status(self) -> int:
        return FAIL if self.findings else PASS

    def add(self, key, value):
        self.fields.append((key, _fmt(value)))
        return self

    def human(self) -> str:
        head = f"{self.command} {self.subject}: {'pass' if self.status == PASS else 'FAIL'}"
        body = [f"  {k}: {v}" for k, v in self.fields] + [f"  finding: {w}" for w in self.findings]
        return "\n".join([head] + body) + "\n"

    def block(self) -> str:
        lines = [f"result {self.command}", f"  subject = {self.subject}",
                 f"  status = {'pass' if self.status == PASS else 'fail'}"]
        lines += [f"  {k} = {v}" for k, v in self.fields]
        lines += [f"  finding.{i} = {w}" for i, w in enumerate(self.findings)]
        return "\n".join(lines + ["end"]) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, dict):
        return " ".join(f"{k}:{_fmt(x)}" for k, x in v.items())
    if isinstance(v, np.ndarray):
        return " ".join(str(int(x)) for x in v.ravel())
    return str(v).replace("\n", " ")


# --- commands ----------------------------------------------------------------------

def cmd_check_site(ws: Workspace, opts, name):
    site = ws.site(name)
    res = Result("check-site", name)
    rep = check_topology(site.topology)
    res.add("objects", len(site.cat.objects))
    res.add("covering_sieves", {x: len(site.covering(x)) for x in site.cat.objects})
    res.add("topology", rep.ok)
    res.findings += rep.violations
    if rep.ok:
        ok, wit = is_subcanonical(site)
        res.add("subcanonical", ok if ok else f"false (h_{wit[0]} is not a sheaf)")
    return res


def cmd_check_morphism(ws, opts, name):
    from .sitemorph import verify_lc_equivalence_criterion

    m = ws.morphism(name)
    res = Result("check-morphism", name)
    for k, v in m.report.fields().items():
        res.add(k, v)
    crit = verify_lc_equivalence_criterion(m.functor, m.source, m.target)
    if crit["applicable"]:
        res.add("LC_iff_continuous_and_cocontinuous", crit["agree"])
        if not crit["agree"]:
            res.findings.append("LC verdict disagrees with continuity and cocontinuity")
    if not m.report.LC:
        res.findings.append("morphism is not LC")
    return res


def cmd_sheafify(ws, opts, name):
    from .sheafify import is_local_iso, is_sheaf, sheafify

    e = ws.get(name, ("presheaf",))
    site = ws.checked_site(e.refs["site"])
    f = e.obj
    sh = sheafify(f, site)
    res = Result("sheafify", name)
    res.add("site", site.name).add("input_dims", f.dims).add("sheaf_dims", sh.sheaf.dims)
    ok, wit = is_sheaf(sh.sheaf, site)
    res.add("is_sheaf", ok)
    if not ok:
        res.findings.append(f"output fails the sheaf condition at {wit[0]}")
    local = is_local_iso(sh.unit, site)
    res.add("unit_local_iso", local)
    if not local:
        res.findings.append("unit is not a local isomorphism")
    was, _ = is_sheaf(f, site)
    res.add("input_is_sheaf", was)
    return res


def cmd_roof(ws, opts, name):
    from .rooffrac import roof_decompose

    spec = ws.spec(name)
    roof = roof_decompose(spec, n=opts.probes, seed=opts.seed)
    res = Result("roof", name)
    res.add("apex", " ".join(roof.apex.cat.objects))
    for k, v in roof.checks.items():
        res.add(k, v)
    res.findings += roof.failures
    return res


def cmd_certify(ws, opts, name):
    from .sitemorph import certify_equivalence, verify_upper_matches_pushforward

    m = ws.morphism(name)
    res = Result("certify", name)
    cert = certify_equivalence(m, n=opts.probes, seed=opts.seed)
    res.add("LC", m.report.LC).add("units", cert.units).add("counits", cert.counits)
    res.findings += cert.failures
    if m.report.LC:
        cmp = verify_upper_matches_pushforward(m, n=opts.probes, seed=opts.seed)
        res.add("lower_upper_comparisons", cmp.checked)
        res.findings += cmp.failures
    return res


def cmd_lf3(ws, opts, f, w):
    from .rooffrac import lf3_complete_square

    sq = lf3_complete_square(ws.morphism(f), ws.morphism(w))
    res = Result("lf3", f"{f} {w}")
    res.add("apex", " ".join(sq.site.cat.objects)).add("v_LC", sq.v.report.LC)
    if sq.alpha is not None:
        res.add("alpha", {c: sq.alpha[c] for c in sq.alpha.source.source.objects})
        res.add("alpha_invertible", sq.alpha.is_invertible())
    res.findings += sq.failures
    return res


def _lf4(ws, f, g, w, alpha):
    from .rooffrac import lf4_construct

    return lf4_construct(ws.morphism(f), ws.morphism(g), ws.morphism(w), ws.nattrans(alpha))


def cmd_lf4(ws, opts, f, g, w, alpha):
    r = _lf4(ws, f, g, w, alpha)
    res = Result("lf4", f"{f} {g} {w} {alpha}")
    res.add("apex", " ".join(r.site.cat.objects)).add("v_LC", r.v.report.LC)
    if r.beta is not None:
        res.add("beta", {b: r.beta[b] for b in r.f.source.cat.objects})
        res.add("v_alpha_equals_beta_w", not any("!=" in x for x in r.failures))
    res.findings += r.failures
    return res


def _twist_for(r):
    """First non-identity automorphism at each ``v(A)`` (identity where none exists)."""
    cat = r.site.cat
    theta = {}
    for a in r.v.source.cat.objects:
        x = r.v(a)
        theta[a] = cat.ident[x]
        for e in cat.hom_elements(x, x):
            if not np.array_equal(e, cat.ident[x]) and cat.is_iso(e, x, x) is not None:
                theta[a] = e
                break
    return theta


def cmd_lf4_compare(ws, opts, f, g, w, alpha):
    from .rooffrac import lf4_compare, twist_lf4

    r = _lf4(ws, f, g, w, alpha)
    res = Result("lf4-compare", f"{f} {g} {w} {alpha}")
    res.findings += r.failures
    if r.beta is None:
        return res
    for label, other in (("self", r), ("twisted", twist_lf4(r, _twist_for(r)))):
        c = lf4_compare(r, other)
        res.add(f"{label}.apex_objects", len(c.site.cat.objects)).add(f"{label}.commutes", c.commutes)
        res.findings += [f"{label}: {x}" for x in c.failures]
    return res


def cmd_lf5(ws, opts, v, w, alpha):
    from .rooffrac import lf5_transfer

    rep, failures = lf5_transfer(ws.morphism(v), ws.morphism(w), ws.nattrans(alpha))
    res = Result("lf5", f"{v} {w} {alpha}")
    for k, x in rep.fields().items():
        res.add(k, x)
    res.findings += failures
    return res


def cmd_b2(ws, opts, name):
    from .rooffrac import b2_decompose_equivalence

    r = b2_decompose_equivalence(ws.spec(name), n=opts.probes, seed=opts.seed)
    res = Result("b2", name)
    for k in ("w1_LC", "w2_LC"):
        if k in r.data:
            res.add(k, r.data[k])
    res.findings += r.failures
    return res


def cmd_b4(ws, opts, f1, f2, g1, g2):
    from .rooffrac import b4_separate

    r = b4_separate(ws.morphism(f1), ws.morphism(f2), ws.nattrans(g1), ws.nattrans(g2), n=opts.probes, seed=opts.seed)
    res = Result("b4", f"{f1} {f2} {g1} {g2}")
    res.add("distinct_inputs", r.data["distinct"]).add("w_LC", r.data["w"].report.LC)
    res.add("w_gamma1_equals_w_gamma2", not any("!=" in x for x in r.failures))
    res.findings += r.failures
    return res


def cmd_b5(ws, opts, f1, f2, gamma):
    from .rooffrac import b5_lift
    from .sitemorph import TwoCell

    m1, m2, g = ws.morphism(f1), ws.morphism(f2), ws.nattrans(gamma)
    cell = TwoCell(m1, m2, g)
    r = b5_lift(m1, m2, cell.upper, n=opts.probes, seed=opts.seed, gamma=g)
    res = Result("b5", f"{f1} {f2} {gamma}")
    res.add("probes_checked", r.data.get("checked", 0))
    if "beta" in r.data:
        res.add("beta", {a: r.data["beta"][a] for a in m1.source.cat.objects})
    res.findings += r.failures
    return res


def cmd_selftest(ws, opts, *args):
    from . import selftest

    corrupt = opts.corrupt
    res = Result("selftest", corrupt or "fixtures")
    for name, ok, detail in selftest.run(corrupt=corrupt, n=min(opts.probes, 4), seed=opts.seed):
        res.add(name, ok)
        if not ok:
            res.findings.append(f"{name}: {detail}")
    return res


COMMANDS = {
    "check-site": (cmd_check_site, ["SITE"]),
    "check-morphism": (cmd_check_morphism, ["FUNCTOR"]),
    "sheafify": (cmd_sheafify, ["PRESHEAF"]),
    "roof": (cmd_roof, ["SPEC"]),
    "certify": (cmd_certify, ["FUNCTOR"]),
    "lf3": (cmd_lf3, ["F", "W"]),
    "lf4": (cmd_lf4, ["F", "G", "W", "ALPHA"]),
    "lf4-compare": (cmd_lf4_compare, ["F", "G", "W", "ALPHA"]),
    "lf5": (cmd_lf5, ["V", "W", "ALPHA"]),
    "b2": (cmd_b2, ["SPEC"]),
    "b4": (cmd_b4, ["F1", "F2", "GAMMA1", "GAMMA2"]),
    "b5": (cmd_b5, ["F1", "F2", "GAMMA"]),
    "selftest": (cmd_selftest, []),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="linsite", description="Checks and constructions on finite linear sites.")
    ap.add_argument("-w", "--workspace", action="append", default=[],
                    help="workspace file (repeatable); defaults to the built-in fixtures")
    ap.add_argument("--seed", type=int, default=0, help="seed for random probes (default 0)")
    ap.add_argument("--probes", type=int, default=20, help="number of random probe sheaves (default 20)")
    ap.add_argument("--format", choices=("human", "block"), default="human")
    ap.add_argument("--corrupt", default=None, help="selftest only: corrupt one fixture axiom")
    ap.add_argument("command", help="one of: " + ", ".join(COMMANDS))
    ap.add_argument("args", nargs="*")
    return ap


def _load(paths) -> Workspace:
    if not paths:
        return builtin_workspace()
    ws = None
    for p in paths:
        sub = parse_file(p)
        if ws is None:
            ws = sub
        else:
            for e in sub:
                ws._add(e)
    return ws


def main(argv=None) -> int:
    ap = build_parser()
    try:
        opts = ap.parse_args(argv)
    except SystemExit as exc:
        return INPUT if exc.code else PASS
    out, err = sys.stdout, sys.stderr
    if opts.command not in COMMANDS:
        err.write(f"linsite: unknown command {opts.command!r}\n")
        return INPUT
    fn, params = COMMANDS[opts.command]
    if opts.command != "selftest" and len(opts.args) != len(params):
        err.write(f"linsite: {opts.command} expects {' '.join(params) or 'no arguments'}\n")
        return INPUT
    if opts.corrupt is not None and opts.command != "selftest":
        err.write("linsite: --corrupt applies to selftest only\n")
        return INPUT
    if opts.probes < 0:
        err.write("linsite: --probes must be non-negative\n")
        return INPUT
    try:
        ws = _load(opts.workspace)
        res = fn(ws, opts, *opts.args)
    except WorkspaceError as exc:
        err.write(f"linsite: input error: {exc}\n")
        return INPUT
    except TopologyError as exc:
        # a named site failing its axioms is a finding, not malformed input
        res = Result(opts.command, " ".join(opts.args), findings=[str(exc)])
    except ValueError as exc:
        err.write(f"linsite: precondition not met: {exc}\n")
        return INPUT
    out.write(res.human() if opts.format == "human" else res.block())
    return res.status


if __name__ == "__main__":
    sys.exit(main())
