"""Command-line driver.

Every command builds a :class:`RunConfig`, calls :func:`run`, and writes the
resulting document as JSON (default) or CSV to stdout or ``--output``.
Exit status: 0 when everything holds, 2 when a checked invariant or bound
is violated, 1 on usage, input or domain errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import bounds, ergodic, operators, spectral, verify
from .operators import OperatorSpec, OpKind
from .reporting import (
    SequenceFormatError,
    load_sequence,
    matrix_rows,
    rows_to_csv,
    sequence_rows,
    sequence_to_json_value,
    to_json,
)
from .sequence import (
    INF,
    LadderSpec,
    Mode,
    Sequence,
    SpaceSpec,
    ladder_norms,
    majorant,
    norm,
    ratio_beta,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATED = 2

COMMANDS = (
    "apply",
    "inverse",
    "resolvent",
    "solve-range",
    "matrix",
    "eigvec",
    "dual-eigvec",
    "c1-dual-eigvec",
    "spectrum",
    "identity",
    "ergodic",
    "bounds",
    "norms",
    "verify",
)


class UsageError(Exception):
    """Bad flags, unreadable input or a request outside an operation's domain."""


@dataclass
class RunConfig:
    command: str
    t: str = "1/2"
    N: int = 256
    m: int = 0
    index: int = 0
    p: str = "2"
    nu: str = "2"
    z: str = "2"
    alpha: str = "1"
    op: str = "Ct"
    method: str = "substitution"
    space: str = "sup"
    ladder_direction: str = "plus"
    ladder_family: str = "lp"
    ladder_count: int = 8
    window: int = 0
    cap: Optional[int] = None
    max_n: int = 30
    steps: int = 60
    trials: int = 20
    seed: Optional[int] = 42
    mode: str = "float"
    format: str = "json"
    input: Optional[str] = None
    basis: int = 0
    output: Optional[str] = None
    dump_matrix: Optional[str] = None
    suite: str = "all"
    tables: dict = field(default_factory=dict, repr=False)


# --- scalar parsing ---------------------------------------------------------

def parse_real(text: str, mode: Mode):
    """``"num/den"``, integer or decimal; exact mode keeps the rational it spells."""
    s = str(text).strip().lower()
    if s in ("inf", "infinity"):
        if mode is Mode.EXACT:
            raise UsageError("infinity is not a rational scalar")
        return INF
    try:
        q = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None
    return q if mode is Mode.EXACT else float(q)


def parse_complex(text: str, mode: Mode):
    """``"re,im"`` or a plain real."""
    parts = str(text).split(",")
    if len(parts) == 1:
        return parse_real(parts[0], mode)
    if len(parts) != 2:
        raise UsageError(f"complex scalars are written 're,im', got {text!r}")
    re, im = parse_real(parts[0], mode), parse_real(parts[1], mode)
    if mode is Mode.EXACT:
        if im != 0:
            raise UsageError("exact mode supports real scalars only")
        return re
    return complex(re, im)


def _exponent(text: str) -> float:
    p = parse_real(text, Mode.FLOAT)
    if not p >= 1:
        raise UsageError(f"exponent p must be >= 1, got {text!r}")
    return p


# --- per-command runners ----------------------------------------------------

def _mode(cfg: RunConfig) -> Mode:
    return Mode(cfg.mode)


def _t(cfg: RunConfig, upper_open: bool = False):
    t = parse_real(cfg.t, _mode(cfg))
    if not 0 <= t <= 1 or (upper_open and t == 1):
        raise UsageError(f"t must lie in [0, 1{')' if upper_open else ']'}, got {cfg.t}")
    return t


def _input(cfg: RunConfig) -> Sequence:
    mode = _mode(cfg)
    if cfg.input:
        try:
            return load_sequence(cfg.input, mode)
        except OSError as exc:
            raise UsageError(f"cannot read {cfg.input}: {exc.strerror}") from None
        except SequenceFormatError as exc:
            raise UsageError(f"malformed sequence file {cfg.input}: {exc}") from None
    if not 0 <= cfg.basis < cfg.N:
        raise UsageError(f"basis index {cfg.basis} outside truncation N={cfg.N}")
    return Sequence.basis(cfg.basis, cfg.N, mode)


def _seq_doc(cfg, x: Sequence, extra: dict):
    cfg.tables["sequence"] = sequence_rows(x)
    return {**extra, "N": len(x), "mode": x.mode.value, "sequence": sequence_to_json_value(x)}


def _sup(x: Sequence):
    return norm(x, SpaceSpec.lp(INF))


def _run_apply(cfg):
    t = _t(cfg)
    kind = OpKind(cfg.op)
    try:
        op = OperatorSpec(kind, t=t, m=cfg.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    x = _input(cfg)
    y = operators.apply(op, x)
    return EXIT_OK, _seq_doc(cfg, y, {"operator": kind.value, "t": t, "m": cfg.m})


def _run_inverse(cfg):
    t = _t(cfg)
    y = _input(cfg)
    x = operators.apply_inverse_Ct(y, t)
    back = operators.apply(OperatorSpec.cesaro(t), x)
    scale = _sup(y)
    res = _sup(back - y)
    res = res / scale if scale else res
    tol = 0 if y.exact else 1e-12
    status = EXIT_OK if res <= tol else EXIT_VIOLATED
    return status, _seq_doc(cfg, x, {"t": t, "roundtrip_residual": res, "tolerance": tol})


def _run_resolvent(cfg):
    t = _t(cfg, upper_open=True)
    nu = parse_complex(cfg.nu, _mode(cfg))
    y = _input(cfg)
    try:
        x = operators.apply_resolvent(y, t, nu, method=cfg.method)
    except operators.SingularResolventError as exc:
        raise UsageError(str(exc)) from None
    res = operators.resolvent_residual(x, y, t, nu)
    tol = 0 if y.exact else 1e-10
    status = EXIT_OK if res <= tol else EXIT_VIOLATED
    return status, _seq_doc(cfg, x, {"t": t, "nu": nu, "method": cfg.method, "residual": res, "tolerance": tol})


def _run_solve_range(cfg):
    t = _t(cfg, upper_open=True)
    y = _input(cfg)
    try:
        w = operators.solve_I_minus_Ct(y, t)
    except operators.NotInRangeError as exc:
        raise UsageError(str(exc)) from None
    back = w - operators.apply(OperatorSpec.cesaro(t), w)
    scale = _sup(y)
    res = _sup(back - y)
    res = res / scale if scale else res
    tol = 0 if y.exact else 1e-10
    status = EXIT_OK if res <= tol else EXIT_VIOLATED
    return status, _seq_doc(cfg, w, {"t": t, "residual": res, "tolerance": tol})


def _run_matrix(cfg):
    t = _t(cfg)
    mat = operators.materialize(t, cfg.N, _mode(cfg))
    rows = matrix_rows(mat)
    if cfg.dump_matrix:
        _write(cfg.dump_matrix, rows_to_csv([], rows))
    cfg.tables["matrix"] = ([], rows)
    return EXIT_OK, {"t": t, "N": cfg.N, "mode": cfg.mode, "rows": rows}


def _run_eigvec(cfg):
    t = _t(cfg)
    mode = _mode(cfg)
    alpha = parse_complex(cfg.alpha, mode)
    if cfg.N <= cfg.m:
        raise UsageError(f"truncation N={cfg.N} must exceed m={cfg.m}")
    if alpha == 0:
        raise UsageError("alpha must be nonzero")
    pair = spectral.eigenpair(cfg.m, t, cfg.N, alpha, mode)
    res = spectral.eigen_residual(pair.vector, t, pair.lam)
    tol = 0 if mode is Mode.EXACT else 1e-12
    status = EXIT_OK if res <= tol else EXIT_VIOLATED
    return status, _seq_doc(cfg, pair.vector, {
        "t": t, "m": cfg.m, "alpha": alpha, "lambda": pair.lam, "residual": res, "tolerance": tol,
        "label": "omega-only" if t == 1 else "d1",
    })


def _run_dual_eigvec(cfg):
    t = _t(cfg, upper_open=True)
    mode = _mode(cfg)
    n = cfg.index
    if n < 0:
        raise UsageError("index must be nonnegative")
    z = spectral.dual_eigvec_z(n, t, None, mode)
    lam = Fraction(1, n + 1) if mode is Mode.EXACT else 1.0 / (n + 1)
    image = operators.apply(OperatorSpec.dual(t), z)
    res = _sup(image - z.scale(lam)) / _sup(z)
    tol = 0 if mode is Mode.EXACT else 1e-12
    status = EXIT_OK if res <= tol else EXIT_VIOLATED
    return status, _seq_doc(cfg, z, {"t": t, "n": n, "lambda": lam, "residual": res, "tolerance": tol})


def _run_c1_dual_eigvec(cfg):
    mode = _mode(cfg)
    z = parse_complex(cfg.z, mode)
    if z == 0:
        raise UsageError("z must be nonzero")
    x = spectral.c1_dual_eigvec(z, cfg.N, mode)
    p = _exponent(cfg.p)
    p_conj = INF if p == 1 else p / (p - 1) if p < INF else 1.0
    extra = {"z": z, "p": p, "p_conj": p_conj}
    if cfg.N >= 4:
        extra["residual_first_half"] = spectral.c1_dual_residual(x, z)
        if p_conj < INF:
            extra["decay"] = spectral.c1_dual_decay(x, p_conj, z)
    return EXIT_OK, _seq_doc(cfg, x, extra)


def _run_spectrum(cfg):
    t = _t(cfg)
    mode = _mode(cfg)
    if cfg.N < 2:
        raise UsageError("spectrum needs N >= 2")
    rep = spectral.verify_spectrum(t, cfg.N, mode, cfg.cap)
    tol = 0 if mode is Mode.EXACT else 1e-12
    ok = rep.max_residual <= tol and rep.diagonal_matches
    cfg.tables["spectrum"] = (["m", "lambda", "residual"],
                              [(m, rep.eigenvalues[m], r) for m, r in enumerate(rep.residuals)])
    return (EXIT_OK if ok else EXIT_VIOLATED), {**rep.as_dict(), "tolerance": tol}


def _run_identity(cfg):
    if cfg.max_n < 0:
        raise UsageError("max-n must be nonnegative")
    verdicts = [spectral.binom_identity_check(n) for n in range(cfg.max_n + 1)]
    cfg.tables["identity"] = (["n", "holds"], list(enumerate(verdicts)))
    status = EXIT_OK if all(verdicts) else EXIT_VIOLATED
    return status, {"max_n": cfg.max_n, "verdicts": verdicts, "all_hold": all(verdicts)}


def _space(cfg) -> SpaceSpec:
    kind = cfg.space
    try:
        if kind == "sup":
            return SpaceSpec.lp(INF)
        if kind == "lp":
            return SpaceSpec.lp(_exponent(cfg.p))
        if kind == "ces":
            return SpaceSpec.ces(_exponent(cfg.p))
        if kind == "dp":
            return SpaceSpec.dp(_exponent(cfg.p))
        if kind == "omega":
            return SpaceSpec.omega(cfg.index)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    raise UsageError(f"unknown space {kind!r}")


def _run_ergodic(cfg):
    t = _t(cfg)
    if cfg.steps < 1:
        raise UsageError("steps must be positive")
    x = _input(cfg)
    space = _space(cfg)
    tr = ergodic.ergodic_report(x, t, cfg.steps, space)
    header = ["n", "norm", "mean_norm"] if tr.raw else ["n", "iterate_error", "mean_error"]
    cfg.tables["trace"] = (header, list(zip(tr.steps, tr.iterate_errors, tr.mean_errors)))
    ok = tr.raw or tr.power_bounded
    return (EXIT_OK if ok else EXIT_VIOLATED), tr.as_dict()


def _run_bounds(cfg):
    t = _t(cfg, upper_open=True)
    p = _exponent(cfg.p)
    if not 1 < p < INF:
        raise UsageError("bounds needs 1 < p < inf")
    if cfg.trials < 1:
        raise UsageError("trials must be positive")
    if cfg.seed is None:
        raise UsageError("a seed is required when trials > 0")
    reports = bounds.bound_suite(float(t), p, cfg.N, cfg.trials, cfg.seed)
    docs = [r.as_dict() for r in reports]
    cfg.tables["bounds"] = (list(docs[0]), [list(d.values()) for d in docs])
    bad = any(r.verdict is bounds.Verdict.VIOLATED for r in reports)
    return (EXIT_VIOLATED if bad else EXIT_OK), {"reports": docs}


def _run_norms(cfg):
    x = _input(cfg)
    p = _exponent(cfg.p)
    doc = {"N": len(x), "p": p, "lp": norm(x, SpaceSpec.lp(p))}
    if p < INF:
        doc["ces"] = norm(x, SpaceSpec.ces(p))
        doc["dp"] = norm(x, SpaceSpec.dp(p))
    if not 0 <= cfg.index < len(x):
        raise UsageError(f"seminorm index {cfg.index} outside truncation")
    doc["omega"] = norm(x, SpaceSpec.omega(cfg.index))
    doc["majorant"] = sequence_to_json_value(majorant(x))
    try:
        lad = LadderSpec(p, cfg.ladder_direction, cfg.ladder_family, cfg.ladder_count)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc["ladder"] = {
        "direction": lad.direction,
        "family": lad.family,
        "exponents": lad.exponents(),
        "norms": ladder_norms(x, lad),
    }
    if cfg.window:
        try:
            doc["ratio_beta"] = ratio_beta(x, cfg.window)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    rows = [("lp", doc["lp"])] + [(k, doc[k]) for k in ("ces", "dp") if k in doc] + [("omega", doc["omega"])]
    rows += [(f"ladder[{q}]", v) for q, v in zip(doc["ladder"]["exponents"], doc["ladder"]["norms"])]
    if "ratio_beta" in doc:
        rows.append(("ratio_beta", doc["ratio_beta"]))
    cfg.tables["norms"] = (["name", "value"], rows)
    return EXIT_OK, doc


def _run_verify(cfg):
    if cfg.suite != "all" and cfg.suite not in verify.SUITES:
        raise UsageError(f"unknown suite {cfg.suite!r}")
    checks = verify.run_suites(cfg.suite, cfg.trials, 42 if cfg.seed is None else cfg.seed)
    docs = [c.as_dict() for c in checks]
    cfg.tables["verify"] = (["suite", "check", "passed", "value", "threshold"],
                            [list(d.values()) for d in docs])
    ok = all(c.passed for c in checks)
    return (EXIT_OK if ok else EXIT_VIOLATED), {
        "suite": cfg.suite,
        "passed": sum(c.passed for c in checks),
        "failed": sum(not c.passed for c in checks),
        "checks": docs,
    }


RUNNERS = {
    "apply": _run_apply,
    "inverse": _run_inverse,
    "resolvent": _run_resolvent,
    "solve-range": _run_solve_range,
    "matrix": _run_matrix,
    "eigvec": _run_eigvec,
    "dual-eigvec": _run_dual_eigvec,
    "c1-dual-eigvec": _run_c1_dual_eigvec,
    "spectrum": _run_spectrum,
    "identity": _run_identity,
    "ergodic": _run_ergodic,
    "bounds": _run_bounds,
    "norms": _run_norms,
    "verify": _run_verify,
}


def _config_doc(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d.pop("tables")
    d.pop("output")
    d.pop("dump_matrix")
    return d


def run(cfg: RunConfig):
    """Execute one command; returns ``(exit_status, document)``.

    Raises :class:`UsageError` for invalid configurations.
    """
    if cfg.command not in RUNNERS:
        raise UsageError(f"unknown command {cfg.command!r}")
    if cfg.mode not in ("float", "exact"):
        raise UsageError(f"mode must be float or exact, got {cfg.mode!r}")
    if cfg.N < 1:
        raise UsageError("N must be positive")
    try:
        status, result = RUNNERS[cfg.command](cfg)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(str(exc)) from None
    doc = {"command": cfg.command, "config": _config_doc(cfg), "status": status, "result": result}
    return status, doc


def render(cfg: RunConfig, doc: dict) -> str:
    if cfg.format == "json":
        return to_json(doc)
    if not cfg.tables:
        raise UsageError(f"no CSV form for {cfg.command}")
    (header, rows), = cfg.tables.values()
    return rows_to_csv(header, rows)


def _write(path: str, text: str):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


# --- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--t", default="1/2", help="parameter t in [0, 1], decimal or num/den (default 1/2)")
    common.add_argument("--n", dest="N", type=int, default=256, help="truncation order N (default 256)")
    common.add_argument("--mode", choices=("float", "exact"), default="float")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--input", help="sequence file (JSON array)")
    common.add_argument("--basis", type=int, default=0, help="use e_k as input when --input is absent")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--trials", type=int, default=20)
    common.add_argument("--p", default="2", help="exponent p in [1, inf]")

    parser = _Parser(prog="cesaro", description="Generalized Cesaro operators on truncated sequence spaces.")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def cmd(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    p = cmd("apply", "apply C_t, D_phi, S^m, R_t or the dual C'_t to a sequence")
    p.add_argument("--op", choices=[k.value for k in OpKind], default="Ct")
    p.add_argument("--m", type=int, default=1, help="shift power (Shift only)")

    cmd("inverse", "solve C_t x = y by the explicit inverse")

    p = cmd("resolvent", "solve (C_t - nu I) x = y")
    p.add_argument("--nu", default="2", help="complex scalar as re,im")
    p.add_argument("--method", choices=("substitution", "closed-form"), default="substitution")

    cmd("solve-range", "solve (I - C_t) w = y for y with y_0 = 0")

    p = cmd("matrix", "dense N x N matrix of C_t")
    p.add_argument("--dump-matrix", help="also write the matrix as row-major CSV to this path")

    p = cmd("eigvec", "eigenvector x^[m] of C_t for 1/(m+1)")
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--alpha", default="1", help="nonzero scale, re,im")

    p = cmd("dual-eigvec", "finitely supported eigenvector z^[n] of the dual")
    p.add_argument("--index", type=int, default=0, help="eigenvalue index n")

    p = cmd("c1-dual-eigvec", "product-formula eigenvector of the dual classical Cesaro operator")
    p.add_argument("--z", default="2", help="eigenvalue z as re,im")

    p = cmd("spectrum", "residuals of the closed-form eigenpairs on a truncation")
    p.add_argument("--cap", type=int, help="number of eigenpairs checked (default min(N, 32))")

    p = cmd("identity", "binomial alternating-sum identity for n = 0..max-n")
    p.add_argument("--max-n", type=int, default=30)

    p = cmd("ergodic", "iterates and Cesaro means against the limit projection")
    p.add_argument("--steps", type=int, default=60)
    p.add_argument("--space", choices=("sup", "lp", "ces", "dp", "omega"), default="sup",
                   help="norm for the errors (default sup)")
    p.add_argument("--index", type=int, default=0, help="seminorm index for --space omega")

    cmd("bounds", "operator-norm estimates against closed-form bounds")

    p = cmd("norms", "every norm family evaluated on a sequence")
    p.add_argument("--index", type=int, default=0, help="seminorm index n for r_n")
    p.add_argument("--ladder-direction", choices=("plus", "minus"), default="plus")
    p.add_argument("--ladder-family", choices=("lp", "ces", "dp"), default="lp")
    p.add_argument("--ladder-count", type=int, default=8)
    p.add_argument("--window", type=int, default=0, help="trailing window for the ratio estimate (0 = skip)")

    p = cmd("verify", "run invariant suites")
    p.add_argument("--suite", choices=("core", "operators", "spectral", "ergodic", "bounds", "all"), default="all")
    return parser


def config_from_args(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    known = {f for f in RunConfig.__dataclass_fields__ if f != "tables"}
    return RunConfig(**{k: v for k, v in ns.items() if k in known})


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
        status, doc = run(cfg)
        text = render(cfg, doc)
        if cfg.output:
            _write(cfg.output, text)
        else:
            sys.stdout.write(text)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return status


if __name__ == "__main__":
    sys.exit(main())
