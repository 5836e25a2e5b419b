"""Command-line front end.

    truncfit fit --input data.txt [--lognormal] [--lo V --hi V] [--eta V] [--tol V]
                 [--max-iter N] [--exponential] [--format json|text]
    truncfit synth --alpha V --psi V --lo V --hi V -n N --seed S --out PATH

Exit status of ``fit``: 0 converged, 2 not converged, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .errors import (
    BoundsDoNotBracketData,
    EmptyDataset,
    NonPositiveData,
    ParseError,
    TruncFitError,
)
from .estimator import FitConfig, FitReport, compute_moments, fit, fit_exponential
from .model import TruncatedModel, lognormal_view
from .quadrature import Interval
from .synth import SamplerConfig, sample

__all__ = ["RunRequest", "Report", "ingest", "run", "synth_command", "main"]


PSI_NOTE_THRESHOLD = 1e-3
_NUMBER = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


@dataclass(frozen=True)
class RunRequest:
    input_path: str
    distribution: Literal["normal", "lognormal"] = "normal"
    bounds: tuple[float | None, float | None] | None = None
    constrain_psi_zero: bool = False
    eta: float = 0.33
    tol: float = 1e-8
    max_iterations: int = 10_000
    output_format: Literal["json", "text"] = "json"


@dataclass(frozen=True)
class Report:
    alpha: float
    psi: float
    beta: float
    mu: float | None
    sigma: float | None
    y_min: float
    y_max: float
    x_min: float | None
    x_max: float | None
    log_likelihood: float
    iterations: int
    converged: bool
    eta_used: float
    n: int
    power_law_note: str

    def to_json(self) -> str:
        return json.dumps({k: _stable(v) for k, v in asdict(self).items()}) + "\n"

    def to_text(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            value = _stable(value)
            lines.append(f"{key}: {'-' if value is None else value}")
        return "\n".join(lines) + "\n"


def _stable(value):
    # 12 significant digits; non-finite floats become null
    if isinstance(value, float):
        return float(f"{value:.12g}") if math.isfinite(value) else None
    return value


def ingest(path: str | Path) -> np.ndarray:
    """One number per line; blank lines and '#' comments are skipped."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            if not _NUMBER.fullmatch(text):
                raise ParseError(str(path), lineno, text)
            values.append(float(text))
    if not values:
        raise EmptyDataset(f"{path}: no data values")
    return np.array(values)


def _power_law_note(report: FitReport, lognormal: bool, constrained: bool) -> str:
    if not (constrained or abs(report.psi) < PSI_NOTE_THRESHOLD):
        return ""
    head = "psi fixed at 0" if constrained else f"|psi| < {PSI_NOTE_THRESHOLD:g}"
    if lognormal:
        body = f"density is (close to) a power law x^-beta with beta = {report.model.beta:.6g}"
    else:
        body = f"density is (close to) an exponential exp(-alpha*y) with alpha = {report.alpha:.6g}"
    return f"{head}: {body} (reporting heuristic, not a statistical test)"


def run(req: RunRequest) -> Report:
    data = ingest(req.input_path)
    lognormal = req.distribution == "lognormal"
    if lognormal and np.any(data <= 0.0):
        raise NonPositiveData("lognormal fit needs strictly positive data")

    lo, hi = req.bounds if req.bounds is not None else (None, None)
    lo = float(data.min()) if lo is None else float(lo)
    hi = float(data.max()) if hi is None else float(hi)
    if not (lo <= data.min() and data.max() <= hi):
        raise BoundsDoNotBracketData(f"bounds [{lo}, {hi}] do not contain all data "
                                     f"[{data.min()}, {data.max()}]")
    if lognormal:
        if lo <= 0.0:
            raise NonPositiveData(f"lognormal lower bound must be > 0, got {lo}")
        y, support = np.log(data), Interval(math.log(lo), math.log(hi))
    else:
        y, support = data, Interval(lo, hi)

    s = compute_moments(y)
    cfg = FitConfig(eta=req.eta, tol_alpha=req.tol, tol_psi=req.tol, max_iterations=req.max_iterations)
    result = (fit_exponential if req.constrain_psi_zero else fit)(s, support, cfg)

    loglik = result.log_likelihood
    x_min = x_max = None
    if lognormal:
        _, _, xb = lognormal_view(result.model)
        x_min, x_max = xb.lo, xb.hi
        # density of x = exp(y) carries the Jacobian 1/x
        loglik -= s.n * s.m1
    std = result.standard
    return Report(
        alpha=result.alpha,
        psi=result.psi,
        beta=result.model.beta,
        mu=std.mu if std else None,
        sigma=std.sigma if std else None,
        y_min=support.lo,
        y_max=support.hi,
        x_min=x_min,
        x_max=x_max,
        log_likelihood=loglik,
        iterations=result.iterations,
        converged=result.converged,
        eta_used=result.eta_used,
        n=s.n,
        power_law_note=_power_law_note(result, lognormal, req.constrain_psi_zero),
    )


def synth_command(
    alpha: float,
    psi: float,
    lo: float,
    hi: float,
    n: int,
    seed: int,
    out: str | Path,
    lognormal: bool = False,
    method: str = "inverse_cdf_table",
) -> Path:
    """Write ``n`` seeded draws in the ingest format."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    model = TruncatedModel(alpha, psi, Interval(lo, hi))
    y = sample(model, n, SamplerConfig(seed=seed, method=method))
    values = np.exp(y) if lognormal else y
    out = Path(out)
    header = (f"# truncfit synth alpha={alpha!r} psi={psi!r} lo={lo!r} hi={hi!r} "
              f"n={n} seed={seed} method={method}{' lognormal' if lognormal else ''}\n")
    out.write_text(header + "".join(f"{v!r}\n" for v in values.tolist()), encoding="utf-8")
    return out


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="truncfit", description="Fit truncated normal / lognormal distributions.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log iteration restarts")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a data file")
    p.add_argument("--input", required=True, help="file with one value per line")
    p.add_argument("--lognormal", action="store_true", help="fit ln(x) (data must be > 0)")
    p.add_argument("--lo", type=float, help="lower truncation point in data units (default: data min)")
    p.add_argument("--hi", type=float, help="upper truncation point in data units (default: data max)")
    p.add_argument("--eta", type=float, default=0.33, help="step size in (0, 1)")
    p.add_argument("--tol", type=float, default=1e-8, help="threshold on |delta alpha| and |delta psi|")
    p.add_argument("--max-iter", type=_positive_int, default=10_000)
    p.add_argument("--exponential", action="store_true", help="fix psi = 0 (exponential / power law)")
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("synth", help="write a seeded synthetic sample")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--psi", type=float, required=True)
    p.add_argument("--lo", type=float, required=True, help="support bounds in y units")
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("-n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--lognormal", action="store_true", help="write x = exp(y) instead of y")
    p.add_argument("--method", choices=("inverse_cdf_table", "rejection"), default="inverse_cdf_table")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "synth":
            synth_command(args.alpha, args.psi, args.lo, args.hi, args.n, args.seed,
                          args.out, lognormal=args.lognormal, method=args.method)
            return 0
        bounds = None if args.lo is None and args.hi is None else (args.lo, args.hi)
        req = RunRequest(
            input_path=args.input,
            distribution="lognormal" if args.lognormal else "normal",
            bounds=bounds,
            constrain_psi_zero=args.exponential,
            eta=args.eta,
            tol=args.tol,
            max_iterations=args.max_iter,
            output_format=args.format,
        )
        report = run(req)
    except (TruncFitError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(report.to_json() if req.output_format == "json" else report.to_text())
    return 0 if report.converged else 2


if __name__ == "__main__":
    sys.exit(main())
